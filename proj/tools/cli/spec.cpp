#include "spec.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace hypoco::cli {

namespace {

std::string at(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string at(const std::string& path, size_t i) { return path + "[" + std::to_string(i) + "]"; }

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw SpecError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw SpecError(at(path, key), "missing required field");
  return *it;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw SpecError(path, "expected a number");
  double v = j.get<double>();
  if (!std::isfinite(v)) throw SpecError(path, "must be finite");
  return v;
}

double number_or(const json& obj, const std::string& key, double fallback, const std::string& path) {
  auto it = obj.find(key);
  return it == obj.end() ? fallback : number(*it, at(path, key));
}

int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw SpecError(path, "expected an integer");
  return j.get<int>();
}

cplx complex_entry(const json& j, const std::string& path) {
  if (j.is_number()) return {number(j, path), 0.0};
  if (j.is_array() && j.size() == 2) return {number(j[0], at(path, 0)), number(j[1], at(path, 1))};
  throw SpecError(path, "expected a number or an [re, im] pair");
}

RealVector real_vector(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw SpecError(path, "expected a non-empty array of numbers");
  RealVector v(static_cast<Eigen::Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = number(j[i], at(path, i));
  return v;
}

int log2_exact(int d) {
  int n = 0;
  while ((1 << n) < d) ++n;
  return (1 << n) == d ? n : -1;
}

Matrix pauli_word(const json& j, int dim, const std::string& path) {
  if (!j.is_string()) throw SpecError(path, "expected a Pauli string");
  std::string w = j.get<std::string>();
  for (char c : w)
    if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z') throw SpecError(path, "Pauli strings use only I, X, Y, Z");
  if (w.empty() || (1 << w.size()) != dim) throw SpecError(path, "Pauli string length does not match the register");
  return pauli_string(w);
}

// Operator in one of the forms: dense rows, {"pauli": [...]}, {"word"}, {"pauli_on"},
// {"diagonal"}, {"unit": [r, s]}.
Matrix parse_operator(const json& j, int dim, const std::string& path) {
  Matrix m;
  if (j.is_array()) {
    m = parse_matrix(j, path);
  } else if (j.is_object() && j.contains("word")) {
    cplx c = j.contains("coeff") ? complex_entry(j["coeff"], at(path, "coeff")) : cplx(1.0);
    m = c * pauli_word(j["word"], dim, at(path, "word"));
  } else if (j.is_object() && j.contains("pauli")) {
    const json& terms = j["pauli"];
    if (!terms.is_array() || terms.empty()) throw SpecError(at(path, "pauli"), "expected a list of terms");
    m = Matrix::Zero(dim, dim);
    for (size_t i = 0; i < terms.size(); ++i) {
      std::string p = at(at(path, "pauli"), i);
      cplx c = terms[i].contains("coeff") ? complex_entry(terms[i]["coeff"], at(p, "coeff")) : cplx(1.0);
      m += c * pauli_word(require(terms[i], "word", p), dim, at(p, "word"));
    }
  } else if (j.is_object() && j.contains("site")) {
    int n = log2_exact(dim);
    if (n < 0) throw SpecError(path, "site operators need a qubit register");
    int site = integer(j["site"], at(path, "site"));
    if (site < 0 || site >= n) throw SpecError(at(path, "site"), "site out of range");
    const json& p = require(j, "op", path);
    if (!p.is_string() || p.get<std::string>().size() != 1)
      throw SpecError(at(path, "op"), "expected one of \"X\", \"Y\", \"Z\"");
    char c = p.get<std::string>()[0];
    if (c != 'X' && c != 'Y' && c != 'Z' && c != 'I') throw SpecError(at(path, "op"), "unknown Pauli");
    m = pauli_on(n, site, c);
  } else if (j.is_object() && j.contains("diagonal")) {
    RealVector d = real_vector(j["diagonal"], at(path, "diagonal"));
    m = d.cast<cplx>().asDiagonal();
  } else if (j.is_object() && j.contains("unit")) {
    const json& u = j["unit"];
    if (!u.is_array() || u.size() != 2) throw SpecError(at(path, "unit"), "expected [r, s]");
    int r = integer(u[0], at(at(path, "unit"), 0)), s = integer(u[1], at(at(path, "unit"), 1));
    if (r < 0 || r >= dim || s < 0 || s >= dim) throw SpecError(at(path, "unit"), "index out of range");
    m = matrix_unit(dim, r, s);
  } else {
    throw SpecError(path, "unrecognized operator form");
  }
  if (m.rows() != dim || m.cols() != dim)
    throw SpecError(path, "operator is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                              ", expected " + std::to_string(dim) + "x" + std::to_string(dim));
  return m;
}

QuantumState parse_sigma(const json& j, int dim, const Matrix& h, const std::string& path) {
  try {
    if (j.is_string()) {
      if (j.get<std::string>() != "maximally_mixed") throw SpecError(path, "unknown state keyword");
      return QuantumState::maximally_mixed(dim);
    }
    if (j.is_object() && j.contains("diagonal")) {
      RealVector mu = real_vector(j["diagonal"], at(path, "diagonal"));
      if (mu.size() != dim) throw SpecError(at(path, "diagonal"), "wrong length");
      return QuantumState::from_matrix(mu.cast<cplx>().asDiagonal());
    }
    if (j.is_object() && j.contains("eigenvalues")) {
      RealVector mu = real_vector(j["eigenvalues"], at(path, "eigenvalues"));
      if (mu.size() != dim) throw SpecError(at(path, "eigenvalues"), "wrong length");
      Matrix basis = j.contains("basis") ? parse_matrix(j["basis"], at(path, "basis")) : Matrix();
      return QuantumState::from_spectrum(mu, basis);
    }
    if (j.is_object() && j.contains("gibbs")) {
      const json& g = j["gibbs"];
      std::string gp = at(path, "gibbs");
      double beta = number(require(g, "beta", gp), at(gp, "beta"));
      Matrix hg = g.contains("hamiltonian") ? parse_operator(g["hamiltonian"], dim, at(gp, "hamiltonian")) : h;
      return QuantumState::gibbs(hg, beta);
    }
    if (j.is_object() && j.contains("matrix")) return QuantumState::from_matrix(parse_matrix(j["matrix"], path));
  } catch (const SpecError&) {
    throw;
  } catch (const InputError& e) {
    throw SpecError(path, e.what());
  }
  throw SpecError(path, "unrecognized state form");
}

FilterFunction parse_filter(const json& j, const std::string& path) {
  if (j.is_string()) {
    std::string s = j.get<std::string>();
    if (s == "one") return [](double) { return 1.0; };
    if (s == "cos2")
      return [](double v) {
        double c = std::cos(0.5 * std::numbers::pi * v);
        return std::abs(c) < 1e-12 ? 0.0 : c * c;
      };
    if (s == "gaussian") return [](double v) { return std::exp(-0.5 * v * v); };
    throw SpecError(path, "unknown filter; use \"one\", \"cos2\", \"gaussian\" or a sample table");
  }
  if (j.is_object() && j.contains("samples")) {
    const json& t = j["samples"];
    if (!t.is_array() || t.empty()) throw SpecError(at(path, "samples"), "expected [[nu, q], ...]");
    std::vector<std::pair<double, double>> table;
    for (size_t i = 0; i < t.size(); ++i) {
      std::string p = at(at(path, "samples"), i);
      if (!t[i].is_array() || t[i].size() != 2) throw SpecError(p, "expected [nu, q]");
      table.push_back({number(t[i][0], at(p, 0)), number(t[i][1], at(p, 1))});
    }
    return [table, path](double v) {
      for (const auto& [nu, q] : table)
        if (std::abs(nu - v) <= 1e-9 * std::max(1.0, std::abs(v))) return q;
      throw SpecError(path, "filter table has no entry for Bohr difference " + std::to_string(v));
    };
  }
  throw SpecError(path, "unrecognized filter");
}

GraphSpec parse_graph(const json& p, const std::string& path) {
  GraphSpec g;
  g.n = integer(require(p, "n", path), at(path, "n"));
  const json& edges = require(p, "edges", path);
  if (!edges.is_array()) throw SpecError(at(path, "edges"), "expected a list of [r, s] or [r, s, w]");
  for (size_t i = 0; i < edges.size(); ++i) {
    std::string ep = at(at(path, "edges"), i);
    const json& e = edges[i];
    if (!e.is_array() || (e.size() != 2 && e.size() != 3)) throw SpecError(ep, "expected [r, s] or [r, s, w]");
    g.edges.push_back({integer(e[0], at(ep, 0)), integer(e[1], at(ep, 1)), e.size() == 3 ? number(e[2], at(ep, 2)) : 1.0});
  }
  return g;
}

GraphModel parse_graph_model(const json& p, const std::string& path) {
  GraphSpec g = parse_graph(p, path);
  RealVector mu = p.contains("sigma") ? real_vector(p["sigma"], at(path, "sigma"))
                                      : RealVector(RealVector::Constant(g.n, 1.0 / std::max(g.n, 1)));
  try {
    return graph_lindblad(g, mu);
  } catch (const InputError& e) {
    throw SpecError(path, e.what());
  }
}

void set_optional_hamiltonian(Model& m, const json& p, const std::string& path) {
  if (p.contains("hamiltonian"))
    m.coherent = hamiltonian_only(parse_operator(p["hamiltonian"], m.sigma.dim(), at(path, "hamiltonian")));
}

Model named_model(const json& named, const std::string& path) {
  std::string kind = require(named, "model", path).get<std::string>();
  const json empty = json::object();
  const json& p = named.contains("params") ? named["params"] : empty;
  const std::string pp = at(path, "params");
  if (!p.is_object()) throw SpecError(pp, "expected an object");
  try {
    if (kind == "suite") {
      std::string which = require(p, "name", pp).get<std::string>();
      if (which == "qubit") return qubit_model();
      if (which == "walk") return walk_model();
      if (which == "tfim") return tfim_model();
      if (which == "graph") return graph_model();
      if (which == "haar2") return haar_model(2);
      if (which == "haar3") return haar_model(3);
      throw SpecError(at(pp, "name"), "unknown suite model '" + which + "'");
    }
    if (kind == "dephasing_walk") {
      int n = integer(require(p, "n", pp), at(pp, "n"));
      double gamma = number_or(p, "gamma", 1.0, pp);
      RealMatrix adj;
      const json g = p.contains("graph") ? p["graph"] : json("hypercube");
      if (g.is_string() && g.get<std::string>() == "hypercube") {
        adj = hypercube_adjacency(n);
      } else if (g.is_string() && g.get<std::string>() == "cycle") {
        adj = cycle_adjacency(1 << n);
      } else {
        adj = parse_matrix(g, at(pp, "graph")).real();
      }
      return dephasing_walk(n, gamma, adj).model;
    }
    if (kind == "tfim") {
      return tfim(integer(require(p, "n", pp), at(pp, "n")), number_or(p, "h", 1.0, pp), number_or(p, "gamma", 1.0, pp))
          .model;
    }
    if (kind == "single_jump") {
      Matrix a = parse_matrix(require(p, "A", pp), at(pp, "A"));
      Matrix h = parse_matrix(require(p, "H", pp), at(pp, "H"));
      return single_jump_model(a, h).model;
    }
    if (kind == "graph") {
      GraphModel gm = parse_graph_model(p, pp);
      set_optional_hamiltonian(gm.model, p, pp);
      return gm.model;
    }
    if (kind == "birth_death") {
      const json& s = require(p, "sizes", pp);
      if (!s.is_array() || s.empty()) throw SpecError(at(pp, "sizes"), "expected a list of chain lengths");
      std::vector<int> sizes;
      for (size_t i = 0; i < s.size(); ++i) sizes.push_back(integer(s[i], at(at(pp, "sizes"), i)));
      Model m = birth_death_spectrum(sizes, number_or(p, "beta", 0.0, pp)).model.model;
      set_optional_hamiltonian(m, p, pp);
      return m;
    }
    if (kind == "haar_gibbs") {
      RealVector spec = real_vector(require(p, "spectrum", pp), at(pp, "spectrum"));
      FilterFunction q = parse_filter(p.contains("filter") ? p["filter"] : json("one"), at(pp, "filter"));
      Model m = haar_avg_gibbs(spec, number_or(p, "beta", 0.0, pp), q);
      set_optional_hamiltonian(m, p, pp);
      return m;
    }
    if (kind == "lift") {
      GraphModel base = parse_graph_model(require(p, "base", pp), at(pp, "base"));
      Matrix a = parse_matrix(require(p, "A", pp), at(pp, "A"));
      Model m = lift_model(base, a).model;
      set_optional_hamiltonian(m, p, pp);
      return m;
    }
  } catch (const SpecError&) {
    throw;
  } catch (const InputError& e) {
    throw SpecError(path, e.what());
  }
  throw SpecError(at(path, "model"), "unknown model '" + kind + "'");
}

Model explicit_model(const json& spec) {
  int dim = 0;
  if (spec.contains("qubits")) {
    int n = integer(spec["qubits"], "qubits");
    if (n < 1 || n > 6) throw SpecError("qubits", "must lie in [1, 6]");
    dim = 1 << n;
  } else {
    dim = integer(require(spec, "dim", ""), "dim");
  }
  if (dim < 1 || dim > 64) throw SpecError("dim", "must lie in [1, 64]");
  Matrix h = spec.contains("hamiltonian") ? parse_operator(spec["hamiltonian"], dim, "hamiltonian")
                                          : Matrix(Matrix::Zero(dim, dim));
  if (!is_hermitian(h, 1e-10)) throw SpecError("hamiltonian", "must be Hermitian");
  double coupling = number_or(spec, "coupling", 1.0, "");
  if (coupling < 0.0) throw SpecError("coupling", "must be >= 0");
  QuantumState sigma = parse_sigma(spec.contains("sigma") ? spec["sigma"] : json("maximally_mixed"), dim, h, "sigma");
  Lindbladian ld;
  try {
    if (spec.contains("canonical")) {
      if (spec.contains("jumps")) throw SpecError("canonical", "give either jumps or canonical pairs, not both");
      const json& c = spec["canonical"];
      if (!c.is_array() || c.empty()) throw SpecError("canonical", "expected a non-empty list");
      std::vector<CanonicalPair> pairs;
      for (size_t i = 0; i < c.size(); ++i) {
        std::string p = at("canonical", i);
        pairs.push_back({number(require(c[i], "omega", p), at(p, "omega")),
                         parse_operator(require(c[i], "op", p), dim, at(p, "op"))});
      }
      ld = build_gns_canonical(sigma, std::move(pairs));
    } else {
      std::vector<Jump> jumps;
      const json empty = json::array();
      const json& js = spec.contains("jumps") ? spec["jumps"] : empty;
      if (!js.is_array()) throw SpecError("jumps", "expected a list");
      for (size_t i = 0; i < js.size(); ++i) {
        std::string p = at("jumps", i);
        double w = number_or(js[i], "weight", 1.0, p);
        if (!(w > 0.0)) throw SpecError(at(p, "weight"), "must be positive");
        jumps.push_back({w, parse_operator(require(js[i], "op", p), dim, at(p, "op"))});
      }
      ld = build_gksl(Matrix::Zero(dim, dim), std::move(jumps));
    }
  } catch (const SpecError&) {
    throw;
  } catch (const InputError& e) {
    throw SpecError("jumps", e.what());
  }
  Lindbladian lh = hamiltonian_only(h).with_coupling(coupling);
  std::string name = spec.contains("name") && spec["name"].is_string() ? spec["name"].get<std::string>() : "explicit";
  return Model{name, sigma, lh, ld};
}

}  // namespace

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Matrix parse_matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw SpecError(path, "expected a non-empty array of rows");
  const size_t rows = j.size();
  if (!j[0].is_array() || j[0].empty()) throw SpecError(at(path, 0), "expected a row");
  const size_t cols = j[0].size();
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (size_t r = 0; r < rows; ++r) {
    std::string rp = at(path, r);
    if (!j[r].is_array() || j[r].size() != cols) throw SpecError(rp, "ragged row");
    for (size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = complex_entry(j[r][c], at(rp, c));
  }
  return m;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      cplx z = m(r, c);
      if (z.imag() == 0.0)
        row.push_back(z.real());
      else
        row.push_back(json::array({z.real(), z.imag()}));
    }
    rows.push_back(row);
  }
  return rows;
}

LoadedModel parse_model(const json& spec) {
  if (!spec.is_object()) throw SpecError("", "model spec must be a JSON object");
  auto sc = spec.find("schema");
  if (sc == spec.end()) throw SpecError("schema", "missing required field");
  if (!sc->is_string() || sc->get<std::string>() != kSchema)
    throw SpecError("schema", std::string("unsupported schema, expected \"") + kSchema + "\"");
  LoadedModel out{spec.contains("named") ? named_model(spec["named"], "named") : explicit_model(spec), spec,
                  fnv1a_hex(spec.dump())};
  if (spec.contains("name") && spec["name"].is_string()) out.model.name = spec["name"].get<std::string>();
  return out;
}

json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    size_t line = 1, col = 1;
    for (size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw InputError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": JSON syntax error");
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str(), path);
}

LoadedModel load_model_file(const std::string& path) { return parse_model(read_json_file(path)); }

}  // namespace hypoco::cli
