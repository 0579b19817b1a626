#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "hypoco/certificate.hpp"
#include "hypoco/evolve.hpp"
#include "hypoco/spectral.hpp"

#ifndef HYPOCO_VERSION
#define HYPOCO_VERSION "0.0.0"
#endif

namespace hypoco::cli {

namespace {

struct TolKnob {
  const char* env;
  double Tolerances::*field;
};

const TolKnob kKnobs[] = {
    {"HYPOCO_INVARIANCE_TOL", &Tolerances::invariance},
    {"HYPOCO_DETAILED_BALANCE_TOL", &Tolerances::detailed_balance},
    {"HYPOCO_STANDARD_DBC_TOL", &Tolerances::standard_dbc},
    {"HYPOCO_COMMUTANT_TOL", &Tolerances::commutant},
    {"HYPOCO_KERNEL_TOL", &Tolerances::kernel},
    {"HYPOCO_MODULAR_TOL", &Tolerances::modular},
    {"HYPOCO_BOHR_CLUSTER_TOL", &Tolerances::bohr_cluster},
    {"HYPOCO_ASSUMPTION_TOL", &Tolerances::assumption},
    {"HYPOCO_HYPOCO_INDEX_TOL", &Tolerances::hypoco_index},
    {"HYPOCO_SLACK_TOL", &Tolerances::slack},
    {"HYPOCO_QUADRATURE_TOL", &Tolerances::quadrature},
};

std::string knob_name(const char* env) {
  std::string s(env + 7);  // drop "HYPOCO_"
  s.resize(s.size() - 4);  // drop "_TOL"
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json complex_list(const std::vector<cplx>& zs) {
  json a = json::array();
  for (cplx z : zs) a.push_back(json::array({z.real(), z.imag()}));
  return a;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v + 0.0);
  return buf;
}

std::string short_fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

json header(const std::string& command, const LoadedModel& lm, const RunConfig& cfg) {
  return json{{"tool", "hypoco"},         {"version", HYPOCO_VERSION}, {"command", command},
              {"model", lm.model.name},   {"model_hash", lm.hash},     {"seed", cfg.seed},
              {"tolerances", tolerances_json(cfg.tol)}};
}

json structural_json(const StructuralConstants& sc) {
  return json{{"lambda_D", sc.lambda_D},
              {"s_H", sc.s_H},
              {"norm_LD", sc.norm_LD},
              {"norm_LH_plus", sc.norm_LH_plus},
              {"norm_sqrt_LD", sc.norm_sqrt_LD}};
}

json certificate_json(const RateCertificate& c) {
  json j{{"T", c.T},
         {"beta", c.beta},
         {"C1", c.C1},
         {"C2", c.C2},
         {"nu", c.nu},
         {"prefactor", c.prefactor},
         {"constants", structural_json(c.constants)},
         {"assumption_ok", c.assumption_ok},
         {"assumption_defect", c.assumption_defect},
         {"dim_kernel", c.dim_kernel},
         {"default_T", c.default_T}};
  if (c.nu_closed_form) j["nu_closed_form"] = *c.nu_closed_form;
  if (c.prefactor_closed_form) j["prefactor_closed_form"] = *c.prefactor_closed_form;
  return j;
}

double get_number(const json& j, const std::string& key, const std::string& ctx) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number()) throw SpecError(ctx + "." + key, "missing or not a number");
  return it->get<double>();
}

bool rel_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1e-300, std::abs(a), std::abs(b)});
}

void write_atomic(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream o(tmp, std::ios::binary);
    if (!o) throw InputError("cannot write " + tmp.string());
    o << text;
    if (!o) throw InputError("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::vector<double> parse_grid(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    char* end = nullptr;
    double v = std::strtod(item.c_str(), &end);
    if (item.empty() || end == item.c_str() || *end != '\0' || !std::isfinite(v))
      throw InputError("--alpha-grid: cannot parse '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw InputError("--alpha-grid: empty grid");
  return out;
}

}  // namespace

Tolerances tolerances_from_env(Tolerances base) {
  for (const TolKnob& k : kKnobs) {
    const char* v = std::getenv(k.env);
    if (!v) continue;
    char* end = nullptr;
    double d = std::strtod(v, &end);
    if (end == v || *end != '\0' || !(d > 0.0) || !std::isfinite(d))
      throw InputError(std::string(k.env) + " must be a positive number");
    base.*(k.field) = d;
  }
  return base;
}

json tolerances_json(const Tolerances& t) {
  json j = json::object();
  for (const TolKnob& k : kKnobs) j[knob_name(k.env)] = t.*(k.field);
  return j;
}

std::string env_help() {
  std::string s = "Tolerance overrides (environment):\n";
  Tolerances d;
  for (const TolKnob& k : kKnobs) s += "  " + std::string(k.env) + " (default " + short_fmt(d.*(k.field)) + ")\n";
  return s;
}

json cmd_structure(const LoadedModel& lm, const RunConfig& cfg) {
  Lindbladian l = lm.model.full();
  StructureReport r = structure_report(l, lm.model.sigma, cfg.tol);
  json j = header("structure", lm, cfg);
  j["report"] = json{{"invariant_state_ok", r.invariant_state_ok},
                     {"invariance_residual", r.invariance_residual},
                     {"kms_db", r.kms_db},
                     {"kms_defect", r.kms_defect},
                     {"gns_db", r.gns_db},
                     {"gns_defect", r.gns_defect},
                     {"standard_dbc", r.standard_dbc},
                     {"standard_dbc_residual", r.standard_dbc_residual},
                     {"recovered_k", r.standard_dbc ? matrix_to_json(r.recovered_k) : json(nullptr)},
                     {"primitive", r.primitive},
                     {"commutant_dim", r.commutant_dim},
                     {"kernel_dim_ld", r.kernel_dim_ld},
                     {"classification", to_string(r.classification)}};
  if (lm.model.dissipative.has_dissipative_part()) {
    StructureReport d = structure_report(lm.model.dissipative, lm.model.sigma, cfg.tol);
    j["dissipative"] = json{{"kms_db", d.kms_db},
                            {"kms_defect", d.kms_defect},
                            {"gns_db", d.gns_db},
                            {"gns_defect", d.gns_defect},
                            {"primitive", d.primitive}};
  }
  return j;
}

GapOutput cmd_gap(const LoadedModel& lm, const RunConfig& cfg) {
  for (size_t i = 1; i < cfg.alpha_grid.size(); ++i)
    if (!(cfg.alpha_grid[i] > cfg.alpha_grid[i - 1])) throw InputError("--alpha-grid must be strictly increasing");
  for (double a : cfg.alpha_grid)
    if (!(a >= 0.0)) throw InputError("--alpha-grid entries must be >= 0");
  const Model& m = lm.model;
  Lindbladian l = m.full();
  GapReport g = spectral_gap(l, m.sigma, cfg.tol);
  json j = header("gap", lm, cfg);
  j["gap"] = json{{"spectral_gap", g.spectral_gap},
                  {"singular_gap", g.singular_gap},
                  {"symmetrized_gap", g.symmetrized_gap},
                  {"hypoco_index", g.hypoco_index ? json(*g.hypoco_index) : json(nullptr)},
                  {"attaining", complex_list(g.attaining)},
                  {"eigenvalues", complex_list(g.eigenvalues)}};
  std::vector<GapCurvePoint> curve;
  bool have_limit = true;
  try {
    curve = gap_curve(m.coherent, m.dissipative, m.sigma, cfg.alpha_grid, cfg.tol);
  } catch (const std::exception&) {
    // The large-coupling limit needs [H, sigma] = 0 and KMS detailed balance.
    have_limit = false;
    FramePtr frame = kms_frame(m.sigma);
    Matrix mh = restricted_matrix(m.coherent, frame), md = restricted_matrix(m.dissipative, frame);
    for (double a : cfg.alpha_grid) {
      Matrix x = a * mh + md;
      curve.push_back({a, gap_of_matrix(x), std::nan(""), smallest_singular_value(x)});
    }
  }
  json pts = json::array();
  std::string csv = "alpha,gap,limit,singular_gap\n";
  for (const GapCurvePoint& p : curve) {
    pts.push_back(json{{"alpha", p.alpha}, {"gap", p.gap}, {"limit", number_or_null(p.limit)},
                       {"singular_gap", p.singular_gap}});
    csv += fmt(p.alpha) + "," + fmt(p.gap) + "," + (have_limit ? fmt(p.limit) : std::string("nan")) + "," +
           fmt(p.singular_gap) + "\n";
  }
  j["curve"] = pts;
  j["limit"] = have_limit && !curve.empty() ? number_or_null(curve.front().limit) : json(nullptr);
  return {j, csv};
}

json cmd_certify(const LoadedModel& lm, const RunConfig& cfg) {
  const Model& m = lm.model;
  Lindbladian l = m.full();
  double inv = check_invariance(l, m.sigma);
  if (inv > cfg.tol.invariance * std::max(1.0, l.scale()))
    throw InputError("sigma is not invariant (residual " + fmt(inv) + ")");
  RateCertificate c = certify(m.coherent, m.dissipative, m.sigma, cfg.T, cfg.tol);
  GapReport g = spectral_gap(l, m.sigma, cfg.tol);
  TOptimum opt = optimize_T(c.constants);
  json j = header("certify", lm, cfg);
  j["certificate"] = certificate_json(c);
  j["optimized_T"] = json{{"T", opt.T}, {"nu", opt.nu}};
  j["spectral_gap"] = g.spectral_gap;
  j["singular_gap"] = g.singular_gap;
  j["nu_le_gap"] = c.nu <= g.spectral_gap + 1e-9;
  j["singular_relaxation"] = singular_relaxation_check(c.nu, c.T, l, m.sigma);
  return j;
}

json cmd_validate(const LoadedModel& lm, const json& cert_doc, const RunConfig& cfg) {
  const Model& m = lm.model;
  Lindbladian l = m.full();
  if (!cert_doc.is_object() || !cert_doc.contains("certificate"))
    throw SpecError("certificate", "missing certificate object");
  const json& c = cert_doc["certificate"];
  double T = get_number(c, "T", "certificate");
  double nu = get_number(c, "nu", "certificate");
  double C1 = get_number(c, "C1", "certificate");
  double C2 = get_number(c, "C2", "certificate");
  double pref = get_number(c, "prefactor", "certificate");
  if (!(T > 0.0) || !(nu >= 0.0)) throw SpecError("certificate", "T must be positive and nu nonnegative");

  json checks = json::array();
  bool pass = true;
  auto add = [&](const std::string& name, bool ok, json detail) {
    checks.push_back(json{{"check", name}, {"pass", ok}, {"detail", std::move(detail)}});
    pass = pass && ok;
  };

  std::string claimed_hash = cert_doc.value("model_hash", std::string());
  add("model_hash", claimed_hash == lm.hash, json{{"claimed", claimed_hash}, {"actual", lm.hash}});

  RateCertificate rc = certify(m.coherent, m.dissipative, m.sigma, T, cfg.tol);
  add("nu_le_recomputed", nu <= rc.nu * (1.0 + 1e-9), json{{"claimed", nu}, {"recomputed", rc.nu}});
  add("constants_consistent", rel_close(C1, rc.C1, 1e-9) && rel_close(C2, rc.C2, 1e-9),
      json{{"C1", C1}, {"C1_recomputed", rc.C1}, {"C2", C2}, {"C2_recomputed", rc.C2}});
  add("prefactor_consistent", rel_close(pref, std::exp(nu * T), 1e-9),
      json{{"claimed", pref}, {"exp_nu_T", std::exp(nu * T)}});

  GapReport g = spectral_gap(l, m.sigma, cfg.tol);
  add("nu_le_gap", nu <= g.spectral_gap + 1e-9, json{{"nu", nu}, {"spectral_gap", g.spectral_gap}});
  add("singular_relaxation", singular_relaxation_check(nu, T, l, m.sigma),
      json{{"lhs", nu > 0.0 ? 1.0 / nu + T : std::nan("")}, {"singular_gap", g.singular_gap}});

  if (nu > 0.0) {
    std::mt19937_64 rng(cfg.seed);
    std::vector<double> ts = default_sample_times(nu, cfg.t_max, 20);
    int n = cfg.samples > 0 ? cfg.samples : 10;
    double worst_w = 0.0, worst_p = 0.0, quad = 0.0;
    bool ok = true;
    for (int i = 0; i < n; ++i) {
      TimeAvgResult r = time_avg_check(l, m.sigma, random_mean_zero_hermitian(m.sigma, rng), T, nu, ts,
                                       1.0 + cfg.tol.slack, cfg.tol.quadrature);
      ok = ok && r.pass;
      worst_w = std::max(worst_w, r.worst_window_ratio);
      worst_p = std::max(worst_p, r.worst_pointwise_ratio);
      quad = std::max(quad, r.quadrature_defect);
    }
    add("time_average_decay", ok,
        json{{"samples", n}, {"times", ts.size()}, {"t_end", ts.back()}, {"worst_window_ratio", worst_w},
             {"worst_pointwise_ratio", worst_p}, {"quadrature_defect", quad}});
  }
  json j = header("validate", lm, cfg);
  j["checks"] = checks;
  j["pass"] = pass;
  return j;
}

json cmd_stp(const LoadedModel& lm, const RunConfig& cfg) {
  if (!(cfg.beta > 0.0)) throw InputError("--beta must be positive for the space-time inequality");
  const Model& m = lm.model;
  double T = cfg.T ? *cfg.T : 3.0 / structural_constants(m.coherent, m.dissipative, m.sigma, cfg.tol).s_H;
  int n = cfg.samples > 0 ? cfg.samples : 100;
  StpResult r = stp_verify(m.coherent, m.dissipative, m.sigma, T, cfg.beta, n, cfg.degree, cfg.seed,
                           1.0 + cfg.tol.slack, cfg.tol.quadrature, cfg.tol);
  json j = header("stp", lm, cfg);
  j["stp"] = json{{"T", r.T},
                  {"beta", r.beta},
                  {"samples", n},
                  {"degree", cfg.degree},
                  {"C1", r.C1},
                  {"C2", r.C2},
                  {"worst_ratio", r.worst_ratio},
                  {"quadrature_defect", r.quadrature_defect},
                  {"quadrature_ok", r.quadrature_ok},
                  {"pass", r.pass}};
  j["pass"] = r.pass;
  return j;
}

EvolveOutput cmd_evolve(const LoadedModel& lm, const RunConfig& cfg) {
  const Model& m = lm.model;
  Lindbladian l = m.full();
  GapReport g = spectral_gap(l, m.sigma, cfg.tol);
  if (!(g.spectral_gap > 0.0)) throw AssumptionError("evolve: the model has no spectral gap");
  std::mt19937_64 rng(cfg.seed);
  Matrix x0 = random_mean_zero_hermitian(m.sigma, rng);
  double lam = g.spectral_gap;
  double window = cfg.T.value_or(1.0 / lam);
  std::vector<double> ts;
  for (int i = 0; i <= 40; ++i) ts.push_back(10.0 / lam * i / 40.0);
  DecayCurve dc = decay_curve(l, m.sigma, x0, ts, window);
  NormCurve nc = semigroup_norm_curve(l, m.sigma, log_spaced(5.0 / lam, 50.0 / lam, 24));
  EvolveOutput out;
  out.decay_csv = "t,norm2,window_avg\n";
  for (size_t i = 0; i < dc.times.size(); ++i)
    out.decay_csv += fmt(dc.times[i]) + "," + fmt(dc.values[i]) + "," + fmt(dc.window_avg[i]) + "\n";
  out.norm_csv = "t,opnorm,rate\n";
  for (size_t i = 0; i < nc.ts.size(); ++i)
    out.norm_csv += fmt(nc.ts[i]) + "," + fmt(nc.norms[i]) + "," + fmt(nc.rates[i]) + "\n";
  out.report = header("evolve", lm, cfg);
  out.report["window"] = window;
  out.report["spectral_gap"] = lam;
  out.report["empirical_rate"] = nc.empirical_rate;
  out.report["asymptotic"] = nc.asymptotic;
  return out;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"hypoco: structure, spectral gaps and hypocoercive rate certificates for Lindbladians"};
  app.footer(env_help() +
             "Exit codes: 0 success, 1 validation or assumption failure, 2 input error, 3 numerical failure.");
  app.require_subcommand(1, 1);
  RunConfig cfg;
  std::string alpha_grid;
  double T = std::nan("");
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--spec", cfg.spec_path, "Model spec (JSON, schema hypoco.model/1)")->required();
    sub->add_option("--out", cfg.out_dir, "Write outputs into this directory instead of stdout");
    sub->add_option("--seed", cfg.seed, "RNG seed recorded in every output");
    sub->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  };
  CLI::App* s_structure = app.add_subcommand("structure", "Invariance, detailed balance and primitivity report");
  CLI::App* s_gap = app.add_subcommand("gap", "Spectral gap and the alpha L^H + L^D gap curve");
  CLI::App* s_certify = app.add_subcommand("certify", "Hypocoercive rate certificate");
  CLI::App* s_validate = app.add_subcommand("validate", "Recheck a certificate against the model and its dynamics");
  CLI::App* s_stp = app.add_subcommand("stp", "Space-time Poincare inequality on random polynomial paths");
  CLI::App* s_evolve = app.add_subcommand("evolve", "Decay and semigroup-norm curves");
  for (CLI::App* s : {s_structure, s_gap, s_certify, s_validate, s_stp, s_evolve}) add_common(s);
  s_gap->add_option("--alpha-grid", alpha_grid, "Comma-separated increasing couplings");
  for (CLI::App* s : {s_certify, s_validate, s_stp, s_evolve}) s->add_option("--T", T, "Window length T > 0");
  s_validate->add_option("--certificate", cfg.certificate_path, "Certificate JSON from certify")->required();
  s_validate->add_option("--samples", cfg.samples, "Random initial operators (default 10)");
  s_validate->add_option("--t-max", cfg.t_max, "Largest sampled time");
  s_stp->add_option("--beta", cfg.beta, "Shift beta > 0 (default 0.5)");
  s_stp->add_option("--samples", cfg.samples, "Random polynomial paths (default 100)");
  s_stp->add_option("--degree", cfg.degree, "Polynomial degree (default 3)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    cfg.command = sub->get_name();
    if (!std::isnan(T)) {
      if (!(T > 0.0)) throw InputError("--T must be positive");
      cfg.T = T;
    }
    if (!alpha_grid.empty()) cfg.alpha_grid = parse_grid(alpha_grid);
    cfg.tol = tolerances_from_env();
    LoadedModel lm = load_model_file(cfg.spec_path);

    std::vector<std::pair<std::string, std::string>> files;  // name, content
    int code = kOk;
    if (cfg.command == "structure") {
      files.push_back({"structure.json", cmd_structure(lm, cfg).dump(2) + "\n"});
    } else if (cfg.command == "gap") {
      GapOutput g = cmd_gap(lm, cfg);
      if (cfg.format == "csv" || !cfg.out_dir.empty()) files.push_back({"gap.csv", g.csv});
      if (cfg.format == "json" || !cfg.out_dir.empty()) files.push_back({"gap.json", g.report.dump(2) + "\n"});
    } else if (cfg.command == "certify") {
      files.push_back({"certificate.json", cmd_certify(lm, cfg).dump(2) + "\n"});
    } else if (cfg.command == "validate") {
      json v = cmd_validate(lm, read_json_file(cfg.certificate_path), cfg);
      if (!v["pass"].get<bool>()) code = kValidationFailure;
      files.push_back({"validate.json", v.dump(2) + "\n"});
    } else if (cfg.command == "stp") {
      json v = cmd_stp(lm, cfg);
      if (!v["pass"].get<bool>()) code = kValidationFailure;
      files.push_back({"stp.json", v.dump(2) + "\n"});
    } else if (cfg.command == "evolve") {
      EvolveOutput e = cmd_evolve(lm, cfg);
      if (cfg.format == "csv" || !cfg.out_dir.empty()) {
        files.push_back({"decay.csv", e.decay_csv});
        files.push_back({"norm.csv", e.norm_csv});
      }
      if (cfg.format == "json" || !cfg.out_dir.empty()) files.push_back({"evolve.json", e.report.dump(2) + "\n"});
    }
    if (cfg.out_dir.empty()) {
      for (const auto& f : files) out << f.second;
    } else {
      std::filesystem::create_directories(cfg.out_dir);
      for (const auto& f : files) write_atomic(std::filesystem::path(cfg.out_dir) / f.first, f.second);
    }
    return code;
  } catch (const AssumptionError& e) {
    err << "hypoco: assumption failed: " << e.what() << "\n";
    return kValidationFailure;
  } catch (const NumericalError& e) {
    err << "hypoco: numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const InputError& e) {
    err << "hypoco: input error: " << e.what() << "\n";
    return kInputError;
  } catch (const nlohmann::json::exception& e) {
    err << "hypoco: input error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "hypoco: input error: " << e.what() << "\n";
    return kInputError;
  }
}

}  // namespace hypoco::cli
