#include "hypoco/models.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <set>

namespace hypoco {

Lindbladian hamiltonian_only(const Matrix& h) { return build_gksl(h, {}); }

namespace {

RealVector ascending_eigenvalues(const RealMatrix& sym) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(0.5 * (sym + sym.transpose()), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
  return es.eigenvalues();
}

// D^{1/2} M D^{-1/2} for a generator reversible w.r.t. d.
RealMatrix symmetrize(const RealMatrix& m, const RealVector& d) {
  RealVector sq = d.array().sqrt();
  RealMatrix out = sq.asDiagonal() * m * sq.cwiseInverse().asDiagonal();
  return 0.5 * (out + out.transpose());
}

double generator_gap(const RealMatrix& hhat, const RealVector& d) {
  if (hhat.rows() < 2) throw InputError("generator gap needs at least two states");
  RealVector ev = ascending_eigenvalues(-symmetrize(hhat, d));
  return ev[1];
}

void require_generator(const RealMatrix& hhat, const char* who) {
  const Eigen::Index n = hhat.rows();
  if (n != hhat.cols() || n < 2) throw InputError(std::string(who) + ": generator must be square with n >= 2");
  double scale = std::max(1.0, hhat.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(hhat.row(i).sum()) > 1e-10 * scale)
      throw InputError(std::string(who) + ": rows must sum to zero");
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j && hhat(i, j) < -1e-12 * scale)
        throw InputError(std::string(who) + ": negative off-diagonal entry");
  }
}

double edge_threshold(const RealMatrix& m) { return 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff()); }

}  // namespace

bool is_irreducible(const RealMatrix& g, double tol) {
  const int n = static_cast<int>(g.rows());
  if (n == 0) return false;
  double thr = tol > 0.0 ? tol : edge_threshold(g);
  // Strongly connected: every vertex reaches and is reached from vertex 0.
  for (int pass = 0; pass < 2; ++pass) {
    std::vector<bool> seen(static_cast<size_t>(n), false);
    std::deque<int> q{0};
    seen[0] = true;
    int count = 1;
    while (!q.empty()) {
      int a = q.front();
      q.pop_front();
      for (int b = 0; b < n; ++b) {
        double v = pass == 0 ? g(a, b) : g(b, a);
        if (b != a && !seen[static_cast<size_t>(b)] && v > thr) {
          seen[static_cast<size_t>(b)] = true;
          ++count;
          q.push_back(b);
        }
      }
    }
    if (count != n) return false;
  }
  return true;
}

// ---- single jump -------------------------------------------------------------

SingleJumpModel single_jump_model(const Matrix& a, const Matrix& h) {
  const Eigen::Index n = a.rows();
  if (n < 2 || a.cols() != n || h.rows() != n || h.cols() != n)
    throw InputError("single_jump_model: A and H must be square of the same dimension >= 2");
  if (!is_hermitian(a, 1e-10) || !is_hermitian(h, 1e-10))
    throw InputError("single_jump_model: A and H must be Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es((a + a.adjoint()) * 0.5);
  SingleJumpModel out;
  out.kappa = es.eigenvalues();
  out.eigenbasis = es.eigenvectors();
  const double spread = out.kappa[n - 1] - out.kappa[0];
  double min_gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 1; i < n; ++i) min_gap = std::min(min_gap, out.kappa[i] - out.kappa[i - 1]);
  if (!(min_gap > 1e-9 * std::max(1.0, spread)))
    throw InputError("single_jump_model: the eigenvalues of A must be simple");
  out.lambda_D = min_gap * min_gap;
  out.norm_LD = spread * spread;

  Matrix hr = out.eigenbasis.adjoint() * h * out.eigenbasis;
  out.hhat = RealMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j) out.hhat(i, j) = std::norm(hr(i, j));
  for (Eigen::Index i = 0; i < n; ++i) out.hhat(i, i) = -out.hhat.row(i).sum();
  double hthr = 1e-24 * std::max(1.0, std::pow(spectral_norm(h), 2));
  out.primitive = is_irreducible(out.hhat, hthr);
  out.hhat_gap = std::max(0.0, generator_gap(out.hhat, RealVector::Ones(n)));
  out.s_H = std::sqrt(2.0 * out.hhat_gap);

  Eigen::SelfAdjointEigenSolver<Matrix> eh((h + h.adjoint()) * 0.5, Eigen::EigenvaluesOnly);
  out.h_spread = eh.eigenvalues()[n - 1] - eh.eigenvalues()[0];
  if (out.primitive) {
    double g = out.hhat_gap;
    double d = 28.0 * std::sqrt(g) + 5.0 * out.h_spread;
    out.nu = g * out.lambda_D / (d * d + 36.0 * out.lambda_D * out.norm_LD);
  }

  out.model = Model{"single_jump", QuantumState::maximally_mixed(static_cast<int>(n)), hamiltonian_only(h),
                    build_gksl(Matrix::Zero(n, n), {{2.0, (a + a.adjoint()) * 0.5}})};
  return out;
}

// ---- canonical paths ---------------------------------------------------------

CanonicalPaths bfs_paths(const RealMatrix& hhat) {
  const int n = static_cast<int>(hhat.rows());
  double thr = edge_threshold(hhat);
  std::vector<std::vector<int>> adj(static_cast<size_t>(n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (a != b && hhat(a, b) > thr) adj[static_cast<size_t>(a)].push_back(b);
  CanonicalPaths cp;
  cp.n = n;
  cp.paths.assign(static_cast<size_t>(n * n), {});
  for (int j = 0; j < n; ++j) {
    // Distances to j along edges a -> b.
    std::vector<int> dist(static_cast<size_t>(n), -1);
    dist[static_cast<size_t>(j)] = 0;
    std::deque<int> q{j};
    while (!q.empty()) {
      int b = q.front();
      q.pop_front();
      for (int a = 0; a < n; ++a)
        if (dist[static_cast<size_t>(a)] < 0 && a != b && hhat(a, b) > thr) {
          dist[static_cast<size_t>(a)] = dist[static_cast<size_t>(b)] + 1;
          q.push_back(a);
        }
    }
    for (int i = 0; i < n; ++i) {
      if (i == j) continue;
      if (dist[static_cast<size_t>(i)] < 0) throw InputError("bfs_paths: generator graph is disconnected");
      std::vector<int> p{i};
      int v = i;
      while (v != j) {
        for (int b : adj[static_cast<size_t>(v)])
          if (dist[static_cast<size_t>(b)] == dist[static_cast<size_t>(v)] - 1) {
            v = b;
            break;
          }
        p.push_back(v);
      }
      cp.paths[static_cast<size_t>(i * n + j)] = std::move(p);
    }
  }
  return cp;
}

double canonical_path_bound(const RealMatrix& hhat, const CanonicalPaths& paths,
                            const std::optional<RealVector>& weights) {
  require_generator(hhat, "canonical_path_bound");
  const int n = static_cast<int>(hhat.rows());
  if (!is_irreducible(hhat)) throw InputError("canonical_path_bound: generator graph is disconnected");
  if (paths.n != n || paths.paths.size() != static_cast<size_t>(n * n))
    throw InputError("canonical_path_bound: path table has the wrong size");
  RealVector mu = RealVector::Ones(n);
  if (weights) {
    if (weights->size() != n || !(weights->minCoeff() > 0.0))
      throw InputError("canonical_path_bound: weights must be positive, one per state");
    mu = *weights;
  }
  double thr = edge_threshold(hhat);
  RealMatrix load = RealMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const std::vector<int>& p = paths.path(i, j);
      if (p.size() < 2 || p.front() != i || p.back() != j)
        throw InputError("canonical_path_bound: path " + std::to_string(i) + "->" + std::to_string(j) +
                         " does not connect its endpoints");
      double len = static_cast<double>(p.size() - 1);
      for (size_t k = 0; k + 1 < p.size(); ++k) {
        int a = p[k], b = p[k + 1];
        if (a < 0 || a >= n || b < 0 || b >= n || a == b || !(hhat(a, b) > thr))
          throw InputError("canonical_path_bound: path " + std::to_string(i) + "->" + std::to_string(j) +
                           " uses a missing edge");
        load(a, b) += (weights ? mu[i] * mu[j] : 1.0) * len;
      }
    }
  double k_max = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (load(a, b) > 0.0) k_max = std::max(k_max, load(a, b) / ((weights ? mu[a] : 1.0) * hhat(a, b)));
  return std::sqrt(2.0 / k_max);
}

double hhat_singular_gap(const RealMatrix& hhat, const std::optional<RealVector>& weights) {
  require_generator(hhat, "hhat_singular_gap");
  RealVector d = weights ? *weights : RealVector(RealVector::Ones(hhat.rows()));
  return std::sqrt(2.0 * std::max(0.0, generator_gap(hhat, d)));
}

// ---- dephased registers ------------------------------------------------------

RealMatrix hypercube_adjacency(int n) {
  if (n < 1 || n > 12) throw InputError("hypercube_adjacency: need 1 <= n <= 12");
  const int d = 1 << n;
  RealMatrix a = RealMatrix::Zero(d, d);
  for (int v = 0; v < d; ++v)
    for (int i = 0; i < n; ++i) a(v, v ^ (1 << i)) = 1.0;
  return a;
}

RealMatrix cycle_adjacency(int n) {
  if (n < 3) throw InputError("cycle_adjacency: need n >= 3");
  RealMatrix a = RealMatrix::Zero(n, n);
  for (int v = 0; v < n; ++v) {
    a(v, (v + 1) % n) = 1.0;
    a((v + 1) % n, v) = 1.0;
  }
  return a;
}

Lindbladian dephasing(int n, double gamma) {
  if (n < 1) throw InputError("dephasing: need at least one qubit");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InputError("dephasing: gamma must be positive");
  const int d = 1 << n;
  std::vector<Jump> jumps;
  for (int i = 0; i < n; ++i) jumps.push_back({gamma, pauli_on(n, i, 'Z')});
  return build_gksl(Matrix::Zero(d, d), std::move(jumps));
}

DephasingWalk dephasing_walk(int n, double gamma, const RealMatrix& adj) {
  if (n < 1 || n > 10) throw InputError("dephasing_walk: need 1 <= n <= 10");
  const int d = 1 << n;
  if (adj.rows() != d || adj.cols() != d) throw InputError("dephasing_walk: adjacency must be 2^n x 2^n");
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      double v = adj(a, b);
      if (v != 0.0 && v != 1.0) throw InputError("dephasing_walk: adjacency entries must be 0 or 1");
      if (v != adj(b, a)) throw InputError("dephasing_walk: adjacency must be symmetric");
      if (a == b && v != 0.0) throw InputError("dephasing_walk: self-loops are not allowed");
    }
  RealVector deg = adj.rowwise().sum();
  if (deg.maxCoeff() != deg.minCoeff() || deg[0] < 1.0) throw InputError("dephasing_walk: graph is not regular");
  RealMatrix lap = -adj;
  lap.diagonal().array() += deg[0];
  RealMatrix gen = -lap;
  if (!is_irreducible(gen)) throw InputError("dephasing_walk: graph is not connected");
  DephasingWalk w;
  w.qubits = n;
  w.degree = static_cast<int>(deg[0]);
  w.gamma = gamma;
  w.laplacian_gap = ascending_eigenvalues(lap)[1];
  w.lambda_D = 2.0 * gamma;
  w.norm_LD = 2.0 * gamma * n;
  w.s_H = std::sqrt(2.0 * w.laplacian_gap);
  w.norm_LH_plus_bound = w.degree;
  double den = 28.0 * std::sqrt(w.laplacian_gap) + 5.0 * w.degree;
  w.nu_bound = 2.0 * w.laplacian_gap * gamma / (den * den + 144.0 * gamma * gamma * n);
  w.model = Model{"dephasing_walk", QuantumState::maximally_mixed(d), hamiltonian_only(adj.cast<cplx>()),
                  dephasing(n, gamma)};
  return w;
}

Tfim tfim(int n, double h, double gamma) {
  if (n < 2 || n > 10) throw InputError("tfim: need 2 <= n <= 10");
  if (!(h > 0.0) || !std::isfinite(h)) throw InputError("tfim: h must be positive (h = 0 is not primitive)");
  const int d = 1 << n;
  Matrix hm = Matrix::Zero(d, d);
  for (int i = 0; i + 1 < n; ++i) hm += pauli_on(n, i, 'Z') * pauli_on(n, i + 1, 'Z');
  for (int i = 0; i < n; ++i) hm += h * pauli_on(n, i, 'X');
  Tfim t;
  t.qubits = n;
  t.h = h;
  t.gamma = gamma;
  t.lambda_D = 2.0 * gamma;
  t.norm_LD = 2.0 * gamma * n;
  t.s_H = 2.0 * h;
  t.norm_LH_plus_bound = n - 1 + h * n;
  double den = 56.0 * h + 5.0 * std::numbers::sqrt2 * t.norm_LH_plus_bound;
  t.nu = 8.0 * gamma * h * h / (den * den + 288.0 * gamma * gamma * n);
  t.model = Model{"tfim", QuantumState::maximally_mixed(d), hamiltonian_only(hm), dephasing(n, gamma)};
  return t;
}

// ---- graph models ------------------------------------------------------------

std::vector<std::vector<int>> graph_components(const GraphSpec& g) {
  if (g.n < 2) throw InputError("graph: need at least two vertices");
  std::set<std::pair<int, int>> seen;
  std::vector<std::vector<int>> adj(static_cast<size_t>(g.n));
  for (size_t k = 0; k < g.edges.size(); ++k) {
    const GraphEdge& e = g.edges[k];
    const std::string tag = "graph: edge " + std::to_string(k);
    if (e.r < 0 || e.r >= g.n || e.s < 0 || e.s >= g.n) throw InputError(tag + " has a vertex out of range");
    if (e.r == e.s) throw InputError(tag + " is a self-loop");
    if (!(e.w > 0.0) || !std::isfinite(e.w)) throw InputError(tag + " needs a positive weight");
    if (!seen.insert({std::min(e.r, e.s), std::max(e.r, e.s)}).second) throw InputError(tag + " is a duplicate");
    adj[static_cast<size_t>(e.r)].push_back(e.s);
    adj[static_cast<size_t>(e.s)].push_back(e.r);
  }
  std::vector<int> label(static_cast<size_t>(g.n), -1);
  std::vector<std::vector<int>> comps;
  for (int v = 0; v < g.n; ++v) {
    if (adj[static_cast<size_t>(v)].empty()) throw InputError("graph: vertex " + std::to_string(v) + " is isolated");
    if (label[static_cast<size_t>(v)] >= 0) continue;
    std::vector<int> c;
    std::deque<int> q{v};
    label[static_cast<size_t>(v)] = static_cast<int>(comps.size());
    while (!q.empty()) {
      int a = q.front();
      q.pop_front();
      c.push_back(a);
      for (int b : adj[static_cast<size_t>(a)])
        if (label[static_cast<size_t>(b)] < 0) {
          label[static_cast<size_t>(b)] = static_cast<int>(comps.size());
          q.push_back(b);
        }
    }
    std::sort(c.begin(), c.end());
    comps.push_back(std::move(c));
  }
  return comps;
}

GraphModel graph_lindblad(const GraphSpec& g, const RealVector& mu) {
  GraphModel gm;
  gm.components = graph_components(g);
  const int n = g.n;
  if (mu.size() != n) throw InputError("graph_lindblad: sigma must have one eigenvalue per vertex");
  if (!(mu.minCoeff() > 0.0)) throw InputError("graph_lindblad: sigma must be full rank");
  gm.graph = g;
  gm.mu = mu;
  gm.weights = RealMatrix::Zero(n, n);
  for (const GraphEdge& e : g.edges) gm.weights(e.r, e.s) = gm.weights(e.s, e.r) = e.w;
  QuantumState sigma = QuantumState::from_matrix(mu.cast<cplx>().asDiagonal());

  // Each undirected edge contributes L_rs + L_sr: jumps e_rs with weight 4 w e^{beta_rs/2},
  // written as canonical pairs sqrt(2w) e_rs with omega = -beta_rs.
  std::vector<CanonicalPair> pairs;
  for (const GraphEdge& e : g.edges) {
    double b = std::log(mu[e.r] / mu[e.s]);
    double amp = std::sqrt(2.0 * e.w);
    pairs.push_back({-b, amp * matrix_unit(n, e.r, e.s)});
    pairs.push_back({b, amp * matrix_unit(n, e.s, e.r)});
  }
  Lindbladian ld = build_gns_canonical(sigma, std::move(pairs));

  // e^{beta_rs / 2} = sqrt(mu_r / mu_s)
  auto eb = [&](int r, int s) { return std::sqrt(mu[r] / mu[s]); };
  gm.l_cl = RealMatrix::Zero(n, n);
  RealVector out_rate = RealVector::Zero(n);  // sum_{r ~ j} w(r,j) e^{beta_rj/2}
  for (int i = 0; i < n; ++i)
    for (int r = 0; r < n; ++r)
      if (gm.weights(i, r) > 0.0) {
        gm.l_cl(i, r) = 4.0 * gm.weights(i, r) * eb(r, i);
        out_rate[i] += gm.weights(r, i) * eb(r, i);
      }
  for (int i = 0; i < n; ++i) gm.l_cl(i, i) = -gm.l_cl.row(i).sum();
  gm.kappa = RealMatrix::Zero(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      if (j != k) gm.kappa(j, k) = -2.0 * (out_rate[j] + out_rate[k]);

  RealVector cl = classical_spectrum(gm);
  const size_t m = gm.components.size();
  double min_k = std::numeric_limits<double>::infinity(), max_k = 0.0;
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      if (j != k) {
        min_k = std::min(min_k, -gm.kappa(j, k));
        max_k = std::max(max_k, -gm.kappa(j, k));
      }
  gm.lambda_D = min_k;
  if (static_cast<Eigen::Index>(m) < cl.size()) gm.lambda_D = std::min(gm.lambda_D, cl[static_cast<Eigen::Index>(m)]);
  gm.norm_LD = std::max(max_k, cl[cl.size() - 1]);
  gm.model = Model{"graph", sigma, hamiltonian_only(Matrix::Zero(n, n)), std::move(ld)};
  return gm;
}

RealVector classical_spectrum(const GraphModel& gm) {
  // mu_i L_cl(i,j) = mu_j L_cl(j,i): symmetrize with D = diag(mu).
  return ascending_eigenvalues(-symmetrize(gm.l_cl, gm.mu));
}

GraphHamiltonianCert graph_hamiltonian_cert(const GraphModel& gm, const Matrix& h) {
  const int n = gm.graph.n;
  if (h.rows() != n || h.cols() != n) throw InputError("graph_hamiltonian_cert: dimension mismatch");
  if (!is_hermitian(h, 1e-10)) throw InputError("graph_hamiltonian_cert: H is not Hermitian");
  const Matrix& s = gm.model.sigma.matrix();
  if (commutator(h, s).norm() > 1e-10 * std::max(1.0, spectral_norm(h)))
    throw InputError("graph_hamiltonian_cert: [H, sigma] != 0");
  GraphHamiltonianCert c;
  RealVector sorted = gm.mu;
  std::sort(sorted.data(), sorted.data() + n);
  c.simple_spectrum = true;
  for (int i = 1; i < n; ++i)
    if (sorted[i] - sorted[i - 1] <= 1e-12 * sorted[n - 1]) c.simple_spectrum = false;

  const int m = static_cast<int>(gm.components.size());
  std::vector<int> comp_of(static_cast<size_t>(n));
  for (int i = 0; i < m; ++i)
    for (int r : gm.components[static_cast<size_t>(i)]) comp_of[static_cast<size_t>(r)] = i;
  c.mu_hat = RealVector::Zero(m);
  for (int r = 0; r < n; ++r) c.mu_hat[comp_of[static_cast<size_t>(r)]] += gm.mu[r];
  c.hhat = RealMatrix::Zero(m, m);
  for (int r = 0; r < n; ++r)
    for (int t = 0; t < n; ++t) {
      int i = comp_of[static_cast<size_t>(r)], j = comp_of[static_cast<size_t>(t)];
      if (i != j) c.hhat(i, j) += gm.mu[r] * std::norm(h(r, t));
    }
  for (int i = 0; i < m; ++i) {
    c.hhat.row(i) /= c.mu_hat[i];
    c.hhat(i, i) = -c.hhat.row(i).sum();
  }
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      c.reversibility_defect =
          std::max(c.reversibility_defect, std::abs(c.mu_hat[i] * c.hhat(i, j) - c.mu_hat[j] * c.hhat(j, i)));
  if (m == 1) {
    c.primitive = true;
    return c;
  }
  double thr = 1e-24 * std::max(1.0, std::pow(spectral_norm(h), 2));
  c.primitive = !c.simple_spectrum && is_irreducible(c.hhat, thr);
  c.s_H = std::sqrt(2.0 * std::max(0.0, generator_gap(c.hhat, c.mu_hat)));
  if (c.primitive) c.path_bound = canonical_path_bound(c.hhat, bfs_paths(c.hhat), c.mu_hat);
  return c;
}

BirthDeath birth_death_spectrum(const std::vector<int>& sizes, double beta) {
  if (sizes.empty()) throw InputError("birth_death: need at least one component");
  if (!std::isfinite(beta)) throw InputError("birth_death: beta must be finite");
  GraphSpec g;
  int offset = 0;
  for (int sz : sizes) {
    if (sz < 2) throw InputError("birth_death: every chain needs at least two vertices");
    for (int r = offset; r + 1 < offset + sz; ++r) g.edges.push_back({r, r + 1, 1.0});
    offset += sz;
  }
  g.n = offset;
  RealVector mu(g.n);
  for (int r = 0; r < g.n; ++r) mu[r] = std::exp(-beta * r);
  mu /= mu.sum();
  BirthDeath bd;
  bd.model = graph_lindblad(g, mu);
  const double ch = std::cosh(0.5 * beta);
  const double pi = std::numbers::pi;
  int n_max = 0;
  offset = 0;
  for (int sz : sizes) {
    n_max = std::max(n_max, sz);
    RealVector cf(sz);
    cf[0] = 0.0;
    for (int k = 2; k <= sz; ++k) cf[k - 1] = -8.0 * ch + 8.0 * std::cos(pi * (k - 1) / sz);
    std::sort(cf.data(), cf.data() + sz);
    bd.closed_form.push_back(cf);
    RealMatrix block = bd.model.l_cl.block(offset, offset, sz, sz);
    RealVector ev = ascending_eigenvalues(symmetrize(block, mu.segment(offset, sz)));
    bd.numeric.push_back(ev);
    offset += sz;
  }
  std::set<double> vals;
  for (int j = 0; j < g.n; ++j)
    for (int k = 0; k < g.n; ++k)
      if (j != k) {
        double v = -bd.model.kappa(j, k);
        bool dup = false;
        for (double u : vals) dup = dup || std::abs(u - v) <= 1e-12 * std::max(1.0, v);
        if (!dup) vals.insert(v);
      }
  bd.minus_kappa.assign(vals.begin(), vals.end());
  bd.lambda_D = bd.model.lambda_D;
  bd.norm_LD = bd.model.norm_LD;
  bd.lambda_D_formula = 4.0 * std::min(2.0 * ch - 2.0 * std::cos(pi / n_max), ch);
  bd.norm_LD_formula = 8.0 * ch - 8.0 * std::cos(pi * (n_max - 1) / n_max);
  return bd;
}

// ---- averaged Gibbs sampler --------------------------------------------------

Model haar_avg_gibbs(const RealVector& spectrum, double beta, const FilterFunction& q) {
  const int n = static_cast<int>(spectrum.size());
  if (n < 2) throw InputError("haar_avg_gibbs: need at least two levels");
  if (!std::isfinite(beta)) throw InputError("haar_avg_gibbs: beta must be finite");
  if (!q) throw InputError("haar_avg_gibbs: missing filter function");
  std::vector<Jump> jumps;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double nu = spectrum[i] - spectrum[j];
      double qp = q(nu), qm = q(-nu);
      if (!std::isfinite(qp) || std::abs(qp - qm) > 1e-12 * std::max(1.0, std::abs(qp)))
        throw InputError("haar_avg_gibbs: filter q must be finite and even");
      double f = qp * std::exp(-0.25 * beta * nu);
      double w = f * f / n;
      if (w > 0.0) jumps.push_back({w, matrix_unit(n, i, j)});
    }
  if (jumps.empty()) throw InputError("haar_avg_gibbs: filter vanishes on every Bohr difference");
  Matrix hsys = spectrum.cast<cplx>().asDiagonal();
  return Model{"haar_gibbs", QuantumState::gibbs(hsys, beta), hamiltonian_only(Matrix::Zero(n, n)),
               build_gksl(Matrix::Zero(n, n), std::move(jumps))};
}

// ---- lift --------------------------------------------------------------------

LiftModel lift_model(const GraphModel& base, const Matrix& a) {
  if (base.components.size() != 1) throw InputError("lift_model: base graph must be connected");
  if (a.rows() != 2 || a.cols() != 2 || !is_hermitian(a, 1e-10))
    throw InputError("lift_model: A must be a Hermitian 2x2 matrix");
  LiftModel lm;
  lm.a = (a + a.adjoint()) * 0.5;
  Eigen::SelfAdjointEigenSolver<Matrix> es(lm.a);
  lm.a_eigs = es.eigenvalues();
  lm.a_basis = es.eigenvectors();
  double scale = std::max(1.0, lm.a_eigs.cwiseAbs().maxCoeff());
  if (!(lm.a_eigs[1] - lm.a_eigs[0] > 1e-9 * scale)) throw InputError("lift_model: A needs distinct eigenvalues");
  if (!(lm.a_eigs.cwiseAbs().minCoeff() > 1e-9 * scale)) throw InputError("lift_model: A needs nonzero eigenvalues");
  // With a = -b the jumps generate too small an algebra and the kernel is larger than 1 (x) diag.
  if (!(std::abs(std::abs(lm.a_eigs[1]) - std::abs(lm.a_eigs[0])) > 1e-9 * scale))
    throw InputError("lift_model: A needs eigenvalues of distinct modulus");
  const int n = base.graph.n;
  const RealVector& mu = base.mu;
  RealVector mut(2 * n);
  for (int r = 0; r < n; ++r) mut[2 * r] = mut[2 * r + 1] = 0.5 * mu[r];
  QuantumState sigma = QuantumState::from_matrix(mut.cast<cplx>().asDiagonal());
  std::vector<CanonicalPair> pairs;
  for (const GraphEdge& e : base.graph.edges) {
    double b = std::log(mu[e.r] / mu[e.s]);
    double amp = std::sqrt(2.0 * e.w);
    pairs.push_back({-b, amp * kron(matrix_unit(n, e.r, e.s), lm.a)});
    pairs.push_back({b, amp * kron(matrix_unit(n, e.s, e.r), lm.a)});
  }
  lm.model = Model{"lift", sigma, hamiltonian_only(Matrix::Zero(2 * n, 2 * n)),
                   build_gns_canonical(sigma, std::move(pairs))};
  return lm;
}

bool lift_primitive(const LiftModel& lm, const Matrix& h) {
  const Eigen::Index d = lm.model.sigma.dim();
  if (h.rows() != d || h.cols() != d || !is_hermitian(h, 1e-10))
    throw InputError("lift_primitive: H must be Hermitian on the lifted space");
  if (commutator(h, lm.model.sigma.matrix()).norm() > 1e-10 * std::max(1.0, spectral_norm(h)))
    throw InputError("lift_primitive: [H, sigma] != 0");
  const Eigen::Index n = d / 2;
  Matrix v = kron(Matrix::Identity(n, n), lm.a_basis);
  Matrix hr = v.adjoint() * h * v;
  double thr = 1e-12 * std::max(1.0, spectral_norm(h));
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index s = 0; s < n; ++s)
      if (std::abs(hr(2 * r, 2 * s + 1)) > thr) return true;
  return false;
}

// ---- suite -------------------------------------------------------------------

Model qubit_model() {
  return Model{"qubit", QuantumState::maximally_mixed(2), hamiltonian_only(pauli('X')),
               build_gksl(Matrix::Zero(2, 2), {{2.0, pauli('Z')}})};
}

Model walk_model() {
  Model m = dephasing_walk(2, 1.0, cycle_adjacency(4)).model;
  m.name = "walk";
  return m;
}

Model tfim_model() { return tfim(2, 1.0, 1.0).model; }

Model graph_model() {
  GraphSpec g{4, {{0, 2, 1.0}, {1, 3, 1.0}}};
  RealVector mu(4);
  mu << 0.35, 0.35, 0.15, 0.15;
  GraphModel gm = graph_lindblad(g, mu);
  Matrix h = matrix_unit(4, 0, 1) + matrix_unit(4, 1, 0) + matrix_unit(4, 2, 3) + matrix_unit(4, 3, 2);
  gm.model.coherent = hamiltonian_only(h);
  return gm.model;
}

Model haar_model(int n) {
  if (n != 2 && n != 3) throw InputError("haar_model: suite provides N = 2 and N = 3");
  RealVector spec(n);
  for (int i = 0; i < n; ++i) spec[i] = i;
  Model m = haar_avg_gibbs(spec, 0.0, [](double v) {
    double c = std::cos(0.5 * std::numbers::pi * v);
    return std::abs(c) < 1e-12 ? 0.0 : c * c;
  });
  Matrix h = Matrix::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) h(i, i + 1) = h(i + 1, i) = 1.0;
  m.coherent = hamiltonian_only(h);
  m.name = "haar_gibbs_" + std::to_string(n);
  return m;
}

std::vector<Model> suite_models() {
  return {qubit_model(), walk_model(), tfim_model(), graph_model(), haar_model(2), haar_model(3)};
}

}  // namespace hypoco
