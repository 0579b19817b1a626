#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hypoco/lindblad.hpp"

namespace hypoco {

// A split generator L = L^H + L^D with its invariant state.
struct Model {
  std::string name;
  QuantumState sigma;
  Lindbladian coherent;     // Hamiltonian part only
  Lindbladian dissipative;  // jumps only
  Lindbladian full() const { return combine(coherent, dissipative); }
};

Lindbladian hamiltonian_only(const Matrix& h);

// ---- single Hermitian jump, sigma = 1/N --------------------------------------

struct SingleJumpModel {
  Model model;
  RealVector kappa;      // eigenvalues of A, ascending
  Matrix eigenbasis;     // eigenvectors of A
  double lambda_D = 0.0;  // min |kappa_i - kappa_j|^2
  double norm_LD = 0.0;   // max |kappa_i - kappa_j|^2
  RealMatrix hhat;        // |H_ij|^2 off the diagonal, rows sum to zero
  double hhat_gap = 0.0;  // spectral gap of -hhat
  double s_H = 0.0;       // sqrt(2 hhat_gap)
  bool primitive = false;
  double h_spread = 0.0;        // lambda_max(H) - lambda_min(H)
  std::optional<double> nu;     // closed-form rate when primitive
};

SingleJumpModel single_jump_model(const Matrix& a, const Matrix& h);

// ---- canonical paths ---------------------------------------------------------

// Vertex sequences for every ordered pair (i, j), i != j, stored at i*n + j.
struct CanonicalPaths {
  int n = 0;
  std::vector<std::vector<int>> paths;
  const std::vector<int>& path(int i, int j) const { return paths[static_cast<size_t>(i * n + j)]; }
  int length(int i, int j) const { return static_cast<int>(path(i, j).size()) - 1; }
};

// Shortest paths along the support of `hhat`; among shortest paths the
// lexicographically smallest vertex sequence is chosen.
CanonicalPaths bfs_paths(const RealMatrix& hhat);
// sqrt(2/K) with K the maximal edge congestion; `weights` gives the reversible
// measure for the weighted variant.
double canonical_path_bound(const RealMatrix& hhat, const CanonicalPaths& paths,
                            const std::optional<RealVector>& weights = std::nullopt);
// Exact sqrt(2 gap(-hhat)) for a generator reversible w.r.t. `weights` (uniform if absent).
double hhat_singular_gap(const RealMatrix& hhat, const std::optional<RealVector>& weights = std::nullopt);
bool is_irreducible(const RealMatrix& generator, double tol = 0.0);

// ---- dephased qubit registers ------------------------------------------------

RealMatrix hypercube_adjacency(int n);
RealMatrix cycle_adjacency(int n);
// gamma sum_i (Z_i X Z_i - X) on n qubits
Lindbladian dephasing(int n, double gamma);

struct DephasingWalk {
  Model model;
  int qubits = 0;
  int degree = 0;
  double gamma = 0.0;
  double laplacian_gap = 0.0;
  double lambda_D = 0.0;
  double norm_LD = 0.0;
  double s_H = 0.0;
  double norm_LH_plus_bound = 0.0;
  double nu_bound = 0.0;  // 2 Delta gamma / ((28 sqrt(Delta) + 5d)^2 + 144 gamma^2 n)
};

DephasingWalk dephasing_walk(int n, double gamma, const RealMatrix& adjacency);

struct Tfim {
  Model model;
  int qubits = 0;
  double h = 0.0;
  double gamma = 0.0;
  double lambda_D = 0.0;
  double norm_LD = 0.0;
  double s_H = 0.0;
  double norm_LH_plus_bound = 0.0;
  double nu = 0.0;  // 8 gamma h^2 / ((56h + 5 sqrt2 (n-1+hn))^2 + 288 gamma^2 n)
};

Tfim tfim(int n, double h, double gamma);

// ---- graph Lindbladians with diagonal sigma ----------------------------------

struct GraphEdge {
  int r = 0;
  int s = 0;
  double w = 1.0;
};

struct GraphSpec {
  int n = 0;
  std::vector<GraphEdge> edges;
};

// Validates the graph and returns its connected components, each sorted, in
// order of their smallest vertex.
std::vector<std::vector<int>> graph_components(const GraphSpec& g);

struct GraphModel {
  Model model;
  GraphSpec graph;
  RealVector mu;                             // diagonal of sigma
  std::vector<std::vector<int>> components;
  RealMatrix weights;                        // symmetric w(r,s), zero off the edge set
  RealMatrix l_cl;                           // classical generator on the diagonal
  RealMatrix kappa;                          // L^D(e_jk) = kappa_jk e_jk, j != k
  double lambda_D = 0.0;
  double norm_LD = 0.0;
};

GraphModel graph_lindblad(const GraphSpec& g, const RealVector& mu);
// Eigenvalues of -L_cl in ascending order (real, via symmetrization by mu).
RealVector classical_spectrum(const GraphModel& gm);

struct GraphHamiltonianCert {
  bool simple_spectrum = false;
  bool primitive = false;
  RealVector mu_hat;
  RealMatrix hhat;
  double reversibility_defect = 0.0;  // max |mu_i H_ij - mu_j H_ji|
  std::optional<double> s_H;          // absent when L^D alone is primitive
  std::optional<double> path_bound;   // weighted canonical-path lower bound on s_H
};

GraphHamiltonianCert graph_hamiltonian_cert(const GraphModel& gm, const Matrix& h);

struct BirthDeath {
  GraphModel model;
  std::vector<RealVector> closed_form;  // per component, ascending
  std::vector<RealVector> numeric;      // per component eigenvalues of L_cl, ascending
  std::vector<double> minus_kappa;      // distinct values of -kappa_jk
  double lambda_D = 0.0;                // from the enumerated spectrum
  double norm_LD = 0.0;
  double lambda_D_formula = 0.0;        // 4 min{2cosh(b/2) - 2cos(pi/n_max), cosh(b/2)}
  double norm_LD_formula = 0.0;         // 8cosh(b/2) - 8cos(pi(n_max-1)/n_max)
};

BirthDeath birth_death_spectrum(const std::vector<int>& sizes, double beta);

// ---- averaged Gibbs sampler --------------------------------------------------

using FilterFunction = std::function<double(double)>;

// Average over a unitary 1-design of the Lindbladian with jump
// sum_ij f(l_i - l_j) A_ij |i><j|, f(v) = q(v) e^{-beta v / 4}.
Model haar_avg_gibbs(const RealVector& spectrum, double beta, const FilterFunction& q);

// ---- lifted graph model on H (x) C^2 -----------------------------------------

struct LiftModel {
  Model model;
  Matrix a;
  RealVector a_eigs;   // ascending
  Matrix a_basis;      // eigenvectors of A
};

LiftModel lift_model(const GraphModel& base, const Matrix& a);
// Lifted L^H + L^D is primitive iff some (r0, s1) entry of H in the 1 (x) V basis is nonzero.
bool lift_primitive(const LiftModel& lm, const Matrix& h);

// ---- the reference suite -----------------------------------------------------

Model qubit_model();
Model walk_model();
Model tfim_model();
Model graph_model();
Model haar_model(int n);
std::vector<Model> suite_models();

}  // namespace hypoco
