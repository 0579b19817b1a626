#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <numbers>

#include "helpers.hpp"
#include "hypoco/certificate.hpp"
#include "hypoco/models.hpp"
#include "hypoco/spectral.hpp"

namespace hypoco {
namespace {

const double kPi = std::numbers::pi;

// ---- single jump -------------------------------------------------------------

TEST(SingleJump, QubitMatchesCertificateConstants) {
  SingleJumpModel sj = single_jump_model(pauli('Z'), pauli('X'));
  EXPECT_NEAR(sj.lambda_D, 4.0, 1e-12);
  EXPECT_NEAR(sj.norm_LD, 4.0, 1e-12);
  RealMatrix ref(2, 2);
  ref << -1, 1, 1, -1;
  EXPECT_LT((sj.hhat - ref).norm(), 1e-12);
  EXPECT_NEAR(sj.hhat_gap, 2.0, 1e-12);
  EXPECT_NEAR(sj.s_H, 2.0, 1e-12);
  EXPECT_TRUE(sj.primitive);
  StructuralConstants sc = structural_constants(sj.model.coherent, sj.model.dissipative, sj.model.sigma);
  EXPECT_NEAR(sc.s_H, sj.s_H, 1e-10);
  EXPECT_NEAR(sc.lambda_D, sj.lambda_D, 1e-10);
  EXPECT_NEAR(sc.norm_LD, sj.norm_LD, 1e-10);
}

TEST(SingleJump, ThreeLevelIrreducible) {
  Matrix a = Matrix::Zero(3, 3);
  a.diagonal() << 0.0, 1.0, 3.0;
  Matrix h = Matrix::Ones(3, 3) - Matrix::Identity(3, 3);
  SingleJumpModel sj = single_jump_model(a, h);
  EXPECT_TRUE(sj.primitive);
  EXPECT_NEAR(sj.lambda_D, 1.0, 1e-12);
  EXPECT_NEAR(sj.norm_LD, 9.0, 1e-12);
  SpaceSplit sp = kernel_projection(sj.model.dissipative, sj.model.sigma);
  EXPECT_EQ(sp.dim0(), 2);
  EXPECT_NEAR(sp.energies_plus(0), sj.lambda_D, 1e-10);
  EXPECT_NEAR(sp.norm_ld, sj.norm_LD, 1e-10);
  StructuralConstants sc = structural_constants(sj.model.coherent, sj.model.dissipative, sj.model.sigma);
  EXPECT_NEAR(sc.s_H, sj.s_H, 1e-10);
  ASSERT_TRUE(sj.nu.has_value());
  EXPECT_GT(*sj.nu, 0.0);
  RateCertificate c = certify(sj.model.coherent, sj.model.dissipative, sj.model.sigma);
  EXPECT_LE(*sj.nu, c.nu * (1.0 + 1e-12));
}

TEST(SingleJump, RandomModelsAgreeWithBruteForce) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 3 + trial % 2;
    Matrix u = random_unitary(n, rng);
    Matrix a = u * RealVector::LinSpaced(n, -1.0, 1.5).cast<cplx>().asDiagonal() * u.adjoint();
    Matrix h = random_hermitian(n, rng);
    SingleJumpModel sj = single_jump_model(a, h);
    ASSERT_TRUE(sj.primitive);
    StructuralConstants sc = structural_constants(sj.model.coherent, sj.model.dissipative, sj.model.sigma);
    EXPECT_NEAR(sc.s_H, sj.s_H, 1e-9 * sj.s_H);
    EXPECT_NEAR(sc.lambda_D, sj.lambda_D, 1e-9 * sj.lambda_D);
    EXPECT_NEAR(sc.norm_LD, sj.norm_LD, 1e-9 * sj.norm_LD);
    EXPECT_LE(sc.norm_LH_plus, sj.h_spread + 1e-9);
    // Diagonal operators in A's eigenbasis are fixed by L^D.
    Vector diag = RealVector::LinSpaced(n, 0.3, 2.0).cast<cplx>();
    Matrix d = sj.eigenbasis * diag.asDiagonal() * sj.eigenbasis.adjoint();
    EXPECT_LT(sj.model.dissipative.apply(d).norm(), 1e-10);
  }
}

TEST(SingleJump, ReducibleHamiltonianIsNotPrimitive) {
  Matrix a = Matrix::Zero(4, 4);
  a.diagonal() << 0.0, 1.0, 2.5, 4.0;
  Matrix h = Matrix::Zero(4, 4);
  h(0, 1) = h(1, 0) = 1.0;
  h(2, 3) = h(3, 2) = 0.5;
  SingleJumpModel sj = single_jump_model(a, h);
  EXPECT_FALSE(sj.primitive);
  EXPECT_FALSE(sj.nu.has_value());
  StructureReport r = structure_report(sj.model.full(), sj.model.sigma);
  EXPECT_FALSE(r.primitive);
}

TEST(SingleJump, RejectsDegenerateJump) {
  EXPECT_THROW(single_jump_model(Matrix::Identity(2, 2), pauli('X')), InputError);
}

// ---- canonical paths ---------------------------------------------------------

// Independent congestion: loads on oriented edges.
double reference_congestion(const RealMatrix& g, const CanonicalPaths& p, const RealVector* w) {
  const int n = static_cast<int>(g.rows());
  RealMatrix load = RealMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const auto& path = p.path(i, j);
      double c = static_cast<double>(path.size() - 1) * (w ? (*w)(i) * (*w)(j) : 1.0);
      for (size_t k = 0; k + 1 < path.size(); ++k) load(path[k], path[k + 1]) += c;
    }
  double k = 0.0;
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v)
      if (load(u, v) > 0.0) k = std::max(k, load(u, v) / ((w ? (*w)(u) : 1.0) * g(u, v)));
  return k;
}

RealMatrix random_generator(int n, std::mt19937_64& rng, const RealVector& mu) {
  // Random connected graph: a spanning path plus random extra edges, reversible w.r.t. mu.
  std::uniform_real_distribution<double> u(0.2, 2.0);
  std::bernoulli_distribution extra(0.35);
  RealMatrix c = RealMatrix::Zero(n, n);
  std::vector<int> perm(static_cast<size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  for (int i = 0; i + 1 < n; ++i) c(perm[i], perm[i + 1]) = c(perm[i + 1], perm[i]) = u(rng);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (c(i, j) == 0.0 && extra(rng)) c(i, j) = c(j, i) = u(rng);
  RealMatrix g(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) g(i, j) = c(i, j) / mu(i);
    g(i, i) = 0.0;
    g(i, i) = -g.row(i).sum();
  }
  return g;
}

TEST(CanonicalPath, TwoStateChain) {
  RealMatrix g(2, 2);
  g << -1, 1, 1, -1;
  CanonicalPaths p = bfs_paths(g);
  EXPECT_EQ(p.length(0, 1), 1);
  EXPECT_NEAR(reference_congestion(g, p, nullptr), 1.0, 1e-15);
  // Oriented loads: each direction carries one path of length 1, so K = 1.
  EXPECT_NEAR(canonical_path_bound(g, p), std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(hhat_singular_gap(g), 2.0, 1e-12);
  EXPECT_LE(canonical_path_bound(g, p), hhat_singular_gap(g) + 1e-9);
}

TEST(CanonicalPath, StarGraph) {
  RealMatrix g = RealMatrix::Zero(4, 4);
  for (int leaf = 1; leaf < 4; ++leaf) g(0, leaf) = g(leaf, 0) = 1.0;
  for (int i = 0; i < 4; ++i) g(i, i) = -g.row(i).sum();
  CanonicalPaths p = bfs_paths(g);
  EXPECT_EQ(p.length(1, 2), 2);
  EXPECT_EQ(p.path(1, 2), (std::vector<int>{1, 0, 2}));
  double bound = canonical_path_bound(g, p);
  EXPECT_NEAR(bound, std::sqrt(2.0 / reference_congestion(g, p, nullptr)), 1e-12);
  // Star Laplacian spectrum {0, 1, 1, 4}: gap 1.
  EXPECT_NEAR(hhat_singular_gap(g), std::sqrt(2.0), 1e-12);
  EXPECT_LE(bound, hhat_singular_gap(g) + 1e-9);
}

TEST(CanonicalPath, RandomGraphsNeverExceedExact) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 3 + trial % 6;
    RealVector uniform = RealVector::Constant(n, 1.0 / n);
    RealMatrix g = random_generator(n, rng, uniform);
    CanonicalPaths p = bfs_paths(g);
    // Paths are shortest (Floyd-Warshall) and follow edges.
    RealMatrix dist = RealMatrix::Constant(n, n, 1e9);
    for (int i = 0; i < n; ++i) {
      dist(i, i) = 0.0;
      for (int j = 0; j < n; ++j)
        if (i != j && g(i, j) > 0.0) dist(i, j) = 1.0;
    }
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) dist(i, j) = std::min(dist(i, j), dist(i, k) + dist(k, j));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        const auto& path = p.path(i, j);
        EXPECT_EQ(path.front(), i);
        EXPECT_EQ(path.back(), j);
        EXPECT_EQ(p.length(i, j), static_cast<int>(dist(i, j)));
        for (size_t k = 0; k + 1 < path.size(); ++k) EXPECT_GT(g(path[k], path[k + 1]), 0.0);
      }
    double bound = canonical_path_bound(g, p);
    EXPECT_NEAR(bound, std::sqrt(2.0 / reference_congestion(g, p, nullptr)), 1e-12);
    EXPECT_LE(bound, hhat_singular_gap(g) + 1e-9);

    RealVector mu = test::random_probabilities(n, rng);
    RealMatrix gw = random_generator(n, rng, mu);
    CanonicalPaths pw = bfs_paths(gw);
    double bw = canonical_path_bound(gw, pw, mu);
    EXPECT_NEAR(bw, std::sqrt(2.0 / reference_congestion(gw, pw, &mu)), 1e-12);
    EXPECT_LE(bw, hhat_singular_gap(gw, mu) + 1e-9);
  }
}

TEST(CanonicalPath, RejectsBadInput) {
  RealMatrix g = RealMatrix::Zero(3, 3);
  g(0, 1) = g(1, 0) = 1.0;
  g(0, 0) = g(1, 1) = -1.0;
  EXPECT_THROW(bfs_paths(g), InputError);
  RealMatrix chain(3, 3);
  chain << -1, 1, 0, 1, -2, 1, 0, 1, -1;
  CanonicalPaths p = bfs_paths(chain);
  p.paths[static_cast<size_t>(0 * 3 + 2)] = {0, 2};  // not an edge
  EXPECT_THROW(canonical_path_bound(chain, p), InputError);
}

// ---- dephasing walk and TFIM -------------------------------------------------

TEST(DephasingWalkTest, SquareGraph) {
  DephasingWalk w = dephasing_walk(2, 1.0, cycle_adjacency(4));
  EXPECT_NEAR(w.laplacian_gap, 2.0, 1e-12);
  EXPECT_EQ(w.degree, 2);
  EXPECT_NEAR(w.s_H, 2.0, 1e-12);
  EXPECT_NEAR(w.nu_bound, 4.0 / (std::pow(28.0 * std::sqrt(2.0) + 10.0, 2) + 288.0), 1e-15);
  StructuralConstants sc = structural_constants(w.model.coherent, w.model.dissipative, w.model.sigma);
  EXPECT_NEAR(sc.lambda_D, 2.0, 1e-9);
  EXPECT_NEAR(sc.norm_LD, 4.0, 1e-9);
  EXPECT_NEAR(sc.s_H, w.s_H, 1e-9);
  // The 4-cycle is bipartite: H has spectrum {-2, 0, 0, 2} and ||L^H Pi_+|| reaches the spread 2d.
  EXPECT_NEAR(sc.norm_LH_plus, 2.0 * w.degree, 1e-9);
  // Same graph in hypercube labelling, H = X(x)1 + 1(x)X.
  DephasingWalk hw = dephasing_walk(2, 1.0, hypercube_adjacency(2));
  EXPECT_NEAR(structural_constants(hw.model.coherent, hw.model.dissipative, hw.model.sigma).norm_LH_plus, 4.0, 1e-9);
  Matrix p = pauli_string("YZ") + pauli_string("ZY");
  Matrix img = hw.model.coherent.apply(p);
  EXPECT_NEAR(img.norm() / p.norm(), 2.0 * w.degree, 1e-12);
  // p lies in h_+: each term anticommutes with one Z, so L^D p = -2 gamma p.
  EXPECT_LT((hw.model.dissipative.apply(p) + 2.0 * p).norm(), 1e-12);
}

TEST(DephasingWalkTest, HypercubeBruteForce) {
  for (int n = 1; n <= 3; ++n)
    for (double gamma : {0.5, 1.0}) {
      DephasingWalk w = dephasing_walk(n, gamma, hypercube_adjacency(n));
      EXPECT_NEAR(w.lambda_D, 2.0 * gamma, 1e-12);
      EXPECT_NEAR(w.norm_LD, 2.0 * gamma * n, 1e-12);
      SpaceSplit sp = kernel_projection(w.model.dissipative, w.model.sigma);
      EXPECT_EQ(sp.dim0(), (1 << n) - 1);
      EXPECT_NEAR(sp.energies_plus(0), 2.0 * gamma, 1e-9);
      EXPECT_NEAR(sp.norm_ld, 2.0 * gamma * n, 1e-9);
      AssumptionCheck a = check_assumption(w.model.coherent, sp);
      EXPECT_TRUE(a.ok);
      StructuralConstants sc = structural_constants(w.model.coherent, w.model.dissipative, w.model.sigma);
      EXPECT_NEAR(sc.s_H, std::sqrt(2.0 * w.laplacian_gap), 1e-9);
    }
}

TEST(DephasingWalkTest, RejectsIrregularGraph) {
  RealMatrix adj = RealMatrix::Zero(4, 4);
  adj(0, 1) = adj(1, 0) = adj(1, 2) = adj(2, 1) = adj(2, 3) = adj(3, 2) = 1.0;
  EXPECT_THROW(dephasing_walk(2, 1.0, adj), InputError);
}

TEST(TfimTest, ConstantsAndPrimitivity) {
  for (int n : {2, 3})
    for (double h : {0.5, 1.0, 2.0}) {
      Tfim t = tfim(n, h, 1.0);
      EXPECT_NEAR(t.s_H, 2.0 * h, 1e-15);
      StructuralConstants sc = structural_constants(t.model.coherent, t.model.dissipative, t.model.sigma);
      EXPECT_NEAR(sc.s_H, 2.0 * h, 1e-9);
      EXPECT_NEAR(sc.lambda_D, 2.0, 1e-9);
      EXPECT_NEAR(sc.norm_LD, 2.0 * n, 1e-9);
      Eigen::SelfAdjointEigenSolver<Matrix> es(t.model.coherent.hamiltonian());
      double spread = es.eigenvalues().maxCoeff() - es.eigenvalues().minCoeff();
      EXPECT_LE(sc.norm_LH_plus, spread + 1e-9);
      EXPECT_LE(spread, 2.0 * (n - 1 + h * n) + 1e-9);
      StructureReport r = structure_report(t.model.full(), t.model.sigma);
      EXPECT_TRUE(r.primitive);
      EXPECT_TRUE(structure_report(t.model.dissipative, t.model.sigma).kms_db);
    }
  EXPECT_THROW(tfim(2, 0.0, 1.0), InputError);
}

// ---- graph Lindbladians ------------------------------------------------------

GraphSpec two_edges() { return GraphSpec{4, {{0, 2, 1.0}, {1, 3, 1.0}}}; }

void check_graph_against_brute_force(const GraphModel& gm) {
  const int n = gm.graph.n;
  const Lindbladian& ld = gm.model.dissipative;
  for (int r = 0; r < n; ++r) {
    Matrix img = ld.apply(matrix_unit(n, r, r));
    for (int i = 0; i < n; ++i) EXPECT_NEAR(img(i, i).real(), gm.l_cl(i, r), 1e-12);
    EXPECT_LT((img - Matrix(img.diagonal().asDiagonal())).norm(), 1e-12);
  }
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      if (j == k) continue;
      Matrix img = ld.apply(matrix_unit(n, j, k));
      EXPECT_LT((img - gm.kappa(j, k) * matrix_unit(n, j, k)).norm(), 1e-12) << j << "," << k;
    }
  SpaceSplit sp = kernel_projection(ld, gm.model.sigma);
  EXPECT_EQ(sp.dim0() + 1, static_cast<int>(gm.components.size()));
  EXPECT_NEAR(sp.energies_plus(0), gm.lambda_D, 1e-10 * gm.norm_LD);
  EXPECT_NEAR(sp.norm_ld, gm.norm_LD, 1e-10 * gm.norm_LD);
  EXPECT_LT(check_invariance(ld, gm.model.sigma), 1e-10);
  StructureReport rep = structure_report(ld, gm.model.sigma);
  EXPECT_TRUE(rep.gns_db);
  EXPECT_LT(rep.gns_defect, 1e-9);
}

TEST(Graph, TwoDisjointEdgesUniform) {
  GraphModel gm = graph_lindblad(two_edges(), RealVector::Constant(4, 0.25));
  EXPECT_EQ(gm.components.size(), 2u);
  check_graph_against_brute_force(gm);
}

TEST(Graph, RandomWeightedGraphs) {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(0.3, 2.0);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 4 + trial % 3;
    GraphSpec g{n, {}};
    for (int i = 0; i + 1 < n; ++i)
      if (i != n / 2 - 1 || trial % 2 == 0) g.edges.push_back({i, i + 1, u(rng)});
    if (n > 4) g.edges.push_back({0, n - 1 - (trial % 2) * (n / 2), u(rng)});
    GraphModel gm = graph_lindblad(g, test::random_probabilities(n, rng));
    check_graph_against_brute_force(gm);
    // Detailed balance of the classical walk.
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) EXPECT_NEAR(gm.mu(i) * gm.l_cl(i, j), gm.mu(j) * gm.l_cl(j, i), 1e-12);
  }
}

TEST(Graph, RejectsBadGraphs) {
  EXPECT_THROW(graph_lindblad(GraphSpec{3, {{0, 1, 1.0}}}, RealVector::Constant(3, 1.0 / 3)), InputError);
  EXPECT_THROW(graph_lindblad(GraphSpec{2, {{0, 0, 1.0}}}, RealVector::Constant(2, 0.5)), InputError);
  EXPECT_THROW(graph_lindblad(GraphSpec{2, {{0, 1, 1.0}, {1, 0, 1.0}}}, RealVector::Constant(2, 0.5)), InputError);
  EXPECT_THROW(graph_lindblad(GraphSpec{2, {{0, 1, -1.0}}}, RealVector::Constant(2, 0.5)), InputError);
}

TEST(GraphHamiltonian, SimpleSpectrumIsNeverPrimitive) {
  RealVector mu(4);
  mu << 0.4, 0.3, 0.2, 0.1;
  GraphModel gm = graph_lindblad(two_edges(), mu);
  Matrix h = Matrix::Zero(4, 4);
  h.diagonal() << 1.0, -0.5, 0.3, 2.0;
  GraphHamiltonianCert c = graph_hamiltonian_cert(gm, h);
  EXPECT_TRUE(c.simple_spectrum);
  EXPECT_FALSE(c.primitive);
  EXPECT_FALSE(structure_report(combine(hamiltonian_only(h), gm.model.dissipative), gm.model.sigma).primitive);
  EXPECT_THROW(graph_hamiltonian_cert(gm, Matrix(pauli_string("XI"))), InputError);
}

TEST(GraphHamiltonian, DegenerateBlocksCoupleComponents) {
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> u(0.3, 2.0);
  for (int trial = 0; trial < 4; ++trial) {
    const double a = 0.3 + 0.05 * trial, b = 0.5 - a;
    RealVector mu(4);
    mu << a, a, b, b;
    GraphSpec g{4, {{0, 2, u(rng)}, {1, 3, u(rng)}}};
    GraphModel gm = graph_lindblad(g, mu);
    Matrix h = Matrix::Zero(4, 4);
    cplx h01(u(rng), u(rng) - 1.0), h23(u(rng), 0.0);
    h(0, 1) = h01;
    h(1, 0) = std::conj(h01);
    h(2, 3) = h23;
    h(3, 2) = std::conj(h23);
    GraphHamiltonianCert c = graph_hamiltonian_cert(gm, h);
    EXPECT_FALSE(c.simple_spectrum);
    EXPECT_TRUE(c.primitive);
    EXPECT_LT(c.reversibility_defect, 1e-12);
    ASSERT_TRUE(c.s_H.has_value());
    StructuralConstants sc = structural_constants(hamiltonian_only(h), gm.model.dissipative, gm.model.sigma);
    EXPECT_NEAR(*c.s_H, sc.s_H, 1e-9);
    ASSERT_TRUE(c.path_bound.has_value());
    EXPECT_LE(*c.path_bound, *c.s_H + 1e-9);
    EXPECT_TRUE(structure_report(combine(hamiltonian_only(h), gm.model.dissipative), gm.model.sigma).primitive);
  }
}

TEST(GraphHamiltonian, ThreeComponentsWeightedPathBound) {
  // Components {0,3}, {1,4}, {2,5}; sigma degenerate across components.
  GraphSpec g{6, {{0, 3, 1.0}, {1, 4, 0.7}, {2, 5, 1.3}}};
  RealVector mu(6);
  mu << 0.25, 0.25, 0.25, 0.1, 0.1, 0.05;
  mu /= mu.sum();
  GraphModel gm = graph_lindblad(g, mu);
  Matrix h = Matrix::Zero(6, 6);
  h(0, 1) = h(1, 0) = 1.0;
  h(1, 2) = h(2, 1) = 0.6;
  h(3, 4) = h(4, 3) = 0.8;
  GraphHamiltonianCert c = graph_hamiltonian_cert(gm, h);
  ASSERT_TRUE(c.primitive);
  StructuralConstants sc = structural_constants(hamiltonian_only(h), gm.model.dissipative, gm.model.sigma);
  EXPECT_NEAR(*c.s_H, sc.s_H, 1e-9);
  EXPECT_LE(*c.path_bound, *c.s_H + 1e-9);
  EXPECT_LT(c.reversibility_defect, 1e-12);
}

// ---- birth-death -------------------------------------------------------------

TEST(BirthDeathTest, ThreeChainBetaOne) {
  BirthDeath bd = birth_death_spectrum({3}, 1.0);
  const double ch = std::cosh(0.5);
  ASSERT_EQ(bd.numeric.size(), 1u);
  RealVector ref(3);
  ref << -8 * ch + 8 * std::cos(2 * kPi / 3), -8 * ch + 8 * std::cos(kPi / 3), 0.0;
  for (int k = 0; k < 3; ++k) {
    EXPECT_NEAR(bd.numeric[0](k), ref(k), 1e-10);
    EXPECT_NEAR(bd.closed_form[0](k), ref(k), 1e-12);
  }
  EXPECT_NEAR(bd.numeric[0](0), -13.0213, 1e-3);
  EXPECT_NEAR(bd.numeric[0](1), -5.0213, 1e-3);
}

TEST(BirthDeathTest, SpectrumGrid) {
  for (int sz : {2, 3, 4})
    for (double beta : {0.0, 1.0, 2.0}) {
      BirthDeath bd = birth_death_spectrum({sz, sz}, beta);
      for (size_t c = 0; c < bd.numeric.size(); ++c)
        for (int k = 0; k < sz; ++k) EXPECT_NEAR(bd.numeric[c](k), bd.closed_form[c](k), 1e-10);
      if (beta == 0.0) EXPECT_NEAR(-bd.numeric[0](sz - 2), 8.0 - 8.0 * std::cos(kPi / sz), 1e-10);
      check_graph_against_brute_force(bd.model);
    }
}

TEST(BirthDeathTest, ConnectedChainMatchesClosedFormulas) {
  for (int sz : {2, 3, 4, 5})
    for (double beta : {0.0, 0.5, 1.0, 2.0}) {
      BirthDeath bd = birth_death_spectrum({sz}, beta);
      const double ch = std::cosh(0.5 * beta);
      for (double v : bd.minus_kappa) {
        EXPECT_GE(v, 4.0 * ch - 1e-12);
        EXPECT_LE(v, 8.0 * ch + 1e-12);
      }
      EXPECT_NEAR(bd.lambda_D, bd.lambda_D_formula, 1e-10);
      EXPECT_NEAR(bd.norm_LD, bd.norm_LD_formula, 1e-10);
    }
}

TEST(BirthDeathTest, SeveralChainsLeaveTheKappaRange) {
  // Two chain heads both have a single neighbour with a smaller weight.
  BirthDeath bd = birth_death_spectrum({3, 3}, 1.0);
  const double ch = std::cosh(0.5);
  EXPECT_LT(*std::min_element(bd.minus_kappa.begin(), bd.minus_kappa.end()), 4.0 * ch - 1e-6);
  // lambda_D from the enumerated spectrum stays exact.
  SpaceSplit sp = kernel_projection(bd.model.model.dissipative, bd.model.model.sigma);
  EXPECT_NEAR(sp.energies_plus(0), bd.lambda_D, 1e-10);
}

// ---- averaged Gibbs sampler --------------------------------------------------

// Full Lindbladian L_{A,f} with its coherent term G_{A,f}.
Lindbladian gibbs_sampler_single(const RealVector& lam, double beta, const FilterFunction& q, const Matrix& a) {
  const int n = static_cast<int>(lam.size());
  Matrix l = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double nu = lam(i) - lam(j);
      l(i, j) = q(nu) * std::exp(-0.25 * beta * nu) * a(i, j);
    }
  Matrix ll = l.adjoint() * l;
  Matrix g = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = -0.5 * kI * std::tanh(-0.25 * beta * (lam(i) - lam(j))) * ll(i, j);
  return build_gksl(0.5 * (g + g.adjoint()), {{1.0, l}});
}

Matrix weyl(int n, int a, int b) {
  Matrix sh = Matrix::Zero(n, n), ph = Matrix::Zero(n, n);
  const cplx w = std::exp(2.0 * kPi * kI / static_cast<double>(n));
  for (int k = 0; k < n; ++k) {
    sh((k + 1) % n, k) = 1.0;
    ph(k, k) = std::pow(w, k);
  }
  Matrix m = Matrix::Identity(n, n);
  for (int i = 0; i < a; ++i) m = sh * m;
  for (int i = 0; i < b; ++i) m = m * ph;
  return m;
}

TEST(HaarGibbs, MatchesOneDesignAverage) {
  auto gaussian = [](double v) { return std::exp(-0.5 * v * v); };
  for (int n : {2, 3, 4})
    for (double beta : {0.0, 0.7, 1.5}) {
      RealVector lam = RealVector::LinSpaced(n, -0.4, 1.1);
      Model avg = haar_avg_gibbs(lam, beta, gaussian);
      FramePtr f = kms_frame(QuantumState::maximally_mixed(n));
      Matrix ref = Matrix::Zero(n * n, n * n);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          ref += superop_matrix(gibbs_sampler_single(lam, beta, gaussian, weyl(n, a, b)).as_map(), f, false).matrix;
      ref /= static_cast<double>(n * n);
      Matrix got = superop_matrix(avg.full().as_map(), f, false).matrix;
      EXPECT_LT((got - ref).norm(), 1e-12 * std::max(1.0, ref.norm())) << n << " " << beta;
    }
}

TEST(HaarGibbs, ActionFormulas) {
  RealVector lam(3);
  lam << 0.0, 0.4, 1.3;
  const double beta = 0.9;
  auto q = [](double v) { return 1.0 / (1.0 + v * v); };
  Model m = haar_avg_gibbs(lam, beta, q);
  auto f2 = [&](double v) { return std::pow(q(v) * std::exp(-0.25 * beta * v), 2); };
  for (int i = 0; i < 3; ++i) {
    Matrix img = m.dissipative.apply(matrix_unit(3, i, i));
    for (int j = 0; j < 3; ++j) {
      double ref = f2(lam(i) - lam(j)) / 3.0;
      if (j == i) {
        ref = 0.0;
        for (int k = 0; k < 3; ++k) ref += (k == i ? 0.0 : -f2(lam(k) - lam(i)) / 3.0);
      }
      EXPECT_NEAR(img(j, j).real(), ref, 1e-12);
    }
  }
  for (int k = 0; k < 3; ++k)
    for (int l = 0; l < 3; ++l) {
      if (k == l) continue;
      double s = 0.0;
      for (int i = 0; i < 3; ++i) s += f2(lam(i) - lam(k)) + f2(lam(i) - lam(l));
      Matrix img = m.dissipative.apply(matrix_unit(3, k, l));
      EXPECT_LT((img + s / 6.0 * matrix_unit(3, k, l)).norm(), 1e-12);
    }
}

RealVector two_levels() {
  RealVector v(2);
  v << 0.0, 1.0;
  return v;
}

TEST(HaarGibbs, InvarianceAndDetailedBalance) {
  auto one = [](double) { return 1.0; };
  Model m0 = haar_avg_gibbs(two_levels(), 0.0, one);
  EXPECT_TRUE(m0.sigma.is_maximally_mixed());
  EXPECT_LT(check_invariance(m0.dissipative, m0.sigma), 1e-12);
  Model m1 = haar_avg_gibbs(two_levels(), 1.0, one);
  EXPECT_LT(check_invariance(m1.dissipative, m1.sigma), 1e-10);
  double z = 1.0 + std::exp(-1.0);
  EXPECT_NEAR(m1.sigma.matrix()(0, 0).real(), 1.0 / z, 1e-14);
  StructureReport r = structure_report(m1.dissipative, m1.sigma);
  EXPECT_TRUE(r.gns_db);
  EXPECT_TRUE(r.kms_db);
  EXPECT_THROW(haar_avg_gibbs(two_levels(), 1.0, [](double v) { return v; }), InputError);
}

// ---- lift --------------------------------------------------------------------

Matrix lift_a() { return pauli('Z') + 2.0 * Matrix::Identity(2, 2); }

GraphModel three_chain() {
  RealVector mu(3);
  mu << 0.5, 0.3, 0.2;
  return graph_lindblad(GraphSpec{3, {{0, 1, 1.0}, {1, 2, 1.0}}}, mu);
}

TEST(Lift, KernelIsTwoDimensional) {
  LiftModel lm = lift_model(three_chain(), lift_a());
  EXPECT_LT(check_invariance(lm.model.dissipative, lm.model.sigma), 1e-10);
  SpaceSplit sp = kernel_projection(lm.model.dissipative, lm.model.sigma);
  EXPECT_EQ(sp.dim0(), 1);  // 1 (x) diag(c0, c1) minus the identity
  Matrix k = kron(Matrix::Identity(3, 3), pauli('Z'));
  EXPECT_LT(lm.model.dissipative.apply(k).norm(), 1e-12);
  EXPECT_TRUE(structure_report(lm.model.dissipative, lm.model.sigma).gns_db);
}

TEST(Lift, PrimitivityCriterion) {
  LiftModel lm = lift_model(three_chain(), lift_a());
  Matrix hx = kron(Matrix::Identity(3, 3), pauli('X'));
  Matrix hz = kron(Matrix::Identity(3, 3), pauli('Z'));
  EXPECT_TRUE(lift_primitive(lm, hx));
  EXPECT_FALSE(lift_primitive(lm, hz));
  EXPECT_TRUE(structure_report(combine(hamiltonian_only(hx), lm.model.dissipative), lm.model.sigma).primitive);
  EXPECT_FALSE(structure_report(combine(hamiltonian_only(hz), lm.model.dissipative), lm.model.sigma).primitive);
  RateCertificate c = certify(hamiltonian_only(hx), lm.model.dissipative, lm.model.sigma);
  EXPECT_GT(c.nu, 0.0);
}

TEST(Lift, NonDiagonalAAndRandomHamiltonians) {
  std::mt19937_64 rng(45);
  Matrix a = 0.8 * pauli('X') + 0.3 * pauli('Z') + 0.2 * Matrix::Identity(2, 2);
  LiftModel lm = lift_model(three_chain(), a);
  for (int trial = 0; trial < 4; ++trial) {
    Matrix blocks = Matrix::Zero(6, 6);
    for (int r = 0; r < 3; ++r)
      blocks.block(2 * r, 2 * r, 2, 2) = trial % 2 == 0 ? random_hermitian(2, rng) : Matrix(lm.a);
    bool claim = lift_primitive(lm, blocks);
    bool truth = structure_report(combine(hamiltonian_only(blocks), lm.model.dissipative), lm.model.sigma).primitive;
    EXPECT_EQ(claim, truth) << trial;
    EXPECT_EQ(claim, trial % 2 == 0);
  }
  EXPECT_THROW(lift_model(three_chain(), Matrix::Identity(2, 2)), InputError);
  EXPECT_THROW(lift_model(three_chain(), Matrix(pauli('Z') + Matrix::Identity(2, 2))), InputError);
  EXPECT_THROW(lift_model(graph_lindblad(two_edges(), RealVector::Constant(4, 0.25)), lift_a()), InputError);
  EXPECT_THROW(lift_model(three_chain(), pauli('Z')), InputError);
}

// ---- suite ---------------------------------------------------------------------

TEST(Suite, EveryModelIsPrimitiveWithInvariantState) {
  for (const Model& m : suite_models()) {
    StructureReport r = structure_report(m.full(), m.sigma);
    EXPECT_TRUE(r.primitive) << m.name;
    EXPECT_EQ(r.classification, Classification::Hypocoercive) << m.name;
    EXPECT_TRUE(structure_report(m.dissipative, m.sigma).kms_db) << m.name;
  }
}

}  // namespace
}  // namespace hypoco
