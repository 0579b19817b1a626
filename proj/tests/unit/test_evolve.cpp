#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "helpers.hpp"
#include "hypoco/certificate.hpp"
#include "hypoco/evolve.hpp"
#include "hypoco/models.hpp"
#include "hypoco/spectral.hpp"

namespace hypoco {
namespace {

Lindbladian pauli_channel() {
  return build_gksl(Matrix::Zero(2, 2), {{1.0, pauli('X')}, {1.0, pauli('Y')}, {1.0, pauli('Z')}});
}

// ---- matrix exponential ------------------------------------------------------

TEST(Expm, MatchesEigendecompositionForSkewHermitian) {
  std::mt19937_64 rng(51);
  for (int n : {1, 2, 5, 9}) {
    Matrix h = random_hermitian(n, rng) * 7.0;
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    Vector ph = (kI * es.eigenvalues().cast<cplx>()).array().exp();
    Matrix ref = es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
    Matrix got = expm(kI * h);
    EXPECT_LT((got - ref).norm(), 1e-12 * n);
    EXPECT_LT((got * got.adjoint() - Matrix::Identity(n, n)).norm(), 1e-12 * n);
  }
}

TEST(Expm, MatchesEigenMatrixFunctions) {
  std::mt19937_64 rng(52);
  for (double scale : {1e-6, 0.3, 2.0, 40.0}) {
    for (int n : {3, 6}) {
      Matrix a = random_complex(n, rng) * scale;
      a -= 2.0 * scale * Matrix::Identity(n, n);  // keep entries bounded at large scale
      Matrix ref = a.exp();
      Matrix got = expm(a);
      EXPECT_LT((got - ref).norm(), 1e-10 * std::max(1.0, ref.norm())) << scale;
    }
  }
}

TEST(Expm, NilpotentAndDiagonal) {
  Matrix n = Matrix::Zero(3, 3);
  n(0, 1) = 2.0;
  n(1, 2) = 3.0;
  Matrix ref = Matrix::Identity(3, 3) + n + 0.5 * n * n;
  EXPECT_LT((expm(n) - ref).norm(), 1e-14);
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = -30.0;
  d(1, 1) = 1.5;
  EXPECT_NEAR(expm(d)(0, 0).real(), std::exp(-30.0), 1e-25);
  EXPECT_NEAR(expm(d)(1, 1).real(), std::exp(1.5), 1e-13);
  EXPECT_LT((expm(Matrix::Zero(4, 4)) - Matrix::Identity(4, 4)).norm(), 1e-15);
}

// ---- propagation -------------------------------------------------------------

TEST(PropagatorTest, ZeroTimeAndSemigroupProperty) {
  Model m = qubit_model();
  Lindbladian l = m.full();
  Propagator p(l, m.sigma);
  std::mt19937_64 rng(53);
  Matrix x = random_hermitian(2, rng);
  EXPECT_LT((p.apply(x, 0.0) - x).norm(), 1e-14);
  Matrix two = p.apply(p.apply(x, 0.3), 0.45);
  EXPECT_LT((two - p.apply(x, 0.75)).norm(), 1e-12);
  EXPECT_LT((propagate(l, m.sigma, x, 0.75) - p.apply(x, 0.75)).norm(), 1e-12);
  // Short-time derivative equals the generator.
  const double h = 1e-5;
  Matrix deriv = (p.apply(x, 2 * h) - x) / (2 * h);
  EXPECT_LT((deriv - l.apply(p.apply(x, h))).norm(), 1e-8);
  EXPECT_THROW(p.apply(x, -1.0), InputError);
}

TEST(PropagatorTest, MeanPreservedContractiveAndConvergent) {
  std::mt19937_64 rng(54);
  for (const Model& m : suite_models()) {
    if (m.sigma.dim() > 8) continue;
    Lindbladian l = m.full();
    Propagator p(l, m.sigma);
    Matrix x0 = random_hermitian(m.sigma.dim(), rng);
    cplx mean = (m.sigma.matrix() * x0).trace();
    Matrix one = Matrix::Identity(m.sigma.dim(), m.sigma.dim());
    double prev = kms_norm(m.sigma, x0 - mean * one);
    for (double t : {0.1, 0.5, 2.0, 8.0}) {
      Matrix xt = p.apply(x0, t);
      EXPECT_NEAR(std::abs((m.sigma.matrix() * xt).trace() - mean), 0.0, 1e-10) << m.name;
      double v = kms_norm(m.sigma, xt - mean * one);
      EXPECT_LE(v, prev * (1.0 + 1e-10)) << m.name << " t=" << t;
      prev = v;
    }
    double gap = spectral_gap(l, m.sigma).spectral_gap;
    double t_long = 40.0 / gap;
    EXPECT_LT((p.apply(x0, t_long) - mean * one).norm(), 1e-8 * std::max(1.0, x0.norm())) << m.name;
  }
}

TEST(PropagatorTest, VarianceFromCoordinates) {
  std::mt19937_64 rng(55);
  QuantumState s = test::random_state(3, rng);
  FramePtr f = kms_frame(s);
  Matrix x = random_hermitian(3, rng);
  cplx mean = (s.matrix() * x).trace();
  double ref = std::pow(kms_norm(s, x - mean * Matrix::Identity(3, 3)), 2);
  EXPECT_NEAR(variance_of(f->coords(x)), ref, 1e-12);
  Matrix z = random_mean_zero_hermitian(s, rng);
  EXPECT_NEAR(std::abs((s.matrix() * z).trace()), 0.0, 1e-12);
  EXPECT_LT(hermitian_defect(z), 1e-14);
}

TEST(Decay, CurveIsNonincreasingAndWindowConsistent) {
  Model m = qubit_model();
  Lindbladian l = m.full();
  std::mt19937_64 rng(56);
  Matrix x0 = random_mean_zero_hermitian(m.sigma, rng);
  std::vector<double> times;
  for (int k = 0; k <= 20; ++k) times.push_back(0.25 * k);
  DecayCurve c = decay_curve(l, m.sigma, x0, times, 0.5);
  EXPECT_NEAR(c.values[0], std::pow(kms_norm(m.sigma, x0), 2), 1e-12);
  for (size_t k = 1; k < c.values.size(); ++k) EXPECT_LE(c.values[k], c.values[k - 1] * (1 + 1e-12));
  for (size_t k = 0; k < c.values.size(); ++k) {
    // Independent fine trapezoid on the window.
    const int steps = 4000;
    double acc = 0.0;
    for (int j = 0; j <= steps; ++j) {
      double t = c.times[k] + 0.5 * j / steps;
      double v = std::pow(kms_norm(m.sigma, propagate(l, m.sigma, x0, t)), 2);
      acc += (j == 0 || j == steps ? 0.5 : 1.0) * v;
    }
    EXPECT_NEAR(c.window_avg[k], acc / steps, 1e-6 * c.values[0]);
    if (k >= 4) break;
  }
}

// ---- certified decay ---------------------------------------------------------

TEST(TimeAverage, QubitCertificateHolds) {
  Model m = qubit_model();
  RateCertificate cert = certify(m.coherent, m.dissipative, m.sigma);
  std::mt19937_64 rng(57);
  for (int i = 0; i < 5; ++i) {
    Matrix x0 = random_mean_zero_hermitian(m.sigma, rng);
    TimeAvgResult r = time_avg_check(m.full(), m.sigma, x0, cert.T, cert.nu, default_sample_times(cert.nu, 2000.0));
    EXPECT_TRUE(r.pass);
    EXPECT_TRUE(r.quadrature_ok);
    EXPECT_LE(r.worst_window_ratio, 1.0 + 1e-9);
    EXPECT_EQ(r.samples.size(), 20u);
  }
}

TEST(TimeAverage, TooLargeRateFails) {
  Model m = qubit_model();
  double gap = spectral_gap(m.full(), m.sigma).spectral_gap;
  std::mt19937_64 rng(58);
  Matrix x0 = random_mean_zero_hermitian(m.sigma, rng);
  std::vector<double> ts;
  for (int k = 0; k < 20; ++k) ts.push_back(0.5 * k);
  TimeAvgResult r = time_avg_check(m.full(), m.sigma, x0, 1.5, 2.0 * gap, ts);
  EXPECT_FALSE(r.pass);
  EXPECT_GT(r.worst_window_ratio, 1.0);
}

TEST(TimeAverage, ConstantObservableIsTrivial) {
  Model m = qubit_model();
  TimeAvgResult r = time_avg_check(m.full(), m.sigma, Matrix::Identity(2, 2), 1.5, 0.1, {0.0, 1.0, 5.0});
  EXPECT_TRUE(r.pass);
  for (const auto& s : r.samples) EXPECT_NEAR(s.value, 0.0, 1e-20);
}

TEST(TimeAverage, SampleTimes) {
  auto ts = default_sample_times(0.01, 2000.0, 20);
  ASSERT_EQ(ts.size(), 20u);
  EXPECT_EQ(ts.front(), 0.0);
  EXPECT_NEAR(ts.back(), 1000.0, 1e-9);
  EXPECT_NEAR(default_sample_times(1e-5, 2000.0).back(), 2000.0, 1e-9);
}

TEST(NormCurveTest, KmsDetailedBalanceDecaysExactly) {
  QuantumState s = QuantumState::maximally_mixed(2);
  std::vector<double> ts = {0.05, 0.2, 0.5, 1.0};
  NormCurve c = semigroup_norm_curve(pauli_channel(), s, ts);
  EXPECT_NEAR(c.spectral_gap, 4.0, 1e-10);
  for (size_t k = 0; k < ts.size(); ++k) {
    EXPECT_NEAR(c.norms[k], std::exp(-4.0 * ts[k]), 1e-10);
    EXPECT_NEAR(c.rates[k], 4.0, 1e-8);
  }
  EXPECT_TRUE(c.asymptotic);
}

TEST(NormCurveTest, HypocoerciveRateApproachesGap) {
  Model m = qubit_model();
  double gap = spectral_gap(m.full(), m.sigma).spectral_gap;
  NormCurve c = semigroup_norm_curve(m.full(), m.sigma, log_spaced(5.0 / gap, 50.0 / gap, 24));
  EXPECT_NEAR(c.empirical_rate, gap, 0.05 * gap);
  EXPECT_TRUE(c.asymptotic);
  // Norms start at 1 and dominate e^{-gap t} up to the Jordan prefactor.
  NormCurve early = semigroup_norm_curve(m.full(), m.sigma, {1e-3, 0.1});
  EXPECT_NEAR(early.norms[0], 1.0, 1e-2);
  EXPECT_LE(early.norms[1], 1.0);
}

TEST(NormCurveTest, LogSpacing) {
  auto v = log_spaced(1.0, 100.0, 3);
  ASSERT_EQ(v.size(), 3u);
  EXPECT_NEAR(v[1], 10.0, 1e-12);
  EXPECT_NEAR(v[2], 100.0, 1e-12);
}

// ---- space-time Poincare -----------------------------------------------------

TEST(SpaceTime, QubitRandomPolynomials) {
  Model m = qubit_model();
  StpResult r = stp_verify(m.coherent, m.dissipative, m.sigma, 1.5, 0.5, 30, 3, 7);
  EXPECT_TRUE(r.pass);
  EXPECT_TRUE(r.quadrature_ok);
  EXPECT_LT(r.worst_ratio, 1.0);
  StpResult again = stp_verify(m.coherent, m.dissipative, m.sigma, 1.5, 0.5, 30, 3, 7);
  EXPECT_EQ(r.worst_ratio, again.worst_ratio);
}

TEST(SpaceTime, ConstantPathInHPlus) {
  Model m = qubit_model();
  const double T = 1.5, beta = 0.5;
  CConstants cc = c_constants(structural_constants(m.coherent, m.dissipative, m.sigma), T, beta);
  double defect = 1.0;
  StpSample s = stp_evaluate(m.coherent, m.dissipative, m.sigma, T, beta, {pauli('Y')}, &defect);
  // The space-time mean of Y is zero, so the left side is ||Y|| = 1.
  // i[X, Y] = -2Z lies in the kernel where (beta - L^D)^{-1/2} acts as beta^{-1/2}.
  EXPECT_NEAR(s.lhs, 1.0, 1e-12);
  EXPECT_NEAR(s.rhs, cc.C1 + cc.C2 * 2.0 / std::sqrt(beta), 1e-9 * s.rhs);
  EXPECT_LT(defect, 1e-8);
}

TEST(SpaceTime, LinearPathInKernel) {
  Model m = qubit_model();
  const double beta = 0.5;
  for (double T : {0.5, 1.5, 4.0}) {
    CConstants cc = c_constants(structural_constants(m.coherent, m.dissipative, m.sigma), T, beta);
    Matrix z = pauli('Z');
    StpSample s = stp_evaluate(m.coherent, m.dissipative, m.sigma, T, beta, {Matrix(-0.5 * T * z), Matrix(T * z)});
    EXPECT_NEAR(s.lhs, T / std::sqrt(12.0), 1e-10);
    // d/dt X = Z in the kernel; L^H X = 2(t - T/2) Y sees (beta + 4)^{-1/2}.
    double ref = cc.C2 * std::sqrt(T * T / (3.0 * (beta + 4.0)) + 1.0 / beta);
    EXPECT_NEAR(s.rhs, ref, 1e-9 * ref);
    EXPECT_LE(s.lhs, s.rhs);
  }
}

TEST(SpaceTime, RejectsBadParameters) {
  Model m = qubit_model();
  EXPECT_THROW(stp_verify(m.coherent, m.dissipative, m.sigma, 1.5, 0.0, 1, 1, 1), InputError);
  EXPECT_THROW(stp_verify(m.coherent, m.dissipative, m.sigma, -1.0, 0.5, 1, 1, 1), InputError);
  EXPECT_THROW(stp_evaluate(m.coherent, m.dissipative, m.sigma, 1.5, 0.5, {}), InputError);
}

// ---- quadrature --------------------------------------------------------------

TEST(Simpson, ExactOnCubicsAndConvergent) {
  std::vector<double> f;
  for (int k = 0; k <= 10; ++k) f.push_back(std::pow(0.1 * k, 3) - 2 * 0.1 * k);
  EXPECT_NEAR(simpson(f, 0.1), 0.25 - 1.0, 1e-14);
  double prev_err = 1.0;
  for (int n : {11, 21, 41}) {
    std::vector<double> g;
    double h = std::numbers::pi / (n - 1);
    for (int k = 0; k < n; ++k) g.push_back(std::sin(k * h));
    double err = std::abs(simpson(g, h) - 2.0);
    EXPECT_LT(err, prev_err / 10.0);
    prev_err = err;
  }
}

}  // namespace
}  // namespace hypoco
