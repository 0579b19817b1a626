#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "hypoco/lindblad.hpp"

namespace hypoco {

// Degree-13 Pade approximant with scaling and squaring.
Matrix expm(const Matrix& a);

// e^{tL} acting on full KMS-frame coordinates.
class Propagator {
 public:
  Propagator(const Lindbladian& l, const QuantumState& sigma);

  const FramePtr& frame() const { return frame_; }
  const Matrix& generator() const { return m_; }
  Matrix step(double t) const;
  Vector evolve(const Vector& c, double t) const;
  Matrix apply(const Matrix& x0, double t) const;

 private:
  FramePtr frame_;
  Matrix m_;
};

Matrix propagate(const Lindbladian& l, const QuantumState& sigma, const Matrix& x0, double t);

// ||X - tr(sigma X) 1||^2_{2,sigma} from full KMS coordinates.
double variance_of(const Vector& c);

// Gaussian Hermitian matrix shifted to tr(sigma X) = 0.
Matrix random_mean_zero_hermitian(const QuantumState& sigma, std::mt19937_64& rng);

// Composite Simpson rule on equally spaced samples (odd count).
double simpson(const std::vector<double>& f, double h);

struct DecayCurve {
  std::vector<double> times;
  std::vector<double> values;      // ||X_t - <X>||^2
  std::vector<double> window_avg;  // (1/T) int_t^{t+T} values
  double window = 0.0;
};

DecayCurve decay_curve(const Lindbladian& l, const QuantumState& sigma, const Matrix& x0,
                       const std::vector<double>& times, double window);

struct TimeAvgSample {
  double t = 0.0;
  double avg = 0.0;        // (1/T) int_t^{t+T}
  double avg_bound = 0.0;  // e^{-nu t} (1/T) int_0^T
  double value = 0.0;      // ||X_t - <X>||^2
  double value_bound = 0.0;  // C_T e^{-nu t} ||X_0 - <X>||^2
};

struct TimeAvgResult {
  bool pass = false;            // both bounds hold at every sample
  bool window_pass = false;
  bool pointwise_pass = false;
  bool quadrature_ok = false;
  double worst_window_ratio = 0.0;
  double worst_pointwise_ratio = 0.0;
  double quadrature_defect = 0.0;  // max relative Simpson vs. refined disagreement
  int nodes = 201;                 // nodes per window after refinement
  std::vector<TimeAvgSample> samples;
};

// `slack` multiplies each right-hand side.
TimeAvgResult time_avg_check(const Lindbladian& l, const QuantumState& sigma, const Matrix& x0, double T,
                             double nu, const std::vector<double>& t_samples, double slack = 1.0 + 1e-6,
                             double quad_tol = 1e-8);

// n equally spaced times on [0, min(10/nu, t_max)].
std::vector<double> default_sample_times(double nu, double t_max, int n = 20);

struct NormCurve {
  std::vector<double> ts;
  std::vector<double> norms;  // ||P_t||_{h->h}
  std::vector<double> rates;  // -log(norm)/t
  double empirical_rate = 0.0;  // -LS slope of log norm over the last half of ts
  double spectral_gap = 0.0;
  bool asymptotic = false;      // empirical rate within 5% of the gap
};

NormCurve semigroup_norm_curve(const Lindbladian& l, const QuantumState& sigma, const std::vector<double>& ts);
std::vector<double> log_spaced(double lo, double hi, int n);

struct StpSample {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
};

struct StpResult {
  bool pass = false;
  bool quadrature_ok = false;
  double worst_ratio = 0.0;
  double quadrature_defect = 0.0;
  double C1 = 0.0;
  double C2 = 0.0;
  double T = 0.0;
  double beta = 0.0;
  std::uint64_t seed = 0;
  std::vector<StpSample> samples;
};

// X_t = sum_{k<=d} (t/T)^k A_k with A_k Gaussian Hermitian projected to h.
StpResult stp_verify(const Lindbladian& lh, const Lindbladian& ld, const QuantumState& sigma, double T, double beta,
                     int samples, int degree, std::uint64_t seed, double slack = 1.0 + 1e-6,
                     double quad_tol = 1e-8, const Tolerances& tol = {});

// One space-time check for an explicit polynomial path; coeffs[k] multiplies (t/T)^k.
StpSample stp_evaluate(const Lindbladian& lh, const Lindbladian& ld, const QuantumState& sigma, double T, double beta,
                       const std::vector<Matrix>& coeffs, double* quad_defect = nullptr, const Tolerances& tol = {});

}  // namespace hypoco
