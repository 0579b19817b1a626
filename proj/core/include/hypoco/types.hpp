#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace hypoco {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr cplx kI{0.0, 1.0};

// Bad arguments or a model that violates a documented precondition.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A linear-algebra step failed or lost the accuracy its caller needs.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The model is well formed but outside the hypotheses of the requested analysis.
class AssumptionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tolerance knobs shared by every module. Defaults are the documented ones.
struct Tolerances {
  double invariance = 1e-10;        // ||L^dag(sigma)||, relative to the generator scale
  double detailed_balance = 1e-8;   // Hermiticity defect of frame matrices
  double standard_dbc = 1e-8;       // least-squares residual of L - L* = 2i[K,.]
  double commutant = 1e-9;          // SVD threshold, relative to largest singular value
  double kernel = 1e-9;             // zero eigenvalue test, relative to ||L^D||
  double modular = 1e-8;            // relative defect of Delta_sigma(L_j) = e^{-w} L_j
  double bohr_cluster = 1e-7;       // frequency clustering, relative to ||H||
  double assumption = 1e-9;         // ||Pi0 M_H Pi0||, relative to ||M_H||
  double hypoco_index = 1e-9;       // positivity threshold, relative to ||sum||
  double slack = 1e-6;              // multiplicative slack of inequality checks
  double quadrature = 1e-8;         // Richardson self-consistency of Simpson rules
};

}  // namespace hypoco
