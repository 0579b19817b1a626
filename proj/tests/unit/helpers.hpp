#pragma once

#include <random>

#include "hypoco/lindblad.hpp"

namespace hypoco::test {

inline QuantumState random_state(int n, std::mt19937_64& rng) {
  Matrix g = random_complex(n, rng);
  Matrix s = g * g.adjoint() + 0.05 * Matrix::Identity(n, n);
  s /= s.trace().real();
  return QuantumState::from_matrix(0.5 * (s + s.adjoint()));
}

inline RealVector random_probabilities(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.2, 1.0);
  RealVector mu(n);
  for (int i = 0; i < n; ++i) mu(i) = u(rng);
  return mu / mu.sum();
}

inline Matrix dephasing_z() { return pauli('Z'); }

// H = X, L^D = -[Z,[Z,.]], sigma = 1/2.
inline Lindbladian qubit_dissipator() { return build_gksl(Matrix::Zero(2, 2), {{2.0, pauli('Z')}}); }

inline RealVector vec2(double a, double b) {
  RealVector v(2);
  v << a, b;
  return v;
}

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace hypoco::test
