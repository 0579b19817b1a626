#pragma once

#include <functional>
#include <memory>
#include <random>
#include <vector>

#include "hypoco/types.hpp"

namespace hypoco {

// ---- plain operator helpers -------------------------------------------------

Matrix commutator(const Matrix& a, const Matrix& b);
Matrix anticommutator(const Matrix& a, const Matrix& b);
Matrix kron(const Matrix& a, const Matrix& b);
double hs_norm(const Matrix& a);
double spectral_norm(const Matrix& a);
bool is_hermitian(const Matrix& a, double tol);

Matrix pauli(char which);  // 'I', 'X', 'Y', 'Z'
// Pauli `which` acting on qubit `site` of an n-qubit register. Qubit i is bit i
// of the basis index (little-endian).
Matrix pauli_on(int n, int site, char which);
// Tensor product of a Pauli string; character k acts on qubit k.
Matrix pauli_string(const std::string& word);
Matrix matrix_unit(int n, int r, int s);

// Gaussian Hermitian matrix with unit-variance entries.
Matrix random_hermitian(int n, std::mt19937_64& rng);
Matrix random_complex(int n, std::mt19937_64& rng);
Matrix random_unitary(int n, std::mt19937_64& rng);

// ---- states -----------------------------------------------------------------

// Full-rank density matrix with its spectral factorization.
class QuantumState {
 public:
  QuantumState() = default;
  static QuantumState from_matrix(const Matrix& sigma);
  static QuantumState maximally_mixed(int n);
  // sigma = U diag(mu) U^dag; mu must sum to one. U defaults to the identity.
  static QuantumState from_spectrum(const RealVector& mu, const Matrix& basis = Matrix());
  // exp(-beta H) / Z
  static QuantumState gibbs(const Matrix& hamiltonian, double beta);

  int dim() const { return static_cast<int>(mu_.size()); }
  const Matrix& matrix() const { return sigma_; }
  const RealVector& eigenvalues() const { return mu_; }  // descending
  const Matrix& eigenvectors() const { return u_; }
  Matrix power(double p) const;
  const Matrix& sqrt() const { return half_; }
  const Matrix& inv_sqrt() const { return inv_half_; }
  const Matrix& quarter() const { return quarter_; }
  const Matrix& inv_quarter() const { return inv_quarter_; }
  bool is_maximally_mixed(double tol = 1e-12) const;

 private:
  QuantumState(Matrix sigma, RealVector mu, Matrix u);
  Matrix sigma_;
  RealVector mu_;
  Matrix u_;
  Matrix half_, inv_half_, quarter_, inv_quarter_;
};

// <X, Y>_{sigma,s} = tr(sigma^s X^dag sigma^{1-s} Y)
cplx weighted_inner(const QuantumState& sigma, double s, const Matrix& x, const Matrix& y);
// ||X||_{2,sigma} for the KMS product
double kms_norm(const QuantumState& sigma, const Matrix& x);

// ---- coordinate frames --------------------------------------------------------

// Orthonormal basis of B(H) for <.,.>_{sigma,s}. Index k = r*N + s over matrix
// units of sigma's eigenbasis; the diagonal slots are rotated so that E_0 = 1 and
// every other element has tr(sigma E_k) = 0. s = 1/2 is the KMS frame.
class KmsFrame {
 public:
  explicit KmsFrame(QuantumState state, double s = 0.5);

  const QuantumState& state() const { return state_; }
  double weight() const { return s_; }
  int dim() const { return n_; }
  int size() const { return n_ * n_; }

  Vector coords(const Matrix& x) const;
  Matrix op(const Vector& c) const;
  Matrix basis(int k) const;
  // Coordinates on the traceless block (indices 1..N^2-1) and back.
  Vector traceless_coords(const Matrix& x) const;
  Matrix traceless_op(const Vector& c) const;

 private:
  QuantumState state_;
  double s_;
  int n_;
  RealMatrix q_;      // diagonal rotation, column 0 = sqrt(mu)
  RealMatrix left_;   // mu_r^{(1-s)/2} mu_c^{s/2}, applied in sigma's eigenbasis
};

using FramePtr = std::shared_ptr<const KmsFrame>;
FramePtr kms_frame(const QuantumState& sigma);
FramePtr weighted_frame(const QuantumState& sigma, double s);

using LinearMap = std::function<Matrix(const Matrix&)>;

// Dense matrix of a linear map on B(H) in a frame; entry [j][k] = <E_j, map(E_k)>.
struct SuperOperator {
  FramePtr frame;
  Matrix matrix;
  bool restricted = false;

  int size() const { return static_cast<int>(matrix.rows()); }
  Matrix apply(const Matrix& x) const;
};

SuperOperator superop_matrix(const LinearMap& map, const FramePtr& frame, bool restrict_traceless,
                             bool check_linearity = true);
SuperOperator kms_adjoint(const SuperOperator& s);
double op_norm_2to2(const SuperOperator& s);
// Traceless block of an unrestricted superoperator.
SuperOperator restrict_to_traceless(const SuperOperator& s);

// Smallest singular value, largest singular value, helpers used across modules.
double smallest_singular_value(const Matrix& m);
double largest_singular_value(const Matrix& m);
double hermitian_defect(const Matrix& m);  // ||M - M^dag||_F / max(||M||_F, 1e-300)

}  // namespace hypoco
