#include "hypoco/operator_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace hypoco {

Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

Matrix anticommutator(const Matrix& a, const Matrix& b) { return a * b + b * a; }

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

double hs_norm(const Matrix& a) { return a.norm(); }

double spectral_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  return largest_singular_value(a);
}

bool is_hermitian(const Matrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  return (a - a.adjoint()).norm() <= tol * std::max(1.0, a.norm());
}

Matrix pauli(char which) {
  Matrix p = Matrix::Zero(2, 2);
  switch (which) {
    case 'I': p(0, 0) = 1; p(1, 1) = 1; break;
    case 'X': p(0, 1) = 1; p(1, 0) = 1; break;
    case 'Y': p(0, 1) = -kI; p(1, 0) = kI; break;
    case 'Z': p(0, 0) = 1; p(1, 1) = -1; break;
    default: throw InputError(std::string("unknown Pauli label '") + which + "'");
  }
  return p;
}

Matrix pauli_on(int n, int site, char which) {
  if (n < 1 || site < 0 || site >= n) throw InputError("pauli_on: site out of range");
  std::string word(static_cast<size_t>(n), 'I');
  word[static_cast<size_t>(site)] = which;
  return pauli_string(word);
}

Matrix pauli_string(const std::string& word) {
  if (word.empty()) throw InputError("empty Pauli string");
  Matrix m = Matrix::Identity(1, 1);
  for (auto it = word.rbegin(); it != word.rend(); ++it) m = kron(m, pauli(*it));
  return m;
}

Matrix matrix_unit(int n, int r, int s) {
  Matrix e = Matrix::Zero(n, n);
  e(r, s) = 1.0;
  return e;
}

Matrix random_complex(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double re = g(rng);
      double im = g(rng);
      m(i, j) = cplx(re, im);
    }
  return m;
}

Matrix random_hermitian(int n, std::mt19937_64& rng) {
  Matrix g = random_complex(n, rng);
  return (g + g.adjoint()) * 0.5;
}

Matrix random_unitary(int n, std::mt19937_64& rng) {
  Matrix g = random_complex(n, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    cplx d = r(j, j);
    if (std::abs(d) > 0) q.col(j) *= d / std::abs(d);
  }
  return q;
}

// ---- QuantumState ---------------------------------------------------------

namespace {

bool is_diagonal(const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (i != j && m(i, j) != cplx(0.0)) return false;
  return true;
}

Matrix spectral_power(const Matrix& u, const RealVector& mu, double p) {
  RealVector d = mu.array().pow(p);
  return u * d.cast<cplx>().asDiagonal() * u.adjoint();
}

}  // namespace

QuantumState::QuantumState(Matrix sigma, RealVector mu, Matrix u)
    : sigma_(std::move(sigma)), mu_(std::move(mu)), u_(std::move(u)) {
  half_ = spectral_power(u_, mu_, 0.5);
  inv_half_ = spectral_power(u_, mu_, -0.5);
  quarter_ = spectral_power(u_, mu_, 0.25);
  inv_quarter_ = spectral_power(u_, mu_, -0.25);
}

QuantumState QuantumState::from_spectrum(const RealVector& mu_in, const Matrix& basis_in) {
  const int n = static_cast<int>(mu_in.size());
  if (n < 1) throw InputError("state: empty spectrum");
  Matrix basis = basis_in.size() == 0 ? Matrix(Matrix::Identity(n, n)) : basis_in;
  if (basis.rows() != n || basis.cols() != n) throw InputError("state: basis has wrong shape");
  if ((basis.adjoint() * basis - Matrix::Identity(n, n)).norm() > 1e-10)
    throw InputError("state: basis is not unitary");
  if (!mu_in.allFinite()) throw InputError("state: non-finite eigenvalue");
  double trace = mu_in.sum();
  if (std::abs(trace - 1.0) > 1e-12)
    throw InputError("state: trace is " + std::to_string(trace) + ", expected 1");
  double mu_max = mu_in.maxCoeff();
  if (mu_in.minCoeff() <= 1e-10 * mu_max) throw InputError("state: not full rank");

  std::vector<int> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return mu_in[a] > mu_in[b]; });
  RealVector mu(n);
  Matrix u(n, n);
  for (int k = 0; k < n; ++k) {
    mu[k] = mu_in[order[static_cast<size_t>(k)]];
    u.col(k) = basis.col(order[static_cast<size_t>(k)]);
  }
  Matrix sigma = u * mu.cast<cplx>().asDiagonal() * u.adjoint();
  sigma = (sigma + sigma.adjoint()) * 0.5;
  return QuantumState(std::move(sigma), std::move(mu), std::move(u));
}

QuantumState QuantumState::from_matrix(const Matrix& sigma) {
  if (sigma.rows() != sigma.cols() || sigma.rows() == 0) throw InputError("state: matrix is not square");
  if (!sigma.allFinite()) throw InputError("state: non-finite entries");
  if (!is_hermitian(sigma, 1e-10)) throw InputError("state: matrix is not Hermitian");
  const int n = static_cast<int>(sigma.rows());
  if (is_diagonal(sigma)) {
    RealVector mu = sigma.diagonal().real();
    return from_spectrum(mu);
  }
  Matrix h = (sigma + sigma.adjoint()) * 0.5;
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success) throw NumericalError("state: eigendecomposition failed");
  RealVector mu = es.eigenvalues().reverse();
  Matrix u = es.eigenvectors().rowwise().reverse();
  QuantumState out = from_spectrum(mu, u);
  if ((out.sigma_ - sigma).norm() > 1e-12 * std::max(1.0, static_cast<double>(n)))
    throw NumericalError("state: spectral reconstruction error above 1e-12");
  return out;
}

QuantumState QuantumState::maximally_mixed(int n) {
  if (n < 1) throw InputError("state: dimension must be positive");
  return from_spectrum(RealVector::Constant(n, 1.0 / n));
}

QuantumState QuantumState::gibbs(const Matrix& hamiltonian, double beta) {
  if (!is_hermitian(hamiltonian, 1e-10)) throw InputError("gibbs: Hamiltonian is not Hermitian");
  const int n = static_cast<int>(hamiltonian.rows());
  RealVector energies;
  Matrix basis;
  if (is_diagonal(hamiltonian)) {
    energies = hamiltonian.diagonal().real();
    basis = Matrix::Identity(n, n);
  } else {
    Eigen::SelfAdjointEigenSolver<Matrix> es((hamiltonian + hamiltonian.adjoint()) * 0.5);
    energies = es.eigenvalues();
    basis = es.eigenvectors();
  }
  double e0 = energies.minCoeff();
  RealVector w = (-beta * (energies.array() - e0)).exp();
  w /= w.sum();
  return from_spectrum(w, basis);
}

Matrix QuantumState::power(double p) const { return spectral_power(u_, mu_, p); }

bool QuantumState::is_maximally_mixed(double tol) const {
  return (mu_.array() - 1.0 / dim()).abs().maxCoeff() <= tol;
}

cplx weighted_inner(const QuantumState& sigma, double s, const Matrix& x, const Matrix& y) {
  if (s < 0.0 || s > 1.0) throw InputError("weighted_inner: s must lie in [0,1]");
  const int n = sigma.dim();
  if (x.rows() != n || x.cols() != n || y.rows() != n || y.cols() != n)
    throw InputError("weighted_inner: dimension mismatch");
  Matrix a = sigma.power(s);
  Matrix b = sigma.power(1.0 - s);
  return (a * x.adjoint() * b * y).trace();
}

double kms_norm(const QuantumState& sigma, const Matrix& x) {
  return (sigma.quarter() * x * sigma.quarter()).norm();
}

// ---- KmsFrame -------------------------------------------------------------

KmsFrame::KmsFrame(QuantumState state, double s) : state_(std::move(state)), s_(s), n_(state_.dim()) {
  if (s < 0.0 || s > 1.0) throw InputError("frame: weight s must lie in [0,1]");
  const RealVector& mu = state_.eigenvalues();
  left_.resize(n_, n_);
  for (int r = 0; r < n_; ++r)
    for (int c = 0; c < n_; ++c) left_(r, c) = std::pow(mu[r], 0.5 * (1.0 - s_)) * std::pow(mu[c], 0.5 * s_);

  // Householder reflection exchanging e_0 and sqrt(mu).
  RealVector v = mu.array().sqrt();
  RealVector w = -v;
  w[0] += 1.0;
  double wn = w.squaredNorm();
  q_ = RealMatrix::Identity(n_, n_);
  if (wn > 1e-300) q_ -= 2.0 * w * w.transpose() / wn;
}

Vector KmsFrame::coords(const Matrix& x) const {
  if (x.rows() != n_ || x.cols() != n_) throw InputError("frame: operator dimension mismatch");
  const Matrix& u = state_.eigenvectors();
  Matrix w = (u.adjoint() * x * u).cwiseProduct(left_.cast<cplx>());
  Vector c(n_ * n_);
  for (int r = 0; r < n_; ++r)
    for (int k = 0; k < n_; ++k) c[r * n_ + k] = w(r, k);
  Vector d = w.diagonal();
  Vector rd = q_.transpose().cast<cplx>() * d;
  for (int r = 0; r < n_; ++r) c[r * n_ + r] = rd[r];
  return c;
}

Matrix KmsFrame::op(const Vector& c) const {
  if (c.size() != n_ * n_) throw InputError("frame: coordinate vector has wrong length");
  Matrix w(n_, n_);
  for (int r = 0; r < n_; ++r)
    for (int k = 0; k < n_; ++k) w(r, k) = c[r * n_ + k];
  Vector rd(n_);
  for (int r = 0; r < n_; ++r) rd[r] = c[r * n_ + r];
  Vector d = q_.cast<cplx>() * rd;
  for (int r = 0; r < n_; ++r) w(r, r) = d[r];
  Matrix y = w.cwiseQuotient(left_.cast<cplx>());
  const Matrix& u = state_.eigenvectors();
  return u * y * u.adjoint();
}

Matrix KmsFrame::basis(int k) const {
  Vector e = Vector::Zero(n_ * n_);
  e[k] = 1.0;
  return op(e);
}

Vector KmsFrame::traceless_coords(const Matrix& x) const { return coords(x).tail(n_ * n_ - 1); }

Matrix KmsFrame::traceless_op(const Vector& c) const {
  if (c.size() != n_ * n_ - 1) throw InputError("frame: traceless coordinate vector has wrong length");
  Vector full(n_ * n_);
  full[0] = 0.0;
  full.tail(n_ * n_ - 1) = c;
  return op(full);
}

FramePtr kms_frame(const QuantumState& sigma) { return std::make_shared<const KmsFrame>(sigma, 0.5); }

FramePtr weighted_frame(const QuantumState& sigma, double s) {
  return std::make_shared<const KmsFrame>(sigma, s);
}

// ---- SuperOperator --------------------------------------------------------

Matrix SuperOperator::apply(const Matrix& x) const {
  if (restricted) return frame->traceless_op(matrix * frame->traceless_coords(x));
  return frame->op(matrix * frame->coords(x));
}

SuperOperator superop_matrix(const LinearMap& map, const FramePtr& frame, bool restrict_traceless,
                             bool check_linearity) {
  if (!frame) throw InputError("superop_matrix: missing frame");
  const int n = frame->dim();
  const int m = n * n;
  Matrix full(m, m);
  for (int k = 0; k < m; ++k) {
    Matrix img = map(frame->basis(k));
    if (img.rows() != n || img.cols() != n) throw InputError("superop_matrix: map changes dimension");
    full.col(k) = frame->coords(img);
  }
  if (check_linearity) {
    std::mt19937_64 rng(0x5eed1234u);
    Matrix x = random_complex(n, rng);
    Matrix y = random_complex(n, rng);
    const cplx a(0.7, -0.3), b(-1.1, 0.4);
    Matrix lhs = map(a * x + b * y);
    Matrix rhs = a * map(x) + b * map(y);
    double scale = std::max(1.0, map(x).norm() + map(y).norm());
    if ((lhs - rhs).norm() > 1e-9 * scale) throw InputError("superop_matrix: map is not linear");
    Matrix via = frame->op(full * frame->coords(x));
    if ((via - map(x)).norm() > 1e-9 * scale)
      throw NumericalError("superop_matrix: frame representation does not reproduce the map");
  }
  SuperOperator s{frame, std::move(full), false};
  return restrict_traceless ? restrict_to_traceless(s) : s;
}

SuperOperator restrict_to_traceless(const SuperOperator& s) {
  if (s.restricted) return s;
  const Eigen::Index m = s.matrix.rows() - 1;
  return SuperOperator{s.frame, s.matrix.bottomRightCorner(m, m), true};
}

SuperOperator kms_adjoint(const SuperOperator& s) {
  if (s.frame && s.frame->weight() != 0.5)
    throw InputError("kms_adjoint: frame is not KMS-orthonormal");
  return SuperOperator{s.frame, s.matrix.adjoint(), s.restricted};
}

double op_norm_2to2(const SuperOperator& s) { return s.matrix.size() == 0 ? 0.0 : largest_singular_value(s.matrix); }

double smallest_singular_value(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<Matrix> svd(m);
  const RealVector& sv = svd.singularValues();
  if (m.rows() < m.cols()) return 0.0;
  return sv[sv.size() - 1];
}

double largest_singular_value(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues()[0];
}

double hermitian_defect(const Matrix& m) {
  double scale = m.norm();
  if (scale == 0.0) return 0.0;
  return (m - m.adjoint()).norm() / scale;
}

}  // namespace hypoco
