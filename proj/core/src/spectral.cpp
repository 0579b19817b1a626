#include "hypoco/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hypoco {

Matrix restricted_matrix(const Lindbladian& l, const FramePtr& frame) {
  return restrict_to_traceless(kms_matrix(l, frame)).matrix;
}

namespace {

Eigen::VectorXcd eigenvalues_of(const Matrix& m) {
  if (m.size() == 0) return Eigen::VectorXcd();
  Eigen::ComplexEigenSolver<Matrix> es(m, false);
  if (es.info() != Eigen::Success) throw NumericalError("eigensolver did not converge");
  return es.eigenvalues();
}

void require_invariant(const Lindbladian& l, const QuantumState& sigma, const Tolerances& tol) {
  double r = check_invariance(l, sigma);
  if (r > tol.invariance * std::max(1.0, l.scale()))
    throw InputError("sigma is not invariant (residual " + std::to_string(r) + ")");
}

Matrix hermitian_part(const Matrix& m) { return (m + m.adjoint()) * 0.5; }

double lambda_min(const Matrix& h) {
  if (h.size() == 0) return std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(h), Eigen::EigenvaluesOnly);
  return es.eigenvalues()[0];
}

std::optional<int> index_of(const Matrix& mh, const Matrix& md, int j_max, double rel) {
  const Eigen::Index m = mh.rows();
  if (m == 0) return 0;
  Matrix a = kI * mh;
  Matrix p = -hermitian_part(md);
  Matrix power = Matrix::Identity(m, m);
  Matrix sum = Matrix::Zero(m, m);
  for (int j = 0; j <= j_max; ++j) {
    // (iM_H)^j is Hermitian when [H, sigma] = 0; the adjoint keeps each term PSD otherwise.
    sum += power.adjoint() * p * power;
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(sum), Eigen::EigenvaluesOnly);
    const RealVector& ev = es.eigenvalues();
    double top = ev.cwiseAbs().maxCoeff();
    if (top > 0.0 && ev[0] > rel * top) return j;
    power = a * power;
  }
  return std::nullopt;
}

double limit_value(const Lindbladian& lh, const Lindbladian& ld, const QuantumState& sigma, const Tolerances& tol) {
  FramePtr frame = kms_frame(sigma);
  Matrix h = lh.has_coherent_part() ? Matrix(lh.hamiltonian()) : Matrix(Matrix::Zero(sigma.dim(), sigma.dim()));
  auto blocks = lambda_nu_table(ld, bohr_decompose(h, *frame, tol), frame, tol);
  double best = std::numeric_limits<double>::infinity();
  for (const BohrBlock& b : blocks) best = std::min(best, b.lambda_nu);
  return best;
}

}  // namespace

double gap_of_matrix(const Matrix& m) {
  Eigen::VectorXcd ev = eigenvalues_of(m);
  if (ev.size() == 0) return std::numeric_limits<double>::infinity();
  return -ev.real().maxCoeff();
}

double GapReport::relax_lower(double eps) const {
  if (!(eps > 0.0 && eps < 1.0)) throw InputError("relax_lower: eps must lie in (0,1)");
  return std::log(1.0 / eps) / spectral_gap;
}

GapReport spectral_gap(const Lindbladian& l, const QuantumState& sigma, const Tolerances& tol) {
  require_invariant(l, sigma, tol);
  FramePtr frame = kms_frame(sigma);
  Matrix m = restricted_matrix(l, frame);
  GapReport rep;
  Eigen::VectorXcd ev = eigenvalues_of(m);
  rep.eigenvalues.assign(ev.data(), ev.data() + ev.size());
  std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end(), [](cplx a, cplx b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() < b.imag();
  });
  rep.spectral_gap = ev.size() ? -ev.real().maxCoeff() : 0.0;
  double scale = std::max(1.0, ev.size() ? ev.cwiseAbs().maxCoeff() : 1.0);
  for (cplx z : rep.eigenvalues)
    if (std::abs(z.real() + rep.spectral_gap) <= 1e-8 * scale) rep.attaining.push_back(z);
  rep.singular_gap = smallest_singular_value(m);
  rep.symmetrized_gap = lambda_min(-m);
  if (rep.spectral_gap > 1e-12 * scale)
    rep.hypoco_index = index_of(restricted_matrix(l.coherent_part(), frame),
                                restricted_matrix(l.dissipative_part(), frame), static_cast<int>(m.rows()),
                                tol.hypoco_index);
  return rep;
}

std::vector<BohrBlock> bohr_decompose(const Matrix& hamiltonian, const KmsFrame& frame, const Tolerances& tol) {
  const int n = frame.dim();
  if (hamiltonian.rows() != n || hamiltonian.cols() != n) throw InputError("bohr_decompose: dimension mismatch");
  const Matrix& s = frame.state().matrix();
  double hn = spectral_norm(hamiltonian);
  if (commutator(hamiltonian, s).norm() > 1e-10 * std::max(1.0, hn))
    throw InputError("bohr_decompose: [H, sigma] != 0");
  const int m = n * n - 1;
  Matrix c(m, m);
  for (int k = 0; k < m; ++k) {
    Vector e = Vector::Zero(m);
    e[k] = 1.0;
    c.col(k) = frame.traceless_coords(commutator(hamiltonian, frame.traceless_op(e)));
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(c));
  if (es.info() != Eigen::Success) throw NumericalError("bohr_decompose: eigendecomposition failed");
  const RealVector& nu = es.eigenvalues();
  double thr = std::max(tol.bohr_cluster * hn, 1e-12);
  std::vector<BohrBlock> blocks;
  Eigen::Index start = 0;
  for (Eigen::Index i = 1; i <= m; ++i) {
    if (i == m || nu[i] - nu[i - 1] > thr) {
      BohrBlock b;
      b.frequency = nu.segment(start, i - start).mean();
      b.basis = es.eigenvectors().middleCols(start, i - start);
      blocks.push_back(std::move(b));
      start = i;
    }
  }
  return blocks;
}

std::vector<BohrBlock> lambda_nu_table(const Lindbladian& ld, std::vector<BohrBlock> blocks, const FramePtr& frame,
                                       const Tolerances& tol) {
  Matrix md = restricted_matrix(ld.dissipative_part(), frame);
  if (hermitian_defect(md) > tol.detailed_balance)
    throw InputError("lambda_nu_table: L^D is not KMS detailed balanced");
  Matrix p = -hermitian_part(md);
  double pn = p.size() ? largest_singular_value(p) : 0.0;
  for (BohrBlock& b : blocks) {
    const Eigen::Index d = b.basis.cols();
    if ((b.basis.adjoint() * b.basis - Matrix::Identity(d, d)).norm() > 1e-8)
      throw InputError("lambda_nu_table: block basis is not orthonormal");
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(b.basis.adjoint() * p * b.basis));
    const RealVector& ev = es.eigenvalues();
    b.lambda_nu = ev[0];
    Eigen::Index k = 0;
    while (k < ev.size() && ev[k] <= ev[0] + 1e-9 * std::max(1.0, pn)) ++k;
    b.minimizers = b.basis * es.eigenvectors().leftCols(k);
  }
  return blocks;
}

double large_alpha_limit(const Lindbladian& lh, const Lindbladian& ld, const QuantumState& sigma,
                         const Tolerances& tol) {
  double v = limit_value(lh, ld, sigma, tol);
  if (!(v > 1e-10)) throw AssumptionError("large_alpha_limit: family is not primitive (inf lambda_nu = 0)");
  return v;
}

std::vector<GapCurvePoint> gap_curve(const Lindbladian& lh, const Lindbladian& ld, const QuantumState& sigma,
                                     const std::vector<double>& alphas, const Tolerances& tol) {
  FramePtr frame = kms_frame(sigma);
  double limit = limit_value(lh, ld, sigma, tol);
  Matrix mh = restricted_matrix(lh.coherent_part(), frame);
  Matrix md = restricted_matrix(ld.dissipative_part(), frame);
  std::vector<GapCurvePoint> out;
  out.reserve(alphas.size());
  for (double a : alphas) {
    if (!(a >= 0.0) || !std::isfinite(a)) throw InputError("gap_curve: alpha must be finite and >= 0");
    Matrix m = a * mh + md;
    out.push_back({a, gap_of_matrix(m), limit, smallest_singular_value(m)});
  }
  return out;
}

std::optional<int> hypoco_index(const Lindbladian& lh, const Lindbladian& ld, const QuantumState& sigma, int j_max,
                                const Tolerances& tol) {
  FramePtr frame = kms_frame(sigma);
  return index_of(restricted_matrix(lh.coherent_part(), frame), restricted_matrix(ld.dissipative_part(), frame),
                  j_max, tol.hypoco_index);
}

bool singular_relaxation_check(double nu, double t, const Lindbladian& l, const QuantumState& sigma) {
  if (!(nu > 0.0)) return true;
  FramePtr frame = kms_frame(sigma);
  double s = smallest_singular_value(restricted_matrix(l, frame));
  if (!(s > 0.0)) return false;
  return 1.0 / nu + t >= 1.0 / s - 1e-9;
}

}  // namespace hypoco
