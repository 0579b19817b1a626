#include "hypoco/lindblad.hpp"

#include <algorithm>
#include <cmath>

namespace hypoco {

Lindbladian::Lindbladian(int dim) : dim_(dim), hamiltonian_(Matrix::Zero(dim, dim)) {
  if (dim < 1) throw InputError("Lindbladian: dimension must be positive");
}

Matrix Lindbladian::apply(const Matrix& x) const {
  Matrix out = Matrix::Zero(dim_, dim_);
  if (coupling_ != 0.0) out += (coupling_ * kI) * commutator(hamiltonian_, x);
  for (const Jump& j : jumps_) {
    Matrix ld = j.op.adjoint();
    Matrix ldl = ld * j.op;
    out += j.weight * (ld * x * j.op - 0.5 * (ldl * x + x * ldl));
  }
  return out;
}

Matrix Lindbladian::apply_dual(const Matrix& rho) const {
  Matrix out = Matrix::Zero(dim_, dim_);
  if (coupling_ != 0.0) out -= (coupling_ * kI) * commutator(hamiltonian_, rho);
  for (const Jump& j : jumps_) {
    Matrix ld = j.op.adjoint();
    Matrix ldl = ld * j.op;
    out += j.weight * (j.op * rho * ld - 0.5 * (ldl * rho + rho * ldl));
  }
  return out;
}

LinearMap Lindbladian::as_map() const {
  return [self = *this](const Matrix& x) { return self.apply(x); };
}

Lindbladian Lindbladian::coherent_part() const {
  Lindbladian l(dim_);
  l.hamiltonian_ = hamiltonian_;
  l.coupling_ = coupling_;
  return l;
}

Lindbladian Lindbladian::dissipative_part() const {
  Lindbladian l(dim_);
  l.jumps_ = jumps_;
  l.canonical_ = canonical_;
  return l;
}

Lindbladian Lindbladian::with_coupling(double alpha) const {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw InputError("coupling must be finite and >= 0");
  Lindbladian l = *this;
  l.coupling_ = alpha;
  return l;
}

bool Lindbladian::has_coherent_part() const { return coupling_ != 0.0 && hamiltonian_.norm() > 0.0; }

double Lindbladian::scale() const {
  double s = std::abs(coupling_) * spectral_norm(hamiltonian_);
  for (const Jump& j : jumps_) {
    double n = spectral_norm(j.op);
    s += j.weight * n * n;
  }
  return s;
}

Lindbladian build_gksl(const Matrix& hamiltonian, std::vector<Jump> jumps) {
  if (hamiltonian.rows() != hamiltonian.cols() || hamiltonian.rows() == 0)
    throw InputError("build_gksl: Hamiltonian must be a non-empty square matrix");
  if (!hamiltonian.allFinite()) throw InputError("build_gksl: non-finite Hamiltonian");
  if (!is_hermitian(hamiltonian, 1e-10)) throw InputError("build_gksl: Hamiltonian is not Hermitian");
  const int n = static_cast<int>(hamiltonian.rows());
  Lindbladian l(n);
  l.hamiltonian_ = (hamiltonian + hamiltonian.adjoint()) * 0.5;
  for (size_t k = 0; k < jumps.size(); ++k) {
    const Jump& j = jumps[k];
    if (j.op.rows() != n || j.op.cols() != n)
      throw InputError("build_gksl: jump " + std::to_string(k) + " has wrong dimension");
    if (!(j.weight > 0.0) || !std::isfinite(j.weight))
      throw InputError("build_gksl: jump " + std::to_string(k) + " needs a positive weight");
    if (!j.op.allFinite()) throw InputError("build_gksl: jump " + std::to_string(k) + " is not finite");
  }
  l.jumps_ = std::move(jumps);
  return l;
}

Lindbladian build_gns_canonical(const QuantumState& sigma, std::vector<CanonicalPair> pairs, const Tolerances& tol) {
  const int n = sigma.dim();
  const Matrix& s = sigma.matrix();
  Matrix s_inv = sigma.power(-1.0);
  for (size_t j = 0; j < pairs.size(); ++j) {
    const CanonicalPair& p = pairs[j];
    const std::string tag = "build_gns_canonical: pair " + std::to_string(j);
    if (p.op.rows() != n || p.op.cols() != n) throw InputError(tag + " has wrong dimension");
    if (!std::isfinite(p.omega) || !p.op.allFinite()) throw InputError(tag + " is not finite");
    double norm = p.op.norm();
    if (norm == 0.0) throw InputError(tag + " is zero");
    Matrix mod = s * p.op * s_inv;
    if ((mod - std::exp(-p.omega) * p.op).norm() > tol.modular * norm)
      throw InputError(tag + " is not a modular eigenvector with eigenvalue e^{-omega}");
    if (std::abs(p.op.trace()) > tol.modular * norm) throw InputError(tag + " is not traceless");
  }
  for (size_t j = 0; j < pairs.size(); ++j)
    for (size_t k = j + 1; k < pairs.size(); ++k) {
      cplx ip = (pairs[j].op.adjoint() * pairs[k].op).trace();
      if (std::abs(ip) > tol.modular * pairs[j].op.norm() * pairs[k].op.norm())
        throw InputError("build_gns_canonical: pairs " + std::to_string(j) + " and " + std::to_string(k) +
                         " are not Hilbert-Schmidt orthogonal");
    }
  for (size_t j = 0; j < pairs.size(); ++j) {
    Matrix adj = pairs[j].op.adjoint();
    bool found = false;
    for (size_t k = 0; k < pairs.size() && !found; ++k)
      found = (pairs[k].op - adj).norm() <= tol.modular * adj.norm() &&
              std::abs(pairs[k].omega + pairs[j].omega) <= tol.modular * std::max(1.0, std::abs(pairs[j].omega));
    if (!found) throw InputError("build_gns_canonical: adjoint of pair " + std::to_string(j) + " is missing");
  }
  // Summing each pair with its partner gives the GKSL weights 2 e^{-omega_j/2}.
  std::vector<Jump> jumps;
  jumps.reserve(pairs.size());
  for (const CanonicalPair& p : pairs) jumps.push_back({2.0 * std::exp(-0.5 * p.omega), p.op});
  Lindbladian l = build_gksl(Matrix::Zero(n, n), std::move(jumps));
  l.canonical_ = std::move(pairs);
  return l;
}

Lindbladian combine(const Lindbladian& lh, const Lindbladian& ld) {
  if (lh.dim() != ld.dim()) throw InputError("combine: dimension mismatch");
  Lindbladian l = ld.dissipative_part();
  l.hamiltonian_ = lh.hamiltonian_;
  l.coupling_ = lh.coupling_;
  return l;
}

double check_invariance(const Lindbladian& l, const QuantumState& sigma) {
  if (l.dim() != sigma.dim()) throw InputError("check_invariance: dimension mismatch");
  return l.apply_dual(sigma.matrix()).norm();
}

SuperOperator kms_matrix(const Lindbladian& l, const FramePtr& frame) {
  if (l.dim() != frame->dim()) throw InputError("kms_matrix: dimension mismatch");
  return superop_matrix(l.as_map(), frame, false, false);
}

std::string to_string(Classification c) {
  switch (c) {
    case Classification::Coercive: return "coercive";
    case Classification::Hypocoercive: return "hypocoercive";
    case Classification::NonPrimitive: return "non-primitive";
  }
  return "unknown";
}

namespace {

Matrix commutator_vec(const Matrix& a) {
  const Eigen::Index n = a.rows();
  Matrix id = Matrix::Identity(n, n);
  return kron(id, a) - kron(a.transpose(), id);
}

RealVector singular_values(const Matrix& m) {
  if (m.rows() > 2 * m.cols()) {
    Eigen::HouseholderQR<Matrix> qr(m);
    Matrix r = qr.matrixQR().topRows(m.cols()).triangularView<Eigen::Upper>();
    return Eigen::BDCSVD<Matrix>(r).singularValues();
  }
  return Eigen::BDCSVD<Matrix>(m).singularValues();
}

// Zero-mode count of a frame matrix: eigenvalues for Hermitian input, singular values otherwise.
int null_count(const Matrix& m, double rel_tol, double herm_tol) {
  if (m.size() == 0) return 0;
  RealVector vals;
  if (hermitian_defect(m) <= herm_tol) {
    Eigen::SelfAdjointEigenSolver<Matrix> es((m + m.adjoint()) * 0.5, Eigen::EigenvaluesOnly);
    vals = es.eigenvalues().cwiseAbs();
  } else {
    vals = Eigen::BDCSVD<Matrix>(m).singularValues();
  }
  double top = vals.maxCoeff();
  if (top == 0.0) return static_cast<int>(vals.size());
  return static_cast<int>((vals.array() <= rel_tol * top).count());
}

}  // namespace

int commutant_dimension(const Lindbladian& l, double rel_tol) {
  const int n = l.dim();
  std::vector<Matrix> gens;
  if (l.has_coherent_part()) gens.push_back(l.hamiltonian());
  for (const Jump& j : l.jumps()) {
    gens.push_back(j.op);
    if ((j.op - j.op.adjoint()).norm() > 1e-14 * j.op.norm()) gens.push_back(j.op.adjoint());
  }
  if (gens.empty()) return n * n;
  const int m = n * n;
  Matrix stacked(static_cast<Eigen::Index>(gens.size()) * m, m);
  for (size_t g = 0; g < gens.size(); ++g) stacked.middleRows(static_cast<Eigen::Index>(g) * m, m) = commutator_vec(gens[g]);
  RealVector sv = singular_values(stacked);
  double top = sv.size() ? sv[0] : 0.0;
  if (top == 0.0) return m;
  int rank = static_cast<int>((sv.array() > rel_tol * top).count());
  return m - rank;
}

StructureReport structure_report(const Lindbladian& l, const QuantumState& sigma, const Tolerances& tol) {
  if (l.dim() != sigma.dim()) throw InputError("structure_report: dimension mismatch");
  StructureReport rep;
  rep.invariance_residual = check_invariance(l, sigma);
  rep.invariant_state_ok = rep.invariance_residual <= tol.invariance * std::max(1.0, l.scale());
  if (!rep.invariant_state_ok)
    throw InputError("structure_report: sigma is not invariant (residual " + std::to_string(rep.invariance_residual) + ")");

  const int n = l.dim();
  FramePtr frame = kms_frame(sigma);
  SuperOperator mk = kms_matrix(l, frame);
  rep.kms_defect = hermitian_defect(mk.matrix);
  rep.kms_db = rep.kms_defect < tol.detailed_balance;

  FramePtr gframe = weighted_frame(sigma, 1.0);
  SuperOperator mg = superop_matrix(l.as_map(), gframe, false, false);
  rep.gns_defect = hermitian_defect(mg.matrix);
  rep.gns_db = rep.gns_defect < tol.detailed_balance;

  // L - L* = 2i[K,.]: the normal operator of K -> {[K, e_ab]} is 2N on traceless K,
  // so the least-squares K is (1/2N) sum_ab [T_ab, e_ba] with T_ab = (L - L*)(e_ab)/2i,
  // projected to Hermitian traceless matrices.
  Matrix anti = mk.matrix - mk.matrix.adjoint();
  Matrix k = Matrix::Zero(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      Matrix eab = matrix_unit(n, a, b);
      Matrix t = frame->op(anti * frame->coords(eab)) / (2.0 * kI);
      k += commutator(t, matrix_unit(n, b, a));
    }
  k /= 2.0 * n;
  k = (k + k.adjoint()) * 0.5;
  k -= (k.trace() / static_cast<double>(n)) * Matrix::Identity(n, n);
  Matrix kk = k;
  SuperOperator ck = superop_matrix([kk](const Matrix& x) { return commutator(kk, x); }, frame, false, false);
  double scale = mk.matrix.norm();
  double resid = (anti - 2.0 * kI * ck.matrix).norm();
  rep.standard_dbc_residual = scale > 0.0 ? resid / scale : resid;
  rep.standard_dbc = rep.standard_dbc_residual < tol.standard_dbc;
  rep.recovered_k = k;

  rep.commutant_dim = commutant_dimension(l, tol.commutant);
  rep.primitive = rep.commutant_dim == 1;

  SuperOperator md = kms_matrix(l.dissipative_part(), frame);
  rep.kernel_dim_ld = null_count(md.matrix, tol.kernel, tol.detailed_balance);

  if (!rep.primitive) rep.classification = Classification::NonPrimitive;
  else if (rep.kernel_dim_ld == 1) rep.classification = Classification::Coercive;
  else rep.classification = Classification::Hypocoercive;
  return rep;
}

SpaceSplit kernel_projection(const Lindbladian& ld, const QuantumState& sigma, const Tolerances& tol) {
  if (ld.dim() != sigma.dim()) throw InputError("kernel_projection: dimension mismatch");
  FramePtr frame = kms_frame(sigma);
  SuperOperator md = restrict_to_traceless(kms_matrix(ld.dissipative_part(), frame));
  if (hermitian_defect(md.matrix) > tol.detailed_balance)
    throw InputError("kernel_projection: L^D is not KMS detailed balanced");
  Matrix neg = -(md.matrix + md.matrix.adjoint()) * 0.5;
  Eigen::SelfAdjointEigenSolver<Matrix> es(neg);
  if (es.info() != Eigen::Success) throw NumericalError("kernel_projection: eigendecomposition failed");
  const RealVector& ev = es.eigenvalues();
  const Eigen::Index m = ev.size();
  double top = m ? ev.cwiseAbs().maxCoeff() : 0.0;
  double thr = tol.kernel * top;

  SpaceSplit sp;
  sp.frame = frame;
  sp.norm_ld = top;
  std::vector<Eigen::Index> zero, plus;
  for (Eigen::Index i = 0; i < m; ++i) (std::abs(ev[i]) <= thr ? zero : plus).push_back(i);
  sp.basis0.resize(m, static_cast<Eigen::Index>(zero.size()));
  sp.basis_plus.resize(m, static_cast<Eigen::Index>(plus.size()));
  sp.energies_plus.resize(static_cast<Eigen::Index>(plus.size()));
  for (size_t c = 0; c < zero.size(); ++c) sp.basis0.col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(zero[c]);
  for (size_t c = 0; c < plus.size(); ++c) {
    sp.basis_plus.col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(plus[c]);
    sp.energies_plus[static_cast<Eigen::Index>(c)] = ev[plus[c]];
  }
  Matrix p0 = sp.basis0 * sp.basis0.adjoint();
  if (zero.empty()) p0 = Matrix::Zero(m, m);
  sp.pi0 = SuperOperator{frame, p0, true};
  sp.pi_plus = SuperOperator{frame, Matrix::Identity(m, m) - p0, true};
  return sp;
}

}  // namespace hypoco
