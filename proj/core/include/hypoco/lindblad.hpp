#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hypoco/operator_core.hpp"

namespace hypoco {

struct Jump {
  double weight = 1.0;
  Matrix op;
};

// (omega_j, L_j) with Delta_sigma(L_j) = e^{-omega_j} L_j.
struct CanonicalPair {
  double omega = 0.0;
  Matrix op;
};

// Heisenberg-picture generator
//   L(X) = alpha i[H,X] + sum_j w_j (L_j^dag X L_j - 1/2 {L_j^dag L_j, X}).
// H is the designated coherent part and alpha its coupling.
class Lindbladian {
 public:
  Lindbladian() = default;
  explicit Lindbladian(int dim);

  int dim() const { return dim_; }
  const Matrix& hamiltonian() const { return hamiltonian_; }
  double coupling() const { return coupling_; }
  const std::vector<Jump>& jumps() const { return jumps_; }
  const std::optional<std::vector<CanonicalPair>>& canonical() const { return canonical_; }

  Matrix apply(const Matrix& x) const;
  // Schrodinger-picture (Hilbert-Schmidt) adjoint.
  Matrix apply_dual(const Matrix& rho) const;
  LinearMap as_map() const;

  Lindbladian coherent_part() const;
  Lindbladian dissipative_part() const;
  Lindbladian with_coupling(double alpha) const;
  bool has_coherent_part() const;
  bool has_dissipative_part() const { return !jumps_.empty(); }
  // Rough size of the generator used to scale absolute tolerances.
  double scale() const;

  friend Lindbladian build_gksl(const Matrix&, std::vector<Jump>);
  friend Lindbladian build_gns_canonical(const QuantumState&, std::vector<CanonicalPair>, const Tolerances&);
  friend Lindbladian combine(const Lindbladian&, const Lindbladian&);

 private:
  int dim_ = 0;
  Matrix hamiltonian_;
  double coupling_ = 1.0;
  std::vector<Jump> jumps_;
  std::optional<std::vector<CanonicalPair>> canonical_;
};

Lindbladian build_gksl(const Matrix& hamiltonian, std::vector<Jump> jumps);
Lindbladian build_gns_canonical(const QuantumState& sigma, std::vector<CanonicalPair> pairs,
                                const Tolerances& tol = {});
// Coherent part of `lh` together with the jumps of `ld`.
Lindbladian combine(const Lindbladian& lh, const Lindbladian& ld);

double check_invariance(const Lindbladian& l, const QuantumState& sigma);

// Full (unrestricted) matrix of L in the KMS frame.
SuperOperator kms_matrix(const Lindbladian& l, const FramePtr& frame);

enum class Classification { Coercive, Hypocoercive, NonPrimitive };
std::string to_string(Classification c);

struct StructureReport {
  bool invariant_state_ok = false;
  double invariance_residual = 0.0;
  bool kms_db = false;
  double kms_defect = 0.0;
  bool gns_db = false;
  double gns_defect = 0.0;
  bool standard_dbc = false;
  double standard_dbc_residual = 0.0;
  Matrix recovered_k;
  bool primitive = false;
  int commutant_dim = 0;
  int kernel_dim_ld = 0;
  Classification classification = Classification::NonPrimitive;
};

StructureReport structure_report(const Lindbladian& l, const QuantumState& sigma, const Tolerances& tol = {});

// Dimension of the joint commutant {H, L_j, L_j^dag}' (H only if its coupling is nonzero).
int commutant_dimension(const Lindbladian& l, double rel_tol = 1e-9);

// Decomposition of the traceless space into ker(L^D|h) and its complement.
// Bases hold traceless-frame coordinate vectors as columns.
struct SpaceSplit {
  FramePtr frame;
  Matrix basis0;
  Matrix basis_plus;
  RealVector energies_plus;  // eigenvalues of -M_D on h_+, ascending
  double norm_ld = 0.0;      // ||L^D||_{2->2}
  SuperOperator pi0;
  SuperOperator pi_plus;
  int dim0() const { return static_cast<int>(basis0.cols()); }
  int dim_plus() const { return static_cast<int>(basis_plus.cols()); }
};

SpaceSplit kernel_projection(const Lindbladian& ld, const QuantumState& sigma, const Tolerances& tol = {});

}  // namespace hypoco
