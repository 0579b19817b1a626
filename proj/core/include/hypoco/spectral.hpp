#pragma once

#include <optional>
#include <vector>

#include "hypoco/lindblad.hpp"

namespace hypoco {

struct GapReport {
  double spectral_gap = 0.0;             // min Re spec(-L|h)
  std::vector<cplx> attaining;           // eigenvalues of L|h with real part -gap
  double singular_gap = 0.0;             // smallest singular value of L|h
  double symmetrized_gap = 0.0;          // lambda_min(-(M + M^dag)/2)
  std::optional<int> hypoco_index;
  std::vector<cplx> eigenvalues;         // spectrum of L|h
  // Lower bound on the eps-relaxation time, log(1/eps)/gap.
  double relax_lower(double eps) const;
};

GapReport spectral_gap(const Lindbladian& l, const QuantumState& sigma, const Tolerances& tol = {});

struct BohrBlock {
  double frequency = 0.0;
  Matrix basis;            // orthonormal traceless-frame coordinates of B_nu within h
  double lambda_nu = -1.0; // unset until lambda_nu_table
  Matrix minimizers;       // coordinates spanning M_nu
};

std::vector<BohrBlock> bohr_decompose(const Matrix& hamiltonian, const KmsFrame& frame, const Tolerances& tol = {});
std::vector<BohrBlock> lambda_nu_table(const Lindbladian& ld, std::vector<BohrBlock> blocks,
                                       const FramePtr& frame, const Tolerances& tol = {});

// inf_nu lambda_nu for the family alpha L^H + L^D.
double large_alpha_limit(const Lindbladian& lh, const Lindbladian& ld, const QuantumState& sigma,
                         const Tolerances& tol = {});

struct GapCurvePoint {
  double alpha = 0.0;
  double gap = 0.0;
  double limit = 0.0;
  double singular_gap = 0.0;
};

std::vector<GapCurvePoint> gap_curve(const Lindbladian& lh, const Lindbladian& ld, const QuantumState& sigma,
                                     const std::vector<double>& alphas, const Tolerances& tol = {});

std::optional<int> hypoco_index(const Lindbladian& lh, const Lindbladian& ld, const QuantumState& sigma, int j_max,
                                const Tolerances& tol = {});

// 1/nu + T >= 1/s(L) - 1e-9
bool singular_relaxation_check(double nu, double t, const Lindbladian& l, const QuantumState& sigma);

// Helpers shared with other modules.
Matrix restricted_matrix(const Lindbladian& l, const FramePtr& frame);
double gap_of_matrix(const Matrix& m);

}  // namespace hypoco
