#pragma once

#include <optional>
#include <vector>

#include "hypoco/lindblad.hpp"

namespace hypoco {

struct AssumptionCheck {
  bool ok = false;
  double defect = 0.0;     // ||Pi0 M_H Pi0||
  double norm_mh = 0.0;    // ||M_H|| on h
  int dim0 = 0;
};

AssumptionCheck check_assumption(const Lindbladian& lh, const SpaceSplit& split, const Tolerances& tol = {});

struct StructuralConstants {
  double lambda_D = 0.0;
  double s_H = 0.0;
  double norm_LD = 0.0;
  double norm_LH_plus = 0.0;
  double norm_sqrt_LD = 0.0;  // ||(-L^D)^{1/2}||
};

StructuralConstants structural_constants(const Lindbladian& lh, const Lindbladian& ld, const QuantumState& sigma,
                                         const Tolerances& tol = {});

struct CConstants {
  double C1 = 0.0;
  double C2 = 0.0;
};

CConstants c_constants(const StructuralConstants& sc, double t, double beta = 0.0);
// lambda_D / (C1^2 + lambda_D C2^2) at beta = 0
double rate_at(const StructuralConstants& sc, double t);
// lambda_D s_H^2 / ((28 s_H + 5 sqrt2 ||L^H Pi_+||)^2 + 72 lambda_D ||L^D||)
double closed_form_rate(const StructuralConstants& sc);

struct RateCertificate {
  double T = 0.0;
  double beta = 0.0;
  double C1 = 0.0;
  double C2 = 0.0;
  double nu = 0.0;
  double prefactor = 1.0;  // C_T = exp(nu T)
  StructuralConstants constants;
  bool assumption_ok = false;
  double assumption_defect = 0.0;
  int dim_kernel = 0;
  bool default_T = false;
  std::optional<double> nu_closed_form;         // only for T = 3/s_H
  std::optional<double> prefactor_closed_form;  // exp(nu_closed_form T)
};

RateCertificate certify(const Lindbladian& lh, const Lindbladian& ld, const QuantumState& sigma,
                        std::optional<double> t = std::nullopt, const Tolerances& tol = {});
RateCertificate certificate_from_constants(const StructuralConstants& sc, std::optional<double> t);

struct TOptimum {
  double T = 0.0;
  double nu = 0.0;
};

// Log-grid scan over [lo, hi] followed by golden-section refinement in log T.
TOptimum optimize_T(const StructuralConstants& sc, double lo, double hi, int points = 60, int iterations = 40);
TOptimum optimize_T(const StructuralConstants& sc);

// Rate bound for alpha L^H + L^D and for L^H + gamma L^D at fixed T.
double alpha_bound(const StructuralConstants& sc, double t, double alpha);
double gamma_bound(const StructuralConstants& sc, double t, double gamma);

struct ScalingCurves {
  double T = 0.0;
  std::vector<double> alphas, alpha_bounds;
  double alpha_limit = 0.0;  // lambda_D / C1^2
  std::vector<double> gammas, gamma_bounds;
  double gamma_star = 0.0;        // C1 / (sqrt(lambda_D) C2)
  double gamma_star_value = 0.0;  // bound at gamma_star = sqrt(lambda_D) / (2 C1 C2)
  size_t gamma_grid_argmax = 0;
};

ScalingCurves alpha_gamma_scaling(const StructuralConstants& sc, const std::vector<double>& alphas,
                                  const std::vector<double>& gammas, std::optional<double> t = std::nullopt);

struct DmsComparison {
  double eta = 0.0;
  double C_M = 0.0;
  double epsilon = 0.0;
  double nu_dms = 0.0;
  double C_dms = 0.0;
};

DmsComparison dms_compare(const StructuralConstants& sc, std::optional<double> eta = std::nullopt);

}  // namespace hypoco
