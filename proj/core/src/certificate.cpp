#include "hypoco/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hypoco/spectral.hpp"

namespace hypoco {

AssumptionCheck check_assumption(const Lindbladian& lh, const SpaceSplit& split, const Tolerances& tol) {
  AssumptionCheck a;
  Matrix mh = restricted_matrix(lh.coherent_part(), split.frame);
  a.norm_mh = mh.size() ? largest_singular_value(mh) : 0.0;
  a.dim0 = split.dim0();
  if (a.dim0 > 0) a.defect = largest_singular_value(split.basis0.adjoint() * mh * split.basis0);
  a.ok = a.dim0 >= 1 && a.defect <= tol.assumption * a.norm_mh;
  return a;
}

StructuralConstants structural_constants(const Lindbladian& lh, const Lindbladian& ld, const QuantumState& sigma,
                                         const Tolerances& tol) {
  SpaceSplit split = kernel_projection(ld, sigma, tol);
  AssumptionCheck a = check_assumption(lh, split, tol);
  if (a.dim0 == 0) throw AssumptionError("ker(L^D|h) is trivial: the dissipative part is coercive");
  if (!a.ok)
    throw AssumptionError("Pi0 L^H Pi0 != 0 (defect " + std::to_string(a.defect) + ")");
  if (split.dim_plus() == 0) throw AssumptionError("L^D vanishes on h");
  Matrix mh = restricted_matrix(lh.coherent_part(), split.frame);
  StructuralConstants sc;
  sc.lambda_D = split.energies_plus[0];
  Matrix cross = split.basis_plus.adjoint() * mh * split.basis0;
  sc.s_H = smallest_singular_value(cross);
  if (!(sc.s_H >= 1e-10))
    throw AssumptionError("s_H vanishes: L^H_{+0} is not injective on ker(L^D|h), the model is not primitive");
  sc.norm_LD = split.norm_ld;
  sc.norm_LH_plus = largest_singular_value(mh * split.basis_plus);
  sc.norm_sqrt_LD = std::sqrt(split.energies_plus.maxCoeff());
  return sc;
}

CConstants c_constants(const StructuralConstants& sc, double t, double beta) {
  if (!(t > 0.0) || !std::isfinite(t)) throw InputError("c_constants: T must be positive");
  if (!(beta >= 0.0)) throw InputError("c_constants: beta must be >= 0");
  if (!(sc.s_H > 0.0)) throw InputError("c_constants: s_H must be positive");
  const double s = sc.s_H;
  const double pi = std::numbers::pi;
  const double r2 = std::numbers::sqrt2;
  const double st = s * t;
  const double m1 = std::max(6.0 / (s * s * t) + 3.0 / s, t / pi);
  const double m2 = std::max(1.0 / s, t / pi);
  CConstants c;
  c.C1 = r2 + 14.0 + 12.0 * std::sqrt(5.0) / st + 24.0 / (st * st) + r2 * m1 * sc.norm_LH_plus;
  c.C2 = r2 * std::sqrt(beta + sc.norm_sqrt_LD * sc.norm_sqrt_LD) * (m1 + m2);
  return c;
}

double rate_at(const StructuralConstants& sc, double t) {
  CConstants c = c_constants(sc, t, 0.0);
  return sc.lambda_D / (c.C1 * c.C1 + sc.lambda_D * c.C2 * c.C2);
}

double closed_form_rate(const StructuralConstants& sc) {
  double a = 28.0 * sc.s_H + 5.0 * std::numbers::sqrt2 * sc.norm_LH_plus;
  return sc.lambda_D * sc.s_H * sc.s_H / (a * a + 72.0 * sc.lambda_D * sc.norm_LD);
}

RateCertificate certificate_from_constants(const StructuralConstants& sc, std::optional<double> t) {
  RateCertificate cert;
  cert.constants = sc;
  cert.default_T = !t.has_value();
  cert.T = t.value_or(3.0 / sc.s_H);
  CConstants c = c_constants(sc, cert.T, 0.0);
  cert.C1 = c.C1;
  cert.C2 = c.C2;
  cert.nu = sc.lambda_D / (c.C1 * c.C1 + sc.lambda_D * c.C2 * c.C2);
  cert.prefactor = std::exp(cert.nu * cert.T);
  if (cert.default_T) {
    cert.nu_closed_form = closed_form_rate(sc);
    cert.prefactor_closed_form = std::exp(*cert.nu_closed_form * cert.T);
  }
  cert.assumption_ok = true;
  return cert;
}

RateCertificate certify(const Lindbladian& lh, const Lindbladian& ld, const QuantumState& sigma,
                        std::optional<double> t, const Tolerances& tol) {
  if (t && !(*t > 0.0)) throw InputError("certify: T must be positive");
  SpaceSplit split = kernel_projection(ld, sigma, tol);
  AssumptionCheck a = check_assumption(lh, split, tol);
  StructuralConstants sc = structural_constants(lh, ld, sigma, tol);
  RateCertificate cert = certificate_from_constants(sc, t);
  cert.assumption_defect = a.defect;
  cert.dim_kernel = a.dim0;
  return cert;
}

TOptimum optimize_T(const StructuralConstants& sc, double lo, double hi, int points, int iterations) {
  if (!(lo > 0.0) || !(hi > lo) || points < 3) throw InputError("optimize_T: empty or invalid grid");
  const double llo = std::log(lo), lhi = std::log(hi);
  std::vector<double> us(static_cast<size_t>(points)), vs(static_cast<size_t>(points));
  size_t best = 0;
  for (int i = 0; i < points; ++i) {
    us[static_cast<size_t>(i)] = llo + (lhi - llo) * i / (points - 1);
    vs[static_cast<size_t>(i)] = rate_at(sc, std::exp(us[static_cast<size_t>(i)]));
    if (vs[static_cast<size_t>(i)] > vs[best]) best = static_cast<size_t>(i);
  }
  double a = us[best == 0 ? 0 : best - 1];
  double b = us[std::min(best + 1, us.size() - 1)];
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = rate_at(sc, std::exp(c)), fd = rate_at(sc, std::exp(d));
  for (int k = 0; k < iterations; ++k) {
    if (fc > fd) {
      b = d; d = c; fd = fc;
      c = b - g * (b - a);
      fc = rate_at(sc, std::exp(c));
    } else {
      a = c; c = d; fc = fd;
      d = a + g * (b - a);
      fd = rate_at(sc, std::exp(d));
    }
  }
  TOptimum out{std::exp(us[best]), vs[best]};
  double um = 0.5 * (a + b);
  double fm = rate_at(sc, std::exp(um));
  if (fm > out.nu) out = {std::exp(um), fm};
  double t3 = 3.0 / sc.s_H;
  double f3 = rate_at(sc, t3);
  if (f3 > out.nu) out = {t3, f3};
  return out;
}

TOptimum optimize_T(const StructuralConstants& sc) { return optimize_T(sc, 1e-2 / sc.s_H, 1e2 / sc.s_H); }

double alpha_bound(const StructuralConstants& sc, double t, double alpha) {
  if (!(alpha > 0.0)) throw InputError("alpha_bound: alpha must be positive");
  CConstants c = c_constants(sc, t, 0.0);
  return sc.lambda_D / (c.C1 * c.C1 + sc.lambda_D * c.C2 * c.C2 / (alpha * alpha));
}

double gamma_bound(const StructuralConstants& sc, double t, double gamma) {
  if (!(gamma > 0.0)) throw InputError("gamma_bound: gamma must be positive");
  CConstants c = c_constants(sc, t, 0.0);
  return gamma * sc.lambda_D / (c.C1 * c.C1 + gamma * gamma * sc.lambda_D * c.C2 * c.C2);
}

ScalingCurves alpha_gamma_scaling(const StructuralConstants& sc, const std::vector<double>& alphas,
                                  const std::vector<double>& gammas, std::optional<double> t) {
  ScalingCurves out;
  out.T = t.value_or(3.0 / sc.s_H);
  CConstants c = c_constants(sc, out.T, 0.0);
  out.alphas = alphas;
  for (double a : alphas) out.alpha_bounds.push_back(alpha_bound(sc, out.T, a));
  out.alpha_limit = sc.lambda_D / (c.C1 * c.C1);
  out.gammas = gammas;
  for (double g : gammas) out.gamma_bounds.push_back(gamma_bound(sc, out.T, g));
  if (!out.gamma_bounds.empty())
    out.gamma_grid_argmax = static_cast<size_t>(
        std::max_element(out.gamma_bounds.begin(), out.gamma_bounds.end()) - out.gamma_bounds.begin());
  out.gamma_star = c.C1 / (std::sqrt(sc.lambda_D) * c.C2);
  out.gamma_star_value = std::sqrt(sc.lambda_D) / (2.0 * c.C1 * c.C2);
  return out;
}

DmsComparison dms_compare(const StructuralConstants& sc, std::optional<double> eta) {
  DmsComparison d;
  const double s2 = sc.s_H * sc.s_H;
  d.eta = eta.value_or(s2);
  if (!(d.eta > 0.0)) throw InputError("dms_compare: eta must be positive");
  d.C_M = (sc.norm_LH_plus + sc.norm_LD) / (2.0 * std::sqrt(d.eta));
  d.epsilon = 0.5 * std::min(sc.lambda_D * s2 / ((d.eta + s2) * (1.0 + d.C_M) * (1.0 + d.C_M)), 1.0);
  const double e = d.epsilon;
  d.nu_dms = std::min(sc.lambda_D / (4.0 * (1.0 + e)), e * s2 / (3.0 * (1.0 + e) * (d.eta + s2)));
  d.C_dms = std::sqrt((1.0 + e) / (1.0 - e));
  return d;
}

}  // namespace hypoco
