#include "hypoco/evolve.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "hypoco/certificate.hpp"
#include "hypoco/spectral.hpp"

namespace hypoco {

Matrix expm(const Matrix& a) {
  if (a.rows() != a.cols()) throw InputError("expm: matrix must be square");
  if (!a.allFinite()) throw NumericalError("expm: non-finite input");
  const Eigen::Index n = a.rows();
  if (n == 0) return a;
  static const double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
                             129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
                             1323241920.0,        40840800.0,          960960.0,           16380.0,
                             182.0,               1.0};
  const double theta13 = 5.371920351148152;
  double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  int s = 0;
  if (norm1 > theta13) s = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
  if (s > 1000) throw NumericalError("expm: norm too large for scaling and squaring");
  Matrix x = a / std::ldexp(1.0, s);
  const Matrix id = Matrix::Identity(n, n);
  Matrix x2 = x * x, x4 = x2 * x2, x6 = x4 * x2;
  Matrix u = x * (x6 * (b[13] * x6 + b[11] * x4 + b[9] * x2) + b[7] * x6 + b[5] * x4 + b[3] * x2 + b[1] * id);
  Matrix v = x6 * (b[12] * x6 + b[10] * x4 + b[8] * x2) + b[6] * x6 + b[4] * x4 + b[2] * x2 + b[0] * id;
  Matrix r = (v - u).partialPivLu().solve(v + u);
  for (int k = 0; k < s; ++k) r = r * r;
  if (!r.allFinite()) throw NumericalError("expm: overflow");
  return r;
}

Propagator::Propagator(const Lindbladian& l, const QuantumState& sigma)
    : frame_(kms_frame(sigma)), m_(kms_matrix(l, frame_).matrix) {}

Matrix Propagator::step(double t) const {
  if (!(t >= 0.0) || !std::isfinite(t)) throw InputError("propagate: t must be finite and >= 0");
  if (t == 0.0) return Matrix::Identity(m_.rows(), m_.cols());
  return expm(t * m_);
}

Vector Propagator::evolve(const Vector& c, double t) const { return step(t) * c; }

Matrix Propagator::apply(const Matrix& x0, double t) const { return frame_->op(evolve(frame_->coords(x0), t)); }

Matrix propagate(const Lindbladian& l, const QuantumState& sigma, const Matrix& x0, double t) {
  return Propagator(l, sigma).apply(x0, t);
}

double variance_of(const Vector& c) { return c.size() > 1 ? c.tail(c.size() - 1).squaredNorm() : 0.0; }

Matrix random_mean_zero_hermitian(const QuantumState& sigma, std::mt19937_64& rng) {
  Matrix x = random_hermitian(sigma.dim(), rng);
  cplx mean = (sigma.matrix() * x).trace();
  return x - mean.real() * Matrix::Identity(sigma.dim(), sigma.dim());
}

double simpson(const std::vector<double>& f, double h) {
  const size_t n = f.size();
  if (n < 3 || n % 2 == 0) throw InputError("simpson: need an odd number of at least three samples");
  double s = f.front() + f.back();
  for (size_t i = 1; i + 1 < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f[i];
  return s * h / 3.0;
}

namespace {

constexpr int kMaxNodes = 6401;

// Window average (1/T) int_{t}^{t+T} ||c(tau)||^2 with `nodes` Simpson nodes.
double window_average(const Vector& c_start, const Matrix& step_h, int nodes, double h, double T) {
  std::vector<double> f(static_cast<size_t>(nodes));
  Vector c = c_start;
  for (int j = 0; j < nodes; ++j) {
    f[static_cast<size_t>(j)] = variance_of(c);
    if (j + 1 < nodes) c = step_h * c;
  }
  return simpson(f, h) / T;
}

double relative_gap(double a, double b, double floor) {
  double m = std::max(std::abs(a), std::abs(b));
  if (m < floor || m == 0.0) return 0.0;
  return std::abs(a - b) / m;
}

double safe_ratio(double num, double den) {
  if (num <= 0.0) return 0.0;
  if (den <= 0.0) return std::numeric_limits<double>::infinity();
  return num / den;
}

}  // namespace

DecayCurve decay_curve(const Lindbladian& l, const QuantumState& sigma, const Matrix& x0,
                       const std::vector<double>& times, double window) {
  if (!(window > 0.0)) throw InputError("decay_curve: window must be positive");
  Propagator p(l, sigma);
  DecayCurve out;
  out.times = times;
  out.window = window;
  const int nodes = 201;
  const double h = window / (nodes - 1);
  Matrix step_h = p.step(h);
  Vector c0 = p.frame()->coords(x0);
  double prev = -1.0;
  for (double t : times) {
    if (!(t >= prev)) throw InputError("decay_curve: times must be sorted and >= 0");
    prev = t;
    Vector c = p.evolve(c0, t);
    out.values.push_back(variance_of(c));
    out.window_avg.push_back(window_average(c, step_h, nodes, h, window));
  }
  return out;
}

std::vector<double> default_sample_times(double nu, double t_max, int n) {
  if (!(nu > 0.0) || n < 2) throw InputError("default_sample_times: need nu > 0 and n >= 2");
  double hi = std::min(10.0 / nu, t_max);
  std::vector<double> ts(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) ts[static_cast<size_t>(i)] = hi * i / (n - 1);
  return ts;
}

TimeAvgResult time_avg_check(const Lindbladian& l, const QuantumState& sigma, const Matrix& x0, double T,
                             double nu, const std::vector<double>& t_samples, double slack, double quad_tol) {
  if (!(T > 0.0) || !std::isfinite(T)) throw InputError("time_avg_check: T must be positive");
  if (!(nu >= 0.0) || !std::isfinite(nu)) throw InputError("time_avg_check: nu must be finite and >= 0");
  Propagator p(l, sigma);
  Vector c0 = p.frame()->coords(x0);
  std::vector<Vector> starts;
  starts.reserve(t_samples.size());
  for (double t : t_samples) starts.push_back(p.evolve(c0, t));

  TimeAvgResult res;
  // A multiple of the identity has no fluctuation to decay; compare noise against zero.
  if (variance_of(c0) <= 1e-26 * c0.squaredNorm()) {
    for (double t : t_samples) res.samples.push_back(TimeAvgSample{t, 0.0, 0.0, 0.0, 0.0});
    res.pass = res.window_pass = res.pointwise_pass = res.quadrature_ok = true;
    return res;
  }
  int nodes = 201;
  std::vector<double> coarse, fine;
  double avg0 = 0.0;
  for (;;) {
    const int fine_nodes = 2 * nodes - 1;
    const double h = T / (nodes - 1);
    Matrix sc = p.step(h), sf = p.step(0.5 * h);
    double a0c = window_average(c0, sc, nodes, h, T);
    double a0f = window_average(c0, sf, fine_nodes, 0.5 * h, T);
    coarse.clear();
    fine.clear();
    for (const Vector& c : starts) {
      coarse.push_back(window_average(c, sc, nodes, h, T));
      fine.push_back(window_average(c, sf, fine_nodes, 0.5 * h, T));
    }
    double floor = 1e-14 * std::abs(a0f);
    double defect = relative_gap(a0c, a0f, floor);
    for (size_t i = 0; i < coarse.size(); ++i) defect = std::max(defect, relative_gap(coarse[i], fine[i], floor));
    res.quadrature_defect = defect;
    res.nodes = nodes;
    avg0 = a0f;
    if (defect <= quad_tol || fine_nodes >= kMaxNodes) {
      res.quadrature_ok = defect <= quad_tol;
      break;
    }
    nodes = fine_nodes;
  }

  const double v0 = variance_of(c0);
  const double c_t = std::exp(nu * T);
  res.window_pass = true;
  res.pointwise_pass = true;
  for (size_t i = 0; i < t_samples.size(); ++i) {
    TimeAvgSample s;
    s.t = t_samples[i];
    double decay = std::exp(-nu * s.t);
    s.avg = fine[i];
    s.avg_bound = decay * avg0;
    s.value = variance_of(starts[i]);
    s.value_bound = c_t * decay * v0;
    res.worst_window_ratio = std::max(res.worst_window_ratio, safe_ratio(s.avg, s.avg_bound));
    res.worst_pointwise_ratio = std::max(res.worst_pointwise_ratio, safe_ratio(s.value, s.value_bound));
    if (s.avg > s.avg_bound * slack) res.window_pass = false;
    if (s.value > s.value_bound * slack) res.pointwise_pass = false;
    res.samples.push_back(s);
  }
  res.pass = res.window_pass && res.pointwise_pass && res.quadrature_ok;
  return res;
}

std::vector<double> log_spaced(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2) throw InputError("log_spaced: need 0 < lo < hi and n >= 2");
  std::vector<double> ts(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    ts[static_cast<size_t>(i)] = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (n - 1));
  return ts;
}

NormCurve semigroup_norm_curve(const Lindbladian& l, const QuantumState& sigma, const std::vector<double>& ts) {
  if (ts.empty()) throw InputError("semigroup_norm_curve: no times");
  for (size_t i = 0; i < ts.size(); ++i)
    if (!(ts[i] >= 0.0) || (i > 0 && !(ts[i] > ts[i - 1])))
      throw InputError("semigroup_norm_curve: times must be increasing and >= 0");
  FramePtr frame = kms_frame(sigma);
  Matrix m = restricted_matrix(l, frame);
  NormCurve out;
  out.ts = ts;
  out.spectral_gap = gap_of_matrix(m);
  for (double t : ts) {
    double nrm = t == 0.0 ? 1.0 : largest_singular_value(expm(t * m));
    out.norms.push_back(nrm);
    out.rates.push_back(t > 0.0 ? -std::log(nrm) / t : 0.0);
  }
  const size_t first = ts.size() / 2;
  const size_t k = ts.size() - first;
  if (k >= 2) {
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    for (size_t i = first; i < ts.size(); ++i) {
      double y = std::log(out.norms[i]);
      st += ts[i];
      sy += y;
      stt += ts[i] * ts[i];
      sty += ts[i] * y;
    }
    double kk = static_cast<double>(k);
    out.empirical_rate = -(kk * sty - st * sy) / (kk * stt - st * st);
  } else {
    out.empirical_rate = out.rates.back();
  }
  out.asymptotic = out.spectral_gap > 0.0 &&
                   std::abs(out.empirical_rate - out.spectral_gap) <= 0.05 * out.spectral_gap;
  return out;
}

// ---- space-time Poincare -----------------------------------------------------

namespace {

struct StpContext {
  FramePtr frame;
  Matrix mh;       // full KMS matrix of L^H
  Matrix g;        // (beta - M_D)^{-1/2}, full
  Matrix basis0;   // ker(L^D|h), traceless coordinates
  double T = 0.0;
  double C1 = 0.0;
  double C2 = 0.0;
};

StpContext make_context(const Lindbladian& lh, const Lindbladian& ld, const QuantumState& sigma, double T,
                        double beta, const Tolerances& tol) {
  if (!(T > 0.0) || !std::isfinite(T)) throw InputError("stp: T must be positive");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw InputError("stp: beta must be positive");
  StpContext ctx;
  ctx.T = T;
  SpaceSplit split = kernel_projection(ld, sigma, tol);
  StructuralConstants sc = structural_constants(lh, ld, sigma, tol);
  CConstants cc = c_constants(sc, T, beta);
  ctx.C1 = cc.C1;
  ctx.C2 = cc.C2;
  ctx.frame = split.frame;
  ctx.basis0 = split.basis0;
  ctx.mh = kms_matrix(lh.coherent_part(), ctx.frame).matrix;
  Matrix md = kms_matrix(ld.dissipative_part(), ctx.frame).matrix;
  if (hermitian_defect(md) > tol.detailed_balance) throw AssumptionError("stp: L^D is not KMS detailed balanced");
  Eigen::SelfAdjointEigenSolver<Matrix> es((md + md.adjoint()) * 0.5);
  RealVector w = (beta - es.eigenvalues().array()).max(beta).rsqrt();
  ctx.g = es.eigenvectors() * w.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
  return ctx;
}

// Coordinates of X_t and dX_t/dt for X_t = sum_k (t/T)^k A_k.
void poly_at(const std::vector<Vector>& a, double t, double T, Vector& x, Vector& dx) {
  x = Vector::Zero(a[0].size());
  dx = Vector::Zero(a[0].size());
  const double u = t / T;
  for (size_t k = a.size(); k-- > 0;) x = x * u + a[k];
  for (size_t k = a.size(); k-- > 1;) dx = dx * u + static_cast<double>(k) * a[k];
  dx /= T;
}

StpSample evaluate(const StpContext& ctx, const std::vector<Vector>& a, double* defect_out) {
  const Matrix& b0 = ctx.basis0;
  auto integrals = [&](int nodes) {
    std::vector<double> f_mean(static_cast<size_t>(nodes)), f1(static_cast<size_t>(nodes)),
        f2(static_cast<size_t>(nodes)), f3(static_cast<size_t>(nodes));
    std::vector<Vector> xs(static_cast<size_t>(nodes));
    const double h = ctx.T / (nodes - 1);
    Vector x, dx;
    for (int j = 0; j < nodes; ++j) {
      poly_at(a, j * h, ctx.T, x, dx);
      xs[static_cast<size_t>(j)] = x;
      f_mean[static_cast<size_t>(j)] = x[0].real();
      Vector tl = x.tail(x.size() - 1);
      Vector plus = tl - b0 * (b0.adjoint() * tl);
      f2[static_cast<size_t>(j)] = plus.squaredNorm() + std::norm(x[0]);
      f3[static_cast<size_t>(j)] = (ctx.g * (ctx.mh * x - dx)).squaredNorm();
    }
    std::vector<double> f_imag(static_cast<size_t>(nodes));
    for (int j = 0; j < nodes; ++j) f_imag[static_cast<size_t>(j)] = xs[static_cast<size_t>(j)][0].imag();
    cplx mean(simpson(f_mean, h) / ctx.T, simpson(f_imag, h) / ctx.T);
    for (int j = 0; j < nodes; ++j) {
      Vector y = xs[static_cast<size_t>(j)];
      y[0] -= mean;
      f1[static_cast<size_t>(j)] = y.squaredNorm();
    }
    return std::array<double, 3>{simpson(f1, h) / ctx.T, simpson(f2, h) / ctx.T, simpson(f3, h) / ctx.T};
  };
  int nodes = 201;
  std::array<double, 3> coarse = integrals(nodes), fine;
  double defect = 0.0;
  for (;;) {
    fine = integrals(2 * nodes - 1);
    double top = std::max({coarse[0], coarse[1], coarse[2]});
    defect = 0.0;
    for (int i = 0; i < 3; ++i) defect = std::max(defect, relative_gap(coarse[i], fine[i], 1e-14 * top));
    if (defect <= 1e-8 || 2 * nodes - 1 >= kMaxNodes) break;
    nodes = 2 * nodes - 1;
    coarse = fine;
  }
  if (defect_out) *defect_out = defect;
  StpSample s;
  s.lhs = std::sqrt(std::max(0.0, fine[0]));
  s.rhs = ctx.C1 * std::sqrt(std::max(0.0, fine[1])) + ctx.C2 * std::sqrt(std::max(0.0, fine[2]));
  s.ratio = safe_ratio(s.lhs, s.rhs);
  return s;
}

}  // namespace

StpSample stp_evaluate(const Lindbladian& lh, const Lindbladian& ld, const QuantumState& sigma, double T, double beta,
                       const std::vector<Matrix>& coeffs, double* quad_defect, const Tolerances& tol) {
  if (coeffs.empty()) throw InputError("stp_evaluate: need at least one coefficient");
  StpContext ctx = make_context(lh, ld, sigma, T, beta, tol);
  std::vector<Vector> a;
  for (const Matrix& m : coeffs) a.push_back(ctx.frame->coords(m));
  return evaluate(ctx, a, quad_defect);
}

StpResult stp_verify(const Lindbladian& lh, const Lindbladian& ld, const QuantumState& sigma, double T, double beta,
                     int samples, int degree, std::uint64_t seed, double slack, double quad_tol,
                     const Tolerances& tol) {
  if (samples < 1 || degree < 0) throw InputError("stp_verify: need samples >= 1 and degree >= 0");
  StpContext ctx = make_context(lh, ld, sigma, T, beta, tol);
  StpResult res;
  res.C1 = ctx.C1;
  res.C2 = ctx.C2;
  res.T = T;
  res.beta = beta;
  res.seed = seed;
  res.pass = true;
  std::mt19937_64 rng(seed);
  for (int i = 0; i < samples; ++i) {
    std::vector<Vector> a;
    for (int k = 0; k <= degree; ++k) a.push_back(ctx.frame->coords(random_mean_zero_hermitian(sigma, rng)));
    double defect = 0.0;
    StpSample s = evaluate(ctx, a, &defect);
    res.quadrature_defect = std::max(res.quadrature_defect, defect);
    res.worst_ratio = std::max(res.worst_ratio, s.ratio);
    if (s.lhs > s.rhs * slack) res.pass = false;
    res.samples.push_back(s);
  }
  res.quadrature_ok = res.quadrature_defect <= quad_tol;
  res.pass = res.pass && res.quadrature_ok;
  return res;
}

}  // namespace hypoco
