#include "nehari/fiber.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "nehari/error.hpp"

namespace nehari {
namespace {

// N(t) = quad t^2 - top t^eta,  Den(t) = wc t^{1-p} + wd t^{1-q}.
struct Shape {
  double quad, top, wc, wd, p, q, eta;
};

Shape shape_of(const FiberCoefficients& c, FiberKind kind) {
  const double eta = c.eta();
  if (kind == FiberKind::nehari) return {c.A, c.theta * c.B, c.C, c.D, c.p, c.q, eta};
  return {0.5 * c.A, c.theta * c.B / eta, c.C / (1.0 - c.p), c.D / (1.0 - c.q), c.p, c.q, eta};
}

bool direct_range(double t) { return t >= 1e-3 && t <= 1e3; }

double logsumexp(double a, double b) {
  const double m = std::max(a, b);
  if (m == -std::numeric_limits<double>::infinity()) return m;
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

// log|x - y| and sign(x - y) for x = exp(lx), y = exp(ly).
std::pair<double, int> log_diff(double lx, double ly) {
  if (lx == ly) return {-std::numeric_limits<double>::infinity(), 0};
  if (lx > ly) return {lx + std::log1p(-std::exp(ly - lx)), 1};
  return {ly + std::log1p(-std::exp(lx - ly)), -1};
}

void require_positive_t(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    std::ostringstream os;
    os << "fiber maps are defined for t > 0 only (got t = " << t << ")";
    throw PreconditionError(os.str());
  }
}

double checked(double value, const char* what, double t) {
  if (!std::isfinite(value)) {
    std::ostringstream os;
    os << what << " is not finite at t = " << t;
    throw DomainError(os.str());
  }
  return value;
}

// Log-magnitudes of the positive and negative halves of N'(t)Den(t) - N(t)Den'(t).
struct DerivativeParts {
  double log_pos;
  double log_neg;
  double mean_exp_pos;  // d log_pos / d log t
  double mean_exp_neg;
};

DerivativeParts derivative_parts(const Shape& s, double lt) {
  const double e1 = 2.0 - s.p, e2 = 2.0 - s.q;
  const double e3 = s.eta - s.p, e4 = s.eta - s.q;
  const double a1 = std::log(s.quad * s.wc * (1.0 + s.p)) + e1 * lt;
  const double a2 = std::log(s.quad * s.wd * (1.0 + s.q)) + e2 * lt;
  const double b1 = std::log(s.top * s.wc * (s.eta - 1.0 + s.p)) + e3 * lt;
  const double b2 = std::log(s.top * s.wd * (s.eta - 1.0 + s.q)) + e4 * lt;
  DerivativeParts d{};
  d.log_pos = logsumexp(a1, a2);
  d.log_neg = logsumexp(b1, b2);
  d.mean_exp_pos = e1 * std::exp(a1 - d.log_pos) + e2 * std::exp(a2 - d.log_pos);
  d.mean_exp_neg = e3 * std::exp(b1 - d.log_neg) + e4 * std::exp(b2 - d.log_neg);
  return d;
}

double log_den(const Shape& s, double lt) {
  return logsumexp(std::log(s.wc) + (1.0 - s.p) * lt, std::log(s.wd) + (1.0 - s.q) * lt);
}

double eval_shape(const Shape& s, double t) {
  if (direct_range(t)) {
    const double num = s.quad * t * t - s.top * std::pow(t, s.eta);
    const double den = s.wc * std::pow(t, 1.0 - s.p) + s.wd * std::pow(t, 1.0 - s.q);
    return num / den;
  }
  const double lt = std::log(t);
  const auto [lnum, sign] =
      log_diff(std::log(s.quad) + 2.0 * lt, std::log(s.top) + s.eta * lt);
  if (sign == 0) return 0.0;
  return sign * std::exp(lnum - log_den(s, lt));
}

double derivative_shape(const Shape& s, double t) {
  if (direct_range(t)) {
    const double pos = s.quad * (s.wc * (1.0 + s.p) * std::pow(t, 2.0 - s.p) +
                                 s.wd * (1.0 + s.q) * std::pow(t, 2.0 - s.q));
    const double neg = s.top * (s.wc * (s.eta - 1.0 + s.p) * std::pow(t, s.eta - s.p) +
                                s.wd * (s.eta - 1.0 + s.q) * std::pow(t, s.eta - s.q));
    const double den = s.wc * std::pow(t, 1.0 - s.p) + s.wd * std::pow(t, 1.0 - s.q);
    return (pos - neg) / (den * den);
  }
  const double lt = std::log(t);
  const DerivativeParts d = derivative_parts(s, lt);
  const auto [ldiff, sign] = log_diff(d.log_pos, d.log_neg);
  if (sign == 0) return 0.0;
  return sign * std::exp(ldiff - 2.0 * log_den(s, lt));
}

// Safeguarded Newton on a bracket [lo, hi] where fn(lo) and fn(hi) differ in
// sign. `fn` returns (value, derivative).
template <class Fn>
double bracketed_newton(Fn&& fn, double lo, double hi, double x) {
  const double f_lo = fn(lo).first;
  if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
  for (int it = 0; it < 400; ++it) {
    const auto [f, df] = fn(x);
    if (f == 0.0) return x;
    if ((f < 0.0) == (f_lo < 0.0)) {
      lo = x;
    } else {
      hi = x;
    }
    double next = x - f / df;
    if (!std::isfinite(next) || !(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double scale = std::max(1.0, std::abs(x));
    if (std::abs(next - x) <= 4.0 * DBL_EPSILON * scale || hi - lo <= 4.0 * DBL_EPSILON * scale)
      return next;
    x = next;
  }
  return x;
}

constexpr double kMaxLogT = 700.0;

}  // namespace

std::string_view to_string(FiberKind kind) noexcept {
  return kind == FiberKind::nehari ? "n" : "e";
}

double coupling_ratio(double x, double eta) noexcept { return (1.0 + x) / (eta - 1.0 + x); }

void FiberCoefficients::validate() const {
  const double values[] = {A, B, C, D, p, q, alpha, beta, theta};
  for (double v : values) {
    if (!std::isfinite(v)) throw PreconditionError("fiber coefficients must be finite");
  }
  if (!(A > 0 && B > 0 && C > 0 && D > 0 && theta > 0))
    throw PreconditionError("fiber coefficients require A, B, C, D, theta > 0");
  if (!(p > 0 && p <= q && q < 1)) throw PreconditionError("fiber coefficients require 0 < p <= q < 1");
  if (!(alpha > 1 && beta > 1)) throw PreconditionError("fiber coefficients require alpha, beta > 1");
}

double eval_fiber(const FiberCoefficients& c, double t, FiberKind kind) {
  require_positive_t(t);
  return checked(eval_shape(shape_of(c, kind), t), "fiber value", t);
}

double fiber_derivative(const FiberCoefficients& c, double t, FiberKind kind) {
  require_positive_t(t);
  return checked(derivative_shape(shape_of(c, kind), t), "fiber derivative", t);
}

double critical_point(const FiberCoefficients& c, FiberKind kind, double tol) {
  c.validate();
  if (!(tol > 0.0 && tol <= 1e-4)) throw PreconditionError("critical_point tolerance must lie in (0, 1e-4]");
  const Shape s = shape_of(c, kind);

  // phi(log t) = log(positive part) - log(negative part) is strictly
  // decreasing, so its single zero is the maximizer.
  auto phi = [&](double lt) {
    const DerivativeParts d = derivative_parts(s, lt);
    return std::pair{d.log_pos - d.log_neg, d.mean_exp_pos - d.mean_exp_neg};
  };

  double lo = -1.0, hi = 1.0;
  while (phi(lo).first <= 0.0) {
    lo *= 2.0;
    if (lo < -kMaxLogT) throw NumericError("critical_point: bracket expansion toward t -> 0 failed");
  }
  while (phi(hi).first >= 0.0) {
    hi *= 2.0;
    if (hi > kMaxLogT) throw NumericError("critical_point: bracket expansion toward t -> inf failed");
  }
  const double lt = bracketed_newton(phi, lo, hi, 0.0);
  const double t = std::exp(lt);

  const double value = eval_shape(s, t);
  const double slope = derivative_shape(s, t) * t / std::abs(value);
  if (!(std::abs(slope) <= tol)) {
    std::ostringstream os;
    os << "critical_point: normalized derivative " << slope << " exceeds tolerance " << tol
       << " at t = " << t;
    throw NumericError(os.str());
  }
  return t;
}

double lambda_peak(const FiberCoefficients& c, FiberKind kind) {
  const double t = critical_point(c, kind);
  return eval_fiber(c, t, kind);
}

LevelRoots roots_at_level(const FiberCoefficients& c, double lambda, double tol) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw PreconditionError("roots_at_level requires lambda > 0");
  const double t_n = critical_point(c, FiberKind::nehari);
  const Shape s = shape_of(c, FiberKind::nehari);
  const double peak = eval_shape(s, t_n);

  LevelRoots out;
  if (std::abs(lambda - peak) <= tol * peak) {
    out.t_plus = out.t_minus = t_n;
    out.degenerate = true;
    return out;
  }
  if (lambda > peak) {
    out.empty = true;
    return out;
  }

  auto g = [&](double lt) {
    const double t = std::exp(lt);
    return std::pair{eval_shape(s, t) - lambda, derivative_shape(s, t) * t};
  };
  const double lt_n = std::log(t_n);

  double step = 1.0;
  while (g(lt_n - step).first >= 0.0) {
    step *= 2.0;
    if (step > kMaxLogT) throw NumericError("roots_at_level: no bracket for the lower root");
  }
  const double lt_plus = bracketed_newton(g, lt_n - step, lt_n, lt_n - 0.5 * step);

  step = 1.0;
  while (g(lt_n + step).first >= 0.0) {
    step *= 2.0;
    if (step > kMaxLogT) throw NumericError("roots_at_level: no bracket for the upper root");
  }
  const double lt_minus = bracketed_newton(g, lt_n, lt_n + step, lt_n + 0.5 * step);

  out.t_plus = std::exp(lt_plus);
  out.t_minus = std::exp(lt_minus);
  return out;
}

CriticalPoints closed_forms_pq(const FiberCoefficients& c) {
  c.validate();
  if (c.p != c.q) throw PreconditionError("closed forms require p == q");
  const double p = c.p, eta = c.eta(), th = c.theta;
  const double k = 1.0 / (eta - 2.0);
  const double e_top = (eta - 1.0 + p) * k;  // exponent of A
  const double e_bot = (1.0 + p) * k;        // exponent of B
  const double ratio = std::pow(c.A, e_top) / (std::pow(c.B, e_bot) * (c.C + c.D));

  CriticalPoints cp;
  cp.t_n = std::pow((1.0 + p) * c.A / (th * (eta - 1.0 + p) * c.B), k);
  cp.t_e = std::pow((1.0 + p) * eta * c.A / (2.0 * th * (eta - 1.0 + p) * c.B), k);

  const double c_n = std::pow(1.0 + p, e_bot) * (eta - 2.0) /
                     (std::pow(th, e_bot) * std::pow(eta - 1.0 + p, e_top));
  const double c_e = (1.0 - p) * (eta - 2.0) * std::pow((1.0 + p) * eta / th, e_bot) *
                     std::pow(1.0 / (2.0 * (eta - 1.0 + p)), e_top);
  cp.lambda_n = c_n * ratio;
  cp.lambda_e = c_e * ratio;
  return cp;
}

double difference_residual(const FiberCoefficients& c, double t) {
  require_positive_t(t);
  const double qn = eval_fiber(c, t, FiberKind::nehari);
  const double qe = eval_fiber(c, t, FiberKind::energy);
  const double dqe = fiber_derivative(c, t, FiberKind::energy);
  const double tp = std::pow(t, 1.0 - c.p) * c.C;
  const double tq = std::pow(t, 1.0 - c.q) * c.D;
  const double factor =
      t / ((1.0 - c.p) * (1.0 - c.q)) * ((1.0 - c.q) * tp + (1.0 - c.p) * tq) / (tp + tq);
  const double lhs = qn - qe;
  const double rhs = factor * dqe;
  return std::abs(lhs - rhs) / std::max({std::abs(qn), std::abs(qe), DBL_MIN});
}

}  // namespace nehari
