#include "nehari/extremal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "descent.hpp"
#include "nehari/error.hpp"

namespace nehari {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kGolden = 0.5 * (std::sqrt(5.0) - 1.0);

double geometric_fraction(double lo, double hi, double frac) {
  return lo * std::pow(hi / lo, frac);
}

FieldPair fourier_member(const Problem& prob, int k, const std::vector<double>& prm) {
  const double dk = M_PI / prob.grid->spec().half_width;
  const bool two_d = prob.grid->spec().dim == 2;
  auto shape = [&](double amp) {
    return ScalarField::from_function(prob.grid, [&](double x, double y) {
      const double m = std::cos(k * dk * x) * (two_d ? std::cos(k * dk * y) : 1.0);
      return 1.0 + amp * m;
    });
  };
  FieldPair z{shape(prm[0]), shape(prm[1])};
  z.v.values *= prm[2];
  return z;
}

FieldPair gaussian_member(const Problem& prob, const std::vector<double>& prm) {
  auto bump = [&](double sigma) {
    return ScalarField::from_function(prob.grid, [&](double x, double y) {
      return std::exp(-(x * x + y * y) / (2.0 * sigma * sigma));
    });
  };
  FieldPair z{bump(prm[0]), bump(prm[1])};
  z.v.values *= prm[2];
  return z;
}

// Objective value (and gradient) of w -> Lambda_kind(w) for positive w.
std::optional<double> peak_objective(const Problem& prob, FiberKind kind, const FieldPair& w,
                                     FieldPair* grad) {
  const ProblemConfig& cfg = prob.cfg;
  try {
    const PairSummary s = summarize(w.u, w.v, prob.coeff, cfg.summary_params());
    const FiberCoefficients fc = fiber_coefficients(cfg, s);
    const double t = critical_point(fc, kind);
    const double value = eval_fiber(fc, t, kind);
    if (!grad) return value;

    FieldPair z = w;
    z.u.values *= t;
    z.v.values *= t;
    const PairSummary sz = summarize(z.u, z.v, prob.coeff, cfg.summary_params());
    const auto u = z.u.values.array();
    const auto v = z.v.values.array();
    const Eigen::ArrayXd ua = u.pow(cfg.alpha), vb = v.pow(cfg.beta);
    FieldPair kz{apply_frac(z.u), apply_frac(z.v)};
    const double c = cfg.frac_norm_constant;
    const Eigen::ArrayXd gA_u = 2.0 * (c * kz.u.values.array() + prob.coeff.V1.values.array() * u);
    const Eigen::ArrayXd gA_v = 2.0 * (c * kz.v.values.array() + prob.coeff.V2.values.array() * v);
    const Eigen::ArrayXd gB_u = cfg.alpha * (ua / u) * vb;
    const Eigen::ArrayXd gB_v = cfg.beta * ua * (vb / v);
    // Derivatives of P/(1-p) and Q/(1-q).
    const Eigen::ArrayXd gP = prob.coeff.a.values.array() * u.pow(-cfg.p);
    const Eigen::ArrayXd gQ = prob.coeff.b.values.array() * v.pow(-cfg.q);

    grad->u = ScalarField(prob.grid);
    grad->v = ScalarField(prob.grid);
    if (kind == FiberKind::nehari) {
      const double den = sz.P + sz.Q;
      grad->u.values = (t * (gA_u - cfg.theta * gB_u - value * (1.0 - cfg.p) * gP) / den).matrix();
      grad->v.values = (t * (gA_v - cfg.theta * gB_v - value * (1.0 - cfg.q) * gQ) / den).matrix();
    } else {
      const double den = sz.P / (1.0 - cfg.p) + sz.Q / (1.0 - cfg.q);
      const double th = cfg.theta / cfg.eta();
      grad->u.values = (t * (0.5 * gA_u - th * gB_u - value * gP) / den).matrix();
      grad->v.values = (t * (0.5 * gA_v - th * gB_v - value * gQ) / den).matrix();
    }
    return value;
  } catch (const Error&) {
    return std::nullopt;
  }
}

double safe_lambda(const Problem& prob, const TrialFamily& fam, int member,
                   const std::vector<double>& prm, FiberKind kind) {
  try {
    return lambda_of(prob, fam.member(prob, member, prm), kind);
  } catch (const Error&) {
    return kInf;
  }
}

}  // namespace

std::string_view to_string(FamilyKind k) noexcept {
  switch (k) {
    case FamilyKind::fourier_modes: return "fourier";
    case FamilyKind::gaussian_bumps: return "gaussian";
    case FamilyKind::custom: return "custom";
  }
  return "custom";
}

FamilyKind family_kind_from(std::string_view s) {
  if (s == "fourier") return FamilyKind::fourier_modes;
  if (s == "gaussian") return FamilyKind::gaussian_bumps;
  if (s == "custom") return FamilyKind::custom;
  throw PreconditionError("unknown family kind '" + std::string(s) + "'");
}

std::string_view to_string(ExtremalKind k) noexcept { return k == ExtremalKind::star ? "star" : "sub"; }

TrialFamily TrialFamily::fourier_modes(int count) {
  TrialFamily f;
  f.kind = FamilyKind::fourier_modes;
  f.count = count;
  return f;
}

TrialFamily TrialFamily::gaussian_bumps(int count) {
  TrialFamily f;
  f.kind = FamilyKind::gaussian_bumps;
  f.count = count;
  return f;
}

TrialFamily TrialFamily::custom(int count, MemberGenerator gen, ParamBounds bounds,
                                std::function<std::vector<double>(int)> initial) {
  TrialFamily f;
  f.kind = FamilyKind::custom;
  f.count = count;
  f.generator = std::move(gen);
  f.bounds = std::move(bounds);
  f.initial = std::move(initial);
  return f;
}

ParamBounds TrialFamily::parameter_bounds(const Problem& prob) const {
  if (!bounds.empty() || kind == FamilyKind::custom) return bounds;
  if (kind == FamilyKind::fourier_modes) return {{0.0, 0.95}, {0.0, 0.95}, {0.2, 5.0}};
  const double h = prob.grid->spec().spacing();
  const double L = prob.grid->spec().half_width;
  return {{2.0 * h, 0.5 * L}, {2.0 * h, 0.5 * L}, {0.2, 5.0}};
}

std::vector<double> TrialFamily::initial_params(const Problem& prob, int m) const {
  if (kind == FamilyKind::custom) return initial ? initial(m) : std::vector<double>{};
  if (kind == FamilyKind::fourier_modes) return {m == 0 ? 0.0 : 0.5, m == 0 ? 0.0 : 0.5, 1.0};
  const ParamBounds b = parameter_bounds(prob);
  const double frac = (m + 0.5) / std::max(count, 1);
  const double sigma = geometric_fraction(b[0].first, b[0].second, frac);
  return {sigma, sigma, 1.0};
}

FieldPair TrialFamily::member(const Problem& prob, int index, const std::vector<double>& prm) const {
  if (index < 0 || index >= count) throw PreconditionError("family member index out of range");
  switch (kind) {
    case FamilyKind::fourier_modes: return fourier_member(prob, index, prm);
    case FamilyKind::gaussian_bumps: return gaussian_member(prob, prm);
    case FamilyKind::custom:
      if (!generator) throw PreconditionError("custom family without a generator");
      return generator(prob, index, prm);
  }
  throw PreconditionError("unknown family kind");
}

std::string TrialFamily::descriptor() const {
  std::ostringstream os;
  os << to_string(kind) << ":" << count;
  return os.str();
}

double lambda_of(const Problem& prob, const FieldPair& z, FiberKind kind) {
  return lambda_peak(fiber_coefficients(prob, z), kind);
}

ExtremalEstimate estimate_extremal(const Problem& prob, const TrialFamily& family,
                                   ExtremalKind kind, const ExtremalOptions& opts) {
  if (family.count <= 0) throw PreconditionError("trial family is empty");
  const FiberKind fk = fiber_kind(kind);
  const ParamBounds bounds = family.parameter_bounds(prob);

  ExtremalEstimate est;
  est.kind = kind;
  est.value = kInf;
  for (int m = 0; m < family.count; ++m) {
    MemberRecord rec;
    rec.index = m;
    rec.params = family.initial_params(prob, m);
    rec.value = safe_lambda(prob, family, m, rec.params, fk);
    if (opts.refine && std::isfinite(rec.value)) {
      for (int sweep = 0; sweep < opts.restarts; ++sweep) {
        const double before = rec.value;
        for (std::size_t i = 0; i < rec.params.size() && i < bounds.size(); ++i) {
          auto g = [&](double x) {
            std::vector<double> prm = rec.params;
            prm[i] = x;
            return safe_lambda(prob, family, m, prm, fk);
          };
          double a = bounds[i].first, b = bounds[i].second;
          double x1 = b - kGolden * (b - a), x2 = a + kGolden * (b - a);
          double f1 = g(x1), f2 = g(x2);
          for (int it = 0; it < opts.golden_iters; ++it) {
            ++est.iterations;
            if (f1 <= f2) {
              b = x2;
              x2 = x1;
              f2 = f1;
              x1 = b - kGolden * (b - a);
              f1 = g(x1);
            } else {
              a = x1;
              x1 = x2;
              f1 = f2;
              x2 = a + kGolden * (b - a);
              f2 = g(x2);
            }
          }
          const double x = f1 <= f2 ? x1 : x2;
          const double fx = std::min(f1, f2);
          if (fx < rec.value) {
            rec.value = fx;
            rec.params[i] = x;
          }
        }
        if (!(rec.value < before * (1.0 - 1e-12))) break;
      }
    }
    rec.skipped = !std::isfinite(rec.value);
    if (!rec.skipped && rec.value < est.value) {
      est.value = rec.value;
      est.best_member = m;
    }
    est.members.push_back(std::move(rec));
  }
  if (est.best_member < 0) throw NumericError("every family member left the admissible set");

  const MemberRecord& best = est.members[static_cast<std::size_t>(est.best_member)];
  est.family_value = est.value;
  est.argmin = detail::normalize(prob, family.member(prob, best.index, best.params));
  est.converged = true;

  if (opts.polish) {
    detail::DescentOptions dopt;
    dopt.max_iters = opts.polish_iters;
    dopt.tol_rel = opts.polish_tol;
    dopt.floor = prob.cfg.floor;
    const auto objective = [&](const FieldPair& w, FieldPair* grad) {
      return peak_objective(prob, fk, w, grad);
    };
    const detail::DescentResult res =
        detail::preconditioned_descent(prob, est.argmin, objective, dopt);
    est.iterations += res.iterations;
    est.converged = res.converged;
    if (res.value < est.value) {
      est.value = res.value;
      est.argmin = res.w;
    }
  }
  return est;
}

double embedding_constant_lb(const Problem& prob, double r, const std::vector<FieldPair>& pairs) {
  if (!(r >= 2.0)) throw PreconditionError("embedding exponent must be >= 2");
  if (pairs.empty()) throw PreconditionError("embedding lower bound needs at least one pair");
  double best = 0.0;
  for (const FieldPair& z : pairs) {
    const double n = std::sqrt(x_norm_sq(z.u, z.v, prob.coeff, prob.cfg.frac_norm_constant));
    if (!(n > 0.0)) continue;
    best = std::max(best, (lp_norm(z.u, r) + lp_norm(z.v, r)) / n);
  }
  return best;
}

double embedding_constant_certified(const Problem& prob, double r) {
  if (!(r >= 2.0)) throw PreconditionError("embedding exponent must be >= 2");
  const Grid& g = *prob.grid;
  const double c = prob.cfg.frac_norm_constant;
  const double vmin = prob.v_min;
  double m = 0.0;
  for (Eigen::Index k = 0; k < g.symbol().size(); ++k)
    m += g.hermitian_weight()[k] / (c * g.symbol()[k] + vmin);
  m /= g.spec().box_volume();
  const double k_r = std::pow(std::pow(m, 0.5 * (r - 2.0)) / vmin, 1.0 / r);
  return std::sqrt(2.0) * k_r;
}

DiagnosticBounds diagnostic_bounds(const Problem& prob, double S) {
  if (!(S > 0.0) || !std::isfinite(S)) throw PreconditionError("diagnostic bounds need an S estimate");
  const ProblemConfig& cfg = prob.cfg;
  const double eta = cfg.eta(), p = cfg.p, q = cfg.q, th = cfg.theta;
  const double k = 1.0 / (eta - 2.0);
  DiagnosticBounds d;
  d.S = S;
  d.f_p = coupling_ratio(p, eta);
  d.f_q = coupling_ratio(q, eta);
  const double s_eta = std::pow(S, eta);
  d.rho_tilde = std::pow(d.f_p / (th * s_eta), k);
  d.rho = std::pow(std::pow(d.f_p, eta) / (th * th * s_eta * s_eta), k);
  d.norm_floor = std::pow((1.0 + p) / (th * (eta - 1.0 + p) * s_eta), k);
  d.delta_C = (1.0 + p) * d.norm_floor * d.norm_floor / (th * (eta - 1.0 + p));

  const double s2 = 1.0 / std::sqrt(prob.v_min);
  const double sp = std::max(lp_norm(prob.coeff.a, 2.0 / (1.0 + p)) * std::pow(s2, 1.0 - p),
                             lp_norm(prob.coeff.b, 2.0 / (1.0 + q)) * std::pow(s2, 1.0 - q));
  d.C_rho = (1.0 - d.f_q) / (2.0 * sp) *
            std::min(std::pow(d.rho_tilde, 1.0 + p), std::pow(d.rho_tilde, 1.0 + q));
  return d;
}

}  // namespace nehari
