#include "nehari/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>

#include <Eigen/Dense>
#include <boost/math/tools/toms748_solve.hpp>
#include <unsupported/Eigen/IterativeSolvers>

#include "descent.hpp"
#include "nehari/error.hpp"

namespace nehari {
namespace {

constexpr std::uint64_t kBatteryStream = 1;

// Diagonal blocks and coupling of the energy Hessian at a positive pair.
struct HessianParts {
  Eigen::VectorXd du, dv, cross;
};

HessianParts hessian_parts(const Problem& prob, const FieldPair& z, double lambda) {
  const ProblemConfig& cfg = prob.cfg;
  const double a = cfg.alpha, b = cfg.beta, th = cfg.theta / cfg.eta();
  const auto u = z.u.values.array();
  const auto v = z.v.values.array();
  const Eigen::ArrayXd ua = u.pow(a), vb = v.pow(b);
  HessianParts h;
  h.du = (prob.coeff.V1.values.array() + lambda * cfg.p * prob.coeff.a.values.array() * u.pow(-cfg.p - 1.0) -
          th * a * (a - 1.0) * (ua / (u * u)) * vb)
             .matrix();
  h.dv = (prob.coeff.V2.values.array() + lambda * cfg.q * prob.coeff.b.values.array() * v.pow(-cfg.q - 1.0) -
          th * b * (b - 1.0) * ua * (vb / (v * v)))
             .matrix();
  h.cross = (-th * a * b * (ua / u) * (vb / v)).matrix();
  return h;
}

}  // namespace
}  // namespace nehari

// Matrix-free Hessian for large grids, in the form Eigen's iterative solvers
// accept.
namespace nehari::detail {
class HessianOperator;
}

namespace Eigen::internal {
template <>
struct traits<nehari::detail::HessianOperator> : public traits<Eigen::SparseMatrix<double>> {};
}  // namespace Eigen::internal

namespace nehari::detail {

class HessianOperator : public Eigen::EigenBase<HessianOperator> {
 public:
  using Scalar = double;
  using RealScalar = double;
  using StorageIndex = int;
  enum { ColsAtCompileTime = Eigen::Dynamic, MaxColsAtCompileTime = Eigen::Dynamic, IsRowMajor = false };

  HessianOperator(const Grid& grid, double c, const HessianParts& parts)
      : grid_(grid), c_(c), parts_(parts), n_(parts.du.size()) {}

  Eigen::Index rows() const { return 2 * n_; }
  Eigen::Index cols() const { return 2 * n_; }

  template <typename Rhs>
  Eigen::Product<HessianOperator, Rhs, Eigen::AliasFreeProduct> operator*(
      const Eigen::MatrixBase<Rhs>& x) const {
    return Eigen::Product<HessianOperator, Rhs, Eigen::AliasFreeProduct>(*this, x.derived());
  }

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const {
    Eigen::VectorXd y(2 * n_);
    Eigen::VectorXd xu = x.head(n_), xv = x.tail(n_);
    Eigen::VectorXd ku(n_), kv(n_);
    grid_.apply_symbol(xu.data(), ku.data(), c_, 0.0);
    grid_.apply_symbol(xv.data(), kv.data(), c_, 0.0);
    y.head(n_) = ku + parts_.du.cwiseProduct(xu) + parts_.cross.cwiseProduct(xv);
    y.tail(n_) = kv + parts_.dv.cwiseProduct(xv) + parts_.cross.cwiseProduct(xu);
    return y;
  }

 private:
  const Grid& grid_;
  double c_;
  const HessianParts& parts_;
  Eigen::Index n_;
};

}  // namespace nehari::detail

namespace Eigen::internal {
template <typename Rhs>
struct generic_product_impl<nehari::detail::HessianOperator, Rhs, SparseShape, DenseShape, GemvProduct>
    : generic_product_impl_base<nehari::detail::HessianOperator, Rhs,
                                generic_product_impl<nehari::detail::HessianOperator, Rhs>> {
  using Scalar = typename Product<nehari::detail::HessianOperator, Rhs>::Scalar;
  template <typename Dest>
  static void scaleAndAddTo(Dest& dst, const nehari::detail::HessianOperator& lhs, const Rhs& rhs,
                            const Scalar& alpha) {
    dst.noalias() += alpha * lhs.apply(rhs);
  }
};
}  // namespace Eigen::internal

namespace nehari {
namespace {

Eigen::VectorXd stack(const FieldPair& g) {
  Eigen::VectorXd x(g.u.values.size() + g.v.values.size());
  x << g.u.values, g.v.values;
  return x;
}

Eigen::MatrixXd dense_frac_matrix(const Grid& grid) {
  const Eigen::Index n = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXd k(n, n);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n), col(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    e[j] = 1.0;
    grid.apply_symbol(e.data(), col.data(), 1.0, 0.0);
    k.col(j) = col;
    e[j] = 0.0;
  }
  return 0.5 * (k + k.transpose());
}

// Solves H delta = -F.
Eigen::VectorXd newton_direction(const Problem& prob, const HessianParts& parts,
                                 const Eigen::VectorXd& F, const Eigen::MatrixXd* kdense) {
  const Eigen::Index n = parts.du.size();
  const double c = prob.cfg.frac_norm_constant;
  if (kdense) {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    h.topLeftCorner(n, n) = c * *kdense;
    h.bottomRightCorner(n, n) = c * *kdense;
    h.topLeftCorner(n, n).diagonal() += parts.du;
    h.bottomRightCorner(n, n).diagonal() += parts.dv;
    h.topRightCorner(n, n).diagonal() = parts.cross;
    h.bottomLeftCorner(n, n).diagonal() = parts.cross;
    return h.partialPivLu().solve(-F);
  }
  detail::HessianOperator op(*prob.grid, c, parts);
  Eigen::MINRES<detail::HessianOperator, Eigen::Lower | Eigen::Upper, Eigen::IdentityPreconditioner> solver;
  solver.setTolerance(1e-12);
  solver.setMaxIterations(static_cast<Eigen::Index>(4 * n));
  solver.compute(op);
  return solver.solve(-F);
}

// Damped Newton on grad E = 0 from a positive pair. Returns the number of
// accepted steps.
int newton_polish(const Problem& prob, FieldPair& z, double lambda, int max_steps, int dense_limit) {
  const Eigen::Index n = z.u.values.size();
  std::optional<Eigen::MatrixXd> kdense;
  if (2 * n <= dense_limit) kdense = dense_frac_matrix(*prob.grid);
  const double floor = prob.cfg.floor;

  Eigen::VectorXd F = stack(energy_gradient(prob, z, lambda));
  int steps = 0;
  for (int it = 0; it < max_steps; ++it) {
    const HessianParts parts = hessian_parts(prob, z, lambda);
    const Eigen::VectorXd delta = newton_direction(prob, parts, F, kdense ? &*kdense : nullptr);
    if (!delta.allFinite()) break;

    double step = 1.0;
    bool accepted = false;
    FieldPair trial = z;
    Eigen::VectorXd Ft;
    for (int bt = 0; bt < 30; ++bt, step *= 0.5) {
      trial.u.values = z.u.values + step * delta.head(n);
      trial.v.values = z.v.values + step * delta.tail(n);
      if (trial.u.values.minCoeff() < floor || trial.v.values.minCoeff() < floor) continue;
      Ft = stack(energy_gradient(prob, trial, lambda));
      if (Ft.norm() <= (1.0 - 1e-4 * step) * F.norm()) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    const double scale = std::max(z.u.values.cwiseAbs().maxCoeff(), z.v.values.cwiseAbs().maxCoeff());
    const double moved = step * delta.cwiseAbs().maxCoeff();
    z = std::move(trial);
    F = std::move(Ft);
    ++steps;
    if (moved <= 1e-14 * scale) break;
  }
  return steps;
}

std::string describe(const std::exception& e) { return e.what(); }

}  // namespace

std::string_view to_string(Branch b) noexcept { return b == Branch::plus ? "plus" : "minus"; }

Branch branch_from(std::string_view s) {
  if (s == "plus") return Branch::plus;
  if (s == "minus") return Branch::minus;
  throw PreconditionError("branch must be plus or minus, got '" + std::string(s) + "'");
}

NehariTag expected_tag(Branch b) noexcept { return b == Branch::plus ? NehariTag::plus : NehariTag::minus; }

double projection_scale(const Problem& prob, const FieldPair& dir, Branch branch, double lambda) {
  const FiberCoefficients fc = fiber_coefficients(prob, dir);
  const LevelRoots roots = roots_at_level(fc, lambda);
  if (roots.empty) {
    std::ostringstream os;
    os << "projection: lambda = " << lambda << " exceeds the fiber peak of this pair";
    throw ProjectionError(ProjectionError::Reason::no_roots, os.str());
  }
  if (roots.degenerate)
    throw ProjectionError(ProjectionError::Reason::degenerate,
                          "projection: lambda is within tolerance of the fiber peak");
  return branch == Branch::plus ? roots.t_plus : roots.t_minus;
}

FieldPair project(const Problem& prob, const FieldPair& dir, Branch branch, double lambda) {
  const double t = projection_scale(prob, dir, branch, lambda);
  FieldPair z = dir;
  z.u.values *= t;
  z.v.values *= t;
  return z;
}

FieldPair default_initial_pair(const Problem& prob) {
  const GridSpec& g = prob.grid->spec();
  auto width = [&](const WeightSpec& w) {
    const double base = w.kind == WeightKind::constant ? 0.25 * g.half_width : w.width;
    return std::clamp(base, 2.0 * g.spacing(), 0.5 * g.half_width);
  };
  auto bump = [&](double sigma) {
    return ScalarField::from_function(prob.grid, [&](double x, double y) {
      return std::exp(-(x * x + y * y) / (2.0 * sigma * sigma)) + 1e-3;
    });
  };
  return {bump(width(prob.cfg.a)), bump(width(prob.cfg.b))};
}

NehariSolution minimize_branch(const Problem& prob, Branch branch, const FieldPair& init,
                               double lambda, const SolverOptions& opts) {
  if (!(lambda > 0.0)) throw PreconditionError("minimize_branch needs lambda > 0");
  const ProblemConfig& cfg = prob.cfg;

  NehariSolution sol;
  sol.lambda = lambda;
  sol.branch = branch;
  double tol_energy = opts.tol_energy;
  if (opts.lambda_star_hint && lambda >= 0.99 * *opts.lambda_star_hint) {
    sol.near_degenerate = true;
    tol_energy *= 1e-2;
  }

  const auto objective = [&](const FieldPair& w, FieldPair* grad) -> std::optional<double> {
    try {
      const PairSummary s = summarize(w.u, w.v, prob.coeff, cfg.summary_params());
      const LevelRoots roots = roots_at_level(fiber_coefficients(cfg, s), lambda);
      if (roots.empty || roots.degenerate) return std::nullopt;
      const double t = branch == Branch::plus ? roots.t_plus : roots.t_minus;
      PairSummary st = s;
      st.A *= t * t;
      st.B *= std::pow(t, cfg.eta());
      st.P *= std::pow(t, 1.0 - cfg.p);
      st.Q *= std::pow(t, 1.0 - cfg.q);
      const double e = breakdown_from_summary(cfg, st, lambda).energy;
      if (grad) {
        FieldPair z = w;
        z.u.values *= t;
        z.v.values *= t;
        *grad = energy_gradient(prob, z, lambda);
        grad->u.values *= t;
        grad->v.values *= t;
      }
      return e;
    } catch (const Error&) {
      return std::nullopt;
    }
  };

  detail::DescentOptions dopt;
  dopt.max_iters = opts.max_iters;
  dopt.tol_rel = tol_energy;
  dopt.floor = cfg.floor;
  const FieldPair w0 = detail::clamp_positive(init, cfg.floor);
  // Fails with a ProjectionError when the start cannot be projected.
  (void)projection_scale(prob, w0, branch, lambda);
  const detail::DescentResult dres = detail::preconditioned_descent(prob, w0, objective, dopt);
  sol.iterations = dres.iterations;

  FieldPair z = project(prob, dres.w, branch, lambda);
  const double descent_energy = breakdown(prob, z, lambda).energy;
  if (opts.newton) {
    FieldPair polished = z;
    const int steps = newton_polish(prob, polished, lambda, opts.newton_iters, opts.dense_limit);
    const EnergyBreakdown eb = breakdown(prob, polished, lambda);
    const bool same_branch = classify_breakdown(eb, opts.classify_tol).tag == expected_tag(branch);
    const bool same_level =
        std::abs(eb.energy - descent_energy) <= 1e-6 * std::max(1.0, std::abs(descent_energy));
    if (same_branch && same_level) {
      z = std::move(polished);
      sol.newton_steps = steps;
    }
  }

  sol.pair = std::move(z);
  sol.breakdown = breakdown(prob, sol.pair, lambda);
  sol.energy = sol.breakdown.energy;
  sol.classification = classify_breakdown(sol.breakdown, opts.classify_tol);
  const auto battery = test_battery(prob, opts.battery_size, opts.battery_random, opts.seed, kBatteryStream);
  sol.residual = battery_residual(prob, sol.pair, lambda, battery);
  sol.converged = sol.classification.tag == expected_tag(branch) && sol.residual <= opts.tol_residual;
  if (!sol.converged) {
    std::ostringstream os;
    os << "minimize_branch(" << to_string(branch) << ", lambda = " << lambda
       << ") did not converge: class = " << to_string(sol.classification.tag)
       << ", residual = " << sol.residual << " after " << sol.iterations << " descent steps";
    throw SolveError(os.str(), sol);
  }
  return sol;
}

bool SweepReport::plus_nonincreasing(double rel_slack) const {
  const SweepRow* prev = nullptr;
  for (const SweepRow& r : rows) {
    if (!r.ok_plus) continue;
    if (prev && r.c_plus > prev->c_plus + rel_slack * std::max(std::abs(prev->c_plus), std::abs(r.c_plus)))
      return false;
    prev = &r;
  }
  return true;
}

bool SweepReport::minus_nonincreasing(double rel_slack) const {
  const SweepRow* prev = nullptr;
  for (const SweepRow& r : rows) {
    if (!r.ok_minus) continue;
    if (prev &&
        r.c_minus > prev->c_minus + rel_slack * std::max(std::abs(prev->c_minus), std::abs(r.c_minus)))
      return false;
    prev = &r;
  }
  return true;
}

bool SweepReport::no_zero_below(double bound) const {
  for (const SweepRow& r : rows) {
    if (r.lambda >= bound) continue;
    if (r.class_plus == NehariTag::zero || r.class_minus == NehariTag::zero) return false;
  }
  return true;
}

bool SweepReport::frozen_scales_monotone() const {
  const SweepRow* prev = nullptr;
  for (const SweepRow& r : rows) {
    if (!(r.t_plus > 0.0 && r.t_minus > 0.0)) continue;
    if (prev && (r.t_plus < prev->t_plus || r.t_minus > prev->t_minus)) return false;
    prev = &r;
  }
  return true;
}

bool SweepReport::all_ok() const {
  return std::all_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.ok_plus && r.ok_minus; });
}

SweepReport sweep(const Problem& prob, const std::vector<double>& lambdas, const FieldPair& init,
                  const SolverOptions& opts, const std::optional<FieldPair>& frozen_direction) {
  if (!std::is_sorted(lambdas.begin(), lambdas.end()))
    throw PreconditionError("sweep needs an ascending lambda list");
  SweepReport rep;
  FieldPair warm_plus = init, warm_minus = init;
  for (double lambda : lambdas) {
    SweepRow row;
    row.lambda = lambda;
    for (Branch b : {Branch::plus, Branch::minus}) {
      FieldPair& warm = b == Branch::plus ? warm_plus : warm_minus;
      NehariSolution sol;
      std::string err;
      bool ok = false;
      try {
        sol = minimize_branch(prob, b, warm, lambda, opts);
        ok = true;
        warm = sol.pair;
      } catch (const SolveError& e) {
        sol = e.last();
        err = describe(e);
      } catch (const Error& e) {
        sol.lambda = lambda;
        sol.branch = b;
        err = describe(e);
      }
      if (b == Branch::plus) {
        row.ok_plus = ok;
        row.c_plus = sol.energy;
        row.iters_plus = sol.iterations;
        row.residual_plus = sol.residual;
        row.class_plus = sol.classification.tag;
        row.error_plus = err;
        rep.plus.push_back(std::move(sol));
      } else {
        row.ok_minus = ok;
        row.c_minus = sol.energy;
        row.e_minus_sign = sol.energy > 0.0 ? 1 : (sol.energy < 0.0 ? -1 : 0);
        row.iters_minus = sol.iterations;
        row.residual_minus = sol.residual;
        row.class_minus = sol.classification.tag;
        row.error_minus = err;
        rep.minus.push_back(std::move(sol));
      }
    }
    if (frozen_direction) {
      try {
        const LevelRoots roots = roots_at_level(fiber_coefficients(prob, *frozen_direction), lambda);
        if (!roots.empty && !roots.degenerate) {
          row.t_plus = roots.t_plus;
          row.t_minus = roots.t_minus;
        }
      } catch (const Error&) {
      }
    }
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

CrossingResult find_minus_crossing(const Problem& prob, double lo, double hi, const FieldPair& init,
                                   const SolverOptions& opts, double rel_tol) {
  if (!(lo > 0.0 && hi > lo)) throw PreconditionError("crossing search needs 0 < lo < hi");
  CrossingResult res;
  FieldPair warm = init;
  auto energy = [&](double lambda) {
    ++res.evaluations;
    const NehariSolution sol = minimize_branch(prob, Branch::minus, warm, lambda, opts);
    warm = sol.pair;
    return sol.energy;
  };
  res.energy_lo = energy(lo);
  res.energy_hi = energy(hi);
  if (!(res.energy_lo > 0.0 && res.energy_hi < 0.0)) {
    std::ostringstream os;
    os << "crossing search: Minus energy does not change sign on [" << lo << ", " << hi << "] ("
       << res.energy_lo << ", " << res.energy_hi << ")";
    throw NumericError(os.str());
  }
  std::uintmax_t max_iter = 60;
  const auto tol = [rel_tol](double a, double b) { return std::abs(b - a) <= rel_tol * std::min(a, b); };
  const auto bracket =
      boost::math::tools::toms748_solve(energy, lo, hi, res.energy_lo, res.energy_hi, tol, max_iter);
  res.lambda = 0.5 * (bracket.first + bracket.second);
  return res;
}

bool VerifyReport::passed() const {
  return !checks.empty() &&
         std::all_of(checks.begin(), checks.end(), [](const VerifyCheck& c) { return c.passed; });
}

VerifyReport verify_solution(const Problem& prob, const NehariSolution& sol, const VerifyOptions& opts) {
  const ProblemConfig& cfg = prob.cfg;
  VerifyReport rep;
  auto add = [&](std::string name, bool ok, double value, double threshold, std::string detail = {}) {
    rep.checks.push_back({std::move(name), ok, value, threshold, std::move(detail)});
  };

  const double min_node = std::min(sol.pair.u.values.minCoeff(), sol.pair.v.values.minCoeff());
  add("positivity", min_node >= cfg.floor, min_node, cfg.floor);

  const EnergyBreakdown eb = breakdown(prob, sol.pair, sol.lambda);
  const NehariClass cls = classify_breakdown(eb, opts.classify_tol);
  add("classification", cls.tag == expected_tag(sol.branch), eb.d2, 0.0,
      std::string("class ") + std::string(to_string(cls.tag)));
  const double e_err = std::abs(eb.energy - sol.energy);
  add("energy_recomputed", e_err <= 1e-10 * std::max(1.0, std::abs(eb.energy)), e_err,
      1e-10 * std::max(1.0, std::abs(eb.energy)));
  if (sol.branch == Branch::plus) add("plus_energy_negative", eb.energy < 0.0, eb.energy, 0.0);

  const double A = eb.summary.A, thB = cfg.theta * eb.summary.B;
  const double f_p = coupling_ratio(cfg.p, cfg.eta()), f_q = coupling_ratio(cfg.q, cfg.eta());
  if (sol.branch == Branch::plus) {
    add("coupling_side", thB <= f_q * A, thB - f_q * A, 0.0, "theta B <= f(q) A");
  } else {
    add("coupling_side", thB >= f_p * A, f_p * A - thB, 0.0, "theta B >= f(p) A");
  }
  if (opts.bounds && sol.branch == Branch::minus) {
    const double norm = std::sqrt(A);
    add("minus_norm_floor", norm >= opts.bounds->norm_floor, norm, opts.bounds->norm_floor);
    add("minus_coupling_floor", eb.summary.B >= opts.bounds->delta_C, eb.summary.B, opts.bounds->delta_C);
  }

  double r1 = 0.0;
  try {
    r1 = battery_residual(prob, sol.pair, sol.lambda,
                          test_battery(prob, opts.battery_size, opts.battery_random, opts.seed, opts.stream));
    add("weak_residual", r1 <= opts.tol_residual, r1, opts.tol_residual);
    const double r2 = battery_residual(
        prob, sol.pair, sol.lambda,
        test_battery(prob, 2 * opts.battery_size, 2 * opts.battery_random, opts.seed, opts.stream + 1));
    const double bound = 2.0 * std::max(r1, 1e-10);
    add("battery_robustness", r2 <= bound, r2, bound);
  } catch (const SingularityError& e) {
    add("weak_residual", false, 0.0, opts.tol_residual, describe(e));
  }
  return rep;
}

}  // namespace nehari
