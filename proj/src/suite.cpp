#include "nehari/suite.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include <boost/math/tools/toms748_solve.hpp>

#include "nehari/error.hpp"
#include "nehari/format.hpp"

namespace nehari {

namespace {

using Checks = std::vector<SuiteCheck>;

struct Recorder {
  std::string suite;
  Checks out;

  void add(std::string name, bool ok, double value, double threshold, std::string detail = {}) {
    out.push_back({suite, std::move(name), ok, value, threshold, std::move(detail)});
  }
};

Checks guarded(const std::string& suite, const std::function<void(Recorder&)>& body) {
  Recorder rec{suite, {}};
  try {
    body(rec);
  } catch (const std::exception& e) {
    rec.add("completed", false, std::numeric_limits<double>::quiet_NaN(), 0.0, e.what());
  }
  return rec.out;
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

std::string count_detail(int failures, int total) {
  return std::to_string(failures) + " of " + std::to_string(total) + " failed";
}

FieldPair scaled(const FieldPair& z, double t) {
  return {ScalarField(z.u.grid, t * z.u.values), ScalarField(z.v.grid, t * z.v.values)};
}

// Roots of Q_e(t) = lambda on either side of t_e, for 0 < lambda < Lambda_e.
std::pair<double, double> energy_level_roots(const FiberCoefficients& c, double lambda) {
  const double te = critical_point(c, FiberKind::energy);
  const auto g = [&](double s) { return eval_fiber(c, std::exp(s), FiberKind::energy) - lambda; };
  const auto tol = boost::math::tools::eps_tolerance<double>(50);
  const auto solve_side = [&](double step) {
    double a = std::log(te), b = a;
    for (int i = 0; i < 200 && g(b) > 0.0; ++i) b += step;
    std::uintmax_t it = 200;
    const auto r = step < 0 ? boost::math::tools::toms748_solve(g, b, a, tol, it)
                            : boost::math::tools::toms748_solve(g, a, b, tol, it);
    return std::exp(0.5 * (r.first + r.second));
  };
  return {solve_side(-0.5), solve_side(0.5)};
}

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

bool all_passed(const std::vector<SuiteCheck>& checks) {
  return !checks.empty() &&
         std::all_of(checks.begin(), checks.end(), [](const SuiteCheck& c) { return c.passed; });
}

nlohmann::ordered_json to_json(const SuiteCheck& c) {
  const auto num = [](double x) {
    return std::isfinite(x) ? nlohmann::ordered_json(x) : nlohmann::ordered_json(nullptr);
  };
  return {{"suite", c.suite}, {"name", c.name}, {"passed", c.passed},
          {"value", num(c.value)}, {"threshold", num(c.threshold)}, {"detail", c.detail}};
}

FiberCoefficients random_fiber_coefficients(CounterRng& rng, bool equal_exponents) {
  FiberCoefficients c;
  c.A = rng.log_uniform(1e-2, 1e2);
  c.B = rng.log_uniform(1e-2, 1e2);
  c.C = rng.log_uniform(1e-2, 1e2);
  c.D = rng.log_uniform(1e-2, 1e2);
  c.theta = rng.log_uniform(0.1, 10.0);
  c.alpha = rng.uniform(1.1, 3.0);
  c.beta = rng.uniform(1.1, 3.0);
  c.p = rng.uniform(0.05, 0.9);
  c.q = equal_exponents ? c.p : rng.uniform(c.p + 0.01, 0.95);
  return c;
}

FieldPair random_positive_pair(const Problem& prob, CounterRng& rng) {
  const GridSpec& g = prob.grid->spec();
  const double L = g.half_width;
  const auto component = [&](double amplitude) {
    const double sigma = rng.uniform(0.25, 0.6) * L;
    double c[4];
    for (int k = 0; k < 4; ++k) c[k] = 0.3 * rng.normal() / (k + 1);
    return ScalarField::from_function(prob.grid, [=, dim = g.dim](double x, double y) {
      double e = -(x * x + y * y) / (2.0 * sigma * sigma);
      for (int k = 0; k < 4; ++k) {
        e += c[k] * std::cos((k + 1) * M_PI * x / L);
        if (dim == 2) e += c[k] * std::cos((k + 1) * M_PI * y / L);
      }
      return amplitude * std::exp(e);
    });
  };
  ScalarField u = component(1.0);
  ScalarField v = component(rng.log_uniform(0.3, 3.0));
  return {std::move(u), std::move(v)};
}

InvariantSuite::InvariantSuite(RunConfig cfg) : cfg_(std::move(cfg)) {
  validate_run_config(cfg_);
  prob_ = Problem::build(cfg_.problem);
  init_ = default_initial_pair(prob_);
}

int InvariantSuite::samples(int divisor) const { return std::max(1, cfg_.verify_samples / divisor); }

std::uint64_t InvariantSuite::stream(std::uint64_t group) const { return 100 + group; }

const ExtremalEstimate& InvariantSuite::star() {
  if (!star_)
    star_ = estimate_extremal(prob_, cfg_.trial_family(), ExtremalKind::star, cfg_.extremal_options());
  return *star_;
}

const ExtremalEstimate& InvariantSuite::sub() {
  if (!sub_)
    sub_ = estimate_extremal(prob_, cfg_.trial_family(), ExtremalKind::sub, cfg_.extremal_options());
  return *sub_;
}

const DiagnosticBounds& InvariantSuite::certified_bounds() {
  if (!bounds_) {
    s_certified_ = embedding_constant_certified(prob_, cfg_.problem.eta());
    bounds_ = diagnostic_bounds(prob_, *s_certified_);
  }
  return *bounds_;
}

const InvariantSuite::Solved& InvariantSuite::solve(const std::string& label, Branch b, double lambda) {
  auto it = solved_.find(label);
  if (it != solved_.end()) return it->second;
  Solved s{label, std::nullopt, {}};
  SolverOptions opts = cfg_.solver_options();
  opts.lambda_star_hint = star().value;
  try {
    s.sol = minimize_branch(prob_, b, init_, lambda, opts);
  } catch (const std::exception& e) {
    s.error = e.what();
  }
  return solved_.emplace(label, std::move(s)).first->second;
}

const SweepReport& InvariantSuite::sweep_report() {
  if (!sweep_) {
    std::vector<double> lambdas;
    for (int i = 1; i <= cfg_.sweep_points; ++i)
      lambdas.push_back(cfg_.sweep_fraction * star().value * i / cfg_.sweep_points);
    SolverOptions opts = cfg_.solver_options();
    opts.lambda_star_hint = star().value;
    sweep_ = sweep(prob_, lambdas, init_, opts, star().argmin);
  }
  return *sweep_;
}

Checks InvariantSuite::closed_forms() {
  return guarded("closed_forms", [&](Recorder& rec) {
    CounterRng rng(cfg_.seed, stream(1));
    const int n = samples(1);
    int failures = 0;
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      const FiberCoefficients c = random_fiber_coefficients(rng, true);
      const CriticalPoints ref = closed_forms_pq(c);
      const double err = std::max({rel_err(critical_point(c, FiberKind::nehari), ref.t_n),
                                   rel_err(critical_point(c, FiberKind::energy), ref.t_e),
                                   rel_err(lambda_peak(c, FiberKind::nehari), ref.lambda_n),
                                   rel_err(lambda_peak(c, FiberKind::energy), ref.lambda_e)});
      worst = std::max(worst, err);
      if (!(err <= 1e-8)) ++failures;
    }
    rec.add("critical_points_match_closed_forms", failures == 0, worst, 1e-8, count_detail(failures, n));
  });
}

Checks InvariantSuite::difference_identity() {
  return guarded("difference_identity", [&](Recorder& rec) {
    CounterRng rng(cfg_.seed, stream(2));
    const int n = samples(10);
    int failures = 0, asymmetric = 0;
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      const FiberCoefficients c = random_fiber_coefficients(rng, i % 4 == 0);
      if (c.p < c.q) ++asymmetric;
      const double t = critical_point(c, FiberKind::nehari) * rng.log_uniform(0.1, 10.0);
      const double r = difference_residual(c, t);
      worst = std::max(worst, r);
      if (!(r <= 1e-12)) ++failures;
    }
    rec.add("difference_identity", failures == 0, worst, 1e-12,
            count_detail(failures, n) + ", " + std::to_string(asymmetric) + " with p < q");
  });
}

Checks InvariantSuite::unique_maximum() {
  return guarded("unique_maximum", [&](Recorder& rec) {
    CounterRng rng(cfg_.seed, stream(3));
    const int n = samples(1);
    constexpr int kPoints = 10000;
    for (FiberKind kind : {FiberKind::nehari, FiberKind::energy}) {
      int failures = 0;
      int worst_changes = 1;
      for (int i = 0; i < n; ++i) {
        const FiberCoefficients c = random_fiber_coefficients(rng, i % 2 == 0);
        const double tc = critical_point(c, kind);
        const double lo = std::log(tc) - 6.0 * std::log(10.0), hi = std::log(tc) + 6.0 * std::log(10.0);
        int changes = 0, last = 0;
        for (int k = 0; k < kPoints; ++k) {
          const double t = std::exp(lo + (hi - lo) * k / (kPoints - 1));
          const int sg = sign_of(fiber_derivative(c, t, kind));
          if (sg == 0) continue;
          if (last != 0 && sg != last) ++changes;
          last = sg;
        }
        if (changes != 1) {
          ++failures;
          if (std::abs(changes - 1) > std::abs(worst_changes - 1)) worst_changes = changes;
        }
      }
      rec.add(std::string("single_sign_change_") + std::string(to_string(kind)), failures == 0,
              worst_changes, 1.0, count_detail(failures, n));
    }
  });
}

Checks InvariantSuite::derivative_relations() {
  return guarded("derivative_relations", [&](Recorder& rec) {
    CounterRng rng(cfg_.seed, stream(4));
    const ProblemConfig& pc = prob_.cfg;
    const int n = samples(10);
    for (FiberKind kind : {FiberKind::nehari, FiberKind::energy}) {
      int failures = 0;
      double worst = 0.0;
      for (int i = 0; i < n; ++i) {
        const FieldPair z = random_positive_pair(prob_, rng);
        const FiberCoefficients c = fiber_coefficients(prob_, z);
        const double level = rng.uniform(0.2, 0.8) * lambda_peak(c, kind);
        const bool take_plus = rng.uniform() < 0.5;
        double t;
        if (kind == FiberKind::nehari) {
          const LevelRoots r = roots_at_level(c, level);
          t = take_plus ? r.t_plus : r.t_minus;
        } else {
          const auto [tp, tm] = energy_level_roots(c, level);
          t = take_plus ? tp : tm;
        }
        const double h = 1e-4 * t;
        const double fd =
            (rayleigh(prob_, scaled(z, t + h), kind) - rayleigh(prob_, scaled(z, t - h), kind)) / (2.0 * h);
        const EnergyBreakdown eb = breakdown(prob_, scaled(z, t), level);
        const PairSummary& s = eb.summary;
        const double formula =
            kind == FiberKind::nehari
                ? eb.d2 / (t * (s.P + s.Q))
                : eb.d1 / (t * (s.P / (1.0 - pc.p) + s.Q / (1.0 - pc.q)));
        const double err = rel_err(fd, formula);
        worst = std::max(worst, err);
        if (!(err <= 1e-5)) ++failures;
      }
      rec.add(std::string("fd_matches_formula_") + std::string(to_string(kind)), failures == 0, worst,
              1e-5, count_detail(failures, n));
    }
  });
}

Checks InvariantSuite::sign_equivalences() {
  return guarded("sign_equivalences", [&](Recorder& rec) {
    CounterRng rng(cfg_.seed, stream(5));
    const ProblemConfig& pc = prob_.cfg;
    const int n = samples(5);
    int mism_n = 0, mism_e = 0;
    double worst_n = 0.0, worst_e = 0.0;
    for (int i = 0; i < n; ++i) {
      const FieldPair z = scaled(random_positive_pair(prob_, rng), rng.log_uniform(0.1, 10.0));
      const PairSummary s =
          summarize(z.u, z.v, prob_.coeff, pc.summary_params());
      const double rn = rayleigh_from_summary(pc, s, FiberKind::nehari);
      const double re = rayleigh_from_summary(pc, s, FiberKind::energy);
      const double ln = rn > 0.0 ? rn * rng.uniform(0.5, 1.5) : rng.log_uniform(1e-2, 1.0);
      const double le = re > 0.0 ? re * rng.uniform(0.5, 1.5) : rng.log_uniform(1e-2, 1.0);

      const double g = s.P + s.Q;
      const double d1 = breakdown_from_summary(pc, s, ln).d1;
      const double defect_n =
          std::abs(d1 - g * (rn - ln)) / (s.A + pc.theta * s.B + ln * g);
      worst_n = std::max(worst_n, defect_n);
      if (sign_of(d1) != sign_of(rn - ln) || !(defect_n <= 1e-12)) ++mism_n;

      const double h = s.P / (1.0 - pc.p) + s.Q / (1.0 - pc.q);
      const double e = breakdown_from_summary(pc, s, le).energy;
      const double defect_e =
          std::abs(e - h * (re - le)) / (0.5 * s.A + pc.theta * s.B / pc.eta() + le * h);
      worst_e = std::max(worst_e, defect_e);
      if (sign_of(e) != sign_of(re - le) || !(defect_e <= 1e-12)) ++mism_e;
    }
    rec.add("sign_Rn_minus_lambda_equals_sign_dE", mism_n == 0, worst_n, 1e-12, count_detail(mism_n, n));
    rec.add("sign_Re_minus_lambda_equals_sign_E", mism_e == 0, worst_e, 1e-12, count_detail(mism_e, n));
  });
}

Checks InvariantSuite::spectral() {
  return guarded("spectral", [&](Recorder& rec) {
    const auto eigen_check = [&](const std::string& name, const GridSpec& spec,
                                 const std::function<double(double, double)>& f, double eigenvalue,
                                 double seminorm_exact) {
      const GridPtr g = Grid::make(spec);
      const ScalarField u = ScalarField::from_function(g, f);
      const ScalarField au = apply_frac(u);
      const double pointwise = (au.values - eigenvalue * u.values).cwiseAbs().maxCoeff();
      rec.add(name + "_pointwise", pointwise <= 1e-10, pointwise, 1e-10);
      const double sn = rel_err(seminorm_sq(u), seminorm_exact);
      rec.add(name + "_seminorm", sn <= 1e-10, sn, 1e-10);
    };
    eigen_check("sin3x_s0.5", {1, M_PI, 128, 0.5}, [](double x, double) { return std::sin(3 * x); }, 3.0,
                3.0 * M_PI);
    eigen_check("cos4x_s0.25", {1, M_PI, 128, 0.25}, [](double x, double) { return std::cos(4 * x); },
                2.0, 2.0 * M_PI);
    eigen_check("sinx_cos2y_s0.5_2d", {2, M_PI, 64, 0.5},
                [](double x, double y) { return std::sin(x) * std::cos(2 * y); }, std::sqrt(5.0),
                std::sqrt(5.0) * M_PI * M_PI);

    CounterRng rng(cfg_.seed, stream(6));
    const GridPtr g = prob_.grid;
    double worst_adj = 0.0, worst_sn = 0.0;
    for (int i = 0; i < 8; ++i) {
      ScalarField f(g), h(g);
      for (Eigen::Index k = 0; k < f.values.size(); ++k) {
        f.values[k] = rng.normal();
        h.values[k] = rng.normal();
      }
      const ScalarField af = apply_frac(f), ah = apply_frac(h);
      const double scale = std::sqrt(inner(af, af) * inner(h, h));
      worst_adj = std::max(worst_adj, std::abs(inner(af, h) - inner(f, ah)) / scale);
      worst_sn = std::max(worst_sn, rel_err(seminorm_sq(f), inner(af, f)));
    }
    rec.add("self_adjoint", worst_adj <= 1e-10, worst_adj, 1e-10);
    rec.add("seminorm_equals_pairing", worst_sn <= 1e-10, worst_sn, 1e-10);

    const auto gauss_error = [](int n) {
      const GridPtr gq = Grid::make({1, 10.0, n, 0.5});
      const ScalarField f = ScalarField::from_function(gq, [](double x, double) { return std::exp(-x * x); });
      return std::abs(integrate(f) - std::sqrt(M_PI));
    };
    const double e16 = gauss_error(16), e32 = gauss_error(32);
    const double ratio = e16 / std::max(e32, std::numeric_limits<double>::min());
    rec.add("quadrature_convergence_ratio", ratio >= 10.0, ratio, 10.0,
            "error n=16 " + format_double(e16) + ", n=32 " + format_double(e32));
  });
}

Checks InvariantSuite::extremal_ordering() {
  return guarded("extremal_ordering", [&](Recorder& rec) {
    const double ls = star().value, lsub = sub().value;
    rec.add("lambda_sub_positive", lsub > 0.0, lsub, 0.0);
    rec.add("lambda_sub_below_lambda_star", lsub < ls, lsub, ls);
    const double gap = (ls - lsub) / ls;
    rec.add("relative_gap", gap >= 1e-3, gap, 1e-3);

    const TrialFamily fam = cfg_.trial_family();
    std::vector<FieldPair> pairs{star().argmin, sub().argmin};
    for (int m = 0; m < fam.count; ++m) pairs.push_back(fam.member(prob_, m, fam.initial_params(prob_, m)));
    for (FiberKind kind : {FiberKind::nehari, FiberKind::energy}) {
      double worst = 0.0;
      int tested = 0;
      for (const FieldPair& z : pairs) {
        double base;
        try {
          base = lambda_of(prob_, z, kind);
        } catch (const DomainError&) {
          continue;
        }
        ++tested;
        for (double s : {0.1, 1.0, 10.0}) worst = std::max(worst, rel_err(lambda_of(prob_, scaled(z, s), kind), base));
      }
      rec.add(std::string("zero_homogeneity_") + std::string(to_string(kind)), tested > 0 && worst <= 1e-10,
              worst, 1e-10, std::to_string(tested) + " pairs");
    }
  });
}

Checks InvariantSuite::two_solutions() {
  return guarded("two_solutions", [&](Recorder& rec) {
    const double ls = star().value, lsub = sub().value;
    constexpr double kResidual = 1e-6;
    const std::string battery = std::to_string(cfg_.solver.battery_size) + "-element battery";
    const auto solved = [&](const Solved& s, const std::string& name) {
      if (!s.sol) rec.add(name + "_found", false, std::numeric_limits<double>::quiet_NaN(), 0.0, s.error);
      return s.sol.has_value();
    };

    const Solved& plus = solve("plus_half_star", Branch::plus, 0.5 * ls);
    if (solved(plus, "plus_half_star")) {
      rec.add("plus_half_star_energy_negative", plus.sol->energy < 0.0, plus.sol->energy, 0.0);
      rec.add("plus_half_star_residual", plus.sol->residual <= kResidual, plus.sol->residual, kResidual, battery);
    }
    const Solved& minus = solve("minus_half_star", Branch::minus, 0.5 * ls);
    if (solved(minus, "minus_half_star")) {
      rec.add("minus_half_star_classified_minus", minus.sol->classification.tag == NehariTag::minus,
              minus.sol->breakdown.d2, 0.0);
      rec.add("minus_half_star_residual", minus.sol->residual <= kResidual, minus.sol->residual, kResidual,
              battery);
    }
    const Solved& low = solve("minus_half_sub", Branch::minus, 0.5 * lsub);
    if (solved(low, "minus_half_sub"))
      rec.add("minus_half_sub_energy_positive", low.sol->energy > 0.0, low.sol->energy, 0.0);
    const Solved& mid = solve("minus_midpoint", Branch::minus, 0.5 * (lsub + ls));
    if (solved(mid, "minus_midpoint"))
      rec.add("minus_midpoint_energy_negative", mid.sol->energy < 0.0, mid.sol->energy, 0.0);

    if (!crossing_) {
      SolverOptions opts = cfg_.solver_options();
      opts.lambda_star_hint = ls;
      crossing_ = find_minus_crossing(prob_, 0.5 * lsub, 0.5 * (lsub + ls), init_, opts).lambda;
    }
    const double dev = std::abs(*crossing_ / lsub - 1.0);
    rec.add("crossing_matches_lambda_sub", dev <= 0.05, dev, 0.05, "crossing at " + format_double(*crossing_));
  });
}

Checks InvariantSuite::continuation() {
  return guarded("continuation", [&](Recorder& rec) {
    const SweepReport& rep = sweep_report();
    const double bound = 0.99 * star().value;
    int failed = 0;
    std::string first_error;
    for (const auto& r : rep.rows) {
      if (!r.ok_plus || !r.ok_minus) {
        ++failed;
        if (first_error.empty()) first_error = r.error_plus.empty() ? r.error_minus : r.error_plus;
      }
    }
    rec.add("all_rows_solved", rep.all_ok(), failed, 0.0, first_error);
    rec.add("plus_energy_nonincreasing", rep.plus_nonincreasing(), static_cast<double>(rep.rows.size()), 0.0);
    rec.add("minus_energy_nonincreasing", rep.minus_nonincreasing(), static_cast<double>(rep.rows.size()), 0.0);
    rec.add("no_zero_below_099_lambda_star", rep.no_zero_below(bound), bound, bound);
    rec.add("frozen_direction_scales_monotone", rep.frozen_scales_monotone(),
            static_cast<double>(rep.rows.size()), 0.0, "t+ nondecreasing, t- nonincreasing");
  });
}

Checks InvariantSuite::floors_and_sandwich() {
  return guarded("floors_and_sandwich", [&](Recorder& rec) {
    const DiagnosticBounds& b = certified_bounds();
    const ProblemConfig& pc = prob_.cfg;

    std::vector<const NehariSolution*> minus;
    for (const char* label : {"minus_half_star", "minus_half_sub", "minus_midpoint"}) {
      auto it = solved_.find(label);
      if (it != solved_.end() && it->second.sol) minus.push_back(&*it->second.sol);
    }
    const SweepReport& rep = sweep_report();
    for (std::size_t i = 0; i < rep.rows.size(); ++i)
      if (rep.rows[i].ok_minus) minus.push_back(&rep.minus[i]);
    double min_norm = std::numeric_limits<double>::infinity(), min_b = min_norm;
    for (const NehariSolution* s : minus) {
      min_norm = std::min(min_norm, std::sqrt(s->breakdown.summary.A));
      min_b = std::min(min_b, s->breakdown.summary.B);
    }
    const std::string count = std::to_string(minus.size()) + " Minus solutions";
    rec.add("minus_norm_floor", !minus.empty() && min_norm >= b.norm_floor, min_norm, b.norm_floor, count);
    rec.add("minus_coupling_floor", !minus.empty() && min_b >= b.delta_C, min_b, b.delta_C, count);

    const TrialFamily fam = cfg_.trial_family();
    std::vector<FieldPair> pairs{star().argmin, sub().argmin};
    for (const MemberRecord& m : star().members)
      if (!m.skipped) pairs.push_back(fam.member(prob_, m.index, m.params));
    for (const MemberRecord& m : sub().members)
      if (!m.skipped) pairs.push_back(fam.member(prob_, m.index, m.params));
    double lower = std::numeric_limits<double>::infinity(), upper = lower, norm_ratio = lower;
    for (const FieldPair& z : pairs) {
      const FiberCoefficients c = fiber_coefficients(prob_, z);
      const double t = critical_point(c, FiberKind::nehari);
      const double A = t * t * c.A, thB = pc.theta * std::pow(t, pc.eta()) * c.B;
      lower = std::min(lower, (thB - b.f_p * A) / A);
      upper = std::min(upper, (b.f_q * A - thB) / A);
      norm_ratio = std::min(norm_ratio, std::sqrt(A) / b.rho_tilde);
    }
    const std::string members = std::to_string(pairs.size()) + " t_n-scaled pairs";
    rec.add("sandwich_lower_slack", lower >= -1e-10, lower, -1e-10, members + ", f(p) A <= theta B");
    rec.add("sandwich_upper_slack", upper >= -1e-10, upper, -1e-10, members + ", theta B <= f(q) A");
    rec.add("nehari_norm_floor", norm_ratio >= 1.0, norm_ratio, 1.0, members + ", ||t_n z|| / rho_tilde");
  });
}

Checks InvariantSuite::diagnostics() {
  return guarded("diagnostics", [&](Recorder& rec) {
    CounterRng rng(cfg_.seed, stream(7));
    const int n = samples(10);
    int failures = 0;
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      const FiberCoefficients c = random_fiber_coefficients(rng, i % 2 == 0);
      const double tn = critical_point(c, FiberKind::nehari);
      const double level = rng.uniform(0.05, 0.95) * lambda_peak(c, FiberKind::nehari);
      const LevelRoots r = roots_at_level(c, level);
      const double err = std::max(rel_err(eval_fiber(c, r.t_plus, FiberKind::nehari), level),
                                  rel_err(eval_fiber(c, r.t_minus, FiberKind::nehari), level));
      worst = std::max(worst, err);
      if (r.empty || r.degenerate || !(r.t_plus < tn && tn < r.t_minus) || !(err <= 1e-8)) ++failures;
    }
    rec.add("level_roots_bracket_peak", failures == 0, worst, 1e-8, count_detail(failures, n));

    const DiagnosticBounds& b = certified_bounds();
    std::vector<FieldPair> pairs{star().argmin, sub().argmin};
    const TrialFamily fam = cfg_.trial_family();
    for (int m = 0; m < fam.count; ++m) pairs.push_back(fam.member(prob_, m, fam.initial_params(prob_, m)));
    s_lower_ = embedding_constant_lb(prob_, cfg_.problem.eta(), pairs);
    rec.add("embedding_lower_below_certified", *s_lower_ <= *s_certified_, *s_lower_, *s_certified_);
    rec.add("c_rho_below_lambda_star", b.C_rho > 0.0 && b.C_rho <= star().value, b.C_rho, star().value);

    VerifyOptions vo;
    vo.battery_size = cfg_.solver.battery_size;
    vo.battery_random = cfg_.solver.battery_random;
    vo.seed = cfg_.seed;
    vo.tol_residual = cfg_.solver.tol_residual;
    vo.bounds = b;
    for (auto [label, br] : {std::pair{"plus_half_star", Branch::plus}, std::pair{"minus_half_star", Branch::minus}}) {
      const Solved& s = solve(label, br, 0.5 * star().value);
      if (!s.sol) {
        rec.add(std::string(label) + ".solved", false, std::numeric_limits<double>::quiet_NaN(), 0.0, s.error);
        continue;
      }
      for (const VerifyCheck& c : verify_solution(prob_, *s.sol, vo).checks)
        rec.add(std::string(label) + "." + c.name, c.passed, c.value, c.threshold, c.detail);
    }
  });
}

std::vector<SuiteCheck> InvariantSuite::run_all() {
  Checks all;
  for (auto group : {&InvariantSuite::closed_forms, &InvariantSuite::difference_identity,
                     &InvariantSuite::unique_maximum, &InvariantSuite::derivative_relations,
                     &InvariantSuite::sign_equivalences, &InvariantSuite::spectral,
                     &InvariantSuite::extremal_ordering, &InvariantSuite::two_solutions,
                     &InvariantSuite::continuation, &InvariantSuite::floors_and_sandwich,
                     &InvariantSuite::diagnostics}) {
    Checks part = (this->*group)();
    all.insert(all.end(), part.begin(), part.end());
  }
  return all;
}

nlohmann::ordered_json InvariantSuite::estimates_json() const {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  if (star_) j["lambda_star_est"] = star_->value;
  if (sub_) j["lambda_sub_est"] = sub_->value;
  if (crossing_) j["minus_energy_crossing"] = *crossing_;
  if (s_lower_) j["S_lower"] = *s_lower_;
  if (s_certified_) j["S_certified"] = *s_certified_;
  if (bounds_) {
    j["norm_floor"] = bounds_->norm_floor;
    j["delta_C"] = bounds_->delta_C;
    j["rho_tilde"] = bounds_->rho_tilde;
    j["C_rho"] = bounds_->C_rho;
  }
  return j;
}

}  // namespace nehari
