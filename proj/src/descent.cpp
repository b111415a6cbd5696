#include "descent.hpp"

#include <algorithm>
#include <cmath>

#include "nehari/error.hpp"

namespace nehari::detail {
namespace {

double pair_inner(const FieldPair& a, const FieldPair& b) {
  return inner(a.u, b.u) + inner(a.v, b.v);
}

}  // namespace

FieldPair normalize(const Problem& prob, FieldPair w) {
  const double n2 = x_norm_sq(w.u, w.v, prob.coeff, prob.cfg.frac_norm_constant);
  if (!(n2 > 0.0) || !std::isfinite(n2)) throw NumericError("cannot normalize a vanishing direction");
  const double inv = 1.0 / std::sqrt(n2);
  w.u.values *= inv;
  w.v.values *= inv;
  return w;
}

FieldPair clamp_positive(FieldPair w, double floor) {
  w.u.values = w.u.values.cwiseAbs().cwiseMax(floor);
  w.v.values = w.v.values.cwiseAbs().cwiseMax(floor);
  return w;
}

DescentResult preconditioned_descent(const Problem& prob, const FieldPair& w0, const Objective& f,
                                     const DescentOptions& opts) {
  const double c = prob.cfg.frac_norm_constant;
  const double shift_u = prob.coeff.V1.values.mean();
  const double shift_v = prob.coeff.V2.values.mean();
  const Grid& grid = *prob.grid;

  DescentResult res;
  res.w = normalize(prob, clamp_positive(w0, opts.floor));
  FieldPair g;
  const auto v0 = f(res.w, &g);
  if (!v0) throw NumericError("descent: initial direction is not admissible");
  res.value = *v0;

  FieldPair d{ScalarField(prob.grid), ScalarField(prob.grid)};
  FieldPair trial_grad;
  double tau = 1.0;
  int quiet = 0;
  for (res.iterations = 0; res.iterations < opts.max_iters; ++res.iterations) {
    grid.apply_inverse_symbol(g.u.values.data(), d.u.values.data(), c, shift_u);
    grid.apply_inverse_symbol(g.v.values.data(), d.v.values.data(), c, shift_v);
    d.u.values = -d.u.values;
    d.v.values = -d.v.values;
    const double slope = pair_inner(g, d);
    if (!(slope < 0.0)) {
      res.converged = true;
      break;
    }

    bool accepted = false;
    FieldPair trial;
    double trial_value = 0.0;
    for (int bt = 0; bt < 60; ++bt) {
      trial = res.w;
      trial.u.values += tau * d.u.values;
      trial.v.values += tau * d.v.values;
      trial = normalize(prob, clamp_positive(std::move(trial), opts.floor));
      const auto tv = f(trial, &trial_grad);
      if (tv && *tv <= res.value + 1e-4 * tau * slope) {
        trial_value = *tv;
        accepted = true;
        break;
      }
      if (!tv) ++res.rejected;
      tau *= 0.5;
    }
    if (!accepted) {
      // No decrease is representable any more.
      res.converged = true;
      break;
    }

    const double rel = (res.value - trial_value) / std::max(std::abs(res.value), 1e-6);
    res.w = std::move(trial);
    res.value = trial_value;
    g = trial_grad;
    quiet = rel < opts.tol_rel ? quiet + 1 : 0;
    if (quiet >= opts.patience) {
      res.converged = true;
      ++res.iterations;
      break;
    }
    tau = std::min(2.0 * tau, 1e3);
  }
  return res;
}

}  // namespace nehari::detail
