#include "nehari/energy.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "nehari/error.hpp"
#include "nehari/rng.hpp"

namespace nehari {
namespace {

void require_positive(const ScalarField& f, const char* name) {
  if (!f.all_positive()) {
    throw SingularityError(std::string("weak residual needs ") + name +
                           " > 0 at every node (min = " + std::to_string(f.values.minCoeff()) + ")");
  }
}

struct Mode {
  int kx, ky;
  bool sine;
};

// Real Fourier modes ordered by |k|^2, one representative per +-k pair.
std::vector<Mode> lowest_modes(int dim, int n, std::size_t count) {
  std::vector<std::tuple<int, int, int>> ks;
  const int kmax = n / 2 - 1;
  for (int kx = 0; kx <= kmax; ++kx) {
    for (int ky = (dim == 2 ? -kmax : 0); ky <= (dim == 2 ? kmax : 0); ++ky) {
      if (kx == 0 && ky < 0) continue;
      ks.emplace_back(kx * kx + ky * ky, kx, ky);
    }
    if (ks.size() > 8 * count + 8 && dim == 1) break;
  }
  std::sort(ks.begin(), ks.end());
  std::vector<Mode> modes;
  for (const auto& [k2, kx, ky] : ks) {
    if (modes.size() >= count) break;
    modes.push_back({kx, ky, false});
    if (k2 != 0 && modes.size() < count) modes.push_back({kx, ky, true});
  }
  return modes;
}

ScalarField mode_field(const GridPtr& grid, const Mode& m) {
  const double dk = M_PI / grid->spec().half_width;
  return ScalarField::from_function(grid, [&](double x, double y) {
    const double arg = dk * (m.kx * x + m.ky * y);
    return m.sine ? std::sin(arg) : std::cos(arg);
  });
}

}  // namespace

std::string_view to_string(NehariTag t) noexcept {
  switch (t) {
    case NehariTag::plus: return "plus";
    case NehariTag::minus: return "minus";
    case NehariTag::zero: return "zero";
    case NehariTag::off: return "off";
  }
  return "off";
}

EnergyBreakdown breakdown_from_summary(const ProblemConfig& cfg, const PairSummary& s,
                                       double lambda) {
  const double p = cfg.p, q = cfg.q, th = cfg.theta, eta = cfg.eta();
  EnergyBreakdown e;
  e.summary = s;
  e.energy = 0.5 * s.A - lambda * s.P / (1.0 - p) - lambda * s.Q / (1.0 - q) - th * s.B / eta;
  e.d1 = s.A - lambda * s.P - lambda * s.Q - th * s.B;
  e.d2 = 2.0 * s.A - lambda * (1.0 - p) * s.P - lambda * (1.0 - q) * s.Q - th * eta * s.B;
  return e;
}

EnergyBreakdown breakdown(const Problem& prob, const FieldPair& z, double lambda) {
  return breakdown_from_summary(prob.cfg, summarize(z.u, z.v, prob.coeff, prob.cfg.summary_params()),
                                lambda);
}

double rayleigh_from_summary(const ProblemConfig& cfg, const PairSummary& s, FiberKind kind) {
  if (kind == FiberKind::nehari) {
    const double den = s.P + s.Q;
    if (!(den > 0.0)) throw DomainError("R_n undefined: P + Q = 0 (pair vanishes)");
    return (s.A - cfg.theta * s.B) / den;
  }
  const double den = s.P / (1.0 - cfg.p) + s.Q / (1.0 - cfg.q);
  if (!(den > 0.0)) throw DomainError("R_e undefined: P + Q = 0 (pair vanishes)");
  return (0.5 * s.A - cfg.theta * s.B / cfg.eta()) / den;
}

double rayleigh(const Problem& prob, const FieldPair& z, FiberKind kind) {
  return rayleigh_from_summary(prob.cfg, summarize(z.u, z.v, prob.coeff, prob.cfg.summary_params()),
                               kind);
}

FiberCoefficients fiber_coefficients(const ProblemConfig& cfg, const PairSummary& s) {
  if (!(s.B > 0.0)) throw DomainError("pair outside the admissible set: coupling integral B = 0");
  if (!(s.P > 0.0 && s.Q > 0.0)) throw DomainError("pair has a vanishing component");
  FiberCoefficients c;
  c.A = s.A;
  c.B = s.B;
  c.C = s.P;
  c.D = s.Q;
  c.p = cfg.p;
  c.q = cfg.q;
  c.alpha = cfg.alpha;
  c.beta = cfg.beta;
  c.theta = cfg.theta;
  return c;
}

FiberCoefficients fiber_coefficients(const Problem& prob, const FieldPair& z) {
  return fiber_coefficients(prob.cfg, summarize(z.u, z.v, prob.coeff, prob.cfg.summary_params()));
}

NehariClass classify_breakdown(const EnergyBreakdown& e, double tol) {
  const double band = tol * std::max(e.summary.A, 0.0);
  NehariClass c;
  c.tol = tol;
  if (std::abs(e.d1) > band) {
    c.tag = NehariTag::off;
  } else if (e.d2 > band) {
    c.tag = NehariTag::plus;
  } else if (e.d2 < -band) {
    c.tag = NehariTag::minus;
  } else {
    c.tag = NehariTag::zero;
  }
  return c;
}

NehariClass classify(const Problem& prob, const FieldPair& z, double lambda, double tol) {
  return classify_breakdown(breakdown(prob, z, lambda), tol);
}

FieldPair energy_gradient(const Problem& prob, const FieldPair& z, double lambda) {
  require_positive(z.u, "u");
  require_positive(z.v, "v");
  const ProblemConfig& cfg = prob.cfg;
  const double c = cfg.frac_norm_constant;
  const double ga = cfg.theta * cfg.alpha / cfg.eta();
  const double gb = cfg.theta * cfg.beta / cfg.eta();
  const auto u = z.u.values.array();
  const auto v = z.v.values.array();
  const Eigen::ArrayXd ua = u.pow(cfg.alpha);
  const Eigen::ArrayXd vb = v.pow(cfg.beta);

  FieldPair g{apply_frac(z.u), apply_frac(z.v)};
  g.u.values = (c * g.u.values.array() + prob.coeff.V1.values.array() * u -
                lambda * prob.coeff.a.values.array() * u.pow(-cfg.p) - ga * (ua / u) * vb)
                   .matrix();
  g.v.values = (c * g.v.values.array() + prob.coeff.V2.values.array() * v -
                lambda * prob.coeff.b.values.array() * v.pow(-cfg.q) - gb * ua * (vb / v))
                   .matrix();
  return g;
}

double weak_residual(const Problem& prob, const FieldPair& z, const FieldPair& phi, double lambda) {
  require_same_grid(z.u, phi.u);
  require_same_grid(z.v, phi.v);
  const FieldPair g = energy_gradient(prob, z, lambda);
  return inner(g.u, phi.u) + inner(g.v, phi.v);
}

std::vector<FieldPair> test_battery(const Problem& prob, int size, int random_count,
                                    std::uint64_t seed, std::uint64_t stream) {
  if (size < 0 || random_count < 0 || random_count > size)
    throw PreconditionError("battery needs 0 <= random_count <= size");
  const GridPtr& grid = prob.grid;
  const int mode_total = size - random_count;
  const int per_component = (mode_total + 1) / 2;
  const auto modes = lowest_modes(grid->spec().dim, grid->spec().points_per_axis,
                                  static_cast<std::size_t>(std::max(per_component, 16)));
  if (modes.size() < static_cast<std::size_t>(per_component))
    throw PreconditionError("grid too coarse for the requested test battery");

  std::vector<FieldPair> out;
  out.reserve(static_cast<std::size_t>(size));
  const ScalarField zero(grid);
  for (int i = 0; i < mode_total; ++i) {
    const ScalarField m = mode_field(grid, modes[static_cast<std::size_t>(i / 2)]);
    out.push_back(i % 2 == 0 ? FieldPair{m, zero} : FieldPair{zero, m});
  }

  CounterRng rng(seed, stream);
  const std::size_t smooth_modes = std::min<std::size_t>(16, modes.size());
  std::vector<ScalarField> basis;
  for (std::size_t k = 0; k < smooth_modes; ++k) basis.push_back(mode_field(grid, modes[k]));
  for (int r = 0; r < random_count; ++r) {
    FieldPair phi{ScalarField(grid), ScalarField(grid)};
    for (std::size_t k = 0; k < smooth_modes; ++k) {
      const double k2 = modes[k].kx * modes[k].kx + modes[k].ky * modes[k].ky;
      const double damp = 1.0 / (1.0 + k2);
      phi.u.values += rng.normal() * damp * basis[k].values;
      phi.v.values += rng.normal() * damp * basis[k].values;
    }
    out.push_back(std::move(phi));
  }
  return out;
}

double battery_residual(const Problem& prob, const FieldPair& z, double lambda,
                        const std::vector<FieldPair>& battery) {
  const FieldPair g = energy_gradient(prob, z, lambda);
  const double c = prob.cfg.frac_norm_constant;
  double worst = 0.0;
  for (const FieldPair& phi : battery) {
    const double norm = std::sqrt(x_norm_sq(phi.u, phi.v, prob.coeff, c));
    if (!(norm > 0.0)) continue;
    const double r = inner(g.u, phi.u) + inner(g.v, phi.v);
    worst = std::max(worst, std::abs(r) / norm);
  }
  return worst;
}

}  // namespace nehari
