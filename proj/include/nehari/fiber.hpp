#pragma once

// One-dimensional fibering maps of the nonlinear Rayleigh quotients.
//
// For a pair (u, v) with summary integrals A = ||(u,v)||^2, B = int |u|^a |v|^b,
// C = int a|u|^{1-p}, D = int b|v|^{1-q}, the rays t -> R_n(tu, tv) and
// t -> R_e(tu, tv) reduce to
//
//   Q_n(t) = (A t^2 - theta B t^eta) / (C t^{1-p} + D t^{1-q})
//   Q_e(t) = (A t^2 / 2 - theta B t^eta / eta)
//            / (C t^{1-p} / (1-p) + D t^{1-q} / (1-q))
//
// with eta = alpha + beta. Everything in this header is a pure function of
// the nine scalars in FiberCoefficients.

#include <string_view>

namespace nehari {

struct FiberCoefficients {
  double A = 1.0;
  double B = 1.0;
  double C = 1.0;
  double D = 1.0;
  double p = 0.5;
  double q = 0.5;
  double alpha = 2.0;
  double beta = 2.0;
  double theta = 1.0;

  double eta() const noexcept { return alpha + beta; }

  // Throws PreconditionError unless A,B,C,D,theta > 0, 0 < p <= q < 1,
  // alpha, beta > 1 and everything is finite.
  void validate() const;
};

enum class FiberKind {
  nehari,  // Q_n: level sets are Nehari points
  energy,  // Q_e: level sets are zero-energy points
};

std::string_view to_string(FiberKind kind) noexcept;

struct CriticalPoints {
  double t_n = 0.0;
  double t_e = 0.0;
  double lambda_n = 0.0;
  double lambda_e = 0.0;
};

struct LevelRoots {
  double t_plus = 0.0;
  double t_minus = 0.0;
  bool degenerate = false;
  bool empty = false;
};

inline constexpr double kDefaultCriticalTol = 1e-10;
inline constexpr double kDefaultLevelTol = 1e-8;

double eval_fiber(const FiberCoefficients& c, double t, FiberKind kind);

// Analytic dQ/dt.
double fiber_derivative(const FiberCoefficients& c, double t, FiberKind kind);

// The unique maximizer of Q_kind on (0, inf).
double critical_point(const FiberCoefficients& c, FiberKind kind,
                      double tol = kDefaultCriticalTol);

// max_{t>0} Q_kind(t).
double lambda_peak(const FiberCoefficients& c, FiberKind kind);

// Roots of Q_n(t) = lambda. `tol` is the relative width of the band around
// the peak inside which the level is reported as degenerate.
LevelRoots roots_at_level(const FiberCoefficients& c, double lambda,
                          double tol = kDefaultLevelTol);

// Closed forms available when p == q exactly.
CriticalPoints closed_forms_pq(const FiberCoefficients& c);

// Relative defect of the identity
//   Q_n(t) - Q_e(t) = t/((1-p)(1-q)) * ((1-q) t^{1-p} C + (1-p) t^{1-q} D)
//                     / (t^{1-p} C + t^{1-q} D) * Q_e'(t),
// scaled by max(|Q_n(t)|, |Q_e(t)|).
double difference_residual(const FiberCoefficients& c, double t);

// f(x) = (1 + x) / (eta - 1 + x), the coupling ratio that brackets theta*B/A at
// the maximizer of Q_n.
double coupling_ratio(double x, double eta) noexcept;

}  // namespace nehari
