#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sdwave {

enum class Family { exp_power, poly, exp_source, linear, custom_table };
enum class Role { damping, source };

std::string_view to_string(Family family);
std::string_view to_string(Role role);
/// Throws ConfigError for unknown names.
Family family_from_string(std::string_view name);

/// value = mantissa * exp(log_scale). Lets exponential families be compared
/// and combined far beyond the double range.
struct Scaled {
  double mantissa = 0.0;
  double log_scale = 0.0;

  double value() const;  // may overflow to +-inf
};

/// A parametric nonlinearity (damping f or source g).
///
///   exp_power  [alpha]            s * exp(|s|^alpha)
///   poly       [c0, c1, ..., cd]  sum c_i s^i
///   exp_source [gamma, a = 1]     a * (exp(sign(s) |s|^gamma) - 1)
///   linear     [a = 1]            a * s
///   custom_table [s0, v0, s1, v1, ...]
///                                 C1 cubic Hermite through the knots,
///                                 linear extrapolation outside
///
/// Construction checks parameter shapes only; admissible ranges (alpha in
/// [0,1), gamma in [1,2)) are enforced by the config layer so that the
/// hypothesis checker can still examine inadmissible families.
class Nonlinearity {
 public:
  static Nonlinearity make(Family family, std::vector<double> params, Role role);
  static Nonlinearity exp_power(double alpha, Role role = Role::damping);
  static Nonlinearity poly(std::vector<double> coeffs, Role role);
  static Nonlinearity exp_source(double gamma, double scale = 1.0, Role role = Role::source);
  static Nonlinearity linear(double slope, Role role);
  static Nonlinearity custom_table(std::vector<double> knots, std::vector<double> values, Role role);

  Family family() const noexcept { return family_; }
  Role role() const noexcept { return role_; }
  std::span<const double> params() const noexcept { return params_; }
  std::string describe() const;

  /// Throws SaturationError when the result leaves the double range.
  double value(double s) const;
  double derivative(double s) const;
  /// F(s) = int_0^s f, closed form where available, else adaptive quadrature.
  double antiderivative(double s) const;
  bool closed_form_antiderivative() const noexcept;

  /// value and derivative with a shared log_scale; never overflow.
  Scaled scaled_value(double s) const;
  Scaled scaled_derivative(double s) const;

  /// log|value(s)|, finite wherever value(s) != 0.
  double log_abs_value(double s) const;

 private:
  Nonlinearity(Family family, std::vector<double> params, Role role);

  double log_scale(double s) const;
  double hermite(double s, bool derivative) const;

  Family family_;
  std::vector<double> params_;
  Role role_;
  std::vector<double> knots_;
  std::vector<double> knot_values_;
  std::vector<double> knot_slopes_;
};

/// f1(s) = f(s) + lambda1 * s.
double shifted_damping(const Nonlinearity& f, double lambda1, double s);

/// f1^{-1}(y) by bisection on a geometrically grown bracket. Requires f1
/// strictly increasing. Throws SaturationError if the bracket outgrows the
/// double range.
double inverse_shifted_damping(const Nonlinearity& f, double lambda1, double y);

/// log|f1(s)| computed without forming f1 (stable for exponential families).
double log_abs_shifted_damping(const Nonlinearity& f, double lambda1, double s);

/// Solves log|f1(nu)| = x on the half-line sign(nu) = side (+1 or -1). The
/// log-space companion of inverse_shifted_damping, usable for f1 values far
/// beyond the double range.
double inverse_shifted_damping_log(const Nonlinearity& f, double lambda1, double x, int side);

struct ScanOptions {
  double range = 50.0;  // scan s in [-range, range]
  int points = 20001;
  double cauchy_tol = 1e-8;
};

enum class Verdict { pass, fail };
std::string_view to_string(Verdict v);

struct HypothesisReport {
  double lambda1 = 0.0;

  // inf f' > -lambda1
  double inf_fprime_estimate = 0.0;
  Verdict damping_monotone = Verdict::fail;

  // liminf g(s)/s > -lambda1 and |g(s)| <= c (1 + exp(|s|^gamma)), gamma in [1,2)
  Verdict source_growth = Verdict::fail;
  double gamma_estimate = 0.0;  // +inf when no gamma < 2 fits
  double growth_constant = 0.0;
  double liminf_ratio = 0.0;

  // int |f'| / (s f1(s) + 1) ds < inf  and  |f(-s)| <= c (1 + |f(s)|)
  double damping_integral = 0.0;  // +inf when divergent
  Verdict damping_integral_verdict = Verdict::fail;
  Verdict damping_symmetry = Verdict::fail;
  double symmetry_constant = 0.0;

  // derivative consistency with finite differences (C1 check)
  Verdict f_c1 = Verdict::fail;
  Verdict g_c1 = Verdict::fail;

  // true when the family is known in closed form to satisfy the condition
  bool analytic_monotone = false;
  bool analytic_integrable = false;

  std::vector<std::string> notes;

  bool all_pass() const;
};

/// Numerical (semi-decidable) check of the standing hypotheses on f and g.
/// Never throws; failures are recorded in the report.
HypothesisReport check_hypotheses(const Nonlinearity& f, const Nonlinearity& g, double lambda1,
                                  const ScanOptions& options = {});

/// Max relative error between derivative() and a centred finite difference
/// of value() over a scan of [-range, range].
double derivative_consistency(const Nonlinearity& n, double range, int points);

/// The constant k_{eps,T} controlling the L-infinity norm of the
/// damping-driven component:
///   (1/alpha) [ int_{f1^{-1}(eps T^-alpha)}^{inf} f1'(v)/(v f1(v)) dv
///             + int_{-inf}^{f1^{-1}(-eps T^-alpha)} f1'(v)/(v f1(v)) dv ].
/// Throws DivergenceError when the tails do not converge.
double kappa_constant(const Nonlinearity& f, double lambda1, double epsilon, double horizon,
                      double alpha);

/// The same constant through lambda = f1(v):
///   (1/alpha) [ int_{eps T^-alpha}^inf dl/(l f1^{-1}(l))
///             - int_{eps T^-alpha}^inf dl/(l f1^{-1}(-l)) ].
/// Independent quadrature route used to cross-check kappa_constant.
double kappa_constant_substituted(const Nonlinearity& f, double lambda1, double epsilon,
                                  double horizon, double alpha);

}  // namespace sdwave
