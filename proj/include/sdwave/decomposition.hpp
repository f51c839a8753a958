#pragma once

#include <span>
#include <string>
#include <vector>

#include "sdwave/dynamics.hpp"

namespace sdwave {

/// Spectral fields on a sample schedule.
struct SampledSeries {
  std::vector<double> times;
  std::vector<SpectralField> values;
};

/// Per-mode exact solution of y' + rate * y = r(t) where r is the piecewise
/// linear interpolant of `forcing` between the sample times.
SampledSeries relax_piecewise_linear(std::span<const double> rates,
                                     std::span<const double> times,
                                     std::span<const SpectralField> forcing,
                                     const SpectralField& initial);

/// phi = v + v_t: heat flow phi' + lambda phi = P[(1 + lambda1) w_t - g(w)] + h
/// with phi(0) = w0 + w1, driven by the sampled w-trajectory.
SampledSeries solve_phi(const Trajectory& run, const GalerkinSystem& system);

/// v' + v = phi, v(0) = v0.
SampledSeries recover_v(const SampledSeries& phi, const SpectralField& v0);

/// vt = u + u_t: heat flow vt' + lambda vt = -P f1(w_t), vt(0) = 0.
SampledSeries solve_damping_part(const Trajectory& run, const GalerkinSystem& system);

/// u' + u = vt, u(0) = 0.
SampledSeries recover_u(const SampledSeries& damping_part);

/// ||v(t) - e^{-t} w0||_{H^s} for each s on the schedule, together with the
/// data-side quantities the drift is compared against.
struct DriftReport {
  std::vector<double> exponents;
  std::vector<std::vector<double>> drift;  // [s index][sample]
  std::vector<double> max_drift;           // max over samples, per s
  double max_g_l2 = 0.0;                   // max_t ||g(w)||
  double max_wt_l2 = 0.0;                  // max_t ||w_t||
  double fitted_constant = 0.0;            // C = max_s max_drift (2 - s) / (1 + ...)
  /// Least-squares slope of log max_drift against log 1/(2 - s). A 1/(2 - s)
  /// growth gives 1.
  double growth_slope = 0.0;
};

DriftReport drift_norms(const SampledSeries& v, const Trajectory& run,
                        const GalerkinSystem& system, std::span<const double> exponents);

struct DecompositionOptions {
  std::vector<double> drift_exponents{1.0, 1.5, 1.9, 1.99};
};

struct DecompositionRun {
  std::vector<double> times;
  SampledSeries phi;
  SampledSeries v;
  SampledSeries damping_part;  // u + u_t
  SampledSeries u;
  /// ||w - v - u|| / (1 + ||w||) per sample.
  std::vector<double> reconstruction;
  double max_reconstruction = 0.0;
  /// ||u'' + (lambda + 1) u' + lambda u + P f1(w_t)|| / (1 + ||P f1(w_t)||)
  /// with centred differences at interior samples (ends report 0).
  std::vector<double> residual_u;
  DriftReport drift;
  /// ||w0 + w1||, the initial-data term in the phi smoothing estimate,
  /// kept apart from the forcing term.
  double initial_data_l2 = 0.0;
};

/// Needs a completed trajectory with at least two samples.
DecompositionRun decompose(const Trajectory& run, const GalerkinSystem& system,
                           const DecompositionOptions& options = {});

/// Smoothing of the truncated heat semigroup from L2 into H^s.
struct SmoothingConstant {
  double discrete = 0.0;  // max over eigenvalues of lambda^{s/2} e^{-lambda t}
  double ceiling = 0.0;   // sup over lambda > 0: (s / (2 e t))^{s/2}
};

SmoothingConstant smoothing_constant(const Basis& basis, double s, double t);

struct KernelPoint {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // rhs - lhs
  int levels = 0;       // refinement levels used
  bool flagged = false; // refinement budget exhausted
};

struct KernelOptions {
  int time_count = 5;         // t = T k / time_count, k = 1..time_count
  int points_per_axis = 3;    // x = lx i / (n + 1), interior points
  double tolerance = 1e-3;    // margin >= -tolerance * max rhs
  double quad_rel_tol = 1e-6; // refinement stops when successive levels agree
  int max_levels = 10;
  int refinement = 4;         // source grid = basis grid refined per axis
  unsigned threads = 1;
};

struct KernelReport {
  std::vector<KernelPoint> points;
  double max_rhs = 0.0;
  double min_margin = 0.0;
  std::size_t flagged = 0;
  double kernel_mass = 0.0;  // (1/(4 pi t)) int_{R^2} e^{-|z|^2/(4t)} dz
  bool holds = false;
};

/// Free-space heat kernel integrated over the plane by adaptive quadrature.
double kernel_mass(double t);

/// Time-dependent grid source |S(s, y)| sampled on `times`, linear in s
/// between samples.
struct GridSource {
  std::vector<double> times;
  std::vector<GridField> values;
};

/// (1/(4 pi)) int_0^t (t-s)^{-1} int_Omega e^{-|x-y|^2/(4(t-s))} S(s,y) dy ds,
/// with `basis` supplying the grid geometry of the source.
/// The y-integral treats S as constant on grid cells and integrates the
/// Gaussian exactly (erf); the s-integral is taken in sigma = sqrt(t - s) by
/// 4-point Gauss-Legendre panels between sample times, halved until two
/// levels agree.
KernelPoint free_space_bound(const Basis& basis, const GridSource& source, double t, double x,
                             double y, const KernelOptions& options = {});

/// |u + u_t| against the free-space convolution of |f1(w_t)| at the sample
/// points, plus the kernel-mass subcheck.
KernelReport kernel_bound_check(const DecompositionRun& run, const Trajectory& base,
                                const GalerkinSystem& system, const KernelOptions& options = {});

/// Dirichlet solution with source phi_11 on [0, t] against the free-space
/// convolution at the same points (maximum principle).
KernelReport maximum_principle_check(const Basis& basis, double horizon,
                                     const KernelOptions& options = {});

struct LinfSample {
  double t = 0.0;
  double measured = 0.0;  // ||u(t)||_inf on the oversampled grid
  bool holds = false;
};

struct LinfReport {
  double alpha = 0.5;
  double horizon = 0.0;
  double shifted_cum = 0.0;  // int_0^T <f1(w_t), w_t>
  double epsilon = 0.0;      // minimiser of the bound over (0, 10]
  double kappa = 0.0;
  double bound = 0.0;
  double max_measured = 0.0;
  std::vector<LinfSample> samples;
  bool holds = false;
  std::string note;
};

/// 2 eps / ((2 - a)(1 - a)) T^{3-a} + T k_{eps,T} / (4 pi) int_0^T <f1(w_t), w_t>.
double linf_bound(const Nonlinearity& damping, double lambda1, double epsilon, double alpha,
                  double horizon, double shifted_cum);

/// Evaluates the bound at the searched epsilon (or at `epsilon` when > 0)
/// and compares it with ||u(t)||_inf at every sample. The search is a
/// golden-section minimisation in log(eps) over [1e-6, 10].
LinfReport linf_bound_check(const DecompositionRun& run, const Trajectory& base,
                            const GalerkinSystem& system, double alpha = 0.5,
                            double epsilon = 0.0);

}  // namespace sdwave
