#pragma once

#include <optional>

#include "sdwave/nonlinearity.hpp"
#include "sdwave/spectral.hpp"

namespace sdwave {

/// (w, w_t) at time t, both in spectral coefficients.
struct PhaseState {
  SpectralField w;
  SpectralField wt;
  double t = 0.0;

  bool all_finite() const { return w.all_finite() && wt.all_finite(); }
};

/// Initial data projected onto the truncated basis. truncated_mass is
/// ||discarded|| / ||total|| measured on the grid when the data came from
/// grid samples.
struct ProjectedData {
  PhaseState state;
  std::optional<double> truncated_mass_w0;
  std::optional<double> truncated_mass_w1;
};

ProjectedData project_initial_data(const SpectralField& w0, const SpectralField& w1,
                                   const Basis& basis);
ProjectedData project_initial_data(const GridField& w0, const GridField& w1, const Basis& basis);

/// The semi-discrete Galerkin system
///   c'' + lambda c' + lambda c = P[-f(w_t) - g(w)] + h
/// with the nonlinear terms evaluated pseudo-spectrally on the basis grid.
class GalerkinSystem {
 public:
  GalerkinSystem(Basis basis, Nonlinearity damping, Nonlinearity source, SpectralField forcing);

  const Basis& basis() const noexcept { return basis_; }
  const Nonlinearity& damping() const noexcept { return damping_; }
  const Nonlinearity& source() const noexcept { return source_; }
  const SpectralField& forcing() const noexcept { return forcing_; }
  double lambda1() const noexcept { return basis_.lambda1(); }

  /// P[-f(w_t) - g(w)] (the forcing h is kept separate). Throws
  /// SaturationError with the offending grid value.
  SpectralField nonlinear_forcing(const PhaseState& state) const;

 private:
  Basis basis_;
  Nonlinearity damping_;
  Nonlinearity source_;
  SpectralField forcing_;
};

}  // namespace sdwave
