#include "sdwave/system.hpp"

#include <cmath>

#include "sdwave/errors.hpp"

namespace sdwave {

ProjectedData project_initial_data(const SpectralField& w0, const SpectralField& w1,
                                   const Basis& basis) {
  if (w0.modes() != basis.modes() || w1.modes() != basis.modes()) {
    throw ConfigError("initial data size does not match the basis");
  }
  return {PhaseState{w0, w1, 0.0}, std::nullopt, std::nullopt};
}

namespace {

double truncated_mass(const GridField& grid, const SpectralField& kept, const Basis& basis) {
  const double total = basis.quadrature_l2(grid);
  if (total == 0.0) return 0.0;
  // by discrete Parseval the discarded part is orthogonal to the kept one
  const double kept_norm = basis.sobolev_norm(kept, 0.0);
  const double discarded_sq = std::max(0.0, total * total - kept_norm * kept_norm);
  return std::sqrt(discarded_sq) / total;
}

}  // namespace

ProjectedData project_initial_data(const GridField& w0, const GridField& w1, const Basis& basis) {
  ProjectedData out;
  out.state.w = basis.to_spectral(w0);
  out.state.wt = basis.to_spectral(w1);
  out.truncated_mass_w0 = truncated_mass(w0, out.state.w, basis);
  out.truncated_mass_w1 = truncated_mass(w1, out.state.wt, basis);
  return out;
}

GalerkinSystem::GalerkinSystem(Basis basis, Nonlinearity damping, Nonlinearity source,
                               SpectralField forcing)
    : basis_(std::move(basis)),
      damping_(std::move(damping)),
      source_(std::move(source)),
      forcing_(std::move(forcing)) {
  if (forcing_.modes() != basis_.modes()) throw ConfigError("forcing size does not match the basis");
}

SpectralField GalerkinSystem::nonlinear_forcing(const PhaseState& state) const {
  const GridField w = basis_.to_grid(state.w);
  const GridField wt = basis_.to_grid(state.wt);
  GridField out(basis_.grid_points());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = -damping_.value(wt[i]) - source_.value(w[i]);
  }
  return basis_.to_spectral(out);
}

}  // namespace sdwave
