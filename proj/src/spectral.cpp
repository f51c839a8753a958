#include "sdwave/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include <fmt/format.h>

#include "sdwave/errors.hpp"

namespace sdwave {

Domain::Domain(double lx_, double ly_) : lx(lx_), ly(ly_) {
  if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly)) {
    throw ConfigError(fmt::format("domain lengths must be positive (got {} x {})", lx, ly));
  }
}

SpectralField::SpectralField(int modes) : n_(modes), c_(static_cast<std::size_t>(modes) * modes, 0.0) {}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  if (other.n_ != n_) throw ConfigError("spectral field size mismatch");
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += other.c_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  if (other.n_ != n_) throw ConfigError("spectral field size mismatch");
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= other.c_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double a) {
  for (double& c : c_) c *= a;
  return *this;
}

SpectralField& SpectralField::axpy(double a, const SpectralField& x) {
  if (x.n_ != n_) throw ConfigError("spectral field size mismatch");
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += a * x.c_[i];
  return *this;
}

bool SpectralField::all_finite() const noexcept {
  return std::all_of(c_.begin(), c_.end(), [](double c) { return std::isfinite(c); });
}

double SpectralField::dot(const SpectralField& other) const {
  if (other.n_ != n_) throw ConfigError("spectral field size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < c_.size(); ++i) s += c_[i] * other.c_[i];
  return s;
}

GridField::GridField(int points) : m_(points), v_(static_cast<std::size_t>(points) * points, 0.0) {}

namespace detail {

// Two-dimensional in-place DST-I (FFTW RODFT00) on an m x m array.
// Y_{ab} = 4 sum_{ij} X_{ij} sin(pi (i+1)(a+1)/(m+1)) sin(pi (j+1)(b+1)/(m+1)).
class SineTransform {
 public:
  explicit SineTransform(int m) : m_(m) {
    std::vector<double> scratch(static_cast<std::size_t>(m) * m, 0.0);
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan_ = fftw_plan_r2r_2d(m, m, scratch.data(), scratch.data(), FFTW_RODFT00, FFTW_RODFT00,
                             FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan_ == nullptr) throw ConfigError("failed to plan sine transform");
  }

  ~SineTransform() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }

  SineTransform(const SineTransform&) = delete;
  SineTransform& operator=(const SineTransform&) = delete;

  int size() const noexcept { return m_; }

  // new-array execution is thread-safe in FFTW
  void execute(std::span<double> data) const { fftw_execute_r2r(plan_, data.data(), data.data()); }

 private:
  static std::mutex& planner_mutex() {
    static std::mutex mutex;
    return mutex;
  }

  int m_;
  fftw_plan plan_ = nullptr;
};

}  // namespace detail

Basis::Basis(Domain domain, int modes, int grid_points, int linf_factor)
    : domain_(domain), n_(modes), m_(grid_points) {
  if (modes < 1) throw ConfigError(fmt::format("modes per axis must be >= 1 (got {})", modes));
  if (grid_points < 2 * modes) {
    throw ConfigError(
        fmt::format("grid points per axis must be >= 2N = {} (got {})", 2 * modes, grid_points));
  }
  if (linf_factor < 1) throw ConfigError("linf sampling factor must be >= 1");
  // odd point count puts a sample on the domain centre
  m_linf_ = linf_factor * modes + 1;

  constexpr double pi2 = std::numbers::pi * std::numbers::pi;
  eigenvalues_.resize(static_cast<std::size_t>(n_) * n_);
  const double ax = 1.0 / (domain_.lx * domain_.lx);
  const double ay = 1.0 / (domain_.ly * domain_.ly);
  for (int j = 1; j <= n_; ++j) {
    for (int k = 1; k <= n_; ++k) {
      eigenvalues_[static_cast<std::size_t>(j - 1) * n_ + (k - 1)] = pi2 * (j * j * ax + k * k * ay);
    }
  }
  lambda1_ = pi2 * (ax + ay);

  grid_dst_ = std::make_shared<detail::SineTransform>(m_);
  linf_dst_ = std::make_shared<detail::SineTransform>(m_linf_);
}

Basis build_basis(Domain domain, int modes, int grid_points, int linf_factor) {
  return Basis(domain, modes, grid_points, linf_factor);
}

double Basis::eigenvalue(int j, int k) const {
  if (j < 1 || k < 1 || j > n_ || k > n_) throw ConfigError("mode index out of range");
  return eigenvalues_[static_cast<std::size_t>(j - 1) * n_ + (k - 1)];
}

namespace {

// Zero-pads N x N coefficients into an m x m buffer.
std::vector<double> pad(const SpectralField& field, int m) {
  const int n = field.modes();
  std::vector<double> buf(static_cast<std::size_t>(m) * m, 0.0);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      buf[static_cast<std::size_t>(j) * m + k] = field(j + 1, k + 1);
    }
  }
  return buf;
}

}  // namespace

GridField Basis::to_grid(const SpectralField& field) const {
  if (field.modes() != n_) {
    throw ConfigError(fmt::format("field has {} modes, basis has {}", field.modes(), n_));
  }
  GridField grid(m_);
  std::vector<double> buf = pad(field, m_);
  grid_dst_->execute(buf);
  const double scale = 1.0 / (2.0 * std::sqrt(domain_.lx * domain_.ly));
  for (std::size_t i = 0; i < buf.size(); ++i) grid[i] = buf[i] * scale;
  return grid;
}

SpectralField Basis::to_spectral(const GridField& grid) const {
  if (grid.points() != m_) {
    throw ConfigError(fmt::format("grid has {} points per axis, basis has {}", grid.points(), m_));
  }
  std::vector<double> buf(grid.data().begin(), grid.data().end());
  grid_dst_->execute(buf);
  const double scale = hx() * hy() / (2.0 * std::sqrt(domain_.lx * domain_.ly));
  SpectralField field(n_);
  for (int j = 0; j < n_; ++j) {
    for (int k = 0; k < n_; ++k) {
      field(j + 1, k + 1) = buf[static_cast<std::size_t>(j) * m_ + k] * scale;
    }
  }
  return field;
}

double Basis::sobolev_norm(const SpectralField& field, double s) const {
  if (field.modes() != n_) throw ConfigError("field/basis size mismatch");
  if (s < 0.0) throw ConfigError("Sobolev exponent must be >= 0");
  double sum = 0.0;
  const auto c = field.data();
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double weight = s == 0.0 ? 1.0 : std::pow(eigenvalues_[i], s);
    sum += weight * c[i] * c[i];
  }
  return std::sqrt(sum);
}

double Basis::linf_norm(const SpectralField& field) const {
  if (field.modes() != n_) throw ConfigError("field/basis size mismatch");
  std::vector<double> buf = pad(field, m_linf_);
  linf_dst_->execute(buf);
  double peak = 0.0;
  for (double v : buf) peak = std::max(peak, std::abs(v));
  return peak / (2.0 * std::sqrt(domain_.lx * domain_.ly));
}

double Basis::eigenfunction(int j, int k, double x, double y) const {
  using std::numbers::pi;
  return 2.0 / std::sqrt(domain_.lx * domain_.ly) * std::sin(j * pi * x / domain_.lx) *
         std::sin(k * pi * y / domain_.ly);
}

double Basis::evaluate(const SpectralField& field, double x, double y) const {
  using std::numbers::pi;
  std::vector<double> sx(static_cast<std::size_t>(n_));
  std::vector<double> sy(static_cast<std::size_t>(n_));
  for (int j = 1; j <= n_; ++j) {
    sx[j - 1] = std::sin(j * pi * x / domain_.lx);
    sy[j - 1] = std::sin(j * pi * y / domain_.ly);
  }
  double sum = 0.0;
  for (int j = 1; j <= n_; ++j) {
    double row = 0.0;
    for (int k = 1; k <= n_; ++k) row += field(j, k) * sy[k - 1];
    sum += row * sx[j - 1];
  }
  return 2.0 / std::sqrt(domain_.lx * domain_.ly) * sum;
}

GridField Basis::sample(const std::function<double(double, double)>& fn) const {
  GridField grid(m_);
  for (int i = 1; i <= m_; ++i) {
    for (int l = 1; l <= m_; ++l) grid(i, l) = fn(x(i), y(l));
  }
  return grid;
}

double Basis::integrate(const GridField& grid) const {
  double sum = 0.0;
  for (double v : grid.data()) sum += v;
  return sum * hx() * hy();
}

double Basis::quadrature_l2(const GridField& grid) const {
  double sum = 0.0;
  for (double v : grid.data()) sum += v * v;
  return std::sqrt(sum * hx() * hy());
}

}  // namespace sdwave
