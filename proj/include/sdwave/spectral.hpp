#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace sdwave {

/// Axis-aligned rectangle (0, lx) x (0, ly).
struct Domain {
  double lx = 1.0;
  double ly = 1.0;

  Domain() = default;
  Domain(double lx_, double ly_);
};

/// Coefficients c_{jk}, 1 <= j,k <= N, in the orthonormal Dirichlet sine
/// basis. Stored row-major with j as the slow index.
class SpectralField {
 public:
  SpectralField() = default;
  explicit SpectralField(int modes);

  int modes() const noexcept { return n_; }
  std::size_t size() const noexcept { return c_.size(); }

  double& operator()(int j, int k) { return c_[index(j, k)]; }
  double operator()(int j, int k) const { return c_[index(j, k)]; }
  double& operator[](std::size_t i) { return c_[i]; }
  double operator[](std::size_t i) const { return c_[i]; }

  std::span<double> data() noexcept { return c_; }
  std::span<const double> data() const noexcept { return c_; }

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double a);
  /// this += a * x
  SpectralField& axpy(double a, const SpectralField& x);

  bool all_finite() const noexcept;
  double dot(const SpectralField& other) const;

  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }

 private:
  std::size_t index(int j, int k) const noexcept {
    return static_cast<std::size_t>(j - 1) * static_cast<std::size_t>(n_) +
           static_cast<std::size_t>(k - 1);
  }

  int n_ = 0;
  std::vector<double> c_;
};

/// Values on the interior points x_i = i*hx, y_l = l*hy (1 <= i,l <= M) of a
/// tensor grid with hx = lx/(M+1). Boundary values are implicitly zero.
class GridField {
 public:
  GridField() = default;
  explicit GridField(int points);

  int points() const noexcept { return m_; }
  double& operator()(int i, int l) { return v_[index(i, l)]; }
  double operator()(int i, int l) const { return v_[index(i, l)]; }
  double& operator[](std::size_t i) { return v_[i]; }
  double operator[](std::size_t i) const { return v_[i]; }
  std::span<double> data() noexcept { return v_; }
  std::span<const double> data() const noexcept { return v_; }
  std::size_t size() const noexcept { return v_.size(); }

 private:
  std::size_t index(int i, int l) const noexcept {
    return static_cast<std::size_t>(i - 1) * static_cast<std::size_t>(m_) +
           static_cast<std::size_t>(l - 1);
  }

  int m_ = 0;
  std::vector<double> v_;
};

namespace detail {
class SineTransform;
}

/// Dirichlet eigenbasis of -Laplace on a rectangle, truncated to N x N modes,
/// with an M x M pseudo-spectral grid (M >= 2N) for nonlinear terms.
///
/// Eigenfunctions phi_{jk}(x,y) = 2/sqrt(lx*ly) sin(j pi x/lx) sin(k pi y/ly)
/// with eigenvalues pi^2 (j^2/lx^2 + k^2/ly^2). Transforms are discrete sine
/// transforms of type I; on the retained modes they are exact inverses and the
/// grid quadrature reproduces the L2 inner product (discrete Parseval).
///
/// Immutable after construction and safe to share across threads.
class Basis {
 public:
  Basis(Domain domain, int modes, int grid_points, int linf_factor = 4);

  const Domain& domain() const noexcept { return domain_; }
  int modes() const noexcept { return n_; }
  int grid_points() const noexcept { return m_; }
  int linf_points() const noexcept { return m_linf_; }
  double hx() const noexcept { return domain_.lx / (m_ + 1); }
  double hy() const noexcept { return domain_.ly / (m_ + 1); }
  double x(int i) const noexcept { return i * hx(); }
  double y(int l) const noexcept { return l * hy(); }

  double eigenvalue(int j, int k) const;
  /// Laid out like SpectralField::data().
  std::span<const double> eigenvalues() const noexcept { return eigenvalues_; }
  double lambda1() const noexcept { return lambda1_; }

  SpectralField zero_field() const { return SpectralField(n_); }
  GridField zero_grid() const { return GridField(m_); }

  GridField to_grid(const SpectralField& field) const;
  SpectralField to_spectral(const GridField& grid) const;

  /// (sum lambda^s c^2)^(1/2). s = 0 is the L2 norm, s = 1 the gradient norm.
  double sobolev_norm(const SpectralField& field, double s) const;

  /// Maximum of |field| over an oversampled grid of linf_factor*N+1 points per
  /// axis. A lower bound on the true sup-norm.
  double linf_norm(const SpectralField& field) const;

  double eigenfunction(int j, int k, double x, double y) const;
  /// Point synthesis of the truncated series.
  double evaluate(const SpectralField& field, double x, double y) const;

  GridField sample(const std::function<double(double, double)>& fn) const;
  /// Grid quadrature hx*hy*sum(g), the discrete analogue of the integral.
  double integrate(const GridField& grid) const;
  double quadrature_l2(const GridField& grid) const;

 private:
  Domain domain_;
  int n_;
  int m_;
  int m_linf_;
  double lambda1_;
  std::vector<double> eigenvalues_;
  std::shared_ptr<const detail::SineTransform> grid_dst_;
  std::shared_ptr<const detail::SineTransform> linf_dst_;
};

/// Checked factory: N >= 1, M >= 2N.
Basis build_basis(Domain domain, int modes, int grid_points, int linf_factor = 4);

}  // namespace sdwave
