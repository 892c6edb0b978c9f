#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "holodisc/types.hpp"

namespace holodisc {

namespace diskops {
class CauchyGreenKernel;
}

/// Polar tensor grid on the unit disc: Gauss-Legendre radii in (0, 1) and
/// equispaced angles. Node (j, k) is r_j e^{i theta_k}; weight r_j w_j dtheta.
class DiscGrid {
public:
  static constexpr int kMinRadial = 3;
  static constexpr int kMinAngular = 4;

  /// Grids are shared and immutable; identical sizes reuse one instance so the
  /// Cauchy-Green kernel is built once per size.
  static std::shared_ptr<const DiscGrid> create(int n_r, int n_theta);

  int n_r() const { return n_r_; }
  int n_theta() const { return n_theta_; }
  std::size_t size() const { return static_cast<std::size_t>(n_r_) * n_theta_; }

  double radius(int j) const { return radii_[static_cast<std::size_t>(j)]; }
  double angle(int k) const;
  cplx node(int j, int k) const;
  /// Area weight of node (j, k), independent of k.
  double weight(int j) const { return area_weights_[static_cast<std::size_t>(j)]; }

  const std::vector<double>& radii() const { return radii_; }
  const std::vector<double>& radial_weights() const { return radial_weights_; }
  const std::vector<double>& barycentric() const { return bary_; }
  const RMatrix& radial_derivative() const { return d_radial_; }

  /// Lazily built (thread-safe) kernel of the Cauchy-Green transform.
  const diskops::CauchyGreenKernel& cauchy_green_kernel() const;

  DiscGrid(int n_r, int n_theta);

private:
  int n_r_;
  int n_theta_;
  std::vector<double> radii_;
  std::vector<double> radial_weights_;
  std::vector<double> area_weights_;
  std::vector<double> bary_;
  RMatrix d_radial_;
  mutable std::once_flag kernel_once_;
  mutable std::shared_ptr<const diskops::CauchyGreenKernel> kernel_;
};

using GridPtr = std::shared_ptr<const DiscGrid>;

/// Complex samples on a DiscGrid, stored as an n_r x n_theta matrix, with an
/// optional trace at the boundary angles.
class GridFunction {
public:
  GridFunction() = default;
  explicit GridFunction(GridPtr grid);
  GridFunction(GridPtr grid, CMatrix values, std::optional<CVector> boundary = std::nullopt);

  template <class F>
  static GridFunction sample(GridPtr grid, F&& f, bool with_boundary = false) {
    GridFunction g(grid);
    for (int j = 0; j < grid->n_r(); ++j)
      for (int k = 0; k < grid->n_theta(); ++k) g.values_(j, k) = f(grid->node(j, k));
    if (with_boundary) {
      CVector b(grid->n_theta());
      for (int k = 0; k < grid->n_theta(); ++k) b(k) = f(std::polar(1.0, grid->angle(k)));
      g.boundary_ = b;
    }
    return g;
  }

  const GridPtr& grid() const { return grid_; }
  const CMatrix& values() const { return values_; }
  CMatrix& values() { return values_; }
  cplx operator()(int j, int k) const { return values_(j, k); }
  cplx& operator()(int j, int k) { return values_(j, k); }

  const std::optional<CVector>& boundary() const { return boundary_; }
  void set_boundary(CVector b) { boundary_ = std::move(b); }

  bool all_finite() const;
  double sup_norm() const;
  /// (sum_nodes weight |f|^p)^{1/p}
  double lp_norm(double p) const;

private:
  GridPtr grid_;
  CMatrix values_;
  std::optional<CVector> boundary_;
};

/// Samples of a boundary function at the grid's boundary angles 2 pi k / n.
struct BoundaryFunction {
  CVector samples;
  bool real_valued = true;

  int size() const { return static_cast<int>(samples.size()); }
  double angle(int k) const { return 2.0 * kPi * k / static_cast<double>(samples.size()); }

  template <class F>
  static BoundaryFunction sample(int n_theta, F&& f, bool real_valued = true) {
    BoundaryFunction b;
    b.samples.resize(n_theta);
    b.real_valued = real_valued;
    for (int k = 0; k < n_theta; ++k) b.samples(k) = f(2.0 * kPi * k / n_theta);
    return b;
  }

  /// Built-in cutoff: 0 on theta in [0, pi], -(4 s(1-s))^8 with
  /// s = (theta - pi)/pi on (pi, 2 pi). C^7, range [-1, 0].
  static BoundaryFunction cutoff(int n_theta);
  static double cutoff_value(double theta);

  /// Throws BadCutoff unless real with range [-1, 0], zero on the closed
  /// upper half-circle and negative on the open lower half-circle.
  void validate_cutoff() const;
};

namespace diskops {

enum class Stencil {
  FiniteDifference, ///< 3-point radial, central angular; second order
  Spectral,         ///< Gauss-Legendre radial, Fourier angular
};

/// Precomputed radial kernels of the Cauchy-Green transform per Fourier mode.
class CauchyGreenKernel {
public:
  explicit CauchyGreenKernel(const DiscGrid& grid);
  /// Row block for DFT index q; rows are grid radii followed by r = 1.
  const RMatrix& mode(int q) const { return kernels_[static_cast<std::size_t>(q)]; }

private:
  std::vector<RMatrix> kernels_;
};

/// Tf(zeta) = (1 / 2 pi i) int_D f(w) dw ^ dwbar / (w - zeta), evaluated on the
/// grid nodes with the trace at r = 1 attached as the boundary.
GridFunction cauchy_green(const GridFunction& f);

/// Tf at arbitrary points (inside, on, or outside the disc).
std::vector<cplx> cauchy_green(const GridFunction& f, std::span<const cplx> points);

/// (Tf(0), d/dzeta Tf(0), d/dzetabar Tf(0)).
struct OriginJet {
  cplx value;
  cplx d_zeta;
  cplx d_zetabar;
};
OriginJet cauchy_green_at_origin(const GridFunction& f);

/// Schwarz integral of sampled boundary data, as the truncated series
/// phi_0 + 2 sum_{k>=1} phi_k zeta^k.
class SchwarzIntegral {
public:
  explicit SchwarzIntegral(const BoundaryFunction& phi);

  cplx operator()(cplx zeta) const;
  cplx derivative(cplx zeta) const;
  /// Values on all grid nodes, with the trace at the boundary angles.
  GridFunction on_grid(const GridPtr& grid) const;
  const CVector& coefficients() const { return coeffs_; }

private:
  CVector coeffs_; // zeta^k coefficients, k = 0..n/2
};

/// Throws OutsideDisc for |zeta| > 1.
std::vector<cplx> schwarz(const BoundaryFunction& phi, std::span<const cplx> points);

/// d/dzetabar = (e^{i theta}/2)(d/dr + (i/r) d/dtheta) on the grid.
GridFunction dbar(const GridFunction& u, Stencil stencil = Stencil::FiniteDifference);
/// d/dzeta = (e^{-i theta}/2)(d/dr - (i/r) d/dtheta).
GridFunction dzeta(const GridFunction& u, Stencil stencil = Stencil::FiniteDifference);

/// Spectral interpolation of grid samples at arbitrary |zeta| <= 1.
class GridInterpolant {
public:
  explicit GridInterpolant(const GridFunction& f);
  cplx operator()(cplx zeta) const;

private:
  GridPtr grid_;
  CMatrix modes_; // n_r x n_theta Fourier coefficients per radius
};

/// Row-wise DFT helpers (forward unscaled, inverse scaled by 1/n).
CMatrix dft_rows(const CMatrix& values);
CMatrix idft_rows(const CMatrix& modes);
/// Signed mode number for DFT index q.
inline int mode_number(int q, int n) { return q < n / 2 ? q : q - n; }

} // namespace diskops
} // namespace holodisc
