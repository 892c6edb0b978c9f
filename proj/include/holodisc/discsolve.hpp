#pragma once

#include <functional>
#include <string>
#include <vector>

#include "holodisc/diskops.hpp"
#include "holodisc/fields.hpp"

namespace holodisc {

struct SolveInfo {
  int iterations = 0;
  double residual = 0.0;      ///< sup |z_zetabar - A(z) conj(z)_zetabar| over nodes
  double contraction = 0.0;   ///< largest step ratio from the second iteration on
  double boundary_residual = 0.0; ///< glued discs: sup over the upper arc of |x - h(y)|
  bool solved = false;
  std::vector<double> steps;  ///< sup-norm of successive Picard updates
};

/// Sampled map z: D -> C^n. Component j is a GridFunction carrying its trace
/// on the boundary circle.
class DiscMap {
public:
  DiscMap() = default;
  DiscMap(GridPtr grid, std::vector<GridFunction> components, SolveInfo info = {});

  int dimension() const { return static_cast<int>(components_.size()); }
  const GridPtr& grid() const { return grid_; }
  const GridFunction& component(int j) const { return components_[static_cast<std::size_t>(j)]; }
  const std::vector<GridFunction>& components() const { return components_; }
  const SolveInfo& info() const { return info_; }
  SolveInfo& info() { return info_; }

  CVector at_node(int j, int k) const;
  /// Value on the boundary circle at angle index k.
  CVector boundary(int k) const;
  /// Spectral interpolation at |zeta| <= 1.
  CVector operator()(cplx zeta) const;
  /// Trigonometric interpolation of the boundary trace at angle theta.
  CVector boundary_at(double theta) const;

private:
  GridPtr grid_;
  std::vector<GridFunction> components_;
  std::vector<diskops::GridInterpolant> interp_;
  CMatrix boundary_modes_; // n x n_theta DFT coefficients of the trace
  SolveInfo info_;
};

/// n functions of zeta holomorphic in the disc (the J_st-holomorphic seed).
class HolomorphicSeed {
public:
  using Component = std::function<cplx(cplx)>;

  HolomorphicSeed(std::vector<Component> components, std::string description = {});

  /// Components separated by ';', each an expression in `zeta`.
  static HolomorphicSeed parse(std::string_view text);
  /// zeta -> p + zeta v
  static HolomorphicSeed linear(const CVector& p, const CVector& v);

  int dimension() const { return static_cast<int>(components_.size()); }
  const std::string& description() const { return description_; }
  CVector operator()(cplx zeta) const;
  const Component& component(int j) const { return components_[static_cast<std::size_t>(j)]; }

  /// Largest spectral dbar of the components on a small grid; holomorphic
  /// seeds sit near round-off.
  double dbar_defect() const;

private:
  std::vector<Component> components_;
  std::string description_;
};

struct SolveOptions {
  double tol = 1e-8;
  int max_iter = 50;
  diskops::Stencil stencil = diskops::Stencil::Spectral;
};

/// Fixed point of z -> h + T(A(z) conj(z)_zetabar).
DiscMap solve_disc(const ComplexMatrixField& a, const HolomorphicSeed& h, const GridPtr& grid,
                   const SolveOptions& opts = {});

/// sup over nodes and components of |z_zetabar - A(z) conj(z)_zetabar|.
double holomorphy_residual(const DiscMap& z, const ComplexMatrixField& a,
                           diskops::Stencil stencil = diskops::Stencil::Spectral);

/// Per-node residual vectors (n grid functions).
std::vector<GridFunction> holomorphy_residual_field(const DiscMap& z, const ComplexMatrixField& a,
                                                    diskops::Stencil stencil = diskops::Stencil::Spectral);

/// Value and real-direction derivative d/dx z(0) = z_zeta(0) + z_zetabar(0),
/// computed from the representation z = h + T g.
struct CenterJet {
  CVector value;
  CVector dx;
};

struct DiscThroughOptions {
  SolveOptions solve;
  int max_reseed = 12;
  double center_tol = 1e-8; // no tighter than solve.tol
};

/// Disc with z(0) = p and d/dx z(0) = v, built from the seed p' + zeta v' with
/// the seed corrected until the centre and direction match.
DiscMap disc_through(const ComplexMatrixField& a, const CVector& p, const CVector& v, const GridPtr& grid,
                     const DiscThroughOptions& opts = {});

CenterJet center_jet(const DiscMap& z, const ComplexMatrixField& a, const HolomorphicSeed& h);

namespace detail {
/// A(z) conj(z)_zetabar per component, on the grid.
std::vector<GridFunction> beltrami_density(const std::vector<GridFunction>& z, const ComplexMatrixField& a,
                                           diskops::Stencil stencil);
}

} // namespace holodisc
