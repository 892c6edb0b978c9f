#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "holodisc/discsolve.hpp"
#include "holodisc/fields.hpp"
#include "holodisc/polynomial.hpp"

namespace holodisc {

/// W = {rho_j < 0, j = 1..k} with edge E = {rho_j = 0}. Graph wedges use
/// rho_j = x_j - h_j(y) with h(0) = 0, dh(0) = 0; the model wedge has h = 0.
class WedgeDomain {
public:
  static WedgeDomain model(int n, double delta = 0.1);
  static WedgeDomain graph(std::vector<RealPolynomial> h, ComplexMatrixField a, double delta = 0.1);
  static WedgeDomain general(std::vector<ScalarField> rho, ComplexMatrixField a, double delta = 0.1);

  int dimension() const { return n_; }
  int faces() const { return static_cast<int>(rho_.size()); }
  bool is_model() const { return model_; }
  bool is_graph() const { return !h_.empty(); }
  double delta() const { return delta_; }
  const ComplexMatrixField& structure() const { return a_; }
  const std::vector<RealPolynomial>& edge_graph() const { return h_; }
  const ScalarField& defining(int j) const { return rho_[static_cast<std::size_t>(j)]; }

  RVector rho(const CVector& z) const;
  /// All rho_j < -margin.
  bool contains(const CVector& z, double margin = 0.0) const;
  /// rho_j - delta sum_{k != j} rho_k < 0 for all j.
  bool in_shrunken(const CVector& z) const;
  double edge_defect(const CVector& z) const { return rho(z).cwiseAbs().maxCoeff(); }
  /// h(y) + i y (graph and model wedges only).
  CVector edge_point(const RVector& y) const;
  /// h(y) for a graph wedge, zero for the model.
  RVector graph_value(const RVector& y) const;

  /// Smallest singular value of the k x n matrix of dbar_J rho_j coefficients.
  double genericity(const CVector& z) const;
  /// Totally real edge: k = n and the genericity bound positive on the samples.
  double check_genericity(const std::vector<CVector>& edge_points) const;

private:
  WedgeDomain(int n, std::vector<ScalarField> rho, ComplexMatrixField a, double delta)
      : n_(n), rho_(std::move(rho)), a_(std::move(a)), delta_(delta) {}

  int n_;
  std::vector<ScalarField> rho_;
  ComplexMatrixField a_;
  double delta_;
  bool model_ = false;
  std::vector<RealPolynomial> h_;
};

/// Circular cone {z : angle(z - p, axis) < half_angle} in R^{2n}.
struct Cone {
  CVector vertex;
  CVector axis; ///< unit length in the real inner product
  double half_angle = 0.0;
  double requested_angle = 0.0;
  int shrinks = 0;
};

bool cone_membership(const Cone& k, const CVector& z);

/// Builds a cone with vertex p on the edge, shrinking the half-angle by 0.9
/// until sampled cone points up to distance r_probe lie in the wedge.
Cone build_cone(const CVector& p, const CVector& direction, double half_angle, const WedgeDomain& w,
                double r_probe = 0.1);

/// Real inner product <u, v> on C^n = R^{2n}.
double real_dot(const CVector& u, const CVector& v);

/// (c, t) with c in R^n, t in (0, inf)^n. The family is indexed by
/// c_1 = 0, t_1 = 1 and the remaining n - 1 entries of each.
struct FamilyParams {
  RVector c;
  RVector t;

  static FamilyParams reduced(const RVector& c_rest, const RVector& t_rest);
  static FamilyParams unit(int n);
};

/// z_j = t_j S phi + i c_j on the grid, with the boundary trace.
DiscMap flat_family(const FamilyParams& p, const BoundaryFunction& phi, const GridPtr& grid,
                    bool validate_cutoff = true);

struct GluedOptions {
  double tol_interior = 1e-8;
  double tol_boundary = 1e-10;
  int max_iter = 80;
  diskops::Stencil stencil = diskops::Stencil::Spectral;
};

/// J-holomorphic disc with Re z = t phi + h(Im z) on the boundary circle (so
/// glued to x = h(y) along the upper arc). Fixed point of
///   z = t S phi + i c + S[h(Im z) - Re T g] + T g,  g = A(z) conj(z)_zetabar.
DiscMap glued_family(const std::vector<RealPolynomial>& h, const ComplexMatrixField& a, const FamilyParams& p,
                     const BoundaryFunction& phi, const GridPtr& grid, const GluedOptions& opts = {});

/// Disc family over a wedge: flat when the wedge is the model and A = 0.
class DiscFamily {
public:
  DiscFamily(WedgeDomain wedge, BoundaryFunction phi, GridPtr grid, GluedOptions opts = {});

  const WedgeDomain& wedge() const { return wedge_; }
  const BoundaryFunction& phi() const { return phi_; }
  const GridPtr& grid() const { return grid_; }
  bool flat() const { return flat_; }
  const diskops::SchwarzIntegral& schwarz() const { return s_; }

  DiscMap disc(const FamilyParams& p) const;
  /// Ev(c, t, zeta).
  CVector evaluate(const FamilyParams& p, cplx zeta) const;

private:
  WedgeDomain wedge_;
  BoundaryFunction phi_;
  GridPtr grid_;
  GluedOptions opts_;
  diskops::SchwarzIntegral s_;
  bool flat_;
};

CVector evaluation_map(const DiscFamily& f, const FamilyParams& p, cplx zeta);

struct InversionOptions {
  int multistart = 8;
  double tol = 1e-10;
  int max_newton = 40;
};

struct Inversion {
  FamilyParams params;
  cplx zeta;
  double residual = 0.0;
  int distinct_solutions = 1; ///< multistart roots that differ by more than 1e-6
};

/// Parameters with Ev(c, t, zeta) = w. Throws NotInWedge unless w is in W_delta
/// and InversionFailed when Newton stalls (message carries the best residual).
Inversion invert_evaluation(const DiscFamily& f, const CVector& w, const InversionOptions& opts = {});

struct FoliationOptions {
  std::vector<RVector> t_values; ///< reduced t vectors (length n - 1)
  int edge_samples = 16;
  int sheet_probes = 64;
  int coverage_samples = 16;
  double box = 0.1;              ///< sample box half-width
  std::uint64_t seed = 1;
};

struct FoliationReport {
  double edge_cover_defect = 0.0;  ///< max distance from edge samples to upper-arc images
  double sheet_defect = 0.0;       ///< max |t(w) - t| over probe points of each sheet
  double sheet_separation = 0.0;   ///< min distance between probe clouds of distinct sheets
  double coverage_rate = 0.0;      ///< fraction of W_delta samples inverted
  double coverage_residual = 0.0;  ///< worst residual among successful inversions
  int coverage_attempts = 0;
};

FoliationReport foliation_check(const DiscFamily& f, const FoliationOptions& opts);

} // namespace holodisc
