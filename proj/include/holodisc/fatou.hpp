#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "holodisc/discsolve.hpp"
#include "holodisc/fields.hpp"
#include "holodisc/wedgefam.hpp"

namespace holodisc::fatou {

/// Scalar F on a wedge with declared bounds on |F| and on |F_zbar + F_z A|.
struct TestFunction {
  ScalarField f;
  double sup_bound = 0.0;
  double dbar_bound = 0.0;
  /// Known boundary value at an edge point, when one exists there.
  std::function<std::optional<cplx>(const CVector&)> limit_oracle;
  std::string description;

  /// (-z_1)^i on the model wedge.
  static TestFunction power_i(int n);
  /// (-z_1)^i + eps conj(z_1).
  static TestFunction power_i_perturbed(int n, double eps, double radius = 4.0);
  /// e^{z_1} + eps conj(z_1). Sup bounds of the perturbed functions hold on |z| <= radius.
  static TestFunction exp_perturbed(int n, double eps, double radius = 4.0);
  /// From an expression in z1..zn, zb1..zbn, x1.., y1..
  static TestFunction from_expression(const std::string& text, int n, double sup_bound, double dbar_bound);
};

struct SpotCheck {
  double max_abs = 0.0;
  double max_residual = 0.0;
  bool ok = true;
};

/// Samples |F| and the residual norm against the declared bounds.
SpotCheck spot_check(const TestFunction& f, const ComplexMatrixField& a, const std::vector<CVector>& points);

/// f = F o z and its dbar on a disc.
struct Restriction {
  GridFunction f;
  GridFunction f_dbar;         ///< chain rule: (F_zbar + F_z A) conj(z)_zetabar
  GridFunction f_dbar_direct;  ///< spectral dbar of the sampled f
  double sup_f_dbar = 0.0;
  double bound = 0.0;          ///< dbar_bound * sup |conj(z)_zetabar|
  double consistency = 0.0;    ///< sup |f_dbar - f_dbar_direct|
};

/// Throws DiscExitsWedge when an interior node leaves the wedge (if given).
Restriction restrict_to_disc(const TestFunction& f, const DiscMap& z, const ComplexMatrixField& a,
                             const WedgeDomain* wedge = nullptr);

struct HolderPair {
  cplx a;
  cplx b;
};

/// Seeded pairs in r D with separations log-uniform in [1e-3, r].
std::vector<HolderPair> holder_pairs(double r, int count, std::uint64_t seed);

struct HolderReport {
  double c_hat = 0.0;          ///< max |df| / ((|f|_inf + |f_zetabar|_p) |dzeta|^{1-2/p})
  double exponent = 1.0;       ///< least-squares slope of log|df| against log|dzeta|; 1 if f is constant
  double sup_norm = 0.0;
  double lp_norm = 0.0;
  double p = 4.0;
  bool finite = true;
};

/// Throws PairOutsideDisc if a pair point lies outside r D, InvalidArgument if p <= 2.
HolderReport holder_bound_check(const GridFunction& f, const GridFunction& f_dbar, double p,
                                const std::vector<HolderPair>& pairs, double r);

/// C_hat per grid size plus the ratio max / min.
struct RefinementReport {
  std::vector<int> sizes;
  std::vector<double> c_hat;
  double spread = 0.0;
  bool stable = false;
};

/// Runs holder_bound_check on restrictions built at n x n grids for each size.
RefinementReport holder_refinement(const std::function<Restriction(const GridPtr&)>& make,
                                   const std::vector<int>& sizes, double p,
                                   const std::vector<HolderPair>& pairs, double r);

/// Hölder constants of the rescaled functions f(rho zeta) for each rho, and
/// the ratio of the largest to the rho = 1 value.
struct QuotientReport {
  std::vector<double> rhos;
  std::vector<double> c_hat;
  double ratio = 0.0;
  bool ok = false;
};

QuotientReport holder_quotient_check(const GridFunction& f, const GridFunction& f_dbar, double p,
                                     const std::vector<HolderPair>& pairs, double r,
                                     const std::vector<double>& rhos = {0.2, 0.5, 1.0});

struct ApproachSpec {
  double start = 0.1;      ///< first distance to the boundary point
  double ratio = 0.5;      ///< geometric factor between steps
  int steps = 12;
  double angle = 0.0;      ///< approach angle measured from the inward normal
  double aperture = kPi / 4; ///< Stolz half-angle
  double threshold = 1e-3; ///< tail oscillation that counts as no limit
};

struct LimitEstimate {
  bool has_limit = false;
  cplx limit{};
  double error_bar = 0.0;
  double ratio = 0.0;      ///< estimated decay of successive differences
  double oscillation = 0.0;
  std::vector<double> differences;
};

/// Limit of values sampled at distances s_k = s_0 ratio^k. The estimate is
/// polynomial extrapolation to s = 0 through the last four samples; the error
/// bar is its gap to the three-point estimate. No limit when the successive
/// differences do not decay (ratio >= 0.9) and the tail oscillates by more
/// than the threshold.
LimitEstimate extrapolate_limit(const std::vector<cplx>& values, double ratio, double threshold);

/// Values of F at p + s_k d along a real or complex direction d.
LimitEstimate ray_limit(const ScalarField& f, const CVector& p, const CVector& d, const ApproachSpec& spec);

/// Approaches zeta0 on the circle; throws ApproachTangential outside the Stolz angle.
LimitEstimate radial_limit_probe(const std::function<cplx(cplx)>& f, cplx zeta0, const ApproachSpec& spec = {});
LimitEstimate radial_limit_probe(const GridFunction& f, cplx zeta0, const ApproachSpec& spec = {});

struct Curve {
  std::function<CVector(double)> gamma;
  std::string description;
  CVector operator()(double t) const { return gamma(t); }
  CVector derivative(double t) const;
};

/// gamma(1) on the edge and d rho_j(gamma'(1)) != 0 for every face.
bool is_admissible(const Curve& c, const WedgeDomain& w, double tol = 1e-8);

struct LindelofOptions {
  double p = 4.0;
  double kappa = 0.5;        ///< transversal disc radius relative to 1 - t
  int levels = 12;           ///< 1 - t = 2^{-k}, k = 2..levels+1
  double fit_tolerance = 0.1;
  int disc_grid = 32;        ///< grid used for the per-t Hölder bound
};

struct LindelofReport {
  std::vector<double> one_minus_t;
  std::vector<double> difference;    ///< |F(gamma1(t)) - F(gamma2(t))|
  std::vector<double> zeta2;         ///< |zeta_2(t)| on the transversal disc
  std::vector<double> holder_bound;  ///< C_hat (|f|_inf + |f_zetabar|_p) |zeta_2|^{1-2/p}
  std::vector<double> miss;          ///< distance from the disc to gamma2(t)
  double exponent = 0.0;
  double required = 0.0;
  bool decays = false;
  bool bounded = false;              ///< difference below the Hölder bound at every level
  bool pass = false;
};

/// Compares F along gamma1 and gamma2, using transversal discs through gamma1(t)
/// (complex lines when A = 0, solved discs otherwise).
LindelofReport chirka_lindelof_compare(const TestFunction& f, const Curve& g1, const Curve& g2, const WedgeDomain& w,
                                       const LindelofOptions& opts = {});

struct MontelOptions {
  std::vector<double> scales;  ///< epsilon_k; F_k(z) = F(epsilon_k z)
  int probes = 64;
  double probe_min = 0.5;
  double probe_max = 1.0;
  std::uint64_t seed = 1;
  double p = 4.0;
  /// Geometric default: epsilon_q = exp(-pi q / 4), q = 0..48.
  static std::vector<double> geometric_scales(int count = 49, double log_step = kPi / 4);
  static std::vector<double> harmonic_scales(int k_max);
};

struct MontelReport {
  std::vector<double> scales;
  std::vector<double> residual_chain;   ///< sup residual of F_k, chain-rule route
  std::vector<double> residual_direct;  ///< sup residual of F_k, direct differences
  double consistency = 0.0;             ///< max |chain - direct| over members and probes
  bool consistent = false;
  double slope = 0.0;                   ///< log-log slope of residual against epsilon
  int fit_members = 0;
  bool linear = false;
  double equicontinuity = 0.0;          ///< max |F_k(a) - F_k(b)| / |a - b|^{1-2/p}
  std::vector<int> subsequence;         ///< kept member indices
  double limit_residual = 0.0;          ///< dbar residual of the limit candidate
  double limit_floor = 0.0;             ///< allowed: eps_last * bound + difference floor
  bool limit_at_floor = false;
  bool converged = false;               ///< fewer than 3 kept members: NoConvergentSubsequence
  std::string status;
};

MontelReport scaling_montel(const TestFunction& f, const ComplexMatrixField& a, const Cone& k0,
                            const MontelOptions& opts);

enum class Verdict { Nontangential, Directional, None };
std::string_view to_string(Verdict v);

struct RayOptions {
  int directions = 16;
  int extra_rays = 10;
  double tolerance = 1e-3;
  std::vector<double> apertures{kPi / 6, kPi / 12};  ///< nested cone half-angles around the axis
  double extra_cone = kPi / 6;  ///< half-angle in R^{2n} for the random cross-check rays
  ApproachSpec approach;
  std::uint64_t seed = 1;
};

struct DirectionLimit {
  CVector direction;
  LimitEstimate estimate;
};

struct PointVerdict {
  CVector point;
  Verdict verdict = Verdict::None;
  cplx limit{};
  double error_bar = 0.0;
  std::vector<Verdict> by_aperture;
  bool exceptional = false;     ///< the oracle has no value here
  bool extra_rays_agree = true;
  std::optional<double> oracle_error;
  std::vector<DirectionLimit> per_direction;
};

struct RayReport {
  std::vector<PointVerdict> points;
  double nontangential_fraction = 0.0;  ///< over points off the exceptional set
  int exceptional_points = 0;
  int exceptional_none = 0;
  double max_oracle_error = 0.0;
  bool monotone = true;
  bool extra_rays_agree = true;
};

/// Real directions -(cos a_k, sin a_k, 0...) with a_k = (k + 1/2) pi / (2 m) for n = 2;
/// for general n, quasi-uniform on the negative orthant of R^n.
std::vector<CVector> wedge_directions(int n, int count);

/// Exceptional points are those where the test function's oracle returns
/// nothing; the summary fraction is taken over the others.
RayReport ray_family_limits(const TestFunction& f, const std::vector<CVector>& edge_points, const WedgeDomain& w,
                            const RayOptions& opts, bool keep_per_direction = false);

/// Uniform samples y in [-1, 1]^n on the edge plus `slice` points with y_1 = 0.
std::vector<CVector> edge_samples(const WedgeDomain& w, int count, int slice, std::uint64_t seed);

} // namespace holodisc::fatou
