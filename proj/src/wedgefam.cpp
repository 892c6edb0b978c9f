#include "holodisc/wedgefam.hpp"
#include "holodisc/accal.hpp"
#include "holodisc/error.hpp"
#include "holodisc/parallel.hpp"
#include "holodisc/random.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/SVD>

namespace holodisc {

using diskops::Stencil;

// ------------------------------------------------------------- WedgeDomain

namespace {

std::vector<double> imag_parts(const CVector& z) {
  std::vector<double> y(static_cast<std::size_t>(z.size()));
  for (Eigen::Index j = 0; j < z.size(); ++j) y[static_cast<std::size_t>(j)] = z(j).imag();
  return y;
}

ScalarField graph_defining(int n, int j, const RealPolynomial& h) {
  auto value = [j, h](const CVector& z) {
    const auto y = imag_parts(z);
    return cplx(z(j).real() - h(y), 0.0);
  };
  // rho_z = (rho_x - i rho_y)/2, rho_zbar = (rho_x + i rho_y)/2
  auto grad = [n, j, h](const CVector& z, double sign) {
    const auto y = imag_parts(z);
    const RVector dh = h.gradient(y);
    CRowVector g(n);
    for (int k = 0; k < n; ++k) g(k) = 0.5 * cplx(k == j ? 1.0 : 0.0, -sign * dh(k));
    return g;
  };
  return ScalarField(n, value, [grad](const CVector& z) { return grad(z, -1.0); },
                     [grad](const CVector& z) { return grad(z, 1.0); });
}

} // namespace

WedgeDomain WedgeDomain::model(int n, double delta) {
  std::vector<RealPolynomial> h;
  for (int j = 0; j < n; ++j) h.emplace_back(n);
  WedgeDomain w = graph(std::move(h), ComplexMatrixField::zero(n), delta);
  w.model_ = true;
  return w;
}

WedgeDomain WedgeDomain::graph(std::vector<RealPolynomial> h, ComplexMatrixField a, double delta) {
  const int n = a.dimension();
  if (static_cast<int>(h.size()) != n)
    throw Error(ErrorCode::InvalidArgument, "edge graph needs one polynomial per coordinate");
  if (!(delta >= 0.0)) throw Error(ErrorCode::InvalidArgument, "delta must be nonnegative");
  const std::vector<double> zero(static_cast<std::size_t>(n), 0.0);
  std::vector<ScalarField> rho;
  for (int j = 0; j < n; ++j) {
    const auto& hj = h[static_cast<std::size_t>(j)];
    if (hj.dimension() != n) throw Error(ErrorCode::InvalidArgument, "edge graph polynomial has the wrong dimension");
    if (std::abs(hj(zero)) > 1e-14 || hj.gradient(zero).norm() > 1e-14)
      throw Error(ErrorCode::InvalidArgument, "edge graph must satisfy h(0) = 0 and dh(0) = 0");
    rho.push_back(graph_defining(n, j, hj));
  }
  WedgeDomain w(n, std::move(rho), std::move(a), delta);
  w.h_ = std::move(h);
  return w;
}

WedgeDomain WedgeDomain::general(std::vector<ScalarField> rho, ComplexMatrixField a, double delta) {
  const int n = a.dimension();
  if (rho.empty()) throw Error(ErrorCode::InvalidArgument, "wedge needs at least one defining function");
  for (const auto& r : rho)
    if (r.dimension() != n) throw Error(ErrorCode::InvalidArgument, "defining function has the wrong dimension");
  return WedgeDomain(n, std::move(rho), std::move(a), delta);
}

RVector WedgeDomain::rho(const CVector& z) const {
  RVector r(faces());
  for (int j = 0; j < faces(); ++j) r(j) = rho_[static_cast<std::size_t>(j)](z).real();
  return r;
}

bool WedgeDomain::contains(const CVector& z, double margin) const { return (rho(z).array() < -margin).all(); }

bool WedgeDomain::in_shrunken(const CVector& z) const {
  const RVector r = rho(z);
  const double total = r.sum();
  for (Eigen::Index j = 0; j < r.size(); ++j)
    if (!(r(j) - delta_ * (total - r(j)) < 0.0)) return false;
  return true;
}

RVector WedgeDomain::graph_value(const RVector& y) const {
  if (!is_graph()) throw Error(ErrorCode::InvalidArgument, "wedge is not given by an edge graph");
  RVector x(n_);
  const std::vector<double> yy(y.data(), y.data() + y.size());
  for (int j = 0; j < n_; ++j) x(j) = h_[static_cast<std::size_t>(j)](yy);
  return x;
}

CVector WedgeDomain::edge_point(const RVector& y) const {
  const RVector x = graph_value(y);
  CVector z(n_);
  for (int j = 0; j < n_; ++j) z(j) = cplx(x(j), y(j));
  return z;
}

double WedgeDomain::genericity(const CVector& z) const {
  CMatrix m(faces(), n_);
  for (int j = 0; j < faces(); ++j) m.row(j) = accal::dbar_scalar(rho_[static_cast<std::size_t>(j)], a_, z).coefficients;
  Eigen::JacobiSVD<CMatrix> svd(m);
  const auto& s = svd.singularValues();
  return s(s.size() - 1);
}

double WedgeDomain::check_genericity(const std::vector<CVector>& edge_points) const {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& p : edge_points) lo = std::min(lo, genericity(p));
  return lo;
}

// -------------------------------------------------------------------- cones

double real_dot(const CVector& u, const CVector& v) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < u.size(); ++j) s += u(j).real() * v(j).real() + u(j).imag() * v(j).imag();
  return s;
}

bool cone_membership(const Cone& k, const CVector& z) {
  const CVector v = z - k.vertex;
  const double len = v.norm();
  if (len == 0.0) return false;
  return real_dot(v, k.axis) / len > std::cos(k.half_angle);
}

Cone build_cone(const CVector& p, const CVector& direction, double half_angle, const WedgeDomain& w,
                double r_probe) {
  if (p.size() != w.dimension() || direction.size() != w.dimension())
    throw Error(ErrorCode::InvalidArgument, "cone data has the wrong dimension");
  if (!(half_angle > 0.0 && half_angle < kPi / 2))
    throw Error(ErrorCode::InvalidArgument, "half-angle must lie in (0, pi/2)");
  if (w.edge_defect(p) > 1e-9) throw Error(ErrorCode::DirectionNotInterior, "cone vertex is not on the edge");
  if (direction.norm() == 0.0) throw Error(ErrorCode::DirectionNotInterior, "cone direction is zero");
  const CVector d = direction / direction.norm();
  for (double s : {1e-3, 1e-2, 1e-1, 1.0})
    if (!w.contains(p + s * r_probe * d, 1e-12 * s * r_probe))
      throw Error(ErrorCode::DirectionNotInterior, "cone axis leaves the wedge");

  // Orthonormal complement of d in R^{2n}.
  const int dim = 2 * w.dimension();
  const RVector dr = to_real(d);
  std::vector<RVector> basis;
  for (int k = 0; k < dim && static_cast<int>(basis.size()) < dim - 1; ++k) {
    RVector e = RVector::Unit(dim, k);
    e -= e.dot(dr) * dr;
    for (const auto& b : basis) e -= e.dot(b) * b;
    if (e.norm() > 1e-8) basis.push_back(e / e.norm());
  }
  std::vector<RVector> sides;
  for (std::size_t a = 0; a < basis.size(); ++a) {
    sides.push_back(basis[a]);
    sides.push_back(-basis[a]);
    for (std::size_t b = a + 1; b < basis.size(); ++b)
      for (double sa : {1.0, -1.0})
        for (double sb : {1.0, -1.0}) sides.push_back((sa * basis[a] + sb * basis[b]) / std::sqrt(2.0));
  }

  Cone k{p, d, half_angle, half_angle, 0};
  auto fits = [&](double angle) {
    for (const auto& e : sides)
      for (double frac : {0.5, 1.0})
        for (double r : {0.25, 0.5, 0.75, 1.0}) {
          const double a = frac * angle;
          const RVector dir = std::cos(a) * dr + std::sin(a) * e;
          const double dist = r * r_probe;
          if (!w.contains(p + dist * to_complex(dir), 1e-9 * dist)) return false;
        }
    return true;
  };
  while (!fits(k.half_angle)) {
    k.half_angle *= 0.9;
    if (++k.shrinks > 200) throw Error(ErrorCode::DirectionNotInterior, "no cone around the axis fits in the wedge");
  }
  return k;
}

// ----------------------------------------------------------------- families

FamilyParams FamilyParams::reduced(const RVector& c_rest, const RVector& t_rest) {
  if (c_rest.size() != t_rest.size()) throw Error(ErrorCode::InvalidArgument, "c and t differ in length");
  FamilyParams p;
  p.c.resize(c_rest.size() + 1);
  p.t.resize(t_rest.size() + 1);
  p.c << 0.0, c_rest;
  p.t << 1.0, t_rest;
  return p;
}

FamilyParams FamilyParams::unit(int n) { return {RVector::Zero(n), RVector::Ones(n)}; }

namespace {

void check_params(const FamilyParams& p, int n) {
  if (p.c.size() != n || p.t.size() != n) throw Error(ErrorCode::InvalidArgument, "family parameters have the wrong length");
  if (!(p.t.array() > 0.0).all()) throw Error(ErrorCode::InvalidArgument, "family parameter t must be positive");
}

void check_phi(const BoundaryFunction& phi, const GridPtr& grid) {
  if (phi.size() != grid->n_theta())
    throw Error(ErrorCode::InvalidArgument, "cutoff sample count must equal the grid's angular count");
}

GridFunction affine(const GridFunction& s, double t, cplx shift) {
  CMatrix v = t * s.values();
  v.array() += shift;
  CVector b = t * *s.boundary();
  b.array() += shift;
  return GridFunction(s.grid(), std::move(v), std::move(b));
}

} // namespace

DiscMap flat_family(const FamilyParams& p, const BoundaryFunction& phi, const GridPtr& grid, bool validate_cutoff) {
  const int n = static_cast<int>(p.c.size());
  check_params(p, n);
  check_phi(phi, grid);
  if (validate_cutoff) phi.validate_cutoff();
  const GridFunction s = diskops::SchwarzIntegral(phi).on_grid(grid);
  std::vector<GridFunction> comps;
  for (int j = 0; j < n; ++j) comps.push_back(affine(s, p.t(j), cplx(0.0, p.c(j))));
  SolveInfo info;
  info.solved = true;
  return DiscMap(grid, std::move(comps), info);
}

DiscMap glued_family(const std::vector<RealPolynomial>& h, const ComplexMatrixField& a, const FamilyParams& p,
                     const BoundaryFunction& phi, const GridPtr& grid, const GluedOptions& opts) {
  const int n = a.dimension();
  check_params(p, n);
  check_phi(phi, grid);
  phi.validate_cutoff();
  if (!h.empty() && static_cast<int>(h.size()) != n)
    throw Error(ErrorCode::InvalidArgument, "edge graph needs one polynomial per coordinate");
  const int nt = grid->n_theta();
  const GridFunction s = diskops::SchwarzIntegral(phi).on_grid(grid);
  std::vector<GridFunction> base;
  for (int j = 0; j < n; ++j) base.push_back(affine(s, p.t(j), cplx(0.0, p.c(j))));

  auto graph_on_boundary = [&](const std::vector<GridFunction>& z) {
    // h_j(Im z(e^{i theta_k})) per component and angle
    RMatrix out = RMatrix::Zero(n, nt);
    if (h.empty()) return out;
    std::vector<double> y(static_cast<std::size_t>(n));
    for (int k = 0; k < nt; ++k) {
      for (int c = 0; c < n; ++c) y[static_cast<std::size_t>(c)] = (*z[static_cast<std::size_t>(c)].boundary())(k).imag();
      for (int c = 0; c < n; ++c) out(c, k) = h[static_cast<std::size_t>(c)](y);
    }
    return out;
  };
  auto boundary_residual = [&](const std::vector<GridFunction>& z) {
    const RMatrix hy = graph_on_boundary(z);
    double r = 0.0;
    for (int k = 0; k <= nt / 2; ++k)
      for (int c = 0; c < n; ++c)
        r = std::max(r, std::abs((*z[static_cast<std::size_t>(c)].boundary())(k).real() - hy(c, k)));
    return r;
  };

  std::vector<GridFunction> z = base;
  SolveInfo info;
  double scale = 1.0;
  for (const auto& c : base) scale = std::max(scale, c.sup_norm());
  int growth = 0;
  while (true) {
    const std::vector<GridFunction> g = detail::beltrami_density(z, a, opts.stencil);
    if (info.iterations >= 1) {
      info.boundary_residual = boundary_residual(z);
      double r = 0.0;
      for (std::size_t c = 0; c < z.size(); ++c)
        r = std::max(r, (diskops::dbar(z[c], opts.stencil).values() - g[c].values()).cwiseAbs().maxCoeff());
      info.residual = r;
      const bool ok = info.residual < opts.tol_interior && info.boundary_residual < opts.tol_boundary;
      if (ok || info.steps.back() <= 1e-14 * scale) {
        info.solved = ok;
        break;
      }
    }
    if (info.iterations >= opts.max_iter) {
      std::ostringstream os;
      os << "after " << opts.max_iter << " iterations: boundary residual " << info.boundary_residual
         << ", interior residual " << info.residual;
      throw Error(info.boundary_residual >= opts.tol_boundary ? ErrorCode::BoundaryMismatch
                                                               : ErrorCode::MaxIterExceeded,
                  os.str());
    }
    const RMatrix hy = graph_on_boundary(z);
    std::vector<GridFunction> next;
    for (int c = 0; c < n; ++c) {
      const auto cc = static_cast<std::size_t>(c);
      std::optional<GridFunction> tg;
      if (!a.is_zero()) tg = diskops::cauchy_green(g[cc]);
      BoundaryFunction data;
      data.samples.resize(nt);
      for (int k = 0; k < nt; ++k) data.samples(k) = hy(c, k) - (tg ? (*tg->boundary())(k).real() : 0.0);
      const GridFunction corr = diskops::SchwarzIntegral(data).on_grid(grid);
      CMatrix v = base[cc].values() + corr.values();
      CVector b = *base[cc].boundary() + *corr.boundary();
      if (tg) {
        v += tg->values();
        b += *tg->boundary();
      }
      next.emplace_back(grid, std::move(v), std::move(b));
    }
    if (!std::all_of(next.begin(), next.end(), [](const GridFunction& f) { return f.all_finite(); }))
      throw Error(ErrorCode::NoContraction, "glued iterate became non-finite");
    double step = 0.0;
    for (std::size_t c = 0; c < next.size(); ++c) {
      step = std::max(step, (next[c].values() - z[c].values()).cwiseAbs().maxCoeff());
      step = std::max(step, (*next[c].boundary() - *z[c].boundary()).cwiseAbs().maxCoeff());
    }
    if (!info.steps.empty() && info.steps.back() > 1e-13 * scale) {
      const double ratio = step / info.steps.back();
      info.contraction = std::max(info.contraction, ratio);
      growth = ratio >= 1.0 ? growth + 1 : 0;
      if (growth >= 3) throw Error(ErrorCode::NoContraction, "glued iteration step ratio >= 1 for 3 iterations");
    }
    info.steps.push_back(step);
    z = std::move(next);
    ++info.iterations;
  }
  return DiscMap(grid, std::move(z), std::move(info));
}

DiscFamily::DiscFamily(WedgeDomain wedge, BoundaryFunction phi, GridPtr grid, GluedOptions opts)
    : wedge_(std::move(wedge)), phi_(std::move(phi)), grid_(std::move(grid)), opts_(opts), s_(phi_) {
  phi_.validate_cutoff();
  check_phi(phi_, grid_);
  if (!wedge_.is_graph()) throw Error(ErrorCode::InvalidArgument, "disc families need a graph or model wedge");
  flat_ = wedge_.is_model() && wedge_.structure().is_zero();
}

DiscMap DiscFamily::disc(const FamilyParams& p) const {
  if (flat_) return flat_family(p, phi_, grid_);
  return glued_family(wedge_.is_model() ? std::vector<RealPolynomial>{} : wedge_.edge_graph(), wedge_.structure(),
                      p, phi_, grid_, opts_);
}

CVector DiscFamily::evaluate(const FamilyParams& p, cplx zeta) const {
  const int n = wedge_.dimension();
  check_params(p, n);
  if (!(std::abs(zeta) <= 1.0)) throw Error(ErrorCode::OutsideDisc, "evaluation point outside the closed disc");
  if (flat_) {
    const cplx s = s_(zeta);
    CVector z(n);
    for (int j = 0; j < n; ++j) z(j) = p.t(j) * s + cplx(0.0, p.c(j));
    return z;
  }
  return disc(p)(zeta);
}

CVector evaluation_map(const DiscFamily& f, const FamilyParams& p, cplx zeta) { return f.evaluate(p, zeta); }

// --------------------------------------------------------------- inversion

namespace {

struct ScalarRoot {
  cplx zeta;
  double residual;
};

// Damped Newton for S(zeta) = target inside the disc.
ScalarRoot solve_schwarz(const diskops::SchwarzIntegral& s, cplx target, cplx start, int max_iter) {
  cplx z = start;
  double res = std::abs(s(z) - target);
  for (int it = 0; it < max_iter && res > 0.0; ++it) {
    const cplx d = s.derivative(z);
    if (d == cplx{}) break;
    const cplx step = -(s(z) - target) / d;
    double lambda = 1.0;
    bool moved = false;
    for (int h = 0; h < 40; ++h, lambda *= 0.5) {
      const cplx trial = z + lambda * step;
      if (std::abs(trial) >= 1.0) continue;
      const double r = std::abs(s(trial) - target);
      if (r < res) {
        z = trial;
        res = r;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  return {z, res};
}

FamilyParams flat_params(const CVector& w, cplx s_value) {
  const int n = static_cast<int>(w.size());
  FamilyParams p{RVector(n), RVector(n)};
  for (int j = 0; j < n; ++j) {
    p.t(j) = j == 0 ? 1.0 : w(j).real() / s_value.real();
    p.c(j) = j == 0 ? 0.0 : w(j).imag() - p.t(j) * s_value.imag();
  }
  return p;
}

Inversion invert_flat(const diskops::SchwarzIntegral& s, const CVector& w, const InversionOptions& opts) {
  std::vector<ScalarRoot> roots;
  const int starts = std::max(1, opts.multistart);
  const double tol = opts.tol * std::max(1.0, std::abs(w(0)));
  for (int k = 0; k < starts; ++k) {
    const double radius = k % 2 == 0 ? 0.3 : 0.7;
    const cplx start = std::polar(radius, 2.0 * kPi * (k + 0.5) / starts);
    const ScalarRoot r = solve_schwarz(s, w(0), start, opts.max_newton);
    if (r.residual <= tol) roots.push_back(r);
  }
  if (roots.empty()) {
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < starts; ++k)
      best = std::min(best, solve_schwarz(s, w(0), std::polar(0.5, 2.0 * kPi * k / starts), opts.max_newton).residual);
    std::ostringstream os;
    os << "no root of S phi(zeta) = w_1; best residual " << best;
    throw Error(ErrorCode::InversionFailed, os.str());
  }
  std::sort(roots.begin(), roots.end(), [](const ScalarRoot& a, const ScalarRoot& b) { return a.residual < b.residual; });
  Inversion inv;
  inv.zeta = roots.front().zeta;
  inv.params = flat_params(w, s(inv.zeta));
  std::vector<cplx> distinct;
  for (const auto& r : roots)
    if (std::none_of(distinct.begin(), distinct.end(), [&](cplx d) { return std::abs(d - r.zeta) < 1e-6; }))
      distinct.push_back(r.zeta);
  inv.distinct_solutions = static_cast<int>(distinct.size());
  return inv;
}

// Unknowns u = (c_2..c_n, t_2..t_n, Re zeta, Im zeta).
struct GluedUnknowns {
  static RVector pack(const FamilyParams& p, cplx zeta) {
    const Eigen::Index m = p.c.size() - 1;
    RVector u(2 * m + 2);
    u << p.c.tail(m), p.t.tail(m), zeta.real(), zeta.imag();
    return u;
  }
  static std::pair<FamilyParams, cplx> unpack(const RVector& u, int n) {
    const Eigen::Index m = n - 1;
    return {FamilyParams::reduced(u.segment(0, m), u.segment(m, m)), cplx(u(2 * m), u(2 * m + 1))};
  }
};

} // namespace

Inversion invert_evaluation(const DiscFamily& f, const CVector& w, const InversionOptions& opts) {
  const WedgeDomain& wedge = f.wedge();
  if (w.size() != wedge.dimension()) throw Error(ErrorCode::InvalidArgument, "point has the wrong dimension");
  if (!wedge.in_shrunken(w)) throw Error(ErrorCode::NotInWedge, "point is not in the shrunken wedge W_delta");
  if (f.flat()) {
    Inversion inv = invert_flat(f.schwarz(), w, opts);
    inv.residual = (f.evaluate(inv.params, inv.zeta) - w).norm();
    return inv;
  }

  // Seed from the flat inverse of (x - h(y)) + i y.
  const int n = wedge.dimension();
  RVector y(n);
  for (int j = 0; j < n; ++j) y(j) = w(j).imag();
  const RVector hx = wedge.graph_value(y);
  CVector flat_w(n);
  for (int j = 0; j < n; ++j) flat_w(j) = cplx(w(j).real() - hx(j), w(j).imag());
  InversionOptions seed_opts = opts;
  seed_opts.tol = 1e-12;
  const Inversion seed = invert_flat(f.schwarz(), flat_w, seed_opts);

  auto residual_vec = [&](const RVector& u) -> std::optional<RVector> {
    const auto [p, zeta] = GluedUnknowns::unpack(u, n);
    if (!(p.t.array() > 0.0).all() || !(std::abs(zeta) < 1.0)) return std::nullopt;
    return to_real(f.evaluate(p, zeta) - w);
  };

  RVector u = GluedUnknowns::pack(seed.params, seed.zeta);
  auto r0 = residual_vec(u);
  if (!r0) throw Error(ErrorCode::InversionFailed, "flat seed left the parameter domain");
  RVector r = *r0;
  const double accept = std::max(opts.tol, 1e-7);
  for (int it = 0; it < opts.max_newton && r.norm() > opts.tol; ++it) {
    const Eigen::Index m = u.size();
    RMatrix jac(r.size(), m);
    for (Eigen::Index k = 0; k < m; ++k) {
      const double h = 1e-6 * std::max(1.0, std::abs(u(k)));
      RVector up = u, um = u;
      up(k) += h;
      um(k) -= h;
      const auto rp = residual_vec(up), rm = residual_vec(um);
      if (!rp || !rm) throw Error(ErrorCode::InversionFailed, "Newton probe left the parameter domain");
      jac.col(k) = (*rp - *rm) / (2.0 * h);
    }
    const RVector step = jac.colPivHouseholderQr().solve(-r);
    double lambda = 1.0;
    bool moved = false;
    for (int hstep = 0; hstep < 30; ++hstep, lambda *= 0.5) {
      const auto trial = residual_vec(u + lambda * step);
      if (trial && trial->norm() < r.norm()) {
        u += lambda * step;
        r = *trial;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  if (!(r.norm() <= accept)) {
    std::ostringstream os;
    os << "Newton stalled with residual " << r.norm();
    throw Error(ErrorCode::InversionFailed, os.str());
  }
  Inversion inv;
  std::tie(inv.params, inv.zeta) = GluedUnknowns::unpack(u, n);
  inv.residual = r.norm();
  inv.distinct_solutions = 1;
  return inv;
}

// ---------------------------------------------------------------- foliation

namespace {

// Upper-arc point with Im z_j = y_j: unknowns (theta, c_2..c_n).
double cover_edge_point(const DiscFamily& f, const RVector& t_rest, const CVector& q) {
  const int n = f.wedge().dimension();
  const auto& s = f.schwarz();
  // Flat start: Im S(e^{i theta}) = y_1 by bracketing on [0, pi].
  const double y1 = q(0).imag();
  constexpr int kScan = 2048;
  double theta = -1.0;
  double prev = s(1.0).imag() - y1;
  for (int k = 1; k <= kScan && theta < 0.0; ++k) {
    const double th = kPi * k / kScan;
    const double cur = s(std::polar(1.0, th)).imag() - y1;
    if ((prev <= 0.0) != (cur <= 0.0)) {
      double lo = kPi * (k - 1) / kScan, hi = th;
      for (int b = 0; b < 80; ++b) {
        const double mid = 0.5 * (lo + hi);
        const double v = s(std::polar(1.0, mid)).imag() - y1;
        if ((v <= 0.0) == (prev <= 0.0)) lo = mid;
        else hi = mid;
      }
      theta = 0.5 * (lo + hi);
    }
    prev = cur;
  }
  if (theta < 0.0) return std::numeric_limits<double>::infinity();
  RVector c_rest(n - 1);
  for (int j = 1; j < n; ++j) c_rest(j - 1) = q(j).imag() - t_rest(j - 1) * y1;
  if (f.flat()) {
    const FamilyParams p = FamilyParams::reduced(c_rest, t_rest);
    return (f.evaluate(p, std::polar(1.0, theta)) - q).norm();
  }
  // Glued: Newton on Im z(c, t)(e^{i theta}) = Im q.
  RVector u(n);
  u << theta, c_rest;
  auto eval = [&](const RVector& v) {
    const DiscMap d = f.disc(FamilyParams::reduced(v.tail(n - 1), t_rest));
    return d.boundary_at(v(0));
  };
  auto imag_res = [&](const CVector& z) {
    RVector r(n);
    for (int j = 0; j < n; ++j) r(j) = z(j).imag() - q(j).imag();
    return r;
  };
  CVector z = eval(u);
  for (int it = 0; it < 20 && imag_res(z).norm() > 1e-13; ++it) {
    RMatrix jac(n, n);
    for (int k = 0; k < n; ++k) {
      RVector up = u, um = u;
      const double h = 1e-6;
      up(k) += h;
      um(k) -= h;
      jac.col(k) = (imag_res(eval(up)) - imag_res(eval(um))) / (2.0 * h);
    }
    u += jac.colPivHouseholderQr().solve(-imag_res(z));
    z = eval(u);
  }
  if (u(0) < -1e-9 || u(0) > kPi + 1e-9) return std::numeric_limits<double>::infinity();
  return (z - q).norm();
}

double cloud_distance(const std::vector<CVector>& a, const std::vector<CVector>& b) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& u : a)
    for (const auto& v : b) d = std::min(d, (u - v).norm());
  return d;
}

} // namespace

FoliationReport foliation_check(const DiscFamily& f, const FoliationOptions& opts) {
  const WedgeDomain& wedge = f.wedge();
  const int n = wedge.dimension();
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "foliation checks need n >= 2");
  if (opts.t_values.empty()) throw Error(ErrorCode::InvalidArgument, "foliation check needs at least one t");
  Rng rng(opts.seed);
  FoliationReport rep;
  rep.sheet_separation = std::numeric_limits<double>::infinity();

  // Range of Im S phi on the upper arc bounds the edge coordinate y_1 reached.
  double s_lo = std::numeric_limits<double>::infinity(), s_hi = -s_lo;
  for (int k = 0; k <= 512; ++k) {
    const double v = f.schwarz()(std::polar(1.0, kPi * k / 512)).imag();
    s_lo = std::min(s_lo, v);
    s_hi = std::max(s_hi, v);
  }
  const double y1_lo = std::max(-opts.box, 0.8 * s_lo), y1_hi = std::min(opts.box, 0.8 * s_hi);

  std::vector<std::vector<CVector>> clouds;
  for (const RVector& t_rest : opts.t_values) {
    if (t_rest.size() != n - 1) throw Error(ErrorCode::InvalidArgument, "t vector must have n - 1 entries");
    // (1) edge covering
    std::vector<CVector> edge_pts(static_cast<std::size_t>(opts.edge_samples));
    for (auto& q : edge_pts) {
      RVector y(n);
      y(0) = rng.uniform(y1_lo, y1_hi);
      for (int j = 1; j < n; ++j) y(j) = rng.uniform(-opts.box, opts.box);
      q = wedge.edge_point(y);
    }
    std::vector<double> cover(edge_pts.size());
    parallel_for(edge_pts.size(), [&](std::size_t i) { cover[i] = cover_edge_point(f, t_rest, edge_pts[i]); });
    for (double d : cover) rep.edge_cover_defect = std::max(rep.edge_cover_defect, d);

    // (2) sheet consistency: points of E_t invert back to t
    std::vector<std::pair<FamilyParams, cplx>> probes;
    for (int i = 0; i < opts.sheet_probes; ++i) {
      RVector c_rest(n - 1);
      for (int j = 0; j < n - 1; ++j) c_rest(j) = rng.uniform(-opts.box, opts.box);
      const cplx zeta = std::polar(std::sqrt(rng.uniform()) * 0.7, rng.uniform(0.0, 2.0 * kPi));
      probes.emplace_back(FamilyParams::reduced(c_rest, t_rest), zeta);
    }
    std::vector<CVector> cloud(probes.size());
    std::vector<double> sheet(probes.size(), 0.0);
    parallel_for(probes.size(), [&](std::size_t i) {
      cloud[i] = f.evaluate(probes[i].first, probes[i].second);
      try {
        InversionOptions io;
        io.multistart = f.flat() ? 8 : 1;
        const Inversion inv = invert_evaluation(f, cloud[i], io);
        sheet[i] = (inv.params.t.tail(n - 1) - t_rest).norm();
      } catch (const Error&) {
        sheet[i] = std::numeric_limits<double>::infinity();
      }
    });
    for (double d : sheet) rep.sheet_defect = std::max(rep.sheet_defect, d);
    clouds.push_back(std::move(cloud));
  }
  for (std::size_t i = 1; i < clouds.size(); ++i)
    rep.sheet_separation = std::min(rep.sheet_separation, cloud_distance(clouds[i - 1], clouds[i]));
  if (clouds.size() < 2) rep.sheet_separation = 0.0;

  // (3) coverage of W_delta near the origin
  std::vector<CVector> targets;
  for (int tries = 0; static_cast<int>(targets.size()) < opts.coverage_samples && tries < 100 * opts.coverage_samples;
       ++tries) {
    RVector y(n), u(n);
    y(0) = rng.uniform(y1_lo, y1_hi);
    for (int j = 1; j < n; ++j) y(j) = rng.uniform(-opts.box, opts.box);
    for (int j = 0; j < n; ++j) u(j) = rng.uniform(0.05, 1.0) * opts.box;
    const RVector hx = wedge.graph_value(y);
    CVector w(n);
    for (int j = 0; j < n; ++j) w(j) = cplx(hx(j) - u(j), y(j));
    if (wedge.in_shrunken(w)) targets.push_back(w);
  }
  std::vector<double> res(targets.size(), -1.0);
  parallel_for(targets.size(), [&](std::size_t i) {
    try {
      InversionOptions io;
      io.multistart = f.flat() ? 8 : 1;
      res[i] = invert_evaluation(f, targets[i], io).residual;
    } catch (const Error&) {
      res[i] = -1.0;
    }
  });
  int ok = 0;
  for (double r : res)
    if (r >= 0.0) {
      ++ok;
      rep.coverage_residual = std::max(rep.coverage_residual, r);
    }
  rep.coverage_attempts = static_cast<int>(targets.size());
  rep.coverage_rate = targets.empty() ? 0.0 : static_cast<double>(ok) / static_cast<double>(targets.size());
  return rep;
}

} // namespace holodisc
