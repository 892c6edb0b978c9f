#include "holodisc/fatou.hpp"
#include "holodisc/accal.hpp"
#include "holodisc/error.hpp"
#include "holodisc/parallel.hpp"
#include "holodisc/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace holodisc::fatou {

using diskops::Stencil;

namespace {

CRowVector unit_row(int n, int j, cplx v) {
  CRowVector r = CRowVector::Zero(n);
  r(j) = v;
  return r;
}

// (-z)^i on the principal branch.
cplx power_i_value(cplx z1) { return std::exp(I * std::log(-z1)); }

std::optional<cplx> value_off_slice(const ScalarField& f, const CVector& p) {
  if (std::abs(p(0)) == 0.0) return std::nullopt;
  return f(p);
}

// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  if (x.size() < 2) return 0.0;
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

// Splitmix-style mixing so per-index generators do not depend on thread order.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void check_approach(const ApproachSpec& s) {
  if (!(s.start > 0.0) || !(s.ratio > 0.0 && s.ratio < 1.0) || s.steps < 4 || !(s.threshold > 0.0))
    throw Error(ErrorCode::InvalidArgument, "approach needs start > 0, ratio in (0, 1), steps >= 4, threshold > 0");
}

// Unit vector in R^{2n} orthogonal to the axis.
CVector random_orthogonal(const CVector& axis, Rng& rng) {
  for (;;) {
    CVector u(axis.size());
    for (Eigen::Index j = 0; j < u.size(); ++j) u(j) = cplx(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    u -= real_dot(u, axis) * axis;
    const double nu = u.norm();
    if (nu > 1e-3) return u / nu;
  }
}

CVector wedge_axis(int n) { return CVector::Constant(n, cplx(-1.0 / std::sqrt(static_cast<double>(n)), 0.0)); }

} // namespace

// ------------------------------------------------------------ test functions

TestFunction TestFunction::power_i(int n) {
  ScalarField f(
      n, [](const CVector& z) { return power_i_value(z(0)); },
      [n](const CVector& z) { return unit_row(n, 0, I * power_i_value(z(0)) / z(0)); },
      [n](const CVector&) { return CRowVector(CRowVector::Zero(n)); });
  TestFunction t{f, std::exp(kPi / 2), 0.0, {}, "(-z1)^i"};
  t.limit_oracle = [f](const CVector& p) { return value_off_slice(f, p); };
  return t;
}

TestFunction TestFunction::power_i_perturbed(int n, double eps, double radius) {
  ScalarField f(
      n, [eps](const CVector& z) { return power_i_value(z(0)) + eps * std::conj(z(0)); },
      [n](const CVector& z) { return unit_row(n, 0, I * power_i_value(z(0)) / z(0)); },
      [n, eps](const CVector&) { return unit_row(n, 0, eps); });
  std::ostringstream os;
  os << "(-z1)^i + " << eps << " zb1";
  TestFunction t{f, std::exp(kPi / 2) + std::abs(eps) * radius, std::abs(eps), {}, os.str()};
  t.limit_oracle = [f](const CVector& p) { return value_off_slice(f, p); };
  return t;
}

TestFunction TestFunction::exp_perturbed(int n, double eps, double radius) {
  ScalarField f(
      n, [eps](const CVector& z) { return std::exp(z(0)) + eps * std::conj(z(0)); },
      [n](const CVector& z) { return unit_row(n, 0, std::exp(z(0))); },
      [n, eps](const CVector&) { return unit_row(n, 0, eps); });
  std::ostringstream os;
  os << "exp(z1) + " << eps << " zb1";
  TestFunction t{f, 1.0 + std::abs(eps) * radius, std::abs(eps), {}, os.str()};
  t.limit_oracle = [f](const CVector& p) -> std::optional<cplx> { return f(p); };
  return t;
}

TestFunction TestFunction::from_expression(const std::string& text, int n, double sup_bound, double dbar_bound) {
  if (!(sup_bound > 0.0) || !(dbar_bound >= 0.0))
    throw Error(ErrorCode::InvalidArgument, "sup_bound must be positive and dbar_bound non-negative");
  const Expression e = Expression::parse(text, coordinate_variables(n));
  return TestFunction{ScalarField::from_expression(e, n), sup_bound, dbar_bound, {}, text};
}

SpotCheck spot_check(const TestFunction& f, const ComplexMatrixField& a, const std::vector<CVector>& points) {
  SpotCheck out;
  for (const auto& z : points) {
    const cplx v = f.f(z);
    const auto [fz, fzb] = f.f.gradients(z);
    const double res = accal::cr_residual(fz, fzb, a(z)).norm();
    const double slack = f.f.has_analytic_gradients() ? 1e-10 : 1e-5 * (1.0 + fz.norm() + fzb.norm());
    out.max_abs = std::max(out.max_abs, std::abs(v));
    out.max_residual = std::max(out.max_residual, res);
    if (!std::isfinite(std::abs(v)) || std::abs(v) > f.sup_bound * (1.0 + 1e-12) + 1e-12 ||
        res > f.dbar_bound + slack)
      out.ok = false;
  }
  return out;
}

// -------------------------------------------------------------- restriction

Restriction restrict_to_disc(const TestFunction& tf, const DiscMap& z, const ComplexMatrixField& a,
                             const WedgeDomain* wedge) {
  const int n = z.dimension();
  if (tf.f.dimension() != n || a.dimension() != n)
    throw Error(ErrorCode::InvalidArgument, "function, disc and structure dimensions differ");
  const GridPtr& g = z.grid();
  const int nr = g->n_r(), nt = g->n_theta();
  std::vector<GridFunction> dz;
  for (const auto& c : z.components()) dz.push_back(diskops::dzeta(c, Stencil::Spectral));

  Restriction out{GridFunction(g), GridFunction(g), GridFunction(g)};
  std::vector<double> conj_norm(static_cast<std::size_t>(nr), 0.0);
  std::vector<int> exits(static_cast<std::size_t>(nr), -1);
  parallel_for(static_cast<std::size_t>(nr), [&](std::size_t jj) {
    const int j = static_cast<int>(jj);
    CVector w(n);
    for (int k = 0; k < nt; ++k) {
      const CVector p = z.at_node(j, k);
      if (wedge && exits[jj] < 0 && !wedge->contains(p, -1e-9)) exits[jj] = k;
      for (int c = 0; c < n; ++c) w(c) = std::conj(dz[static_cast<std::size_t>(c)](j, k));
      const auto [fz, fzb] = tf.f.gradients(p);
      out.f(j, k) = tf.f(p);
      out.f_dbar(j, k) = (accal::cr_residual(fz, fzb, a(p)) * w)(0);
      conj_norm[jj] = std::max(conj_norm[jj], w.norm());
    }
  });
  for (int j = 0; j < nr; ++j)
    if (exits[static_cast<std::size_t>(j)] >= 0) {
      std::ostringstream os;
      os << "node (" << j << ", " << exits[static_cast<std::size_t>(j)] << ") of the disc lies outside the wedge";
      throw Error(ErrorCode::DiscExitsWedge, os.str());
    }
  out.f_dbar_direct = diskops::dbar(out.f, Stencil::Spectral);
  out.sup_f_dbar = out.f_dbar.sup_norm();
  out.bound = tf.dbar_bound * *std::max_element(conj_norm.begin(), conj_norm.end());
  out.consistency = (out.f_dbar.values() - out.f_dbar_direct.values()).cwiseAbs().maxCoeff();
  return out;
}

// ---------------------------------------------------------- Hölder estimate

std::vector<HolderPair> holder_pairs(double r, int count, std::uint64_t seed) {
  if (!(r > 0.0 && r < 1.0) || count < 1) throw Error(ErrorCode::InvalidArgument, "need 0 < r < 1 and count >= 1");
  Rng rng(seed);
  const double lo = std::log(std::min(1e-3, 0.5 * r)), hi = std::log(r);
  std::vector<HolderPair> pairs;
  pairs.reserve(static_cast<std::size_t>(count));
  while (static_cast<int>(pairs.size()) < count) {
    const cplx a = std::polar(r * std::sqrt(rng.uniform()), 2.0 * kPi * rng.uniform());
    const double sep = std::exp(rng.uniform(lo, hi));
    const cplx b = a + std::polar(sep, 2.0 * kPi * rng.uniform());
    if (std::abs(b) <= r) pairs.push_back({a, b});
  }
  return pairs;
}

HolderReport holder_bound_check(const GridFunction& f, const GridFunction& f_dbar, double p,
                                const std::vector<HolderPair>& pairs, double r) {
  if (!(p > 2.0)) throw Error(ErrorCode::InvalidArgument, "the exponent p must exceed 2");
  if (!(r > 0.0 && r < 1.0)) throw Error(ErrorCode::InvalidArgument, "the pair radius must lie in (0, 1)");
  for (const auto& pr : pairs)
    if (std::abs(pr.a) > r * (1.0 + 1e-14) || std::abs(pr.b) > r * (1.0 + 1e-14)) {
      std::ostringstream os;
      os << "pair point " << (std::abs(pr.a) > r ? pr.a : pr.b) << " lies outside |zeta| <= " << r;
      throw Error(ErrorCode::PairOutsideDisc, os.str());
    }
  HolderReport rep;
  rep.p = p;
  rep.sup_norm = f.sup_norm();
  rep.lp_norm = f_dbar.lp_norm(p);
  const double denom = rep.sup_norm + rep.lp_norm;
  const double beta = 1.0 - 2.0 / p;
  const diskops::GridInterpolant fi(f);
  std::vector<double> ratio(pairs.size()), df(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t i) {
    df[i] = std::abs(fi(pairs[i].a) - fi(pairs[i].b));
    const double sep = std::abs(pairs[i].a - pairs[i].b);
    ratio[i] = denom > 0.0 && sep > 0.0 ? df[i] / (denom * std::pow(sep, beta)) : 0.0;
  });
  for (double v : ratio) rep.c_hat = std::max(rep.c_hat, v);
  rep.finite = std::isfinite(rep.c_hat) && std::isfinite(denom);

  std::vector<double> lx, ly;
  const double floor = 1e-13 * std::max(1.0, rep.sup_norm);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double sep = std::abs(pairs[i].a - pairs[i].b);
    if (df[i] > floor && sep > 0.0) {
      lx.push_back(std::log(sep));
      ly.push_back(std::log(df[i]));
    }
  }
  if (lx.size() >= 2) rep.exponent = fit_slope(lx, ly);
  return rep;
}

RefinementReport holder_refinement(const std::function<Restriction(const GridPtr&)>& make,
                                   const std::vector<int>& sizes, double p,
                                   const std::vector<HolderPair>& pairs, double r) {
  RefinementReport rep;
  for (int n : sizes) {
    const Restriction res = make(DiscGrid::create(n, n));
    rep.sizes.push_back(n);
    rep.c_hat.push_back(holder_bound_check(res.f, res.f_dbar, p, pairs, r).c_hat);
  }
  if (rep.c_hat.empty()) return rep;
  const auto [lo, hi] = std::minmax_element(rep.c_hat.begin(), rep.c_hat.end());
  rep.spread = *lo > 0.0 ? *hi / *lo : (*hi == 0.0 ? 1.0 : std::numeric_limits<double>::infinity());
  rep.stable = std::isfinite(rep.spread) && rep.spread <= 2.0;
  return rep;
}

QuotientReport holder_quotient_check(const GridFunction& f, const GridFunction& f_dbar, double p,
                                     const std::vector<HolderPair>& pairs, double r, const std::vector<double>& rhos) {
  QuotientReport rep;
  const diskops::GridInterpolant fi(f), di(f_dbar);
  const GridPtr& g = f.grid();
  double base = 0.0;
  for (double rho : rhos) {
    if (!(rho > 0.0 && rho <= 1.0)) throw Error(ErrorCode::InvalidArgument, "rescaling factors must lie in (0, 1]");
    // f_rho(zeta) = f(rho zeta), (f_rho)_zetabar = rho f_zetabar(rho zeta)
    const GridFunction fr = GridFunction::sample(g, [&](cplx z) { return fi(rho * z); });
    const GridFunction dr = GridFunction::sample(g, [&](cplx z) { return rho * di(rho * z); });
    const double c = holder_bound_check(fr, dr, p, pairs, r).c_hat;
    rep.rhos.push_back(rho);
    rep.c_hat.push_back(c);
    if (rho == 1.0) base = c;
  }
  if (base == 0.0 && !rep.c_hat.empty()) base = *std::max_element(rep.c_hat.begin(), rep.c_hat.end());
  const double top = rep.c_hat.empty() ? 0.0 : *std::max_element(rep.c_hat.begin(), rep.c_hat.end());
  rep.ratio = base > 0.0 ? top / base : (top == 0.0 ? 1.0 : std::numeric_limits<double>::infinity());
  rep.ok = std::isfinite(rep.ratio) && rep.ratio <= 2.0;
  return rep;
}

// ------------------------------------------------------------ limit probes

LimitEstimate extrapolate_limit(const std::vector<cplx>& v, double ratio, double threshold) {
  const std::size_t n = v.size();
  if (n < 4) throw Error(ErrorCode::InvalidArgument, "limit extrapolation needs at least 4 values");
  LimitEstimate est;
  double scale = 1.0;
  for (const cplx& x : v) scale = std::max(scale, std::abs(x));
  for (std::size_t k = 0; k + 1 < n; ++k) est.differences.push_back(std::abs(v[k + 1] - v[k]));
  const double floor = 1e-13 * scale;

  // decay of the differences over the last three steps
  const std::size_t back = n - 2, front = n >= 5 ? n - 5 : 0;
  const double d_last = est.differences[back], d_prev = est.differences[front];
  if (d_last <= floor) est.ratio = 0.0;
  else est.ratio = std::pow(d_last / std::max(d_prev, floor), 1.0 / static_cast<double>(back - front));

  for (std::size_t k = n / 2; k < n; ++k)
    for (std::size_t l = k + 1; l < n; ++l) est.oscillation = std::max(est.oscillation, std::abs(v[k] - v[l]));

  est.has_limit = est.ratio < 0.9 || est.oscillation <= threshold;
  if (!est.has_limit) {
    est.limit = v.back();
    est.error_bar = est.oscillation;
    return est;
  }
  // Neville extrapolation to s = 0 through s_k = ratio^k (the common factor cancels).
  auto extrapolate = [&](std::size_t m) {
    std::vector<cplx> p(v.end() - static_cast<std::ptrdiff_t>(m), v.end());
    std::vector<double> s(m);
    for (std::size_t i = 0; i < m; ++i) s[i] = std::pow(ratio, static_cast<double>(n - m + i));
    for (std::size_t len = 1; len < m; ++len)
      for (std::size_t i = 0; i + len < m; ++i)
        p[i] = (s[i] * p[i + 1] - s[i + len] * p[i]) / (s[i] - s[i + len]);
    return p[0];
  };
  est.limit = extrapolate(4);
  est.error_bar = std::abs(est.limit - extrapolate(3)) + floor;
  return est;
}

LimitEstimate ray_limit(const ScalarField& f, const CVector& p, const CVector& d, const ApproachSpec& spec) {
  check_approach(spec);
  std::vector<cplx> vals(static_cast<std::size_t>(spec.steps));
  double s = spec.start;
  for (int k = 0; k < spec.steps; ++k, s *= spec.ratio) vals[static_cast<std::size_t>(k)] = f(p + s * d);
  return extrapolate_limit(vals, spec.ratio, spec.threshold);
}

LimitEstimate radial_limit_probe(const std::function<cplx(cplx)>& f, cplx zeta0, const ApproachSpec& spec) {
  check_approach(spec);
  if (std::abs(std::abs(zeta0) - 1.0) > 1e-12) throw Error(ErrorCode::InvalidArgument, "zeta0 must lie on the unit circle");
  if (!(spec.aperture < kPi / 2) || !(std::abs(spec.angle) < spec.aperture)) {
    std::ostringstream os;
    os << "approach angle " << spec.angle << " is outside the Stolz aperture " << spec.aperture;
    throw Error(ErrorCode::ApproachTangential, os.str());
  }
  const cplx step = -zeta0 * std::polar(1.0, spec.angle);
  std::vector<cplx> vals(static_cast<std::size_t>(spec.steps));
  double s = spec.start;
  for (int k = 0; k < spec.steps; ++k, s *= spec.ratio) {
    const cplx zeta = zeta0 + s * step;
    if (std::abs(zeta) >= 1.0) throw Error(ErrorCode::ApproachTangential, "approach point leaves the disc");
    vals[static_cast<std::size_t>(k)] = f(zeta);
  }
  return extrapolate_limit(vals, spec.ratio, spec.threshold);
}

LimitEstimate radial_limit_probe(const GridFunction& f, cplx zeta0, const ApproachSpec& spec) {
  const diskops::GridInterpolant fi(f);
  return radial_limit_probe([&fi](cplx z) { return fi(z); }, zeta0, spec);
}

// ------------------------------------------------------- Chirka-Lindelöf

CVector Curve::derivative(double t) const {
  constexpr double h = 1e-5;
  if (t >= 1.0 - 2.0 * h) return (3.0 * gamma(t) - 4.0 * gamma(t - h) + gamma(t - 2.0 * h)) / (2.0 * h);
  if (t <= 2.0 * h) return (-3.0 * gamma(t) + 4.0 * gamma(t + h) - gamma(t + 2.0 * h)) / (2.0 * h);
  return (gamma(t + h) - gamma(t - h)) / (2.0 * h);
}

bool is_admissible(const Curve& c, const WedgeDomain& w, double tol) {
  const CVector p = c(1.0);
  if (p.size() != w.dimension() || w.edge_defect(p) > tol) return false;
  const CVector v = c.derivative(1.0);
  for (int j = 0; j < w.faces(); ++j) {
    const auto [rz, rzb] = w.defining(j).gradients(p);
    // d rho (v) = rho_z v + rho_zbar conj(v); rho rises to 0 along a curve coming from the wedge side
    const double d = std::real((rz * v)(0) + (rzb * v.conjugate())(0));
    if (!(d > tol * std::max(1.0, v.norm()))) return false;
  }
  return true;
}

namespace {

struct TransversalDisc {
  DiscMap disc;
  cplx zeta2;
  double miss = 0.0;
};

// Disc z with z(0) = q and z(zeta2) close to target.
TransversalDisc transversal_disc(const ComplexMatrixField& a, const CVector& q, const CVector& target, double radius,
                                 const GridPtr& grid) {
  const CVector w = target - q;
  const double wn = w.norm();
  const CVector v = radius * w / wn;
  TransversalDisc out;
  out.zeta2 = wn / radius;
  if (a.is_zero()) {
    std::vector<GridFunction> comps;
    for (Eigen::Index c = 0; c < q.size(); ++c)
      comps.push_back(GridFunction::sample(grid, [&](cplx z) { return q(c) + v(c) * z; }, true));
    out.disc = DiscMap(grid, std::move(comps));
    return out;
  }
  out.disc = disc_through(a, q, v, grid);
  // Gauss-Newton for min |z(zeta) - target| over zeta
  cplx zeta = out.zeta2;
  for (int it = 0; it < 20; ++it) {
    const CVector r = out.disc(zeta) - target;
    const double h = 1e-6;
    const CVector jx = (out.disc(zeta + h) - out.disc(zeta - h)) / (2.0 * h);
    const CVector jy = (out.disc(zeta + I * h) - out.disc(zeta - I * h)) / (2.0 * h);
    Eigen::MatrixXd jac(2 * q.size(), 2);
    Eigen::VectorXd rr(2 * q.size());
    for (Eigen::Index c = 0; c < q.size(); ++c) {
      jac(2 * c, 0) = jx(c).real(), jac(2 * c + 1, 0) = jx(c).imag();
      jac(2 * c, 1) = jy(c).real(), jac(2 * c + 1, 1) = jy(c).imag();
      rr(2 * c) = r(c).real(), rr(2 * c + 1) = r(c).imag();
    }
    const Eigen::Vector2d step = jac.colPivHouseholderQr().solve(-rr);
    zeta += cplx(step(0), step(1));
    if (std::abs(zeta) >= 1.0 || step.norm() < 1e-14) break;
  }
  out.zeta2 = zeta;
  out.miss = (out.disc(zeta) - target).norm();
  return out;
}

} // namespace

LindelofReport chirka_lindelof_compare(const TestFunction& f, const Curve& g1, const Curve& g2, const WedgeDomain& w,
                                       const LindelofOptions& opts) {
  if (!(opts.p > 2.0) || !(opts.kappa > 0.0) || opts.levels < 3)
    throw Error(ErrorCode::InvalidArgument, "need p > 2, kappa > 0 and at least 3 levels");
  if (!is_admissible(g1, w)) throw Error(ErrorCode::InvalidArgument, "gamma1 is not admissible: " + g1.description);
  const CVector p1 = g1(1.0), p2 = g2(1.0);
  const double speed = std::max(1e-12, g1.derivative(1.0).norm());

  LindelofReport rep;
  rep.required = 1.0 - 2.0 / opts.p - opts.fit_tolerance;
  const GridPtr grid = DiscGrid::create(opts.disc_grid, 2 * opts.disc_grid);
  const auto pairs = holder_pairs(0.5, 64, 7);
  const ComplexMatrixField& a = w.structure();
  std::vector<double> gap;
  for (int k = 2; k < opts.levels + 2; ++k) {
    const double s = std::ldexp(1.0, -k);
    const CVector q1 = g1(1.0 - s), q2 = g2(1.0 - s);
    rep.one_minus_t.push_back(s);
    rep.difference.push_back(std::abs(f.f(q1) - f.f(q2)));
    gap.push_back((q2 - q1).norm() / (s * speed));
  }
  // tangency: |gamma2 - gamma1| = o(1 - t)
  if ((p1 - p2).norm() > 1e-10 || !(gap.back() < 0.05) || !(gap.back() < 0.25 * std::max(gap.front(), 1e-300))) {
    std::ostringstream os;
    os << "|gamma2 - gamma1| / (1 - t) = " << gap.back() << " at 1 - t = " << rep.one_minus_t.back();
    throw Error(ErrorCode::NotTangent, os.str());
  }

  rep.bounded = true;
  for (std::size_t i = 0; i < rep.one_minus_t.size(); ++i) {
    const double s = rep.one_minus_t[i];
    const CVector q1 = g1(1.0 - s), q2 = g2(1.0 - s);
    if ((q2 - q1).norm() == 0.0) {
      rep.zeta2.push_back(0.0), rep.holder_bound.push_back(0.0), rep.miss.push_back(0.0);
      continue;
    }
    const TransversalDisc td = transversal_disc(a, q1, q2, opts.kappa * s * speed, grid);
    if (!(std::abs(td.zeta2) < 1.0) || td.miss > 0.25 * (q2 - q1).norm()) {
      std::ostringstream os;
      os << "disc through gamma1(t) misses gamma2(t) at 1 - t = " << s << " (|zeta2| = " << std::abs(td.zeta2)
         << ", miss " << td.miss << ")";
      throw Error(ErrorCode::TransversalMiss, os.str());
    }
    const Restriction res = restrict_to_disc(f, td.disc, a, &w);
    const HolderReport h = holder_bound_check(res.f, res.f_dbar, opts.p, pairs, 0.5);
    const double z2 = std::abs(td.zeta2);
    const double bound = h.c_hat * (h.sup_norm + h.lp_norm) * std::pow(z2, 1.0 - 2.0 / opts.p);
    rep.zeta2.push_back(z2);
    rep.holder_bound.push_back(bound);
    rep.miss.push_back(td.miss);
    if (z2 <= 0.5 && rep.difference[i] > bound * (1.0 + 1e-9) + 1e-12) rep.bounded = false;
  }

  std::vector<double> lx, ly;
  const double floor = 1e-13 * f.sup_bound;
  for (std::size_t i = 0; i < rep.difference.size(); ++i)
    if (rep.difference[i] > floor) {
      lx.push_back(std::log(rep.one_minus_t[i]));
      ly.push_back(std::log(rep.difference[i]));
    }
  rep.exponent = lx.size() >= 2 ? fit_slope(lx, ly) : std::numeric_limits<double>::infinity();
  rep.decays = rep.difference.back() <= floor || rep.difference.back() < 1e-2 * rep.difference.front();
  rep.pass = rep.decays && rep.exponent >= rep.required;
  return rep;
}

// ---------------------------------------------------------- scaling/Montel

std::vector<double> MontelOptions::geometric_scales(int count, double log_step) {
  std::vector<double> s;
  for (int q = 0; q < count; ++q) s.push_back(std::exp(-log_step * q));
  return s;
}

std::vector<double> MontelOptions::harmonic_scales(int k_max) {
  std::vector<double> s;
  for (int k = 1; k <= k_max; ++k) s.push_back(1.0 / k);
  return s;
}

namespace {

// Central-difference residual G_zbar + G_z A of a scalar function, step h.
CRowVector fd_residual(const std::function<cplx(const CVector&)>& g, const CVector& z, const CMatrix& a, double h) {
  const int n = static_cast<int>(z.size());
  CRowVector gz(n), gzb(n);
  for (int j = 0; j < n; ++j) {
    CVector e = CVector::Zero(n);
    e(j) = h;
    const cplx gx = (g(z + e) - g(z - e)) / (2.0 * h);
    e(j) = I * h;
    const cplx gy = (g(z + e) - g(z - e)) / (2.0 * h);
    gz(j) = 0.5 * (gx - I * gy);
    gzb(j) = 0.5 * (gx + I * gy);
  }
  return gzb + gz * a;
}

} // namespace

MontelReport scaling_montel(const TestFunction& tf, const ComplexMatrixField& a, const Cone& k0,
                            const MontelOptions& opts) {
  const int n = tf.f.dimension();
  if (a.dimension() != n || k0.vertex.size() != n) throw Error(ErrorCode::InvalidArgument, "dimensions differ");
  if (opts.scales.size() < 3) throw Error(ErrorCode::InvalidArgument, "need at least 3 scales");
  for (std::size_t k = 0; k < opts.scales.size(); ++k)
    if (!(opts.scales[k] > 0.0) || (k > 0 && !(opts.scales[k] < opts.scales[k - 1])))
      throw Error(ErrorCode::InvalidArgument, "scales must be positive and strictly decreasing");
  if (operator_norm(a(k0.vertex)) > 1e-12)
    throw Error(ErrorCode::InvalidArgument, "the structure must equal the standard one at the cone vertex");
  if (!(opts.probe_min > 0.0 && opts.probe_min <= opts.probe_max) || opts.probes < 2)
    throw Error(ErrorCode::InvalidArgument, "probe shell must satisfy 0 < probe_min <= probe_max");

  Rng rng(opts.seed);
  std::vector<CVector> probes;
  for (int i = 0; i < opts.probes; ++i) {
    const double phi = rng.uniform(0.0, 0.9 * k0.half_angle);
    const CVector u = random_orthogonal(k0.axis, rng);
    const double rad = rng.uniform(opts.probe_min, opts.probe_max);
    probes.push_back(k0.vertex + rad * (std::cos(phi) * k0.axis + std::sin(phi) * u));
  }

  const std::size_t m = opts.scales.size(), np = probes.size();
  const CVector& v = k0.vertex;
  auto member = [&](std::size_t k) {
    const double eps = opts.scales[k];
    return [&tf, &v, eps](const CVector& z) { return tf.f(v + eps * (z - v)); };
  };
  auto member_a = [&](std::size_t k, const CVector& z) { return a(v + opts.scales[k] * (z - v)); };

  MontelReport rep;
  rep.scales = opts.scales;
  rep.residual_chain.assign(m, 0.0);
  rep.residual_direct.assign(m, 0.0);
  std::vector<double> floors(m, 0.0), consistency(m, 0.0);
  std::vector<std::vector<cplx>> vals(m, std::vector<cplx>(np));
  parallel_for(m, [&](std::size_t k) {
    const double eps = opts.scales[k];
    const auto g = member(k);
    for (std::size_t i = 0; i < np; ++i) {
      const CVector& z = probes[i];
      const CVector zeta = v + eps * (z - v);
      const CMatrix ak = member_a(k, z);
      const auto [fz, fzb] = tf.f.gradients(zeta);
      const CRowVector chain = eps * accal::cr_residual(fz, fzb, ak);
      const double h = 1e-5 * std::max(1.0, z.norm());
      const CRowVector direct = fd_residual(g, z, ak, h);
      const CRowVector coarse = fd_residual(g, z, ak, 2.0 * h);
      rep.residual_chain[k] = std::max(rep.residual_chain[k], chain.norm());
      rep.residual_direct[k] = std::max(rep.residual_direct[k], direct.norm());
      floors[k] = std::max(floors[k], (direct - coarse).norm() + 1e-14 * std::max(1.0, std::abs(g(z))) / h);
      consistency[k] = std::max(consistency[k], (chain - direct).norm());
      vals[k][i] = g(z);
    }
  });
  rep.consistency = *std::max_element(consistency.begin(), consistency.end());
  rep.consistent = rep.consistency <= 1e-6 * std::max(1.0, tf.sup_bound);

  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < m; ++k)
    if (rep.residual_direct[k] > 100.0 * floors[k]) {
      lx.push_back(std::log(opts.scales[k]));
      ly.push_back(std::log(rep.residual_direct[k]));
    }
  rep.fit_members = static_cast<int>(lx.size());
  rep.slope = fit_slope(lx, ly);
  rep.linear = rep.fit_members >= 3 && std::abs(rep.slope - 1.0) <= 0.2;

  const double beta = 1.0 - 2.0 / opts.p;
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t i = 0; i < np; ++i)
      for (std::size_t j = i + 1; j < np; ++j)
        rep.equicontinuity = std::max(rep.equicontinuity, std::abs(vals[k][i] - vals[k][j]) /
                                                              std::pow((probes[i] - probes[j]).norm(), beta));

  // greedy subsequence on a halving tolerance ladder, from the first anchor that keeps 3 members
  for (std::size_t a = 0; a < m && rep.subsequence.size() < 3; ++a) {
    double tol = 0.1 * tf.sup_bound;
    rep.subsequence.assign(1, static_cast<int>(a));
    for (std::size_t k = a + 1; k < m; ++k) {
      const auto& last = vals[static_cast<std::size_t>(rep.subsequence.back())];
      double d = 0.0;
      for (std::size_t i = 0; i < np; ++i) d = std::max(d, std::abs(vals[k][i] - last[i]));
      if (d < tol) {
        rep.subsequence.push_back(static_cast<int>(k));
        tol *= 0.5;
      }
    }
  }
  rep.converged = rep.subsequence.size() >= 3;
  if (!rep.converged) {
    rep.status = std::string(to_string(ErrorCode::NoConvergentSubsequence));
    return rep;
  }

  // limit candidate: mean of the tail half of the kept members
  const std::size_t tail = rep.subsequence.size() / 2;
  std::vector<std::size_t> members;
  for (std::size_t q = rep.subsequence.size() - std::max<std::size_t>(tail, 2); q < rep.subsequence.size(); ++q)
    members.push_back(static_cast<std::size_t>(rep.subsequence[q]));
  double eps_mean = 0.0;
  for (std::size_t k : members) eps_mean += opts.scales[k];
  eps_mean /= static_cast<double>(members.size());
  const auto limit = [&](const CVector& z) {
    cplx s{};
    for (std::size_t k : members) s += member(k)(z);
    return s / static_cast<double>(members.size());
  };
  const CMatrix zero = CMatrix::Zero(n, n);
  std::vector<double> lres(np), lfloor(np);
  parallel_for(np, [&](std::size_t i) {
    const CVector& z = probes[i];
    const double h = 1e-5 * std::max(1.0, z.norm());
    const CRowVector r1 = fd_residual(limit, z, zero, h);
    const CRowVector r2 = fd_residual(limit, z, zero, 2.0 * h);
    lres[i] = r1.norm();
    lfloor[i] = (r1 - r2).norm() + 1e-14 * std::max(1.0, std::abs(limit(z))) / h;
  });
  rep.limit_residual = *std::max_element(lres.begin(), lres.end());
  rep.limit_floor = eps_mean * tf.dbar_bound + *std::max_element(lfloor.begin(), lfloor.end());
  rep.limit_at_floor = rep.limit_residual <= 2.0 * rep.limit_floor;
  rep.status = "ok";
  return rep;
}

// -------------------------------------------------------------- ray family

std::string_view to_string(Verdict v) {
  switch (v) {
  case Verdict::Nontangential: return "NONTANGENTIAL";
  case Verdict::Directional: return "DIRECTIONAL";
  case Verdict::None: return "NONE";
  }
  return "NONE";
}

std::vector<CVector> wedge_directions(int n, int count) {
  if (n < 1 || count < 1) throw Error(ErrorCode::InvalidArgument, "need n >= 1 and count >= 1");
  std::vector<CVector> out;
  if (n == 1) {
    out.push_back(CVector::Constant(1, cplx(-1.0, 0.0)));
    return out;
  }
  if (n == 2) {
    for (int k = 0; k < count; ++k) {
      const double a = (k + 0.5) * kPi / (2.0 * count);
      CVector d(2);
      d << cplx(-std::cos(a), 0.0), cplx(-std::sin(a), 0.0);
      out.push_back(d);
    }
    return out;
  }
  // Halton points pushed off the coordinate hyperplanes
  static constexpr int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  if (n > static_cast<int>(std::size(primes))) throw Error(ErrorCode::InvalidArgument, "too many dimensions for directions");
  for (int k = 0; k < count; ++k) {
    CVector d(n);
    for (int j = 0; j < n; ++j) {
      double f = 1.0, x = 0.0;
      for (int i = k + 1; i > 0; i /= primes[j]) {
        f /= primes[j];
        x += f * (i % primes[j]);
      }
      d(j) = -(0.05 + x);
    }
    out.push_back(d / d.norm());
  }
  return out;
}

namespace {

struct SubsetVerdict {
  Verdict verdict = Verdict::None;
  cplx limit{};
  double error_bar = 0.0;
};

SubsetVerdict judge(const std::vector<const LimitEstimate*>& est, double tol) {
  SubsetVerdict out;
  if (est.empty()) return out;
  for (const auto* e : est)
    if (!e->has_limit) return out;
  cplx mean{};
  double bar = 0.0, spread = 0.0;
  for (const auto* e : est) {
    mean += e->limit;
    bar = std::max(bar, e->error_bar);
  }
  mean /= static_cast<double>(est.size());
  for (const auto* e : est) spread = std::max(spread, std::abs(e->limit - mean));
  out.limit = mean;
  out.error_bar = bar + spread;
  out.verdict = (2.0 * spread <= tol && bar <= 0.1 * tol) ? Verdict::Nontangential : Verdict::Directional;
  return out;
}

double angle_between(const CVector& u, const CVector& v) {
  const double c = real_dot(u, v) / (u.norm() * v.norm());
  return std::acos(std::clamp(c, -1.0, 1.0));
}

bool ray_inside(const WedgeDomain& w, const CVector& p, const CVector& d, const ApproachSpec& s) {
  const double last = s.start * std::pow(s.ratio, s.steps - 1);
  return w.contains(p + s.start * d) && w.contains(p + last * d);
}

} // namespace

RayReport ray_family_limits(const TestFunction& tf, const std::vector<CVector>& edge_points, const WedgeDomain& w,
                            const RayOptions& opts, bool keep_per_direction) {
  const int n = w.dimension();
  if (tf.f.dimension() != n) throw Error(ErrorCode::InvalidArgument, "function and wedge dimensions differ");
  if (!(opts.tolerance > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
  check_approach(opts.approach);
  const CVector axis = wedge_axis(n);
  std::vector<CVector> dirs = wedge_directions(n, opts.directions);
  dirs.push_back(axis);
  std::vector<double> dir_angle;
  for (const auto& d : dirs) dir_angle.push_back(angle_between(d, axis));
  std::vector<double> apertures = opts.apertures;
  std::sort(apertures.begin(), apertures.end(), std::greater<>());

  RayReport rep;
  rep.points.resize(edge_points.size());
  parallel_for(edge_points.size(), [&](std::size_t idx) {
    const CVector& p = edge_points[idx];
    PointVerdict& pv = rep.points[idx];
    pv.point = p;
    std::vector<DirectionLimit> lims;
    std::vector<double> angles;
    for (std::size_t q = 0; q < dirs.size(); ++q) {
      if (!ray_inside(w, p, dirs[q], opts.approach)) continue;
      lims.push_back({dirs[q], ray_limit(tf.f, p, dirs[q], opts.approach)});
      angles.push_back(dir_angle[q]);
    }
    std::vector<const LimitEstimate*> all;
    for (const auto& l : lims) all.push_back(&l.estimate);
    const SubsetVerdict full = judge(all, opts.tolerance);
    pv.verdict = full.verdict;
    pv.limit = full.limit;
    pv.error_bar = full.error_bar;
    for (double ap : apertures) {
      std::vector<const LimitEstimate*> sub;
      for (std::size_t q = 0; q < lims.size(); ++q)
        if (angles[q] <= ap + 1e-12) sub.push_back(&lims[q].estimate);
      pv.by_aperture.push_back(judge(sub, opts.tolerance).verdict);
    }
    if (tf.limit_oracle) {
      const auto o = tf.limit_oracle(p);
      pv.exceptional = !o.has_value();
      if (o && pv.verdict == Verdict::Nontangential) pv.oracle_error = std::abs(pv.limit - *o);
    }
    if (pv.verdict == Verdict::Nontangential) {
      Rng rng(mix_seed(opts.seed, idx));
      for (int r = 0; r < opts.extra_rays; ++r) {
        const double phi = rng.uniform(0.0, opts.extra_cone);
        const CVector d = std::cos(phi) * axis + std::sin(phi) * random_orthogonal(axis, rng);
        if (!ray_inside(w, p, d, opts.approach)) continue;
        const LimitEstimate e = ray_limit(tf.f, p, d, opts.approach);
        if (!e.has_limit || std::abs(e.limit - pv.limit) > 3.0 * opts.tolerance) pv.extra_rays_agree = false;
      }
    }
    if (keep_per_direction) pv.per_direction = std::move(lims);
  });

  int regular = 0, nontangential = 0;
  for (const auto& pv : rep.points) {
    if (pv.exceptional) {
      ++rep.exceptional_points;
      if (pv.verdict == Verdict::None) ++rep.exceptional_none;
    } else {
      ++regular;
      if (pv.verdict == Verdict::Nontangential) ++nontangential;
    }
    if (pv.oracle_error) rep.max_oracle_error = std::max(rep.max_oracle_error, *pv.oracle_error);
    if (!pv.extra_rays_agree) rep.extra_rays_agree = false;
    // shrinking the aperture never turns NONTANGENTIAL into NONE
    Verdict prev = pv.verdict;
    for (Verdict v : pv.by_aperture) {
      if (prev == Verdict::Nontangential && v == Verdict::None) rep.monotone = false;
      prev = v;
    }
  }
  rep.nontangential_fraction = regular > 0 ? static_cast<double>(nontangential) / regular : 0.0;
  return rep;
}

std::vector<CVector> edge_samples(const WedgeDomain& w, int count, int slice, std::uint64_t seed) {
  if (count < 0 || slice < 0) throw Error(ErrorCode::InvalidArgument, "sample counts must be non-negative");
  const int n = w.dimension();
  Rng rng(seed);
  std::vector<CVector> out;
  for (int i = 0; i < count + slice; ++i) {
    RVector y(n);
    for (int j = 0; j < n; ++j) y(j) = rng.uniform(-1.0, 1.0);
    if (i >= count) y(0) = 0.0;
    out.push_back(w.edge_point(y));
  }
  return out;
}

} // namespace holodisc::fatou
