#include "holodisc/discsolve.hpp"
#include "holodisc/error.hpp"
#include "holodisc/expression.hpp"
#include "holodisc/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace holodisc {

using diskops::Stencil;

// ----------------------------------------------------------------- DiscMap

DiscMap::DiscMap(GridPtr grid, std::vector<GridFunction> components, SolveInfo info)
    : grid_(std::move(grid)), components_(std::move(components)), info_(std::move(info)) {
  interp_.reserve(components_.size());
  for (const auto& c : components_) {
    if (c.grid() != grid_) throw Error(ErrorCode::InvalidArgument, "disc components live on different grids");
    interp_.emplace_back(c);
  }
  if (!components_.empty() && std::all_of(components_.begin(), components_.end(),
                                          [](const GridFunction& c) { return c.boundary().has_value(); })) {
    CMatrix rows(dimension(), grid_->n_theta());
    for (int c = 0; c < dimension(); ++c) rows.row(c) = components_[static_cast<std::size_t>(c)].boundary()->transpose();
    boundary_modes_ = diskops::dft_rows(rows) / static_cast<double>(grid_->n_theta());
  }
}

CVector DiscMap::at_node(int j, int k) const {
  CVector z(dimension());
  for (int c = 0; c < dimension(); ++c) z(c) = components_[static_cast<std::size_t>(c)](j, k);
  return z;
}

CVector DiscMap::boundary(int k) const {
  CVector z(dimension());
  for (int c = 0; c < dimension(); ++c) {
    const auto& b = components_[static_cast<std::size_t>(c)].boundary();
    if (!b) throw Error(ErrorCode::InvalidArgument, "disc has no boundary trace");
    z(c) = (*b)(k);
  }
  return z;
}

CVector DiscMap::operator()(cplx zeta) const {
  CVector z(dimension());
  for (int c = 0; c < dimension(); ++c) z(c) = interp_[static_cast<std::size_t>(c)](zeta);
  return z;
}

CVector DiscMap::boundary_at(double theta) const {
  if (boundary_modes_.size() == 0) throw Error(ErrorCode::InvalidArgument, "disc has no boundary trace");
  const int n = grid_->n_theta();
  CVector z = CVector::Zero(dimension());
  for (int q = 0; q < n; ++q) {
    const int m = diskops::mode_number(q, n);
    const cplx e = q == n / 2 ? cplx(std::cos(0.5 * n * theta), 0.0) : std::polar(1.0, m * theta);
    z += boundary_modes_.col(q) * e;
  }
  return z;
}

// --------------------------------------------------------- HolomorphicSeed

HolomorphicSeed::HolomorphicSeed(std::vector<Component> components, std::string description)
    : components_(std::move(components)), description_(std::move(description)) {
  if (components_.empty()) throw Error(ErrorCode::InvalidArgument, "seed needs at least one component");
}

HolomorphicSeed HolomorphicSeed::parse(std::string_view text) {
  std::vector<Component> comps;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find(';', start), text.size());
    const auto piece = text.substr(start, end - start);
    const Expression e = Expression::parse(piece, {"zeta"}, 1, static_cast<int>(start));
    comps.emplace_back([e](cplx z) { return e.evaluate(std::span<const cplx>(&z, 1)); });
    start = end + 1;
  }
  HolomorphicSeed seed(std::move(comps), std::string(text));
  if (!(seed.dbar_defect() < 1e-10))
    throw Error(ErrorCode::InvalidArgument, "seed '" + std::string(text) + "' is not holomorphic in the disc");
  return seed;
}

HolomorphicSeed HolomorphicSeed::linear(const CVector& p, const CVector& v) {
  if (p.size() != v.size()) throw Error(ErrorCode::InvalidArgument, "point and direction differ in dimension");
  std::vector<Component> comps;
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    const cplx a = p(j), b = v(j);
    comps.emplace_back([a, b](cplx z) { return a + b * z; });
  }
  return HolomorphicSeed(std::move(comps), "linear");
}

CVector HolomorphicSeed::operator()(cplx zeta) const {
  CVector out(dimension());
  for (int j = 0; j < dimension(); ++j) out(j) = components_[static_cast<std::size_t>(j)](zeta);
  return out;
}

double HolomorphicSeed::dbar_defect() const {
  const GridPtr g = DiscGrid::create(16, 32);
  double worst = 0.0;
  for (const auto& c : components_) {
    const GridFunction u = GridFunction::sample(g, c);
    if (!u.all_finite()) return std::numeric_limits<double>::infinity();
    const double scale = std::max(1.0, u.sup_norm());
    worst = std::max(worst, diskops::dbar(u, Stencil::Spectral).sup_norm() / scale);
  }
  return worst;
}

// ------------------------------------------------------------------ solver

namespace detail {

std::vector<GridFunction> beltrami_density(const std::vector<GridFunction>& z, const ComplexMatrixField& a,
                                           Stencil stencil) {
  const GridPtr& g = z.front().grid();
  const int n = static_cast<int>(z.size());
  std::vector<GridFunction> out(z.size(), GridFunction(g));
  if (a.is_zero()) return out;
  std::vector<GridFunction> dz;
  dz.reserve(z.size());
  for (const auto& c : z) dz.push_back(diskops::dzeta(c, stencil));
  const int nr = g->n_r(), nt = g->n_theta();
  parallel_for(static_cast<std::size_t>(nr), [&](std::size_t jj) {
    const int j = static_cast<int>(jj);
    CVector p(n), w(n);
    for (int k = 0; k < nt; ++k) {
      for (int c = 0; c < n; ++c) {
        p(c) = z[static_cast<std::size_t>(c)](j, k);
        w(c) = std::conj(dz[static_cast<std::size_t>(c)](j, k)); // conj(z)_zetabar
      }
      const CVector v = a(p) * w;
      for (int c = 0; c < n; ++c) out[static_cast<std::size_t>(c)](j, k) = v(c);
    }
  });
  return out;
}

} // namespace detail

namespace {

double sup_distance(const std::vector<GridFunction>& u, const std::vector<GridFunction>& v) {
  double d = 0.0;
  for (std::size_t c = 0; c < u.size(); ++c) {
    d = std::max(d, (u[c].values() - v[c].values()).cwiseAbs().maxCoeff());
    if (u[c].boundary() && v[c].boundary())
      d = std::max(d, (*u[c].boundary() - *v[c].boundary()).cwiseAbs().maxCoeff());
  }
  return d;
}

double residual_of(const std::vector<GridFunction>& z, const std::vector<GridFunction>& density, Stencil stencil) {
  double r = 0.0;
  for (std::size_t c = 0; c < z.size(); ++c) {
    const GridFunction d = diskops::dbar(z[c], stencil);
    r = std::max(r, (d.values() - density[c].values()).cwiseAbs().maxCoeff());
  }
  return r;
}

std::vector<GridFunction> sample_seed(const HolomorphicSeed& h, const GridPtr& grid) {
  std::vector<GridFunction> out;
  for (int c = 0; c < h.dimension(); ++c) out.push_back(GridFunction::sample(grid, h.component(c), true));
  return out;
}

} // namespace

DiscMap solve_disc(const ComplexMatrixField& a, const HolomorphicSeed& h, const GridPtr& grid,
                   const SolveOptions& opts) {
  if (a.dimension() != h.dimension())
    throw Error(ErrorCode::InvalidArgument, "structure and seed dimensions differ");
  if (!(opts.tol > 0.0) || opts.max_iter < 1) throw Error(ErrorCode::InvalidArgument, "tol and max_iter must be positive");
  const std::vector<GridFunction> seed = sample_seed(h, grid);
  std::vector<GridFunction> z = seed;
  SolveInfo info;
  double scale = 1.0;
  for (const auto& c : seed) scale = std::max(scale, c.sup_norm());
  int growth = 0;

  while (true) {
    const std::vector<GridFunction> g = detail::beltrami_density(z, a, opts.stencil);
    if (info.iterations >= 1) {
      info.residual = residual_of(z, g, opts.stencil);
      const bool at_floor = info.steps.back() <= 1e-14 * scale;
      if (info.residual < opts.tol || at_floor) {
        info.solved = info.residual < opts.tol;
        break;
      }
    }
    if (info.iterations >= opts.max_iter) {
      std::ostringstream os;
      os << "no convergence after " << opts.max_iter << " iterations (residual " << info.residual << ")";
      throw Error(ErrorCode::MaxIterExceeded, os.str());
    }
    std::vector<GridFunction> next;
    next.reserve(z.size());
    for (std::size_t c = 0; c < z.size(); ++c) {
      if (a.is_zero()) {
        next.push_back(seed[c]);
        continue;
      }
      GridFunction tg = diskops::cauchy_green(g[c]);
      CMatrix vals = seed[c].values() + tg.values();
      CVector b = *seed[c].boundary() + *tg.boundary();
      next.emplace_back(grid, std::move(vals), std::move(b));
    }
    if (!std::all_of(next.begin(), next.end(), [](const GridFunction& f) { return f.all_finite(); }))
      throw Error(ErrorCode::NoContraction, "Picard iterate became non-finite");
    const double step = sup_distance(next, z);
    if (!info.steps.empty() && info.steps.back() > 1e-13 * scale) {
      const double ratio = step / info.steps.back();
      info.contraction = std::max(info.contraction, ratio);
      growth = ratio >= 1.0 ? growth + 1 : 0;
      if (growth >= 3) {
        std::ostringstream os;
        os << "step ratio " << ratio << " >= 1 for 3 consecutive iterations";
        throw Error(ErrorCode::NoContraction, os.str());
      }
    }
    info.steps.push_back(step);
    z = std::move(next);
    ++info.iterations;
  }
  return DiscMap(grid, std::move(z), std::move(info));
}

std::vector<GridFunction> holomorphy_residual_field(const DiscMap& z, const ComplexMatrixField& a, Stencil stencil) {
  if (a.dimension() != z.dimension()) throw Error(ErrorCode::InvalidArgument, "structure and disc dimensions differ");
  const std::vector<GridFunction> g = detail::beltrami_density(z.components(), a, stencil);
  std::vector<GridFunction> out;
  for (int c = 0; c < z.dimension(); ++c) {
    const GridFunction d = diskops::dbar(z.component(c), stencil);
    out.emplace_back(z.grid(), d.values() - g[static_cast<std::size_t>(c)].values());
  }
  return out;
}

double holomorphy_residual(const DiscMap& z, const ComplexMatrixField& a, Stencil stencil) {
  double r = 0.0;
  for (const auto& f : holomorphy_residual_field(z, a, stencil)) r = std::max(r, f.sup_norm());
  return r;
}

CenterJet center_jet(const DiscMap& z, const ComplexMatrixField& a, const HolomorphicSeed& h) {
  const int n = z.dimension();
  // z = h + T g, so z(0) = h(0) + Tg(0), z_zeta(0) = h'(0) + (Tg)_zeta(0) and
  // z_zetabar(0) = g(0).
  const std::vector<GridFunction> g = detail::beltrami_density(z.components(), a, Stencil::Spectral);
  CenterJet jet{CVector(n), CVector(n)};
  constexpr int kSamples = 64;
  constexpr double kRadius = 0.5;
  for (int c = 0; c < n; ++c) {
    cplx dh{};
    for (int k = 0; k < kSamples; ++k) {
      const cplx e = std::polar(1.0, 2.0 * kPi * k / kSamples);
      dh += h.component(c)(kRadius * e) / e;
    }
    dh /= kSamples * kRadius;
    const diskops::OriginJet t = diskops::cauchy_green_at_origin(g[static_cast<std::size_t>(c)]);
    jet.value(c) = h.component(c)(0.0) + t.value;
    jet.dx(c) = dh + t.d_zeta + t.d_zetabar;
  }
  return jet;
}

DiscMap disc_through(const ComplexMatrixField& a, const CVector& p, const CVector& v, const GridPtr& grid,
                     const DiscThroughOptions& opts) {
  if (p.size() != a.dimension() || v.size() != a.dimension())
    throw Error(ErrorCode::InvalidArgument, "point, direction and structure dimensions differ");
  if (v.norm() == 0.0) throw Error(ErrorCode::InvalidArgument, "direction must be nonzero");
  CVector ps = p, vs = v;
  double center_err = 0.0, dir_err = 0.0;
  for (int round = 0; round <= opts.max_reseed; ++round) {
    const HolomorphicSeed seed = HolomorphicSeed::linear(ps, vs);
    DiscMap z = solve_disc(a, seed, grid, opts.solve);
    const CenterJet jet = center_jet(z, a, seed);
    center_err = (jet.value - p).norm();
    dir_err = (jet.dx - v).norm() / v.norm();
    if (center_err <= opts.center_tol && dir_err <= opts.center_tol) return z;
    ps += p - jet.value;
    vs += v - jet.dx;
  }
  std::ostringstream os;
  os << "centre error " << center_err << ", direction error " << dir_err << " after " << opts.max_reseed
     << " re-seeds";
  throw Error(ErrorCode::DirectionLost, os.str());
}

} // namespace holodisc
