#include "holodisc/diskops.hpp"
#include "holodisc/error.hpp"
#include "holodisc/parallel.hpp"
#include "holodisc/quadrature.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include <unsupported/Eigen/FFT>

namespace holodisc {

// ---------------------------------------------------------------- DiscGrid

DiscGrid::DiscGrid(int n_r, int n_theta) : n_r_(n_r), n_theta_(n_theta) {
  if (n_r < 2 || n_theta < 4 || n_theta % 2 != 0) {
    std::ostringstream os;
    os << "grid " << n_r << "x" << n_theta << " needs n_r >= 2 and an even n_theta >= 4";
    throw Error(ErrorCode::GridTooCoarse, os.str());
  }
  const quad::Rule rule = quad::gauss_legendre(n_r, 0.0, 1.0);
  radii_ = rule.nodes;
  radial_weights_ = rule.weights;
  bary_ = quad::barycentric_weights(rule);
  d_radial_ = quad::differentiation_matrix(radii_, bary_);
  const double dtheta = 2.0 * kPi / n_theta;
  area_weights_.resize(radii_.size());
  for (std::size_t j = 0; j < radii_.size(); ++j) area_weights_[j] = radii_[j] * radial_weights_[j] * dtheta;
}

std::shared_ptr<const DiscGrid> DiscGrid::create(int n_r, int n_theta) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const DiscGrid>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{n_r, n_theta}];
  if (!slot) slot = std::make_shared<const DiscGrid>(n_r, n_theta);
  return slot;
}

double DiscGrid::angle(int k) const { return 2.0 * kPi * k / n_theta_; }

cplx DiscGrid::node(int j, int k) const { return std::polar(radius(j), angle(k)); }

const diskops::CauchyGreenKernel& DiscGrid::cauchy_green_kernel() const {
  std::call_once(kernel_once_, [this] { kernel_ = std::make_shared<const diskops::CauchyGreenKernel>(*this); });
  return *kernel_;
}

// ------------------------------------------------------------ GridFunction

GridFunction::GridFunction(GridPtr grid)
    : grid_(std::move(grid)), values_(CMatrix::Zero(grid_->n_r(), grid_->n_theta())) {}

GridFunction::GridFunction(GridPtr grid, CMatrix values, std::optional<CVector> boundary)
    : grid_(std::move(grid)), values_(std::move(values)), boundary_(std::move(boundary)) {
  if (values_.rows() != grid_->n_r() || values_.cols() != grid_->n_theta())
    throw Error(ErrorCode::InvalidArgument, "grid function shape does not match its grid");
  if (boundary_ && boundary_->size() != grid_->n_theta())
    throw Error(ErrorCode::InvalidArgument, "boundary trace length does not match the grid");
}

bool GridFunction::all_finite() const {
  return values_.allFinite() && (!boundary_ || boundary_->allFinite());
}

double GridFunction::sup_norm() const { return values_.size() ? values_.cwiseAbs().maxCoeff() : 0.0; }

double GridFunction::lp_norm(double p) const {
  std::vector<double> terms;
  terms.reserve(grid_->size());
  for (int j = 0; j < grid_->n_r(); ++j)
    for (int k = 0; k < grid_->n_theta(); ++k) terms.push_back(grid_->weight(j) * std::pow(std::abs(values_(j, k)), p));
  return std::pow(pairwise_sum(terms.data(), terms.size()), 1.0 / p);
}

// -------------------------------------------------------- BoundaryFunction

double BoundaryFunction::cutoff_value(double theta) {
  double t = std::fmod(theta, 2.0 * kPi);
  if (t < 0) t += 2.0 * kPi;
  if (t <= kPi) return 0.0;
  const double s = (t - kPi) / kPi;
  const double q = 4.0 * s * (1.0 - s);
  const double q2 = q * q, q4 = q2 * q2;
  return -q4 * q4;
}

BoundaryFunction BoundaryFunction::cutoff(int n_theta) {
  if (n_theta < 4 || n_theta % 2 != 0)
    throw Error(ErrorCode::GridTooCoarse, "cutoff needs an even number of angles >= 4");
  return sample(n_theta, [](double th) { return cplx(cutoff_value(th), 0.0); }, true);
}

void BoundaryFunction::validate_cutoff() const {
  const int n = size();
  if (n < 4 || n % 2 != 0) throw Error(ErrorCode::BadCutoff, "cutoff needs an even number of samples");
  for (int k = 0; k < n; ++k) {
    const cplx v = samples(k);
    std::ostringstream os;
    if (v.imag() != 0.0) os << "sample " << k << " is not real";
    else if (v.real() < -1.0 || v.real() > 0.0) os << "sample " << k << " = " << v.real() << " outside [-1, 0]";
    else if (k <= n / 2 && v.real() != 0.0) os << "sample " << k << " on the upper half-circle is nonzero";
    else if (k > n / 2 && !(v.real() < 0.0)) os << "sample " << k << " on the lower half-circle is not negative";
    if (!os.str().empty()) throw Error(ErrorCode::BadCutoff, os.str());
  }
}

namespace diskops {

// ------------------------------------------------------------------- DFTs

CMatrix dft_rows(const CMatrix& values) {
  Eigen::FFT<double> fft;
  CMatrix out(values.rows(), values.cols());
  std::vector<cplx> in(static_cast<std::size_t>(values.cols())), res;
  for (Eigen::Index j = 0; j < values.rows(); ++j) {
    for (Eigen::Index k = 0; k < values.cols(); ++k) in[static_cast<std::size_t>(k)] = values(j, k);
    fft.fwd(res, in);
    for (Eigen::Index k = 0; k < values.cols(); ++k) out(j, k) = res[static_cast<std::size_t>(k)];
  }
  return out;
}

CMatrix idft_rows(const CMatrix& modes) {
  Eigen::FFT<double> fft;
  CMatrix out(modes.rows(), modes.cols());
  std::vector<cplx> in(static_cast<std::size_t>(modes.cols())), res;
  for (Eigen::Index j = 0; j < modes.rows(); ++j) {
    for (Eigen::Index k = 0; k < modes.cols(); ++k) in[static_cast<std::size_t>(k)] = modes(j, k);
    fft.inv(res, in);
    for (Eigen::Index k = 0; k < modes.cols(); ++k) out(j, k) = res[static_cast<std::size_t>(k)];
  }
  return out;
}

// ------------------------------------------------------------ Cauchy-Green
//
// With w = r e^{i theta}, zeta = rho e^{i phi} and Fourier modes f_m(r),
//   Tf(zeta) = sum_m g_m(rho) e^{i (m-1) phi},
//   g_m = -2 int_rho^1 (rho/r)^{m-1} f_m dr          (m >= 1)
//   g_m =  2 int_0^min(rho,1) (r/rho)^{1-m} f_m dr   (m <= 0)
// Radial integrals use Gauss-Legendre sub-rules on [0, rho] and [rho, 1]
// applied to the polynomial interpolant of f_m through the grid radii.

namespace {

int subrule_size(const DiscGrid& g) { return std::max(g.n_r(), g.n_theta() / 2) + 16; }

// Rows (one per DFT index) mapping f_m at the grid radii to g_m(rho).
RMatrix radial_rows(const DiscGrid& g, double rho) {
  const int n = g.n_theta();
  const int nr = g.n_r();
  const int q_nodes = subrule_size(g);
  RMatrix rows = RMatrix::Zero(n, nr);

  const double upper = std::min(rho, 1.0);
  if (upper > 0.0) {
    // inner: p = 1 - m in [1, n/2 + 1]
    const quad::Rule in = quad::gauss_legendre(q_nodes, 0.0, upper);
    const RMatrix interp = quad::interpolation_matrix(g.radii(), g.barycentric(), in.nodes);
    const int p_max = n / 2 + 1;
    RMatrix w(p_max + 1, q_nodes);
    for (int q = 0; q < q_nodes; ++q) {
      const double ratio = in.nodes[static_cast<std::size_t>(q)] / rho;
      double pw = 1.0;
      for (int p = 0; p <= p_max; ++p) {
        w(p, q) = in.weights[static_cast<std::size_t>(q)] * pw;
        pw *= ratio;
      }
    }
    const RMatrix inner = w * interp;
    for (int qi = 0; qi < n; ++qi) {
      const int m = mode_number(qi, n);
      if (m <= 0) rows.row(qi) = 2.0 * inner.row(1 - m);
    }
  }
  if (rho < 1.0) {
    // outer: p = m - 1 in [0, n/2]
    const quad::Rule out = quad::gauss_legendre(q_nodes, rho, 1.0);
    const RMatrix interp = quad::interpolation_matrix(g.radii(), g.barycentric(), out.nodes);
    const int p_max = n / 2;
    RMatrix w(p_max + 1, q_nodes);
    for (int q = 0; q < q_nodes; ++q) {
      const double ratio = rho / out.nodes[static_cast<std::size_t>(q)];
      double pw = 1.0;
      for (int p = 0; p <= p_max; ++p) {
        w(p, q) = out.weights[static_cast<std::size_t>(q)] * pw;
        pw *= ratio;
      }
    }
    const RMatrix outer = w * interp;
    for (int qi = 0; qi < n; ++qi) {
      const int m = mode_number(qi, n);
      if (m >= 1) rows.row(qi) = -2.0 * outer.row(m - 1);
    }
  }
  return rows;
}

CMatrix fourier_modes(const GridFunction& f) {
  return dft_rows(f.values()) / static_cast<double>(f.grid()->n_theta());
}

void require_finite(const GridFunction& f) {
  if (!f.all_finite()) throw Error(ErrorCode::InvalidArgument, "grid function has non-finite values");
}

} // namespace

CauchyGreenKernel::CauchyGreenKernel(const DiscGrid& grid) {
  const int n = grid.n_theta();
  const int nr = grid.n_r();
  kernels_.assign(static_cast<std::size_t>(n), RMatrix::Zero(nr + 1, nr));
  parallel_for(static_cast<std::size_t>(nr + 1), [&](std::size_t jo) {
    const double rho = static_cast<int>(jo) < nr ? grid.radius(static_cast<int>(jo)) : 1.0;
    const RMatrix rows = radial_rows(grid, rho);
    for (int q = 0; q < n; ++q) kernels_[static_cast<std::size_t>(q)].row(static_cast<Eigen::Index>(jo)) = rows.row(q);
  });
}

GridFunction cauchy_green(const GridFunction& f) {
  require_finite(f);
  const DiscGrid& g = *f.grid();
  const int n = g.n_theta();
  const int nr = g.n_r();
  const auto& kernel = g.cauchy_green_kernel();
  const CMatrix modes = fourier_modes(f);
  CMatrix out_modes(nr + 1, n);
  for (int q = 0; q < n; ++q) {
    const RMatrix& k = kernel.mode(q);
    const RVector re = k * modes.col(q).real();
    const RVector im = k * modes.col(q).imag();
    for (int j = 0; j <= nr; ++j) out_modes(j, q) = cplx(re(j), im(j));
  }
  // sum_m g_m e^{i(m-1) theta} = e^{-i theta} * (inverse DFT of g) * n
  CMatrix vals = idft_rows(out_modes) * static_cast<double>(n);
  for (int k = 0; k < n; ++k) vals.col(k) *= std::polar(1.0, -g.angle(k));
  CMatrix interior = vals.topRows(nr);
  CVector boundary = vals.row(nr).transpose();
  return GridFunction(f.grid(), std::move(interior), std::move(boundary));
}

std::vector<cplx> cauchy_green(const GridFunction& f, std::span<const cplx> points) {
  require_finite(f);
  const DiscGrid& g = *f.grid();
  const int n = g.n_theta();
  const CMatrix modes = fourier_modes(f);
  std::vector<cplx> out(points.size());
  for (const cplx& z : points)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw Error(ErrorCode::SingularityTooClose, "evaluation point is not finite");
  parallel_for(points.size(), [&](std::size_t i) {
    const cplx z = points[i];
    const double rho = std::abs(z);
    if (rho == 0.0) {
      out[i] = cauchy_green_at_origin(f).value;
      return;
    }
    const double phi = std::arg(z);
    const RMatrix rows = radial_rows(g, rho);
    cplx sum{};
    for (int q = 0; q < n; ++q) {
      const int m = mode_number(q, n);
      const double re = rows.row(q).dot(modes.col(q).real());
      const double im = rows.row(q).dot(modes.col(q).imag());
      sum += cplx(re, im) * std::polar(1.0, (m - 1) * phi);
    }
    out[i] = sum;
  });
  return out;
}

OriginJet cauchy_green_at_origin(const GridFunction& f) {
  require_finite(f);
  const DiscGrid& g = *f.grid();
  const int n = g.n_theta();
  const CMatrix modes = fourier_modes(f);
  OriginJet jet{};
  // Tf(0) = -2 int_0^1 f_1 dr, d/dzeta Tf(0) = -2 int_0^1 f_2 / r dr, d/dzetabar = f(0).
  for (int j = 0; j < g.n_r(); ++j) {
    const double w = g.radial_weights()[static_cast<std::size_t>(j)];
    jet.value += -2.0 * w * modes(j, 1 % n);
    jet.d_zeta += -2.0 * w * modes(j, 2 % n) / g.radius(j);
  }
  const RMatrix at0 = quad::interpolation_matrix(g.radii(), g.barycentric(), {0.0});
  for (int j = 0; j < g.n_r(); ++j) jet.d_zetabar += at0(0, j) * modes(j, 0);
  return jet;
}

// ----------------------------------------------------------------- Schwarz

SchwarzIntegral::SchwarzIntegral(const BoundaryFunction& phi) {
  const int n = phi.size();
  if (n < 4 || n % 2 != 0) throw Error(ErrorCode::GridTooCoarse, "Schwarz integral needs an even sample count >= 4");
  CMatrix row(1, n);
  row.row(0) = phi.samples.transpose();
  const CMatrix hat = dft_rows(row) / static_cast<double>(n);
  coeffs_.resize(n / 2 + 1);
  coeffs_(0) = hat(0, 0);
  for (int k = 1; k < n / 2; ++k) coeffs_(k) = 2.0 * hat(0, k);
  coeffs_(n / 2) = hat(0, n / 2);
}

cplx SchwarzIntegral::operator()(cplx zeta) const {
  cplx acc{};
  for (Eigen::Index k = coeffs_.size() - 1; k >= 0; --k) acc = acc * zeta + coeffs_(k);
  return acc;
}

cplx SchwarzIntegral::derivative(cplx zeta) const {
  cplx acc{};
  for (Eigen::Index k = coeffs_.size() - 1; k >= 1; --k) acc = acc * zeta + static_cast<double>(k) * coeffs_(k);
  return acc;
}

GridFunction SchwarzIntegral::on_grid(const GridPtr& grid) const {
  const int n = grid->n_theta();
  const int nr = grid->n_r();
  const Eigen::Index kmax = std::min<Eigen::Index>(coeffs_.size() - 1, n / 2);
  CMatrix modes = CMatrix::Zero(nr + 1, n);
  for (int j = 0; j <= nr; ++j) {
    const double r = j < nr ? grid->radius(j) : 1.0;
    double rk = 1.0;
    for (Eigen::Index k = 0; k <= kmax; ++k) {
      modes(j, k) += coeffs_(k) * rk;
      rk *= r;
    }
  }
  CMatrix vals = idft_rows(modes) * static_cast<double>(n);
  CMatrix interior = vals.topRows(nr);
  CVector boundary = vals.row(nr).transpose();
  return GridFunction(grid, std::move(interior), std::move(boundary));
}

std::vector<cplx> schwarz(const BoundaryFunction& phi, std::span<const cplx> points) {
  const SchwarzIntegral s(phi);
  std::vector<cplx> out;
  out.reserve(points.size());
  for (const cplx& z : points) {
    if (!(std::abs(z) <= 1.0)) throw Error(ErrorCode::OutsideDisc, "Schwarz integral is evaluated in the closed disc only");
    out.push_back(s(z));
  }
  return out;
}

// -------------------------------------------------------------------- dbar

namespace {

// Derivative weights at x of the quadratic through (x0, x1, x2).
std::array<double, 3> quadratic_derivative_weights(double x0, double x1, double x2, double x) {
  return {((x - x1) + (x - x2)) / ((x0 - x1) * (x0 - x2)),
          ((x - x0) + (x - x2)) / ((x1 - x0) * (x1 - x2)),
          ((x - x0) + (x - x1)) / ((x2 - x0) * (x2 - x1))};
}

struct Partials {
  CMatrix d_r;
  CMatrix d_theta;
};

Partials polar_partials(const GridFunction& u, Stencil stencil) {
  const DiscGrid& g = *u.grid();
  const int nr = g.n_r();
  const int n = g.n_theta();
  const CMatrix& v = u.values();
  Partials p{CMatrix(nr, n), CMatrix(nr, n)};
  if (stencil == Stencil::FiniteDifference) {
    if (nr < DiscGrid::kMinRadial || n < DiscGrid::kMinAngular)
      throw Error(ErrorCode::GridTooCoarse, "finite-difference stencil needs n_r >= 3 and n_theta >= 4");
    for (int j = 0; j < nr; ++j) {
      const int c = std::clamp(j, 1, nr - 2);
      const auto w = quadratic_derivative_weights(g.radius(c - 1), g.radius(c), g.radius(c + 1), g.radius(j));
      p.d_r.row(j) = w[0] * v.row(c - 1) + w[1] * v.row(c) + w[2] * v.row(c + 1);
    }
    const double h = 2.0 * kPi / n;
    for (int k = 0; k < n; ++k)
      p.d_theta.col(k) = (v.col((k + 1) % n) - v.col((k + n - 1) % n)) / (2.0 * h);
  } else {
    if (nr < 2 || n < DiscGrid::kMinAngular)
      throw Error(ErrorCode::GridTooCoarse, "spectral stencil needs n_r >= 2 and n_theta >= 4");
    p.d_r = g.radial_derivative().cast<cplx>() * v;
    CMatrix modes = dft_rows(v);
    for (int q = 0; q < n; ++q) {
      const int m = mode_number(q, n);
      const cplx factor = (q == n / 2) ? cplx{} : I * static_cast<double>(m);
      modes.col(q) *= factor;
    }
    p.d_theta = idft_rows(modes);
  }
  return p;
}

GridFunction wirtinger(const GridFunction& u, Stencil stencil, bool conjugate) {
  const DiscGrid& g = *u.grid();
  const Partials p = polar_partials(u, stencil);
  CMatrix out(g.n_r(), g.n_theta());
  const double s = conjugate ? 1.0 : -1.0;
  for (int j = 0; j < g.n_r(); ++j) {
    const double r = g.radius(j);
    for (int k = 0; k < g.n_theta(); ++k) {
      const cplx e = std::polar(1.0, s * g.angle(k));
      out(j, k) = 0.5 * e * (p.d_r(j, k) + s * I * p.d_theta(j, k) / r);
    }
  }
  return GridFunction(u.grid(), std::move(out));
}

} // namespace

GridFunction dbar(const GridFunction& u, Stencil stencil) { return wirtinger(u, stencil, true); }

GridFunction dzeta(const GridFunction& u, Stencil stencil) { return wirtinger(u, stencil, false); }

// ---------------------------------------------------------- interpolation

GridInterpolant::GridInterpolant(const GridFunction& f)
    : grid_(f.grid()), modes_(fourier_modes(f)) {}

cplx GridInterpolant::operator()(cplx zeta) const {
  const double rho = std::abs(zeta);
  if (rho > 1.0 + 1e-12) throw Error(ErrorCode::OutsideDisc, "interpolation point outside the disc");
  const int n = grid_->n_theta();
  const double phi = std::arg(zeta);
  const RMatrix l = quad::interpolation_matrix(grid_->radii(), grid_->barycentric(), {rho});
  const Eigen::RowVectorXcd c = l.cast<cplx>() * modes_;
  cplx sum{};
  for (int q = 0; q < n; ++q) {
    const int m = mode_number(q, n);
    if (q == n / 2) sum += c(q) * std::cos(0.5 * n * phi);
    else sum += c(q) * std::polar(1.0, m * phi);
  }
  return sum;
}

} // namespace diskops
} // namespace holodisc
