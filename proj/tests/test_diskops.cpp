#include "holodisc/diskops.hpp"
#include "holodisc/error.hpp"
#include "holodisc/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace holodisc;
using diskops::Stencil;

namespace {

double interior_error(const GridFunction& a, const std::function<cplx(cplx)>& b, double r0, double r1) {
  const auto& g = *a.grid();
  double e = 0.0;
  for (int j = 0; j < g.n_r(); ++j) {
    if (g.radius(j) < r0 || g.radius(j) > r1) continue;
    for (int k = 0; k < g.n_theta(); ++k) e = std::max(e, std::abs(a(j, k) - b(g.node(j, k))));
  }
  return e;
}

cplx conj_sq(cplx w) { return std::conj(w) * std::conj(w); }

} // namespace

TEST(Grid, RejectsCoarseGrids) {
  for (auto [nr, nt] : {std::pair{1, 16}, std::pair{8, 7}, std::pair{8, 2}}) {
    try {
      DiscGrid::create(nr, nt);
      FAIL() << nr << "x" << nt;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::GridTooCoarse);
    }
  }
}

TEST(Grid, AreaWeightsSumToPi) {
  const GridPtr g = DiscGrid::create(12, 16);
  double s = 0.0;
  for (int j = 0; j < g->n_r(); ++j) s += g->weight(j) * g->n_theta();
  EXPECT_NEAR(s, kPi, 1e-13);
}

TEST(Quadrature, GaussLegendreIntegratesPolynomials) {
  const quad::Rule r = quad::gauss_legendre(6, 0.0, 1.0);
  double s = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * std::pow(r.nodes[i], 11);
  EXPECT_NEAR(s, 1.0 / 12.0, 1e-15);
}

TEST(CauchyGreen, ZeroMapsToZero) {
  const GridPtr g = DiscGrid::create(16, 32);
  const GridFunction t = diskops::cauchy_green(GridFunction::sample(g, [](cplx) { return cplx(0.0); }));
  EXPECT_EQ(t.sup_norm(), 0.0);
}

// T1 = conj(zeta) inside and 1/zeta outside (Cauchy-Pompeiu).
TEST(CauchyGreen, ConstantMapsToConjugate) {
  const GridPtr g = DiscGrid::create(32, 64);
  const GridFunction one = GridFunction::sample(g, [](cplx) { return cplx(1.0); });
  EXPECT_LT(interior_error(diskops::cauchy_green(one), [](cplx w) { return std::conj(w); }, 0.0, 1.0), 1e-12);
  const std::vector<cplx> pts{{0.3, -0.2}, {0.0, 0.0}, {-0.7, 0.6}, {1.5, 0.0}, {0.0, -2.0}};
  const auto v = diskops::cauchy_green(one, pts);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const cplx expect = std::abs(pts[i]) < 1.0 ? std::conj(pts[i]) : 1.0 / pts[i];
    EXPECT_NEAR(std::abs(v[i] - expect), 0.0, 1e-12) << pts[i];
  }
}

TEST(CauchyGreen, SpectralDbarInvertsTransform) {
  const GridPtr g = DiscGrid::create(48, 64);
  const auto f = [](cplx w) { return std::conj(w) + 0.5 * w * std::conj(w) + std::exp(w); };
  const GridFunction u = GridFunction::sample(g, f);
  const GridFunction d = diskops::dbar(diskops::cauchy_green(u), Stencil::Spectral);
  EXPECT_LT(interior_error(d, f, 0.0, 1.0), 1e-8);
}

TEST(CauchyGreen, FiniteDifferenceOrderUnderRefinement) {
  std::vector<double> err;
  for (int n : {32, 64, 128}) {
    const GridPtr g = DiscGrid::create(n, n);
    const GridFunction u = GridFunction::sample(g, [](cplx w) { return conj_sq(w) + 1.0; });
    err.push_back(interior_error(diskops::dbar(diskops::cauchy_green(u), Stencil::FiniteDifference),
                                 [](cplx w) { return conj_sq(w) + 1.0; }, 0.1, 0.9));
  }
  for (std::size_t i = 1; i < err.size(); ++i) EXPECT_NEAR(std::log2(err[i - 1] / err[i]), 2.0, 0.3);
  EXPECT_LT(err.back(), 1e-2);
}

TEST(CauchyGreen, ConjugateDensityFiniteDifferenceResidual) {
  const GridPtr g = DiscGrid::create(128, 128);
  const auto f = [](cplx w) { return std::conj(w); };
  const GridFunction d = diskops::dbar(diskops::cauchy_green(GridFunction::sample(g, f)), Stencil::FiniteDifference);
  EXPECT_LT(interior_error(d, f, 0.1, 0.9), 1e-3);
}

// Outside the closed disc Tf is holomorphic: central-difference dbar vanishes.
TEST(CauchyGreen, HolomorphicOutsideDisc) {
  const GridPtr g = DiscGrid::create(32, 64);
  const GridFunction u = GridFunction::sample(g, [](cplx w) { return std::conj(w) * w + std::sin(w); });
  const double h = 1e-4;
  for (const cplx z0 : {cplx(1.5, 0.0), cplx(-1.2, 1.1), cplx(0.0, 2.5)}) {
    const std::vector<cplx> pts{z0 + h, z0 - h, z0 + I * h, z0 - I * h};
    const auto v = diskops::cauchy_green(u, pts);
    const cplx dbar = 0.5 * ((v[0] - v[1]) / (2 * h) + I * (v[2] - v[3]) / (2 * h));
    EXPECT_LT(std::abs(dbar), 1e-6) << z0;
  }
}

// Boundedness of T on sup norms: the ratio |Tf|_inf / |f|_inf stays put under refinement.
TEST(CauchyGreen, SupRatioStableUnderRefinement) {
  std::vector<double> ratio;
  for (int n : {32, 64, 128}) {
    const GridPtr g = DiscGrid::create(n, n);
    const GridFunction u = GridFunction::sample(g, [](cplx w) { return std::exp(3.0 * I * std::arg(w + 2.0)) * w; });
    ratio.push_back(diskops::cauchy_green(u).sup_norm() / u.sup_norm());
  }
  EXPECT_LT(std::abs(ratio[2] / ratio[1] - 1.0), 0.05);
  EXPECT_LT(ratio[2], 2.0);
}

TEST(CauchyGreen, OriginJetMatchesPointValue) {
  const GridPtr g = DiscGrid::create(24, 32);
  const GridFunction u = GridFunction::sample(g, [](cplx w) { return 1.0 + w * std::conj(w); });
  const auto jet = diskops::cauchy_green_at_origin(u);
  const std::vector<cplx> z0{cplx(0.0)};
  EXPECT_NEAR(std::abs(jet.value - diskops::cauchy_green(u, z0)[0]), 0.0, 1e-12);
}

TEST(Schwarz, ReproducesConstants) {
  const auto phi = BoundaryFunction::sample(64, [](double) { return cplx(-0.7); });
  const std::vector<cplx> pts{{0.0, 0.0}, {0.5, 0.5}, {-0.9, 0.1}};
  for (cplx v : diskops::schwarz(phi, pts)) EXPECT_NEAR(std::abs(v + 0.7), 0.0, 1e-14);
}

TEST(Schwarz, CosinesGivePowers) {
  const std::vector<cplx> pts{{0.1, 0.2}, {-0.6, 0.3}, {0.0, -0.95}, {0.7, 0.7}};
  for (int k : {1, 2}) {
    const auto phi = BoundaryFunction::sample(512, [k](double t) { return cplx(std::cos(k * t)); });
    const auto v = diskops::schwarz(phi, pts);
    for (std::size_t i = 0; i < pts.size(); ++i) EXPECT_NEAR(std::abs(v[i] - std::pow(pts[i], k)), 0.0, 1e-8);
  }
}

TEST(Schwarz, LinearAndSpectralOnTrigPolynomials) {
  const int n = 64;
  const auto a = BoundaryFunction::sample(n, [](double t) { return cplx(std::cos(3 * t) + std::sin(16 * t)); });
  const auto b = BoundaryFunction::sample(n, [](double t) { return cplx(0.5 - std::sin(t)); });
  BoundaryFunction c = a;
  c.samples = 2.0 * a.samples - 3.0 * b.samples;
  const std::vector<cplx> pts{{0.2, 0.1}, {-0.5, -0.5}, {0.9, 0.0}};
  const auto va = diskops::schwarz(a, pts), vb = diskops::schwarz(b, pts), vc = diskops::schwarz(c, pts);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    EXPECT_NEAR(std::abs(vc[i] - (2.0 * va[i] - 3.0 * vb[i])), 0.0, 1e-13);
    // Re(zeta^3) + Re(-i zeta^16) on the circle
    const cplx expect = std::pow(pts[i], 3) - I * std::pow(pts[i], 16);
    EXPECT_NEAR(std::abs(va[i] - expect), 0.0, 1e-12);
  }
}

TEST(Schwarz, RealPartMatchesBoundaryData) {
  const diskops::SchwarzIntegral s(BoundaryFunction::cutoff(256));
  for (int k = 0; k < 256; k += 7) {
    const double t = 2 * kPi * k / 256;
    EXPECT_NEAR(s(std::polar(1.0, t)).real(), BoundaryFunction::cutoff_value(t), 1e-6);
  }
}

TEST(Schwarz, RejectsPointsOutsideDisc) {
  const auto phi = BoundaryFunction::sample(16, [](double) { return cplx(1.0); });
  const std::vector<cplx> pts{{1.1, 0.0}};
  try {
    diskops::schwarz(phi, pts);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OutsideDisc);
  }
}

TEST(Dbar, Examples) {
  const GridPtr g = DiscGrid::create(64, 64);
  for (Stencil s : {Stencil::FiniteDifference, Stencil::Spectral}) {
    const double tol = s == Stencil::Spectral ? 1e-10 : 1e-3;
    EXPECT_LT(interior_error(diskops::dbar(GridFunction::sample(g, [](cplx w) { return w; }), s),
                             [](cplx) { return cplx(0.0); }, 0.1, 0.9),
              tol);
    EXPECT_LT(interior_error(diskops::dbar(GridFunction::sample(g, [](cplx w) { return std::conj(w); }), s),
                             [](cplx) { return cplx(1.0); }, 0.1, 0.9),
              tol);
    EXPECT_LT(interior_error(diskops::dbar(GridFunction::sample(g, [](cplx w) { return std::norm(w); }), s),
                             [](cplx w) { return w; }, 0.1, 0.9),
              tol);
  }
}

TEST(Cutoff, BuiltInIsAdmissible) {
  EXPECT_NO_THROW(BoundaryFunction::cutoff(128).validate_cutoff());
  auto bad = BoundaryFunction::sample(16, [](double) { return cplx(-0.5); });
  try {
    bad.validate_cutoff();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BadCutoff);
  }
}
