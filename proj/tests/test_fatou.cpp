#include "holodisc/error.hpp"
#include "holodisc/fatou.hpp"

#include <gtest/gtest.h>

using namespace holodisc;
using namespace holodisc::fatou;

namespace {

template <class F>
void expect_code(ErrorCode code, F&& f) {
  try {
    f();
    ADD_FAILURE() << "no error raised";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

GridFunction sample(const GridPtr& g, const std::function<cplx(cplx)>& f) { return GridFunction::sample(g, f); }

DiscMap unit_flat_disc(int nr, int nt) {
  return flat_family(FamilyParams::unit(2), BoundaryFunction::cutoff(nt), DiscGrid::create(nr, nt));
}

} // namespace

TEST(Extrapolation, GeometricTailConverges) {
  std::vector<cplx> v;
  for (int k = 0; k < 12; ++k) v.push_back(cplx(0.3, -0.1) + cplx(0.5, 0.2) * std::pow(0.5, k));
  const LimitEstimate e = extrapolate_limit(v, 0.5, 1e-3);
  EXPECT_TRUE(e.has_limit);
  EXPECT_LT(std::abs(e.limit - cplx(0.3, -0.1)), 1e-12);
  EXPECT_LT(e.error_bar, 1e-8);
}

TEST(Extrapolation, UnimodularOscillationHasNoLimit) {
  std::vector<cplx> v;
  for (int k = 0; k < 12; ++k) v.push_back(std::polar(1.0, -k * std::log(2.0)));
  EXPECT_FALSE(extrapolate_limit(v, 0.5, 1e-3).has_limit);
}

TEST(RadialProbe, ContinuousFunctionGivesBoundaryValue) {
  const auto f = [](cplx z) { return std::exp(z) + z * z; };
  const cplx z0 = std::polar(1.0, 0.7);
  const LimitEstimate e = radial_limit_probe(f, z0);
  EXPECT_TRUE(e.has_limit);
  EXPECT_LT(std::abs(e.limit - f(z0)), 1e-8);
}

TEST(RadialProbe, PowerOfOneMinusZeta) {
  const auto f = [](cplx z) { return std::exp(I * std::log(1.0 - z)); };
  // along the radius f = exp(i log s) with |f| = 1: no limit at 1
  for (double s : {0.1, 0.01, 0.001}) EXPECT_NEAR(std::abs(f(1.0 - s)), 1.0, 1e-14);
  EXPECT_FALSE(radial_limit_probe(f, 1.0).has_limit);
  const LimitEstimate e = radial_limit_probe(f, I);
  EXPECT_TRUE(e.has_limit);
  EXPECT_LT(std::abs(e.limit - f(I)), 1e-6);
}

TEST(RadialProbe, GridFunctionProbe) {
  const GridPtr g = DiscGrid::create(32, 64);
  const GridFunction u = sample(g, [](cplx z) { return z * z + 0.5 * std::conj(z); });
  const cplx z0 = std::polar(1.0, 2.0);
  ApproachSpec s;
  s.steps = 8;
  const LimitEstimate e = radial_limit_probe(u, z0, s);
  EXPECT_TRUE(e.has_limit);
  EXPECT_LT(std::abs(e.limit - (z0 * z0 + 0.5 * std::conj(z0))), 1e-6);
}

TEST(RadialProbe, TangentialApproachRejected) {
  ApproachSpec s;
  s.angle = kPi / 3;
  expect_code(ErrorCode::ApproachTangential, [&] { radial_limit_probe([](cplx z) { return z; }, 1.0, s); });
}

TEST(Restriction, HolomorphicFunctionHasZeroDbar) {
  const DiscMap z = unit_flat_disc(32, 64);
  const auto f = TestFunction::from_expression("exp(z1) + z2^2", 2, 10.0, 0.0);
  const Restriction r = restrict_to_disc(f, z, ComplexMatrixField::zero(2));
  // gradients of a parsed expression are finite differences
  EXPECT_LT(r.sup_f_dbar, 1e-8);
  EXPECT_LT(r.f_dbar_direct.sup_norm(), 1e-6);
}

// f = conj(z_1) o z with z_1 = S phi: f_zetabar = conj((S phi)').
TEST(Restriction, ConjugateCoordinateChainRule) {
  const int nt = 64;
  const DiscMap z = unit_flat_disc(32, nt);
  const auto f = TestFunction::from_expression("zb1", 2, 10.0, 1.0);
  const Restriction r = restrict_to_disc(f, z, ComplexMatrixField::zero(2));
  const diskops::SchwarzIntegral s(BoundaryFunction::cutoff(nt));
  double err = 0.0;
  for (int j = 0; j < z.grid()->n_r(); ++j)
    for (int k = 0; k < nt; ++k) err = std::max(err, std::abs(r.f_dbar(j, k) - std::conj(s.derivative(z.grid()->node(j, k)))));
  EXPECT_LT(err, 1e-6);
}

TEST(Restriction, PerturbedExponentialObeysBound) {
  const DiscMap z = unit_flat_disc(48, 96);
  const WedgeDomain w = WedgeDomain::model(2);
  const Restriction r = restrict_to_disc(TestFunction::exp_perturbed(2, 0.1), z, ComplexMatrixField::zero(2), &w);
  EXPECT_LE(r.sup_f_dbar, r.bound + 1e-10);
  EXPECT_GT(r.sup_f_dbar, 0.0);
  EXPECT_LT(r.consistency, 1e-6);
}

TEST(Restriction, DiscLeavingWedgeRejected) {
  const GridPtr g = DiscGrid::create(16, 32);
  const DiscMap z = solve_disc(ComplexMatrixField::zero(2), HolomorphicSeed::parse("zeta; zeta"), g);
  const WedgeDomain w = WedgeDomain::model(2);
  expect_code(ErrorCode::DiscExitsWedge,
              [&] { restrict_to_disc(TestFunction::power_i(2), z, ComplexMatrixField::zero(2), &w); });
}

TEST(Holder, ConjugateIsLipschitz) {
  const GridPtr g = DiscGrid::create(32, 64);
  const auto pairs = holder_pairs(0.5, 200, 3);
  const HolderReport h =
      holder_bound_check(sample(g, [](cplx z) { return std::conj(z); }), sample(g, [](cplx) { return cplx(1.0); }),
                         4.0, pairs, 0.5);
  EXPECT_TRUE(h.finite);
  EXPECT_GE(h.exponent, 0.5);
  EXPECT_NEAR(h.exponent, 1.0, 1e-6);
}

TEST(Holder, ConstantHasZeroConstant) {
  const GridPtr g = DiscGrid::create(16, 32);
  const HolderReport h = holder_bound_check(sample(g, [](cplx) { return cplx(2.0, 1.0); }),
                                            sample(g, [](cplx) { return cplx(0.0); }), 4.0, holder_pairs(0.5, 50, 1), 0.5);
  EXPECT_LT(h.c_hat, 1e-12);
}

TEST(Holder, IdentityConstantAgainstDirectRatio) {
  const GridPtr g = DiscGrid::create(32, 64);
  const auto pairs = holder_pairs(0.5, 100, 4);
  const HolderReport h = holder_bound_check(sample(g, [](cplx z) { return z; }), sample(g, [](cplx) { return cplx(0.0); }),
                                            4.0, pairs, 0.5);
  // |f(a) - f(b)| = |a - b| and |f|_inf = 1 on the grid up to the outer node
  double c = 0.0;
  for (const auto& p : pairs) c = std::max(c, std::pow(std::abs(p.a - p.b), 0.5) / h.sup_norm);
  EXPECT_NEAR(h.c_hat, c, 1e-9 * c);
  EXPECT_NEAR(h.exponent, 1.0, 1e-6);
}

TEST(Holder, ArgumentChecks) {
  const GridPtr g = DiscGrid::create(16, 32);
  const GridFunction f = sample(g, [](cplx z) { return z; });
  expect_code(ErrorCode::InvalidArgument, [&] { holder_bound_check(f, f, 2.0, holder_pairs(0.5, 5, 1), 0.5); });
  const std::vector<HolderPair> bad{{cplx(0.1), cplx(0.6)}};
  expect_code(ErrorCode::PairOutsideDisc, [&] { holder_bound_check(f, f, 4.0, bad, 0.5); });
}

TEST(Holder, QuotientStableForConjugate) {
  const GridPtr g = DiscGrid::create(32, 32);
  const QuotientReport q = holder_quotient_check(sample(g, [](cplx z) { return std::conj(z) + z * z; }),
                                                 sample(g, [](cplx) { return cplx(1.0); }), 4.0,
                                                 holder_pairs(0.5, 100, 2), 0.5);
  EXPECT_TRUE(q.ok);
  EXPECT_LE(q.ratio, 2.0);
}

TEST(Holder, RefinementStableOnFamilyDisc) {
  const auto f = TestFunction::exp_perturbed(2, 0.1);
  const auto make = [&](const GridPtr& g) {
    return restrict_to_disc(f, flat_family(FamilyParams::unit(2), BoundaryFunction::cutoff(g->n_theta()), g),
                            ComplexMatrixField::zero(2));
  };
  const RefinementReport r = holder_refinement(make, {32, 64}, 4.0, holder_pairs(0.5, 100, 5), 0.5);
  EXPECT_TRUE(r.stable);
  EXPECT_LE(r.spread, 2.0);
}

TEST(Lindelof, ContinuousFunctionDecays) {
  const auto f = TestFunction::from_expression("exp(z1) + z2", 2, 10.0, 0.0);
  const Curve g1{[](double t) { return CVector(CVector::Constant(2, cplx(-(1.0 - t), 0.0))); }, "diagonal"};
  const Curve g2{[](double t) {
                   const double s = 1.0 - t;
                   return CVector(CVector::Constant(2, cplx(-s + 0.3 * s * s, 0.2 * s * s)));
                 },
                 "tangent"};
  const LindelofReport r = chirka_lindelof_compare(f, g1, g2, WedgeDomain::model(2));
  EXPECT_TRUE(r.decays);
  EXPECT_TRUE(r.pass);
  EXPECT_GE(r.exponent, 0.9);
}

TEST(Lindelof, PerturbedPowerMeetsExponent) {
  const Curve g1{[](double t) { return CVector(CVector::Constant(2, cplx(-(1.0 - t), 0.0))); }, "diagonal"};
  const Curve g2{[](double t) {
                   const double s = 1.0 - t;
                   CVector v(2);
                   v << -s + s * s * cplx(0.5, 0.3), -s + s * s * cplx(-0.2, 0.4);
                   return v;
                 },
                 "tangent"};
  const LindelofReport r = chirka_lindelof_compare(TestFunction::power_i_perturbed(2, 0.1), g1, g2, WedgeDomain::model(2));
  EXPECT_TRUE(r.pass);
  EXPECT_GE(r.exponent, 0.5);
  EXPECT_TRUE(r.bounded);
  // direct evaluation along both curves
  for (std::size_t i = 0; i < r.one_minus_t.size(); ++i) {
    const double t = 1.0 - r.one_minus_t[i];
    const auto f = TestFunction::power_i_perturbed(2, 0.1);
    EXPECT_NEAR(r.difference[i], std::abs(f.f(g1(t)) - f.f(g2(t))), 1e-15);
  }
}

TEST(Lindelof, NonTangentCurvesRejected) {
  const Curve g1{[](double t) { return CVector(CVector::Constant(2, cplx(-(1.0 - t), 0.0))); }, "diagonal"};
  const Curve g2{[](double t) {
                   CVector v(2);
                   v << -(1.0 - t), -2.0 * (1.0 - t);
                   return v;
                 },
                 "skew"};
  expect_code(ErrorCode::NotTangent,
              [&] { chirka_lindelof_compare(TestFunction::power_i(2), g1, g2, WedgeDomain::model(2)); });
}

TEST(Curve, AdmissibilityAndDerivative) {
  const Curve g{[](double t) {
                  CVector v(2);
                  v << -(1.0 - t) * (1.0 - t) - (1.0 - t), cplx(-(1.0 - t), 1.0 - t);
                  return v;
                },
                "quadratic"};
  EXPECT_TRUE(is_admissible(g, WedgeDomain::model(2)));
  const CVector d = g.derivative(0.5);
  EXPECT_NEAR(std::abs(d(0) - cplx(2.0, 0.0)), 0.0, 1e-8);
  EXPECT_NEAR(std::abs(d(1) - cplx(1.0, -1.0)), 0.0, 1e-8);
  const Curve out{[](double t) { return CVector(CVector::Constant(2, cplx(1.0 - t, 0.0))); }, "outside"};
  EXPECT_FALSE(is_admissible(out, WedgeDomain::model(2)));
}

namespace {

Cone diagonal_cone() {
  CVector axis = CVector::Constant(2, cplx(-1.0 / std::sqrt(2.0), 0.0));
  return build_cone(CVector::Zero(2), axis, kPi / 6, WedgeDomain::model(2));
}

} // namespace

TEST(Montel, HolomorphicCoordinateScalesToZero) {
  MontelOptions o;
  o.scales = MontelOptions::geometric_scales(17);
  const MontelReport r =
      scaling_montel(TestFunction::from_expression("z1", 2, 4.0, 0.0), ComplexMatrixField::zero(2), diagonal_cone(), o);
  EXPECT_TRUE(r.consistent);
  EXPECT_TRUE(r.converged);
  EXPECT_TRUE(r.limit_at_floor);
}

TEST(Montel, PowerScalesByUnimodularFactor) {
  const auto f = TestFunction::power_i(2);
  CVector z(2);
  z << cplx(-0.4, 0.3), cplx(-0.2, 0.1);
  for (double eps : {0.5, 0.1, 0.01}) {
    const CVector ze = eps * z;
    // F(eps z) = eps^i F(z)
    EXPECT_NEAR(std::abs(f.f(ze) - std::exp(I * std::log(eps)) * f.f(z)), 0.0, 1e-13);
  }
  MontelOptions o;
  o.scales = MontelOptions::geometric_scales();
  const MontelReport r = scaling_montel(f, ComplexMatrixField::zero(2), diagonal_cone(), o);
  EXPECT_TRUE(std::isfinite(r.equicontinuity));
  EXPECT_TRUE(r.consistent);
  EXPECT_TRUE(r.converged);
  EXPECT_TRUE(r.limit_at_floor);
}

TEST(Montel, PerturbedResidualLinearInScale) {
  const auto f = TestFunction::power_i_perturbed(2, 0.1);
  MontelOptions o;
  o.scales = MontelOptions::geometric_scales();
  const MontelReport r = scaling_montel(f, ComplexMatrixField::zero(2), diagonal_cone(), o);
  for (std::size_t k = 0; k < r.scales.size(); ++k) EXPECT_LE(r.residual_chain[k], f.dbar_bound * r.scales[k] * (1 + 1e-9) + 1e-14);
  EXPECT_TRUE(r.linear);
  EXPECT_NEAR(r.slope, 1.0, 0.2);
}

TEST(Montel, RequiresStandardStructureAtVertex) {
  MontelOptions o;
  o.scales = MontelOptions::geometric_scales(9);
  const auto a = ComplexMatrixField::constant(CMatrix::Identity(2, 2) * 0.1);
  expect_code(ErrorCode::InvalidArgument, [&] { scaling_montel(TestFunction::power_i(2), a, diagonal_cone(), o); });
}

TEST(Rays, DirectionsPointIntoWedge) {
  const WedgeDomain w = WedgeDomain::model(2);
  for (const CVector& d : wedge_directions(2, 16)) {
    EXPECT_NEAR(d.norm(), 1.0, 1e-14);
    EXPECT_TRUE(w.contains(0.01 * d));
  }
  for (const CVector& d : wedge_directions(3, 16)) EXPECT_TRUE(WedgeDomain::model(3).contains(0.01 * d));
}

TEST(Rays, EdgeSamplesIncludeSlice) {
  const WedgeDomain w = WedgeDomain::model(2);
  const auto pts = edge_samples(w, 50, 5, 9);
  ASSERT_EQ(pts.size(), 55u);
  int slice = 0;
  for (const CVector& p : pts) {
    EXPECT_LT(w.edge_defect(p), 1e-15);
    if (p(0).imag() == 0.0) ++slice;
  }
  EXPECT_GE(slice, 5);
}

TEST(Rays, ContinuousPerturbationVanishingOnEdge) {
  const WedgeDomain w = WedgeDomain::model(2);
  // Re z_1 vanishes on the edge; the limit is exp(z_1) + z_2 there
  const auto f = TestFunction::from_expression("exp(z1) + z2 + 0.1*x1", 2, 10.0, 0.1);
  const auto pts = edge_samples(w, 30, 0, 4);
  RayOptions o;
  const RayReport r = ray_family_limits(f, pts, w, o);
  for (const PointVerdict& v : r.points) {
    EXPECT_EQ(v.verdict, Verdict::Nontangential);
    EXPECT_LT(std::abs(v.limit - (std::exp(v.point(0)) + v.point(1))), 1e-3);
  }
  EXPECT_EQ(r.nontangential_fraction, 1.0);
}

TEST(Rays, PowerFunctionVerdicts) {
  const WedgeDomain w = WedgeDomain::model(2);
  const auto pts = edge_samples(w, 200, 5, 1);
  RayOptions o;
  const RayReport r = ray_family_limits(TestFunction::power_i(2), pts, w, o, true);
  EXPECT_GE(r.nontangential_fraction, 0.99);
  EXPECT_EQ(r.exceptional_points, 5);
  EXPECT_EQ(r.exceptional_none, 5);
  EXPECT_LE(r.max_oracle_error, 1e-3);
  EXPECT_TRUE(r.monotone);
  EXPECT_TRUE(r.extra_rays_agree);
  for (const PointVerdict& v : r.points) {
    // shrinking the aperture never turns a limit into none
    for (std::size_t i = 1; i < v.by_aperture.size(); ++i)
      if (v.by_aperture[i - 1] == Verdict::Nontangential) EXPECT_NE(v.by_aperture[i], Verdict::None);
    EXPECT_EQ(v.per_direction.size(), 17u);
    if (v.exceptional) EXPECT_EQ(v.verdict, Verdict::None);
  }
}

TEST(Rays, VerdictNames) {
  EXPECT_EQ(to_string(Verdict::Nontangential), "NONTANGENTIAL");
  EXPECT_EQ(to_string(Verdict::Directional), "DIRECTIONAL");
  EXPECT_EQ(to_string(Verdict::None), "NONE");
}

TEST(TestFunctions, SpotChecksHold) {
  const WedgeDomain w = WedgeDomain::model(2);
  std::vector<CVector> pts;
  for (int i = 1; i <= 10; ++i) {
    CVector z(2);
    z << cplx(-0.1 * i, 0.05 * i), cplx(-0.02 * i, -0.1 * i);
    pts.push_back(z);
  }
  for (const auto& f : {TestFunction::power_i(2), TestFunction::power_i_perturbed(2, 0.1), TestFunction::exp_perturbed(2, 0.1)})
    EXPECT_TRUE(spot_check(f, ComplexMatrixField::zero(2), pts).ok) << f.description;
  const auto liar = TestFunction::from_expression("zb1", 2, 10.0, 0.5);
  EXPECT_FALSE(spot_check(liar, ComplexMatrixField::zero(2), pts).ok);
}
