#include "holodisc/accal.hpp"
#include "holodisc/discsolve.hpp"
#include "holodisc/error.hpp"
#include "holodisc/fatou.hpp"
#include "holodisc/parallel.hpp"

#include <gtest/gtest.h>

using namespace holodisc;

namespace {

double closed_form_error(const DiscMap& z, cplx a) {
  const auto& g = *z.grid();
  double e = 0.0;
  for (int j = 0; j < g.n_r(); ++j)
    for (int k = 0; k < g.n_theta(); ++k) {
      const cplx s = g.node(j, k);
      e = std::max(e, std::abs(z.at_node(j, k)(0) - (s + a * std::conj(s))));
    }
  return e;
}

double distance(const DiscMap& a, const DiscMap& b) {
  double d = 0.0;
  for (int j = 0; j < a.grid()->n_r(); ++j)
    for (int k = 0; k < a.grid()->n_theta(); ++k) d = std::max(d, (a.at_node(j, k) - b.at_node(j, k)).norm());
  return d;
}

} // namespace

TEST(SolveDisc, ZeroStructureReturnsSeed) {
  const GridPtr g = DiscGrid::create(24, 48);
  const HolomorphicSeed h = HolomorphicSeed::parse("zeta; 0.5*zeta^2 + i");
  const DiscMap z = solve_disc(ComplexMatrixField::zero(2), h, g);
  EXPECT_EQ(z.info().iterations, 1);
  for (int j = 0; j < g->n_r(); ++j)
    for (int k = 0; k < g->n_theta(); ++k) EXPECT_LT((z.at_node(j, k) - h(g->node(j, k))).norm(), 1e-14);
}

TEST(SolveDisc, ConstantStructureClosedForm) {
  const GridPtr g = DiscGrid::create(32, 64);
  for (cplx a : {cplx(0.3), cplx(0.0, 0.3), std::polar(0.3, 2.0)}) {
    const DiscMap z = solve_disc(ComplexMatrixField::constant(CMatrix::Constant(1, 1, a)), HolomorphicSeed::parse("zeta"), g);
    EXPECT_TRUE(z.info().solved);
    EXPECT_LT(closed_form_error(z, a), 1e-8) << a;
    EXPECT_LE(z.info().iterations, 30);
  }
}

TEST(SolveDisc, LinearStructureContracts) {
  const GridPtr g = DiscGrid::create(48, 96);
  const auto a = ComplexMatrixField::linear({CMatrix::Constant(1, 1, 0.1)});
  SolveOptions o;
  o.tol = 1e-10;
  const DiscMap z = solve_disc(a, HolomorphicSeed::parse("zeta"), g, o);
  EXPECT_TRUE(z.info().solved);
  EXPECT_LT(holomorphy_residual(z, a), 1e-8);
  EXPECT_LT(z.info().contraction, 0.9);
  EXPECT_GT(z.info().contraction, 0.0);
  for (std::size_t i = 1; i < z.info().steps.size(); ++i) EXPECT_LT(z.info().steps[i], z.info().steps[i - 1]);
}

TEST(SolveDisc, ResidualExamples) {
  const GridPtr g = DiscGrid::create(32, 64);
  const auto zero = ComplexMatrixField::zero(1);
  const auto sample = [&](const std::function<cplx(cplx)>& f) {
    return DiscMap(g, {GridFunction::sample(g, f, true)});
  };
  EXPECT_LT(holomorphy_residual(sample([](cplx s) { return s * s - 2.0 * s; }), zero), 1e-8);
  EXPECT_NEAR(holomorphy_residual(sample([](cplx s) { return std::conj(s); }), zero), 1.0, 1e-8);
  const auto a = ComplexMatrixField::constant(CMatrix::Constant(1, 1, 0.3));
  EXPECT_LT(holomorphy_residual(sample([](cplx s) { return s + 0.3 * std::conj(s); }), a), 1e-8);
}

TEST(SolveDisc, DivergesForLargeStructure) {
  const GridPtr g = DiscGrid::create(16, 32);
  try {
    solve_disc(ComplexMatrixField::linear({CMatrix::Constant(1, 1, 1.5)}), HolomorphicSeed::parse("zeta"), g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_TRUE(e.code() == ErrorCode::NormTooLarge || e.code() == ErrorCode::NoContraction ||
                e.code() == ErrorCode::MaxIterExceeded)
        << e.what();
  }
}

// Solutions move continuously with A: |z_eps - z_eps'| is linear in |eps - eps'|.
TEST(SolveDisc, StableUnderDeformation) {
  const GridPtr g = DiscGrid::create(32, 64);
  const HolomorphicSeed h = HolomorphicSeed::parse("zeta");
  const auto solve = [&](double eps) {
    return solve_disc(ComplexMatrixField::linear({CMatrix::Constant(1, 1, eps)}), h, g);
  };
  const DiscMap base = solve(0.1);
  const double d1 = distance(solve(0.11), base), d2 = distance(solve(0.13), base);
  EXPECT_GT(d1, 0.0);
  EXPECT_NEAR(d2 / d1, 3.0, 3.0 * 0.5);
}

TEST(SolveDisc, ThreadCountDoesNotChangeBits) {
  const GridPtr g = DiscGrid::create(32, 64);
  const auto a = ComplexMatrixField::linear({CMatrix::Constant(1, 1, cplx(0.1, 0.05))});
  const int saved = thread_count();
  set_thread_count(1);
  const DiscMap z1 = solve_disc(a, HolomorphicSeed::parse("zeta"), g);
  set_thread_count(3);
  const DiscMap z3 = solve_disc(a, HolomorphicSeed::parse("zeta"), g);
  set_thread_count(saved);
  EXPECT_EQ(z1.component(0).values(), z3.component(0).values());
  EXPECT_EQ(z1.info().steps, z3.info().steps);
}

TEST(DiscThrough, ZeroStructureIsLinear) {
  const GridPtr g = DiscGrid::create(24, 48);
  CVector v = CVector::Zero(3);
  v(0) = 1.0;
  const DiscMap z = disc_through(ComplexMatrixField::zero(3), CVector::Zero(3), v, g);
  for (int j = 0; j < g->n_r(); j += 5)
    for (int k = 0; k < g->n_theta(); k += 7) {
      CVector expect = CVector::Zero(3);
      expect(0) = g->node(j, k);
      EXPECT_LT((z.at_node(j, k) - expect).norm(), 1e-12);
    }
}

TEST(DiscThrough, ConstantStructureCenterAndDirection) {
  const GridPtr g = DiscGrid::create(32, 64);
  const DiscMap z = disc_through(ComplexMatrixField::constant(CMatrix::Constant(1, 1, 0.2)), CVector::Zero(1),
                                 CVector::Constant(1, 1.0), g);
  EXPECT_LT(std::abs(z(0.0)(0)), 1e-8);
  // zeta + 0.2 conj(zeta) up to a real rescaling: z(x) is real for real x
  const cplx zx = z(cplx(0.5, 0.0))(0);
  EXPECT_LT(std::abs(zx.imag()), 1e-8);
  const cplx zy = z(cplx(0.0, 0.5))(0);
  EXPECT_NEAR(zy.imag() / zx.real(), (1.0 - 0.2) / (1.0 + 0.2), 1e-7);
}

TEST(DiscThrough, VariableStructureHitsCenter) {
  const GridPtr g = DiscGrid::create(32, 64);
  CMatrix e12 = CMatrix::Zero(2, 2);
  e12(0, 1) = 0.1;
  const auto a = ComplexMatrixField::linear({e12, CMatrix::Zero(2, 2)});
  CVector v = CVector::Zero(2);
  v(0) = 1.0;
  const DiscMap z = disc_through(a, CVector::Zero(2), v, g);
  EXPECT_LT(holomorphy_residual(z, a), 1e-8);
  EXPECT_LT(z(0.0).norm(), 1e-8);
}

// (F o z)_zetabar = (F_zbar + F_z A) conj(z)_zetabar on a solved disc.
TEST(SolveDisc, ChainRuleConsistency) {
  const GridPtr g = DiscGrid::create(48, 96);
  CMatrix b = CMatrix::Zero(2, 2);
  b(0, 0) = 0.1;
  b(1, 0) = cplx(0.0, 0.05);
  const auto a = ComplexMatrixField::linear({b, CMatrix::Zero(2, 2)});
  const DiscMap z = solve_disc(a, HolomorphicSeed::parse("0.5*zeta; 0.3*zeta + 0.1*zeta^2"), g);
  const auto f = fatou::TestFunction::from_expression("z1*zb2 + exp(z2) + 0.2*zb1^2", 2, 10.0, 10.0);
  const fatou::Restriction r = fatou::restrict_to_disc(f, z, a);
  EXPECT_LT(r.consistency, 1e-6);
  EXPECT_GT(r.sup_f_dbar, 1e-2);
}

TEST(Seed, ParseAndDefect) {
  const HolomorphicSeed h = HolomorphicSeed::parse("zeta^2; exp(zeta)");
  EXPECT_EQ(h.dimension(), 2);
  EXPECT_LT(h.dbar_defect(), 1e-10);
  try {
    HolomorphicSeed::parse("conj(zeta)");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
  }
  EXPECT_THROW(HolomorphicSeed::parse("zeta +"), ParseError);
}
