#include "holodisc/error.hpp"
#include "holodisc/io.hpp"
#include "holodisc/parallel.hpp"
#include "holodisc/run.hpp"

#include <gtest/gtest.h>

#include <filesystem>

using namespace holodisc;

namespace {

std::string temp_path(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "holodisc_tests";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

template <class F>
void expect_code(ErrorCode code, F&& f, const std::string& mention = {}) {
  try {
    f();
    ADD_FAILURE() << "no error raised";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
    if (!mention.empty()) EXPECT_NE(std::string(e.what()).find(mention), std::string::npos) << e.what();
  }
}

} // namespace

TEST(Csv, GridRoundTripIsExact) {
  const GridPtr g = DiscGrid::create(5, 8);
  const GridFunction f = GridFunction::sample(g, [](cplx z) { return std::exp(z) / 3.0; }, true);
  const GridFunction back = io::parse_grid_csv(io::write_grid_csv(f));
  EXPECT_EQ(back.values(), f.values());
  ASSERT_TRUE(back.boundary());
  EXPECT_EQ(*back.boundary(), *f.boundary());
}

TEST(Csv, DiscRoundTripIsExact) {
  const DiscMap z = flat_family(FamilyParams::unit(2), BoundaryFunction::cutoff(16), DiscGrid::create(4, 16));
  const DiscMap back = io::parse_disc_csv(io::write_disc_csv(z));
  ASSERT_EQ(back.dimension(), 2);
  for (int j = 0; j < 2; ++j) EXPECT_EQ(back.component(j).values(), z.component(j).values());
  EXPECT_EQ(back.boundary(3), z.boundary(3));
}

TEST(Csv, ErrorsCarryLineNumbers) {
  try {
    io::parse_grid_csv("n_r,n_theta\n3,4\n0,0,1,1\n0,1,x,1\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4);
  }
  expect_code(ErrorCode::InputParseError, [] { io::parse_grid_csv("n_r,n_theta\n3,4\n0,0,1,1\n"); });
  expect_code(ErrorCode::InputParseError, [] { io::parse_grid_csv("n_r,n_theta\n1,4\n"); });
}

TEST(Csv, ShortestRoundTripFormatting) {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) EXPECT_EQ(std::stod(io::format_double(x)), x);
  EXPECT_EQ(io::format_double(0.5), "0.5");
}

TEST(Structure, CatalogAndFile) {
  CVector z(2);
  z << cplx(0.2, 0.1), cplx(-0.3, 0.0);
  EXPECT_EQ(io::structure_from_catalog("zero", 2)(z), CMatrix::Zero(2, 2));
  EXPECT_EQ(io::structure_from_catalog("const 0.3", 2)(z), 0.3 * CMatrix::Identity(2, 2));
  EXPECT_EQ(io::structure_from_catalog("const 0.1 0.2", 1)(z.head(1))(0, 0), cplx(0.1, 0.2));
  EXPECT_LT(std::abs(io::structure_from_catalog("linear 0.1", 2)(z)(1, 1) - 0.1 * z(0)), 1e-16);
  const ComplexMatrixField a = io::parse_structure("# example\nn 2\nentry 1 2 : 0.1 0 z1 ; 0 0.05 zb2\n");
  EXPECT_LT(std::abs(a(z)(0, 1) - (0.1 * z(0) + cplx(0, 0.05) * std::conj(z(1)))), 1e-16);
  EXPECT_EQ(a(z)(1, 0), cplx(0.0));
  expect_code(ErrorCode::InputParseError, [] { io::structure_from_catalog("spiral 2", 2); });
  try {
    io::parse_structure("n 2\nentry 3 1 : 1 0\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
  }
}

TEST(WedgeFile, KindsAndErrors) {
  EXPECT_TRUE(io::parse_wedge("dim 2\nmodel\n").is_model());
  const WedgeDomain g = io::parse_wedge("dim 2\ndelta 0.2\ngraph 1 : 0.05 y1^2 ; 0.05 y2^2\ngraph 2 : 0.05 y1^2\n");
  EXPECT_TRUE(g.is_graph());
  EXPECT_EQ(g.delta(), 0.2);
  const WedgeDomain r = io::parse_wedge("dim 1\nrho 1 : x1 - 0.1*y1^2\n");
  EXPECT_EQ(r.faces(), 1);
  try {
    io::parse_wedge("dim 2\nmodel\ngraph 1 : 0.1 y1^2\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
  }
  expect_code(ErrorCode::InputParseError, [] { io::parse_wedge("dim 2\nrho 1 : x1 +* y1\n"); });
}

TEST(CurveFile, EvaluatesComponents) {
  const fatou::Curve c = io::parse_curve("dim 2\ngamma 1 = -(1 - t)\ngamma 2 = -(1 - t) + (1 - t)^2 * (0.5 + 0.3*i)\n");
  const CVector v = c(0.5);
  EXPECT_NEAR(std::abs(v(0) + 0.5), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(v(1) - (-0.5 + 0.25 * cplx(0.5, 0.3))), 0.0, 1e-15);
  expect_code(ErrorCode::InputParseError, [] { io::parse_curve("dim 2\ngamma 1 = t\n"); });
}

TEST(TestFunctionFile, ExpressionAndBuiltins) {
  const auto f = io::parse_test_function("dim 2\nF = exp(z1) + 0.1*zb1\nsup_bound 4\ndbar_bound 0.1\n");
  CVector z(2);
  z << cplx(-0.3, 0.2), cplx(-0.1, 0.4);
  EXPECT_NEAR(std::abs(f.f(z) - (std::exp(z(0)) + 0.1 * std::conj(z(0)))), 0.0, 1e-15);
  EXPECT_EQ(f.dbar_bound, 0.1);
  const auto b = io::parse_test_function("dim 2\nbuiltin power_i\n");
  EXPECT_NEAR(std::abs(b.f(z) - std::exp(I * std::log(-z(0)))), 0.0, 1e-14);
  expect_code(ErrorCode::InputParseError, [] { io::parse_test_function("dim 2\nbuiltin nothing\n"); });
}

TEST(Config, EchoRoundTrip) {
  RunConfig c = RunConfig::parse("# demo\ncommand = solve-disc\nA = const 0.3\n grid=16x32 \nseed = zeta\n");
  EXPECT_EQ(c.command, "solve-disc");
  EXPECT_EQ(c.values.at("grid"), "16x32");
  EXPECT_EQ(RunConfig::parse(c.echo()), c);
  const RunConfig v = c.validated();
  EXPECT_EQ(RunConfig::parse(v.echo()), v);
  EXPECT_EQ(v.values.at("tol"), "1e-8");
  EXPECT_EQ(v.seed(), 1u);
}

TEST(Config, EveryCommandValidatesWithDefaults) {
  for (const std::string& cmd : commands()) {
    const RunConfig v = RunConfig{cmd, {}}.validated();
    EXPECT_EQ(RunConfig::parse(v.echo()), v) << cmd;
    EXPECT_TRUE(v.has("rng-seed")) << cmd;
  }
}

TEST(Config, ErrorsNameTheField) {
  expect_code(ErrorCode::ConfigError, [] { RunConfig{"solve-disc", {{"tol", "-1"}}}.validated(); }, "tol");
  expect_code(ErrorCode::ConfigError, [] { RunConfig{"solve-disc", {{"grid", "2x64"}}}.validated(); }, "grid");
  expect_code(ErrorCode::ConfigError, [] { RunConfig{"solve-disc", {{"grid", "64"}}}.validated(); }, "grid");
  expect_code(ErrorCode::ConfigError, [] { RunConfig{"solve-disc", {{"colour", "red"}}}.validated(); }, "colour");
  expect_code(ErrorCode::ConfigError, [] { RunConfig{"fatou", {{"dirs", "0"}}}.validated(); }, "dirs");
  expect_code(ErrorCode::ConfigError, [] { RunConfig{"launch", {}}.validated(); }, "command");
  expect_code(ErrorCode::ConfigError, [] { run(RunConfig{"holder", {{"p", "2"}}}); }, "p");
  expect_code(ErrorCode::ConfigError, [] { run(RunConfig{"cg", {}}); }, "input");
  try {
    RunConfig::parse("command = cg\njust words\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
  }
}

TEST(Run, SolveDiscMatchesClosedForm) {
  const std::string out = temp_path("closed.csv");
  const RunReport r = run(RunConfig{"solve-disc", {{"A", "const 0.3"}, {"seed", "zeta"}, {"grid", "32x64"}, {"out", out}}});
  EXPECT_EQ(exit_code(r), 0);
  const std::string text = io::read_file(out);
  EXPECT_EQ(text.rfind("# rng-seed 1\n", 0), 0u);
  const DiscMap z = io::parse_disc_csv(text);
  double err = 0.0;
  for (int j = 0; j < z.grid()->n_r(); ++j)
    for (int k = 0; k < z.grid()->n_theta(); ++k) {
      const cplx s = z.grid()->node(j, k);
      err = std::max(err, std::abs(z.at_node(j, k)(0) - (s + 0.3 * std::conj(s))));
    }
  EXPECT_LT(err, 1e-8);
}

TEST(Run, CauchyGreenOfZeros) {
  const std::string in = temp_path("zeros.csv"), out = temp_path("zeros_out.csv");
  io::write_file(in, io::write_grid_csv(GridFunction::sample(DiscGrid::create(6, 8), [](cplx) { return cplx(0.0); })));
  const RunReport r = run(RunConfig{"cg", {{"input", in}, {"out", out}}});
  EXPECT_EQ(exit_code(r), 0);
  EXPECT_EQ(io::parse_grid_csv(io::read_file(out)).sup_norm(), 0.0);
}

TEST(Run, MalformedWedgeIsParseError) {
  const std::string path = temp_path("bad_wedge.txt");
  io::write_file(path, "dim 2\nmodel\nslope 3\n");
  expect_code(ErrorCode::InputParseError, [&] { run(RunConfig{"family", {{"wedge", path}}}); }, "line 3");
}

TEST(Run, NumericFailureExitsOne) {
  const RunReport r = run(RunConfig{"solve-disc", {{"A", "linear 1.5"}, {"grid", "16x32"}}});
  EXPECT_EQ(exit_code(r), 1);
  EXPECT_TRUE(r.results.contains("error"));
}

TEST(Run, ReportsAreDeterministicAcrossThreads) {
  const RunConfig c{"fatou", {{"edge-samples", "200"}, {"slice-samples", "4"}, {"rng-seed", "7"}}};
  const int saved = thread_count();
  set_thread_count(1);
  const std::string a = run(c).to_json().dump();
  set_thread_count(3);
  const std::string b = run(c).to_json().dump();
  set_thread_count(saved);
  EXPECT_EQ(a, b);
  EXPECT_NE(a.find("\"rng-seed\":7"), std::string::npos);
  EXPECT_NE(run(RunConfig{"fatou", {{"edge-samples", "200"}, {"rng-seed", "8"}}}).to_json().dump(), a);
}

TEST(Run, VerdictFileSchema) {
  const std::string out = temp_path("verdicts.json");
  const RunReport r = run(RunConfig{"fatou", {{"edge-samples", "20"}, {"slice-samples", "2"}, {"out", out}}});
  EXPECT_EQ(exit_code(r), 0);
  const auto j = nlohmann::json::parse(io::read_file(out));
  EXPECT_EQ(j["rng-seed"], 1);
  ASSERT_EQ(j["points"].size(), 22u);
  for (const auto& p : j["points"]) {
    EXPECT_EQ(p["coords"].size(), 2u);
    EXPECT_TRUE(p.contains("verdict") && p.contains("limit") && p.contains("error_bar"));
    EXPECT_EQ(p["per_direction"].size(), 17u);
  }
}

TEST(Run, ScenarioSmoke) {
  EXPECT_EQ(exit_code(run(RunConfig{"family", {{"c", "0.2"}, {"t", "1.3"}, {"grid", "16x64"}}})), 0);
  EXPECT_EQ(exit_code(run(RunConfig{"foliation", {{"grid", "16x64"}, {"coverage-samples", "4"}}})), 0);
  EXPECT_EQ(exit_code(run(RunConfig{"holder", {{"grid", "32x32"}}})), 0);
  EXPECT_EQ(exit_code(run(RunConfig{"lindelof", {}})), 0);
  EXPECT_EQ(exit_code(run(RunConfig{"montel", {}})), 0);
  expect_code(ErrorCode::ConfigError, [] { run(RunConfig{"family", {{"c", "0.1,0.2"}}}); }, "'c'");
}
