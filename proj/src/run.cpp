#include "holodisc/run.hpp"
#include "holodisc/acceptance.hpp"
#include "holodisc/discsolve.hpp"
#include "holodisc/error.hpp"
#include "holodisc/fatou.hpp"
#include "holodisc/io.hpp"
#include "holodisc/wedgefam.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>

namespace holodisc {

using nlohmann::json;
using Kind = FieldSpec::Kind;

namespace {

const std::string kModel2 = "dim 2|model";
const std::string kCurve1 = "dim 2|gamma 1 = -(1 - t)|gamma 2 = -(1 - t)";
const std::string kCurve2 =
    "dim 2|gamma 1 = -(1 - t) + (1 - t)^2 * (0.5 + 0.3*i)|gamma 2 = -(1 - t) + (1 - t)^2 * (-0.2 + 0.4*i)";

std::vector<FieldSpec> with_common(std::vector<FieldSpec> v) {
  v.push_back({"rng-seed", Kind::Integer, "1", "seed for all sampling"});
  v.push_back({"report", Kind::Path, "", "JSON report path"});
  v.push_back({"verbose", Kind::Integer, "0", "print the report to stdout when > 0"});
  return v;
}

struct Registry {
  std::vector<std::string> names;
  std::map<std::string, std::vector<FieldSpec>, std::less<>> fields;

  void add(const std::string& name, std::vector<FieldSpec> v) {
    names.push_back(name);
    fields[name] = with_common(std::move(v));
  }
};

const Registry& registry() {
  static const Registry r = [] {
    Registry g;
    g.add("solve-disc", {{"A", Kind::Text, "const 0.3", "structure: catalog spec or file"},
                         {"seed", Kind::Text, "zeta", "holomorphic seed, components separated by ';'"},
                         {"grid", Kind::Grid, "128x256", "n_r x n_theta"},
                         {"tol", Kind::Positive, "1e-8", "Picard step tolerance"},
                         {"max-iter", Kind::Count, "50", "Picard iteration cap"},
                         {"stencil", Kind::Text, "spectral", "spectral or fd"},
                         {"out", Kind::Path, "", "disc CSV output"}});
    g.add("family", {{"wedge", Kind::Text, kModel2, "wedge file or inline text"},
                     {"c", Kind::Text, "", "reduced c, comma separated (default zeros)"},
                     {"t", Kind::Text, "", "reduced t, comma separated (default ones)"},
                     {"grid", Kind::Grid, "64x128", "n_r x n_theta"},
                     {"out", Kind::Path, "", "disc CSV output"}});
    g.add("foliation", {{"wedge", Kind::Text, kModel2, "wedge file or inline text"},
                        {"t-grid", Kind::Text, "1;2", "reduced t vectors: ';' between, ',' within"},
                        {"grid", Kind::Grid, "32x128", "n_r x n_theta"},
                        {"edge-samples", Kind::Count, "16", "edge points per sheet"},
                        {"sheet-probes", Kind::Count, "64", "probe points per sheet"},
                        {"coverage-samples", Kind::Count, "16", "wedge points to invert"},
                        {"box", Kind::Positive, "0.1", "sample box half-width"}});
    g.add("holder", {{"disc", Kind::Path, "", "disc CSV (default: flat unit disc)"},
                     {"F", Kind::Text, "dim 2|builtin exp_perturbed 0.1", "test function file or inline text"},
                     {"A", Kind::Text, "zero", "structure: catalog spec or file"},
                     {"grid", Kind::Grid, "64x64", "grid of the default disc"},
                     {"p", Kind::Positive, "4", "Lebesgue exponent, > 2"},
                     {"pairs", Kind::Count, "200", "sampled point pairs"},
                     {"r", Kind::Positive, "0.5", "pair radius, < 1"}});
    g.add("lindelof", {{"F", Kind::Text, "dim 2|builtin power_i_perturbed 0.1", "test function"},
                       {"curve1", Kind::Text, kCurve1, "curve file or inline text"},
                       {"curve2", Kind::Text, kCurve2, "curve file or inline text"},
                       {"wedge", Kind::Text, kModel2, "wedge file or inline text"},
                       {"p", Kind::Positive, "4", "Lebesgue exponent, > 2"},
                       {"kappa", Kind::Positive, "0.5", "transversal disc radius factor"},
                       {"levels", Kind::Count, "12", "levels 1 - t = 2^-k"}});
    g.add("fatou", {{"wedge", Kind::Text, kModel2, "wedge file or inline text"},
                    {"F", Kind::Text, "dim 2|builtin power_i", "test function"},
                    {"edge-samples", Kind::Count, "10000", "random edge points"},
                    {"slice-samples", Kind::Integer, "20", "edge points on y_1 = 0"},
                    {"dirs", Kind::Count, "16", "approach directions"},
                    {"tolerance", Kind::Positive, "1e-3", "agreement tolerance"},
                    {"min-fraction", Kind::Number, "0.99", "required nontangential fraction"},
                    {"out", Kind::Path, "", "verdict JSON output"}});
    g.add("montel", {{"F", Kind::Text, "dim 2|builtin power_i_perturbed 0.1", "test function"},
                     {"wedge", Kind::Text, kModel2, "wedge file or inline text"},
                     {"scales", Kind::Count, "49", "geometric scales e^{-pi q/4}"},
                     {"probes", Kind::Count, "64", "probe points in the cone"},
                     {"p", Kind::Positive, "4", "Lebesgue exponent, > 2"}});
    g.add("cg", {{"input", Kind::Path, "", "grid function CSV (required)"},
                 {"points", Kind::Path, "", "point CSV; without it the transform is written on the grid"},
                 {"out", Kind::Path, "", "CSV output"}});
    g.add("schwarz", {{"phi", Kind::Path, "", "boundary CSV (required)"},
                      {"points", Kind::Path, "", "point CSV; without it values are written on the grid"},
                      {"grid", Kind::Grid, "32x64", "output grid"},
                      {"out", Kind::Path, "", "CSV output"}});
    g.add("acceptance", {{"criteria", Kind::Text, "all", "comma separated ids in 1..9, or all"},
                         {"compare-threads", Kind::Count, "4", "workers for the determinism rerun"},
                         {"determinism", Kind::Integer, "1", "run criterion 10"},
                         {"out", Kind::Path, "", "summary JSON output"}});
    return g;
  }();
  return r;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = s.find(sep, start);
    out.emplace_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::optional<double> to_double(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<long long> to_integer(std::string_view s) {
  s = trim(s);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

[[noreturn]] void config_error(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::ConfigError, "field '" + field + "': " + what);
}

std::optional<std::pair<int, int>> to_grid(std::string_view s) {
  const auto parts = split(s, 'x');
  if (parts.size() != 2) return std::nullopt;
  const auto a = to_integer(parts[0]), b = to_integer(parts[1]);
  if (!a || !b || *a > 1 << 20 || *b > 1 << 20) return std::nullopt;
  return std::pair<int, int>(static_cast<int>(*a), static_cast<int>(*b));
}

void check_field(const FieldSpec& f, const std::string& v) {
  switch (f.kind) {
  case Kind::Text:
  case Kind::Path: return;
  case Kind::Number:
    if (!to_double(v)) config_error(f.name, "expected a number, got '" + v + "'");
    return;
  case Kind::Positive: {
    const auto x = to_double(v);
    if (!x || *x <= 0.0) config_error(f.name, "expected a positive number, got '" + v + "'");
    return;
  }
  case Kind::Integer:
    if (!to_integer(v)) config_error(f.name, "expected an integer, got '" + v + "'");
    return;
  case Kind::Count: {
    const auto x = to_integer(v);
    if (!x || *x < 1 || *x > 100000000) config_error(f.name, "expected a positive count, got '" + v + "'");
    return;
  }
  case Kind::Grid: {
    const auto g = to_grid(v);
    if (!g) config_error(f.name, "expected NxM, got '" + v + "'");
    if (g->first < DiscGrid::kMinRadial || g->second < DiscGrid::kMinAngular)
      config_error(f.name, "grid " + v + " is below the minimum " + std::to_string(DiscGrid::kMinRadial) + "x" +
                               std::to_string(DiscGrid::kMinAngular));
    return;
  }
  }
}

// A value names a file when one exists at that path; otherwise it is inline
// text with '|' standing for a line break.
std::string load_text(const std::string& value) {
  std::error_code ec;
  if (!value.empty() && std::filesystem::is_regular_file(value, ec)) return io::read_file(value);
  std::string s = value;
  std::replace(s.begin(), s.end(), '|', '\n');
  return s;
}

RVector parse_vector(const RunConfig& c, const std::string& field, const std::string& text, int size,
                     double fallback) {
  if (trim(text).empty()) return RVector::Constant(size, fallback);
  const auto parts = split(text, ',');
  if (static_cast<int>(parts.size()) != size)
    config_error(field, "expected " + std::to_string(size) + " values, got " + std::to_string(parts.size()));
  RVector v(size);
  for (int i = 0; i < size; ++i) {
    const auto x = to_double(parts[static_cast<std::size_t>(i)]);
    if (!x) config_error(field, "'" + parts[static_cast<std::size_t>(i)] + "' is not a number");
    v(i) = *x;
  }
  (void)c;
  return v;
}

json cjson(cplx z) { return json::array({z.real(), z.imag()}); }

json cvec_json(const CVector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(cjson(v(i)));
  return a;
}

// Numeric outputs carry the sampling seed as a leading comment line.
void write_csv(const std::string& path, const std::string& body, std::uint64_t seed) {
  io::write_file(path, "# rng-seed " + std::to_string(seed) + "\n" + body);
}

void write_json(const std::string& path, const json& j) { io::write_file(path, j.dump(1) + "\n"); }

double require_p(const RunConfig& c) {
  const double p = c.number("p");
  if (!(p > 2.0)) config_error("p", "the exponent must exceed 2");
  return p;
}

class Timer {
public:
  Timer(RunReport& r, std::string name) : r_(r), name_(std::move(name)), t0_(std::chrono::steady_clock::now()) {}
  ~Timer() { r_.timings[name_] += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count(); }

private:
  RunReport& r_;
  std::string name_;
  std::chrono::steady_clock::time_point t0_;
};

// ------------------------------------------------------------- scenarios

void run_solve_disc(const RunConfig& c, RunReport& rep) {
  const HolomorphicSeed seed = HolomorphicSeed::parse(c.text("seed"));
  const ComplexMatrixField a = io::load_structure(c.text("A"), seed.dimension());
  const auto [nr, nt] = c.grid("grid");
  SolveOptions o;
  o.tol = c.number("tol");
  o.max_iter = c.integer("max-iter");
  const std::string& st = c.text("stencil");
  if (st == "spectral") o.stencil = diskops::Stencil::Spectral;
  else if (st == "fd") o.stencil = diskops::Stencil::FiniteDifference;
  else config_error("stencil", "expected spectral or fd, got '" + st + "'");
  DiscMap z;
  {
    Timer t(rep, "solve");
    z = solve_disc(a, seed, DiscGrid::create(nr, nt), o);
  }
  const SolveInfo& info = z.info();
  rep.results = {{"dimension", z.dimension()},        {"iterations", info.iterations},
                 {"residual", info.residual},          {"contraction", info.contraction},
                 {"solved", info.solved},              {"steps", info.steps}};
  rep.checks.emplace_back("solved", info.solved);
  if (c.has("out")) write_csv(c.text("out"), io::write_disc_csv(z), rep.seed);
}

void run_family(const RunConfig& c, RunReport& rep) {
  const WedgeDomain w = io::parse_wedge(load_text(c.text("wedge")));
  const int n = w.dimension();
  const FamilyParams p = FamilyParams::reduced(parse_vector(c, "c", c.text("c"), n - 1, 0.0),
                                               parse_vector(c, "t", c.text("t"), n - 1, 1.0));
  const auto [nr, nt] = c.grid("grid");
  const GridPtr g = DiscGrid::create(nr, nt);
  const DiscFamily fam(w, BoundaryFunction::cutoff(nt), g);
  DiscMap z;
  {
    Timer t(rep, "disc");
    z = fam.disc(p);
  }
  rep.results = {{"flat", fam.flat()},
                 {"c", std::vector<double>(p.c.data(), p.c.data() + p.c.size())},
                 {"t", std::vector<double>(p.t.data(), p.t.data() + p.t.size())},
                 {"residual", holomorphy_residual(z, w.structure())}};
  if (fam.flat()) {
    // sign invariant: x_j vanishes on the upper arc and is negative inside
    double arc = 0.0, interior = -1e300;
    for (int k = 0; k < nt; ++k) {
      const CVector b = z.boundary(k);
      if (std::sin(g->angle(k)) > 0.0)
        for (int j = 0; j < n; ++j) arc = std::max(arc, std::abs(b(j).real()));
    }
    for (int jr = 0; jr < nr; ++jr)
      for (int k = 0; k < nt; ++k) interior = std::max(interior, z.at_node(jr, k).real().maxCoeff());
    rep.results["upper_arc_max_abs_x"] = arc;
    rep.results["interior_max_x"] = interior;
    rep.checks.emplace_back("upper_arc_on_edge", arc < 1e-10);
    rep.checks.emplace_back("interior_negative", interior < 0.0);
  } else {
    rep.results["iterations"] = z.info().iterations;
    rep.results["boundary_residual"] = z.info().boundary_residual;
    rep.results["interior_residual"] = z.info().residual;
    rep.checks.emplace_back("solved", z.info().solved);
  }
  if (c.has("out")) write_csv(c.text("out"), io::write_disc_csv(z), rep.seed);
}

void run_foliation(const RunConfig& c, RunReport& rep) {
  const WedgeDomain w = io::parse_wedge(load_text(c.text("wedge")));
  const int n = w.dimension();
  const auto [nr, nt] = c.grid("grid");
  FoliationOptions o;
  for (const std::string& item : split(c.text("t-grid"), ';'))
    o.t_values.push_back(parse_vector(c, "t-grid", item, n - 1, 1.0));
  o.edge_samples = c.integer("edge-samples");
  o.sheet_probes = c.integer("sheet-probes");
  o.coverage_samples = c.integer("coverage-samples");
  o.box = c.number("box");
  o.seed = rep.seed;
  const DiscFamily fam(w, BoundaryFunction::cutoff(nt), DiscGrid::create(nr, nt));
  FoliationReport r;
  {
    Timer t(rep, "foliation");
    r = foliation_check(fam, o);
  }
  rep.results = {{"edge_cover_defect", r.edge_cover_defect}, {"sheet_defect", r.sheet_defect},
                 {"sheet_separation", r.sheet_separation},   {"coverage_rate", r.coverage_rate},
                 {"coverage_residual", r.coverage_residual}, {"coverage_attempts", r.coverage_attempts}};
  rep.checks.emplace_back("edge_covered", r.edge_cover_defect < 1e-6);
  rep.checks.emplace_back("sheets_consistent", r.sheet_defect < 1e-6);
  rep.checks.emplace_back("sheets_disjoint", o.t_values.size() < 2 || r.sheet_separation > 0.0);
  rep.checks.emplace_back("coverage", r.coverage_rate >= 0.9 && r.coverage_residual < 1e-8);
}

void run_holder(const RunConfig& c, RunReport& rep) {
  const double p = require_p(c);
  const double r = c.number("r");
  if (r >= 1.0) config_error("r", "the pair radius must be below 1");
  const fatou::TestFunction f = io::parse_test_function(load_text(c.text("F")));
  DiscMap z;
  if (c.has("disc")) {
    z = io::parse_disc_csv(io::read_file(c.text("disc")));
  } else {
    const auto [nr, nt] = c.grid("grid");
    z = flat_family(FamilyParams::unit(f.f.dimension()), BoundaryFunction::cutoff(nt), DiscGrid::create(nr, nt));
  }
  if (z.dimension() != f.f.dimension())
    config_error("F", "dimension " + std::to_string(f.f.dimension()) + " does not match the disc (" +
                          std::to_string(z.dimension()) + ")");
  const ComplexMatrixField a = io::load_structure(c.text("A"), z.dimension());
  Timer t(rep, "holder");
  const fatou::Restriction res = fatou::restrict_to_disc(f, z, a);
  const auto pairs = fatou::holder_pairs(r, c.integer("pairs"), rep.seed);
  const fatou::HolderReport h = fatou::holder_bound_check(res.f, res.f_dbar, p, pairs, r);
  rep.results = {{"c_hat", h.c_hat},           {"exponent", h.exponent},
                 {"sup_norm", h.sup_norm},     {"lp_norm", h.lp_norm},
                 {"sup_f_dbar", res.sup_f_dbar}, {"dbar_bound", res.bound},
                 {"chain_rule_consistency", res.consistency}};
  rep.checks.emplace_back("finite", h.finite && std::isfinite(h.c_hat));
}

void run_lindelof(const RunConfig& c, RunReport& rep) {
  fatou::LindelofOptions o;
  o.p = require_p(c);
  o.kappa = c.number("kappa");
  o.levels = c.integer("levels");
  const fatou::TestFunction f = io::parse_test_function(load_text(c.text("F")));
  const fatou::Curve g1 = io::parse_curve(load_text(c.text("curve1")));
  const fatou::Curve g2 = io::parse_curve(load_text(c.text("curve2")));
  const WedgeDomain w = io::parse_wedge(load_text(c.text("wedge")));
  Timer t(rep, "lindelof");
  const fatou::LindelofReport r = fatou::chirka_lindelof_compare(f, g1, g2, w, o);
  rep.results = {{"one_minus_t", r.one_minus_t}, {"difference", r.difference}, {"zeta2", r.zeta2},
                 {"holder_bound", r.holder_bound}, {"miss", r.miss},          {"exponent", r.exponent},
                 {"required", r.required},       {"decays", r.decays},        {"bounded", r.bounded}};
  rep.checks.emplace_back("decays", r.decays);
  rep.checks.emplace_back("exponent", r.exponent >= r.required);
}

void run_fatou(const RunConfig& c, RunReport& rep) {
  const WedgeDomain w = io::parse_wedge(load_text(c.text("wedge")));
  const fatou::TestFunction f = io::parse_test_function(load_text(c.text("F")));
  if (f.f.dimension() != w.dimension()) config_error("F", "dimension does not match the wedge");
  const int slice = c.integer("slice-samples");
  if (slice < 0) config_error("slice-samples", "must not be negative");
  fatou::RayOptions o;
  o.directions = c.integer("dirs");
  o.tolerance = c.number("tolerance");
  o.seed = rep.seed;
  const bool keep = c.has("out");
  std::vector<CVector> pts;
  fatou::RayReport r;
  {
    Timer t(rep, "fatou");
    pts = fatou::edge_samples(w, c.integer("edge-samples"), slice, rep.seed);
    r = fatou::ray_family_limits(f, pts, w, o, keep);
  }
  std::array<int, 3> counts{};
  for (const auto& pv : r.points) ++counts[static_cast<std::size_t>(pv.verdict)];
  rep.results = {{"points", r.points.size()},
                 {"nontangential", counts[0]},
                 {"directional", counts[1]},
                 {"none", counts[2]},
                 {"nontangential_fraction", r.nontangential_fraction},
                 {"exceptional_points", r.exceptional_points},
                 {"exceptional_none", r.exceptional_none},
                 {"max_oracle_error", r.max_oracle_error},
                 {"monotone", r.monotone},
                 {"extra_rays_agree", r.extra_rays_agree}};
  rep.checks.emplace_back("nontangential_fraction", r.nontangential_fraction >= c.number("min-fraction"));
  rep.checks.emplace_back("exceptional_none", r.exceptional_none == r.exceptional_points);
  rep.checks.emplace_back("oracle", r.max_oracle_error <= o.tolerance);
  rep.checks.emplace_back("monotone", r.monotone);
  if (keep) {
    json pts_json = json::array();
    for (const auto& pv : r.points) {
      json dirs = json::array();
      for (const auto& d : pv.per_direction)
        dirs.push_back({{"direction", cvec_json(d.direction)},
                        {"has_limit", d.estimate.has_limit},
                        {"limit", cjson(d.estimate.limit)},
                        {"error_bar", d.estimate.error_bar}});
      json rec = {{"coords", cvec_json(pv.point)},
                  {"verdict", std::string(fatou::to_string(pv.verdict))},
                  {"limit", pv.verdict == fatou::Verdict::None ? json(nullptr) : cjson(pv.limit)},
                  {"error_bar", pv.error_bar},
                  {"per_direction", std::move(dirs)}};
      pts_json.push_back(std::move(rec));
    }
    write_json(c.text("out"), {{"rng-seed", rep.seed}, {"function", f.description}, {"points", std::move(pts_json)}});
  }
}

void run_montel(const RunConfig& c, RunReport& rep) {
  const fatou::TestFunction f = io::parse_test_function(load_text(c.text("F")));
  const WedgeDomain w = io::parse_wedge(load_text(c.text("wedge")));
  const int n = w.dimension();
  if (f.f.dimension() != n) config_error("F", "dimension does not match the wedge");
  const Cone k0 = build_cone(CVector::Zero(n), CVector::Constant(n, cplx(-1.0 / std::sqrt(double(n)), 0.0)),
                             kPi / 6, w);
  fatou::MontelOptions o;
  o.scales = fatou::MontelOptions::geometric_scales(c.integer("scales"));
  o.probes = c.integer("probes");
  o.p = require_p(c);
  o.seed = rep.seed;
  Timer t(rep, "montel");
  const fatou::MontelReport r = fatou::scaling_montel(f, w.structure(), k0, o);
  rep.results = {{"scales", r.scales},
                 {"residual_chain", r.residual_chain},
                 {"residual_direct", r.residual_direct},
                 {"consistency", r.consistency},
                 {"slope", r.slope},
                 {"fit_members", r.fit_members},
                 {"equicontinuity", r.equicontinuity},
                 {"subsequence", r.subsequence},
                 {"limit_residual", r.limit_residual},
                 {"limit_floor", r.limit_floor},
                 {"status", r.status}};
  rep.checks.emplace_back("consistent", r.consistent);
  rep.checks.emplace_back("linear", r.linear);
  rep.checks.emplace_back("converged", r.converged);
  rep.checks.emplace_back("limit_at_floor", r.limit_at_floor);
}

json values_json(std::span<const cplx> v) {
  double m = 0.0;
  for (cplx x : v) m = std::max(m, std::abs(x));
  return {{"count", v.size()}, {"max_abs", m}};
}

json values_json(const CMatrix& v) {
  return values_json(std::span<const cplx>(v.data(), static_cast<std::size_t>(v.size())));
}

void run_cg(const RunConfig& c, RunReport& rep) {
  if (!c.has("input")) config_error("input", "required");
  const GridFunction f = io::parse_grid_csv(io::read_file(c.text("input")));
  Timer t(rep, "cg");
  std::string out;
  bool finite = true;
  if (c.has("points")) {
    const auto pts = io::parse_points_csv(io::read_file(c.text("points")));
    const auto v = diskops::cauchy_green(f, pts);
    for (cplx x : v) finite = finite && std::isfinite(x.real()) && std::isfinite(x.imag());
    rep.results = values_json(v);
    out = io::write_values_csv(pts, v);
  } else {
    const GridFunction tf = diskops::cauchy_green(f);
    finite = tf.values().allFinite();
    rep.results = values_json(tf.values());
    out = io::write_grid_csv(tf);
  }
  rep.checks.emplace_back("finite", finite);
  if (c.has("out")) write_csv(c.text("out"), out, rep.seed);
}

void run_schwarz(const RunConfig& c, RunReport& rep) {
  if (!c.has("phi")) config_error("phi", "required");
  const BoundaryFunction phi = io::parse_boundary_csv(io::read_file(c.text("phi")));
  Timer t(rep, "schwarz");
  std::string out;
  if (c.has("points")) {
    const auto pts = io::parse_points_csv(io::read_file(c.text("points")));
    const auto v = diskops::schwarz(phi, pts);
    rep.results = values_json(v);
    out = io::write_values_csv(pts, v);
  } else {
    const auto [nr, nt] = c.grid("grid");
    const GridFunction s = diskops::SchwarzIntegral(phi).on_grid(DiscGrid::create(nr, nt));
    rep.results = values_json(s.values());
    out = io::write_grid_csv(s);
  }
  rep.checks.emplace_back("finite", std::isfinite(rep.results["max_abs"].get<double>()));
  if (c.has("out")) write_csv(c.text("out"), out, rep.seed);
}

void run_acceptance(const RunConfig& c, RunReport& rep) {
  acceptance::Options o;
  o.seed = rep.seed;
  o.compare_threads = c.integer("compare-threads");
  o.determinism = c.integer("determinism") != 0;
  if (c.text("criteria") != "all") {
    for (const std::string& s : split(c.text("criteria"), ',')) {
      const auto id = to_integer(s);
      if (!id || *id < 1 || *id > 9) config_error("criteria", "'" + s + "' is not a criterion in 1..9");
      o.only.push_back(static_cast<int>(*id));
    }
  }
  const acceptance::SuiteReport s = acceptance::run_suite(o);
  rep.results = s.summary;
  for (const auto& r : s.results) {
    rep.checks.emplace_back("criterion " + std::to_string(r.id), r.pass);
    rep.timings["criterion " + std::to_string(r.id)] = r.seconds;
  }
  if (c.has("out")) write_json(c.text("out"), s.summary);
}

bool usage_error(ErrorCode code) {
  return code == ErrorCode::ConfigError || code == ErrorCode::InputParseError || code == ErrorCode::InvalidArgument;
}

} // namespace

const std::vector<std::string>& commands() { return registry().names; }

const std::vector<FieldSpec>& fields(std::string_view command) {
  const auto& f = registry().fields;
  const auto it = f.find(command);
  if (it == f.end()) config_error("command", "unknown command '" + std::string(command) + "'");
  return it->second;
}

RunConfig RunConfig::parse(std::string_view text) {
  RunConfig c;
  int line_no = 0;
  for (const std::string& raw : split(text, '\n')) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", line_no, 1);
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ParseError("empty key", line_no, 1);
    if (key == "command") {
      if (!c.command.empty()) throw ParseError("duplicate command", line_no, 1);
      c.command = value;
    } else if (!c.values.emplace(key, value).second) {
      throw ParseError("duplicate key '" + key + "'", line_no, 1);
    }
  }
  return c;
}

std::string RunConfig::echo() const {
  std::string s = "command = " + command + "\n";
  for (const auto& [k, v] : values) s += k + " = " + v + "\n";
  return s;
}

RunConfig RunConfig::validated() const {
  if (command.empty()) config_error("command", "missing");
  const auto& spec = fields(command);
  RunConfig out{command, {}};
  for (const auto& [k, v] : values) {
    const auto it = std::find_if(spec.begin(), spec.end(), [&](const FieldSpec& f) { return f.name == k; });
    if (it == spec.end()) config_error(k, "not a field of '" + command + "'");
    if (v.find('\n') != std::string::npos || v != trim(v)) config_error(k, "value must be a single trimmed line");
  }
  for (const FieldSpec& f : spec) {
    const auto it = values.find(f.name);
    const std::string v = it != values.end() ? it->second : f.fallback;
    if (v.empty()) continue;
    check_field(f, v);
    out.values[f.name] = v;
  }
  return out;
}

bool RunConfig::has(const std::string& key) const {
  const auto it = values.find(key);
  return it != values.end() && !it->second.empty();
}

const std::string& RunConfig::text(const std::string& key) const {
  static const std::string empty;
  const auto it = values.find(key);
  return it == values.end() ? empty : it->second;
}

double RunConfig::number(const std::string& key) const {
  const auto v = to_double(text(key));
  if (!v) config_error(key, "expected a number");
  return *v;
}

int RunConfig::integer(const std::string& key) const {
  const auto v = to_integer(text(key));
  if (!v || *v < INT32_MIN || *v > INT32_MAX) config_error(key, "expected an integer");
  return static_cast<int>(*v);
}

std::pair<int, int> RunConfig::grid(const std::string& key) const {
  const auto g = to_grid(text(key));
  if (!g) config_error(key, "expected NxM");
  return *g;
}

std::uint64_t RunConfig::seed() const {
  const auto v = to_integer(has("rng-seed") ? text("rng-seed") : "1");
  if (!v || *v < 0) config_error("rng-seed", "expected a non-negative integer");
  return static_cast<std::uint64_t>(*v);
}

bool RunReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.second; });
}

json RunReport::to_json(bool with_timings) const {
  json checks_json = json::array();
  for (const auto& [name, ok] : checks) checks_json.push_back({{"name", name}, {"pass", ok}});
  json j = {{"command", config.command}, {"config", config.values}, {"rng-seed", seed},
            {"results", results},        {"checks", checks_json},   {"pass", passed()}};
  if (with_timings) j["timings"] = timings;
  return j;
}

RunReport run(const RunConfig& config) {
  RunReport rep;
  rep.config = config.validated();
  rep.seed = rep.config.seed();
  const RunConfig& c = rep.config;
  static const std::map<std::string, std::function<void(const RunConfig&, RunReport&)>, std::less<>> dispatch = {
      {"solve-disc", run_solve_disc}, {"family", run_family}, {"foliation", run_foliation},
      {"holder", run_holder},         {"lindelof", run_lindelof}, {"fatou", run_fatou},
      {"montel", run_montel},         {"cg", run_cg},         {"schwarz", run_schwarz},
      {"acceptance", run_acceptance}};
  const auto t0 = std::chrono::steady_clock::now();
  try {
    dispatch.at(c.command)(c, rep);
  } catch (const Error& e) {
    if (usage_error(e.code())) throw;
    // numeric failure: keep the report and fail it
    rep.results["error"] = e.what();
    rep.checks.emplace_back("completed", false);
  }
  rep.timings["total"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (c.has("report")) write_json(c.text("report"), rep.to_json(true));
  return rep;
}

int exit_code(const RunReport& report) { return report.passed() ? 0 : 1; }

} // namespace holodisc
