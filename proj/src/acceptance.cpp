#include "holodisc/acceptance.hpp"
#include "holodisc/discsolve.hpp"
#include "holodisc/error.hpp"
#include "holodisc/fatou.hpp"
#include "holodisc/parallel.hpp"
#include "holodisc/random.hpp"
#include "holodisc/wedgefam.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>

namespace holodisc::acceptance {

using nlohmann::json;
using diskops::Stencil;

namespace {

// --- 1. Cauchy-Green transform inverts dbar

double cg_error(int n, const std::function<cplx(cplx)>& f) {
  const GridPtr g = DiscGrid::create(n, n);
  const GridFunction u = GridFunction::sample(g, f);
  const GridFunction d = diskops::dbar(diskops::cauchy_green(u), Stencil::FiniteDifference);
  double err = 0.0;
  for (int j = 0; j < n; ++j) {
    const double r = g->radius(j);
    if (r < 0.1 || r > 0.9) continue;
    for (int k = 0; k < n; ++k) err = std::max(err, std::abs(d(j, k) - u(j, k)));
  }
  return err;
}

bool criterion_cauchy_green(json& d) {
  const auto one = [](cplx) { return cplx(1.0); };
  const auto quad = [](cplx w) { return std::conj(w) * std::conj(w) + 1.0; };
  const double e1 = cg_error(256, one);
  const double e128 = cg_error(128, quad), e256 = cg_error(256, quad);
  const double order = std::log2(e128 / e256);
  d = {{"error_one_256", e1}, {"error_quadratic_128", e128}, {"error_quadratic_256", e256}, {"observed_order", order}};
  return e1 < 1e-3 && e256 < 1e-3 && order >= 1.5;
}

// --- 2. constant structure, closed form

bool criterion_closed_form(json& d) {
  const GridPtr g = DiscGrid::create(64, 128);
  const auto a = ComplexMatrixField::constant(CMatrix::Constant(1, 1, 0.3));
  const HolomorphicSeed seed = HolomorphicSeed::parse("zeta");
  const DiscMap z = solve_disc(a, seed, g);
  double err = 0.0;
  for (int j = 0; j < g->n_r(); ++j)
    for (int k = 0; k < g->n_theta(); ++k) {
      const cplx s = g->node(j, k);
      err = std::max(err, std::abs(z.at_node(j, k)(0) - (s + 0.3 * std::conj(s))));
    }
  // iterate to round-off so that a step ratio is observed
  SolveOptions deep;
  deep.tol = 1e-14;
  const DiscMap zz = solve_disc(a, seed, g, deep);
  d = {{"error", err},
       {"iterations", z.info().iterations},
       {"residual", z.info().residual},
       {"ratio", zz.info().contraction},
       {"ratio_steps", zz.info().steps}};
  return z.info().solved && err < 1e-8 && z.info().iterations <= 30 && zz.info().steps.size() >= 2 &&
         zz.info().contraction < 0.9;
}

// --- 3. variable structure A(z) = 0.1 z

bool criterion_variable(json& d) {
  const GridPtr g = DiscGrid::create(128, 256);
  const auto a = ComplexMatrixField::linear({CMatrix::Constant(1, 1, 0.1)});
  const DiscMap z = solve_disc(a, HolomorphicSeed::parse("zeta"), g);
  const double res = holomorphy_residual(z, a, Stencil::Spectral);
  d = {{"residual", res},
       {"residual_finite_difference", holomorphy_residual(z, a, Stencil::FiniteDifference)},
       {"iterations", z.info().iterations},
       {"contraction", z.info().contraction}};
  return z.info().solved && res < 1e-6;
}

// --- 4. flat family: boundary on the edge, interior in the wedge, inversion

bool criterion_flat(json& d, std::uint64_t seed) {
  const GridPtr g = DiscGrid::create(64, 128);
  const BoundaryFunction phi = BoundaryFunction::cutoff(128);
  const DiscFamily fam(WedgeDomain::model(2), phi, g);
  Rng rng(seed);
  double edge = 0.0, interior = -1.0, worst = 0.0;
  int distinct = 1;
  for (int i = 0; i < 100; ++i) {
    RVector c(1), t(1);
    c(0) = rng.uniform(-1.0, 1.0);
    t(0) = rng.uniform(0.5, 2.0);
    const cplx zeta = std::polar(0.9 * std::sqrt(rng.uniform()), 2.0 * kPi * rng.uniform());
    const FamilyParams p = FamilyParams::reduced(c, t);
    if (i < 10) {
      const DiscMap z = fam.disc(p);
      for (int k = 0; k <= g->n_theta() / 2; ++k) edge = std::max(edge, z.boundary(k).real().cwiseAbs().maxCoeff());
      for (int j = 0; j < g->n_r(); ++j)
        for (int k = 0; k < g->n_theta(); ++k) interior = std::max(interior, z.at_node(j, k).real().maxCoeff());
    }
    const Inversion inv = invert_evaluation(fam, fam.evaluate(p, zeta));
    distinct = std::max(distinct, inv.distinct_solutions);
    worst = std::max({worst, (inv.params.c - p.c).cwiseAbs().maxCoeff(), (inv.params.t - p.t).cwiseAbs().maxCoeff(),
                      std::abs(inv.zeta - zeta)});
  }
  d = {{"edge_max_abs_x", edge}, {"interior_max_x", interior}, {"roundtrip_error", worst}, {"distinct_roots", distinct}};
  return edge < 1e-10 && interior < 0.0 && worst < 1e-8;
}

// --- 5. glued family near the flat one

bool criterion_glued(json& d, std::uint64_t seed) {
  const GridPtr g = DiscGrid::create(128, 256);
  const BoundaryFunction phi = BoundaryFunction::cutoff(256);
  Rng rng(seed + 5);
  std::vector<FamilyParams> params;
  for (int i = 0; i < 3; ++i) {
    RVector c(1), t(1);
    c(0) = rng.uniform(-0.5, 0.5);
    t(0) = rng.uniform(0.75, 1.5);
    params.push_back(FamilyParams::reduced(c, t));
  }
  json per = json::array();
  double bres = 0.0, ires = 0.0;
  std::vector<double> constants;
  for (double eps : {0.01, 0.05}) {
    const std::vector<RealPolynomial> h(2, RealPolynomial::quadratic(2, eps));
    double dist = 0.0;
    for (const auto& p : params) {
      const DiscMap zg = glued_family(h, ComplexMatrixField::zero(2), p, phi, g);
      const DiscMap zf = flat_family(p, phi, g);
      bres = std::max(bres, zg.info().boundary_residual);
      ires = std::max(ires, zg.info().residual);
      for (int j = 0; j < g->n_r(); ++j)
        for (int k = 0; k < g->n_theta(); ++k) dist = std::max(dist, (zg.at_node(j, k) - zf.at_node(j, k)).norm());
    }
    constants.push_back(dist / eps);
    per.push_back({{"eps", eps}, {"distance", dist}, {"C", dist / eps}});
  }
  const double spread = std::max(constants[0], constants[1]) / std::min(constants[0], constants[1]);
  d = {{"boundary_residual", bres}, {"interior_residual", ires}, {"per_eps", per}, {"C_spread", spread}};
  return bres < 1e-6 && ires < 1e-8 && spread <= 2.0;
}

// --- 6. Hölder estimate on restrictions to family discs

bool criterion_holder(json& d, std::uint64_t seed) {
  const WedgeDomain w = WedgeDomain::model(2);
  const auto a = ComplexMatrixField::zero(2);
  const fatou::TestFunction f = fatou::TestFunction::exp_perturbed(2, 0.1);
  const auto pairs = fatou::holder_pairs(0.5, 200, seed);
  Rng rng(seed + 6);
  double spread = 0.0, quotient = 0.0, consistency = 0.0, excess = 0.0, c_max = 0.0;
  bool finite = true;
  for (int i = 0; i < 20; ++i) {
    RVector c(1), t(1);
    c(0) = rng.uniform(-1.0, 1.0);
    t(0) = rng.uniform(0.5, 2.0);
    const FamilyParams p = FamilyParams::reduced(c, t);
    const auto make = [&](const GridPtr& g) {
      const DiscMap z = flat_family(p, BoundaryFunction::cutoff(g->n_theta()), g);
      const fatou::Restriction r = fatou::restrict_to_disc(f, z, a, &w);
      consistency = std::max(consistency, r.consistency);
      excess = std::max(excess, r.sup_f_dbar - r.bound);
      return r;
    };
    const fatou::RefinementReport ref = fatou::holder_refinement(make, {64, 128, 256}, 4.0, pairs, 0.5);
    for (double ch : ref.c_hat) {
      finite = finite && std::isfinite(ch);
      c_max = std::max(c_max, ch);
    }
    spread = std::max(spread, ref.spread);
    const fatou::Restriction r64 = make(DiscGrid::create(64, 64));
    const fatou::QuotientReport q = fatou::holder_quotient_check(r64.f, r64.f_dbar, 4.0, pairs, 0.5);
    quotient = std::max(quotient, q.ratio);
  }
  d = {{"c_hat_max", c_max},
       {"refinement_spread", spread},
       {"quotient_ratio", quotient},
       {"chain_rule_consistency", consistency},
       {"bound_excess", excess}};
  return finite && spread <= 2.0 && quotient <= 2.0 && consistency < 1e-6 && excess <= 1e-10;
}

// --- 7. Chirka-Lindelöf comparison

bool criterion_lindelof(json& d) {
  const fatou::TestFunction f = fatou::TestFunction::power_i_perturbed(2, 0.1);
  const fatou::Curve g1{[](double t) { return CVector(CVector::Constant(2, cplx(-(1.0 - t), 0.0))); }, "-(1-t)(1,1)"};
  const fatou::Curve g2{[](double t) {
                          const double s = 1.0 - t;
                          CVector v(2);
                          v << -s + s * s * cplx(0.5, 0.3), -s + s * s * cplx(-0.2, 0.4);
                          return v;
                        },
                        "gamma1 + (1-t)^2 w"};
  const fatou::LindelofReport r = fatou::chirka_lindelof_compare(f, g1, g2, WedgeDomain::model(2));
  d = {{"exponent", r.exponent}, {"required", r.required}, {"difference", r.difference},
       {"decays", r.decays},     {"bounded", r.bounded}};
  return r.pass && r.exponent >= 0.4;
}

// --- 8. scaling sequence and Montel limit

bool criterion_montel(json& d, std::uint64_t seed) {
  const fatou::TestFunction f = fatou::TestFunction::power_i_perturbed(2, 0.1);
  const double s = 1.0 / std::sqrt(2.0);
  CVector axis(2);
  axis << -s, -s;
  const Cone k0 = build_cone(CVector::Zero(2), axis, kPi / 6, WedgeDomain::model(2));
  fatou::MontelOptions o;
  o.scales = fatou::MontelOptions::geometric_scales();
  o.seed = seed;
  const fatou::MontelReport r = fatou::scaling_montel(f, ComplexMatrixField::zero(2), k0, o);
  d = {{"slope", r.slope},
       {"fit_members", r.fit_members},
       {"consistency", r.consistency},
       {"equicontinuity", r.equicontinuity},
       {"subsequence", r.subsequence},
       {"limit_residual", r.limit_residual},
       {"limit_floor", r.limit_floor},
       {"status", r.status}};
  return r.linear && r.consistent && r.converged && r.limit_at_floor && std::isfinite(r.equicontinuity);
}

// --- 9. Fatou statistic

bool criterion_fatou(json& d, std::uint64_t seed) {
  const WedgeDomain w = WedgeDomain::model(2);
  const fatou::TestFunction f = fatou::TestFunction::power_i(2);
  const auto pts = fatou::edge_samples(w, 10000, 20, seed);
  fatou::RayOptions o;
  o.seed = seed;
  const fatou::RayReport r = fatou::ray_family_limits(f, pts, w, o);
  d = {{"nontangential_fraction", r.nontangential_fraction},
       {"exceptional_points", r.exceptional_points},
       {"exceptional_none", r.exceptional_none},
       {"max_oracle_error", r.max_oracle_error},
       {"monotone", r.monotone},
       {"extra_rays_agree", r.extra_rays_agree}};
  return r.nontangential_fraction >= 0.99 && r.exceptional_points > 0 && r.exceptional_none == r.exceptional_points &&
         r.max_oracle_error <= 1e-3 && r.monotone && r.extra_rays_agree;
}

struct Entry {
  const char* name;
  double budget;
};

constexpr Entry kEntries[] = {
    {"Cauchy-Green inversion", 120.0}, {"closed-form disc", 10.0},      {"variable-structure disc", 60.0},
    {"flat family", 30.0},             {"glued family", 120.0},         {"Hölder estimate", 120.0},
    {"Chirka-Lindelöf", 60.0},         {"scaling and Montel limit", 60.0}, {"Fatou statistic", 300.0},
    {"determinism", 0.0},
};

} // namespace

CriterionResult run_criterion(int id, std::uint64_t seed) {
  if (id < 1 || id > 9) throw Error(ErrorCode::InvalidArgument, "criteria 1..9 run individually");
  CriterionResult r;
  r.id = id;
  r.name = kEntries[id - 1].name;
  r.budget = kEntries[id - 1].budget;
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = false;
  try {
    switch (id) {
    case 1: ok = criterion_cauchy_green(r.details); break;
    case 2: ok = criterion_closed_form(r.details); break;
    case 3: ok = criterion_variable(r.details); break;
    case 4: ok = criterion_flat(r.details, seed); break;
    case 5: ok = criterion_glued(r.details, seed); break;
    case 6: ok = criterion_holder(r.details, seed); break;
    case 7: ok = criterion_lindelof(r.details); break;
    case 8: ok = criterion_montel(r.details, seed); break;
    case 9: ok = criterion_fatou(r.details, seed); break;
    }
  } catch (const Error& e) {
    r.details = {{"error", e.what()}};
    ok = false;
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.pass = ok && r.seconds <= r.budget;
  if (ok && !r.pass) r.details["over_budget"] = true;
  return r;
}

json summary(const std::vector<CriterionResult>& results, std::uint64_t seed) {
  json s = {{"seed", seed}, {"criteria", json::array()}};
  bool all = true;
  for (const auto& r : results) {
    s["criteria"].push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"details", r.details}});
    all = all && r.pass;
  }
  s["pass"] = all;
  return s;
}

SuiteReport run_suite(const Options& opts) {
  std::vector<int> ids = opts.only;
  if (ids.empty()) ids = {1, 2, 3, 4, 5, 6, 7, 8, 9};
  const auto battery = [&](int threads) {
    const int saved = thread_count();
    set_thread_count(threads);
    std::vector<CriterionResult> out;
    try {
      for (int id : ids) out.push_back(run_criterion(id, opts.seed));
    } catch (...) {
      set_thread_count(saved);
      throw;
    }
    set_thread_count(saved);
    return out;
  };
  SuiteReport rep;
  const int many = std::max(2, opts.compare_threads);
  rep.results = battery(many);
  if (opts.determinism) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<CriterionResult> single = battery(1);
    const std::string a = summary(rep.results, opts.seed).dump(), b = summary(single, opts.seed).dump();
    CriterionResult r;
    r.id = 10;
    r.name = kEntries[9].name;
    r.pass = a == b;
    r.details = {{"threads", {1, many}}, {"identical", a == b}};
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.budget = r.seconds;
    rep.results.push_back(r);
  }
  rep.summary = summary(rep.results, opts.seed);
  rep.pass = rep.summary["pass"].get<bool>();
  return rep;
}

std::string format_line(const CriterionResult& r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, " (%.1f s)", r.seconds);
  return "criterion " + std::to_string(r.id) + " [" + r.name + "] " + (r.pass ? "PASS" : "FAIL") + buf;
}

} // namespace holodisc::acceptance
