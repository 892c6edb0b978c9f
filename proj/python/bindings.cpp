// Python module _holodisc: thin wrappers over the C++ library. Arrays cross
// the boundary as complex128 numpy arrays of shape (n_r, n_theta).

#include "holodisc/diskops.hpp"
#include "holodisc/discsolve.hpp"
#include "holodisc/error.hpp"
#include "holodisc/fatou.hpp"
#include "holodisc/io.hpp"
#include "holodisc/run.hpp"
#include "holodisc/wedgefam.hpp"

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace holodisc;

namespace {

using CArray = py::array_t<cplx, py::array::c_style | py::array::forcecast>;

CArray to_array(const CMatrix& m) {
  CArray a({m.rows(), m.cols()});
  auto v = a.mutable_unchecked<2>();
  for (Eigen::Index j = 0; j < m.rows(); ++j)
    for (Eigen::Index k = 0; k < m.cols(); ++k) v(j, k) = m(j, k);
  return a;
}

GridFunction from_array(const CArray& a) {
  if (a.ndim() != 2) throw Error(ErrorCode::InvalidArgument, "expected a 2-d array (n_r, n_theta)");
  const auto v = a.unchecked<2>();
  const GridPtr g = DiscGrid::create(static_cast<int>(v.shape(0)), static_cast<int>(v.shape(1)));
  CMatrix m(v.shape(0), v.shape(1));
  for (py::ssize_t j = 0; j < v.shape(0); ++j)
    for (py::ssize_t k = 0; k < v.shape(1); ++k) m(j, k) = v(j, k);
  return GridFunction(g, m);
}

py::dict disc_dict(const DiscMap& z) {
  py::list comps;
  for (const auto& c : z.components()) comps.append(to_array(c.values()));
  const GridPtr& g = z.grid();
  CMatrix nodes(g->n_r(), g->n_theta());
  for (int j = 0; j < g->n_r(); ++j)
    for (int k = 0; k < g->n_theta(); ++k) nodes(j, k) = g->node(j, k);
  py::dict d;
  d["components"] = comps;
  d["nodes"] = to_array(nodes);
  d["iterations"] = z.info().iterations;
  d["residual"] = z.info().residual;
  d["contraction"] = z.info().contraction;
  d["solved"] = z.info().solved;
  return d;
}

RVector to_rvector(const std::vector<double>& v) {
  return Eigen::Map<const RVector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

} // namespace

PYBIND11_MODULE(_holodisc, m) {
  m.doc() = "Pseudoholomorphic discs, wedge families and boundary limits";

  py::register_exception<Error>(m, "HolodiscError");

  m.def(
      "solve_disc",
      [](const std::string& structure, const std::string& seed, std::pair<int, int> grid, double tol, int max_iter) {
        const HolomorphicSeed h = HolomorphicSeed::parse(seed);
        SolveOptions o;
        o.tol = tol;
        o.max_iter = max_iter;
        py::gil_scoped_release release;
        const DiscMap z = solve_disc(io::structure_from_catalog(structure, h.dimension()), h,
                                     DiscGrid::create(grid.first, grid.second), o);
        py::gil_scoped_acquire acquire;
        return disc_dict(z);
      },
      py::arg("structure") = "const 0.3", py::arg("seed") = "zeta", py::arg("grid") = std::pair<int, int>(64, 128),
      py::arg("tol") = 1e-8, py::arg("max_iter") = 50,
      "Solves z_zetabar = A(z) conj(z)_zetabar for a catalog structure and seed.");

  m.def(
      "grid_nodes",
      [](int n_r, int n_theta) {
        const GridPtr g = DiscGrid::create(n_r, n_theta);
        CMatrix nodes(n_r, n_theta);
        for (int j = 0; j < n_r; ++j)
          for (int k = 0; k < n_theta; ++k) nodes(j, k) = g->node(j, k);
        return to_array(nodes);
      },
      py::arg("n_r"), py::arg("n_theta"));

  m.def(
      "cauchy_green",
      [](const CArray& values, std::optional<std::vector<cplx>> points) -> py::object {
        const GridFunction f = from_array(values);
        if (points) return py::cast(diskops::cauchy_green(f, *points));
        return to_array(diskops::cauchy_green(f).values());
      },
      py::arg("values"), py::arg("points") = py::none(),
      "Cauchy-Green transform of samples on the polar grid, on the grid or at points.");

  m.def(
      "dbar",
      [](const CArray& values, bool spectral) {
        return to_array(
            diskops::dbar(from_array(values), spectral ? diskops::Stencil::Spectral : diskops::Stencil::FiniteDifference)
                .values());
      },
      py::arg("values"), py::arg("spectral") = true);

  m.def(
      "schwarz",
      [](const std::vector<double>& phi, const std::vector<cplx>& points) {
        BoundaryFunction b;
        b.samples = to_rvector(phi).cast<cplx>();
        return diskops::schwarz(b, points);
      },
      py::arg("phi"), py::arg("points"), "Schwarz integral of real samples at equispaced angles.");

  m.def(
      "flat_family",
      [](const std::vector<double>& c, const std::vector<double>& t, std::pair<int, int> grid) {
        const FamilyParams p = FamilyParams::reduced(to_rvector(c), to_rvector(t));
        return disc_dict(flat_family(p, BoundaryFunction::cutoff(grid.second), DiscGrid::create(grid.first, grid.second)));
      },
      py::arg("c"), py::arg("t"), py::arg("grid") = std::pair<int, int>(32, 128),
      "Flat model disc with reduced parameters (c_1 = 0, t_1 = 1 are implied).");

  m.def(
      "holder_check",
      [](const CArray& f, const CArray& f_dbar, double p, int pairs, double r, std::uint64_t seed) {
        const auto h = fatou::holder_bound_check(from_array(f), from_array(f_dbar), p,
                                                 fatou::holder_pairs(r, pairs, seed), r);
        py::dict d;
        d["c_hat"] = h.c_hat;
        d["exponent"] = h.exponent;
        d["sup_norm"] = h.sup_norm;
        d["lp_norm"] = h.lp_norm;
        d["finite"] = h.finite;
        return d;
      },
      py::arg("f"), py::arg("f_dbar"), py::arg("p") = 4.0, py::arg("pairs") = 200, py::arg("r") = 0.5,
      py::arg("seed") = 1);

  m.def(
      "ray_summary",
      [](const std::string& function, int edge_samples, int slice_samples, std::uint64_t seed) {
        const WedgeDomain w = WedgeDomain::model(2);
        const fatou::TestFunction f = io::parse_test_function(function);
        fatou::RayOptions o;
        o.seed = seed;
        py::gil_scoped_release release;
        const auto r = fatou::ray_family_limits(f, fatou::edge_samples(w, edge_samples, slice_samples, seed), w, o);
        py::gil_scoped_acquire acquire;
        py::dict d;
        d["nontangential_fraction"] = r.nontangential_fraction;
        d["exceptional_points"] = r.exceptional_points;
        d["exceptional_none"] = r.exceptional_none;
        d["max_oracle_error"] = r.max_oracle_error;
        d["monotone"] = r.monotone;
        py::list verdicts;
        for (const auto& pv : r.points) verdicts.append(std::string(fatou::to_string(pv.verdict)));
        d["verdicts"] = verdicts;
        return d;
      },
      py::arg("function") = "dim 2\nbuiltin power_i", py::arg("edge_samples") = 100, py::arg("slice_samples") = 5,
      py::arg("seed") = 1, "Ray-family verdicts on the model wedge in C^2.");

  m.def(
      "run",
      [](const std::string& command, const std::map<std::string, std::string>& values) {
        RunReport rep;
        {
          py::gil_scoped_release release;
          rep = run(RunConfig{command, values});
        }
        return rep.to_json(true).dump();
      },
      py::arg("command"), py::arg("values") = std::map<std::string, std::string>{},
      "Runs a CLI scenario and returns its JSON report.");

  m.def("commands", &commands);
}
