#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "holodisc/discsolve.hpp"
#include "holodisc/fatou.hpp"
#include "holodisc/fields.hpp"
#include "holodisc/wedgefam.hpp"

namespace holodisc::io {

/// Built-in structures:
///   zero            A = 0
///   const a         A = a I
///   const re im     A = (re + i im) I
///   linear c        A(z) = c z_1 I
ComplexMatrixField structure_from_catalog(std::string_view spec, int n);

/// Structure file, one matrix entry per line ('#' starts a comment):
///   n 2
///   entry 1 1 : 0.1 0 z1 ; 0 0.05 zb2
/// Entries use the polynomial grammar; unlisted entries are zero.
ComplexMatrixField parse_structure(std::string_view text);

/// A path to a structure file, or a catalog spec.
ComplexMatrixField load_structure(const std::string& arg, int n);

/// Wedge file:
///   dim 2
///   delta 0.1
///   model                     (or)
///   graph 1 : 0.05 y1^2 ; 0.05 y2^2
///   rho 1 : x1 - 0.1*y1^2     (general defining functions)
///   A linear 0.1              (catalog spec, default zero)
WedgeDomain parse_wedge(std::string_view text);

/// Curve file with components in t:
///   dim 2
///   gamma 1 = -(1 - t)
///   gamma 2 = -(1 - t) + (1 - t)^2 * (0.5 + 0.3*i)
fatou::Curve parse_curve(std::string_view text);

/// Test function file:
///   dim 2
///   F = exp(z1) + 0.1*zb1
///   sup_bound 1.4
///   dbar_bound 0.1
/// or a built-in: `builtin power_i`, `builtin power_i_perturbed 0.1`,
/// `builtin exp_perturbed 0.1`.
fatou::TestFunction parse_test_function(std::string_view text);

/// Grid function CSV: header `n_r,n_theta`, rows `j,k,re,im`. Rows with
/// j = n_r hold the boundary trace.
std::string write_grid_csv(const GridFunction& f);
GridFunction parse_grid_csv(std::string_view text);

/// Disc CSV: header `n,n_r,n_theta`, rows `j,k,re_1,im_1,...,re_n,im_n`,
/// boundary trace as in the grid format.
std::string write_disc_csv(const DiscMap& z);
DiscMap parse_disc_csv(std::string_view text);

/// Point list CSV: rows `re,im`.
std::vector<cplx> parse_points_csv(std::string_view text);
std::string write_values_csv(std::span<const cplx> points, std::span<const cplx> values);

/// Boundary data CSV: header `n_theta`, rows `k,re[,im]`.
BoundaryFunction parse_boundary_csv(std::string_view text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

/// Shortest decimal form that reads back to the same double.
std::string format_double(double x);

} // namespace holodisc::io
