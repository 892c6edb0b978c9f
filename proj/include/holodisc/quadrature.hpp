#pragma once

#include <vector>

#include "holodisc/types.hpp"

namespace holodisc::quad {

/// Gauss-Legendre rule on [a, b], nodes ascending.
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

Rule gauss_legendre(int n, double a = -1.0, double b = 1.0);

/// Barycentric weights for the Gauss-Legendre nodes of `rule` (any interval).
std::vector<double> barycentric_weights(const Rule& rule);

/// Row i holds the Lagrange basis at targets[i] for the given nodes.
RMatrix interpolation_matrix(const std::vector<double>& nodes, const std::vector<double>& bary,
                             const std::vector<double>& targets);

/// d/dx of the polynomial interpolant, evaluated at the nodes.
RMatrix differentiation_matrix(const std::vector<double>& nodes, const std::vector<double>& bary);

} // namespace holodisc::quad
