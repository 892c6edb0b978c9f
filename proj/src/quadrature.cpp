#include "holodisc/quadrature.hpp"
#include "holodisc/error.hpp"

#include <cmath>

namespace holodisc::quad {

Rule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "Gauss-Legendre needs at least one node");
  Rule r;
  r.nodes.resize(static_cast<std::size_t>(n));
  r.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Newton on P_n from the Tricomi initial guess.
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pn = n == 1 ? x : p1;
      const double pnm1 = n == 1 ? 1.0 : p0;
      dp = n * (x * pn - pnm1) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pn = n == 1 ? x : p1;
      const double pnm1 = n == 1 ? 1.0 : p0;
      dp = n * (x * pn - pnm1) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[static_cast<std::size_t>(i)] = -x;
    r.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    r.weights[static_cast<std::size_t>(i)] = w;
    r.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  if (n % 2 == 1) r.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  const double half = 0.5 * (b - a), mid = 0.5 * (b + a);
  for (int i = 0; i < n; ++i) {
    r.nodes[static_cast<std::size_t>(i)] = mid + half * r.nodes[static_cast<std::size_t>(i)];
    r.weights[static_cast<std::size_t>(i)] *= half;
  }
  return r;
}

std::vector<double> barycentric_weights(const Rule& rule) {
  // On [-1, 1]: w_i ~ (-1)^i sqrt((1 - x_i^2) W_i). The rule is symmetric, so
  // the reference coordinates follow from the interval midpoint and sum(W).
  const std::size_t n = rule.nodes.size();
  double sumw = 0.0;
  for (double w : rule.weights) sumw += w;
  const double half = 0.5 * sumw;
  const double mid = 0.5 * (rule.nodes.front() + rule.nodes.back());
  std::vector<double> bw(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = (rule.nodes[i] - mid) / half;
    const double w = rule.weights[i] / half;
    bw[i] = ((i % 2) ? -1.0 : 1.0) * std::sqrt((1.0 - x * x) * w);
  }
  return bw;
}

RMatrix interpolation_matrix(const std::vector<double>& nodes, const std::vector<double>& bary,
                             const std::vector<double>& targets) {
  const Eigen::Index n = static_cast<Eigen::Index>(nodes.size());
  RMatrix m = RMatrix::Zero(static_cast<Eigen::Index>(targets.size()), n);
  for (std::size_t t = 0; t < targets.size(); ++t) {
    const double x = targets[t];
    int exact = -1;
    for (Eigen::Index i = 0; i < n; ++i)
      if (x == nodes[static_cast<std::size_t>(i)]) exact = static_cast<int>(i);
    if (exact >= 0) {
      m(static_cast<Eigen::Index>(t), exact) = 1.0;
      continue;
    }
    double denom = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double c = bary[static_cast<std::size_t>(i)] / (x - nodes[static_cast<std::size_t>(i)]);
      m(static_cast<Eigen::Index>(t), i) = c;
      denom += c;
    }
    m.row(static_cast<Eigen::Index>(t)) /= denom;
  }
  return m;
}

RMatrix differentiation_matrix(const std::vector<double>& nodes, const std::vector<double>& bary) {
  const Eigen::Index n = static_cast<Eigen::Index>(nodes.size());
  RMatrix d = RMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double diag = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double v = (bary[static_cast<std::size_t>(j)] / bary[static_cast<std::size_t>(i)]) /
                       (nodes[static_cast<std::size_t>(i)] - nodes[static_cast<std::size_t>(j)]);
      d(i, j) = v;
      diag -= v;
    }
    d(i, i) = diag;
  }
  return d;
}

} // namespace holodisc::quad
