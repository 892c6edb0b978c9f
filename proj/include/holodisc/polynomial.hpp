#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "holodisc/types.hpp"

namespace holodisc {

/// c * prod z_j^{p_j} * prod conj(z_j)^{q_j}
struct Monomial {
  cplx coefficient{};
  std::vector<int> z_powers;
  std::vector<int> zbar_powers;
};

/// Polynomial in z and conj(z) on C^n with exact Wirtinger derivatives.
class Polynomial {
public:
  Polynomial() = default;
  explicit Polynomial(int n) : n_(n) {}
  Polynomial(int n, std::vector<Monomial> terms);

  static Polynomial constant(int n, cplx c);

  int dimension() const { return n_; }
  const std::vector<Monomial>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  cplx operator()(const CVector& z) const;
  /// d/dz_j
  Polynomial dz(int j) const;
  /// d/dconj(z_j)
  Polynomial dzbar(int j) const;

  /// Parses "re im [monomial] ; re im [monomial] ; ..." where a monomial is a
  /// '*'-separated product of factors z<k>[^p] or zb<k>[^p] (1-based k).
  static Polynomial parse(std::string_view text, int n, int line = 1, int column_offset = 0);

private:
  int n_ = 0;
  std::vector<Monomial> terms_;
};

/// Real polynomial in y in R^n; used for edge graphs x = h(y).
struct RealMonomial {
  double coefficient = 0.0;
  std::vector<int> powers;
};

class RealPolynomial {
public:
  RealPolynomial() = default;
  explicit RealPolynomial(int n) : n_(n) {}
  RealPolynomial(int n, std::vector<RealMonomial> terms);

  int dimension() const { return n_; }
  const std::vector<RealMonomial>& terms() const { return terms_; }

  double operator()(std::span<const double> y) const;
  RVector gradient(std::span<const double> y) const;

  /// Parses "c [monomial] ; c [monomial] ; ..." with factors y<k>[^p].
  static RealPolynomial parse(std::string_view text, int n, int line = 1, int column_offset = 0);

  /// eps * |y|^2
  static RealPolynomial quadratic(int n, double eps);

private:
  int n_ = 0;
  std::vector<RealMonomial> terms_;
};

} // namespace holodisc
