#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "holodisc/expression.hpp"
#include "holodisc/polynomial.hpp"
#include "holodisc/types.hpp"

namespace holodisc {

/// Field of real 2n x 2n matrices J(z) on R^{2n}.
class StructureTensorField {
public:
  using Evaluator = std::function<RMatrix(const RVector&)>;

  StructureTensorField(int n, Evaluator eval, bool normalized_at_origin = false)
      : n_(n), eval_(std::make_shared<const Evaluator>(std::move(eval))),
        normalized_(normalized_at_origin) {}

  static StructureTensorField standard(int n);
  static StructureTensorField constant(const RMatrix& j);

  int dimension() const { return n_; }
  bool normalized_at_origin() const { return normalized_; }
  RMatrix operator()(const RVector& point) const { return (*eval_)(point); }

private:
  int n_;
  std::shared_ptr<const Evaluator> eval_;
  bool normalized_;
};

/// Field of complex n x n matrices A(z): the complex matrix of a structure.
class ComplexMatrixField {
public:
  using Evaluator = std::function<CMatrix(const CVector&)>;

  ComplexMatrixField(int n, Evaluator eval, std::string description = {})
      : n_(n), eval_(std::make_shared<const Evaluator>(std::move(eval))),
        description_(std::move(description)) {}

  static ComplexMatrixField zero(int n);
  static ComplexMatrixField constant(const CMatrix& a);
  /// A(z) = sum_k z_k B_k.
  static ComplexMatrixField linear(std::vector<CMatrix> coefficients);
  static ComplexMatrixField polynomial(std::vector<std::vector<Polynomial>> entries);

  int dimension() const { return n_; }
  const std::string& description() const { return description_; }
  CMatrix operator()(const CVector& z) const { return (*eval_)(z); }

  /// True when the field is known to vanish identically.
  bool is_zero() const { return is_zero_; }

private:
  int n_;
  std::shared_ptr<const Evaluator> eval_;
  std::string description_;
  bool is_zero_ = false;
};

/// Complex-valued function F on C^n with optional analytic Wirtinger gradients.
class ScalarField {
public:
  using Value = std::function<cplx(const CVector&)>;
  using Gradient = std::function<CRowVector(const CVector&)>;

  ScalarField(int n, Value value, std::optional<Gradient> dz = {},
              std::optional<Gradient> dzbar = {}, double fd_step = 1e-6);

  static ScalarField from_polynomial(const Polynomial& p);
  static ScalarField from_expression(const Expression& e, int n, double fd_step = 1e-6);
  /// Real part of z_j (1-based), with exact gradients.
  static ScalarField real_coordinate(int n, int j);

  int dimension() const { return n_; }
  bool has_analytic_gradients() const { return dz_ && dzbar_; }
  double fd_step() const { return fd_step_; }

  cplx operator()(const CVector& z) const { return (*value_)(z); }

  /// (F_z, F_zbar) as row vectors; analytic when available, else central
  /// differences with a relative step.
  std::pair<CRowVector, CRowVector> gradients(const CVector& z) const;
  std::pair<CRowVector, CRowVector> fd_gradients(const CVector& z) const;

private:
  int n_;
  std::shared_ptr<const Value> value_;
  std::shared_ptr<const Gradient> dz_;
  std::shared_ptr<const Gradient> dzbar_;
  double fd_step_;
};

} // namespace holodisc
