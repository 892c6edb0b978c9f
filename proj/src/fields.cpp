#include "holodisc/fields.hpp"
#include "holodisc/error.hpp"

#include <Eigen/SVD>
#include <cmath>

namespace holodisc {

CVector to_complex(const RVector& real_coords) {
  if (real_coords.size() % 2 != 0)
    throw Error(ErrorCode::InvalidArgument, "real coordinates must have even length");
  const Eigen::Index n = real_coords.size() / 2;
  CVector z(n);
  for (Eigen::Index j = 0; j < n; ++j) z(j) = cplx(real_coords(2 * j), real_coords(2 * j + 1));
  return z;
}

RVector to_real(const CVector& z) {
  RVector v(2 * z.size());
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    v(2 * j) = z(j).real();
    v(2 * j + 1) = z(j).imag();
  }
  return v;
}

RMatrix standard_structure(int n) {
  RMatrix j = RMatrix::Zero(2 * n, 2 * n);
  for (int k = 0; k < n; ++k) {
    j(2 * k, 2 * k + 1) = -1.0;
    j(2 * k + 1, 2 * k) = 1.0;
  }
  return j;
}

RMatrix conjugate_linear_to_real(const CMatrix& a) {
  // v -> A conj(v): column for e_k (real unit) is A e_k, for i e_k it is -i A e_k.
  const Eigen::Index n = a.rows();
  RMatrix m(2 * n, 2 * n);
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index p = 0; p < n; ++p) {
      const cplx c = a(p, k);
      const cplx ci = -I * c;
      m(2 * p, 2 * k) = c.real();
      m(2 * p + 1, 2 * k) = c.imag();
      m(2 * p, 2 * k + 1) = ci.real();
      m(2 * p + 1, 2 * k + 1) = ci.imag();
    }
  }
  return m;
}

RMatrix complex_linear_to_real(const CMatrix& a) {
  const Eigen::Index n = a.rows();
  RMatrix m(2 * n, 2 * n);
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index p = 0; p < n; ++p) {
      const cplx c = a(p, k);
      m(2 * p, 2 * k) = c.real();
      m(2 * p + 1, 2 * k) = c.imag();
      m(2 * p, 2 * k + 1) = -c.imag();
      m(2 * p + 1, 2 * k + 1) = c.real();
    }
  }
  return m;
}

double operator_norm(const CMatrix& a) {
  if (a.size() == 0) return 0.0;
  if (a.rows() == 1 && a.cols() == 1) return std::abs(a(0, 0));
  Eigen::JacobiSVD<CMatrix> svd(a);
  return svd.singularValues()(0);
}

StructureTensorField StructureTensorField::standard(int n) {
  RMatrix j = standard_structure(n);
  return StructureTensorField(n, [j](const RVector&) { return j; }, true);
}

StructureTensorField StructureTensorField::constant(const RMatrix& j) {
  const int n = static_cast<int>(j.rows() / 2);
  const bool normalized = (j - standard_structure(n)).norm() < 1e-14;
  return StructureTensorField(n, [j](const RVector&) { return j; }, normalized);
}

ComplexMatrixField ComplexMatrixField::zero(int n) {
  ComplexMatrixField f(n, [n](const CVector&) { return CMatrix(CMatrix::Zero(n, n)); }, "zero");
  f.is_zero_ = true;
  return f;
}

ComplexMatrixField ComplexMatrixField::constant(const CMatrix& a) {
  const int n = static_cast<int>(a.rows());
  ComplexMatrixField f(n, [a](const CVector&) { return a; }, "constant");
  f.is_zero_ = a.norm() == 0.0;
  return f;
}

ComplexMatrixField ComplexMatrixField::linear(std::vector<CMatrix> coefficients) {
  const int n = static_cast<int>(coefficients.size());
  for (const auto& b : coefficients)
    if (b.rows() != n || b.cols() != n)
      throw Error(ErrorCode::InvalidArgument, "linear field needs n matrices of size n x n");
  return ComplexMatrixField(
      n,
      [b = std::move(coefficients), n](const CVector& z) {
        CMatrix a = CMatrix::Zero(n, n);
        for (int k = 0; k < n; ++k) a += z(k) * b[static_cast<std::size_t>(k)];
        return a;
      },
      "linear");
}

ComplexMatrixField ComplexMatrixField::polynomial(std::vector<std::vector<Polynomial>> entries) {
  const int n = static_cast<int>(entries.size());
  for (const auto& row : entries)
    if (static_cast<int>(row.size()) != n)
      throw Error(ErrorCode::InvalidArgument, "polynomial field must be square");
  return ComplexMatrixField(
      n,
      [e = std::move(entries), n](const CVector& z) {
        CMatrix a(n, n);
        for (int p = 0; p < n; ++p)
          for (int q = 0; q < n; ++q) a(p, q) = e[p][q](z);
        return a;
      },
      "polynomial");
}

ScalarField::ScalarField(int n, Value value, std::optional<Gradient> dz,
                         std::optional<Gradient> dzbar, double fd_step)
    : n_(n), value_(std::make_shared<const Value>(std::move(value))), fd_step_(fd_step) {
  if (dz) dz_ = std::make_shared<const Gradient>(std::move(*dz));
  if (dzbar) dzbar_ = std::make_shared<const Gradient>(std::move(*dzbar));
  if (!(fd_step > 0.0)) throw Error(ErrorCode::InvalidArgument, "finite-difference step must be positive");
}

ScalarField ScalarField::from_polynomial(const Polynomial& p) {
  const int n = p.dimension();
  std::vector<Polynomial> dz, dzb;
  for (int j = 0; j < n; ++j) {
    dz.push_back(p.dz(j));
    dzb.push_back(p.dzbar(j));
  }
  auto row = [n](std::vector<Polynomial> parts) {
    return [parts = std::move(parts), n](const CVector& z) {
      CRowVector r(n);
      for (int j = 0; j < n; ++j) r(j) = parts[static_cast<std::size_t>(j)](z);
      return r;
    };
  };
  return ScalarField(n, [p](const CVector& z) { return p(z); }, row(std::move(dz)), row(std::move(dzb)));
}

ScalarField ScalarField::from_expression(const Expression& e, int n, double fd_step) {
  return ScalarField(
      n, [e](const CVector& z) { return e.evaluate(coordinate_values(z)); }, std::nullopt, std::nullopt,
      fd_step);
}

ScalarField ScalarField::real_coordinate(int n, int j) {
  const int k = j - 1;
  CRowVector half = CRowVector::Zero(n);
  half(k) = 0.5;
  return ScalarField(
      n, [k](const CVector& z) { return cplx(z(k).real(), 0.0); },
      [half](const CVector&) { return half; }, [half](const CVector&) { return half; });
}

std::pair<CRowVector, CRowVector> ScalarField::gradients(const CVector& z) const {
  if (has_analytic_gradients()) return {(*dz_)(z), (*dzbar_)(z)};
  return fd_gradients(z);
}

std::pair<CRowVector, CRowVector> ScalarField::fd_gradients(const CVector& z) const {
  CRowVector fz(n_), fzb(n_);
  for (int j = 0; j < n_; ++j) {
    const double h = fd_step_ * std::max(1.0, std::abs(z(j)));
    CVector zp = z, zm = z;
    zp(j) += h;
    zm(j) -= h;
    const cplx fx = ((*value_)(zp) - (*value_)(zm)) / (2.0 * h);
    zp = z;
    zm = z;
    zp(j) += I * h;
    zm(j) -= I * h;
    const cplx fy = ((*value_)(zp) - (*value_)(zm)) / (2.0 * h);
    if (!std::isfinite(std::abs(fx)) || !std::isfinite(std::abs(fy)))
      throw Error(ErrorCode::GradientUnavailable, "non-finite finite-difference gradient");
    fz(j) = 0.5 * (fx - I * fy);
    fzb(j) = 0.5 * (fx + I * fy);
  }
  return {fz, fzb};
}

} // namespace holodisc
