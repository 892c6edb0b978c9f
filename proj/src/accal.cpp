#include "holodisc/accal.hpp"
#include "holodisc/error.hpp"

#include <atomic>
#include <cmath>
#include <sstream>

#include <Eigen/LU>

namespace holodisc::accal {

namespace {

std::atomic<int> g_residual_sign{1};

double condition_number(const RMatrix& m) {
  Eigen::JacobiSVD<RMatrix> svd(m);
  const auto& s = svd.singularValues();
  if (s(s.size() - 1) == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / s(s.size() - 1);
}

double condition_number(const CMatrix& m) {
  Eigen::JacobiSVD<CMatrix> svd(m);
  const auto& s = svd.singularValues();
  if (s(s.size() - 1) == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / s(s.size() - 1);
}

} // namespace

void require_almost_complex(const RMatrix& j, double tol) {
  if (j.rows() != j.cols() || j.rows() % 2 != 0)
    throw Error(ErrorCode::InvalidArgument, "structure must be a square matrix of even size");
  const RMatrix sq = j * j + RMatrix::Identity(j.rows(), j.cols());
  const double defect = sq.norm();
  if (!(defect <= tol)) {
    std::ostringstream os;
    os << "||J^2 + Id|| = " << defect << " exceeds " << tol;
    throw Error(ErrorCode::NotAlmostComplex, os.str());
  }
}

CMatrix complex_matrix_from_structure(const RMatrix& j, const Tolerances& tol) {
  require_almost_complex(j, tol.structure);
  const int n = static_cast<int>(j.rows() / 2);
  const RMatrix jst = standard_structure(n);
  const RMatrix sum = jst + j;
  if (condition_number(sum) > tol.condition)
    throw Error(ErrorCode::SingularStructure, "J_st + J is singular; normalize coordinates first");
  const RMatrix l = sum.partialPivLu().solve(jst - j);

  // Column k of A is L(e_k); conjugate linearity means L(i e_k) = -i L(e_k).
  CMatrix a(n, n);
  for (int k = 0; k < n; ++k)
    for (int p = 0; p < n; ++p) a(p, k) = cplx(l(2 * p, 2 * k), l(2 * p + 1, 2 * k));
  const RMatrix check = conjugate_linear_to_real(a);
  const double mismatch = (check - l).norm();
  if (mismatch > std::sqrt(tol.structure) * std::max(1.0, l.norm()))
    throw Error(ErrorCode::NotAlmostComplex, "L is not conjugate-linear");
  return a;
}

CMatrix complex_matrix_from_structure(const StructureTensorField& j, const RVector& point,
                                      const Tolerances& tol) {
  return complex_matrix_from_structure(j(point), tol);
}

RMatrix structure_from_complex_matrix(const CMatrix& a) {
  if (a.rows() != a.cols()) throw Error(ErrorCode::InvalidArgument, "A must be square");
  const double norm = operator_norm(a);
  if (!(norm < 1.0)) {
    std::ostringstream os;
    os << "||A|| = " << norm << " >= 1";
    throw Error(ErrorCode::NormTooLarge, os.str());
  }
  const int n = static_cast<int>(a.rows());
  const RMatrix l = conjugate_linear_to_real(a);
  const RMatrix id = RMatrix::Identity(2 * n, 2 * n);
  // J (I + L) = J_st (I - L)  =>  J = J_st (I - L)(I + L)^{-1}
  const RMatrix rhs = standard_structure(n) * (id - l);
  return (id + l).transpose().partialPivLu().solve(rhs.transpose()).transpose();
}

RMatrix structure_from_complex_matrix(const ComplexMatrixField& a, const CVector& z) {
  return structure_from_complex_matrix(a(z));
}

StructureTensorField structure_field(const ComplexMatrixField& a) {
  const int n = a.dimension();
  const bool normalized = a(CVector::Zero(n)).norm() == 0.0;
  return StructureTensorField(
      n, [a](const RVector& p) { return structure_from_complex_matrix(a(to_complex(p))); }, normalized);
}

ComplexMatrixField complex_matrix_field(const StructureTensorField& j, const Tolerances& tol) {
  return ComplexMatrixField(
      j.dimension(), [j, tol](const CVector& z) { return complex_matrix_from_structure(j(to_real(z)), tol); },
      "from structure");
}

CMatrix transform_complex_matrix(const CMatrix& a, const CMatrix& t_z, const CMatrix& t_zbar,
                                 const Tolerances& tol) {
  // conj(t)_zbar = conj(t_z), conj(t)_z = conj(t_zbar)
  const CMatrix denom = t_z.conjugate() + t_zbar.conjugate() * a;
  if (condition_number(denom) > tol.condition)
    throw Error(ErrorCode::SingularTransform, "conj(t)_zbar + conj(t)_z A is singular");
  const CMatrix numer = t_z * a + t_zbar;
  // numer * denom^{-1}
  return denom.transpose().partialPivLu().solve(numer.transpose()).transpose();
}

CotangentDecomposition CotangentDecomposition::decompose(const CRowVector& dz_coeffs,
                                                         const CRowVector& dzbar_coeffs, const CMatrix& a) {
  const Eigen::Index n = a.rows();
  const CMatrix id = CMatrix::Identity(n, n);
  const CMatrix abar = a.conjugate();
  CotangentDecomposition d;
  // a_coef (I - A conj(A)) = F_z + F_zbar conj(A)
  const CRowVector rhs = dz_coeffs + dzbar_coeffs * abar;
  d.alpha = (id - a * abar).transpose().partialPivLu().solve(rhs.transpose()).transpose();
  d.alpha_bar = dzbar_coeffs + d.alpha * a;
  return d;
}

std::pair<CRowVector, CRowVector> CotangentDecomposition::reconstruct(const CMatrix& a) const {
  return {alpha - alpha_bar * a.conjugate(), alpha_bar - alpha * a};
}

CRowVector cr_residual(const CRowVector& f_z, const CRowVector& f_zbar, const CMatrix& a) {
  const double sign = static_cast<double>(g_residual_sign.load(std::memory_order_relaxed));
  return sign * f_zbar + f_z * a;
}

DbarResult dbar_scalar(const ScalarField& f, const ComplexMatrixField& a_field, const CVector& z,
                       const Tolerances& tol) {
  const CMatrix a = a_field(z);
  const double norm = operator_norm(a);
  if (!(norm < 1.0)) {
    std::ostringstream os;
    os << "||A(z)|| = " << norm << " >= 1";
    throw Error(ErrorCode::NormTooLarge, os.str());
  }
  const auto [f_z, f_zbar] = f.gradients(z);
  if (!f_z.allFinite() || !f_zbar.allFinite())
    throw Error(ErrorCode::GradientUnavailable, "gradient is not finite at the query point");
  const Eigen::Index n = a.rows();
  const CMatrix id = CMatrix::Identity(n, n);
  const CMatrix abar = a.conjugate();
  const CMatrix m1 = id - abar * a;
  const CMatrix m2 = id - a * abar;
  if (condition_number(m1) > tol.condition)
    throw Error(ErrorCode::NormTooLarge, "I - conj(A) A is numerically singular");
  DbarResult r;
  const CRowVector t1 = m1.transpose().partialPivLu().solve(f_zbar.transpose()).transpose();
  const CRowVector t2 = m2.transpose().partialPivLu().solve(f_z.transpose()).transpose() * a;
  r.coefficients = t1 + t2;
  r.residual = cr_residual(f_z, f_zbar, a);
  return r;
}

RMatrix normalize_at_point(const StructureTensorField& j_field, const RVector& p, const Tolerances& tol) {
  const RMatrix j = j_field(p);
  require_almost_complex(j, tol.structure);
  const Eigen::Index dim = j.rows();
  // Greedy basis (v_1, J v_1, ..., v_n, J v_n) from the standard vectors; then
  // B J_st = J B and C = B^{-1}.
  RMatrix b(dim, 0);
  int rank = 0;
  for (Eigen::Index k = 0; k < dim && rank < dim; ++k) {
    RVector v = RVector::Unit(dim, k);
    RMatrix trial(dim, b.cols() + 2);
    trial << b, v, j * v;
    Eigen::FullPivLU<RMatrix> lu(trial);
    lu.setThreshold(1e-10);
    if (lu.rank() == rank + 2) {
      b = trial;
      rank += 2;
    }
  }
  if (rank != dim) throw Error(ErrorCode::NotAlmostComplex, "could not build a complex basis");
  return b.inverse();
}

RMatrix push_forward(const RMatrix& j, const RMatrix& c) { return c * j * c.inverse(); }

namespace testing {
ResidualSignMutation::ResidualSignMutation() { g_residual_sign.store(-1); }
ResidualSignMutation::~ResidualSignMutation() { g_residual_sign.store(1); }
} // namespace testing

} // namespace holodisc::accal
