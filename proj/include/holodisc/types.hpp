#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace holodisc {

using cplx = std::complex<double>;
inline constexpr cplx I{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;

using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using CRowVector = Eigen::RowVectorXcd;

/// Real coordinates are interleaved (x_1, y_1, ..., x_n, y_n) with z_j = x_j + i y_j.
CVector to_complex(const RVector& real_coords);
RVector to_real(const CVector& z);

/// The standard structure diag([[0,-1],[1,0]], ...) on R^{2n}.
RMatrix standard_structure(int n);

/// Real 2n x 2n matrix of the conjugate-linear map v -> A conj(v).
RMatrix conjugate_linear_to_real(const CMatrix& a);

/// Real 2n x 2n matrix of the complex-linear map v -> M v.
RMatrix complex_linear_to_real(const CMatrix& m);

/// Spectral norm of a complex matrix.
double operator_norm(const CMatrix& a);

} // namespace holodisc
