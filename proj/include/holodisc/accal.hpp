#pragma once

#include "holodisc/fields.hpp"
#include "holodisc/types.hpp"

namespace holodisc::accal {

struct Tolerances {
  double structure = 1e-10;  ///< bound on ||J^2 + Id||
  double condition = 1e12;   ///< largest accepted condition number for inversions
};

/// Throws NotAlmostComplex unless ||J^2 + Id|| <= tol.
void require_almost_complex(const RMatrix& j, double tol);

/// A with L v = A conj(v), L = (J_st + J)^{-1}(J_st - J).
CMatrix complex_matrix_from_structure(const RMatrix& j, const Tolerances& tol = {});
CMatrix complex_matrix_from_structure(const StructureTensorField& j, const RVector& point,
                                      const Tolerances& tol = {});

/// J = J_st (I - L)(I + L)^{-1} with L the real form of v -> A conj(v).
RMatrix structure_from_complex_matrix(const CMatrix& a);
RMatrix structure_from_complex_matrix(const ComplexMatrixField& a, const CVector& z);

/// Structure field induced by a complex-matrix field (normalized when A(0) = 0).
StructureTensorField structure_field(const ComplexMatrixField& a);
/// Complex-matrix field of a structure field, evaluated pointwise.
ComplexMatrixField complex_matrix_field(const StructureTensorField& j, const Tolerances& tol = {});

/// Complex matrix of the same structure in coordinates t:
/// A' = (t_z A + t_zbar)(conj(t)_zbar + conj(t)_z A)^{-1}.
CMatrix transform_complex_matrix(const CMatrix& a, const CMatrix& t_z, const CMatrix& t_zbar,
                                 const Tolerances& tol = {});

/// Coefficients of a 1-form in the basis alpha = dz - A dzbar, alpha_bar = dzbar - conj(A) dz.
struct CotangentDecomposition {
  CRowVector alpha;
  CRowVector alpha_bar;

  static CotangentDecomposition decompose(const CRowVector& dz_coeffs, const CRowVector& dzbar_coeffs,
                                          const CMatrix& a);
  /// Expands back to (dz, dzbar) coefficients.
  std::pair<CRowVector, CRowVector> reconstruct(const CMatrix& a) const;
};

struct DbarResult {
  /// alpha_bar coefficients of dbar_J F:
  /// F_zbar (I - conj(A) A)^{-1} + F_z (I - A conj(A))^{-1} A.
  CRowVector coefficients;
  /// F_zbar + F_z A, the residual used everywhere else.
  CRowVector residual;
};

/// The residual row F_zbar + F_z A.
CRowVector cr_residual(const CRowVector& f_z, const CRowVector& f_zbar, const CMatrix& a);

DbarResult dbar_scalar(const ScalarField& f, const ComplexMatrixField& a, const CVector& z,
                       const Tolerances& tol = {});

/// Real C with C J(p) C^{-1} = J_st.
RMatrix normalize_at_point(const StructureTensorField& j, const RVector& p, const Tolerances& tol = {});

/// C J C^{-1}
RMatrix push_forward(const RMatrix& j, const RMatrix& c);

namespace testing {
/// Flips the sign of the F_zbar term in cr_residual while alive. Used by the
/// mutation smoke test only.
class ResidualSignMutation {
public:
  ResidualSignMutation();
  ~ResidualSignMutation();
  ResidualSignMutation(const ResidualSignMutation&) = delete;
  ResidualSignMutation& operator=(const ResidualSignMutation&) = delete;
};
} // namespace testing

} // namespace holodisc::accal
