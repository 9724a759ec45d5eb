#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "specloc/error.hpp"

namespace specloc {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

namespace numerics {

/// Largest supported system dimension.
inline constexpr Eigen::Index kMaxDimension = 512;

struct EigenDecomposition {
  std::vector<Complex> values;
  ComplexMatrix rightVectors;  // column i belongs to values[i], unit norm
  double conditionEstimate = 1.0;
};

struct SvdExtremes {
  double sigmaMax = 0.0;
  double sigmaMin = 0.0;
};

// Throws InputError unless A is square with finite entries.
void require_square_finite(const ComplexMatrix& A, const char* name = "matrix");

bool all_finite(const ComplexMatrix& A);

/// Eigenvalues and unit right eigenvectors of a dense complex matrix.
///
/// Pairs are ordered by angle bucket (arg in [0, 2pi) rounded to 1e-6 rad),
/// then modulus, then real part, so the ordering is reproducible. Defective
/// input is not an error: the eigenvector matrix is then (nearly) singular and
/// `conditionEstimate` is large or infinite. Throws ConvergenceError when the
/// QR iteration fails or a residual exceeds 1e-10 * ||A||.
EigenDecomposition eig(const ComplexMatrix& A);

/// Eigenvalues only, with the same ordering as eig().
std::vector<Complex> eigenvalues(const ComplexMatrix& A);

/// Total order used for eigenvalue lists.
bool eigen_order_less(Complex a, Complex b);

SvdExtremes svd_extremes(const ComplexMatrix& A);

/// Spectral norm; also valid for rectangular input.
double operator_norm(const ComplexMatrix& A);

/// Smallest singular value of a square matrix.
double sigma_min(const ComplexMatrix& A);

/// 2-norm condition number, +inf for a singular matrix.
double condition_number(const ComplexMatrix& A);

/// Solves A X = B with partial pivoting. Throws SingularError when
/// sigmaMin(A) <= n * eps * sigmaMax(A).
ComplexMatrix solve(const ComplexMatrix& A, const ComplexMatrix& B);

/// ||A A^H - A^H A||.
double normality_residual(const ComplexMatrix& A);

/// Resolvent (A - z)^{-1} evaluated through one complex Schur factorisation
/// A = Q U Q^H, so each shift costs a triangular inversion.
class SchurResolvent {
 public:
  explicit SchurResolvent(const ComplexMatrix& A);

  Eigen::Index size() const { return U_.rows(); }

  /// (U - z)^{-1} in the Schur basis.
  ComplexMatrix schur_resolvent(Complex z) const;

  /// Q X Q^H.
  ComplexMatrix from_schur_basis(const ComplexMatrix& X) const;

  /// (A - z)^{-1} in the original basis.
  ComplexMatrix resolvent(Complex z) const;

  /// sigmaMin(A - z) by inverse iteration on the triangular factor; 0 when
  /// U - z has an exact zero on the diagonal.
  double sigma_min(Complex z) const;

 private:
  ComplexMatrix Q_;
  ComplexMatrix U_;
  bool diagonal_ = false;  // A was diagonal: Q = I, U = A
};

}  // namespace numerics
}  // namespace specloc
