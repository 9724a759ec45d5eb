#include "specloc/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace specloc::numerics {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kBucketWidth = 1e-6;

long long angle_bucket(Complex z) {
  if (z == Complex(0.0, 0.0)) return 0;
  double a = std::arg(z);
  if (a < 0.0) a += kTwoPi;
  auto bucket = std::llround(a / kBucketWidth);
  const auto wrap = std::llround(kTwoPi / kBucketWidth);
  if (bucket >= wrap) bucket -= wrap;
  return bucket;
}

}  // namespace

bool all_finite(const ComplexMatrix& A) {
  for (Eigen::Index j = 0; j < A.cols(); ++j)
    for (Eigen::Index i = 0; i < A.rows(); ++i)
      if (!std::isfinite(A(i, j).real()) || !std::isfinite(A(i, j).imag())) return false;
  return true;
}

void require_square_finite(const ComplexMatrix& A, const char* name) {
  if (A.rows() != A.cols()) {
    std::ostringstream os;
    os << name << " must be square, got " << A.rows() << "x" << A.cols();
    throw InputError(os.str());
  }
  if (!all_finite(A)) throw InputError(std::string(name) + " has non-finite entries");
}

bool eigen_order_less(Complex a, Complex b) {
  const auto ba = angle_bucket(a);
  const auto bb = angle_bucket(b);
  if (ba != bb) return ba < bb;
  const double ma = std::abs(a);
  const double mb = std::abs(b);
  if (ma != mb) return ma < mb;
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

SvdExtremes svd_extremes(const ComplexMatrix& A) {
  if (A.size() == 0) return {};
  Eigen::BDCSVD<ComplexMatrix> svd(A);
  const auto& s = svd.singularValues();
  SvdExtremes out;
  out.sigmaMax = s(0);
  // Only square (or tall) matrices have a meaningful distance to singularity.
  out.sigmaMin = (A.rows() >= A.cols()) ? s(s.size() - 1) : 0.0;
  return out;
}

double operator_norm(const ComplexMatrix& A) {
  if (A.size() == 0) return 0.0;
  return svd_extremes(A).sigmaMax;
}

double sigma_min(const ComplexMatrix& A) {
  require_square_finite(A);
  return svd_extremes(A).sigmaMin;
}

double condition_number(const ComplexMatrix& A) {
  const auto s = svd_extremes(A);
  if (s.sigmaMin == 0.0) return std::numeric_limits<double>::infinity();
  return s.sigmaMax / s.sigmaMin;
}

EigenDecomposition eig(const ComplexMatrix& A) {
  require_square_finite(A, "eig input");
  const Eigen::Index n = A.rows();
  EigenDecomposition out;
  if (n == 0) return out;

  Eigen::ComplexEigenSolver<ComplexMatrix> solver(A, true);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("eig: QR iteration did not converge",
                           std::numeric_limits<double>::infinity());
  }
  const auto& vals = solver.eigenvalues();
  const auto& vecs = solver.eigenvectors();

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
    return eigen_order_less(vals(i), vals(j));
  });

  out.values.reserve(static_cast<std::size_t>(n));
  out.rightVectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto src = order[static_cast<std::size_t>(k)];
    out.values.push_back(vals(src));
    ComplexVector v = vecs.col(src);
    const double nv = v.norm();
    if (nv > 0.0) v /= nv;
    out.rightVectors.col(k) = v;
  }

  const double normA = operator_norm(A);
  const double limit = 1e-10 * normA;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double res =
        (A * out.rightVectors.col(k) - out.values[static_cast<std::size_t>(k)] * out.rightVectors.col(k))
            .norm();
    if (res > limit && res > std::numeric_limits<double>::min()) {
      std::ostringstream os;
      os << "eig: residual " << res << " exceeds 1e-10*||A|| = " << limit;
      throw ConvergenceError(os.str(), res);
    }
  }
  out.conditionEstimate = condition_number(out.rightVectors);
  return out;
}

std::vector<Complex> eigenvalues(const ComplexMatrix& A) {
  require_square_finite(A, "eigenvalues input");
  if (A.rows() == 0) return {};
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(A, false);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("eigenvalues: QR iteration did not converge",
                           std::numeric_limits<double>::infinity());
  }
  std::vector<Complex> out(solver.eigenvalues().data(),
                           solver.eigenvalues().data() + A.rows());
  std::stable_sort(out.begin(), out.end(), eigen_order_less);
  return out;
}

ComplexMatrix solve(const ComplexMatrix& A, const ComplexMatrix& B) {
  require_square_finite(A, "solve matrix");
  if (B.rows() != A.rows()) throw InputError("solve: right-hand side has wrong row count");
  const auto s = svd_extremes(A);
  const double n = static_cast<double>(std::max<Eigen::Index>(A.rows(), 1));
  if (s.sigmaMin <= n * std::numeric_limits<double>::epsilon() * s.sigmaMax) {
    std::ostringstream os;
    os << "solve: matrix is singular to working precision (sigmaMin = " << s.sigmaMin << ")";
    throw SingularError(os.str(), s.sigmaMin);
  }
  return A.partialPivLu().solve(B);
}

double normality_residual(const ComplexMatrix& A) {
  return operator_norm(A * A.adjoint() - A.adjoint() * A);
}

SchurResolvent::SchurResolvent(const ComplexMatrix& A) {
  require_square_finite(A, "resolvent operator");
  if (A.rows() == 0) return;
  const Eigen::Index n = A.rows();
  diagonal_ = true;
  for (Eigen::Index j = 0; j < n && diagonal_; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      if (i != j && A(i, j) != Complex(0.0, 0.0)) {
        diagonal_ = false;
        break;
      }
  if (diagonal_) {
    Q_ = ComplexMatrix::Identity(n, n);
    U_ = A;
    return;
  }
  Eigen::ComplexSchur<ComplexMatrix> schur(A, true);
  if (schur.info() != Eigen::Success) {
    throw ConvergenceError("Schur factorisation did not converge",
                           std::numeric_limits<double>::infinity());
  }
  Q_ = schur.matrixU();
  U_ = schur.matrixT();
}

ComplexMatrix SchurResolvent::schur_resolvent(Complex z) const {
  const Eigen::Index n = U_.rows();
  if (diagonal_) {
    ComplexMatrix X = ComplexMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) X(i, i) = 1.0 / (U_(i, i) - z);
    return X;
  }
  ComplexMatrix shifted = U_;
  shifted.diagonal().array() -= z;
  // Column j of the inverse only involves the leading (j+1)x(j+1) block.
  ComplexMatrix X = ComplexMatrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    X(j, j) = 1.0;
    auto col = X.col(j).head(j + 1);
    shifted.topLeftCorner(j + 1, j + 1).triangularView<Eigen::Upper>().solveInPlace(col);
  }
  return X;
}

ComplexMatrix SchurResolvent::from_schur_basis(const ComplexMatrix& X) const {
  if (diagonal_) return X;
  return Q_ * X * Q_.adjoint();
}

ComplexMatrix SchurResolvent::resolvent(Complex z) const {
  return from_schur_basis(schur_resolvent(z));
}

double SchurResolvent::sigma_min(Complex z) const {
  const Eigen::Index n = U_.rows();
  if (n == 0) return std::numeric_limits<double>::infinity();
  if (diagonal_) return (U_.diagonal().array() - z).abs().minCoeff();
  ComplexMatrix A = U_;
  A.diagonal().array() -= z;
  for (Eigen::Index i = 0; i < n; ++i)
    if (A(i, i) == Complex(0.0, 0.0)) return 0.0;
  const auto tri = A.triangularView<Eigen::Upper>();
  ComplexVector x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = Complex(1.0, 0.5 * std::sin(1.0 + static_cast<double>(i)));
  x /= x.norm();
  double est = 0.0;
  for (int it = 0; it < 500; ++it) {
    ComplexVector y = tri.solve(x);
    ComplexVector w = tri.adjoint().solve(y);
    const double prev = est;
    est = std::sqrt(w.norm());  // tends to ||(U - z)^{-1}||
    if (!std::isfinite(est)) return 0.0;
    x = w / w.norm();
    if (it > 2 && std::abs(est - prev) <= 1e-13 * est) break;
  }
  return 1.0 / est;
}

}  // namespace specloc::numerics
