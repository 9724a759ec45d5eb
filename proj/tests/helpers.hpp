#pragma once

#include <cmath>
#include <initializer_list>

#include "specloc/numerics.hpp"

namespace testutil {

using specloc::Complex;
using specloc::ComplexMatrix;

inline constexpr double kPi = 3.14159265358979323846264338327950288;

inline ComplexMatrix mat(std::initializer_list<std::initializer_list<Complex>> rows) {
  const auto r = static_cast<Eigen::Index>(rows.size());
  const auto c = static_cast<Eigen::Index>(rows.begin()->size());
  ComplexMatrix A(r, c);
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (Complex v : row) A(i, j++) = v;
    ++i;
  }
  return A;
}

inline ComplexMatrix diag(std::initializer_list<Complex> d) {
  ComplexMatrix A = ComplexMatrix::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
  Eigen::Index i = 0;
  for (Complex v : d) {
    A(i, i) = v;
    ++i;
  }
  return A;
}

inline double dist(const ComplexMatrix& A, const ComplexMatrix& B) { return specloc::numerics::operator_norm(A - B); }

}  // namespace testutil
