#pragma once

#include <vector>

#include "specloc/numerics.hpp"
#include "specloc/operators.hpp"

namespace specloc::blockop {

/// T = [[A, B], [C, D]] with G = diag(A, D) and S = [[0, B], [C, 0]].
///
/// A and D must be normal (||X X^H - X^H X|| <= 1e-10 (1 + ||X||^2)); every
/// eigenvalue of A and D must lie on one of the declared ray angles within
/// 1e-10 (1 + |lambda|). Throws InputError otherwise.
operators::PerturbedSystem assemble_block(const ComplexMatrix& A, const ComplexMatrix& B,
                                          const ComplexMatrix& C, const ComplexMatrix& D, double p,
                                          const std::vector<double>& rayThetas);

struct HamiltonianModel {
  std::vector<double> rSeq;  // eigenvalues i r_k of A
  ComplexMatrix B;
  ComplexMatrix C;
  double gamma = 1.0;
  double l = 1.0;
  double b = 0.0;  // max(||B||, ||C||), filled by build_hamiltonian
};

/// A = i diag(rSeq), G = diag(A, A), S = [[0, B], [C, 0]], p = 0, b = max(||B||, ||C||).
/// Checks self-adjointness (1e-12), B, C >= gamma, l > b and
/// r_{k+1} - r_k >= 2 l (offending k listed in the error). Fills model.b.
operators::PerturbedSystem build_hamiltonian(HamiltonianModel& model);

struct SymmetryReport {
  double j1SkewResidual = 0.0;                // ||(J1 T)^H + J1 T||
  std::vector<Complex> pairingDefects;        // no partner -conj(lambda) within tol
  std::vector<Complex> realPartFloorViolations;  // |Re lambda| < gamma - tol
  std::vector<Complex> discViolations;        // outside every disc |z - i r_k| <= b + tol
  std::vector<int> discCounts;                // eigenvalues per disc
  std::vector<bool> discSimple;               // eigenvalues in the disc pairwise > tol apart
  double eigenvectorCondition = 1.0;
  std::vector<Complex> eigenvalues;
  double minAbsRealPart = 0.0;
};

SymmetryReport verify_hamiltonian(const operators::PerturbedSystem& system, const HamiltonianModel& model,
                                  double tol);

/// r_1 - l, midpoints (r_k + r_{k+1}) / 2, r_n + l: abscissas of the gap
/// contours separating the discs (rotated onto the imaginary axis).
std::vector<double> gap_abscissas(const std::vector<double>& rSeq, double l);

}  // namespace specloc::blockop
