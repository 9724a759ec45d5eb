#pragma once

#include <cstdint>
#include <vector>

#include "specloc/numerics.hpp"

namespace specloc::rieszbasis {

/// Blocks are frames: matrices whose columns are an orthonormal basis of V_k.
struct SubspaceFamily {
  std::vector<ComplexMatrix> blocks;

  Eigen::Index ambient() const;
  Eigen::Index totalDim() const;
  /// Throws InputError on mismatched row counts, ||F^H F - I|| > 1e-12, or
  /// totalDim > ambient.
  void validate() const;
};

struct RieszBasisReport {
  double constant = 1.0;  // max(sigmaMaxW^2, sigmaMinW^-2)
  double sigmaMaxW = 0.0;
  double sigmaMinW = 0.0;
  bool complete = false;  // totalDim == ambient
  std::vector<Eigen::Index> blockDims;
};

/// Best constant c with c^{-1} sum ||x_k||^2 <= ||sum x_k||^2 <= c sum ||x_k||^2,
/// from the extreme singular values of the stacked frames W = [F_1 ... F_m].
RieszBasisReport riesz_constant(const SubspaceFamily& family);

/// Orthonormal basis of the range of P (singular values above 0.5).
ComplexMatrix range_frame(const ComplexMatrix& P);

SubspaceFamily family_from_projections(const std::vector<ComplexMatrix>& projections);

struct JoinCheck {
  double c0 = 1.0;        // outer constant
  double c1 = 1.0;        // max inner constant
  double combined = 1.0;  // constant of the refined family
  bool holds = false;     // combined <= c0 c1 (1 + 1e-8)
};

/// The combined family lists, in order, the refinement of outer.blocks[k]
/// into groupSizes[k] consecutive blocks. Throws InputError when the
/// dimensions do not add up or a group does not span its outer block.
JoinCheck join_constant_check(const SubspaceFamily& outer, const std::vector<double>& innerConstants,
                              const SubspaceFamily& combined, const std::vector<std::size_t>& groupSizes);

/// Riesz constant of each group of the combined family, taken inside its own span.
std::vector<double> inner_constants(const SubspaceFamily& combined, const std::vector<std::size_t>& groupSizes);

struct SignConstant {
  double C = 0.0;
  bool exhaustive = true;   // false: sampled lower estimate
  std::size_t patterns = 0;
};

/// max over sign vectors of ||sum eps_k P_k||. Exhaustive for m <= 12, else
/// 4096 seeded random patterns. Throws InputError if some ||P_j P_k|| > 1e-6.
SignConstant sign_pattern_constant(const std::vector<ComplexMatrix>& family, std::uint64_t seed = 0);

struct ProjectionEstimate {
  int probes = 0;
  bool lowerHolds = true;   // C^-2 sum ||P_k x||^2 <= ||sum P_k x||^2
  bool upperHolds = true;   // ||sum P_k x||^2 <= C^2 sum ||P_k x||^2
  double worstLowerSlack = 0.0;  // min relative slack over probes
  double worstUpperSlack = 0.0;
  double rieszConstant = 0.0;    // of the ranges
  double cUpper = 0.0;           // sum ||P_k||
  bool chainHolds = false;       // rieszConstant <= 4 cUpper^2
};

/// Two-sided estimate on seeded probes (relative slack tolerance 1e-9) and the
/// chain c <= 4 (sum ||P_k||)^2.
ProjectionEstimate verify_projection_estimate(const std::vector<ComplexMatrix>& family, double C,
                                              int probeCount, std::uint64_t seed);

/// Both sides of 2^m sum ||x_k||^2 = sum_eps ||sum eps_k x_k||^2 (m vectors, all
/// 2^m sign patterns).
std::pair<double, double> sign_sum_identity(const std::vector<ComplexVector>& xs);

}  // namespace specloc::rieszbasis
