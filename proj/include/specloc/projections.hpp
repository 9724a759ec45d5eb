#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "specloc/contours.hpp"
#include "specloc/numerics.hpp"
#include "specloc/operators.hpp"

namespace specloc::projections {

struct RieszOptions {
  double tol = 1e-8;
  std::size_t maxNodes = std::size_t{1} << 20;
  double marginGate = 1e-8;
};

struct RieszResult {
  ComplexMatrix P;
  double idempotencyResidual = 0.0;  // ||P^2 - P||
  double changeResidual = 0.0;       // ||P_2N - P_N|| at the last doubling
  double margin = 0.0;               // min_resolvent_margin on the initial nodes
  std::size_t nodes = 0;             // nodes of the final rule
  int nodesPerSegment = 0;
};

/// P = (i / 2 pi) sum_nodes w (T - z)^{-1}.
///
/// The rule is doubled (old nodes are reused) until both ||P^2 - P|| and the
/// change between consecutive rules are <= tol. Throws ContourError when the
/// margin is below the gate and ConvergenceError when maxNodes is reached.
RieszResult riesz_projection(const ComplexMatrix& T, const contours::Contour& contour,
                             const RieszOptions& options = {});

RieszResult riesz_projection(const numerics::SchurResolvent& T, const contours::Contour& contour,
                             const RieszOptions& options = {});

/// V diag(1_region(lambda)) V^{-1} from eig(T).
///
/// Eigenvalues closer than 1e-8 form a cluster that must lie entirely in or
/// out of the region; an eigenvalue whose membership changes under a 1e-8
/// displacement straddles the boundary. Both raise AmbiguityError. All-in and
/// all-out give I and 0 without inverting V.
ComplexMatrix spectral_projector_oracle(const ComplexMatrix& T,
                                        const std::function<bool(Complex)>& region);

/// Number of singular values above 0.5.
int projection_rank(const ComplexMatrix& P);

struct FamilyMember {
  ComplexMatrix P;
  std::string label;
  double idempotencyResidual = 0.0;
  int rank = 0;
  double xLeft = 0.0;
  double xRight = 0.0;
  std::size_t nodes = 0;
};

struct ProjectionFamily {
  std::vector<FamilyMember> projections;
  double crossTalk = 0.0;    // max_{j != k} ||P_j P_k||
  double sumResidual = 0.0;  // ||sum P_k - I||
};

/// Fills crossTalk and sumResidual.
void fill_family_diagnostics(ProjectionFamily& family);

/// One Riesz projection per gap contour between consecutive abscissas.
/// Throws ContourError naming the abscissa whose contour fails the margin gate.
ProjectionFamily family_from_gaps(const ComplexMatrix& T, const std::vector<double>& abscissas,
                                  double alpha, double p, double theta,
                                  const RieszOptions& options = {}, int nodesPerSegment = 32);

struct SumBound {
  double Chat = 0.0;    // sampled lower estimate
  double Cupper = 0.0;  // sum of norms
};

/// Probes are seeded unit pairs plus the top singular pairs of every member.
SumBound projection_sum_bound(const std::vector<ComplexMatrix>& family, int probeCount,
                              std::uint64_t seed);
SumBound projection_sum_bound(const ProjectionFamily& family, int probeCount, std::uint64_t seed);

struct RankComparison {
  std::size_t k = 0;
  int rankP = 0;
  int rankQ = 0;
  bool equal = false;
};

std::vector<RankComparison> compare_ranks(const ProjectionFamily& pFamily,
                                          const ProjectionFamily& qFamily);

struct HomotopyReport {
  std::vector<double> r;
  std::vector<int> ranks;
  double maxGateValue = 0.0;  // max over nodes of ||S (G - z)^{-1}||
  bool gateSatisfied = false; // maxGateValue <= epsilon < 1
  bool rankConstant = false;
};

/// Ranks of the Riesz projection of G + r S over the contour for each r.
HomotopyReport homotopy_ranks(const ComplexMatrix& G, const ComplexMatrix& S,
                              const contours::Contour& contour, double epsilon,
                              const std::vector<double>& rValues = {0.0, 0.25, 0.5, 0.75, 1.0},
                              const RieszOptions& options = {});

}  // namespace specloc::projections
