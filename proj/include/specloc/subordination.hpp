#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "specloc/numerics.hpp"

namespace specloc::subordination {

/// ||S u|| / (||u||^{1-p} ||G u||^p).
///
/// p = 0 gives ||S u|| / ||u||. For p > 0 and G u = 0 the value is 0 when
/// S u = 0 and +inf otherwise. S may be rectangular (rows != G.rows()).
/// Throws InputError for u = 0.
double subordination_ratio(const ComplexMatrix& S, const ComplexMatrix& G, double p,
                           const ComplexVector& u);

struct BoundOptions {
  int restarts = 64;           // seeded random starts
  int tGridPoints = 64;        // log-spaced starts from the pencil scan
  double stepTol = 1e-10;      // convergence of one ascent run
  int maxIterations = 5000;    // per ascent run
  std::uint64_t seed = 0;
  bool gridOracle = true;      // cross-check against the angular grid when n <= 3
  double oracleTol = 1e-4;     // relative agreement required from the oracle
};

struct SubordinationResult {
  double p = 0.0;
  double bound = 0.0;
  bool unbounded = false;                  // S does not vanish on ker G (p > 0)
  std::optional<ComplexVector> witness;    // unit vector with ratio == bound
  int restarts = 0;
  bool converged = false;
  std::optional<double> oracleBound;       // grid oracle value for n <= 3
};

/// The p-subordination bound of S to G, i.e. the supremum of
/// subordination_ratio over the unit sphere.
///
/// The supremum is a max-min problem: by the weighted AM-GM inequality
///   ||u||^{2(1-p)} ||Gu||^{2p} = min_{t>0} (1-p) t^p ||u||^2 + p t^{p-1} ||Gu||^2,
/// so b^2 = sup_t lambda_max(S^H S, M(t)) with M(t) = (1-p) t^p + p t^{p-1} G^H G.
/// Each ascent run alternates a power step on the pencil with the optimal t
/// for the current vector; both steps never decrease the ratio. Starts are
/// seeded random vectors plus top pencil vectors on a log grid of t.
SubordinationResult subordination_bound(const ComplexMatrix& S, const ComplexMatrix& G, double p,
                                        const BoundOptions& options = {});

/// Independent check for n <= 3: dense grid (>= 1e5 points) over
/// hyperspherical coordinates of the complex unit sphere modulo phase,
/// followed by compass-search refinement of the best grid points.
double subordination_grid_oracle(const ComplexMatrix& S, const ComplexMatrix& G, double p);

struct Violation {
  ComplexVector u;
  double ratio = 0.0;
};

/// Samples unit vectors and lists those with ||Su|| > b (1 + 1e-9) ||u||^{1-p} ||Gu||^p.
std::vector<Violation> verify_bound(const ComplexMatrix& S, const ComplexMatrix& G, double p,
                                    double b, int sampleCount, std::uint64_t seed);

}  // namespace specloc::subordination
