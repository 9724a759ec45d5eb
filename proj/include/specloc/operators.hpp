#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "specloc/numerics.hpp"

namespace specloc::operators {

/// One ray e^{i theta} R_{>=0} carrying eigenvalues theta-rotated radii.
/// Multiplicity is expressed by repeating a radius.
struct Ray {
  double theta = 0.0;
  std::vector<double> radii;
};

/// Spectrum of a diagonal normal operator located on finitely many rays.
struct RaySpectrumSpec {
  std::vector<Ray> rays;

  std::size_t dimension() const;
  /// Throws InputError on duplicate angles, angles outside [0, 2pi),
  /// negative or non-finite radii.
  void validate() const;
  /// Ray angles in ascending order.
  std::vector<double> sorted_thetas() const;
};

/// e^{i theta}; exact for multiples of pi/2.
Complex unit_direction(double theta);

struct DensePerturbation {
  ComplexMatrix entries;
};
struct RandomGaussianPerturbation {
  std::uint64_t seed = 0;
  double scale = 1.0;
};
struct BandedPerturbation {
  int bandwidth = 1;
  std::uint64_t seed = 0;
  double scale = 1.0;
};
/// S = [[0, B], [C, 0]] with B: n1 x n2 and C: n2 x n1.
struct OffDiagonalBlockPerturbation {
  ComplexMatrix B;
  ComplexMatrix C;
};

using PerturbationSpec = std::variant<DensePerturbation, RandomGaussianPerturbation,
                                      BandedPerturbation, OffDiagonalBlockPerturbation>;

/// The central object: T = G + S with G normal.
struct PerturbedSystem {
  ComplexMatrix G;
  ComplexMatrix S;
  ComplexMatrix T;
  double p = 0.0;
  std::optional<double> b;  // filled by the subordination module
  RaySpectrumSpec raySpec;

  Eigen::Index dimension() const { return T.rows(); }
};

ComplexMatrix build_normal(const RaySpectrumSpec& spec);

/// Deterministic given the seed. Random kinds are rescaled so ||S|| = scale.
ComplexMatrix build_perturbation(const PerturbationSpec& spec, Eigen::Index n);

/// Complex Gaussian matrix (independent N(0,1) real and imaginary parts).
ComplexMatrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed);

/// T = G + S. The ray description is read off the diagonal of G, which must
/// then be diagonal.
PerturbedSystem assemble(const ComplexMatrix& G, const ComplexMatrix& S, double p);

/// T = G + S with an explicit ray description (G need not be diagonal).
PerturbedSystem assemble(const ComplexMatrix& G, const ComplexMatrix& S, double p,
                         RaySpectrumSpec raySpec);

/// Groups the diagonal of a diagonal matrix into rays. Zero entries go to the
/// first ray (or to theta = 0 when every entry is zero).
RaySpectrumSpec ray_spec_from_values(const std::vector<Complex>& values, double angleTol = 1e-12);

/// Counter-based seed splitter (SplitMix64 finaliser).
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t counter);

}  // namespace specloc::operators
