#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <optional>
#include <functional>
#include <thread>
#include <vector>

#include "specloc/enclosure.hpp"
#include "specloc/operators.hpp"

namespace specloc::experiments {

/// Seeded random instance of the enclosure sweep: n in {16, 32, 64},
/// p in {0, 0.3, 0.5, 0.7} and 1 to 4 rays, cycled through by the seed.
struct EnclosureInstance {
  std::uint64_t seed = 0;
  operators::PerturbedSystem system;
};

EnclosureInstance enclosure_instance(std::uint64_t seed);

/// alpha = factor * b, or b + 0.1 when b = 0.
double alpha_for(double b, double factor);

/// Default psi for a ray: half the smaller neighbour half-angle, capped at pi/4.
double default_psi(double phiMinus, double phiPlus);

struct CertifiedSetup {
  double b = 0.0;
  double alpha = 0.0;
  double epsilon = 0.0;
  std::vector<double> thetas;  // ascending
  std::vector<double> psi;
  std::vector<enclosure::R0Parts> parts;
  double r0 = 0.0;
  enclosure::EnclosureRegion region;
};

/// Enclosure with alpha from alphaFactor, epsilon = (b/alpha + 1)/2 unless
/// given, psi per ray from default_psi unless given, and r0 the max of the
/// per-ray certified radii.
CertifiedSetup certified_setup(const std::vector<double>& thetas, double b, double p, double alphaFactor,
                               std::optional<double> epsilon = std::nullopt,
                               std::optional<double> psi = std::nullopt);

struct EnclosureOutcome {
  std::uint64_t seed = 0;
  Eigen::Index n = 0;
  double p = 0.0;
  std::size_t rays = 0;
  double b = 0.0;
  bool bConverged = false;
  double alpha = 0.0;
  double r0 = 0.0;
  std::size_t violators = 0;
  double maxViolation = 0.0;
  bool allInside = false;
  std::size_t negativeViolators = 0;  // alpha = 0.5 b, r0 = 0
};

EnclosureOutcome run_enclosure_case(std::uint64_t seed, double alphaFactor = 1.1);

/// Seeded diagonalizable system for the projection suite: one ray, radii
/// 1, 2, ..., n (n from 8 to 32), a Gaussian perturbation of norm 0.15 and
/// gap contours at a few random half-integer abscissas. Draws are repeated
/// until the eigenvector condition is below 1e4.
struct ProjectionInstance {
  std::uint64_t seed = 0;
  operators::PerturbedSystem system;
  double theta = 0.0;
  double alpha = 0.4;
  double p = 0.0;
  std::vector<double> abscissas;
  double eigenvectorCondition = 1.0;
};

ProjectionInstance projection_instance(std::uint64_t seed);

/// In the closed gap region {xLeft < x < xRight, |y| < alpha x^p} after rotating by e^{-i theta}.
bool in_gap_region(Complex z, double xLeft, double xRight, double alpha, double p, double theta);

struct ProjectionOutcome {
  std::uint64_t seed = 0;
  Eigen::Index n = 0;
  std::size_t contours = 0;
  double maxDifference = 0.0;  // max over contours of ||P - P_oracle||
  double minMargin = 0.0;
  std::size_t maxNodes = 0;
  double eigenvectorCondition = 1.0;
  bool pass = false;           // maxDifference <= 1e-7
};

ProjectionOutcome run_projection_case(std::uint64_t seed, double tol = 1e-10);

/// Worker count from SPECLOC_THREADS (default: hardware concurrency, at least 1).
unsigned thread_count();

/// out[i] = fn(i) for i < count, computed on up to `threads` workers. The
/// result order never depends on scheduling.
template <class R>
std::vector<R> parallel_map(std::size_t count, const std::function<R(std::size_t)>& fn, unsigned threads) {
  std::vector<R> out(count);
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < count; i += threads) out[i] = fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace specloc::experiments
