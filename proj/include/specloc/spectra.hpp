#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "specloc/numerics.hpp"
#include "specloc/operators.hpp"

namespace specloc::spectra {

/// N(r, G): eigenvalues with |lambda| <= r, counted with multiplicity.
std::size_t count_radius(const operators::RaySpectrumSpec& spec, double r);

/// N_+(r1, r2, G) on the ray theta: radii in the open interval (r1, r2).
/// Throws InputError if theta is not one of the spec's ray angles or r1 > r2.
std::size_t count_interval(const operators::RaySpectrumSpec& spec, double theta, double r1, double r2);

/// N(K, G) for an arbitrary region given as a membership predicate.
std::size_t count_region(const std::vector<Complex>& eigenvalues,
                         const std::function<bool(Complex)>& region);

/// r_k = c k^q + d_k k^{q-1}
struct AsymptoticForm {
  double c = 1.0;
  double q = 1.0;
  std::vector<double> dTail;  // d_1, d_2, ...; missing entries are 0
};

struct GapSequenceModel {
  std::vector<double> radii;  // radii[i] is r_{i+1}
  double l = 0.0;
  double p = 0.0;
  std::optional<AsymptoticForm> asymptotic;
};

/// First `count` terms of the asymptotic form.
std::vector<double> asymptotic_radii(const AsymptoticForm& form, std::size_t count);

struct GapEntry {
  std::size_t k = 0;
  double lhs = 0.0;  // r_k + l r_k^p
  double rhs = 0.0;  // r_{k+1} - l r_{k+1}^p
  bool holds = false;
};

struct GapReport {
  std::vector<GapEntry> perIndex;
  /// Smallest k in the window from which every later entry holds.
  std::optional<std::size_t> firstHoldIndex;
  bool allHold() const;
};

/// Checks r_k + l r_k^p <= r_{k+1} - l r_{k+1}^p for k in [kFirst, kLast]
/// (1-based). Radii come from model.radii or, when that is empty, from the
/// asymptotic form. Throws InputError if the window needs radii that are missing.
GapReport check_gap_sequence(const GapSequenceModel& model, std::size_t kFirst, std::size_t kLast);

enum class GapVerdict { holdsEventually, boundaryHolds, fails };

std::string to_string(GapVerdict v);

/// Verdict for r_k = c k^q + o(k^{q-1}) with gap width l.
///
/// holdsEventually when p < 1 - 1/q, or p = 1 - 1/q and l < q c^{1/q} / 2.
/// At l = q c^{1/q} / 2 on the critical exponent the verdict is boundaryHolds,
/// which makes no claim. l = 0 reduces to monotonicity and always holds.
GapVerdict classify_asymptotic_gap(double c, double q, double l, double p);

/// Critical l for the exponent p = 1 - 1/q.
double critical_gap_width(double c, double q);

struct DensityCurve {
  std::vector<double> r;
  std::vector<double> ratio;    // N(r, G) / r^{1-p}
  std::vector<double> tailMin;  // min of ratio over grid points >= r
  /// Minimum of the ratio over the last decade [r_max/10, r_max] of the grid.
  /// A finite-truncation proxy for the liminf, not a limit.
  double proxy = 0.0;
};

/// Throws InputError unless rGrid is non-empty, positive and increasing.
DensityCurve liminf_density(const operators::RaySpectrumSpec& spec, double p,
                            const std::vector<double>& rGrid);

}  // namespace specloc::spectra
