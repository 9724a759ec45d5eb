#include "specloc/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace specloc::spectra {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

bool same_angle(double a, double b) {
  double d = std::abs(a - b);
  d = std::min(d, kTwoPi - d);
  return d <= 1e-12;
}

}  // namespace

std::size_t count_radius(const operators::RaySpectrumSpec& spec, double r) {
  if (!(r >= 0.0)) throw InputError("count_radius: r must be >= 0");
  std::size_t n = 0;
  for (const auto& ray : spec.rays)
    for (double x : ray.radii)
      if (x <= r) ++n;
  return n;
}

std::size_t count_interval(const operators::RaySpectrumSpec& spec, double theta, double r1, double r2) {
  if (!(r1 <= r2)) throw InputError("count_interval: r1 must not exceed r2");
  const auto it = std::find_if(spec.rays.begin(), spec.rays.end(),
                               [&](const operators::Ray& ray) { return same_angle(ray.theta, theta); });
  if (it == spec.rays.end()) {
    std::ostringstream os;
    os << "count_interval: theta = " << theta << " is not a ray of the spectrum";
    throw InputError(os.str());
  }
  std::size_t n = 0;
  for (double x : it->radii)
    if (x > r1 && x < r2) ++n;
  return n;
}

std::size_t count_region(const std::vector<Complex>& eigenvalues,
                         const std::function<bool(Complex)>& region) {
  return static_cast<std::size_t>(std::count_if(eigenvalues.begin(), eigenvalues.end(), region));
}

std::vector<double> asymptotic_radii(const AsymptoticForm& form, std::size_t count) {
  if (!(form.c > 0.0) || !(form.q >= 1.0)) throw InputError("asymptotic form needs c > 0 and q >= 1");
  std::vector<double> r(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double k = static_cast<double>(i + 1);
    const double d = i < form.dTail.size() ? form.dTail[i] : 0.0;
    r[i] = form.c * std::pow(k, form.q) + d * std::pow(k, form.q - 1.0);
  }
  return r;
}

bool GapReport::allHold() const {
  return std::all_of(perIndex.begin(), perIndex.end(), [](const GapEntry& e) { return e.holds; });
}

GapReport check_gap_sequence(const GapSequenceModel& model, std::size_t kFirst, std::size_t kLast) {
  if (!(model.p >= 0.0 && model.p < 1.0)) throw InputError("gap model: p must lie in [0, 1)");
  if (!(model.l >= 0.0)) throw InputError("gap model: l must be >= 0");
  if (kFirst < 1 || kLast < kFirst) throw InputError("gap model: index window must satisfy 1 <= kFirst <= kLast");
  std::vector<double> radii = model.radii;
  if (radii.empty()) {
    if (!model.asymptotic) throw InputError("gap model has neither radii nor an asymptotic form");
    radii = asymptotic_radii(*model.asymptotic, kLast + 1);
  }
  if (radii.size() < kLast + 1) {
    std::ostringstream os;
    os << "gap model: window ends at k = " << kLast << " but only " << radii.size() << " radii are given";
    throw InputError(os.str());
  }
  GapReport rep;
  rep.perIndex.reserve(kLast - kFirst + 1);
  for (std::size_t k = kFirst; k <= kLast; ++k) {
    const double a = radii[k - 1];
    const double b = radii[k];
    if (a < 0.0 || b < 0.0) throw InputError("gap model: radii must be >= 0");
    GapEntry e;
    e.k = k;
    e.lhs = a + model.l * std::pow(a, model.p);
    e.rhs = b - model.l * std::pow(b, model.p);
    e.holds = e.lhs <= e.rhs;
    rep.perIndex.push_back(e);
  }
  for (std::size_t i = rep.perIndex.size(); i-- > 0;) {
    if (!rep.perIndex[i].holds) break;
    rep.firstHoldIndex = rep.perIndex[i].k;
  }
  return rep;
}

std::string to_string(GapVerdict v) {
  switch (v) {
    case GapVerdict::holdsEventually: return "holdsEventually";
    case GapVerdict::boundaryHolds: return "boundaryHolds";
    default: return "fails";
  }
}

double critical_gap_width(double c, double q) { return q * std::pow(c, 1.0 / q) / 2.0; }

GapVerdict classify_asymptotic_gap(double c, double q, double l, double p) {
  if (!(c > 0.0) || !(q >= 1.0) || !(l >= 0.0) || !(p >= 0.0 && p < 1.0)) {
    throw InputError("classify_asymptotic_gap needs c > 0, q >= 1, l >= 0 and p in [0, 1)");
  }
  if (l == 0.0) return GapVerdict::holdsEventually;
  const double pc = 1.0 - 1.0 / q;
  const double ptol = 1e-12;
  if (p < pc - ptol) return GapVerdict::holdsEventually;
  if (p > pc + ptol) return GapVerdict::fails;
  const double lc = critical_gap_width(c, q);
  if (std::abs(l - lc) <= 1e-12 * lc) return GapVerdict::boundaryHolds;
  return l < lc ? GapVerdict::holdsEventually : GapVerdict::fails;
}

DensityCurve liminf_density(const operators::RaySpectrumSpec& spec, double p,
                            const std::vector<double>& rGrid) {
  if (!(p >= 0.0 && p < 1.0)) throw InputError("liminf_density: p must lie in [0, 1)");
  if (rGrid.empty()) throw InputError("liminf_density: empty grid");
  for (std::size_t i = 0; i < rGrid.size(); ++i) {
    if (!(rGrid[i] > 0.0) || (i > 0 && !(rGrid[i] > rGrid[i - 1]))) {
      throw InputError("liminf_density: grid must be positive and strictly increasing");
    }
  }
  std::vector<double> radii;
  for (const auto& ray : spec.rays) radii.insert(radii.end(), ray.radii.begin(), ray.radii.end());
  std::sort(radii.begin(), radii.end());

  DensityCurve out;
  out.r = rGrid;
  out.ratio.resize(rGrid.size());
  out.tailMin.resize(rGrid.size());
  for (std::size_t i = 0; i < rGrid.size(); ++i) {
    const auto n = std::upper_bound(radii.begin(), radii.end(), rGrid[i]) - radii.begin();
    out.ratio[i] = static_cast<double>(n) / std::pow(rGrid[i], 1.0 - p);
  }
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = rGrid.size(); i-- > 0;) {
    m = std::min(m, out.ratio[i]);
    out.tailMin[i] = m;
  }
  const double rStart = rGrid.back() / 10.0;
  out.proxy = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < rGrid.size(); ++i)
    if (rGrid[i] >= rStart) out.proxy = std::min(out.proxy, out.ratio[i]);
  return out;
}

}  // namespace specloc::spectra
