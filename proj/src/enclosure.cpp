#include "specloc/enclosure.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace specloc::enclosure {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kTwoPi = 2.0 * kPi;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Smallest r with cond(r), given that cond is monotone and cond(guess) should
// hold up to rounding.
double settle(double guess, const std::function<bool(double)>& cond) {
  if (guess <= 0.0) return 0.0;
  if (cond(guess)) return guess;
  double lo = guess;
  double hi = guess * 2.0;
  int guard = 0;
  while (!cond(hi)) {
    lo = hi;
    hi *= 2.0;
    if (++guard > 200) throw ConvergenceError("certified_r0: condition never satisfied", hi);
  }
  while (hi - lo > 1e-9 * hi) {
    const double mid = 0.5 * (lo + hi);
    (cond(mid) ? hi : lo) = mid;
  }
  return hi;
}

void fail(const std::string& what) { throw InputError("certified_r0: requires " + what); }

Complex to_lobe(const Lobe& lobe, Complex z) { return std::conj(operators::unit_direction(lobe.theta)) * z; }

bool in_lobe(const Lobe& lobe, Complex z) {
  const Complex w = to_lobe(lobe, z);
  const double x = w.real();
  if (x < 0.0) return false;
  return std::abs(w.imag()) <= lobe.alpha * std::pow(x, lobe.p);
}

// Distance from w (lobe coordinates) to {x >= 0, |y| <= alpha x^p}.
double lobe_distance(const Lobe& lobe, Complex w) {
  const double wx = w.real();
  const double wy = std::abs(w.imag());
  if (wx >= 0.0 && wy <= lobe.alpha * std::pow(wx, lobe.p)) return 0.0;
  double best = kInf;
  if (lobe.p == 0.0) return std::hypot(std::max(0.0, -wx), std::max(0.0, wy - lobe.alpha));
  auto f = [&](double x) { return std::hypot(x - wx, lobe.alpha * std::pow(x, lobe.p) - wy); };
  const double X = 2.0 * std::abs(w) + 1.0;
  const int grid = 2000;
  int kBest = 0;
  for (int k = 0; k <= grid; ++k) {
    const double v = f(X * k / grid);
    if (v < best) {
      best = v;
      kBest = k;
    }
  }
  double a = X * std::max(0, kBest - 1) / grid;
  double b = X * std::min(grid, kBest + 1) / grid;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 100; ++it) {
    const double x1 = b - g * (b - a);
    const double x2 = a + g * (b - a);
    if (f(x1) < f(x2)) b = x2; else a = x1;
  }
  return std::min(best, f(0.5 * (a + b)));
}

double relative_slack(double bound, double value) {
  if (bound == 0.0) return value == 0.0 ? 0.0 : -kInf;
  return (bound - value) / bound;
}

}  // namespace

R0Parts certified_r0_parts(double b, double p, double alpha, double epsilon, double psi,
                           double phiMinus, double phiPlus) {
  if (!(b >= 0.0) || !std::isfinite(b)) fail("finite b >= 0");
  if (!(p >= 0.0 && p < 1.0)) fail("0 <= p < 1");
  if (!(b < alpha)) fail("b < alpha");
  if (!(b / alpha < epsilon)) fail("b/alpha < epsilon");
  if (!(epsilon < 1.0)) fail("epsilon < 1");
  if (!(phiMinus >= -kPi && phiMinus < 0.0)) fail("-pi <= phiMinus < 0");
  if (!(phiPlus > 0.0 && phiPlus <= kPi)) fail("0 < phiPlus <= pi");
  if (!(psi > 0.0)) fail("psi > 0");
  if (!(psi < std::min({-phiMinus, phiPlus, kPi / 2.0}))) fail("psi < min(-phiMinus, phiPlus, pi/2)");

  R0Parts out;
  if (b == 0.0) return out;
  const double e = 1.0 / (1.0 - p);

  if (phiPlus > kPi / 2.0 || phiMinus < -kPi / 2.0) {
    auto cond = [&](double r) { return std::pow(2.0, p) * b * std::pow(r, p - 1.0) <= epsilon; };
    out.outer = settle(std::pow(std::pow(2.0, p) * b / epsilon, e), cond);
  }

  const double s = std::sin(psi);
  {
    const double k = b * std::pow(1.0 + 1.0 / s, p);
    auto cond = [&](double r) { return k * std::pow(r * s, p - 1.0) <= epsilon; };
    out.sector = settle(std::pow(k / epsilon, e) / s, cond);
  }

  if (p > 0.0) {
    const double c = std::cos(psi);
    auto cond = [&](double r) {
      const double d = alpha * std::pow(r * c, p);
      return 2.0 * b * std::pow(d, p - 1.0) + b / alpha <= epsilon;
    };
    const double base = 2.0 * b * std::pow(alpha, p - 1.0) / (epsilon - b / alpha);
    out.strip = settle(std::pow(base, 1.0 / (p * (1.0 - p))) / c, cond);
  }

  out.r0 = std::max({out.outer, out.sector, out.strip});
  return out;
}

double certified_r0(double b, double p, double alpha, double epsilon, double psi, double phiMinus,
                    double phiPlus) {
  return certified_r0_parts(b, p, alpha, epsilon, psi, phiMinus, phiPlus).r0;
}

std::vector<std::pair<double, double>> neighbour_half_angles(std::vector<double> thetas) {
  std::sort(thetas.begin(), thetas.end());
  const std::size_t n = thetas.size();
  std::vector<std::pair<double, double>> out(n);
  if (n == 1) {
    out[0] = {-kPi, kPi};
    return out;
  }
  for (std::size_t j = 0; j < n; ++j) {
    const double next = (j + 1 < n) ? thetas[j + 1] : thetas[0] + kTwoPi;
    const double prev = (j > 0) ? thetas[j - 1] : thetas[n - 1] - kTwoPi;
    out[j] = {(prev - thetas[j]) / 2.0, (next - thetas[j]) / 2.0};
  }
  return out;
}

EnclosureRegion build_enclosure(const std::vector<double>& thetas, double alpha, double p, double r0) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InputError("build_enclosure: alpha must be > 0");
  if (!(p >= 0.0 && p < 1.0)) throw InputError("build_enclosure: p must lie in [0, 1)");
  if (!(r0 >= 0.0)) throw InputError("build_enclosure: r0 must be >= 0");
  operators::RaySpectrumSpec check;
  for (double t : thetas) check.rays.push_back({t, {}});
  check.validate();

  std::vector<double> sorted = thetas;
  std::sort(sorted.begin(), sorted.end());
  const auto half = neighbour_half_angles(sorted);
  EnclosureRegion region;
  region.r0 = r0;
  for (std::size_t j = 0; j < sorted.size(); ++j) {
    Lobe lobe;
    lobe.theta = sorted[j];
    lobe.alpha = alpha;
    lobe.p = p;
    lobe.halfAngle = std::min({-half[j].first, half[j].second, kPi / 2.0});
    region.lobes.push_back(lobe);
  }
  return region;
}

EnclosureRegion refine(EnclosureRegion region, double b) {
  if (!(b >= 0.0)) throw InputError("refine: b must be >= 0");
  region.refined = true;
  region.b = b;
  return region;
}

bool refined_excluded(const EnclosureRegion& region, Complex z) {
  const double b = region.b;
  for (const auto& lobe : region.lobes) {
    const Complex w = to_lobe(lobe, z);
    const double x = w.real();
    const double ay = std::abs(w.imag());
    if (ay == 0.0 || x < 0.0) continue;
    if (std::atan2(ay, x) > lobe.halfAngle) continue;
    if (lobe.p == 0.0) {
      if (b < ay) return true;
      continue;
    }
    if (b == 0.0) return true;
    const double radicand = 1.0 - 2.0 * std::pow(b, 1.0 / lobe.p) * std::pow(ay, 1.0 - 1.0 / lobe.p);
    if (radicand <= 0.0) continue;
    if (x < std::pow(ay / b, 1.0 / lobe.p) * std::sqrt(radicand)) return true;
  }
  return false;
}

bool contains(const EnclosureRegion& region, Complex z) {
  bool inside = std::abs(z) <= region.r0;
  for (std::size_t j = 0; !inside && j < region.lobes.size(); ++j) inside = in_lobe(region.lobes[j], z);
  if (!inside) return false;
  if (region.refined && refined_excluded(region, z)) return false;
  return true;
}

double distance_to_region(const EnclosureRegion& region, Complex z) {
  double d = std::max(0.0, std::abs(z) - region.r0);
  for (const auto& lobe : region.lobes) {
    if (d == 0.0) break;
    d = std::min(d, lobe_distance(lobe, to_lobe(lobe, z)));
  }
  return d;
}

EnclosureReport verify_spectrum_enclosure(const std::vector<Complex>& eigenvalues,
                                          const EnclosureRegion& region) {
  EnclosureReport rep;
  rep.eigenvalues = eigenvalues;
  for (Complex z : eigenvalues) {
    if (!contains(region, z)) rep.violators.push_back({z, distance_to_region(region, z)});
  }
  rep.allInside = rep.violators.empty();
  return rep;
}

EnclosureReport verify_spectrum_enclosure(const operators::PerturbedSystem& system,
                                          const EnclosureRegion& region) {
  return verify_spectrum_enclosure(numerics::eigenvalues(system.T), region);
}

ResolventDiagnostic resolvent_diagnostic(const operators::PerturbedSystem& system, Complex z,
                                         double epsilon) {
  if (!(epsilon >= 0.0)) throw InputError("resolvent_diagnostic: epsilon must be >= 0");
  const Eigen::Index n = system.dimension();
  const ComplexMatrix I = ComplexMatrix::Identity(n, n);
  ResolventDiagnostic d;
  d.z = z;
  d.epsilonUsed = epsilon;
  const ComplexMatrix Gz = system.G - z * I;
  const double sg = numerics::sigma_min(Gz);
  if (sg < 1e-12) {
    std::ostringstream os;
    os << "resolvent_diagnostic: z = " << z << " is too close to the spectrum of G";
    throw SingularError(os.str(), sg);
  }
  d.distToSigmaG = sg;
  const ComplexMatrix RG = numerics::solve(Gz, I);
  d.normGresolvent = numerics::operator_norm(RG);
  d.normSGresolvent = numerics::operator_norm(system.S * RG);
  d.applicable = d.normSGresolvent <= epsilon && epsilon < 1.0;

  const ComplexMatrix Tz = system.T - z * I;
  const double st = numerics::sigma_min(Tz);
  d.inResolventSet = st > 0.0;
  d.normTresolvent = st > 0.0 ? 1.0 / st : kInf;
  d.normSTresolvent = kInf;
  if (d.inResolventSet) {
    try {
      d.normSTresolvent = numerics::operator_norm(system.S * numerics::solve(Tz, I));
    } catch (const SingularError&) {
      d.inResolventSet = false;
    }
  }
  if (d.applicable) {
    const double tBound = d.normGresolvent / (1.0 - epsilon);
    const double stBound = epsilon / (1.0 - epsilon);
    d.tSlack = relative_slack(tBound, d.normTresolvent);
    d.stSlack = relative_slack(stBound, d.normSTresolvent);
    d.tBoundHolds = d.inResolventSet && d.tSlack >= -1e-10;
    d.stBoundHolds = d.inResolventSet && d.stSlack >= -1e-10;
  }
  return d;
}

void write_lobe_csv(std::ostream& os, const EnclosureRegion& region, double xMax, int samples) {
  if (!(xMax > 0.0) || samples < 1) throw InputError("write_lobe_csv: need xMax > 0 and samples >= 1");
  os << "theta,x,y_upper,y_lower\n";
  os.precision(17);
  for (const auto& lobe : region.lobes) {
    for (int k = 0; k <= samples; ++k) {
      const double x = xMax * k / samples;
      const double y = lobe.alpha * std::pow(x, lobe.p);
      os << lobe.theta << ',' << x << ',' << y << ',' << -y << '\n';
    }
  }
}

}  // namespace specloc::enclosure
