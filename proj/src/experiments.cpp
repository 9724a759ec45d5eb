#include "specloc/experiments.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>
#include <string>

#include "specloc/contours.hpp"
#include "specloc/numerics.hpp"
#include "specloc/projections.hpp"
#include "specloc/subordination.hpp"

namespace specloc::experiments {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kTwoPi = 2.0 * kPi;

std::vector<double> random_thetas(std::mt19937_64& rng, std::size_t rays) {
  std::uniform_real_distribution<double> angle(0.0, kTwoPi);
  while (true) {
    std::vector<double> t(rays);
    for (auto& x : t) x = angle(rng);
    std::sort(t.begin(), t.end());
    double sep = kTwoPi;
    for (std::size_t j = 0; j < rays; ++j) {
      const double next = (j + 1 < rays) ? t[j + 1] : t[0] + kTwoPi;
      sep = std::min(sep, next - t[j]);
    }
    if (rays == 1 || sep >= 0.25) return t;
  }
}

}  // namespace

EnclosureInstance enclosure_instance(std::uint64_t seed) {
  static const Eigen::Index dims[] = {16, 32, 64};
  static const double ps[] = {0.0, 0.3, 0.5, 0.7};
  const Eigen::Index n = dims[seed % 3];
  const double p = ps[(seed / 3) % 4];
  const std::size_t rays = 1 + static_cast<std::size_t>((seed / 12) % 4);

  std::mt19937_64 rng(operators::split_seed(seed, 0));
  operators::RaySpectrumSpec spec;
  const auto thetas = random_thetas(rng, rays);
  std::uniform_real_distribution<double> cDist(0.5, 2.0);
  std::uniform_real_distribution<double> qDist(1.0, 2.0);
  std::uniform_real_distribution<double> jitter(-0.05, 0.05);
  for (std::size_t j = 0; j < rays; ++j) {
    const auto count = static_cast<std::size_t>(n) / rays + (j < static_cast<std::size_t>(n) % rays ? 1 : 0);
    const double c = cDist(rng);
    const double q = qDist(rng);
    operators::Ray ray{thetas[j], {}};
    for (std::size_t k = 1; k <= count; ++k)
      ray.radii.push_back(c * std::pow(static_cast<double>(k), q) * (1.0 + jitter(rng)));
    std::sort(ray.radii.begin(), ray.radii.end());
    spec.rays.push_back(std::move(ray));
  }
  std::uniform_real_distribution<double> scale(0.25, 2.0);
  const ComplexMatrix G = operators::build_normal(spec);
  const ComplexMatrix S = operators::build_perturbation(
      operators::RandomGaussianPerturbation{operators::split_seed(seed, 1), scale(rng)}, n);
  EnclosureInstance inst;
  inst.seed = seed;
  inst.system = operators::assemble(G, S, p, spec);
  return inst;
}

double alpha_for(double b, double factor) { return b > 0.0 ? factor * b : b + 0.1; }

double default_psi(double phiMinus, double phiPlus) {
  return std::min(0.5 * std::min(phiPlus, -phiMinus), kPi / 4.0);
}

CertifiedSetup certified_setup(const std::vector<double>& thetas, double b, double p, double alphaFactor,
                               std::optional<double> epsilon, std::optional<double> psi) {
  CertifiedSetup s;
  s.b = b;
  s.alpha = alpha_for(b, alphaFactor);
  s.epsilon = epsilon.value_or((b / s.alpha + 1.0) / 2.0);
  s.thetas = thetas;
  std::sort(s.thetas.begin(), s.thetas.end());
  const auto half = enclosure::neighbour_half_angles(s.thetas);
  for (const auto& [phiMinus, phiPlus] : half) {
    const double ps = psi.value_or(default_psi(phiMinus, phiPlus));
    s.psi.push_back(ps);
    s.parts.push_back(enclosure::certified_r0_parts(b, p, s.alpha, s.epsilon, ps, phiMinus, phiPlus));
    s.r0 = std::max(s.r0, s.parts.back().r0);
  }
  s.region = enclosure::build_enclosure(s.thetas, s.alpha, p, s.r0);
  return s;
}

EnclosureOutcome run_enclosure_case(std::uint64_t seed, double alphaFactor) {
  const auto inst = enclosure_instance(seed);
  const auto& sys = inst.system;
  EnclosureOutcome out;
  out.seed = seed;
  out.n = sys.dimension();
  out.p = sys.p;
  out.rays = sys.raySpec.rays.size();

  subordination::BoundOptions opts;
  opts.seed = operators::split_seed(seed, 2);
  opts.gridOracle = false;
  const auto sub = subordination::subordination_bound(sys.S, sys.G, sys.p, opts);
  out.b = sub.bound;
  out.bConverged = sub.converged;

  const auto setup = certified_setup(sys.raySpec.sorted_thetas(), out.b, sys.p, alphaFactor);
  out.alpha = setup.alpha;
  out.r0 = setup.r0;
  const auto eigs = numerics::eigenvalues(sys.T);
  const auto rep = enclosure::verify_spectrum_enclosure(eigs, setup.region);
  out.allInside = rep.allInside;
  out.violators = rep.violators.size();
  for (const auto& v : rep.violators) out.maxViolation = std::max(out.maxViolation, v.distance);

  const auto negative =
      enclosure::build_enclosure(sys.raySpec.sorted_thetas(), alpha_for(out.b, 0.5), sys.p, 0.0);
  out.negativeViolators = enclosure::verify_spectrum_enclosure(eigs, negative).violators.size();
  return out;
}

ProjectionInstance projection_instance(std::uint64_t seed) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    std::mt19937_64 rng(operators::split_seed(seed, 100 + attempt));
    std::uniform_real_distribution<double> angle(0.0, kTwoPi);
    ProjectionInstance inst;
    inst.seed = seed;
    const Eigen::Index n = 8 + static_cast<Eigen::Index>(seed % 25);
    inst.theta = angle(rng);
    inst.p = (seed / 25) % 2 == 0 ? 0.0 : 0.5;
    operators::RaySpectrumSpec spec;
    spec.rays.push_back({inst.theta, {}});
    for (Eigen::Index k = 1; k <= n; ++k) spec.rays[0].radii.push_back(static_cast<double>(k));
    const ComplexMatrix G = operators::build_normal(spec);
    const ComplexMatrix S = operators::build_perturbation(
        operators::RandomGaussianPerturbation{operators::split_seed(seed, 200 + attempt), 0.15}, n);
    inst.system = operators::assemble(G, S, inst.p, spec);

    // Cut points between consecutive radii, always including both ends.
    std::vector<Eigen::Index> cuts = {0, n};
    std::uniform_int_distribution<Eigen::Index> pick(1, n - 1);
    for (int i = 0; i < 3; ++i) cuts.push_back(pick(rng));
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    for (Eigen::Index c : cuts) inst.abscissas.push_back(static_cast<double>(c) + 0.5);

    inst.eigenvectorCondition = numerics::eig(inst.system.T).conditionEstimate;
    if (inst.eigenvectorCondition < 1e4) return inst;
  }
}

bool in_gap_region(Complex z, double xLeft, double xRight, double alpha, double p, double theta) {
  const Complex w = std::conj(operators::unit_direction(theta)) * z;
  if (!(w.real() > xLeft && w.real() < xRight)) return false;
  const double h = p == 0.0 ? alpha : alpha * std::pow(w.real(), p);
  return std::abs(w.imag()) < h;
}

ProjectionOutcome run_projection_case(std::uint64_t seed, double tol) {
  const auto inst = projection_instance(seed);
  ProjectionOutcome out;
  out.seed = seed;
  out.n = inst.system.dimension();
  out.eigenvectorCondition = inst.eigenvectorCondition;
  projections::RieszOptions opts;
  opts.tol = tol;
  const numerics::SchurResolvent R(inst.system.T);
  out.minMargin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < inst.abscissas.size(); ++k) {
    const double xl = inst.abscissas[k];
    const double xr = inst.abscissas[k + 1];
    const auto contour = contours::gap_contour(xl, xr, inst.alpha, inst.p, inst.theta);
    const auto res = projections::riesz_projection(R, contour, opts);
    const ComplexMatrix oracle = projections::spectral_projector_oracle(
        inst.system.T, [&](Complex z) { return in_gap_region(z, xl, xr, inst.alpha, inst.p, inst.theta); });
    out.maxDifference = std::max(out.maxDifference, numerics::operator_norm(res.P - oracle));
    out.minMargin = std::min(out.minMargin, res.margin);
    out.maxNodes = std::max(out.maxNodes, res.nodes);
    ++out.contours;
  }
  out.pass = out.maxDifference <= 1e-7;
  return out;
}

unsigned thread_count() {
  if (const char* env = std::getenv("SPECLOC_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace specloc::experiments
