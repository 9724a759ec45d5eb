#include "specloc/cli.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "specloc/blockop.hpp"
#include "specloc/contours.hpp"
#include "specloc/enclosure.hpp"
#include "specloc/experiments.hpp"
#include "specloc/io.hpp"
#include "specloc/projections.hpp"
#include "specloc/rieszbasis.hpp"
#include "specloc/spectra.hpp"
#include "specloc/subordination.hpp"

namespace specloc::cli {

namespace {

using io::json;
using io::to_json;

constexpr double kPi = 3.14159265358979323846264338327950288;

struct Options {
  std::string input;
  std::string out;
  std::string points;
  std::uint64_t seed = 0;
  double tol = 1e-8;
  bool noTimestamp = false;
  std::optional<double> alphaFactor;
  std::optional<double> epsilon;
  std::optional<double> psi;
  std::string suite = "enclosure";
  std::string seeds = "0..199";
  std::string demo;
};

struct Outcome {
  json results = json::object();
  bool passed = true;
  std::string digest;
};

struct LoadedSpec {
  io::SystemSpecFile spec;
  std::string digest;
};

LoadedSpec load(const Options& o) {
  if (o.input.empty()) throw InputError("--input is required for this command");
  const std::string bytes = io::read_file(o.input);
  json j;
  try {
    j = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw InputError(o.input + ": malformed JSON: " + e.what());
  }
  return {io::parse_system_spec(j), io::sha256_hex(bytes)};
}

const operators::PerturbedSystem& need_system(const io::SystemSpecFile& s) {
  if (!s.system) throw InputError("spec: this command needs the G and S sections");
  return *s.system;
}

std::ofstream open_points(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw InputError("cannot write '" + path + "'");
  f << std::setprecision(17);
  return f;
}

void write_points(const std::string& path, const std::vector<Complex>& zs) {
  auto f = open_points(path);
  f << "re,im\n";
  for (Complex z : zs) f << z.real() << ',' << z.imag() << '\n';
}

std::string sibling(const std::string& path, const std::string& suffix) {
  std::filesystem::path p(path);
  return (p.parent_path() / (p.stem().string() + suffix)).string();
}

json nullable(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double max_modulus(const std::vector<Complex>& zs) {
  double m = 0.0;
  for (Complex z : zs) m = std::max(m, std::abs(z));
  return m;
}

subordination::SubordinationResult bound_of(const operators::PerturbedSystem& sys, std::uint64_t seed) {
  subordination::BoundOptions o;
  o.seed = seed;
  return subordination::subordination_bound(sys.S, sys.G, sys.p, o);
}

// ---------------------------------------------------------------- subord

Outcome cmd_subord(const Options& o) {
  const auto loaded = load(o);
  const auto& sys = need_system(loaded.spec);
  const auto r = bound_of(sys, operators::split_seed(o.seed, 0));
  Outcome out;
  out.digest = loaded.digest;
  auto& res = out.results;
  res["p"] = r.p;
  res["unbounded"] = r.unbounded;
  res["bound"] = r.unbounded ? json(nullptr) : json(r.bound);
  res["converged"] = r.converged;
  res["restarts"] = r.restarts;
  res["oracleBound"] = r.oracleBound ? json(*r.oracleBound) : json(nullptr);
  if (r.witness) res["witnessRatio"] = subordination::subordination_ratio(sys.S, sys.G, sys.p, *r.witness);
  if (!r.unbounded) {
    const auto viol = subordination::verify_bound(sys.S, sys.G, sys.p, r.bound, 2000, operators::split_seed(o.seed, 1));
    res["sampleCount"] = 2000;
    res["violations"] = viol.size();
    out.passed = viol.empty();
  }
  return out;
}

// ---------------------------------------------------------------- enclosure

Outcome cmd_enclosure(const Options& o) {
  const auto loaded = load(o);
  const auto& sys = need_system(loaded.spec);
  const auto sub = bound_of(sys, operators::split_seed(o.seed, 0));
  if (sub.unbounded) throw InputError("S is not p-subordinate to G (it does not vanish on ker G)");
  const auto thetas = sys.raySpec.sorted_thetas();
  const auto setup = experiments::certified_setup(thetas, sub.bound, sys.p, o.alphaFactor.value_or(1.1), o.epsilon, o.psi);
  const auto rep = enclosure::verify_spectrum_enclosure(sys, setup.region);

  Outcome out;
  out.digest = loaded.digest;
  auto& res = out.results;
  res["b"] = setup.b;
  res["bConverged"] = sub.converged;
  res["p"] = sys.p;
  res["alpha"] = setup.alpha;
  res["epsilon"] = setup.epsilon;
  res["r0"] = setup.r0;
  const auto half = enclosure::neighbour_half_angles(thetas);
  json rays = json::array();
  for (std::size_t j = 0; j < thetas.size(); ++j) {
    rays.push_back({{"theta", thetas[j]},
                    {"phiMinus", half[j].first},
                    {"phiPlus", half[j].second},
                    {"psi", setup.psi[j]},
                    {"outer", setup.parts[j].outer},
                    {"sector", setup.parts[j].sector},
                    {"strip", setup.parts[j].strip},
                    {"r0", setup.parts[j].r0}});
  }
  res["rays"] = rays;
  res["allInside"] = rep.allInside;
  json viol = json::array();
  for (const auto& v : rep.violators) viol.push_back({{"z", to_json(v.z)}, {"distance", v.distance}});
  res["violators"] = viol;
  res["eigenvalues"] = to_json(rep.eigenvalues);
  out.passed = rep.allInside;

  if (!o.points.empty()) {
    write_points(o.points, rep.eigenvalues);
    auto f = open_points(sibling(o.points, ".lobes.csv"));
    enclosure::write_lobe_csv(f, setup.region, 1.25 * std::max(setup.r0, max_modulus(rep.eigenvalues)) + 1.0, 200);
  }
  return out;
}

// ---------------------------------------------------------------- gaps

Outcome cmd_gaps(const Options& o) {
  const auto loaded = load(o);
  if (!loaded.spec.gaps) throw InputError("spec: the gaps command needs the gapModel section");
  const auto& sec = *loaded.spec.gaps;
  const auto rep = spectra::check_gap_sequence(sec.model, sec.kFirst, sec.kLast);

  Outcome out;
  out.digest = loaded.digest;
  auto& res = out.results;
  res["l"] = sec.model.l;
  res["p"] = sec.model.p;
  res["window"] = {sec.kFirst, sec.kLast};
  res["allHold"] = rep.allHold();
  res["firstHoldIndex"] = rep.firstHoldIndex ? json(*rep.firstHoldIndex) : json(nullptr);
  json failing = json::array();
  for (const auto& e : rep.perIndex)
    if (!e.holds) failing.push_back(e.k);
  res["failingIndices"] = failing;
  if (sec.model.asymptotic) {
    const auto& a = *sec.model.asymptotic;
    const auto v = spectra::classify_asymptotic_gap(a.c, a.q, sec.model.l, sec.model.p);
    res["asymptotic"] = {{"c", a.c},
                         {"q", a.q},
                         {"criticalExponent", 1.0 - 1.0 / a.q},
                         {"criticalGapWidth", spectra::critical_gap_width(a.c, a.q)},
                         {"verdict", spectra::to_string(v)}};
  }
  if (loaded.spec.system) {
    const auto& spec = loaded.spec.system->raySpec;
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (const auto& ray : spec.rays)
      for (double r : ray.radii)
        if (r > 0.0) {
          lo = std::min(lo, r);
          hi = std::max(hi, r);
        }
    if (hi > 0.0) {
      std::vector<double> grid;
      const int m = 64;
      for (int i = 0; i < m; ++i)
        grid.push_back(lo * std::pow(hi / lo, m == 1 ? 0.0 : static_cast<double>(i) / (m - 1)));
      grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
      const auto d = spectra::liminf_density(spec, sec.model.p, grid);
      res["density"] = {{"p", sec.model.p}, {"proxy", d.proxy}, {"rMax", hi}};
    }
  }
  if (!o.points.empty()) {
    auto f = open_points(o.points);
    f << "k,lhs,rhs,holds\n";
    for (const auto& e : rep.perIndex) f << e.k << ',' << e.lhs << ',' << e.rhs << ',' << (e.holds ? 1 : 0) << '\n';
  }
  return out;
}

// ---------------------------------------------------------------- project

json member_json(const projections::FamilyMember& m) {
  return {{"label", m.label},       {"xLeft", m.xLeft}, {"xRight", m.xRight},
          {"rank", m.rank},         {"idempotencyResidual", m.idempotencyResidual},
          {"nodes", m.nodes}};
}

Outcome cmd_project(const Options& o) {
  const auto loaded = load(o);
  const auto& sys = need_system(loaded.spec);
  if (!loaded.spec.projection) throw InputError("spec: the project command needs the projection section");
  const auto& sec = *loaded.spec.projection;
  projections::RieszOptions ro;
  ro.tol = o.tol;
  auto fam = projections::family_from_gaps(sys.T, sec.abscissas, sec.alpha, sec.p, sec.theta, ro);
  const auto bound = projections::projection_sum_bound(fam, 256, operators::split_seed(o.seed, 3));

  Outcome out;
  out.digest = loaded.digest;
  const double gate = std::max(1e-7, 10.0 * o.tol);
  json members = json::array();
  for (const auto& m : fam.projections) {
    json mj = member_json(m);
    try {
      const ComplexMatrix oracle = projections::spectral_projector_oracle(sys.T, [&](Complex z) {
        return experiments::in_gap_region(z, m.xLeft, m.xRight, sec.alpha, sec.p, sec.theta);
      });
      const double diff = numerics::operator_norm(m.P - oracle);
      mj["oracleDifference"] = diff;
      if (diff > gate) out.passed = false;
    } catch (const AmbiguityError& e) {
      mj["oracleDifference"] = nullptr;
      mj["oracleNote"] = e.what();
    }
    members.push_back(std::move(mj));
  }
  auto& res = out.results;
  res["theta"] = sec.theta;
  res["alpha"] = sec.alpha;
  res["p"] = sec.p;
  res["tol"] = o.tol;
  res["projections"] = members;
  res["crossTalk"] = fam.crossTalk;
  res["sumResidual"] = fam.sumResidual;
  res["Chat"] = bound.Chat;
  res["Cupper"] = bound.Cupper;

  if (!o.points.empty()) {
    auto f = open_points(o.points);
    bool header = true;
    for (std::size_t k = 0; k + 1 < sec.abscissas.size(); ++k) {
      const auto c = contours::gap_contour(sec.abscissas[k], sec.abscissas[k + 1], sec.alpha, sec.p, sec.theta);
      contours::write_nodes_csv(f, c.nodes, header);
      header = false;
    }
  }
  return out;
}

// ---------------------------------------------------------------- rieszconst

Outcome cmd_rieszconst(const Options& o) {
  const auto loaded = load(o);
  const auto& spec = loaded.spec;
  Outcome out;
  out.digest = loaded.digest;
  auto& res = out.results;
  if (!spec.frames.empty()) {
    rieszbasis::SubspaceFamily fam{spec.frames};
    const auto rep = rieszbasis::riesz_constant(fam);
    res["source"] = "frames";
    res["constant"] = nullable(rep.constant);
    res["sigmaMaxW"] = rep.sigmaMaxW;
    res["sigmaMinW"] = rep.sigmaMinW;
    res["complete"] = rep.complete;
    res["blockDims"] = rep.blockDims;
    return out;
  }
  std::vector<ComplexMatrix> ps = spec.projectors;
  res["source"] = "projections";
  if (ps.empty()) {
    if (!spec.system || !spec.projection)
      throw InputError("spec: rieszconst needs frames, projections, or G/S with a projection section");
    projections::RieszOptions ro;
    ro.tol = o.tol;
    const auto& sec = *spec.projection;
    const auto fam = projections::family_from_gaps(spec.system->T, sec.abscissas, sec.alpha, sec.p, sec.theta, ro);
    for (const auto& m : fam.projections) ps.push_back(m.P);
    res["source"] = "gapContours";
  }
  const Eigen::Index n = ps.front().rows();
  for (std::size_t k = 0; k < ps.size(); ++k)
    if (ps[k].rows() != n || ps[k].cols() != n)
      throw InputError("spec.projections[" + std::to_string(k) + "]: expected " + std::to_string(n) + "x" +
                       std::to_string(n));
  const auto ranges = rieszbasis::riesz_constant(rieszbasis::family_from_projections(ps));
  const auto sign = rieszbasis::sign_pattern_constant(ps, operators::split_seed(o.seed, 4));
  const auto est = rieszbasis::verify_projection_estimate(ps, sign.C, 10000, operators::split_seed(o.seed, 5));
  res["constant"] = nullable(ranges.constant);
  res["sigmaMaxW"] = ranges.sigmaMaxW;
  res["sigmaMinW"] = ranges.sigmaMinW;
  res["complete"] = ranges.complete;
  res["blockDims"] = ranges.blockDims;
  res["signConstant"] = {{"C", sign.C}, {"exhaustive", sign.exhaustive}, {"patterns", sign.patterns}};
  res["estimate"] = {{"probes", est.probes},
                     {"lowerHolds", est.lowerHolds},
                     {"upperHolds", est.upperHolds},
                     {"worstLowerSlack", est.worstLowerSlack},
                     {"worstUpperSlack", est.worstUpperSlack},
                     {"cUpper", est.cUpper},
                     {"chainHolds", est.chainHolds}};
  out.passed = est.lowerHolds && est.upperHolds && est.chainHolds;
  return out;
}

// ---------------------------------------------------------------- blockop

Outcome cmd_blockop(const Options& o) {
  const auto loaded = load(o);
  if (!loaded.spec.hamiltonian) throw InputError("spec: the blockop command needs the hamiltonian section");
  auto model = *loaded.spec.hamiltonian;
  const auto sys = blockop::build_hamiltonian(model);
  const auto sym = blockop::verify_hamiltonian(sys, model, 1e-8);

  // Gap contours on the imaginary axis: |Re z| <= l between consecutive discs.
  const auto xs = blockop::gap_abscissas(model.rSeq, model.l);
  projections::RieszOptions ro;
  ro.tol = o.tol;
  const auto pFam = projections::family_from_gaps(sys.T, xs, model.l, 0.0, kPi / 2, ro);
  const auto qFam = projections::family_from_gaps(sys.G, xs, model.l, 0.0, kPi / 2, ro);
  const auto ranks = projections::compare_ranks(pFam, qFam);

  Outcome out;
  out.digest = loaded.digest;
  auto& res = out.results;
  res["pairs"] = model.rSeq.size();
  res["b"] = model.b;
  res["l"] = model.l;
  res["gamma"] = model.gamma;
  res["j1SkewResidual"] = sym.j1SkewResidual;
  res["pairingDefects"] = to_json(sym.pairingDefects);
  res["realPartFloorViolations"] = to_json(sym.realPartFloorViolations);
  res["discViolations"] = to_json(sym.discViolations);
  res["discCounts"] = sym.discCounts;
  res["discSimple"] = sym.discSimple;
  res["eigenvectorCondition"] = nullable(sym.eigenvectorCondition);
  res["minAbsRealPart"] = sym.minAbsRealPart;
  res["eigenvalues"] = to_json(sym.eigenvalues);
  json rk = json::array();
  bool ranksEqual = true;
  for (const auto& r : ranks) {
    rk.push_back({{"k", r.k}, {"rankP", r.rankP}, {"rankQ", r.rankQ}, {"equal", r.equal}});
    ranksEqual = ranksEqual && r.equal;
  }
  res["ranks"] = rk;
  const double scale = 1.0 + numerics::operator_norm(sys.T);
  out.passed = sym.j1SkewResidual <= 1e-12 * scale && sym.pairingDefects.empty() &&
               sym.realPartFloorViolations.empty() && sym.discViolations.empty() && ranksEqual;
  if (!o.points.empty()) write_points(o.points, sym.eigenvalues);
  return out;
}

// ---------------------------------------------------------------- sweep

std::pair<std::uint64_t, std::uint64_t> parse_seed_range(const std::string& s) {
  const auto dots = s.find("..");
  try {
    std::size_t used = 0;
    if (dots == std::string::npos) {
      const auto v = std::stoull(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return {v, v};
    }
    const std::string a = s.substr(0, dots);
    const std::string b = s.substr(dots + 2);
    const auto lo = std::stoull(a, &used);
    if (used != a.size()) throw std::invalid_argument(s);
    const auto hi = std::stoull(b, &used);
    if (used != b.size()) throw std::invalid_argument(s);
    if (hi < lo) throw std::invalid_argument(s);
    return {lo, hi};
  } catch (const std::logic_error&) {
    throw InputError("--seeds: expected 'a..b' with a <= b, got '" + s + "'");
  }
}

Outcome cmd_sweep(const Options& o, std::ostream& table) {
  const auto [lo, hi] = parse_seed_range(o.seeds);
  const std::size_t count = static_cast<std::size_t>(hi - lo + 1);
  const double factor = o.alphaFactor.value_or(1.1);
  Outcome out;
  json params = {{"suite", o.suite}, {"seeds", {lo, hi}}, {"seed", o.seed}};
  json rows = json::array();
  std::size_t passed = 0;
  table << std::setprecision(4);

  if (o.suite == "enclosure") {
    params["alphaFactor"] = factor;
    const auto outcomes = experiments::parallel_map<experiments::EnclosureOutcome>(
        count, [&](std::size_t i) { return experiments::run_enclosure_case(lo + i, factor); },
        experiments::thread_count());
    std::size_t negHits = 0;
    table << "seed  n   p    rays  b          r0          violators  negative  verdict\n";
    for (const auto& e : outcomes) {
      rows.push_back({{"seed", e.seed},
                      {"n", e.n},
                      {"p", e.p},
                      {"rays", e.rays},
                      {"b", e.b},
                      {"bConverged", e.bConverged},
                      {"alpha", e.alpha},
                      {"r0", e.r0},
                      {"violators", e.violators},
                      {"maxViolation", e.maxViolation},
                      {"negativeViolators", e.negativeViolators},
                      {"pass", e.allInside}});
      passed += e.allInside ? 1 : 0;
      negHits += e.negativeViolators > 0 ? 1 : 0;
      table << std::left << std::setw(6) << e.seed << std::setw(4) << e.n << std::setw(5) << e.p << std::setw(6)
            << e.rays << std::setw(11) << e.b << std::setw(12) << e.r0 << std::setw(11) << e.violators
            << std::setw(10) << e.negativeViolators << (e.allInside ? "PASS" : "FAIL") << '\n';
    }
    out.results["negativeControlHitRate"] = static_cast<double>(negHits) / static_cast<double>(count);
  } else if (o.suite == "projection") {
    params["tol"] = o.tol;
    const double tol = std::min(o.tol, 1e-10);
    const auto outcomes = experiments::parallel_map<experiments::ProjectionOutcome>(
        count, [&](std::size_t i) { return experiments::run_projection_case(lo + i, tol); },
        experiments::thread_count());
    table << "seed  n   contours  maxDifference  minMargin  maxNodes  verdict\n";
    for (const auto& e : outcomes) {
      rows.push_back({{"seed", e.seed},
                      {"n", e.n},
                      {"contours", e.contours},
                      {"maxDifference", e.maxDifference},
                      {"minMargin", e.minMargin},
                      {"maxNodes", e.maxNodes},
                      {"eigenvectorCondition", e.eigenvectorCondition},
                      {"pass", e.pass}});
      passed += e.pass ? 1 : 0;
      table << std::left << std::setw(6) << e.seed << std::setw(4) << e.n << std::setw(10) << e.contours
            << std::setw(15) << e.maxDifference << std::setw(11) << e.minMargin << std::setw(10) << e.maxNodes
            << (e.pass ? "PASS" : "FAIL") << '\n';
    }
  } else {
    throw InputError("--suite: expected enclosure or projection, got '" + o.suite + "'");
  }
  table << passed << " of " << count << " instances passed\n";
  out.digest = io::sha256_hex(params.dump());
  out.results["suite"] = o.suite;
  out.results["seeds"] = {lo, hi};
  out.results["instances"] = count;
  out.results["passedCount"] = passed;
  out.results["rows"] = rows;
  out.passed = passed == count;
  return out;
}

// ---------------------------------------------------------------- demo

void lobe_samples(std::ostream& f, const enclosure::EnclosureRegion& region, double xMax, int samples) {
  for (const auto& lobe : region.lobes) {
    const Complex u = operators::unit_direction(lobe.theta);
    for (int i = 0; i <= samples; ++i) {
      const double x = xMax * i / samples;
      const double y = lobe.alpha * (lobe.p == 0.0 ? 1.0 : std::pow(x, lobe.p));
      const Complex up = u * Complex(x, y);
      const Complex dn = u * Complex(x, -y);
      f << "lobeUpper," << lobe.theta << ',' << up.real() << ',' << up.imag() << '\n';
      f << "lobeLower," << lobe.theta << ',' << dn.real() << ',' << dn.imag() << '\n';
    }
  }
  for (int i = 0; i < 4 * samples; ++i) {
    const double t = 2.0 * kPi * i / (4 * samples);
    f << "ball,0," << region.r0 * std::cos(t) << ',' << region.r0 * std::sin(t) << '\n';
  }
}

Outcome demo_figure2(const Options& o) {
  const std::vector<double> thetas = {kPi / 6, 5 * kPi / 6, 3 * kPi / 2};
  const double b = 1.0;
  const double p = 0.5;
  const auto setup = experiments::certified_setup(thetas, b, p, 1.5);
  Outcome out;
  auto& res = out.results;
  res["figure"] = "figure2";
  res["b"] = b;
  res["p"] = p;
  res["alpha"] = setup.alpha;
  res["epsilon"] = setup.epsilon;
  res["r0"] = setup.r0;
  res["thetas"] = thetas;
  res["psi"] = setup.psi;
  out.digest = io::sha256_hex(res.dump());
  if (!o.points.empty()) {
    auto f = open_points(o.points);
    f << "set,tag,re,im\n";
    lobe_samples(f, setup.region, 2.0 * setup.r0, 200);
  }
  return out;
}

Outcome demo_figure4(const Options& o) {
  // Two opposite rays carrying r_k = k^2, p = 1/2: the critical exponent of
  // this growth, so the gaps hold eventually iff alpha < 1.
  operators::RaySpectrumSpec spec;
  const int perRay = 16;
  for (double t : {0.0, kPi}) {
    operators::Ray ray{t, {}};
    for (int k = 1; k <= perRay; ++k) ray.radii.push_back(double(k) * k);
    spec.rays.push_back(ray);
  }
  const double p = 0.5;
  const auto n = static_cast<Eigen::Index>(spec.dimension());
  const ComplexMatrix G = operators::build_normal(spec);
  const ComplexMatrix S =
      operators::build_perturbation(operators::RandomGaussianPerturbation{operators::split_seed(o.seed, 40), 0.3}, n);
  const auto sys = operators::assemble(G, S, p, spec);
  const auto sub = bound_of(sys, operators::split_seed(o.seed, 41));
  // alpha below the critical width 1 keeps the gaps open from some k on.
  const double alpha = 0.9;
  const auto setup = experiments::certified_setup(spec.sorted_thetas(), sub.bound, p, alpha / sub.bound);
  const auto eigs = numerics::eigenvalues(sys.T);

  projections::RieszOptions ro;
  ro.tol = o.tol;
  const numerics::SchurResolvent R(sys.T);
  json rays = json::array();
  std::vector<contours::Contour> drawn;
  for (const auto& ray : spec.rays) {
    spectra::GapSequenceModel gm{ray.radii, setup.alpha, p, std::nullopt};
    const auto gaps = spectra::check_gap_sequence(gm, 1, ray.radii.size() - 1);
    std::vector<double> xs;
    if (gaps.firstHoldIndex) {
      for (std::size_t k = *gaps.firstHoldIndex; k < ray.radii.size(); ++k) {
        const double mid = 0.5 * (ray.radii[k - 1] + ray.radii[k]);
        if (mid > setup.r0) xs.push_back(mid);
      }
    }
    json contoursJson = json::array();
    for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
      const auto c = contours::gap_contour(xs[k], xs[k + 1], setup.alpha, p, ray.theta);
      const auto r = projections::riesz_projection(R, c, ro);
      contoursJson.push_back({{"xLeft", xs[k]},
                              {"xRight", xs[k + 1]},
                              {"rank", projections::projection_rank(r.P)},
                              {"margin", r.margin},
                              {"nodes", r.nodes}});
      drawn.push_back(c);
    }
    rays.push_back({{"theta", ray.theta}, {"abscissas", xs}, {"contours", contoursJson}});
  }

  Outcome out;
  auto& res = out.results;
  res["figure"] = "figure4";
  res["n"] = n;
  res["p"] = p;
  res["b"] = sub.bound;
  res["alpha"] = setup.alpha;
  res["epsilon"] = setup.epsilon;
  res["r0"] = setup.r0;
  res["criticalGapWidth"] = spectra::critical_gap_width(1.0, 2.0);
  res["rays"] = rays;
  res["eigenvalues"] = to_json(eigs);
  const auto rep = enclosure::verify_spectrum_enclosure(eigs, setup.region);
  res["allInside"] = rep.allInside;
  out.passed = rep.allInside;
  out.digest = io::sha256_hex(json{{"figure", "figure4"}, {"seed", o.seed}, {"tol", o.tol}}.dump());

  if (!o.points.empty()) {
    auto f = open_points(o.points);
    f << "set,tag,re,im\n";
    for (Complex z : eigs) f << "eigenvalue,0," << z.real() << ',' << z.imag() << '\n';
    for (std::size_t c = 0; c < drawn.size(); ++c)
      for (const auto& node : drawn[c].nodes) f << "contour," << c << ',' << node.z.real() << ',' << node.z.imag() << '\n';
    lobe_samples(f, setup.region, 1.1 * max_modulus(eigs), 200);
  }
  return out;
}

Outcome cmd_demo(const Options& o) {
  if (o.demo == "figure2") return demo_figure2(o);
  if (o.demo == "figure4") return demo_figure4(o);
  throw InputError("demo: expected figure2 or figure4, got '" + o.demo + "'");
}

// ---------------------------------------------------------------- driver

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--input", o.input, "system specification (JSON)");
  sub->add_option("--out", o.out, "report path (default: stdout)");
  sub->add_option("--points", o.points, "CSV point cloud path");
  sub->add_option("--seed", o.seed, "global seed");
  sub->add_option("--tol", o.tol, "projection tolerance")->check(CLI::PositiveNumber);
  sub->add_flag("--no-timestamp", o.noTimestamp, "omit wall time and timestamp");
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectral localisation lab for p-subordinate perturbations of normal operators", "specloc"};
  app.require_subcommand(1);
  Options o;

  auto* subord = app.add_subcommand("subord", "p-subordination bound of S to G");
  add_common(subord, o);
  auto* encl = app.add_subcommand("enclosure", "certified spectral enclosure and violators");
  add_common(encl, o);
  encl->add_option("--alpha-factor", o.alphaFactor, "alpha = factor * b")->check(CLI::PositiveNumber);
  encl->add_option("--epsilon", o.epsilon, "resolvent gate epsilon");
  encl->add_option("--psi", o.psi, "strip half-angle");
  auto* gaps = app.add_subcommand("gaps", "gap condition along a radius sequence");
  add_common(gaps, o);
  auto* project = app.add_subcommand("project", "Riesz projections over gap contours");
  add_common(project, o);
  auto* riesz = app.add_subcommand("rieszconst", "Riesz basis constants");
  add_common(riesz, o);
  auto* block = app.add_subcommand("blockop", "Hamiltonian block operator checks");
  add_common(block, o);
  auto* sweep = app.add_subcommand("sweep", "seeded experiment suites");
  add_common(sweep, o);
  sweep->add_option("--suite", o.suite, "enclosure or projection");
  sweep->add_option("--seeds", o.seeds, "inclusive seed range a..b");
  sweep->add_option("--alpha-factor", o.alphaFactor, "alpha = factor * b")->check(CLI::PositiveNumber);
  auto* demo = app.add_subcommand("demo", "built-in figure data");
  add_common(demo, o);
  demo->add_option("name", o.demo, "figure2 or figure4")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "specloc: " << e.what() << '\n';
    return 2;
  }

  const auto start = std::chrono::steady_clock::now();
  std::ostringstream table;
  Outcome result;
  std::string command;
  if (subord->parsed()) command = "subord", result = cmd_subord(o);
  else if (encl->parsed()) command = "enclosure", result = cmd_enclosure(o);
  else if (gaps->parsed()) command = "gaps", result = cmd_gaps(o);
  else if (project->parsed()) command = "project", result = cmd_project(o);
  else if (riesz->parsed()) command = "rieszconst", result = cmd_rieszconst(o);
  else if (block->parsed()) command = "blockop", result = cmd_blockop(o);
  else if (sweep->parsed()) command = "sweep", result = cmd_sweep(o, table);
  else command = "demo", result = cmd_demo(o);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  json report = {{"command", command},          {"schemaVersion", io::kSchemaVersion},
                 {"inputsDigest", result.digest}, {"seed", o.seed},
                 {"results", result.results},   {"passed", result.passed}};
  if (!o.noTimestamp) {
    report["wallTimeSeconds"] = seconds;
    report["timestamp"] = utc_timestamp();
  }
  io::validate_run_report(report);
  const std::string text = report.dump(2) + "\n";
  if (o.out.empty()) {
    out << text;
    err << table.str();
  } else {
    std::ofstream f(o.out, std::ios::binary);
    if (!f) throw InputError("cannot write '" + o.out + "'");
    f << text;
    out << table.str();
  }
  if (!result.passed) err << "specloc " << command << ": check failed\n";
  return result.passed ? 0 : 1;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err);
  } catch (const InputError& e) {
    err << "specloc: input error: " << e.what() << '\n';
    return 2;
  } catch (const json::exception& e) {
    err << "specloc: input error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "specloc: " << e.what() << '\n';
    return 1;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace specloc::cli
