// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "specloc/blockop.hpp"
#include "specloc/cli.hpp"
#include "specloc/contours.hpp"
#include "specloc/enclosure.hpp"
#include "specloc/experiments.hpp"
#include "specloc/io.hpp"
#include "specloc/projections.hpp"
#include "specloc/rieszbasis.hpp"
#include "specloc/spectra.hpp"
#include "specloc/subordination.hpp"

using namespace specloc;

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

ComplexMatrix orthonormalize(const ComplexMatrix& A) {
  Eigen::HouseholderQR<ComplexMatrix> qr(A);
  return qr.householderQ() * ComplexMatrix::Identity(A.rows(), A.cols());
}

// max(sup r, 1 / inf r) for r = ||sum x_k||^2 / sum ||x_k||^2 over sampled
// decompositions, where the columns of W are orthonormal frames of the blocks.
double monte_carlo_ratio(const Eigen::MatrixXd& W, int samples, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(W);
  const Eigen::Index n = W.cols();
  double hi = 0.0, lo = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = g(rng);
    Eigen::VectorXd a = v, y = v;
    if (s % 2 == 0) y = W * a;
    else a = lu.solve(y);
    const double r = y.squaredNorm() / a.squaredNorm();
    hi = std::max(hi, r);
    lo = std::min(lo, r);
  }
  return std::max(hi, 1.0 / lo);
}

// ---------------------------------------------------------------- 1
Verdict projection_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto out = experiments::parallel_map<experiments::ProjectionOutcome>(
      100, [](std::size_t i) { return experiments::run_projection_case(i); }, experiments::thread_count());
  const double secs = seconds_since(t0);
  double worst = 0.0;
  int fails = 0;
  std::size_t contours = 0;
  for (const auto& o : out) {
    worst = std::max(worst, o.maxDifference);
    contours += o.contours;
    if (!o.pass) ++fails;
  }
  std::ostringstream os;
  os << contours << " contours, max diff " << worst << ", failing systems " << fails << ", " << secs << " s";
  return {fails == 0 && worst <= 1e-7 && secs < 60.0, os.str()};
}

// ---------------------------------------------------------------- 2
Verdict enclosure_sweep() {
  const auto out = experiments::parallel_map<experiments::EnclosureOutcome>(
      200, [](std::size_t i) { return experiments::run_enclosure_case(i, 1.1); }, experiments::thread_count());
  std::size_t violators = 0, hit = 0;
  for (const auto& o : out) {
    violators += o.violators;
    if (o.negativeViolators > 0) ++hit;
  }
  std::ostringstream os;
  os << "violators " << violators << " over 200 instances; negative control (alpha = 0.5 b) hit rate "
     << static_cast<double>(hit) / 200.0 << " (recorded, not gated)";
  return {violators == 0, os.str()};
}

// ---------------------------------------------------------------- 3
Verdict refined_boundary() {
  std::size_t rejected = 0, eigsTested = 0, eigRejected = 0;
  double minSigma = std::numeric_limits<double>::infinity();
  bool ok = true;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto inst = experiments::enclosure_instance(seed);
    const auto& sys = inst.system;
    subordination::BoundOptions bo;
    bo.seed = operators::split_seed(seed, 2);
    bo.gridOracle = false;
    const auto br = subordination::subordination_bound(sys.S, sys.G, sys.p, bo);
    if (br.unbounded) continue;
    const double b = br.bound;
    const auto setup = experiments::certified_setup(sys.raySpec.sorted_thetas(), b, sys.p, 1.1);
    const auto reg = enclosure::refine(setup.region, b);
    const double scale = 1.0 + numerics::operator_norm(sys.T);
    const Eigen::Index n = sys.dimension();
    const ComplexMatrix I = ComplexMatrix::Identity(n, n);

    // Eigenvalues of T must never be rejected.
    for (Complex lam : numerics::eigenvalues(sys.T)) {
      ++eigsTested;
      if (enclosure::refined_excluded(reg, lam)) ++eigRejected;
    }
    // Random points over a disc covering the spectrum.
    double R = 0.0;
    for (Complex lam : numerics::eigenvalues(sys.G)) R = std::max(R, std::abs(lam));
    R = 1.2 * R + 1.0;
    std::mt19937_64 rng(operators::split_seed(seed, 30));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
      const Complex z = std::polar(R * std::sqrt(u(rng)), 2.0 * kPi * u(rng));
      if (!enclosure::refined_excluded(reg, z)) continue;
      ++rejected;
      const double s = numerics::sigma_min(sys.T - z * I);
      minSigma = std::min(minSigma, s / scale);
      if (!(s > 1e-10 * scale)) ok = false;
    }
  }
  ok = ok && eigRejected == 0;

  // p = 0: the refined test is b < |y| in the ray's coordinates.
  std::size_t mismatches = 0, compared = 0;
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    const double theta = 2.0 * kPi * u(rng);
    const double b = 0.1 + 3.0 * u(rng);
    const auto reg = enclosure::refine(enclosure::build_enclosure({theta}, 1.1 * b, 0.0, 0.0), b);
    for (int i = 0; i < 200; ++i) {
      const Complex w(100.0 * u(rng) + 1e-3, 8.0 * (u(rng) - 0.5) * b);
      if (std::abs(std::abs(w.imag()) - b) <= 1e-12 * b) continue;
      const bool expect = b < std::abs(w.imag());
      ++compared;
      if (enclosure::refined_excluded(reg, operators::unit_direction(theta) * w) != expect) ++mismatches;
    }
  }
  std::ostringstream os;
  os << rejected << " rejected sample points, min sigmaMin(T - z)/(1 + ||T||) " << minSigma << ", " << eigRejected
     << " of " << eigsTested << " eigenvalues rejected; p = 0 mismatches " << mismatches << "/" << compared;
  return {ok && mismatches == 0 && rejected > 0, os.str()};
}

// ---------------------------------------------------------------- 4
Verdict resolvent_bounds() {
  std::size_t pairs = 0, bad = 0;
  double worst = std::numeric_limits<double>::infinity();
  std::uint64_t seed = 0;
  while (pairs < 10000 && seed < 1000) {
    const auto inst = experiments::enclosure_instance(seed);
    const auto& sys = inst.system;
    subordination::BoundOptions bo;
    bo.seed = operators::split_seed(seed, 2);
    bo.gridOracle = false;
    const auto br = subordination::subordination_bound(sys.S, sys.G, sys.p, bo);
    ++seed;
    if (br.unbounded) continue;
    const auto thetas = sys.raySpec.sorted_thetas();
    const auto setup = experiments::certified_setup(thetas, br.bound, sys.p, 1.1);
    std::mt19937_64 rng(operators::split_seed(seed, 40));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int got = 0;
    for (int attempt = 0; attempt < 2000 && got < 200; ++attempt) {
      const Complex z = std::polar(setup.r0 + (3.0 * setup.r0 + 20.0) * u(rng), 2.0 * kPi * u(rng));
      enclosure::ResolventDiagnostic d;
      try {
        d = enclosure::resolvent_diagnostic(sys, z, setup.epsilon);
      } catch (const SingularError&) {
        continue;
      }
      if (!d.applicable) continue;
      ++got;
      ++pairs;
      worst = std::min({worst, d.tSlack, d.stSlack});
      if (d.tSlack < -1e-10 || d.stSlack < -1e-10) ++bad;
    }
  }
  std::ostringstream os;
  os << pairs << " applicable pairs from " << seed << " instances, worst relative slack " << worst << ", " << bad
     << " below -1e-10";
  return {pairs >= 10000 && bad == 0, os.str()};
}

// ---------------------------------------------------------------- 5
Verdict classifier() {
  std::mt19937_64 rng(5150);
  std::uniform_real_distribution<double> cD(0.5, 2.0), qD(1.0, 3.0), lD(0.05, 3.0), u(0.0, 1.0);
  int checked = 0, disagree = 0, drawn = 0;
  while (checked < 1000) {
    ++drawn;
    const double c = cD(rng), q = qD(rng), l = lD(rng);
    const double pc = 1.0 - 1.0 / q;
    double p = u(rng) < 0.5 ? pc : std::min(0.99, std::max(0.0, pc + 0.3 * (u(rng) - 0.5)));
    const auto v = spectra::classify_asymptotic_gap(c, q, l, p);
    if (v == spectra::GapVerdict::boundaryHolds) continue;
    const double lc = spectra::critical_gap_width(c, q);
    if (p == pc && std::abs(l - lc) < 1e-3 * lc) continue;
    // Keep tuples whose leading-order crossover index is below 10^3 so the
    // brute-force tail window lies inside k <= 10^4.
    if (p != pc) {
      const double ratio = 2.0 * l * std::pow(c, p - 1.0) / q;
      const double kStar = std::pow(p < pc ? ratio : 1.0 / ratio, 1.0 / (q * std::abs(pc - p)));
      if (!(kStar < 1e3)) continue;
    }
    spectra::GapSequenceModel m;
    m.l = l;
    m.p = p;
    m.asymptotic = spectra::AsymptoticForm{c, q, {}};
    const auto rep = spectra::check_gap_sequence(m, 9000, 10000);
    if (rep.allHold() != (v == spectra::GapVerdict::holdsEventually)) ++disagree;
    ++checked;
  }
  // r_k = k^2, p = 1/2 flips at l = 1.
  const bool below = spectra::classify_asymptotic_gap(1.0, 2.0, 1.0 - 1e-9, 0.5) == spectra::GapVerdict::holdsEventually;
  const bool above = spectra::classify_asymptotic_gap(1.0, 2.0, 1.0 + 1e-9, 0.5) == spectra::GapVerdict::fails;
  spectra::GapSequenceModel sq;
  sq.p = 0.5;
  sq.asymptotic = spectra::AsymptoticForm{1.0, 2.0, {}};
  sq.l = 1.0;
  const bool exactHolds = spectra::check_gap_sequence(sq, 1, 10000).allHold();
  sq.l = 1.0 + 1e-9;
  const bool overFails = !spectra::check_gap_sequence(sq, 1, 10000).perIndex.back().holds;
  std::ostringstream os;
  os << disagree << " disagreements on " << checked << " tuples (" << drawn << " drawn); k^2 flip at l = 1: "
     << (below && above && exactHolds && overFails ? "yes" : "no");
  return {disagree == 0 && below && above && exactHolds && overFails, os.str()};
}

// ---------------------------------------------------------------- 6
Verdict riesz_constant() {
  // Monte Carlo on real n = 4 families; the supremum over complex coefficients
  // is attained on real ones for real frames. Half the samples draw the
  // components, half draw the sum and split it into components, so both
  // extremes of the ratio are approached.
  std::mt19937_64 rng(606);
  std::normal_distribution<double> g(0.0, 1.0);
  double worstRel = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::MatrixXd R(4, 4);
    for (Eigen::Index i = 0; i < 16; ++i) R(i) = g(rng);
    R += 1.5 * Eigen::MatrixXd::Identity(4, 4);
    const int split = 1 + trial % 3;
    rieszbasis::SubspaceFamily f;
    f.blocks.push_back(orthonormalize(R.leftCols(split).cast<Complex>()));
    for (int k = split; k < 4; ++k) f.blocks.push_back(orthonormalize(R.col(k).cast<Complex>()));
    const double c = rieszbasis::riesz_constant(f).constant;
    ComplexMatrix W(4, 4);
    Eigen::Index col = 0;
    for (const auto& b : f.blocks) {
      W.middleCols(col, b.cols()) = b;
      col += b.cols();
    }
    const double mc = monte_carlo_ratio(W.real(), 100000, rng);
    worstRel = std::max(worstRel, std::abs(mc - c) / c);
  }

  ComplexMatrix a(2, 1), b(2, 1);
  a << 1.0, 0.0;
  b << std::cos(kPi / 3), std::sin(kPi / 3);
  const double c60 = rieszbasis::riesz_constant({{a, b}}).constant;

  // Product bound over every composition of n <= 10 into outer blocks, with a
  // random inner split of each.
  std::size_t joins = 0, joinFails = 0;
  for (int n = 1; n <= 10; ++n) {
    const ComplexMatrix X = operators::gaussian_matrix(n, n, 900 + n) + 2.0 * ComplexMatrix::Identity(n, n);
    for (std::uint32_t mask = 0; mask < (1u << (n - 1)); ++mask) {
      std::vector<int> outerDims{1};
      for (int i = 1; i < n; ++i) {
        if (mask & (1u << (i - 1))) outerDims.push_back(1);
        else ++outerDims.back();
      }
      rieszbasis::SubspaceFamily outer, combined;
      std::vector<std::size_t> groups;
      Eigen::Index c0 = 0;
      std::mt19937_64 r2(mask * 31 + n);
      for (int d : outerDims) {
        outer.blocks.push_back(orthonormalize(X.middleCols(c0, d)));
        const int cut = d > 1 ? 1 + static_cast<int>(r2() % (d - 1)) : d;
        combined.blocks.push_back(orthonormalize(X.middleCols(c0, cut)));
        std::size_t gsz = 1;
        if (cut < d) {
          // Second inner block: the rest of the outer block, skewed inside it.
          combined.blocks.push_back(orthonormalize(X.middleCols(c0 + cut, d - cut) + 0.5 * X.middleCols(c0, 1) *
                                                   ComplexMatrix::Ones(1, d - cut)));
          ++gsz;
        }
        groups.push_back(gsz);
        c0 += d;
      }
      const auto inner = rieszbasis::inner_constants(combined, groups);
      ++joins;
      if (!rieszbasis::join_constant_check(outer, inner, combined, groups).holds) ++joinFails;
    }
  }

  std::size_t idFails = 0;
  for (std::size_t m = 1; m <= 10; ++m) {
    std::vector<ComplexVector> xs;
    for (std::size_t k = 0; k < m; ++k) xs.push_back(operators::gaussian_matrix(6, 1, 1000 + 17 * m + k).col(0));
    const auto [lhs, rhs] = rieszbasis::sign_sum_identity(xs);
    if (std::abs(lhs - rhs) > 1e-12 * lhs) ++idFails;
  }
  std::ostringstream os;
  os << "MC worst relative gap " << worstRel << "; pi/3 lines c = " << fmt("%.15f", c60) << "; product bound "
     << joins - joinFails << "/" << joins << "; identity failures " << idFails;
  return {worstRel <= 0.01 && std::abs(c60 - 2.0) <= 1e-10 && joinFails == 0 && idFails == 0, os.str()};
}

// ---------------------------------------------------------------- 7
Verdict projection_chain() {
  std::mt19937_64 rng(707);
  int chainFails = 0, estimateFails = 0, notExhaustive = 0;
  double worstLo = std::numeric_limits<double>::infinity(), worstHi = worstLo;
  for (int f = 0; f < 50; ++f) {
    const int m = 2 + static_cast<int>(rng() % 7);
    std::vector<Eigen::Index> dims;
    Eigen::Index n = 0;
    for (int k = 0; k < m; ++k) {
      dims.push_back(1 + static_cast<Eigen::Index>(rng() % 3));
      n += dims.back();
    }
    const double spread = 0.2 + 0.6 * static_cast<double>(rng() % 1000) / 1000.0;
    const ComplexMatrix V = ComplexMatrix::Identity(n, n) +
                            spread * operators::gaussian_matrix(n, n, 7000 + f) / std::sqrt(static_cast<double>(n));
    const ComplexMatrix Vinv = numerics::solve(V, ComplexMatrix::Identity(n, n));
    std::vector<ComplexMatrix> fam;
    Eigen::Index c = 0;
    for (Eigen::Index d : dims) {
      fam.push_back(V.middleCols(c, d) * Vinv.middleRows(c, d));
      c += d;
    }
    const auto C = rieszbasis::sign_pattern_constant(fam);
    if (!C.exhaustive) ++notExhaustive;
    const auto est = rieszbasis::verify_projection_estimate(fam, C.C, 10000, 8000 + f);
    worstLo = std::min(worstLo, est.worstLowerSlack);
    worstHi = std::min(worstHi, est.worstUpperSlack);
    if (!est.chainHolds) ++chainFails;
    if (!est.lowerHolds || !est.upperHolds) ++estimateFails;
  }
  std::ostringstream os;
  os << "chain failures " << chainFails << ", estimate failures " << estimateFails << " (worst slacks " << worstLo
     << ", " << worstHi << "), non-exhaustive " << notExhaustive;
  return {chainFails == 0 && estimateFails == 0 && notExhaustive == 0, os.str()};
}

// ---------------------------------------------------------------- 8
Verdict hamiltonian() {
  const int pairs = 64;
  blockop::HamiltonianModel model;
  for (int k = 1; k <= pairs; ++k) model.rSeq.push_back(4.0 * k);
  model.B = ComplexMatrix::Identity(pairs, pairs);
  model.C = model.B;
  model.gamma = 1.0;
  model.l = 2.0;
  const auto sys = blockop::build_hamiltonian(model);
  const auto rep = blockop::verify_hamiltonian(sys, model, 1e-8);

  double eigErr = 0.0;
  for (double r : model.rSeq)
    for (double s : {-1.0, 1.0}) {
      double best = std::numeric_limits<double>::infinity();
      for (Complex z : rep.eigenvalues) best = std::min(best, std::abs(z - Complex(s, r)));
      eigErr = std::max(eigErr, best);
    }
  bool twoPerDisc = true;
  for (int c : rep.discCounts) twoPerDisc = twoPerDisc && c == 2;

  const auto xs = blockop::gap_abscissas(model.rSeq, model.l);
  const auto pFam = projections::family_from_gaps(sys.T, xs, model.l, 0.0, kPi / 2);
  const auto qFam = projections::family_from_gaps(sys.G, xs, model.l, 0.0, kPi / 2);
  bool ranks = !pFam.projections.empty();
  for (const auto& r : projections::compare_ranks(pFam, qFam)) ranks = ranks && r.equal;

  const bool ok = eigErr <= 1e-10 && rep.j1SkewResidual <= 1e-12 && rep.minAbsRealPart >= 1.0 - 1e-10 &&
                  twoPerDisc && rep.eigenvectorCondition <= std::sqrt(2.0) + 1e-6 && ranks;
  std::ostringstream os;
  os << "eigenvalue error " << eigErr << ", J1 residual " << rep.j1SkewResidual << ", min |Re| "
     << fmt("%.12f", rep.minAbsRealPart) << ", two per disc " << (twoPerDisc ? "yes" : "no") << ", condition "
     << rep.eigenvectorCondition << ", ranks equal on " << pFam.projections.size() << " contours "
     << (ranks ? "yes" : "no");
  return {ok, os.str()};
}

// ---------------------------------------------------------------- 9
Verdict homotopy() {
  int instances = 0, contours = 0, rankChanges = 0, gateMisses = 0;
  double worstGate = 0.0;
  for (std::uint64_t seed = 0; instances < 50 && seed < 200; ++seed) {
    const auto inst = experiments::projection_instance(seed);
    const auto& sys = inst.system;
    bool gated = true;
    std::vector<projections::HomotopyReport> reps;
    for (std::size_t k = 0; k + 1 < inst.abscissas.size(); ++k) {
      const auto c = contours::gap_contour(inst.abscissas[k], inst.abscissas[k + 1], inst.alpha, inst.p, inst.theta);
      reps.push_back(projections::homotopy_ranks(sys.G, sys.S, c, 0.5));
      gated = gated && reps.back().gateSatisfied;
    }
    if (!gated) {
      ++gateMisses;
      continue;
    }
    ++instances;
    for (const auto& h : reps) {
      ++contours;
      worstGate = std::max(worstGate, h.maxGateValue);
      if (!h.rankConstant) ++rankChanges;
    }
  }
  std::ostringstream os;
  os << instances << " gated instances (" << gateMisses << " skipped), " << contours << " contours, rank changes "
     << rankChanges << ", max ||S (G - z)^-1|| " << worstGate;
  return {instances == 50 && rankChanges == 0, os.str()};
}

// ---------------------------------------------------------------- 10
Verdict determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "specloc_acceptance";
  fs::create_directories(dir);
  std::string bytes[2];
  int codes[2];
  for (int i = 0; i < 2; ++i) {
    const std::string path = (dir / ("sweep" + std::to_string(i) + ".json")).string();
    std::ostringstream out, err;
    codes[i] = cli::run({"sweep", "--suite", "enclosure", "--seeds", "0..11", "--seed", "3", "--no-timestamp", "--out",
                         path},
                        out, err);
    bytes[i] = io::read_file(path);
  }
  const bool same = bytes[0] == bytes[1] && !bytes[0].empty();
  std::ostringstream os;
  os << "two sweep reports of " << bytes[0].size() << " bytes, exit codes " << codes[0] << "/" << codes[1] << ", "
     << (same ? "identical" : "different");
  return {same && codes[0] == 0 && codes[1] == 0, os.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"projection oracle equivalence", projection_oracle},
      {"enclosure sweep", enclosure_sweep},
      {"refined boundary", refined_boundary},
      {"resolvent bounds", resolvent_bounds},
      {"gap classifier vs brute force", classifier},
      {"riesz constant exactness", riesz_constant},
      {"projection family chain", projection_chain},
      {"hamiltonian closed form", hamiltonian},
      {"homotopy rank stability", homotopy},
      {"sweep determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.pass) ++failed;
    std::cout << (v.pass ? "PASS" : "FAIL") << "  " << i + 1 << ". " << criteria[i].first << ": " << v.detail << " ["
              << fmt("%.1f", seconds_since(t0)) << " s]" << std::endl;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}
