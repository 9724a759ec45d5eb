#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "specloc/spectra.hpp"

using namespace specloc;
using namespace testutil;

namespace {

operators::RaySpectrumSpec one_ray(std::vector<double> radii, double theta = 0.0) {
  return operators::RaySpectrumSpec{{{theta, std::move(radii)}}};
}

spectra::GapSequenceModel squares(double l, double p, std::size_t count) {
  spectra::GapSequenceModel m;
  for (std::size_t k = 1; k <= count; ++k) m.radii.push_back(static_cast<double>(k * k));
  m.l = l;
  m.p = p;
  return m;
}

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g;
  for (int i = 0; i < n; ++i) g.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  return g;
}

}  // namespace

TEST_SUITE("spectra") {

TEST_CASE("count_radius is a closed ball count") {
  const auto s = one_ray({1, 2, 2, 5});
  CHECK(spectra::count_radius(s, 3.0) == 3);
  CHECK(spectra::count_radius(s, 0.0) == 0);
  CHECK(spectra::count_radius(s, 5.0) == 4);
}

TEST_CASE("count_radius is monotone and jumps by the multiplicity") {
  const auto s = one_ray({1, 2, 2, 5});
  CHECK(spectra::count_radius(s, 2.0) - spectra::count_radius(s, std::nextafter(2.0, 0.0)) == 2);
  std::size_t prev = 0;
  for (double r = 0.0; r <= 6.0; r += 0.01) {
    const auto c = spectra::count_radius(s, r);
    CHECK(c >= prev);
    prev = c;
  }
}

TEST_CASE("count_interval is an open interval count") {
  const auto s = one_ray({1, 2, 2, 5}, 0.4);
  CHECK(spectra::count_interval(s, 0.4, 1.0, 5.0) == 2);
  CHECK(spectra::count_interval(s, 0.4, 0.0, 10.0) == 4);
  CHECK(spectra::count_interval(s, 0.4, 2.0, 2.0) == 0);
  CHECK_THROWS_AS(spectra::count_interval(s, 0.5, 0.0, 1.0), InputError);
  CHECK_THROWS_AS(spectra::count_interval(s, 0.4, 3.0, 1.0), InputError);
}

TEST_CASE("count_region") {
  const auto disc = [](Complex z) { return std::abs(z) <= 2.0; };
  CHECK(spectra::count_region({1.0, 5.0}, disc) == 1);
  CHECK(spectra::count_region({}, disc) == 0);
  CHECK(spectra::count_region({1.0, 1.0, Complex(0, 1)}, disc) == 3);
}

TEST_CASE("gap check on squares at the critical width") {
  const auto rep = spectra::check_gap_sequence(squares(1.0, 0.5, 10001), 1, 10000);
  CHECK(rep.allHold());
  REQUIRE(rep.firstHoldIndex);
  CHECK(*rep.firstHoldIndex == 1);
}

TEST_CASE("gap check on squares above the critical width fails everywhere") {
  const auto rep = spectra::check_gap_sequence(squares(1.2, 0.5, 10001), 1, 10000);
  for (const auto& e : rep.perIndex) CHECK_FALSE(e.holds);
  CHECK_FALSE(rep.firstHoldIndex);
}

TEST_CASE("gap check on the integers") {
  spectra::GapSequenceModel m;
  for (int k = 1; k <= 50; ++k) m.radii.push_back(k);
  m.l = 0.4;
  CHECK(spectra::check_gap_sequence(m, 1, 49).allHold());
  m.l = 0.6;
  CHECK_FALSE(spectra::check_gap_sequence(m, 1, 49).firstHoldIndex);
}

TEST_CASE("gap check from the asymptotic form and window errors") {
  spectra::GapSequenceModel m;
  m.l = 0.9;
  m.p = 0.5;
  m.asymptotic = spectra::AsymptoticForm{1.0, 2.0, {}};
  CHECK(spectra::check_gap_sequence(m, 1, 500).allHold());
  CHECK(spectra::asymptotic_radii(*m.asymptotic, 3) == std::vector<double>{1.0, 4.0, 9.0});
  spectra::GapSequenceModel bare;
  bare.radii = {1.0, 2.0, 3.0};
  bare.l = 0.1;
  CHECK_THROWS_AS(spectra::check_gap_sequence(bare, 1, 3), InputError);
}

TEST_CASE("first hold index skips an early failure") {
  spectra::GapSequenceModel m;
  m.radii = {1.0, 1.1, 3.0, 5.0, 7.0};
  m.l = 0.5;
  const auto rep = spectra::check_gap_sequence(m, 1, 4);
  CHECK_FALSE(rep.perIndex[0].holds);
  REQUIRE(rep.firstHoldIndex);
  CHECK(*rep.firstHoldIndex == 2);
}

TEST_CASE("classifier examples") {
  using spectra::GapVerdict;
  CHECK(spectra::classify_asymptotic_gap(1.0, 2.0, 5.0, 0.3) == GapVerdict::holdsEventually);
  CHECK(spectra::classify_asymptotic_gap(1.0, 2.0, 0.9, 0.5) == GapVerdict::holdsEventually);
  CHECK(spectra::classify_asymptotic_gap(1.0, 2.0, 1.1, 0.5) == GapVerdict::fails);
  CHECK(spectra::classify_asymptotic_gap(1.0, 2.0, 1.0, 0.5) == GapVerdict::boundaryHolds);
  CHECK(spectra::classify_asymptotic_gap(1.0, 2.0, 0.0, 0.9) == GapVerdict::holdsEventually);
  CHECK(spectra::classify_asymptotic_gap(1.0, 2.0, 0.1, 0.7) == GapVerdict::fails);
  CHECK(spectra::critical_gap_width(4.0, 2.0) == doctest::Approx(2.0));
  CHECK(spectra::to_string(GapVerdict::boundaryHolds) == "boundaryHolds");
}

TEST_CASE("failing classification is confirmed by brute force") {
  spectra::GapSequenceModel m;
  m.l = 1.1;
  m.p = 0.5;
  m.asymptotic = spectra::AsymptoticForm{1.0, 2.0, {}};
  const auto rep = spectra::check_gap_sequence(m, 1, 10000);
  CHECK_FALSE(rep.perIndex.back().holds);
}

TEST_CASE("classifier agrees with brute force on random tuples") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> cD(0.5, 2.0), qD(1.0, 3.0), lD(0.05, 3.0), u(0.0, 1.0);
  int checked = 0;
  while (checked < 60) {
    const double c = cD(rng), q = qD(rng), l = lD(rng);
    const double pc = 1.0 - 1.0 / q;
    double p = u(rng) < 0.5 ? pc : std::min(0.99, std::max(0.0, pc + 0.3 * (u(rng) - 0.5)));
    if (std::abs(p - pc) < 1e-12) p = pc;
    const auto v = spectra::classify_asymptotic_gap(c, q, l, p);
    if (v == spectra::GapVerdict::boundaryHolds) continue;
    if (p == pc && std::abs(l - spectra::critical_gap_width(c, q)) < 1e-3 * spectra::critical_gap_width(c, q)) continue;
    // Only tuples whose leading-order crossover index is below 10^3, so the
    // window [9000, 10000] sits in the settled tail.
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
    CHECK(rep.allHold() == (v == spectra::GapVerdict::holdsEventually));
    ++checked;
  }
}

TEST_CASE("liminf density proxy") {
  std::vector<double> sq;
  for (int k = 1; k <= 100; ++k) sq.push_back(k * k);
  const auto a = spectra::liminf_density(one_ray(sq), 0.5, log_grid(1e3, 1e4, 200));
  CHECK(std::abs(a.proxy - 1.0) <= 0.1);
  CHECK(a.tailMin.size() == a.r.size());

  std::vector<double> ints;
  for (int k = 1; k <= 1000; ++k) ints.push_back(k);
  const auto b = spectra::liminf_density(one_ray(ints), 0.0, log_grid(1.0, 1000.0, 300));
  CHECK(std::abs(b.proxy - 1.0) <= 0.02);

  const auto c = spectra::liminf_density(one_ray({}), 0.5, log_grid(1.0, 100.0, 20));
  CHECK(c.proxy == 0.0);

  CHECK_THROWS_AS(spectra::liminf_density(one_ray(ints), 0.0, {2.0, 1.0}), InputError);
  CHECK_THROWS_AS(spectra::liminf_density(one_ray(ints), 0.0, {}), InputError);
}

}
