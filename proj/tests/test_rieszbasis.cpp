#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "specloc/operators.hpp"
#include "specloc/rieszbasis.hpp"

using namespace specloc;
using namespace testutil;

namespace {

ComplexMatrix orthonormalize(const ComplexMatrix& A) {
  Eigen::HouseholderQR<ComplexMatrix> qr(A);
  return qr.householderQ() * ComplexMatrix::Identity(A.rows(), A.cols());
}

// Skew family: P_k = V_k (W^H)_k from a random basis V with dual W^H = V^{-1}.
std::vector<ComplexMatrix> skew_family(Eigen::Index n, const std::vector<Eigen::Index>& dims, std::uint64_t seed,
                                       double spread = 0.5) {
  const ComplexMatrix V = ComplexMatrix::Identity(n, n) + spread * operators::gaussian_matrix(n, n, seed) / std::sqrt(double(n));
  const ComplexMatrix Vinv = numerics::solve(V, ComplexMatrix::Identity(n, n));
  std::vector<ComplexMatrix> out;
  Eigen::Index c = 0;
  for (Eigen::Index d : dims) {
    out.push_back(V.middleCols(c, d) * Vinv.middleRows(c, d));
    c += d;
  }
  return out;
}

}  // namespace

TEST_SUITE("rieszbasis") {

TEST_CASE("orthogonal blocks have constant one") {
  const ComplexMatrix Q = orthonormalize(operators::gaussian_matrix(5, 5, 1));
  rieszbasis::SubspaceFamily f{{Q.leftCols(2), Q.middleCols(2, 1), Q.rightCols(2)}};
  const auto r = rieszbasis::riesz_constant(f);
  CHECK(std::abs(r.constant - 1.0) <= 1e-12);
  CHECK(r.complete);
  CHECK(r.blockDims == std::vector<Eigen::Index>{2, 1, 2});
}

TEST_CASE("two lines at sixty degrees") {
  const double phi = kPi / 3;
  ComplexMatrix a(2, 1), b(2, 1);
  a << 1.0, 0.0;
  b << std::cos(phi), std::sin(phi);
  const auto r = rieszbasis::riesz_constant({{a, b}});
  CHECK(std::abs(r.constant - 2.0) <= 1e-10);
  CHECK(std::abs(r.sigmaMaxW * r.sigmaMaxW - 1.5) <= 1e-12);
  CHECK(std::abs(r.sigmaMinW * r.sigmaMinW - 0.5) <= 1e-12);
}

TEST_CASE("constant agrees with a Monte Carlo extremal ratio") {
  // Real frames: the sup over complex coefficients is then attained on real
  // ones, and real sampling reaches the extremes at this sample size.
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 3; ++trial) {
    Eigen::MatrixXd R(4, 4);
    for (Eigen::Index i = 0; i < 16; ++i) R(i) = g(rng);
    R += 1.5 * Eigen::MatrixXd::Identity(4, 4);
    std::vector<ComplexMatrix> blocks;
    blocks.push_back(orthonormalize(R.leftCols(2).cast<Complex>()));
    blocks.push_back(orthonormalize(R.col(2).cast<Complex>()));
    blocks.push_back(orthonormalize(R.col(3).cast<Complex>()));
    const auto rep = rieszbasis::riesz_constant({blocks});
    ComplexMatrix W(4, 4);
    W << blocks[0], blocks[1], blocks[2];
    const Eigen::MatrixXd Wr = W.real();
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(Wr);
    // Even draws pick the components, odd draws pick the sum.
    double hi = 0.0, lo = std::numeric_limits<double>::infinity();
    for (int s = 0; s < 100000; ++s) {
      Eigen::Vector4d v;
      for (int i = 0; i < 4; ++i) v(i) = g(rng);
      Eigen::Vector4d a = v, y = v;
      if (s % 2 == 0) y = Wr * a;
      else a = lu.solve(y);
      const double ratio = y.squaredNorm() / a.squaredNorm();
      hi = std::max(hi, ratio);
      lo = std::min(lo, ratio);
    }
    const double mc = std::max(hi, 1.0 / lo);
    CHECK(std::abs(mc - rep.constant) <= 0.01 * rep.constant);
    CHECK(mc <= rep.constant * (1.0 + 1e-12));
  }
}

TEST_CASE("invariance under unitary change of basis and frame re-choice") {
  const ComplexMatrix X = operators::gaussian_matrix(6, 6, 3) + 2.0 * ComplexMatrix::Identity(6, 6);
  rieszbasis::SubspaceFamily f{{orthonormalize(X.leftCols(3)), orthonormalize(X.middleCols(3, 2)), orthonormalize(X.rightCols(1))}};
  const double c = rieszbasis::riesz_constant(f).constant;
  const ComplexMatrix U = orthonormalize(operators::gaussian_matrix(6, 6, 4));
  rieszbasis::SubspaceFamily g = f;
  for (auto& b : g.blocks) b = U * b;
  CHECK(std::abs(rieszbasis::riesz_constant(g).constant - c) <= 1e-12 * c);
  rieszbasis::SubspaceFamily h = f;
  h.blocks[0] = h.blocks[0] * orthonormalize(operators::gaussian_matrix(3, 3, 5));
  h.blocks[1] = h.blocks[1] * orthonormalize(operators::gaussian_matrix(2, 2, 6));
  CHECK(std::abs(rieszbasis::riesz_constant(h).constant - c) <= 1e-12 * c);
  CHECK(c > 1.0 + 1e-6);
}

TEST_CASE("frames must be orthonormal") {
  ComplexMatrix a(2, 1);
  a << 2.0, 0.0;
  CHECK_THROWS_AS(rieszbasis::riesz_constant({{a}}), InputError);
  CHECK_THROWS_AS(rieszbasis::riesz_constant({{ComplexMatrix::Identity(2, 2), ComplexMatrix::Identity(3, 1)}}), InputError);
  CHECK_THROWS_AS(rieszbasis::riesz_constant({{ComplexMatrix::Identity(2, 2), ComplexMatrix::Identity(2, 1)}}), InputError);
}

TEST_CASE("join check with orthogonal inner splits") {
  const ComplexMatrix X = operators::gaussian_matrix(8, 8, 9) + 2.0 * ComplexMatrix::Identity(8, 8);
  rieszbasis::SubspaceFamily outer{{orthonormalize(X.leftCols(4)), orthonormalize(X.rightCols(4))}};
  rieszbasis::SubspaceFamily combined;
  for (const auto& F : outer.blocks) {
    combined.blocks.push_back(F.leftCols(1));
    combined.blocks.push_back(F.rightCols(3));
  }
  const std::vector<std::size_t> groups{2, 2};
  const auto inner = rieszbasis::inner_constants(combined, groups);
  for (double c : inner) CHECK(std::abs(c - 1.0) <= 1e-12);
  const auto j = rieszbasis::join_constant_check(outer, inner, combined, groups);
  CHECK(j.holds);
  CHECK(j.combined <= j.c0 * (1.0 + 1e-8));
}

TEST_CASE("join check with an orthogonal outer split") {
  const ComplexMatrix I = ComplexMatrix::Identity(6, 6);
  rieszbasis::SubspaceFamily outer{{I.leftCols(3), I.rightCols(3)}};
  rieszbasis::SubspaceFamily combined;
  for (int k = 0; k < 2; ++k) {
    const ComplexMatrix Y = I.middleCols(3 * k, 3) * (operators::gaussian_matrix(3, 3, 20 + k) + 2.0 * ComplexMatrix::Identity(3, 3));
    combined.blocks.push_back(orthonormalize(Y.leftCols(1)));
    combined.blocks.push_back(orthonormalize(Y.rightCols(2)));
  }
  const std::vector<std::size_t> groups{2, 2};
  const auto inner = rieszbasis::inner_constants(combined, groups);
  const auto j = rieszbasis::join_constant_check(outer, inner, combined, groups);
  CHECK(std::abs(j.c0 - 1.0) <= 1e-12);
  CHECK(j.combined <= j.c1 * (1.0 + 1e-8));
  CHECK(j.holds);
}

TEST_CASE("join check on random nested families") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Eigen::Index n = 16;
    const ComplexMatrix X = operators::gaussian_matrix(n, n, 300 + seed) + 3.0 * ComplexMatrix::Identity(n, n);
    const std::vector<std::size_t> groups{3, 2, 3};
    const std::vector<Eigen::Index> dims{2, 1, 3, 2, 3, 1, 2, 2};
    rieszbasis::SubspaceFamily combined, outer;
    Eigen::Index c = 0;
    std::size_t b = 0;
    for (std::size_t g : groups) {
      Eigen::Index width = 0;
      for (std::size_t i = 0; i < g; ++i) width += dims[b + i];
      outer.blocks.push_back(orthonormalize(X.middleCols(c, width)));
      for (std::size_t i = 0; i < g; ++i) {
        combined.blocks.push_back(orthonormalize(X.middleCols(c, dims[b])));
        c += dims[b];
        ++b;
      }
    }
    const auto inner = rieszbasis::inner_constants(combined, groups);
    CHECK(rieszbasis::join_constant_check(outer, inner, combined, groups).holds);
  }
}

TEST_CASE("join check bookkeeping errors") {
  const ComplexMatrix I = ComplexMatrix::Identity(4, 4);
  rieszbasis::SubspaceFamily outer{{I.leftCols(2), I.rightCols(2)}};
  rieszbasis::SubspaceFamily combined{{I.col(0), I.col(1), I.col(2), I.col(3)}};
  CHECK_THROWS_AS(rieszbasis::join_constant_check(outer, {1.0, 1.0}, combined, {3, 1}), InputError);
  CHECK_THROWS_AS(rieszbasis::join_constant_check(outer, {1.0}, combined, {2, 2}), InputError);
  rieszbasis::SubspaceFamily swapped{{I.col(0), I.col(2), I.col(1), I.col(3)}};
  CHECK_THROWS_AS(rieszbasis::join_constant_check(outer, {1.0, 1.0}, swapped, {2, 2}), InputError);
}

TEST_CASE("sign constant examples") {
  const ComplexMatrix I = ComplexMatrix::Identity(3, 3);
  std::vector<ComplexMatrix> ortho;
  for (int k = 0; k < 3; ++k) ortho.push_back(I.col(k) * I.col(k).adjoint());
  auto s = rieszbasis::sign_pattern_constant(ortho);
  CHECK(std::abs(s.C - 1.0) <= 1e-12);
  CHECK(s.exhaustive);
  CHECK(s.patterns == 4);

  const ComplexMatrix P = mat({{1.0, 3.0}, {0.0, 0.0}});
  s = rieszbasis::sign_pattern_constant({P});
  CHECK(std::abs(s.C - numerics::operator_norm(P)) <= 1e-12);

  const auto two = skew_family(2, {1, 1}, 4, 1.0);
  double brute = 0.0;
  for (double e0 : {-1.0, 1.0})
    for (double e1 : {-1.0, 1.0}) brute = std::max(brute, numerics::operator_norm(e0 * two[0] + e1 * two[1]));
  CHECK(std::abs(rieszbasis::sign_pattern_constant(two).C - brute) <= 1e-12 * brute);
}

TEST_CASE("sign constant requires negligible products and samples large families") {
  const ComplexMatrix P = mat({{1.0, 1.0}, {0.0, 0.0}});
  CHECK_THROWS_AS(rieszbasis::sign_pattern_constant({P, P}), InputError);
  const auto big = skew_family(14, std::vector<Eigen::Index>(14, 1), 2);
  const auto s = rieszbasis::sign_pattern_constant(big, 7);
  CHECK_FALSE(s.exhaustive);
  CHECK(s.patterns == 4096);
  const auto again = rieszbasis::sign_pattern_constant(big, 7);
  CHECK(again.C == s.C);
}

TEST_CASE("projection estimate on an orthogonal complete family") {
  const ComplexMatrix Q = orthonormalize(operators::gaussian_matrix(4, 4, 12));
  std::vector<ComplexMatrix> fam{Q.leftCols(2) * Q.leftCols(2).adjoint(), Q.rightCols(2) * Q.rightCols(2).adjoint()};
  const auto est = rieszbasis::verify_projection_estimate(fam, 1.0, 500, 3);
  CHECK(est.lowerHolds);
  CHECK(est.upperHolds);
  CHECK(std::abs(est.worstLowerSlack) <= 1e-12);
  CHECK(std::abs(est.worstUpperSlack) <= 1e-12);
  CHECK(est.chainHolds);
}

TEST_CASE("projection estimate on random skew families") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Eigen::Index n = 12 + 3 * static_cast<Eigen::Index>(seed);
    std::vector<Eigen::Index> dims;
    Eigen::Index left = n;
    for (int k = 0; k < 7 && left > 1; ++k) {
      const Eigen::Index d = 1 + (k + static_cast<Eigen::Index>(seed)) % 3;
      dims.push_back(std::min(d, left - 1));
      left -= dims.back();
    }
    dims.push_back(left);
    const auto fam = skew_family(n, dims, 40 + seed);
    const auto C = rieszbasis::sign_pattern_constant(fam);
    REQUIRE(C.exhaustive);
    const auto est = rieszbasis::verify_projection_estimate(fam, C.C, 2000, seed);
    CHECK(est.lowerHolds);
    CHECK(est.upperHolds);
    CHECK(est.chainHolds);
    CHECK(est.rieszConstant <= 4.0 * est.cUpper * est.cUpper);
  }
}

TEST_CASE("sign sum identity") {
  for (std::size_t m = 1; m <= 11; ++m) {
    std::vector<ComplexVector> xs;
    for (std::size_t k = 0; k < m; ++k) xs.push_back(operators::gaussian_matrix(5, 1, 60 + k).col(0));
    const auto [lhs, rhs] = rieszbasis::sign_sum_identity(xs);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * lhs);
  }
}

TEST_CASE("range frames") {
  const ComplexMatrix P = mat({{1.0, 2.0}, {0.0, 0.0}});
  const ComplexMatrix F = rieszbasis::range_frame(P);
  CHECK(F.cols() == 1);
  CHECK(std::abs(std::abs(F(0, 0)) - 1.0) <= 1e-12);
}

}
