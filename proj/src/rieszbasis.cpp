#include "specloc/rieszbasis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/SVD>

namespace specloc::rieszbasis {

namespace {

ComplexMatrix stack(const std::vector<ComplexMatrix>& blocks, std::size_t first, std::size_t count,
                    Eigen::Index rows) {
  Eigen::Index cols = 0;
  for (std::size_t k = first; k < first + count; ++k) cols += blocks[k].cols();
  ComplexMatrix W(rows, cols);
  Eigen::Index c = 0;
  for (std::size_t k = first; k < first + count; ++k) {
    W.middleCols(c, blocks[k].cols()) = blocks[k];
    c += blocks[k].cols();
  }
  return W;
}

ComplexVector random_unit(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexVector u(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double re = normal(rng);
    const double im = normal(rng);
    u(i) = Complex(re, im);
  }
  return u / u.norm();
}

// Position of the bit that flips between Gray codes g(i-1) and g(i).
int gray_flip(std::uint64_t i) { return __builtin_ctzll(i); }

}  // namespace

Eigen::Index SubspaceFamily::ambient() const { return blocks.empty() ? 0 : blocks.front().rows(); }

Eigen::Index SubspaceFamily::totalDim() const {
  Eigen::Index d = 0;
  for (const auto& b : blocks) d += b.cols();
  return d;
}

void SubspaceFamily::validate() const {
  const Eigen::Index n = ambient();
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const auto& F = blocks[k];
    if (F.rows() != n) {
      std::ostringstream os;
      os << "block " << k << " has " << F.rows() << " rows, expected " << n;
      throw InputError(os.str());
    }
    if (!numerics::all_finite(F)) throw InputError("block has non-finite entries");
    const double dev = F.cols() == 0 ? 0.0
                                     : numerics::operator_norm(F.adjoint() * F -
                                                               ComplexMatrix::Identity(F.cols(), F.cols()));
    if (dev > 1e-12) {
      std::ostringstream os;
      os << "block " << k << " is not orthonormal (||F^H F - I|| = " << dev << ")";
      throw InputError(os.str());
    }
  }
  if (totalDim() > n) throw InputError("family dimension exceeds the ambient dimension");
}

RieszBasisReport riesz_constant(const SubspaceFamily& family) {
  family.validate();
  RieszBasisReport rep;
  for (const auto& b : family.blocks) rep.blockDims.push_back(b.cols());
  rep.complete = family.totalDim() == family.ambient();
  if (family.totalDim() == 0) return rep;
  const ComplexMatrix W = stack(family.blocks, 0, family.blocks.size(), family.ambient());
  const auto s = numerics::svd_extremes(W);
  rep.sigmaMaxW = s.sigmaMax;
  rep.sigmaMinW = s.sigmaMin;
  const double lower = s.sigmaMin > 0.0 ? 1.0 / (s.sigmaMin * s.sigmaMin) : std::numeric_limits<double>::infinity();
  rep.constant = std::max(s.sigmaMax * s.sigmaMax, lower);
  return rep;
}

ComplexMatrix range_frame(const ComplexMatrix& P) {
  Eigen::BDCSVD<ComplexMatrix> svd(P, Eigen::ComputeThinU);
  const auto r = (svd.singularValues().array() > 0.5).count();
  return svd.matrixU().leftCols(r);
}

SubspaceFamily family_from_projections(const std::vector<ComplexMatrix>& projections) {
  SubspaceFamily f;
  for (const auto& P : projections) f.blocks.push_back(range_frame(P));
  return f;
}

std::vector<double> inner_constants(const SubspaceFamily& combined, const std::vector<std::size_t>& groupSizes) {
  std::vector<double> out;
  std::size_t first = 0;
  for (std::size_t g : groupSizes) {
    if (first + g > combined.blocks.size()) throw InputError("group sizes exceed the number of blocks");
    SubspaceFamily sub;
    sub.blocks.assign(combined.blocks.begin() + static_cast<std::ptrdiff_t>(first),
                      combined.blocks.begin() + static_cast<std::ptrdiff_t>(first + g));
    out.push_back(riesz_constant(sub).constant);
    first += g;
  }
  return out;
}

JoinCheck join_constant_check(const SubspaceFamily& outer, const std::vector<double>& innerConstants,
                              const SubspaceFamily& combined, const std::vector<std::size_t>& groupSizes) {
  outer.validate();
  combined.validate();
  if (groupSizes.size() != outer.blocks.size()) {
    throw InputError("join check: one group size per outer block is required");
  }
  if (innerConstants.size() != outer.blocks.size()) {
    throw InputError("join check: one inner constant per outer block is required");
  }
  if (outer.ambient() != combined.ambient()) throw InputError("join check: ambient dimensions differ");
  std::size_t first = 0;
  for (std::size_t k = 0; k < outer.blocks.size(); ++k) {
    const std::size_t g = groupSizes[k];
    if (first + g > combined.blocks.size()) throw InputError("join check: group sizes exceed the combined family");
    const ComplexMatrix Wg = stack(combined.blocks, first, g, combined.ambient());
    if (Wg.cols() != outer.blocks[k].cols()) {
      std::ostringstream os;
      os << "join check: group " << k << " has dimension " << Wg.cols() << " but outer block has "
         << outer.blocks[k].cols();
      throw InputError(os.str());
    }
    const ComplexMatrix& F = outer.blocks[k];
    if (Wg.cols() > 0 && numerics::operator_norm(Wg - F * (F.adjoint() * Wg)) > 1e-8) {
      std::ostringstream os;
      os << "join check: group " << k << " is not contained in outer block " << k;
      throw InputError(os.str());
    }
    first += g;
  }
  if (first != combined.blocks.size()) throw InputError("join check: combined family has unassigned blocks");

  JoinCheck out;
  out.c0 = riesz_constant(outer).constant;
  out.c1 = innerConstants.empty() ? 1.0 : *std::max_element(innerConstants.begin(), innerConstants.end());
  out.combined = riesz_constant(combined).constant;
  out.holds = out.combined <= out.c0 * out.c1 * (1.0 + 1e-8);
  return out;
}

SignConstant sign_pattern_constant(const std::vector<ComplexMatrix>& family, std::uint64_t seed) {
  SignConstant out;
  const std::size_t m = family.size();
  if (m == 0) return out;
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t k = 0; k < m; ++k)
      if (j != k && numerics::operator_norm(family[j] * family[k]) > 1e-6) {
        std::ostringstream os;
        os << "sign_pattern_constant: P_" << j << " P_" << k << " is not negligible";
        throw InputError(os.str());
      }
  if (m <= 12) {
    // eps_0 = +1 suffices since ||-A|| = ||A||. Walk the patterns in Gray-code order.
    ComplexMatrix S = ComplexMatrix::Zero(family[0].rows(), family[0].cols());
    for (const auto& P : family) S += P;
    std::vector<int> sign(m, 1);
    out.C = numerics::operator_norm(S);
    const std::uint64_t count = std::uint64_t{1} << (m - 1);
    for (std::uint64_t i = 1; i < count; ++i) {
      const std::size_t k = 1 + static_cast<std::size_t>(gray_flip(i));
      S -= (2.0 * sign[k]) * family[k];
      sign[k] = -sign[k];
      out.C = std::max(out.C, numerics::operator_norm(S));
    }
    out.patterns = count;
    return out;
  }
  out.exhaustive = false;
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  for (int s = 0; s < 4096; ++s) {
    ComplexMatrix S = family[0];
    for (std::size_t k = 1; k < m; ++k) S += coin(rng) ? family[k] : ComplexMatrix(-family[k]);
    out.C = std::max(out.C, numerics::operator_norm(S));
  }
  out.patterns = 4096;
  return out;
}

ProjectionEstimate verify_projection_estimate(const std::vector<ComplexMatrix>& family, double C,
                                              int probeCount, std::uint64_t seed) {
  if (family.empty()) throw InputError("verify_projection_estimate: empty family");
  if (!(C > 0.0)) throw InputError("verify_projection_estimate: C must be > 0");
  const Eigen::Index n = family.front().rows();
  ProjectionEstimate out;
  out.probes = probeCount;
  out.worstLowerSlack = std::numeric_limits<double>::infinity();
  out.worstUpperSlack = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(seed);
  const double C2 = C * C;
  for (int i = 0; i < probeCount; ++i) {
    const ComplexVector x = random_unit(rng, n);
    double parts = 0.0;
    ComplexVector total = ComplexVector::Zero(n);
    for (const auto& P : family) {
      const ComplexVector px = P * x;
      parts += px.squaredNorm();
      total += px;
    }
    const double whole = total.squaredNorm();
    const double lo = parts / C2;
    const double hi = parts * C2;
    const double scaleLo = std::max({whole, lo, std::numeric_limits<double>::min()});
    const double scaleHi = std::max({whole, hi, std::numeric_limits<double>::min()});
    out.worstLowerSlack = std::min(out.worstLowerSlack, (whole - lo) / scaleLo);
    out.worstUpperSlack = std::min(out.worstUpperSlack, (hi - whole) / scaleHi);
  }
  if (probeCount > 0) {
    out.lowerHolds = out.worstLowerSlack >= -1e-9;
    out.upperHolds = out.worstUpperSlack >= -1e-9;
  }
  for (const auto& P : family) out.cUpper += numerics::operator_norm(P);
  out.rieszConstant = riesz_constant(family_from_projections(family)).constant;
  out.chainHolds = out.rieszConstant <= 4.0 * out.cUpper * out.cUpper * (1.0 + 1e-12);
  return out;
}

std::pair<double, double> sign_sum_identity(const std::vector<ComplexVector>& xs) {
  const std::size_t m = xs.size();
  if (m == 0) return {0.0, 0.0};
  if (m > 24) throw InputError("sign_sum_identity: at most 24 vectors");
  double lhs = 0.0;
  ComplexVector s = ComplexVector::Zero(xs[0].size());
  for (const auto& x : xs) {
    if (x.size() != s.size()) throw InputError("sign_sum_identity: vectors differ in length");
    lhs += x.squaredNorm();
    s += x;
  }
  const std::uint64_t count = std::uint64_t{1} << m;
  lhs *= static_cast<double>(count);
  std::vector<int> sign(m, 1);
  double rhs = s.squaredNorm();
  for (std::uint64_t i = 1; i < count; ++i) {
    const auto k = static_cast<std::size_t>(gray_flip(i));
    s -= (2.0 * sign[k]) * xs[k];
    sign[k] = -sign[k];
    rhs += s.squaredNorm();
  }
  return {lhs, rhs};
}

}  // namespace specloc::rieszbasis
