#include "specloc/projections.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include <Eigen/SVD>

namespace specloc::projections {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
const Complex kI(0.0, 1.0);

// (i / 2 pi) sum w (U - z)^{-1} over the nodes, in the Schur basis.
ComplexMatrix schur_sum(const numerics::SchurResolvent& T, const std::vector<contours::Node>& nodes) {
  const Eigen::Index n = T.size();
  ComplexMatrix X = ComplexMatrix::Zero(n, n);
  for (const auto& node : nodes) {
    if (node.weight == Complex(0.0, 0.0)) continue;
    X += node.weight * T.schur_resolvent(node.z);
  }
  return X * (kI / (2.0 * kPi));
}

double idempotency(const ComplexMatrix& P) { return numerics::operator_norm(P * P - P); }

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

}  // namespace

RieszResult riesz_projection(const numerics::SchurResolvent& T, const contours::Contour& contour,
                             const RieszOptions& options) {
  RieszResult out;
  out.margin = contours::min_resolvent_margin(T, contour);
  if (!(out.margin > options.marginGate)) {
    std::ostringstream os;
    os << "contour passes within " << out.margin << " of the spectrum (gate " << options.marginGate << ")";
    throw ContourError(os.str(), out.margin);
  }
  const std::size_t segs = contour.segments.size();
  int per = contour.nodesPerSegment;
  ComplexMatrix X = schur_sum(T, contour.nodes);
  while (true) {
    if (segs * static_cast<std::size_t>(2 * per) > options.maxNodes) {
      out.P = T.from_schur_basis(X);
      out.idempotencyResidual = idempotency(X);
      out.nodes = segs * static_cast<std::size_t>(per);
      out.nodesPerSegment = per;
      std::ostringstream os;
      os << "Riesz projection did not converge within " << options.maxNodes
         << " nodes (idempotency residual " << out.idempotencyResidual << ")";
      throw ConvergenceError(os.str(), std::max(out.idempotencyResidual, out.changeResidual));
    }
    ComplexMatrix Xn = 0.5 * X + schur_sum(T, contours::doubling_nodes(contour, per));
    per *= 2;
    out.changeResidual = numerics::operator_norm(Xn - X);
    X = std::move(Xn);
    out.idempotencyResidual = idempotency(X);
    if (out.changeResidual <= options.tol && out.idempotencyResidual <= options.tol) break;
  }
  out.P = T.from_schur_basis(X);
  out.nodes = segs * static_cast<std::size_t>(per);
  out.nodesPerSegment = per;
  return out;
}

RieszResult riesz_projection(const ComplexMatrix& T, const contours::Contour& contour,
                             const RieszOptions& options) {
  return riesz_projection(numerics::SchurResolvent(T), contour, options);
}

ComplexMatrix spectral_projector_oracle(const ComplexMatrix& T,
                                        const std::function<bool(Complex)>& region) {
  numerics::require_square_finite(T, "T");
  const Eigen::Index n = T.rows();
  const auto ed = numerics::eig(T);
  std::vector<bool> in(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const Complex lam = ed.values[static_cast<std::size_t>(i)];
    const bool m = region(lam);
    for (int k = 0; k < 8; ++k) {
      if (region(lam + 1e-8 * std::polar(1.0, k * kPi / 4.0)) != m) {
        std::ostringstream os;
        os << "eigenvalue " << lam << " lies within 1e-8 of the region boundary";
        throw AmbiguityError(os.str());
      }
    }
    in[static_cast<std::size_t>(i)] = m;
  }
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (std::abs(ed.values[static_cast<std::size_t>(i)] - ed.values[static_cast<std::size_t>(j)]) <= 1e-8 &&
          in[static_cast<std::size_t>(i)] != in[static_cast<std::size_t>(j)]) {
        throw AmbiguityError("an eigenvalue cluster straddles the region boundary");
      }
  const auto count = std::count(in.begin(), in.end(), true);
  if (count == n) return ComplexMatrix::Identity(n, n);
  if (count == 0) return ComplexMatrix::Zero(n, n);
  ComplexMatrix VD = ed.rightVectors;
  for (Eigen::Index i = 0; i < n; ++i)
    if (!in[static_cast<std::size_t>(i)]) VD.col(i).setZero();
  // P V = V D  <=>  V^T P^T = (V D)^T
  return numerics::solve(ed.rightVectors.transpose(), VD.transpose()).transpose();
}

int projection_rank(const ComplexMatrix& P) {
  if (P.size() == 0) return 0;
  Eigen::BDCSVD<ComplexMatrix> svd(P);
  const auto& s = svd.singularValues();
  return static_cast<int>((s.array() > 0.5).count());
}

void fill_family_diagnostics(ProjectionFamily& family) {
  family.crossTalk = 0.0;
  family.sumResidual = 0.0;
  if (family.projections.empty()) return;
  const Eigen::Index n = family.projections.front().P.rows();
  ComplexMatrix sum = ComplexMatrix::Zero(n, n);
  for (std::size_t j = 0; j < family.projections.size(); ++j) {
    sum += family.projections[j].P;
    for (std::size_t k = 0; k < family.projections.size(); ++k) {
      if (j == k) continue;
      family.crossTalk = std::max(
          family.crossTalk, numerics::operator_norm(family.projections[j].P * family.projections[k].P));
    }
  }
  family.sumResidual = numerics::operator_norm(sum - ComplexMatrix::Identity(n, n));
}

ProjectionFamily family_from_gaps(const ComplexMatrix& T, const std::vector<double>& abscissas,
                                  double alpha, double p, double theta, const RieszOptions& options,
                                  int nodesPerSegment) {
  if (abscissas.size() < 2) throw InputError("family_from_gaps needs at least two abscissas");
  for (std::size_t k = 1; k < abscissas.size(); ++k)
    if (!(abscissas[k] > abscissas[k - 1])) throw InputError("family_from_gaps: abscissas must increase");
  const numerics::SchurResolvent R(T);
  ProjectionFamily fam;
  for (std::size_t k = 0; k + 1 < abscissas.size(); ++k) {
    const auto c = contours::gap_contour(abscissas[k], abscissas[k + 1], alpha, p, theta, nodesPerSegment);
    RieszResult r;
    try {
      r = riesz_projection(R, c, options);
    } catch (const ContourError& e) {
      // Name the offending vertical edge: right edge is segment 0, left edge segment 2.
      double mRight = std::numeric_limits<double>::infinity();
      double mLeft = mRight;
      const auto per = static_cast<std::size_t>(c.nodesPerSegment);
      for (std::size_t i = 0; i < c.nodes.size(); ++i) {
        const double m = R.sigma_min(c.nodes[i].z);
        if (i / per == 0) mRight = std::min(mRight, m);
        if (i / per == 2) mLeft = std::min(mLeft, m);
      }
      double x = (mLeft <= mRight) ? abscissas[k] : abscissas[k + 1];
      std::ostringstream os;
      os << "gap contour at abscissa x = " << x << " fails the margin gate: " << e.what();
      throw ContourError(os.str(), e.margin());
    }
    FamilyMember m;
    m.P = std::move(r.P);
    std::ostringstream label;
    label << "gap[" << abscissas[k] << "," << abscissas[k + 1] << "]";
    m.label = label.str();
    m.idempotencyResidual = r.idempotencyResidual;
    m.rank = projection_rank(m.P);
    m.xLeft = abscissas[k];
    m.xRight = abscissas[k + 1];
    m.nodes = r.nodes;
    fam.projections.push_back(std::move(m));
  }
  fill_family_diagnostics(fam);
  return fam;
}

SumBound projection_sum_bound(const std::vector<ComplexMatrix>& family, int probeCount,
                              std::uint64_t seed) {
  if (family.empty()) throw InputError("projection_sum_bound: empty family");
  const Eigen::Index n = family.front().rows();
  SumBound out;
  for (const auto& P : family) out.Cupper += numerics::operator_norm(P);
  auto value = [&](const ComplexVector& x, const ComplexVector& y) {
    double s = 0.0;
    for (const auto& P : family) s += std::abs(y.dot(P * x));
    return s;
  };
  for (const auto& P : family) {
    Eigen::JacobiSVD<ComplexMatrix> svd(P, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.Chat = std::max(out.Chat, value(svd.matrixV().col(0), svd.matrixU().col(0)));
  }
  std::mt19937_64 rng(seed);
  for (int i = 0; i < probeCount; ++i) {
    const ComplexVector x = random_unit(rng, n);
    const ComplexVector y = random_unit(rng, n);
    out.Chat = std::max(out.Chat, value(x, y));
  }
  if (out.Chat > out.Cupper * (1.0 + 1e-12)) {
    throw Error("projection_sum_bound: sampled estimate exceeds the norm sum");
  }
  out.Chat = std::min(out.Chat, out.Cupper);
  return out;
}

SumBound projection_sum_bound(const ProjectionFamily& family, int probeCount, std::uint64_t seed) {
  std::vector<ComplexMatrix> ps;
  for (const auto& m : family.projections) ps.push_back(m.P);
  return projection_sum_bound(ps, probeCount, seed);
}

std::vector<RankComparison> compare_ranks(const ProjectionFamily& pFamily,
                                          const ProjectionFamily& qFamily) {
  if (pFamily.projections.size() != qFamily.projections.size()) {
    throw InputError("compare_ranks: families have different lengths");
  }
  std::vector<RankComparison> out;
  for (std::size_t k = 0; k < pFamily.projections.size(); ++k) {
    RankComparison c;
    c.k = k;
    c.rankP = pFamily.projections[k].rank;
    c.rankQ = qFamily.projections[k].rank;
    c.equal = c.rankP == c.rankQ;
    out.push_back(c);
  }
  return out;
}

HomotopyReport homotopy_ranks(const ComplexMatrix& G, const ComplexMatrix& S,
                              const contours::Contour& contour, double epsilon,
                              const std::vector<double>& rValues, const RieszOptions& options) {
  numerics::require_square_finite(G, "G");
  numerics::require_square_finite(S, "S");
  if (G.rows() != S.rows()) throw InputError("homotopy_ranks: dimension mismatch");
  const Eigen::Index n = G.rows();
  const bool diagonal = (G - ComplexMatrix(G.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0;
  HomotopyReport rep;
  rep.r = rValues;
  for (const auto& node : contour.nodes) {
    ComplexMatrix SR;
    if (diagonal) {
      SR = S;
      for (Eigen::Index j = 0; j < n; ++j) SR.col(j) /= (G(j, j) - node.z);
    } else {
      SR = S * numerics::solve(G - node.z * ComplexMatrix::Identity(n, n), ComplexMatrix::Identity(n, n));
    }
    rep.maxGateValue = std::max(rep.maxGateValue, numerics::operator_norm(SR));
  }
  rep.gateSatisfied = rep.maxGateValue <= epsilon && epsilon < 1.0;
  for (double r : rValues) {
    int rank = -1;
    try {
      rank = projection_rank(riesz_projection(G + r * S, contour, options).P);
    } catch (const Error&) {
      rank = -1;
    }
    rep.ranks.push_back(rank);
  }
  rep.rankConstant = !rep.ranks.empty() && rep.ranks.front() >= 0 &&
                     std::all_of(rep.ranks.begin(), rep.ranks.end(), [&](int k) { return k == rep.ranks.front(); });
  return rep;
}

}  // namespace specloc::projections
