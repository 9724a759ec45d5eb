#include "specloc/subordination.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "specloc/operators.hpp"

namespace specloc::subordination {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_inputs(const ComplexMatrix& S, const ComplexMatrix& G, double p) {
  numerics::require_square_finite(G, "G");
  if (S.cols() != G.rows()) {
    std::ostringstream os;
    os << "S has " << S.cols() << " columns but G has dimension " << G.rows();
    throw InputError(os.str());
  }
  if (!numerics::all_finite(S)) throw InputError("S has non-finite entries");
  if (!(p >= 0.0 && p < 1.0)) {
    std::ostringstream os;
    os << "p = " << p << " must lie in [0, 1)";
    throw InputError(os.str());
  }
}

// Problem data expressed in the eigenbasis W of G^H G = W diag(lambda) W^H.
struct Pencil {
  double p = 0.0;
  ComplexMatrix W;
  RealVector lambda;  // eigenvalues of G^H G, clamped at 0
  ComplexMatrix H;    // (S W)^H (S W)
  double tLo = 0.0;
  double tHi = 0.0;

  RealVector weights(double t) const {  // diagonal of M(t) in the W basis
    RealVector m(lambda.size());
    const double a = (1.0 - p) * std::pow(t, p);
    const double c = p * std::pow(t, p - 1.0);
    for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = a + c * lambda(i);
    return m;
  }

  double optimal_t(const ComplexVector& c) const {
    const double nu = c.squaredNorm();
    double t = 0.0;
    for (Eigen::Index i = 0; i < c.size(); ++i) t += lambda(i) * std::norm(c(i));
    t /= nu;
    return std::clamp(t, tLo, tHi);
  }

  // Squared ratio ||Su||^2 / (||u||^{2(1-p)} ||Gu||^{2p}) for u = W c.
  double ratio_sq(const ComplexVector& c) const {
    const double su = std::max(0.0, (c.adjoint() * H * c)(0, 0).real());
    const double uu = c.squaredNorm();
    double gu = 0.0;
    for (Eigen::Index i = 0; i < c.size(); ++i) gu += lambda(i) * std::norm(c(i));
    if (su == 0.0) return 0.0;
    if (gu <= 0.0) return kInf;
    return su / (std::pow(uu, 1.0 - p) * std::pow(gu, p));
  }

  // Top eigenpair of D H D with D = M(t)^{-1/2}; returns (value, c) with c = D y.
  std::pair<double, ComplexVector> top(double t) const {
    const RealVector m = weights(t);
    RealVector d(m.size());
    for (Eigen::Index i = 0; i < m.size(); ++i) d(i) = 1.0 / std::sqrt(m(i));
    ComplexMatrix K = d.asDiagonal() * H * d.asDiagonal();
    K = 0.5 * (K + K.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(K);
    const Eigen::Index last = K.rows() - 1;
    ComplexVector y = es.eigenvectors().col(last);
    ComplexVector c = d.asDiagonal() * y;
    c /= c.norm();
    return {std::max(0.0, es.eigenvalues()(last)), c};
  }
};

// Aligns the global phase of b to a and returns ||a - b||.
double phase_aligned_distance(const ComplexVector& a, const ComplexVector& b) {
  const Complex ip = b.dot(a);
  const Complex phase = (std::abs(ip) > 0.0) ? ip / std::abs(ip) : Complex(1.0, 0.0);
  return (a - phase * b).norm();
}

struct AscentOutcome {
  ComplexVector c;
  double value = 0.0;
  bool converged = false;
};

// Power step on the pencil at the current optimal t. Cheap, monotone.
AscentOutcome power_ascent(const Pencil& pen, ComplexVector c, int iterations, double stepTol) {
  AscentOutcome out;
  c /= c.norm();
  for (int it = 0; it < iterations; ++it) {
    const double t = pen.optimal_t(c);
    const RealVector m = pen.weights(t);
    ComplexVector next = pen.H * c;
    for (Eigen::Index i = 0; i < next.size(); ++i) next(i) /= m(i);
    const double nn = next.norm();
    if (!(nn > 0.0)) break;
    next /= nn;
    const double step = phase_aligned_distance(next, c);
    c = next;
    if (step < stepTol) {
      out.converged = true;
      break;
    }
  }
  out.c = c;
  out.value = pen.ratio_sq(c);
  return out;
}

// Exact block-coordinate ascent: top pencil vector at the optimal t of the
// current vector, repeated until the vector stops moving.
AscentOutcome exact_ascent(const Pencil& pen, ComplexVector c, int iterations, double stepTol) {
  AscentOutcome out;
  c /= c.norm();
  double best = pen.ratio_sq(c);
  for (int it = 0; it < iterations; ++it) {
    const double t = pen.optimal_t(c);
    auto [val, next] = pen.top(t);
    (void)val;
    const double v = pen.ratio_sq(next);
    const double step = phase_aligned_distance(next, c);
    if (v > best) {
      const double gain = (v - best) / best;
      c = next;
      best = v;
      if (step < stepTol || gain < 1e-15) {
        out.converged = true;
        break;
      }
    } else {
      out.converged = step < stepTol || v >= best * (1.0 - 1e-13);
      break;
    }
  }
  out.c = c;
  out.value = best;
  return out;
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

}  // namespace

double subordination_ratio(const ComplexMatrix& S, const ComplexMatrix& G, double p,
                           const ComplexVector& u) {
  check_inputs(S, G, p);
  if (u.size() != G.rows()) throw InputError("subordination_ratio: vector has wrong dimension");
  const double nu = u.norm();
  if (!(nu > 0.0)) throw InputError("subordination_ratio: u must be nonzero");
  const double su = (S * u).norm();
  if (p == 0.0) return su / nu;
  const double gu = (G * u).norm();
  if (gu == 0.0) return su == 0.0 ? 0.0 : kInf;
  if (su == 0.0) return 0.0;
  return su / (std::pow(nu, 1.0 - p) * std::pow(gu, p));
}

SubordinationResult subordination_bound(const ComplexMatrix& S, const ComplexMatrix& G, double p,
                                        const BoundOptions& options) {
  check_inputs(S, G, p);
  const Eigen::Index n = G.rows();
  SubordinationResult result;
  result.p = p;
  if (n == 0) {
    result.converged = true;
    return result;
  }

  const double normS = numerics::operator_norm(S);
  if (normS == 0.0) {
    result.bound = 0.0;
    result.witness = ComplexVector::Unit(n, 0);
    result.converged = true;
    return result;
  }

  if (p == 0.0) {
    Eigen::JacobiSVD<ComplexMatrix> svd(S, Eigen::ComputeFullV);
    ComplexVector w = svd.matrixV().col(0);
    result.witness = w;
    result.bound = subordination_ratio(S, G, p, w);
    result.converged = true;
    return result;
  }

  Pencil pen;
  pen.p = p;
  {
    const ComplexMatrix GhG = G.adjoint() * G;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (GhG + GhG.adjoint()));
    pen.W = es.eigenvectors();
    pen.lambda = es.eigenvalues().cwiseMax(0.0);
  }
  const double lamMax = pen.lambda.maxCoeff();
  const double kerTol = std::pow(static_cast<double>(n) * std::numeric_limits<double>::epsilon(), 2) *
                        std::max(lamMax, std::numeric_limits<double>::min()) * 100.0;
  std::vector<Eigen::Index> kernel;
  double lamMinPos = kInf;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (pen.lambda(i) <= kerTol) {
      pen.lambda(i) = 0.0;
      kernel.push_back(i);
    } else {
      lamMinPos = std::min(lamMinPos, pen.lambda(i));
    }
  }
  const ComplexMatrix SW = S * pen.W;
  for (auto k : kernel) {
    if (SW.col(k).norm() > 1e-12 * normS) {
      result.unbounded = true;
      result.bound = kInf;
      result.converged = true;
      return result;
    }
  }
  pen.H = SW.adjoint() * SW;
  pen.H = 0.5 * (pen.H + pen.H.adjoint()).eval();
  pen.tLo = lamMinPos;
  pen.tHi = lamMax;

  AscentOutcome best;
  best.value = -1.0;
  auto consider = [&](const AscentOutcome& cand) {
    if (cand.value > best.value) best = cand;
  };

  // Scan the one-dimensional dual problem on a log grid of t.
  const int gridPts = std::max(2, options.tGridPoints);
  const double sLo = std::log(pen.tLo);
  const double sHi = std::log(pen.tHi);
  std::vector<double> gridVal(static_cast<std::size_t>(gridPts));
  std::vector<ComplexVector> gridVec(static_cast<std::size_t>(gridPts));
  for (int k = 0; k < gridPts; ++k) {
    const double s = (sHi > sLo) ? sLo + (sHi - sLo) * k / (gridPts - 1) : sLo;
    auto [val, c] = pen.top(std::exp(s));
    gridVal[static_cast<std::size_t>(k)] = val;
    gridVec[static_cast<std::size_t>(k)] = c;
    consider({c, pen.ratio_sq(c), false});
  }
  // Golden-section refinement of the dual value around the best grid point.
  if (sHi > sLo) {
    const auto kBest = static_cast<int>(std::max_element(gridVal.begin(), gridVal.end()) - gridVal.begin());
    const double h = (sHi - sLo) / (gridPts - 1);
    double a = sLo + h * std::max(0, kBest - 1);
    double b = sLo + h * std::min(gridPts - 1, kBest + 1);
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - g * (b - a);
    double x2 = a + g * (b - a);
    double f1 = pen.top(std::exp(x1)).first;
    double f2 = pen.top(std::exp(x2)).first;
    for (int it = 0; it < 60 && (b - a) > 1e-12 * std::max(1.0, std::abs(a)); ++it) {
      if (f1 < f2) {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + g * (b - a);
        f2 = pen.top(std::exp(x2)).first;
      } else {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - g * (b - a);
        f1 = pen.top(std::exp(x1)).first;
      }
    }
    auto [val, c] = pen.top(std::exp(0.5 * (a + b)));
    (void)val;
    consider({c, pen.ratio_sq(c), false});
  }

  // Seeded random restarts with the cheap monotone power ascent.
  std::mt19937_64 rng(operators::split_seed(options.seed, 5u));
  for (int r = 0; r < options.restarts; ++r) {
    consider(power_ascent(pen, random_unit(rng, n), 60, options.stepTol));
  }
  result.restarts = options.restarts;

  // Polish the best candidate to convergence.
  AscentOutcome polished = exact_ascent(pen, best.c, options.maxIterations, options.stepTol);
  if (polished.value >= best.value) {
    best = polished;
  }
  result.converged = polished.converged;

  ComplexVector witness = pen.W * best.c;
  witness /= witness.norm();
  result.witness = witness;
  result.bound = subordination_ratio(S, G, p, witness);

  if (options.gridOracle && n <= 3) {
    const double oracle = subordination_grid_oracle(S, G, p);
    result.oracleBound = oracle;
    if (std::abs(oracle - result.bound) > options.oracleTol * std::max(oracle, result.bound)) {
      result.converged = false;
    }
  }
  return result;
}

double subordination_grid_oracle(const ComplexMatrix& S, const ComplexMatrix& G, double p) {
  check_inputs(S, G, p);
  const Eigen::Index n = G.rows();
  if (n < 1 || n > 3) throw InputError("grid oracle supports dimensions 1 to 3 only");
  if (n == 1) return subordination_ratio(S, G, p, ComplexVector::Ones(1));

  // Parameters: n - 1 polar angles in [0, pi/2] then n - 1 phases in [0, 2pi).
  const int dims = 2 * static_cast<int>(n - 1);
  auto vec = [&](const std::array<double, 4>& x) {
    ComplexVector u(n);
    if (n == 2) {
      u(0) = std::cos(x[0]);
      u(1) = std::polar(std::sin(x[0]), x[1]);
    } else {
      u(0) = std::cos(x[0]);
      u(1) = std::polar(std::sin(x[0]) * std::cos(x[1]), x[2]);
      u(2) = std::polar(std::sin(x[0]) * std::sin(x[1]), x[3]);
    }
    return u;
  };
  auto value = [&](const std::array<double, 4>& x) {
    if (n == 2) return subordination_ratio(S, G, p, vec(x));
    return subordination_ratio(S, G, p, vec({x[0], x[1], x[2], x[3]}));
  };
  // Ordering of parameters: n = 2 -> {angle, phase}; n = 3 -> {angle, angle, phase, phase}.
  auto is_angle = [&](int d) { return n == 2 ? d == 0 : d < 2; };

  const int per = (n == 2) ? 320 : 18;
  std::vector<std::pair<double, std::array<double, 4>>> top;
  const std::size_t keep = 8;
  std::array<int, 4> idx{0, 0, 0, 0};
  long long total = 1;
  for (int d = 0; d < dims; ++d) total *= per;
  for (long long flat = 0; flat < total; ++flat) {
    long long rem = flat;
    std::array<double, 4> x{0, 0, 0, 0};
    for (int d = 0; d < dims; ++d) {
      idx[static_cast<std::size_t>(d)] = static_cast<int>(rem % per);
      rem /= per;
      const double k = idx[static_cast<std::size_t>(d)];
      x[static_cast<std::size_t>(d)] = is_angle(d) ? (kPi / 2.0) * k / (per - 1) : 2.0 * kPi * k / per;
    }
    const double v = value(x);
    if (top.size() < keep || v > top.back().first) {
      top.emplace_back(v, x);
      std::sort(top.begin(), top.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
      if (top.size() > keep) top.pop_back();
    }
  }

  double best = top.front().first;
  for (auto [v, x] : top) {
    double step = (kPi / 2.0) / (per - 1);
    int guard = 0;
    while (step > 1e-12 && guard++ < 20000) {
      bool improved = false;
      for (int d = 0; d < dims && !improved; ++d) {
        for (double sgn : {1.0, -1.0}) {
          auto y = x;
          y[static_cast<std::size_t>(d)] += sgn * step;
          const double vy = value(y);
          if (vy > v) {
            v = vy;
            x = y;
            improved = true;
            break;
          }
        }
      }
      if (!improved) step *= 0.5;
    }
    best = std::max(best, v);
  }
  return best;
}

std::vector<Violation> verify_bound(const ComplexMatrix& S, const ComplexMatrix& G, double p,
                                    double b, int sampleCount, std::uint64_t seed) {
  check_inputs(S, G, p);
  if (!(b >= 0.0)) throw InputError("verify_bound: b must be >= 0");
  std::vector<Violation> out;
  std::mt19937_64 rng(seed);
  const Eigen::Index n = G.rows();
  if (n == 0) return out;
  for (int s = 0; s < sampleCount; ++s) {
    ComplexVector u = random_unit(rng, n);
    const double su = (S * u).norm();
    const double gu = (G * u).norm();
    const double rhs = b * (1.0 + 1e-9) * ((p == 0.0) ? 1.0 : std::pow(gu, p));
    if (su > rhs) out.push_back({u, subordination_ratio(S, G, p, u)});
  }
  return out;
}

}  // namespace specloc::subordination
