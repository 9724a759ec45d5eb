#include "specloc/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace specloc::operators {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kTwoPi = 2.0 * kPi;

double normalise_angle(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  if (a >= kTwoPi) a = 0.0;
  return a;
}

ComplexMatrix rescale_to_norm(ComplexMatrix M, double scale) {
  if (!(scale >= 0.0) || !std::isfinite(scale)) throw InputError("perturbation scale must be finite and >= 0");
  const double nrm = numerics::operator_norm(M);
  if (scale == 0.0 || nrm == 0.0) return ComplexMatrix::Zero(M.rows(), M.cols());
  M *= scale / nrm;
  return M;
}

}  // namespace

std::uint64_t split_seed(std::uint64_t seed, std::uint64_t counter) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (counter + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::size_t RaySpectrumSpec::dimension() const {
  std::size_t n = 0;
  for (const auto& r : rays) n += r.radii.size();
  return n;
}

void RaySpectrumSpec::validate() const {
  for (std::size_t i = 0; i < rays.size(); ++i) {
    const double th = rays[i].theta;
    if (!std::isfinite(th) || th < 0.0 || th >= kTwoPi) {
      std::ostringstream os;
      os << "rays[" << i << "].theta = " << th << " is outside [0, 2pi)";
      throw InputError(os.str());
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (rays[j].theta == th) {
        std::ostringstream os;
        os << "rays[" << i << "].theta duplicates rays[" << j << "].theta";
        throw InputError(os.str());
      }
    }
    for (double r : rays[i].radii) {
      if (!std::isfinite(r) || r < 0.0) {
        std::ostringstream os;
        os << "rays[" << i << "].radii contains invalid radius " << r;
        throw InputError(os.str());
      }
    }
  }
}

std::vector<double> RaySpectrumSpec::sorted_thetas() const {
  std::vector<double> t;
  for (const auto& r : rays) t.push_back(r.theta);
  std::sort(t.begin(), t.end());
  return t;
}

Complex unit_direction(double theta) {
  const double quarter = theta / (kPi / 2.0);
  const double k = std::round(quarter);
  if (std::abs(quarter - k) <= 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(k))) {
    switch (static_cast<long long>(k) & 3) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, 1.0};
      case 2: return {-1.0, 0.0};
      default: return {0.0, -1.0};
    }
  }
  return std::polar(1.0, theta);
}

ComplexMatrix build_normal(const RaySpectrumSpec& spec) {
  spec.validate();
  const auto n = static_cast<Eigen::Index>(spec.dimension());
  if (n > numerics::kMaxDimension) {
    std::ostringstream os;
    os << "system dimension " << n << " exceeds the supported maximum " << numerics::kMaxDimension;
    throw InputError(os.str());
  }
  ComplexMatrix G = ComplexMatrix::Zero(n, n);
  Eigen::Index k = 0;
  for (const auto& ray : spec.rays) {
    const Complex dir = unit_direction(ray.theta);
    for (double r : ray.radii) {
      G(k, k) = dir * r;
      ++k;
    }
  }
  return G;
}

ComplexMatrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double re = normal(rng);
      const double im = normal(rng);
      M(i, j) = Complex(re, im);
    }
  return M;
}

ComplexMatrix build_perturbation(const PerturbationSpec& spec, Eigen::Index n) {
  if (n < 0 || n > numerics::kMaxDimension) throw InputError("perturbation dimension out of range");
  return std::visit(
      [n](const auto& s) -> ComplexMatrix {
        using K = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<K, DensePerturbation>) {
          if (s.entries.rows() != n || s.entries.cols() != n) {
            std::ostringstream os;
            os << "S.entries has shape " << s.entries.rows() << "x" << s.entries.cols()
               << ", expected " << n << "x" << n;
            throw InputError(os.str());
          }
          if (!numerics::all_finite(s.entries)) throw InputError("S.entries has non-finite values");
          return s.entries;
        } else if constexpr (std::is_same_v<K, RandomGaussianPerturbation>) {
          return rescale_to_norm(gaussian_matrix(n, n, s.seed), s.scale);
        } else if constexpr (std::is_same_v<K, BandedPerturbation>) {
          if (s.bandwidth < 0) throw InputError("S.bandwidth must be >= 0");
          ComplexMatrix M = gaussian_matrix(n, n, s.seed);
          for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
              if (std::abs(i - j) > s.bandwidth) M(i, j) = 0.0;
          return rescale_to_norm(std::move(M), s.scale);
        } else {
          const auto n1 = s.B.rows();
          const auto n2 = s.B.cols();
          if (s.C.rows() != n2 || s.C.cols() != n1 || n1 + n2 != n) {
            std::ostringstream os;
            os << "offdiagonal blocks B (" << s.B.rows() << "x" << s.B.cols() << ") and C ("
               << s.C.rows() << "x" << s.C.cols() << ") do not fit dimension " << n;
            throw InputError(os.str());
          }
          ComplexMatrix M = ComplexMatrix::Zero(n, n);
          M.topRightCorner(n1, n2) = s.B;
          M.bottomLeftCorner(n2, n1) = s.C;
          return M;
        }
      },
      spec);
}

RaySpectrumSpec ray_spec_from_values(const std::vector<Complex>& values, double angleTol) {
  RaySpectrumSpec spec;
  std::vector<std::size_t> zeros;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const Complex v = values[i];
    const double r = std::abs(v);
    if (r == 0.0) {
      zeros.push_back(i);
      continue;
    }
    const double th = normalise_angle(std::arg(v));
    auto it = std::find_if(spec.rays.begin(), spec.rays.end(), [&](const Ray& ray) {
      double d = std::abs(ray.theta - th);
      d = std::min(d, kTwoPi - d);
      return d <= angleTol;
    });
    if (it == spec.rays.end()) {
      spec.rays.push_back({th, {r}});
    } else {
      it->radii.push_back(r);
    }
  }
  if (!zeros.empty()) {
    if (spec.rays.empty()) spec.rays.push_back({0.0, {}});
    for (std::size_t i = 0; i < zeros.size(); ++i) spec.rays.front().radii.push_back(0.0);
  }
  return spec;
}

PerturbedSystem assemble(const ComplexMatrix& G, const ComplexMatrix& S, double p,
                         RaySpectrumSpec raySpec) {
  numerics::require_square_finite(G, "G");
  numerics::require_square_finite(S, "S");
  if (G.rows() != S.rows()) {
    std::ostringstream os;
    os << "dimension mismatch: G is " << G.rows() << ", S is " << S.rows();
    throw InputError(os.str());
  }
  if (!(p >= 0.0 && p < 1.0)) {
    std::ostringstream os;
    os << "p = " << p << " must lie in [0, 1)";
    throw InputError(os.str());
  }
  PerturbedSystem sys;
  sys.G = G;
  sys.S = S;
  sys.T = G + S;
  sys.p = p;
  sys.raySpec = std::move(raySpec);
  return sys;
}

PerturbedSystem assemble(const ComplexMatrix& G, const ComplexMatrix& S, double p) {
  numerics::require_square_finite(G, "G");
  const ComplexMatrix offDiag = G - ComplexMatrix(G.diagonal().asDiagonal());
  if (G.size() > 0 && offDiag.cwiseAbs().maxCoeff() > 0.0) {
    throw InputError("G must be diagonal when no ray description is given");
  }
  std::vector<Complex> diag(static_cast<std::size_t>(G.rows()));
  for (Eigen::Index i = 0; i < G.rows(); ++i) diag[static_cast<std::size_t>(i)] = G(i, i);
  return assemble(G, S, p, ray_spec_from_values(diag));
}

}  // namespace specloc::operators
