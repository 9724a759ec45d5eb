#include "specloc/blockop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace specloc::blockop {

namespace {

void require_normal(const ComplexMatrix& X, const char* name) {
  numerics::require_square_finite(X, name);
  const double scale = 1.0 + std::pow(numerics::operator_norm(X), 2);
  if (numerics::normality_residual(X) > 1e-10 * scale) {
    throw InputError(std::string(name) + " is not normal");
  }
}

double distance_to_ray(Complex z, double theta) {
  const Complex w = std::conj(operators::unit_direction(theta)) * z;
  return w.real() >= 0.0 ? std::abs(w.imag()) : std::abs(z);
}

void require_self_adjoint_floor(const ComplexMatrix& X, const char* name, double gamma) {
  numerics::require_square_finite(X, name);
  const double scale = std::max(1.0, numerics::operator_norm(X));
  if (numerics::operator_norm(X - X.adjoint()) > 1e-12 * scale) {
    throw InputError(std::string(name) + " is not self-adjoint");
  }
  if (X.rows() == 0) return;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (X + X.adjoint()), Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  if (lo < gamma - 1e-12 * scale) {
    std::ostringstream os;
    os << name << " has smallest eigenvalue " << lo << " below gamma = " << gamma;
    throw InputError(os.str());
  }
}

}  // namespace

operators::PerturbedSystem assemble_block(const ComplexMatrix& A, const ComplexMatrix& B,
                                          const ComplexMatrix& C, const ComplexMatrix& D, double p,
                                          const std::vector<double>& rayThetas) {
  require_normal(A, "A");
  require_normal(D, "D");
  const Eigen::Index n1 = A.rows();
  const Eigen::Index n2 = D.rows();
  if (B.rows() != n1 || B.cols() != n2 || C.rows() != n2 || C.cols() != n1) {
    std::ostringstream os;
    os << "block shapes do not fit: A " << n1 << "x" << n1 << ", B " << B.rows() << "x" << B.cols()
       << ", C " << C.rows() << "x" << C.cols() << ", D " << n2 << "x" << n2;
    throw InputError(os.str());
  }
  if (!numerics::all_finite(B) || !numerics::all_finite(C)) throw InputError("B or C has non-finite entries");
  if (rayThetas.empty()) throw InputError("assemble_block: at least one ray angle is required");

  operators::RaySpectrumSpec spec;
  for (double t : rayThetas) spec.rays.push_back({t, {}});
  spec.validate();
  std::vector<Complex> eigs = numerics::eigenvalues(A);
  const auto eD = numerics::eigenvalues(D);
  eigs.insert(eigs.end(), eD.begin(), eD.end());
  for (Complex lam : eigs) {
    std::size_t best = 0;
    double dBest = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < spec.rays.size(); ++j) {
      const double d = distance_to_ray(lam, spec.rays[j].theta);
      if (d < dBest) {
        dBest = d;
        best = j;
      }
    }
    if (dBest > 1e-10 * (1.0 + std::abs(lam))) {
      std::ostringstream os;
      os << "eigenvalue " << lam << " of the diagonal blocks is off every declared ray";
      throw InputError(os.str());
    }
    spec.rays[best].radii.push_back(std::abs(lam));
  }

  const Eigen::Index n = n1 + n2;
  ComplexMatrix G = ComplexMatrix::Zero(n, n);
  G.topLeftCorner(n1, n1) = A;
  G.bottomRightCorner(n2, n2) = D;
  ComplexMatrix S = ComplexMatrix::Zero(n, n);
  S.topRightCorner(n1, n2) = B;
  S.bottomLeftCorner(n2, n1) = C;
  return operators::assemble(G, S, p, std::move(spec));
}

operators::PerturbedSystem build_hamiltonian(HamiltonianModel& model) {
  const auto m = static_cast<Eigen::Index>(model.rSeq.size());
  if (m == 0) throw InputError("hamiltonian: rSeq is empty");
  for (double r : model.rSeq)
    if (!std::isfinite(r)) throw InputError("hamiltonian: rSeq has non-finite entries");
  if (!(model.gamma > 0.0)) throw InputError("hamiltonian: gamma must be > 0");
  if (model.B.rows() != m || model.B.cols() != m || model.C.rows() != m || model.C.cols() != m) {
    std::ostringstream os;
    os << "hamiltonian: B and C must be " << m << "x" << m;
    throw InputError(os.str());
  }
  require_self_adjoint_floor(model.B, "B", model.gamma);
  require_self_adjoint_floor(model.C, "C", model.gamma);
  model.b = std::max(numerics::operator_norm(model.B), numerics::operator_norm(model.C));
  if (!(model.l > model.b)) {
    std::ostringstream os;
    os << "hamiltonian: l = " << model.l << " must exceed b = " << model.b;
    throw InputError(os.str());
  }
  std::vector<std::size_t> bad;
  for (std::size_t k = 0; k + 1 < model.rSeq.size(); ++k)
    if (!(model.rSeq[k + 1] - model.rSeq[k] >= 2.0 * model.l)) bad.push_back(k + 1);
  if (!bad.empty()) {
    std::ostringstream os;
    os << "hamiltonian: r_{k+1} - r_k < 2l for k =";
    for (std::size_t i = 0; i < bad.size() && i < 20; ++i) os << ' ' << bad[i];
    if (bad.size() > 20) os << " ...";
    throw InputError(os.str());
  }

  const Eigen::Index n = 2 * m;
  ComplexMatrix G = ComplexMatrix::Zero(n, n);
  for (Eigen::Index k = 0; k < m; ++k) {
    const Complex a(0.0, model.rSeq[static_cast<std::size_t>(k)]);
    G(k, k) = a;
    G(m + k, m + k) = a;
  }
  ComplexMatrix S = ComplexMatrix::Zero(n, n);
  S.topRightCorner(m, m) = model.B;
  S.bottomLeftCorner(m, m) = model.C;
  auto sys = operators::assemble(G, S, 0.0);
  sys.b = model.b;
  return sys;
}

SymmetryReport verify_hamiltonian(const operators::PerturbedSystem& system, const HamiltonianModel& model,
                                  double tol) {
  const Eigen::Index n = system.dimension();
  const Eigen::Index m = n / 2;
  if (n != 2 * static_cast<Eigen::Index>(model.rSeq.size())) {
    throw InputError("verify_hamiltonian: system does not match the model");
  }
  SymmetryReport rep;
  ComplexMatrix J1 = ComplexMatrix::Zero(n, n);
  J1.topRightCorner(m, m) = Complex(0.0, -1.0) * ComplexMatrix::Identity(m, m);
  J1.bottomLeftCorner(m, m) = Complex(0.0, 1.0) * ComplexMatrix::Identity(m, m);
  const ComplexMatrix JT = J1 * system.T;
  rep.j1SkewResidual = numerics::operator_norm(JT.adjoint() + JT);

  const auto ed = numerics::eig(system.T);
  rep.eigenvalues = ed.values;
  rep.eigenvectorCondition = ed.conditionEstimate;
  const auto& ev = ed.values;
  const std::size_t N = ev.size();

  std::vector<bool> matched(N, false);
  for (std::size_t i = 0; i < N; ++i) {
    if (matched[i]) continue;
    const Complex target = -std::conj(ev[i]);
    if (std::abs(ev[i] - target) <= tol) {
      matched[i] = true;
      continue;
    }
    std::size_t best = N;
    double dBest = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < N; ++j) {
      if (j == i || matched[j]) continue;
      const double d = std::abs(ev[j] - target);
      if (d < dBest) {
        dBest = d;
        best = j;
      }
    }
    if (best < N && dBest <= tol) {
      matched[i] = matched[best] = true;
    } else {
      rep.pairingDefects.push_back(ev[i]);
    }
  }

  const double b = system.b.value_or(model.b);
  rep.minAbsRealPart = std::numeric_limits<double>::infinity();
  rep.discCounts.assign(model.rSeq.size(), 0);
  std::vector<std::vector<Complex>> perDisc(model.rSeq.size());
  for (Complex lam : ev) {
    rep.minAbsRealPart = std::min(rep.minAbsRealPart, std::abs(lam.real()));
    if (std::abs(lam.real()) < model.gamma - tol) rep.realPartFloorViolations.push_back(lam);
    bool inAny = false;
    for (std::size_t k = 0; k < model.rSeq.size(); ++k) {
      if (std::abs(lam - Complex(0.0, model.rSeq[k])) <= b + tol) {
        inAny = true;
        ++rep.discCounts[k];
        perDisc[k].push_back(lam);
      }
    }
    if (!inAny) rep.discViolations.push_back(lam);
  }
  for (const auto& d : perDisc) {
    bool simple = true;
    for (std::size_t i = 0; i < d.size() && simple; ++i)
      for (std::size_t j = i + 1; j < d.size(); ++j)
        if (std::abs(d[i] - d[j]) <= tol) {
          simple = false;
          break;
        }
    rep.discSimple.push_back(simple);
  }
  return rep;
}

std::vector<double> gap_abscissas(const std::vector<double>& rSeq, double l) {
  if (rSeq.empty()) return {};
  std::vector<double> x;
  x.push_back(rSeq.front() - l);
  for (std::size_t k = 0; k + 1 < rSeq.size(); ++k) x.push_back(0.5 * (rSeq[k] + rSeq[k + 1]));
  x.push_back(rSeq.back() + l);
  return x;
}

}  // namespace specloc::blockop
