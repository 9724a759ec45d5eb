#include "specloc/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <Eigen/Householder>
#include <openssl/evp.h>

namespace specloc::io {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) { throw InputError(path + ": " + msg); }

const json& field(const json& obj, const char* key, const std::string& path) {
  const auto it = obj.find(key);
  if (it == obj.end()) fail(path + "." + key, "missing");
  return *it;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "not finite");
  return v;
}

double number_field(const json& obj, const char* key, const std::string& path) {
  return number(field(obj, key, path), path + "." + key);
}

double number_or(const json& obj, const char* key, const std::string& path, double fallback) {
  return obj.contains(key) ? number_field(obj, key, path) : fallback;
}

std::uint64_t seed_field(const json& obj, const char* key, const std::string& path) {
  const json& j = field(obj, key, path);
  if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<std::int64_t>() < 0))
    fail(path + "." + key, "expected a non-negative integer");
  return j.get<std::uint64_t>();
}

std::vector<double> number_list(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
}

std::string kind_of(const json& j, const std::string& path) {
  const json& k = field(j, "kind", path);
  if (!k.is_string()) fail(path + ".kind", "expected a string");
  return k.get<std::string>();
}

operators::RaySpectrumSpec parse_rays(const json& g, const std::string& path) {
  require_object(g, path);
  const json& rays = field(g, "rays", path);
  if (!rays.is_array() || rays.empty()) fail(path + ".rays", "expected a non-empty array");
  operators::RaySpectrumSpec spec;
  for (std::size_t i = 0; i < rays.size(); ++i) {
    const std::string rp = path + ".rays[" + std::to_string(i) + "]";
    require_object(rays[i], rp);
    spec.rays.push_back({number_field(rays[i], "theta", rp), number_list(field(rays[i], "radii", rp), rp + ".radii")});
  }
  try {
    spec.validate();
  } catch (const InputError& e) {
    fail(path, e.what());
  }
  return spec;
}

operators::PerturbationSpec parse_perturbation(const json& s, const std::string& path) {
  require_object(s, path);
  const std::string kind = kind_of(s, path);
  if (kind == "dense") return operators::DensePerturbation{matrix_from_json(field(s, "entries", path), path + ".entries")};
  if (kind == "randomGaussian")
    return operators::RandomGaussianPerturbation{seed_field(s, "seed", path), number_field(s, "scale", path)};
  if (kind == "banded") {
    const json& bw = field(s, "bandwidth", path);
    if (!bw.is_number_integer()) fail(path + ".bandwidth", "expected an integer");
    return operators::BandedPerturbation{bw.get<int>(), seed_field(s, "seed", path), number_field(s, "scale", path)};
  }
  if (kind == "offdiagonalBlock")
    return operators::OffDiagonalBlockPerturbation{matrix_from_json(field(s, "B", path), path + ".B"),
                                                   matrix_from_json(field(s, "C", path), path + ".C")};
  fail(path + ".kind", "unknown kind '" + kind + "'");
}

ComplexMatrix parse_generator(const json& g, Eigen::Index m, const std::string& path) {
  require_object(g, path);
  const std::string kind = kind_of(g, path);
  if (kind == "identity") return Complex(number_or(g, "scale", path, 1.0), 0.0) * ComplexMatrix::Identity(m, m);
  if (kind == "dense") {
    ComplexMatrix X = matrix_from_json(field(g, "entries", path), path + ".entries");
    if (X.rows() != m || X.cols() != m) fail(path + ".entries", "expected " + std::to_string(m) + "x" + std::to_string(m));
    return X;
  }
  if (kind == "randomPositive") {
    // Q diag(d) Q^H with Q from a seeded Gaussian and d uniform in [low, high].
    const double lo = number_field(g, "low", path);
    const double hi = number_field(g, "high", path);
    if (!(lo > 0.0) || hi < lo) fail(path, "need 0 < low <= high");
    const std::uint64_t seed = seed_field(g, "seed", path);
    Eigen::HouseholderQR<ComplexMatrix> qr(operators::gaussian_matrix(m, m, seed));
    const ComplexMatrix Q = qr.householderQ() * ComplexMatrix::Identity(m, m);
    const ComplexMatrix U = operators::gaussian_matrix(m, 1, operators::split_seed(seed, 1));
    Eigen::VectorXd d(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      const double u = 0.5 * (1.0 + std::tanh(U(i).real()));
      d(i) = lo + (hi - lo) * u;
    }
    ComplexMatrix X = Q * d.cast<Complex>().asDiagonal() * Q.adjoint();
    return 0.5 * (X + X.adjoint());
  }
  fail(path + ".kind", "unknown kind '" + kind + "'");
}

}  // namespace

json to_json(Complex z) { return json::array({z.real(), z.imag()}); }

json to_json(const std::vector<Complex>& zs) {
  json a = json::array();
  for (Complex z : zs) a.push_back(to_json(z));
  return a;
}

json to_json(const ComplexMatrix& A) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < A.cols(); ++j) row.push_back(to_json(A(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Complex complex_from_json(const json& j, const std::string& path) {
  if (j.is_number()) return {number(j, path), 0.0};
  if (j.is_array() && j.size() == 2) return {number(j[0], path + "[0]"), number(j[1], path + "[1]")};
  fail(path, "expected a number or [re, im]");
}

ComplexMatrix matrix_from_json(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  Eigen::Index cols = -1;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array()) fail(path + "[" + std::to_string(i) + "]", "expected a row array");
    const auto c = static_cast<Eigen::Index>(j[i].size());
    if (cols >= 0 && c != cols) fail(path + "[" + std::to_string(i) + "]", "rows differ in length");
    cols = c;
  }
  ComplexMatrix A(rows, std::max<Eigen::Index>(cols, 0));
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index k = 0; k < A.cols(); ++k)
      A(i, k) = complex_from_json(j[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)],
                                  path + "[" + std::to_string(i) + "][" + std::to_string(k) + "]");
  return A;
}

SystemSpecFile parse_system_spec(const json& j) {
  require_object(j, "spec");
  if (j.contains("schemaVersion")) {
    const json& v = j["schemaVersion"];
    if (!v.is_number_integer() || v.get<int>() != kSchemaVersion)
      fail("spec.schemaVersion", "unsupported (expected " + std::to_string(kSchemaVersion) + ")");
  }
  SystemSpecFile out;

  const bool anySystem = j.contains("G") || j.contains("S") || j.contains("dimension");
  if (anySystem) {
    auto rays = parse_rays(field(j, "G", "spec"), "spec.G");
    const auto n = static_cast<Eigen::Index>(rays.dimension());
    if (j.contains("dimension")) {
      const json& d = j["dimension"];
      if (!d.is_number_integer()) fail("spec.dimension", "expected an integer");
      if (d.get<Eigen::Index>() != n)
        fail("spec.dimension", std::to_string(d.get<Eigen::Index>()) + " does not match the " + std::to_string(n) +
                                   " radii of G");
    }
    const auto pert = parse_perturbation(field(j, "S", "spec"), "spec.S");
    const double p = number_or(j, "p", "spec", 0.0);
    if (!(p >= 0.0 && p < 1.0)) fail("spec.p", "must lie in [0, 1)");
    try {
      const ComplexMatrix G = operators::build_normal(rays);
      const ComplexMatrix S = operators::build_perturbation(pert, n);
      out.system = operators::assemble(G, S, p, std::move(rays));
    } catch (const InputError& e) {
      fail("spec.S", e.what());
    }
  }

  if (j.contains("gapModel")) {
    const std::string path = "spec.gapModel";
    const json& g = j["gapModel"];
    require_object(g, path);
    GapSection sec;
    if (g.contains("radii")) sec.model.radii = number_list(g["radii"], path + ".radii");
    sec.model.l = number_field(g, "l", path);
    sec.model.p = number_or(g, "p", path, 0.0);
    if (g.contains("asymptotic")) {
      const json& a = g["asymptotic"];
      const std::string ap = path + ".asymptotic";
      require_object(a, ap);
      spectra::AsymptoticForm f;
      f.c = number_field(a, "c", ap);
      f.q = number_field(a, "q", ap);
      if (a.contains("dTail")) f.dTail = number_list(a["dTail"], ap + ".dTail");
      sec.model.asymptotic = f;
    }
    if (sec.model.radii.empty() && !sec.model.asymptotic) fail(path, "needs radii or asymptotic");
    sec.kLast = sec.model.radii.empty() ? 1000 : sec.model.radii.size() - 1;
    if (g.contains("window")) {
      const json& w = g["window"];
      if (!w.is_array() || w.size() != 2 || !w[0].is_number_unsigned() || !w[1].is_number_unsigned())
        fail(path + ".window", "expected [kFirst, kLast] with non-negative integers");
      sec.kFirst = w[0].get<std::size_t>();
      sec.kLast = w[1].get<std::size_t>();
    }
    out.gaps = sec;
  }

  if (j.contains("hamiltonian")) {
    const std::string path = "spec.hamiltonian";
    const json& h = j["hamiltonian"];
    require_object(h, path);
    blockop::HamiltonianModel m;
    m.rSeq = number_list(field(h, "rSeq", path), path + ".rSeq");
    const auto n = static_cast<Eigen::Index>(m.rSeq.size());
    m.B = parse_generator(field(h, "B", path), n, path + ".B");
    m.C = parse_generator(field(h, "C", path), n, path + ".C");
    m.gamma = number_or(h, "gamma", path, 1.0);
    m.l = number_field(h, "l", path);
    out.hamiltonian = std::move(m);
  }

  if (j.contains("projection")) {
    const std::string path = "spec.projection";
    const json& pr = j["projection"];
    require_object(pr, path);
    ProjectionSection sec;
    sec.theta = number_or(pr, "theta", path, 0.0);
    sec.abscissas = number_list(field(pr, "abscissas", path), path + ".abscissas");
    if (sec.abscissas.size() < 2) fail(path + ".abscissas", "need at least two abscissas");
    for (std::size_t i = 0; i + 1 < sec.abscissas.size(); ++i)
      if (!(sec.abscissas[i] < sec.abscissas[i + 1])) fail(path + ".abscissas", "must be strictly increasing");
    sec.alpha = number_field(pr, "alpha", path);
    sec.p = number_or(pr, "p", path, out.system ? out.system->p : 0.0);
    out.projection = sec;
  }

  for (const char* key : {"frames", "projections"}) {
    if (!j.contains(key)) continue;
    const json& list = j[key];
    const std::string path = std::string("spec.") + key;
    if (!list.is_array()) fail(path, "expected an array of matrices");
    auto& dest = std::string(key) == "frames" ? out.frames : out.projectors;
    for (std::size_t i = 0; i < list.size(); ++i)
      dest.push_back(matrix_from_json(list[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

void validate_run_report(const json& r) {
  require_object(r, "report");
  const json& cmd = field(r, "command", "report");
  if (!cmd.is_string() || cmd.get<std::string>().empty()) fail("report.command", "expected a non-empty string");
  const json& v = field(r, "schemaVersion", "report");
  if (!v.is_number_integer() || v.get<int>() != kSchemaVersion) fail("report.schemaVersion", "unexpected value");
  const json& d = field(r, "inputsDigest", "report");
  if (!d.is_string() || d.get<std::string>().size() != 64 ||
      d.get<std::string>().find_first_not_of("0123456789abcdef") != std::string::npos)
    fail("report.inputsDigest", "expected 64 lowercase hex digits");
  const json& seed = field(r, "seed", "report");
  if (!seed.is_number_integer() || (!seed.is_number_unsigned() && seed.get<long long>() < 0))
    fail("report.seed", "expected a non-negative integer");
  if (!field(r, "results", "report").is_object()) fail("report.results", "expected an object");
  if (!field(r, "passed", "report").is_boolean()) fail("report.passed", "expected a boolean");
  if (r.contains("wallTimeSeconds") && !r["wallTimeSeconds"].is_number())
    fail("report.wallTimeSeconds", "expected a number");
  if (r.contains("timestamp") && !r["timestamp"].is_string()) fail("report.timestamp", "expected a string");
  for (auto it = r.begin(); it != r.end(); ++it) {
    static const char* known[] = {"command", "schemaVersion", "inputsDigest", "seed",
                                  "results", "passed",        "wallTimeSeconds", "timestamp"};
    if (std::find(std::begin(known), std::end(known), it.key()) == std::end(known))
      fail("report." + it.key(), "unknown field");
  }
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("sha256 failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return os.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace specloc::io
