#include "fracslip/dns.hpp"

#include <atomic>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include "fracslip/error.hpp"
#include "fracslip/hash.hpp"

namespace fracslip {

static_assert(std::endian::native == std::endian::little, "cache format assumes a little-endian host");

SaddleProblem dns_problem(const ScalingParams& p, const GridDomain& dom, bool convection) {
  const auto& g = *dom.grid;
  SaddleProblem pb;
  pb.grid = dom.grid;
  pb.viscosity = p.viscosity();
  pb.convection = convection;
  pb.gauge.kind = PressureGauge::Kind::FractureMean;
  pb.force_u.assign(static_cast<std::size_t>(g.nx * g.ny), 0.0);
  const int r0 = dom.interface_row();
  for (int j = r0; j < g.ny; ++j) {
    const double f = j == r0 ? 0.5 * p.F : p.F;
    for (int i = 0; i < g.nx; ++i) pb.force_u[static_cast<std::size_t>(i + g.nx * j)] = f;
  }
  return pb;
}

DNSSolution run_dns(const ScalingParams& p, const GridDomain& dom, const DNSOptions& options) {
  const auto report = validate_hypotheses(p);
  if (!report.all_pass() && !options.allow_out_of_hypothesis) {
    std::string failed;
    for (const auto& n : report.failures()) failed += (failed.empty() ? "" : ", ") + n;
    throw Error(ErrorCode::HypothesisViolated, "parameters violate " + failed);
  }
  if (std::abs(dom.epsilon - p.epsilon) > 1e-12 || std::abs(dom.delta - p.delta) > 1e-12) {
    throw Error(ErrorCode::GridMismatch, "grid domain was built for different epsilon/delta");
  }
  const auto pb = dns_problem(p, dom, options.convection);
  auto [field, stats] = solve_navier_stokes(pb, options.picard);
  return {std::move(field), p, dom, std::move(stats)};
}

InterfaceTrace interface_trace(const StaggeredField& f, const GridDomain& dom) {
  const auto& g = *dom.grid;
  const int r0 = dom.interface_row();
  const int n = dom.cells_per_period;
  InterfaceTrace t;
  double slip_total = 0.0;
  double shear_total = 0.0;
  for (int period = 0; period < dom.periods; ++period) {
    double slip = 0.0;
    double shear = 0.0;
    for (int k = 0; k < n; ++k) {
      const int i = period * n + k;
      slip += f.U(i, r0);
      shear += (-3.0 * f.U(i, r0) + 4.0 * f.U(i, r0 + 1) - f.U(i, r0 + 2)) / (2.0 * g.h);
    }
    t.slip_per_period.push_back(slip / n);
    t.shear_per_period.push_back(shear / n);
    slip_total += slip;
    shear_total += shear;
  }
  t.slip_average = slip_total / g.nx;
  t.shear_average = shear_total / g.nx;
  return t;
}

double fracture_mean_velocity(const StaggeredField& f, const GridDomain& dom) {
  const auto& g = *dom.grid;
  const int r0 = dom.interface_row();
  double s = 0.0;
  for (int j = r0; j < g.ny; ++j) {
    const double w = j == r0 ? 0.5 : 1.0;
    for (int i = 0; i < g.nx; ++i) s += w * f.U(i, j);
  }
  // The implicit wall row above the grid contributes a zero at half weight.
  return s / (g.nx * static_cast<double>(dom.fracture_rows));
}

std::string dns_cache_key(const ShapeSpec& shape, const ScalingParams& p, const GridDomain& dom,
                          const DNSOptions& options) {
  nlohmann::json j;
  j["shape"] = {{"kind", shape.kind == ShapeKind::Disc ? "disc" : "superellipse"},
                {"radius", shape.radius},
                {"half_width", shape.half_width},
                {"half_height", shape.half_height},
                {"exponent", shape.exponent},
                {"rotation", shape.rotation}};
  j["params"] = {{"epsilon", p.epsilon}, {"delta", p.delta}, {"gamma", p.gamma}, {"F", p.F}};
  j["grid"] = {{"cells_per_period", dom.cells_per_period}, {"periods", dom.periods}};
  j["solver"] = {{"tol", options.picard.tol}, {"convection", options.convection}};
  j["format"] = 1;
  return sha256_hex(j.dump());
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  static std::atomic<unsigned long> counter{0};
  std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ostringstream suffix;
  suffix << ".tmp." << std::hash<std::thread::id>{}(std::this_thread::get_id()) << "." << counter++;
  const auto tmp = path.string() + suffix.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot open " + tmp + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, "short write to " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error(ErrorCode::IoError, "cannot rename " + tmp + ": " + ec.message());
  }
}

namespace {

std::string pack(const StaggeredField& f) {
  std::string bytes;
  for (const auto* arr : {&f.u, &f.v, &f.p}) {
    bytes.append(reinterpret_cast<const char*>(arr->data()), arr->size() * sizeof(double));
  }
  return bytes;
}

std::optional<std::string> read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

void cache_store(const std::filesystem::path& dir, const std::string& key, const DNSSolution& sol,
                 const nlohmann::json& meta) {
  const std::string bytes = pack(sol.field);
  nlohmann::json side = meta;
  side["sha256"] = sha256_hex(bytes);
  side["nx"] = sol.field.grid->nx;
  side["ny"] = sol.field.grid->ny;
  side["stats"] = {{"picard_iterations", sol.stats.picard_iterations},
                   {"momentum_residual", sol.stats.momentum_residual},
                   {"divergence", sol.stats.divergence_norm},
                   {"linear_residual", sol.stats.linear_residual},
                   {"picard_history", sol.stats.picard_history}};
  // Binary first: a sidecar never points at a missing or partial snapshot.
  write_file_atomic(dir / (key + ".bin"), bytes);
  write_file_atomic(dir / (key + ".json"), side.dump(1) + "\n");
}

std::optional<std::pair<StaggeredField, SolveStats>> cache_load(const std::filesystem::path& dir,
                                                                const std::string& key,
                                                                const GridDomain& dom) {
  const auto side_text = read_all(dir / (key + ".json"));
  const auto bytes = read_all(dir / (key + ".bin"));
  if (!side_text || !bytes) return std::nullopt;
  nlohmann::json side;
  try {
    side = nlohmann::json::parse(*side_text);
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
  if (side.value("sha256", std::string{}) != sha256_hex(*bytes)) return std::nullopt;
  auto f = StaggeredField::zeros(dom.grid);
  const std::size_t need = (f.u.size() + f.v.size() + f.p.size()) * sizeof(double);
  if (bytes->size() != need) return std::nullopt;
  const char* src = bytes->data();
  for (auto* arr : {&f.u, &f.v, &f.p}) {
    std::memcpy(arr->data(), src, arr->size() * sizeof(double));
    src += arr->size() * sizeof(double);
  }
  SolveStats stats;
  const auto& st = side.at("stats");
  stats.picard_iterations = st.at("picard_iterations").get<int>();
  stats.momentum_residual = st.at("momentum_residual").get<double>();
  stats.divergence_norm = st.at("divergence").get<double>();
  stats.linear_residual = st.at("linear_residual").get<double>();
  stats.picard_history = st.at("picard_history").get<std::vector<double>>();
  return std::make_pair(std::move(f), std::move(stats));
}

}  // namespace fracslip
