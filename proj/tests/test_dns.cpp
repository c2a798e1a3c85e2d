#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "fracslip/dns.hpp"
#include "fracslip/error.hpp"

namespace fracslip {
namespace {

namespace fs = std::filesystem;

UnitCell disc() { return build_unit_cell(ShapeSpec{}); }

ScalingParams params(double eps, double delta, double gamma, double F) {
  ScalingParams p;
  p.epsilon = eps;
  p.delta = delta;
  p.gamma = gamma;
  p.F = F;
  return p;
}

double max_abs(const std::vector<double>& a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

fs::path scratch(const std::string& name) {
  auto d = fs::temp_directory_path() / ("fracslip_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

// eps = 1/4, delta = 1/2: eps^delta = 1/2 is exactly 64 rows at 32 cells per period.
TEST(Dns, PoiseuilleTrace) {
  const auto p = params(0.25, 0.5, 0.5, 1.3);
  const auto dom = build_grid_domain(disc(), p.epsilon, p.delta, 32);
  ASSERT_DOUBLE_EQ(dom.fracture_height, dom.nominal_fracture_height);
  const auto v0 = poiseuille(p, dom.fracture_height);
  auto f = StaggeredField::zeros(dom.grid);
  const auto& g = *dom.grid;
  for (int j = dom.interface_row(); j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) f.U(i, j) = v0.v1(g.x_face(i), g.y_cell(j));
  const auto tr = interface_trace(f, dom);
  EXPECT_EQ(tr.slip_average, 0.0);
  EXPECT_NEAR(tr.shear_average, interface_shear(p), 1e-12 * interface_shear(p));
  ASSERT_EQ(tr.slip_per_period.size(), 1u);

  // Poiseuille mean over the fracture: eps^(2 delta - gamma) F / 12.
  const double mean = std::pow(p.epsilon, 2.0 * p.delta - p.gamma) * p.F / 12.0;
  EXPECT_NEAR(fracture_mean_velocity(f, dom), mean, 1e-3 * mean);
}

TEST(Dns, ZeroForceGivesZeroField) {
  const auto p = ScalingParams::from_eta(0.25, 0.5, 0.0);
  const auto dom = build_grid_domain(disc(), p.epsilon, p.delta, 32);
  const auto sol = run_dns(p, dom);
  EXPECT_EQ(max_abs(sol.field.u), 0.0);
  EXPECT_EQ(max_abs(sol.field.v), 0.0);
}

TEST(Dns, DefaultPointIsPoiseuilleLike) {
  const auto p = ScalingParams::from_eta(0.125, 0.5, 1.0);
  const auto dom = build_grid_domain(disc(), p.epsilon, p.delta, 32);
  const auto sol = run_dns(p, dom);
  EXPECT_LE(sol.stats.momentum_residual, 1e-10);
  const double poiseuille_mean = std::pow(p.epsilon, 2.0 * p.delta - p.gamma) * p.F / 12.0;
  const double ratio = fracture_mean_velocity(sol.field, dom) / poiseuille_mean;
  EXPECT_GE(ratio, 0.5);
  EXPECT_LE(ratio, 1.5);
  const auto tr = interface_trace(sol.field, dom);
  EXPECT_GT(tr.slip_average, 0.0);
  EXPECT_GT(tr.shear_average, 0.0);
}

TEST(Dns, StokesLimitIsLinearInForce) {
  DNSOptions opt;
  opt.convection = false;
  const auto p1 = ScalingParams::from_eta(0.25, 0.5, 1.0);
  auto p2 = p1;
  p2.F = -2.5;
  const auto dom = build_grid_domain(disc(), p1.epsilon, p1.delta, 32);
  const auto a = run_dns(p1, dom, opt);
  const auto b = run_dns(p2, dom, opt);
  const double scale = max_abs(a.field.u);
  ASSERT_GT(scale, 0.0);
  for (std::size_t k = 0; k < a.field.u.size(); ++k) EXPECT_NEAR(b.field.u[k], -2.5 * a.field.u[k], 1e-9 * scale);
}

TEST(Dns, FullWidthMatchesSinglePeriod) {
  const auto p = ScalingParams::from_eta(0.25, 0.5, 1.0);
  const auto one = build_grid_domain(disc(), p.epsilon, p.delta, 16);
  const auto all = build_grid_domain(disc(), p.epsilon, p.delta, 16, DomainWidth::Full);
  const auto a = interface_trace(run_dns(p, one).field, one);
  const auto b = interface_trace(run_dns(p, all).field, all);
  ASSERT_EQ(b.slip_per_period.size(), 4u);
  for (double s : b.slip_per_period) EXPECT_NEAR(s, a.slip_average, 1e-9 * std::abs(a.slip_average));
  EXPECT_NEAR(b.shear_average, a.shear_average, 1e-9 * std::abs(a.shear_average));
}

TEST(Dns, HypothesesEnforced) {
  const auto p = params(0.25, 0.9, 0.5, 1.0);
  const auto dom = build_grid_domain(disc(), p.epsilon, p.delta, 32);
  try {
    run_dns(p, dom);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::HypothesisViolated);
  }
  DNSOptions opt;
  opt.allow_out_of_hypothesis = true;
  EXPECT_NO_THROW(run_dns(p, dom, opt));
}

TEST(Dns, DomainMustMatchParameters) {
  const auto p = ScalingParams::from_eta(0.25, 0.5, 1.0);
  const auto dom = build_grid_domain(disc(), 0.25, 0.5, 32);
  try {
    run_dns(p, dom);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::GridMismatch);
  }
}

TEST(Dns, CacheKeyDependsOnInputs) {
  const auto shape = ShapeSpec{};
  const auto p = ScalingParams::from_eta(0.25, 0.5, 1.0);
  const auto dom = build_grid_domain(disc(), p.epsilon, p.delta, 16);
  const DNSOptions opt;
  const auto key = dns_cache_key(shape, p, dom, opt);
  EXPECT_EQ(key.size(), 64u);
  EXPECT_EQ(key, dns_cache_key(shape, p, dom, opt));
  auto q = p;
  q.F = 0.5;
  EXPECT_NE(key, dns_cache_key(shape, q, dom, opt));
  auto s = shape;
  s.radius = 0.3;
  EXPECT_NE(key, dns_cache_key(s, p, dom, opt));
}

TEST(Dns, CacheRoundTripAndTamper) {
  const auto dir = scratch("cache");
  const auto p = ScalingParams::from_eta(0.25, 0.5, 1.0);
  const auto dom = build_grid_domain(disc(), p.epsilon, p.delta, 16);
  const auto sol = run_dns(p, dom);
  const auto key = dns_cache_key(ShapeSpec{}, p, dom, {});

  EXPECT_FALSE(cache_load(dir, key, dom).has_value());
  cache_store(dir, key, sol, {{"F", p.F}});
  auto hit = cache_load(dir, key, dom);
  ASSERT_TRUE(hit.has_value());
  EXPECT_EQ(hit->first.u, sol.field.u);
  EXPECT_EQ(hit->first.v, sol.field.v);
  EXPECT_EQ(hit->first.p, sol.field.p);
  EXPECT_EQ(hit->second.picard_iterations, sol.stats.picard_iterations);

  // No temporary files left behind.
  int files = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    ++files;
    const auto ext = e.path().extension().string();
    EXPECT_TRUE(ext == ".bin" || ext == ".json") << e.path();
  }
  EXPECT_EQ(files, 2);

  {
    std::fstream bin(dir / (key + ".bin"), std::ios::in | std::ios::out | std::ios::binary);
    bin.seekp(17);
    bin.put('\x5a');
  }
  EXPECT_FALSE(cache_load(dir, key, dom).has_value());
  fs::remove_all(dir);
}

TEST(Dns, AtomicWriteReplacesContent) {
  const auto dir = scratch("atomic");
  const auto path = dir / "out.txt";
  write_file_atomic(path, "first\n");
  write_file_atomic(path, "second\n");
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "second");
  EXPECT_EQ(std::distance(fs::directory_iterator(dir), fs::directory_iterator{}), 1);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace fracslip
