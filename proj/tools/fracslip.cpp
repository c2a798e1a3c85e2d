#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fracslip/config.hpp"
#include "fracslip/dns.hpp"
#include "fracslip/error.hpp"
#include "fracslip/pipeline.hpp"

using namespace fracslip;

namespace {

enum Exit { kOk = 0, kCompute = 1, kConfig = 2, kMissing = 3 };

int exit_code(const Error& e) {
  switch (e.code()) {
    case ErrorCode::ConfigError:
    case ErrorCode::InvalidArgument:
    case ErrorCode::UnknownRegion:
      return kConfig;
    case ErrorCode::MissingArtifacts:
      return kMissing;
    default:
      return kCompute;
  }
}

struct Common {
  std::string config = "config/default.yaml";
  std::string cache;
  int jobs = 1;
  bool refine_check = false;
  bool skip_dns = false;
  bool allow_out_of_hypothesis = false;
};

RunConfig resolve(const Common& c) {
  auto cfg = load_config(c.config);
  if (!c.cache.empty()) cfg.cache_dir = c.cache;
  cfg.refine_check = cfg.refine_check || c.refine_check;
  cfg.skip_dns = cfg.skip_dns || c.skip_dns;
  cfg.allow_out_of_hypothesis = cfg.allow_out_of_hypothesis || c.allow_out_of_hypothesis;
  return cfg;
}

int cmd_cell(const Common& c) {
  const auto cfg = resolve(c);
  const auto st = run_cell_stage(cfg, &std::cerr);
  std::filesystem::create_directories(cfg.output_dir);
  write_file_atomic(cfg.output_dir / "constants.json", st.constants.dump(2) + "\n");
  const auto& k = st.constants;
  std::printf("C1        %.10f\n", k["C1"].get<double>());
  std::printf("C_omega   %.10f\n", k["C_omega"].get<double>());
  std::printf("C11       %.3e\n", k["C11"].get<double>());
  std::printf("C_pi1     %.3e\n", k["C_pi1"].get<double>());
  std::printf("dual identity gap  %.2e (%s)\n", k["first_layer"]["dual_identity_rel_gap"].get<double>(),
              k["checks"]["dual_identity"].get<bool>() ? "pass" : "FAIL");
  for (const char* d : {"decay_above_velocity", "decay_above_pressure", "decay_below_velocity"}) {
    const auto& fit = k["first_layer"][d];
    if (fit.is_null()) {
      std::printf("%-22s n/a\n", d);
    } else {
      std::printf("%-22s rate %.4f  R^2 %.6f  points %d\n", d, fit["rate"].get<double>(),
                  fit["r_squared"].get<double>(), fit["points"].get<int>());
    }
  }
  std::printf("truncation max shift %.2e (%s)\n", k["truncation"]["max_shift"].get<double>(),
              k["truncation"]["pass"].get<bool>() ? "pass" : "FAIL");
  if (k.contains("refinement")) {
    for (const char* name : {"C1", "C_omega", "C11", "C_pi1"}) {
      const auto& r = k["refinement"][name];
      std::printf("refine %-8s h: %.8e  h/2: %.8e  delta %.2e  extrapolated %.8e\n", name, r["coarse"].get<double>(),
                  r["fine"].get<double>(), r["delta"].get<double>(), r["richardson"].get<double>());
    }
  }
  std::printf("wrote %s\n", (cfg.output_dir / "constants.json").string().c_str());
  return kOk;
}

struct DnsArgs {
  double epsilon = 0.125;
  double eta = -1.0;
  double delta = -1.0;
  double gamma = -1.0;
  double F = 1.0;
};

int cmd_dns(const Common& c, const DnsArgs& a) {
  const auto cfg = resolve(c);
  ScalingParams p;
  if (a.eta >= 0.0) {
    p = ScalingParams::from_eta(a.epsilon, a.eta, a.F);
  } else if (a.delta >= 0.0 && a.gamma >= 0.0) {
    p.epsilon = a.epsilon;
    p.delta = a.delta;
    p.gamma = a.gamma;
    p.F = a.F;
  } else {
    throw Error(ErrorCode::ConfigError, "dns needs --eta or both --delta and --gamma");
  }
  const auto cell = build_unit_cell(cfg.shape);
  const auto dom = build_grid_domain(cell, p.epsilon, p.delta, cfg.cells_per_period);
  DNSOptions opt;
  opt.picard.tol = cfg.picard_tolerance;
  opt.picard.damping = cfg.picard_damping;
  opt.picard.max_iter = cfg.picard_max_iterations;
  opt.allow_out_of_hypothesis = cfg.allow_out_of_hypothesis;
  const auto key = dns_cache_key(cfg.shape, p, dom, opt);

  nlohmann::json out;
  std::optional<DNSSolution> sol;
  if (auto hit = cache_load(cfg.cache_dir, key, dom)) {
    sol = DNSSolution{std::move(hit->first), p, dom, std::move(hit->second)};
    out["from_cache"] = true;
  } else {
    if (cfg.skip_dns) throw Error(ErrorCode::MissingArtifacts, "no cached DNS for key " + key);
    sol = run_dns(p, dom, opt);
    cache_store(cfg.cache_dir, key, *sol, {{"epsilon", p.epsilon}, {"F", p.F}, {"delta", p.delta}, {"gamma", p.gamma}});
    out["from_cache"] = false;
  }
  const auto tr = interface_trace(sol->field, dom);
  out["key"] = key;
  out["params"] = {{"epsilon", p.epsilon}, {"delta", p.delta}, {"gamma", p.gamma}, {"F", p.F}};
  out["grid"] = {{"nx", dom.grid->nx}, {"ny", dom.grid->ny}, {"fracture_rows", dom.fracture_rows},
                 {"fracture_height", dom.fracture_height}};
  out["picard_iterations"] = sol->stats.picard_iterations;
  out["momentum_residual"] = sol->stats.momentum_residual;
  out["divergence"] = sol->stats.divergence_norm;
  out["slip_average"] = tr.slip_average;
  out["shear_average"] = tr.shear_average;
  out["fracture_mean"] = fracture_mean_velocity(sol->field, dom);
  out["poiseuille_mean"] = std::pow(p.epsilon, 2.0 * p.delta - p.gamma) * p.F / 12.0;
  std::cout << out.dump(2) << '\n';
  return kOk;
}

int cmd_sweep(const Common& c) {
  const auto cfg = resolve(c);
  SweepOptions opt;
  opt.jobs = c.jobs;
  opt.log = &std::cerr;
  const auto res = run_sweep(cfg, opt);
  write_sweep_outputs(res, cfg, cfg.output_dir);
  std::cout << "config " << res.summary["config_hash"].get<std::string>() << '\n';
  for (const auto& [name, value] : res.summary["checks"].items()) std::cout << name << ": " << value.dump() << '\n';
  std::cout << "wrote " << cfg.output_dir.string() << '\n';
  return res.summary["checks"]["compute_failures"].get<int>() > 0 ? kCompute : kOk;
}

int cmd_report(const Common& c) {
  const auto cfg = resolve(c);
  std::cout << write_report(cfg.output_dir);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Effective slip between a fracture and a periodic porous medium"};
  app.require_subcommand(1);
  Common common;
  DnsArgs dns_args;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "YAML run configuration")->capture_default_str();
    sub->add_option("--cache", common.cache, "DNS snapshot directory (overrides the config)");
  };
  auto* cell = app.add_subcommand("cell", "solve the boundary-layer cell problems");
  add_common(cell);
  cell->add_flag("--refine-check", common.refine_check, "repeat at half the grid spacing");

  auto* dns = app.add_subcommand("dns", "one direct simulation");
  add_common(dns);
  dns->add_option("--epsilon", dns_args.epsilon, "period length")->capture_default_str();
  dns->add_option("--eta", dns_args.eta, "eta parametrisation of (delta, gamma)");
  dns->add_option("--delta", dns_args.delta, "fracture height exponent");
  dns->add_option("--gamma", dns_args.gamma, "viscosity exponent");
  dns->add_option("--F", dns_args.F, "body force")->capture_default_str();
  dns->add_flag("--skip-dns", common.skip_dns, "only read from the cache");
  dns->add_flag("--allow-out-of-hypothesis", common.allow_out_of_hypothesis, "run points that violate H1-H3");

  auto* sweep = app.add_subcommand("sweep", "cell problems, DNS sweep and analysis");
  add_common(sweep);
  sweep->add_option("--jobs", common.jobs, "parallel DNS workers")->check(CLI::PositiveNumber)->capture_default_str();
  sweep->add_flag("--refine-check", common.refine_check, "repeat the cell problems at half the grid spacing");
  sweep->add_flag("--skip-dns", common.skip_dns, "only read DNS results from the cache");
  sweep->add_flag("--allow-out-of-hypothesis", common.allow_out_of_hypothesis, "run points that violate H1-H3");

  auto* report = app.add_subcommand("report", "text report and plot data from the sweep summary");
  add_common(report);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    if (*cell) return cmd_cell(common);
    if (*dns) return cmd_dns(common, dns_args);
    if (*sweep) return cmd_sweep(common);
    if (*report) return cmd_report(common);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kCompute;
  }
  return kOk;
}
