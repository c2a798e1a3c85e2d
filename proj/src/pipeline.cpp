#include "fracslip/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "fracslip/dns.hpp"
#include "fracslip/error.hpp"

namespace fracslip {

namespace {

constexpr double kRateSlack = 0.3;
constexpr double kSlipLinTolerance = 0.2;
constexpr double kDualIdentityTolerance = 1e-6;
// Sign of a quantity that sits below these floors is reported as zero.
constexpr double kTraceSignFloor = 1e-10;  // relative to max |beta1_1| on the slab
constexpr double kQuadSignFloor = 1e-8;    // quadratic term relative to the linear term at the largest shear

class Logger {
 public:
  explicit Logger(std::ostream* out) : out_(out) {}
  void line(const std::string& s) {
    if (!out_) return;
    std::lock_guard<std::mutex> lock(mu_);
    *out_ << s << '\n' << std::flush;
  }

 private:
  std::ostream* out_;
  std::mutex mu_;
};

nlohmann::json truncation_json(const TruncationReport& t, double tol) {
  return {{"c1_shift_height", t.c1_shift_height},       {"c1_shift_depth", t.c1_shift_depth},
          {"comega_shift_height", t.comega_shift_height}, {"comega_shift_depth", t.comega_shift_depth},
          {"c11_shift_height", t.c11_shift_height},     {"c11_shift_depth", t.c11_shift_depth},
          {"max_shift", t.max_shift()},                 {"tolerance", tol},
          {"pass", t.max_shift() <= tol}};
}

nlohmann::json norm_json(const NormComponents& n) {
  return {{"grad", n.grad}, {"omega2", n.omega2}, {"sigma", n.sigma}, {"omega1", n.omega1}, {"total", n.total}};
}

nlohmann::json rate_json(const RateFit& r) {
  return {{"observed", r.observed},
          {"theoretical", r.theoretical},
          {"r_squared", r.r_squared},
          {"margin", r.margin()},
          {"pass", r.within_slack(kRateSlack)}};
}

int sign3(double x, double floor) {
  if (std::abs(x) <= floor) return 0;
  return x > 0.0 ? 1 : -1;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

std::string format_point(const ParameterPoint& p) { return p.label(); }

}  // namespace

std::string csv_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  return buf;
}

CellStage run_cell_stage(const RunConfig& config, std::ostream* log) {
  Logger out(log);
  CellStage st;
  st.cell = build_unit_cell(config.shape);
  st.slab = build_bl_slab(*st.cell, config.slab_rows_below, config.slab_height_above, config.cells_per_period);
  out.line("cell: slab " + std::to_string(st.slab->grid->nx) + " x " + std::to_string(st.slab->grid->ny));
  st.first = solve_first_layer(*st.slab);
  st.second = solve_second_layer(*st.slab, *st.first);
  st.truncation = truncation_study(*st.cell, config.slab_rows_below, config.slab_height_above, config.cells_per_period,
                                   config.truncation_tolerance, false);
  st.constants = constants_json(*st.first, *st.second);
  st.constants["truncation"] = truncation_json(st.truncation, config.truncation_tolerance);
  const double gap = st.constants["first_layer"]["dual_identity_rel_gap"].get<double>();
  st.constants["checks"] = {{"dual_identity", gap <= kDualIdentityTolerance},
                            {"c1_negative", st.first->c_velocity < 0.0},
                            {"truncation", st.truncation.max_shift() <= config.truncation_tolerance}};
  st.constants["fluid_fraction"] = st.cell->fluid_fraction();
  st.constants["beta1_max_abs"] = max_abs(st.second->field.u);

  if (config.refine_check) {
    const int n2 = 2 * config.cells_per_period;
    out.line("cell: refinement check at " + std::to_string(n2) + " cells per period");
    const auto slab2 = build_bl_slab(*st.cell, config.slab_rows_below, config.slab_height_above, n2);
    const auto f2 = solve_first_layer(slab2);
    const auto s2 = solve_second_layer(slab2, f2);
    // Staircase boundaries converge at first order, so the extrapolation is 2 C(h/2) - C(h).
    auto block = [](double coarse, double fine) {
      return nlohmann::json{{"coarse", coarse},
                            {"fine", fine},
                            {"delta", fine - coarse},
                            {"richardson", 2.0 * fine - coarse}};
    };
    st.constants["refinement"] = {{"cells_per_period", {config.cells_per_period, n2}},
                                  {"assumed_order", 1},
                                  {"C1", block(st.first->c_velocity, f2.c_velocity)},
                                  {"C_omega", block(st.first->c_pressure, f2.c_pressure)},
                                  {"C11", block(st.second->c_velocity, s2.c_velocity)},
                                  {"C_pi1", block(st.second->c_pressure, s2.c_pressure)}};
  }
  return st;
}

namespace {

struct Task {
  std::size_t point;
  double epsilon;
  double F;
};

PointRecord run_point(const RunConfig& config, const CellStage& cell, const Task& task, Logger& out) {
  PointRecord rec;
  rec.point = task.point;
  rec.epsilon = task.epsilon;
  rec.F = task.F;
  const auto& pp = config.points[task.point];
  const auto p = pp.at(task.epsilon, task.F);
  const std::string tag = format_point(pp) + " eps=" + csv_number(task.epsilon) + " F=" + csv_number(task.F);

  const auto hyp = validate_hypotheses(p);
  if (!hyp.all_pass() && !config.allow_out_of_hypothesis) {
    rec.status = "hypothesis_fail";
    std::string failed;
    for (const auto& f : hyp.failures()) failed += (failed.empty() ? "" : ",") + f;
    rec.message = "violates " + failed;
    out.line("skip " + tag + ": " + rec.message);
    return rec;
  }

  const auto dom = build_grid_domain(*cell.cell, task.epsilon, p.delta, config.cells_per_period);
  DNSOptions opt;
  opt.picard.tol = config.picard_tolerance;
  opt.picard.damping = config.picard_damping;
  opt.picard.max_iter = config.picard_max_iterations;
  opt.allow_out_of_hypothesis = config.allow_out_of_hypothesis;
  const auto key = dns_cache_key(config.shape, p, dom, opt);

  std::optional<DNSSolution> sol;
  if (auto hit = cache_load(config.cache_dir, key, dom)) {
    sol = DNSSolution{std::move(hit->first), p, dom, std::move(hit->second)};
    rec.from_cache = true;
  } else if (config.skip_dns) {
    throw Error(ErrorCode::MissingArtifacts, "no cached DNS for " + tag + " (key " + key + ")");
  } else {
    try {
      sol = run_dns(p, dom, opt);
    } catch (const Error& e) {
      rec.status = "compute_fail";
      rec.message = e.what();
      out.line("fail " + tag + ": " + rec.message);
      return rec;
    }
    cache_store(config.cache_dir, key, *sol,
                {{"label", format_point(pp)}, {"epsilon", task.epsilon}, {"F", task.F},
                 {"delta", p.delta}, {"gamma", p.gamma}});
  }

  rec.status = "ok";
  rec.picard_iterations = sol->stats.picard_iterations;
  rec.momentum_residual = sol->stats.momentum_residual;
  rec.divergence = sol->stats.divergence_norm;
  const auto tr = interface_trace(sol->field, dom);
  rec.slip = tr.slip_average;
  rec.shear = tr.shear_average;
  rec.fracture_mean = fracture_mean_velocity(sol->field, dom);
  rec.poiseuille_mean = std::pow(task.epsilon, 2.0 * p.delta - p.gamma) * task.F / 12.0;

  if (task.F == config.rate_force) {
    rec.has_norms = true;
    const auto v0 = [&] {
      auto a = compose_approximation(p, dom.fracture_height, *cell.first, nullptr, 0);
      a.beta_coef = 0.0;
      a.couette_coef = 0.0;
      return a.sample(dom);
    }();
    rec.apriori = weighted_norm(error_field(sol->field, v0), dom, WeightSet::APriori, p);
    for (int o = 0; o <= 2; ++o) {
      const auto a = compose_approximation(p, dom.fracture_height, *cell.first, &*cell.second, o, config.order1_sign);
      rec.order[o] = weighted_norm(error_field(sol->field, a.sample(dom)), dom, weights_for_order(o), p);
    }
  }
  out.line(std::string(rec.from_cache ? "cached " : "solved ") + tag + " picard=" +
           std::to_string(rec.picard_iterations));
  return rec;
}

}  // namespace

SweepResult run_sweep(const RunConfig& config, const SweepOptions& options) {
  Logger out(options.log);
  SweepResult res;
  res.cell = run_cell_stage(config, options.log);

  std::vector<Task> tasks;
  for (std::size_t k = 0; k < config.points.size(); ++k) {
    for (double e : config.epsilons) {
      for (double F : config.forces) tasks.push_back({k, e, F});
    }
  }
  res.records.resize(tasks.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (;;) {
      const std::size_t k = next++;
      if (k >= tasks.size()) return;
      try {
        res.records[k] = run_point(config, res.cell, tasks[k], out);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next = tasks.size();
        return;
      }
    }
  };
  const int jobs = std::max(1, std::min<int>(options.jobs, static_cast<int>(tasks.size())));
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  res.summary = build_summary(config, res.cell, res.records);
  return res;
}

nlohmann::json build_summary(const RunConfig& config, const CellStage& cell, const std::vector<PointRecord>& records) {
  nlohmann::json s;
  s["config"] = config.physics_json();
  s["config_hash"] = config.hash();
  s["constants"] = cell.constants;
  const double c1 = cell.first->c_velocity;

  nlohmann::json recs = nlohmann::json::array();
  for (const auto& r : records) {
    nlohmann::json j = {{"point", r.point},      {"epsilon", r.epsilon}, {"F", r.F},
                        {"status", r.status},    {"message", r.message}};
    if (r.status == "ok") {
      j["picard_iterations"] = r.picard_iterations;
      j["momentum_residual"] = r.momentum_residual;
      j["divergence"] = r.divergence;
      j["slip"] = r.slip;
      j["shear"] = r.shear;
      j["fracture_mean"] = r.fracture_mean;
      j["poiseuille_mean"] = r.poiseuille_mean;
      if (r.has_norms) {
        j["apriori"] = norm_json(r.apriori);
        for (int o = 0; o <= 2; ++o) j["order" + std::to_string(o)] = norm_json(r.order[o]);
      }
    }
    recs.push_back(j);
  }
  s["records"] = recs;

  nlohmann::json points = nlohmann::json::array();
  nlohmann::json checks;
  bool all_apriori = true, all_hierarchy = true;
  std::vector<SlipSample> saffman_samples;
  for (std::size_t k = 0; k < config.points.size(); ++k) {
    const auto& pp = config.points[k];
    const auto p_mid = pp.at(config.epsilons.front(), config.rate_force);
    const auto hyp = validate_hypotheses(p_mid);
    nlohmann::json pj = {{"label", pp.label()}, {"delta", pp.delta}, {"gamma", pp.gamma},
                         {"hypotheses", hyp.to_json()}};
    if (pp.eta) pj["eta"] = *pp.eta;

    // Rates over eps at F = rate_F.
    std::vector<double> eps;
    std::vector<double> nap, n0, n1, n2;
    for (const auto& r : records) {
      if (r.point != k || r.status != "ok" || !r.has_norms) continue;
      eps.push_back(r.epsilon);
      nap.push_back(r.apriori.total);
      n0.push_back(r.order[0].total);
      n1.push_back(r.order[1].total);
      n2.push_back(r.order[2].total);
    }
    if (eps.size() >= 3) {
      const auto ra = fit_rate(eps, nap, hyp.rate_apriori);
      const auto r0 = fit_rate(eps, n0, hyp.rate_order0);
      const auto r1 = fit_rate(eps, n1, hyp.rate_order1);
      const auto r2 = fit_rate(eps, n2, hyp.rate_order2);
      pj["rates"] = {{"apriori", rate_json(ra)}, {"order0", rate_json(r0)}, {"order1", rate_json(r1)},
                     {"order2", rate_json(r2)}};
      const bool increasing = r0.observed < r1.observed && r1.observed < r2.observed;
      const bool slack = r0.within_slack(kRateSlack) && r1.within_slack(kRateSlack) && r2.within_slack(kRateSlack);
      pj["hierarchy"] = {{"strictly_increasing", increasing}, {"within_slack", slack}, {"pass", increasing && slack}};
      all_apriori = all_apriori && ra.within_slack(kRateSlack);
      all_hierarchy = all_hierarchy && increasing && slack;
      // Norm ordering at the smallest eps.
      const auto smallest = std::min_element(eps.begin(), eps.end()) - eps.begin();
      pj["norm_monotone_at_smallest_eps"] = n2[smallest] <= n1[smallest] && n1[smallest] <= n0[smallest];
    } else {
      pj["rates"] = nullptr;
      pj["rates_reason"] = "fewer than 3 converged eps values";
      all_apriori = false;
      all_hierarchy = false;
    }

    // Slip regression per eps over F.
    nlohmann::json slips = nlohmann::json::array();
    for (double e : config.epsilons) {
      std::vector<SlipSample> samples;
      for (const auto& r : records) {
        if (r.point != k || r.status != "ok" || r.epsilon != e) continue;
        samples.push_back({r.F, r.epsilon, pp.eta.value_or(1.5 - pp.gamma), r.slip, r.shear});
        if (r.F == config.rate_force && pp.eta) saffman_samples.push_back(samples.back());
      }
      const auto p = pp.at(e, config.rate_force);
      const auto dom = build_grid_domain(*cell.cell, e, p.delta, config.cells_per_period);
      const auto pred = predict_slip(p, dom, *cell.first, *cell.second, config.order1_sign);
      nlohmann::json sj = {{"epsilon", e}, {"samples", samples.size()}, {"prediction", pred.to_json()}};
      try {
        const auto fit = slip_regression(samples);
        sj["fit"] = {{"a_lin", fit.a_lin}, {"a_quad", fit.a_quad}, {"residual", fit.residual}};
        double smax = 0.0;
        for (const auto& x : samples) smax = std::max(smax, std::abs(x.shear_eff));
        sj["fit"]["a_lin_rel_to_leading"] = std::abs(fit.a_lin - pred.a_lin_leading) / std::abs(pred.a_lin_leading);
        sj["fit"]["a_lin_rel_to_closed_form"] = std::abs(fit.a_lin - pred.a_lin_closed_form) / std::abs(pred.a_lin_closed_form);
        sj["fit"]["a_quad_sign"] = sign3(fit.a_quad, kQuadSignFloor * std::abs(fit.a_lin) / smax);
      } catch (const Error& err) {
        sj["fit"] = nullptr;
        sj["fit_error"] = err.what();
      }
      slips.push_back(sj);
    }
    pj["slip"] = slips;
    points.push_back(pj);
  }
  s["points"] = points;

  // Slip law check at eps = 1/8, eta = 1/2.
  const double trace = cell.second->trace_average;
  const int predicted_sign = -sign3(trace, kTraceSignFloor * max_abs(cell.second->field.u));
  nlohmann::json slip_check = {{"available", false}};
  for (const auto& pj : s["points"]) {
    if (!pj.contains("eta") || std::abs(pj["eta"].get<double>() - 0.5) > 1e-12) continue;
    for (const auto& sj : pj["slip"]) {
      if (std::abs(sj["epsilon"].get<double>() - 0.125) > 1e-12 || sj["fit"].is_null()) continue;
      const double rel = sj["fit"]["a_lin_rel_to_leading"].get<double>();
      const int observed = sj["fit"]["a_quad_sign"].get<int>();
      slip_check = {{"available", true},
                    {"a_lin", sj["fit"]["a_lin"]},
                    {"a_lin_leading", sj["prediction"]["a_lin_leading"]},
                    {"a_lin_rel", rel},
                    {"a_lin_pass", rel <= kSlipLinTolerance},
                    {"a_quad", sj["fit"]["a_quad"]},
                    {"beta1_trace", trace},
                    {"a_quad_sign_observed", observed},
                    {"a_quad_sign_predicted", predicted_sign},
                    {"a_quad_pass", observed == predicted_sign}};
    }
  }
  checks["slip_dns"] = slip_check;

  if (!saffman_samples.empty()) {
    try {
      const auto sr = saffman_check(saffman_samples, c1);
      nlohmann::json rows = nlohmann::json::array();
      for (const auto& r : sr.rows) {
        rows.push_back({{"epsilon", r.epsilon},
                        {"eta", r.eta},
                        {"F", r.F},
                        {"v1_eff", r.v1_eff},
                        {"linear_prediction", r.linear_prediction},
                        {"relative_residual", r.relative_residual}});
      }
      nlohmann::json rates = nlohmann::json::array();
      for (const auto& r : sr.residual_rates) rates.push_back({{"eta", r.eta}, {"F", r.F}, {"fit", rate_json(r.fit)}});
      s["saffman"] = {{"rows", rows}, {"residual_rates", rates}, {"monotone_in_eta", sr.monotone_in_eta}};
      checks["saffman_monotone"] = sr.monotone_in_eta;
    } catch (const Error& err) {
      s["saffman"] = {{"error", err.what()}};
      checks["saffman_monotone"] = false;
    }
  }

  checks["dual_identity"] = cell.constants["checks"]["dual_identity"];
  checks["c1_negative"] = cell.constants["checks"]["c1_negative"];
  checks["truncation"] = cell.constants["checks"]["truncation"];
  checks["apriori_rate"] = all_apriori;
  checks["corrector_hierarchy"] = all_hierarchy;
  std::size_t skipped = 0, failed = 0;
  for (const auto& r : records) {
    skipped += r.status == "hypothesis_fail";
    failed += r.status == "compute_fail";
  }
  checks["hypothesis_skipped_points"] = skipped;
  checks["compute_failures"] = failed;
  s["checks"] = checks;
  return s;
}

void write_sweep_outputs(const SweepResult& result, const RunConfig& config, const std::filesystem::path& dir) {
  const auto& s = result.summary;
  auto eta_text = [&](std::size_t k) {
    return config.points[k].eta ? csv_number(*config.points[k].eta) : std::string{};
  };

  std::ostringstream err;
  err << "order,epsilon,eta,F,norm_grad,norm_omega2,norm_sigma,norm_omega1,norm_total,theoretical_rate,observed_rate\n";
  std::ostringstream apr;
  apr << "epsilon,eta,delta,gamma,F,norm_grad,norm_omega2,norm_sigma,norm_omega1,norm_total,theoretical_rate,"
         "observed_rate\n";
  for (std::size_t k = 0; k < config.points.size(); ++k) {
    const auto& rates = s["points"][k]["rates"];
    for (int o = 0; o <= 2; ++o) {
      for (const auto& r : result.records) {
        if (r.point != k || r.status != "ok" || !r.has_norms) continue;
        const auto& n = r.order[o];
        const auto& rj = rates.is_null() ? nlohmann::json() : rates["order" + std::to_string(o)];
        err << o << ',' << csv_number(r.epsilon) << ',' << eta_text(k) << ',' << csv_number(r.F) << ','
            << csv_number(n.grad) << ',' << csv_number(n.omega2) << ',' << csv_number(n.sigma) << ','
            << csv_number(n.omega1) << ',' << csv_number(n.total) << ','
            << (rj.is_null() ? std::string{} : csv_number(rj["theoretical"].get<double>())) << ','
            << (rj.is_null() ? std::string{} : csv_number(rj["observed"].get<double>())) << '\n';
      }
    }
    for (const auto& r : result.records) {
      if (r.point != k || r.status != "ok" || !r.has_norms) continue;
      const auto& n = r.apriori;
      const auto& rj = rates.is_null() ? nlohmann::json() : rates["apriori"];
      apr << csv_number(r.epsilon) << ',' << eta_text(k) << ',' << csv_number(config.points[k].delta) << ','
          << csv_number(config.points[k].gamma) << ',' << csv_number(r.F) << ',' << csv_number(n.grad) << ','
          << csv_number(n.omega2) << ',' << csv_number(n.sigma) << ',' << csv_number(n.omega1) << ','
          << csv_number(n.total) << ','
          << (rj.is_null() ? std::string{} : csv_number(rj["theoretical"].get<double>())) << ','
          << (rj.is_null() ? std::string{} : csv_number(rj["observed"].get<double>())) << '\n';
    }
  }

  std::ostringstream slip;
  slip << "epsilon,eta,F,v1_eff,shear_eff,a_lin_pred,a_quad_pred\n";
  for (std::size_t k = 0; k < config.points.size(); ++k) {
    for (const auto& sj : s["points"][k]["slip"]) {
      const double e = sj["epsilon"].get<double>();
      for (const auto& r : result.records) {
        if (r.point != k || r.status != "ok" || r.epsilon != e) continue;
        slip << csv_number(e) << ',' << eta_text(k) << ',' << csv_number(r.F) << ',' << csv_number(r.slip) << ','
             << csv_number(r.shear) << ',' << csv_number(sj["prediction"]["a_lin_closed_form"].get<double>()) << ','
             << csv_number(sj["prediction"]["a_quad_closed_form"].get<double>()) << '\n';
      }
    }
  }

  std::filesystem::create_directories(dir);
  write_file_atomic(dir / "errors.csv", err.str());
  write_file_atomic(dir / "apriori.csv", apr.str());
  write_file_atomic(dir / "slip.csv", slip.str());
  write_file_atomic(dir / "constants.json", result.cell.constants.dump(2) + "\n");
  write_file_atomic(dir / "summary.json", s.dump(2) + "\n");
}

std::string write_report(const std::filesystem::path& dir) {
  const auto path = dir / "summary.json";
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingArtifacts, "no summary at " + path.string() + "; run 'sweep' first");
  nlohmann::json s;
  try {
    s = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MissingArtifacts, "summary " + path.string() + " is unreadable: " + e.what());
  }

  std::ostringstream txt;
  char line[256];
  const auto& c = s["constants"];
  txt << "config " << s["config_hash"].get<std::string>() << "\n\n";
  std::snprintf(line, sizeof line, "C1 = %.8f   C_omega = %.8f   C11 = %.3e   C_pi1 = %.3e\n",
                c["C1"].get<double>(), c["C_omega"].get<double>(), c["C11"].get<double>(), c["C_pi1"].get<double>());
  txt << line;
  std::snprintf(line, sizeof line, "dual identity gap %.2e   truncation max shift %.2e\n\n",
                c["first_layer"]["dual_identity_rel_gap"].get<double>(), c["truncation"]["max_shift"].get<double>());
  txt << line;

  std::ostringstream dat_err;
  std::ostringstream dat_slip;
  txt << "rates (log-log slope over eps)\n";
  txt << "point                        norm       theoretical  observed   R^2      pass\n";
  for (const auto& pj : s["points"]) {
    const auto label = pj["label"].get<std::string>();
    if (pj["rates"].is_null()) {
      txt << label << "  no rates: " << pj.value("rates_reason", std::string{}) << '\n';
      continue;
    }
    for (const char* key : {"apriori", "order0", "order1", "order2"}) {
      const auto& r = pj["rates"][key];
      std::snprintf(line, sizeof line, "%-28s %-10s %11.5f %10.5f %8.5f   %s\n", label.c_str(), key,
                    r["theoretical"].get<double>(), r["observed"].get<double>(), r["r_squared"].get<double>(),
                    r["pass"].get<bool>() ? "yes" : "no");
      txt << line;
    }
    txt << "  hierarchy strictly increasing: " << (pj["hierarchy"]["strictly_increasing"].get<bool>() ? "yes" : "no")
        << '\n';
  }

  // errors.dat: one gnuplot index per (point, norm).
  for (std::size_t k = 0; k < s["points"].size(); ++k) {
    for (const char* key : {"apriori", "order0", "order1", "order2"}) {
      dat_err << "# " << s["points"][k]["label"].get<std::string>() << ' ' << key << "\n# epsilon norm_total\n";
      for (const auto& r : s["records"]) {
        if (r["point"].get<std::size_t>() != k || r["status"] != "ok" || !r.contains(key)) continue;
        dat_err << csv_number(r["epsilon"].get<double>()) << ' ' << csv_number(r[key]["total"].get<double>()) << '\n';
      }
      dat_err << "\n\n";
    }
  }

  txt << "\nslip law (fit v1 = a_lin s + a_quad s^2 over F)\n";
  txt << "point                        epsilon   a_lin(DNS)     -C1 eps        closed a_lin   a_quad(DNS)\n";
  for (const auto& pj : s["points"]) {
    const auto label = pj["label"].get<std::string>();
    dat_slip << "# " << label << "\n# epsilon a_lin_dns a_lin_leading a_lin_closed_form a_quad_dns\n";
    for (const auto& sj : pj["slip"]) {
      if (sj["fit"].is_null()) continue;
      const double e = sj["epsilon"].get<double>();
      const double al = sj["fit"]["a_lin"].get<double>();
      const double lead = sj["prediction"]["a_lin_leading"].get<double>();
      const double closed = sj["prediction"]["a_lin_closed_form"].get<double>();
      const double aq = sj["fit"]["a_quad"].get<double>();
      std::snprintf(line, sizeof line, "%-28s %-9.5f %-14.6e %-14.6e %-14.6e %.3e\n", label.c_str(), e, al, lead,
                    closed, aq);
      txt << line;
      dat_slip << csv_number(e) << ' ' << csv_number(al) << ' ' << csv_number(lead) << ' ' << csv_number(closed)
               << ' ' << csv_number(aq) << '\n';
    }
    dat_slip << "\n\n";
  }

  txt << "\nchecks\n";
  for (const auto& [name, value] : s["checks"].items()) {
    txt << "  " << name << ": " << value.dump() << '\n';
  }

  write_file_atomic(dir / "errors.dat", dat_err.str());
  write_file_atomic(dir / "slip.dat", dat_slip.str());
  write_file_atomic(dir / "report.txt", txt.str());
  return txt.str();
}

}  // namespace fracslip
