#include "fracslip/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "fracslip/error.hpp"
#include "fracslip/hash.hpp"

namespace fracslip {

ScalingParams ParameterPoint::at(double epsilon, double F) const {
  if (eta) return ScalingParams::from_eta(epsilon, *eta, F);
  ScalingParams p;
  p.epsilon = epsilon;
  p.delta = delta;
  p.gamma = gamma;
  p.F = F;
  return p;
}

std::string ParameterPoint::label() const {
  std::ostringstream s;
  s.precision(6);
  if (eta) {
    s << "eta=" << *eta;
  } else {
    s << "delta=" << delta << ",gamma=" << gamma;
  }
  return s.str();
}

namespace {

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& msg) const {
    const auto m = node.Mark();
    std::string where = source_;
    if (!m.is_null()) where += ":" + std::to_string(m.line + 1) + ":" + std::to_string(m.column + 1);
    throw Error(ErrorCode::ConfigError, where + ": " + msg);
  }

  void require_map(const YAML::Node& node, const std::string& name, const std::set<std::string>& allowed) const {
    if (!node.IsMap()) fail(node, "'" + name + "' must be a mapping");
    for (const auto& kv : node) {
      const auto key = kv.first.as<std::string>();
      if (!allowed.count(key)) fail(kv.first, "unknown key '" + key + "' in '" + name + "'");
    }
  }

  double number(const YAML::Node& node, const std::string& name) const {
    if (!node.IsScalar()) fail(node, "'" + name + "' must be a number");
    double v = 0.0;
    if (!YAML::convert<double>::decode(node, v) || !std::isfinite(v)) {
      fail(node, "'" + name + "' must be a finite number, got '" + node.Scalar() + "'");
    }
    return v;
  }

  int integer(const YAML::Node& node, const std::string& name) const {
    if (!node.IsScalar()) fail(node, "'" + name + "' must be an integer");
    int v = 0;
    if (!YAML::convert<int>::decode(node, v)) fail(node, "'" + name + "' must be an integer, got '" + node.Scalar() + "'");
    return v;
  }

  bool boolean(const YAML::Node& node, const std::string& name) const {
    bool v = false;
    if (!node.IsScalar() || !YAML::convert<bool>::decode(node, v)) fail(node, "'" + name + "' must be true or false");
    return v;
  }

  std::string text(const YAML::Node& node, const std::string& name) const {
    if (!node.IsScalar()) fail(node, "'" + name + "' must be a string");
    return node.Scalar();
  }

  std::vector<double> numbers(const YAML::Node& node, const std::string& name) const {
    if (!node.IsSequence() || node.size() == 0) fail(node, "'" + name + "' must be a non-empty list of numbers");
    std::vector<double> out;
    for (const auto& x : node) out.push_back(number(x, name));
    return out;
  }

 private:
  std::string source_;
};

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& source_name) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::ConfigError, source_name + ":" + std::to_string(e.mark.line + 1) + ":" +
                                            std::to_string(e.mark.column + 1) + ": " + e.msg);
  }
  const Reader r(source_name);
  RunConfig c;
  if (root.IsNull()) return c;
  r.require_map(root, "<root>", {"geometry", "parameters", "solver", "output", "flags"});

  if (const auto g = root["geometry"]) {
    r.require_map(g, "geometry", {"shape", "radius", "half_width", "half_height", "exponent", "rotation",
                                  "cells_per_period", "slab_rows_below", "slab_height_above"});
    if (const auto n = g["shape"]) {
      const auto kind = r.text(n, "shape");
      if (kind == "disc") {
        c.shape.kind = ShapeKind::Disc;
      } else if (kind == "superellipse") {
        c.shape.kind = ShapeKind::Superellipse;
      } else {
        r.fail(n, "shape must be 'disc' or 'superellipse', got '" + kind + "'");
      }
    }
    if (const auto n = g["radius"]) c.shape.radius = r.number(n, "radius");
    if (const auto n = g["half_width"]) c.shape.half_width = r.number(n, "half_width");
    if (const auto n = g["half_height"]) c.shape.half_height = r.number(n, "half_height");
    if (const auto n = g["exponent"]) c.shape.exponent = r.number(n, "exponent");
    if (const auto n = g["rotation"]) c.shape.rotation = r.number(n, "rotation");
    if (const auto n = g["cells_per_period"]) {
      c.cells_per_period = r.integer(n, "cells_per_period");
      if (c.cells_per_period < 8 || c.cells_per_period % 2 != 0) {
        r.fail(n, "cells_per_period must be an even integer >= 8");
      }
    }
    if (const auto n = g["slab_rows_below"]) {
      c.slab_rows_below = r.integer(n, "slab_rows_below");
      if (c.slab_rows_below < 2) r.fail(n, "slab_rows_below must be >= 2");
    }
    if (const auto n = g["slab_height_above"]) {
      c.slab_height_above = r.number(n, "slab_height_above");
      if (c.slab_height_above < 1.5) r.fail(n, "slab_height_above must be >= 1.5");
    }
  }

  if (const auto pnode = root["parameters"]) {
    r.require_map(pnode, "parameters", {"eta", "points", "epsilon", "F", "rate_F", "order1_sign"});
    if (pnode["eta"] && pnode["points"]) r.fail(pnode, "give either 'eta' or 'points', not both");
    if (const auto n = pnode["eta"]) {
      c.points.clear();
      for (double eta : r.numbers(n, "eta")) c.points.push_back({eta, 1.0 - 7.0 * eta / 12.0, 1.5 - eta});
    }
    if (const auto n = pnode["points"]) {
      if (!n.IsSequence() || n.size() == 0) r.fail(n, "'points' must be a non-empty list of {delta, gamma}");
      c.points.clear();
      for (const auto& item : n) {
        r.require_map(item, "points[]", {"delta", "gamma"});
        if (!item["delta"] || !item["gamma"]) r.fail(item, "each point needs 'delta' and 'gamma'");
        c.points.push_back({std::nullopt, r.number(item["delta"], "delta"), r.number(item["gamma"], "gamma")});
      }
    }
    if (const auto n = pnode["epsilon"]) {
      c.epsilons = r.numbers(n, "epsilon");
      for (std::size_t k = 0; k < c.epsilons.size(); ++k) {
        const double e = c.epsilons[k];
        const double inv = 1.0 / e;
        if (!(e > 0.0 && e < 1.0) || std::abs(inv - std::round(inv)) > 1e-9 * inv) {
          r.fail(n[k], "epsilon must be 1/k for an integer k >= 2, got " + n[k].Scalar());
        }
      }
    }
    if (const auto n = pnode["F"]) c.forces = r.numbers(n, "F");
    if (const auto n = pnode["rate_F"]) c.rate_force = r.number(n, "rate_F");
    if (const auto n = pnode["order1_sign"]) {
      try {
        c.order1_sign = parse_order1_sign(r.text(n, "order1_sign"));
      } catch (const Error& e) {
        r.fail(n, e.what());
      }
    }
  }

  if (const auto s = root["solver"]) {
    r.require_map(s, "solver", {"picard_tolerance", "picard_damping", "picard_max_iterations", "truncation_tolerance"});
    if (const auto n = s["picard_tolerance"]) {
      c.picard_tolerance = r.number(n, "picard_tolerance");
      if (!(c.picard_tolerance > 0.0)) r.fail(n, "picard_tolerance must be positive");
    }
    if (const auto n = s["picard_damping"]) {
      c.picard_damping = r.number(n, "picard_damping");
      if (!(c.picard_damping > 0.0 && c.picard_damping <= 1.0)) r.fail(n, "picard_damping must lie in (0, 1]");
    }
    if (const auto n = s["picard_max_iterations"]) {
      c.picard_max_iterations = r.integer(n, "picard_max_iterations");
      if (c.picard_max_iterations < 1) r.fail(n, "picard_max_iterations must be >= 1");
    }
    if (const auto n = s["truncation_tolerance"]) {
      c.truncation_tolerance = r.number(n, "truncation_tolerance");
      if (!(c.truncation_tolerance > 0.0)) r.fail(n, "truncation_tolerance must be positive");
    }
  }

  if (const auto o = root["output"]) {
    r.require_map(o, "output", {"cache_dir", "dir"});
    if (const auto n = o["cache_dir"]) c.cache_dir = r.text(n, "cache_dir");
    if (const auto n = o["dir"]) c.output_dir = r.text(n, "dir");
  }

  if (const auto f = root["flags"]) {
    r.require_map(f, "flags", {"allow_out_of_hypothesis", "skip_dns", "refine_check"});
    if (const auto n = f["allow_out_of_hypothesis"]) c.allow_out_of_hypothesis = r.boolean(n, "allow_out_of_hypothesis");
    if (const auto n = f["skip_dns"]) c.skip_dns = r.boolean(n, "skip_dns");
    if (const auto n = f["refine_check"]) c.refine_check = r.boolean(n, "refine_check");
  }

  if (c.points.empty()) r.fail(root, "parameters need 'eta' or 'points'");
  if (c.epsilons.empty()) r.fail(root, "parameters need an 'epsilon' list");
  if (c.forces.empty()) r.fail(root, "parameters need an 'F' list");
  bool rate_listed = false;
  for (double F : c.forces) rate_listed = rate_listed || F == c.rate_force;
  if (!rate_listed) r.fail(root["parameters"], "rate_F must be one of the F values");
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

nlohmann::json RunConfig::physics_json() const {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : points) {
    nlohmann::json j = {{"delta", p.delta}, {"gamma", p.gamma}};
    if (p.eta) j["eta"] = *p.eta;
    pts.push_back(j);
  }
  return {
      {"geometry",
       {{"shape", shape.kind == ShapeKind::Disc ? "disc" : "superellipse"},
        {"radius", shape.radius},
        {"half_width", shape.half_width},
        {"half_height", shape.half_height},
        {"exponent", shape.exponent},
        {"rotation", shape.rotation},
        {"cells_per_period", cells_per_period},
        {"slab_rows_below", slab_rows_below},
        {"slab_height_above", slab_height_above}}},
      {"parameters",
       {{"points", pts},
        {"epsilon", epsilons},
        {"F", forces},
        {"rate_F", rate_force},
        {"order1_sign", to_string(order1_sign)}}},
      {"solver",
       {{"picard_tolerance", picard_tolerance},
        {"picard_damping", picard_damping},
        {"picard_max_iterations", picard_max_iterations},
        {"truncation_tolerance", truncation_tolerance}}},
      {"flags", {{"allow_out_of_hypothesis", allow_out_of_hypothesis}}},
  };
}

std::string RunConfig::hash() const { return sha256_hex(physics_json().dump()); }

nlohmann::json RunConfig::to_json() const {
  auto j = physics_json();
  j["output"] = {{"cache_dir", cache_dir.string()}, {"dir", output_dir.string()}};
  j["flags"]["skip_dns"] = skip_dns;
  j["flags"]["refine_check"] = refine_check;
  return j;
}

}  // namespace fracslip
