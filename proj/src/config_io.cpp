#include "loopsynth/config_io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "loopsynth/weights.hpp"

namespace loopsynth {

namespace {

using nlohmann::json;

json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("invalid JSON in " + path + ": " + e.what());
  }
  return j;
}

double num_field(const json& j, const std::string& key) {
  if (!j.contains(key) || !j[key].is_number()) {
    throw ConfigError("missing numeric field: " + key);
  }
  return j[key].get<double>();
}

double num_field_or(const json& j, const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) throw ConfigError("field must be numeric: " + key);
  return j[key].get<double>();
}

double resolve_omega(const json& node, const WeightContext& ctx) {
  if (node.is_number()) return node.get<double>();
  if (node.is_string()) {
    const std::string s = node.get<std::string>();
    if (s == "fundamental") return ctx.omega_fundamental;
    if (s == "lcl_resonance") {
      if (!(ctx.omega_lcl > 0.0)) {
        throw ConfigError(
            "weight refers to lcl_resonance but no LC plant is in scope");
      }
      return ctx.omega_lcl;
    }
    throw ConfigError("unknown symbolic frequency: " + s);
  }
  throw ConfigError("frequency must be a number or a symbol");
}

RationalTF parse_weight(const json& node, const WeightContext& ctx) {
  if (node.is_string() && node.get<std::string>() == "unity") {
    return RationalTF::constant(1.0);
  }
  if (!node.is_object() || !node.contains("type")) {
    throw ConfigError("weight spec must be \"unity\" or an object with a type");
  }
  const std::string type = node["type"].get<std::string>();
  if (type == "static") {
    return static_gain_tf(num_field(node, "gain"));
  }
  if (type == "lowpass") {
    return first_order_lag(num_field_or(node, "dc_gain", 1.0),
                           num_field(node, "pole_rad_s"));
  }
  if (type == "sens_first_order") {
    return w_s1_first_order({num_field(node, "M_s"),
                             num_field(node, "omega_b_rad_s"),
                             num_field(node, "eps")});
  }
  if (type == "ctrl_first_order") {
    return w_u({num_field(node, "M_u"), num_field(node, "omega_bc_rad_s"),
                num_field(node, "eps1")});
  }
  if (type == "resonant") {
    if (!node.contains("omega_rad_s")) {
      throw ConfigError("resonant weight needs omega_rad_s");
    }
    return resonant_section({resolve_omega(node["omega_rad_s"], ctx),
                             num_field(node, "zeta_num"),
                             num_field(node, "zeta_den")});
  }
  if (type == "product") {
    if (!node.contains("factors") || !node["factors"].is_array() ||
        node["factors"].empty()) {
      throw ConfigError("product weight needs a nonempty factors array");
    }
    RationalTF out = RationalTF::constant(1.0);
    for (const auto& f : node["factors"]) out = out * parse_weight(f, ctx);
    return out;
  }
  if (type == "power") {
    if (!node.contains("base")) throw ConfigError("power weight needs a base");
    const int k = static_cast<int>(num_field(node, "k"));
    return cascade(parse_weight(node["base"], ctx), k);
  }
  throw ConfigError("unknown weight type: " + type);
}

std::optional<RationalTF> parse_optional_weight(const json& parent,
                                                const std::string& key,
                                                const WeightContext& ctx) {
  if (!parent.contains(key)) return std::nullopt;
  const json& node = parent[key];
  if (node.is_string() && node.get<std::string>() == "none") return std::nullopt;
  return parse_weight(node, ctx);
}

SignalSpec parse_signal(const json& node) {
  if (!node.is_object() || !node.contains("type")) {
    throw ConfigError("signal spec must be an object with a type");
  }
  const std::string type = node["type"].get<std::string>();
  if (type == "const" || type == "step") {
    return SignalSpec::constant(num_field(node, "value"));
  }
  if (type == "sinusoid") {
    return SignalSpec::sinusoid(num_field(node, "amplitude"),
                                num_field(node, "omega_rad_s"),
                                num_field_or(node, "phase_rad", 0.0));
  }
  throw ConfigError("unknown signal type: " + type);
}

}  // namespace

PlantConfig load_plant_file(const std::string& path) {
  const json j = parse_file(path);
  if (!j.contains("type")) throw ConfigError(path + ": plant file needs a type");
  PlantConfig cfg;
  cfg.type = j["type"].get<std::string>();
  if (cfg.type == "l_filter") {
    cfg.params = LFilterParams{num_field(j, "L_henry"), num_field(j, "R_ohm"),
                               num_field(j, "v_ac_max_volt")};
  } else if (cfg.type == "lcl") {
    cfg.params =
        LCLParams{num_field(j, "L1_henry"), num_field(j, "L2_henry"),
                  num_field(j, "C_farad"),  num_field(j, "R1_ohm"),
                  num_field(j, "R2_ohm"),   num_field(j, "v_ac_max_volt")};
  } else if (cfg.type == "grid_forming") {
    cfg.params = GridFormingParams{
        num_field(j, "L_i_henry"), num_field(j, "R_i_ohm"),
        num_field(j, "L_g_henry"), num_field(j, "R_g_ohm"),
        num_field(j, "C_farad"),   num_field(j, "Z_L_ohm")};
  } else {
    throw ConfigError("unknown plant type: " + cfg.type);
  }
  return cfg;
}

std::vector<WeightCase> load_weight_cases(const std::string& path,
                                          const WeightContext& ctx) {
  const json j = parse_file(path);
  if (!j.contains("cases") || !j["cases"].is_array()) {
    throw ConfigError(path + ": weight file needs a cases array");
  }
  std::vector<WeightCase> cases;
  for (const auto& c : j["cases"]) {
    WeightCase wc;
    wc.name = c.contains("name") ? c["name"].get<std::string>()
                                 : ("case" + std::to_string(cases.size() + 1));
    if (!c.contains("w_s")) throw ConfigError("weight case needs w_s");
    wc.W_s = parse_weight(c["w_s"], ctx);
    wc.W_u = parse_optional_weight(c, "w_u", ctx);
    wc.W_d = parse_optional_weight(c, "w_d", ctx);
    cases.push_back(std::move(wc));
  }
  return cases;
}

Scenario load_scenario_file(const std::string& path) {
  const json j = parse_file(path);
  Scenario sc;
  sc.t_end = num_field(j, "t_end_s");
  sc.dt = num_field_or(j, "dt_s", 0.0);
  if (j.contains("reference_label")) {
    sc.reference_label = j["reference_label"].get<std::string>();
  }
  if (j.contains("disturbance_label")) {
    sc.disturbance_label = j["disturbance_label"].get<std::string>();
  }
  if (!j.contains("segments") || !j["segments"].is_array() ||
      j["segments"].empty()) {
    throw ConfigError(path + ": scenario needs a nonempty segments array");
  }
  for (const auto& s : j["segments"]) {
    ScenarioSegment seg;
    seg.t_start = num_field(s, "t_start_s");
    if (!s.contains("reference") || !s.contains("disturbance")) {
      throw ConfigError("segment needs reference and disturbance specs");
    }
    seg.reference = parse_signal(s["reference"]);
    seg.disturbance = parse_signal(s["disturbance"]);
    sc.segments.push_back(seg);
  }
  return sc;
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

json matrix_json(const MatrixXd& M) {
  json rows = json::array();
  for (int i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

std::string synthesis_result_json(const SynthesisResult& result) {
  json j;
  j["gamma"] = result.gamma;
  j["certified_norm"] = result.certified_norm;
  j["d12_regularized"] = result.d12_regularized;
  j["d21_regularized"] = result.d21_regularized;
  j["controller"] = {{"A", matrix_json(result.K.A)},
                     {"B", matrix_json(result.K.B)},
                     {"C", matrix_json(result.K.C)},
                     {"D", matrix_json(result.K.D)}};
  json iters = json::array();
  for (const auto& it : result.iterations) {
    iters.push_back({{"gamma", it.gamma}, {"feasible", it.feasible}});
  }
  j["bisection"] = iters;
  return j.dump(2) + "\n";
}

}  // namespace loopsynth
