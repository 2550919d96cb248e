#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "loopsynth/plants.hpp"
#include "loopsynth/sim.hpp"
#include "loopsynth/synth.hpp"

namespace loopsynth {

/// Configuration-file problems (missing file, bad schema, unknown names).
/// Mapped to a dedicated CLI exit code, distinct from synthesis failures.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using PlantVariant = std::variant<LFilterParams, LCLParams, GridFormingParams>;

struct PlantConfig {
  std::string type;  ///< "l_filter", "lcl", "grid_forming"
  PlantVariant params;
};
PlantConfig load_plant_file(const std::string& path);

/// Frequencies available to symbolic weight parameters ("fundamental",
/// "lcl_resonance") in a weight-set file.
struct WeightContext {
  double omega_fundamental = 2.0 * M_PI * 60.0;
  double omega_lcl = 0.0;
};

struct WeightCase {
  std::string name;
  RationalTF W_s;
  std::optional<RationalTF> W_u;
  std::optional<RationalTF> W_d;
};
std::vector<WeightCase> load_weight_cases(const std::string& path,
                                          const WeightContext& ctx);

Scenario load_scenario_file(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

/// Controller matrices + gamma + bisection log as a JSON document.
std::string synthesis_result_json(const SynthesisResult& result);

}  // namespace loopsynth
