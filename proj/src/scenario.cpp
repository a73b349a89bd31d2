#include "irsevo/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "irsevo/errors.hpp"

namespace irsevo {

using nlohmann::json;

double distance(const Vec2& a, const Vec2& b) {
  return std::hypot(a[0] - b[0], a[1] - b[1]);
}

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

std::string Strategy::label() const {
  std::ostringstream out;
  out << "sp" << sp << ".irs" << irs << ".k" << subset_size << ".j" << power_index;
  return out.str();
}

const ServiceProvider& Scenario::provider(int sp_id) const {
  for (const auto& sp : providers) {
    if (sp.id == sp_id) return sp;
  }
  throw ValidationError("unknown provider id " + std::to_string(sp_id));
}

const IrsPanel& Scenario::panel(int sp_id, int irs_index) const {
  for (const auto& panel : irs_panels) {
    if (panel.owner_sp == sp_id && panel.index_within_sp == irs_index) return panel;
  }
  throw ValidationError("provider " + std::to_string(sp_id) + " has no IRS index " +
                        std::to_string(irs_index));
}

std::vector<const IrsPanel*> Scenario::panels_of(int sp_id) const {
  std::vector<const IrsPanel*> result;
  for (const auto& panel : irs_panels) {
    if (panel.owner_sp == sp_id) result.push_back(&panel);
  }
  return result;
}

std::vector<Strategy> enumerate_strategies(const Scenario& scenario) {
  if (scenario.providers.empty()) {
    throw ValidationError("providers: list is empty");
  }
  std::vector<Strategy> strategies;
  for (const auto& sp : scenario.providers) {
    const auto panels = scenario.panels_of(sp.id);
    for (const IrsPanel* panel : panels) {
      for (int k = 1; k <= panel->modules; ++k) {
        for (int j = 1; j <= static_cast<int>(sp.power_levels_w.size()); ++j) {
          Strategy s;
          s.sp = sp.id;
          s.irs = panel->index_within_sp;
          s.subset_size = k;
          s.power_index = j;
          s.active_elements = k * panel->elements_per_module;
          strategies.push_back(s);
        }
      }
    }
  }
  return strategies;
}

namespace {

std::string field_path(const std::string& section, std::size_t index, const std::string& key) {
  std::ostringstream out;
  out << section << "[" << index << "]." << key;
  return out.str();
}

const json& require_key(const json& obj, const std::string& key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ValidationError(where + ": missing field '" + key + "'");
  }
  return *it;
}

double require_number(const json& obj, const std::string& key, const std::string& where) {
  const json& value = require_key(obj, key, where);
  if (!value.is_number()) {
    throw ValidationError(where + "." + key + ": expected a number");
  }
  return value.get<double>();
}

int require_int(const json& obj, const std::string& key, const std::string& where) {
  const json& value = require_key(obj, key, where);
  if (!value.is_number_integer()) {
    throw ValidationError(where + "." + key + ": expected an integer");
  }
  return value.get<int>();
}

Vec2 require_vec2(const json& obj, const std::string& key, const std::string& where) {
  const json& value = require_key(obj, key, where);
  if (!value.is_array() || value.size() != 2 || !value[0].is_number() || !value[1].is_number()) {
    throw ValidationError(where + "." + key + ": expected [x, y]");
  }
  return Vec2{value[0].get<double>(), value[1].get<double>()};
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& origin) {
  json root;
  try {
    root = json::parse(text, nullptr, /*allow_exceptions=*/true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ValidationError(origin + ": " + e.what());
  }
  if (!root.is_object()) {
    throw ValidationError(origin + ": top level must be an object");
  }

  Scenario scenario;

  const json& physics = require_key(root, "physics", origin);
  scenario.physics.carrier_frequency_hz = require_number(physics, "carrier_frequency_hz", "physics");
  if (physics.contains("noise_psd_w_per_hz")) {
    scenario.physics.noise_psd_w_per_hz = physics["noise_psd_w_per_hz"].get<double>();
  } else if (physics.contains("noise_psd_dbm_per_hz")) {
    scenario.physics.noise_psd_w_per_hz =
        dbm_to_watts(physics["noise_psd_dbm_per_hz"].get<double>());
  } else {
    // thermal noise floor
    scenario.physics.noise_psd_w_per_hz = dbm_to_watts(-174.0);
  }
  scenario.physics.absorption_coeff_per_m =
      physics.contains("absorption_coeff_per_m") ? physics["absorption_coeff_per_m"].get<double>()
                                                 : 0.0;

  const json& user = require_key(root, "user", origin);
  scenario.user_position = require_vec2(user, "position", "user");
  scenario.population = require_int(user, "population", "user");

  const json& providers = require_key(root, "providers", origin);
  if (!providers.is_array()) throw ValidationError("providers: expected an array");
  for (std::size_t i = 0; i < providers.size(); ++i) {
    const json& p = providers[i];
    const std::string where = "providers[" + std::to_string(i) + "]";
    ServiceProvider sp;
    sp.id = require_int(p, "id", where);
    sp.bs_position = require_vec2(p, "bs_position", where);
    sp.antennas = require_int(p, "antennas", where);
    sp.bandwidth_hz = require_number(p, "bandwidth_hz", where);
    const json& powers = require_key(p, "power_levels_dbm", where);
    if (!powers.is_array() || powers.empty()) {
      throw ValidationError(where + ".power_levels_dbm: expected a non-empty array");
    }
    for (const auto& level : powers) {
      if (!level.is_number()) {
        throw ValidationError(where + ".power_levels_dbm: expected numbers");
      }
      sp.power_levels_w.push_back(dbm_to_watts(level.get<double>()));
    }
    sp.price_per_element = require_number(p, "price_per_element", where);
    sp.price_per_watt = require_number(p, "price_per_watt", where);
    sp.unit_data_value = require_number(p, "unit_data_value", where);
    scenario.providers.push_back(std::move(sp));
  }

  const json& irs = require_key(root, "irs", origin);
  if (!irs.is_array()) throw ValidationError("irs: expected an array");
  std::vector<int> per_sp_counter(scenario.providers.size() + 2, 0);
  for (std::size_t i = 0; i < irs.size(); ++i) {
    const json& entry = irs[i];
    const std::string where = "irs[" + std::to_string(i) + "]";
    IrsPanel panel;
    panel.owner_sp = require_int(entry, "owner_sp", where);
    panel.position = require_vec2(entry, "position", where);
    panel.modules = require_int(entry, "modules", where);
    panel.elements_per_module = require_int(entry, "elements_per_module", where);
    if (panel.owner_sp >= 1 && panel.owner_sp < static_cast<int>(per_sp_counter.size())) {
      panel.index_within_sp = ++per_sp_counter[panel.owner_sp];
    } else {
      panel.index_within_sp = 1;
    }
    if (entry.contains("total_elements") &&
        entry["total_elements"].get<int>() != panel.total_elements()) {
      throw ValidationError(field_path("irs", i, "total_elements") +
                            ": must equal modules * elements_per_module");
    }
    scenario.irs_panels.push_back(panel);
  }

  return scenario;
}

void validate_scenario(const Scenario& scenario) {
  if (scenario.providers.empty()) {
    throw ValidationError("providers: list is empty");
  }
  for (std::size_t i = 0; i < scenario.providers.size(); ++i) {
    const auto& sp = scenario.providers[i];
    const std::string where = "providers[" + std::to_string(i) + "]";
    if (sp.id != static_cast<int>(i) + 1) {
      throw ValidationError(where + ".id: provider ids must be 1.." +
                            std::to_string(scenario.providers.size()) + " in order");
    }
    if (sp.antennas < 1) throw ValidationError(where + ".antennas: must be positive");
    if (!(sp.bandwidth_hz > 0)) throw ValidationError(where + ".bandwidth_hz: must be positive");
    if (!(sp.price_per_element > 0))
      throw ValidationError(where + ".price_per_element: must be positive");
    if (!(sp.price_per_watt > 0)) throw ValidationError(where + ".price_per_watt: must be positive");
    if (!(sp.unit_data_value > 0))
      throw ValidationError(where + ".unit_data_value: must be positive");
    for (std::size_t j = 1; j < sp.power_levels_w.size(); ++j) {
      if (!(sp.power_levels_w[j] > sp.power_levels_w[j - 1])) {
        throw ValidationError(where + ".power_levels_dbm: must be strictly increasing");
      }
    }
    if (sp.power_levels_w.empty() || !(sp.power_levels_w.front() > 0)) {
      throw ValidationError(where + ".power_levels_dbm: must be positive");
    }
    if (scenario.panels_of(sp.id).empty()) {
      throw ValidationError(where + ": provider has no IRS panel");
    }
  }
  for (std::size_t i = 0; i < scenario.irs_panels.size(); ++i) {
    const auto& panel = scenario.irs_panels[i];
    const std::string where = "irs[" + std::to_string(i) + "]";
    bool owner_found = false;
    for (const auto& sp : scenario.providers) owner_found |= (sp.id == panel.owner_sp);
    if (!owner_found) {
      throw ValidationError(where + ".owner_sp: refers to a provider that does not exist");
    }
    if (panel.modules < 1) throw ValidationError(where + ".modules: must be positive");
    if (panel.elements_per_module < 1) {
      throw ValidationError(where + ".elements_per_module: must be positive");
    }
  }
  if (scenario.population < 1) {
    throw ValidationError("user.population: must be positive");
  }
  if (!(scenario.physics.carrier_frequency_hz > 0)) {
    throw ValidationError("physics.carrier_frequency_hz: must be positive");
  }
  if (!(scenario.physics.noise_psd_w_per_hz > 0)) {
    throw ValidationError("physics.noise_psd_w_per_hz: must be positive");
  }
  if (scenario.physics.absorption_coeff_per_m < 0) {
    throw ValidationError("physics.absorption_coeff_per_m: must be non-negative");
  }
  const auto strategies = enumerate_strategies(scenario);
  if (scenario.population < static_cast<int>(strategies.size())) {
    throw ValidationError("user.population: must be at least the strategy count G=" +
                          std::to_string(strategies.size()));
  }
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open scenario file: " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  Scenario scenario = parse_scenario(buffer.str(), path.string());
  validate_scenario(scenario);
  scenario.strategies = enumerate_strategies(scenario);
  return scenario;
}

}  // namespace irsevo
