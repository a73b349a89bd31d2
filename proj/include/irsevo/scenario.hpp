#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace irsevo {

using Vec2 = std::array<double, 2>;

double distance(const Vec2& a, const Vec2& b);

/// 10^((dBm - 30)/10); all internal computation is in SI units.
double dbm_to_watts(double dbm);

struct ServiceProvider {
  int id = 0;  // 1-based
  Vec2 bs_position{0.0, 0.0};
  int antennas = 0;
  double bandwidth_hz = 0.0;
  std::vector<double> power_levels_w;  // strictly increasing
  double price_per_element = 0.0;      // currency per active IRS element
  double price_per_watt = 0.0;         // currency per W of transmit power
  double unit_data_value = 0.0;        // currency per bit/s delivered
};

struct IrsPanel {
  int owner_sp = 0;        // 1-based ServiceProvider id
  int index_within_sp = 0; // 1-based, assigned in file order
  Vec2 position{0.0, 0.0};
  int modules = 0;
  int elements_per_module = 0;

  int total_elements() const { return modules * elements_per_module; }
};

/// One selectable service: provider m, panel l, k engaged modules, power
/// level j. The ordered enumeration of these is the game's strategy space.
struct Strategy {
  int sp = 0;           // m, 1-based
  int irs = 0;          // l, 1-based within the provider
  int subset_size = 0;  // k, 1..modules
  int power_index = 0;  // j, 1-based
  int active_elements = 0;  // k * elements_per_module

  std::string label() const;  // e.g. "sp1.irs2.k1.j1"
};

struct Physics {
  double carrier_frequency_hz = 0.0;
  double noise_psd_w_per_hz = 0.0;    // multiplied by the SP bandwidth at use sites
  double absorption_coeff_per_m = 0.0;
};

struct Scenario {
  std::vector<ServiceProvider> providers;
  std::vector<IrsPanel> irs_panels;
  Vec2 user_position{0.0, 0.0};
  int population = 0;
  Physics physics;
  std::vector<Strategy> strategies;  // canonical order (sp, irs, k, j)

  int group_count() const { return static_cast<int>(strategies.size()); }
  const ServiceProvider& provider(int sp_id) const;
  const IrsPanel& panel(int sp_id, int irs_index) const;
  std::vector<const IrsPanel*> panels_of(int sp_id) const;
};

/// Canonical strategy enumeration: sorted by (sp, irs, k, j), one entry per
/// combination. Throws ValidationError on an empty provider list.
std::vector<Strategy> enumerate_strategies(const Scenario& scenario);

/// Checks every scenario invariant; throws ValidationError naming the field.
void validate_scenario(const Scenario& scenario);

/// Parses the JSON scenario text (comments allowed). `origin` is used in
/// error messages.
Scenario parse_scenario(const std::string& text, const std::string& origin = "<string>");

/// Loads, parses and validates a scenario file, with strategies enumerated.
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace irsevo
