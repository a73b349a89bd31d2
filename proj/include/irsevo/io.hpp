#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "irsevo/dynamics.hpp"

namespace irsevo {

inline constexpr char kToolVersion[] = "0.1.0";

/// Shortest round-trip decimal rendering (std::to_chars); deterministic.
std::string format_double(double value);

/// FNV-1a 64-bit content hash, rendered as 16 hex digits.
std::string content_hash(std::string_view bytes);

std::string read_file(const std::filesystem::path& path);  // throws IoError
void write_file(const std::filesystem::path& path, std::string_view contents);

/// Character-separated table with a header row; cells are pre-rendered.
class Table {
 public:
  explicit Table(std::vector<std::string> columns);

  void add_row(std::vector<std::string> cells);
  std::string to_csv() const;
  const std::vector<std::string>& columns() const { return columns_; }
  std::size_t row_count() const { return rows_.size(); }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

/// Columns: t, p_1..p_G, u_1..u_G, u_bar.
Table trajectory_table(const Trajectory& trajectory);

struct RunManifest {
  std::string command_line;
  std::string scenario_path;
  std::string scenario_hash;
  std::uint64_t seed = 0;
  std::string tool_version = kToolVersion;
  std::string created_utc;          // informational; output tables stay byte-stable
  std::vector<std::string> outputs;
  std::vector<std::pair<std::string, std::string>> notes;  // e.g. mu, zeta, kind
};

std::string manifest_json(const RunManifest& manifest);
void write_manifest(const RunManifest& manifest, const std::filesystem::path& path);

std::string utc_timestamp();

}  // namespace irsevo
