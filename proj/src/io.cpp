#include "irsevo/io.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "irsevo/errors.hpp"

namespace irsevo {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[32];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

std::string content_hash(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buffer[17];
  static const char* digits = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buffer[i] = digits[hash & 0xf];
    hash >>= 4;
  }
  buffer[16] = '\0';
  return std::string(buffer, 16);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write file: " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

Table::Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void Table::add_row(std::vector<std::string> cells) {
  if (cells.size() != columns_.size()) {
    throw ValidationError("table row has " + std::to_string(cells.size()) + " cells, expected " +
                          std::to_string(columns_.size()));
  }
  rows_.push_back(std::move(cells));
}

std::string Table::to_csv() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (i) out << ',';
    out << columns_[i];
  }
  out << '\n';
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << row[i];
    }
    out << '\n';
  }
  return out.str();
}

Table trajectory_table(const Trajectory& trajectory) {
  const int g_count = trajectory.group_count();
  std::vector<std::string> columns;
  columns.push_back("t");
  for (int g = 1; g <= g_count; ++g) columns.push_back("p_" + std::to_string(g));
  for (int g = 1; g <= g_count; ++g) columns.push_back("u_" + std::to_string(g));
  columns.push_back("u_bar");

  Table table(std::move(columns));
  for (std::size_t n = 0; n < trajectory.times.size(); ++n) {
    std::vector<std::string> row;
    row.reserve(2 * g_count + 2);
    row.push_back(format_double(trajectory.times[n]));
    for (int g = 0; g < g_count; ++g) row.push_back(format_double(trajectory.states[n][g]));
    for (int g = 0; g < g_count; ++g) row.push_back(format_double(trajectory.utilities[n][g]));
    row.push_back(format_double(trajectory.average_utilities[n]));
    table.add_row(std::move(row));
  }
  return table;
}

std::string manifest_json(const RunManifest& manifest) {
  nlohmann::ordered_json doc;
  doc["command_line"] = manifest.command_line;
  doc["scenario_path"] = manifest.scenario_path;
  doc["scenario_hash"] = manifest.scenario_hash;
  doc["seed"] = manifest.seed;
  doc["tool_version"] = manifest.tool_version;
  doc["created_utc"] = manifest.created_utc;
  doc["outputs"] = manifest.outputs;
  nlohmann::ordered_json notes = nlohmann::ordered_json::object();
  for (const auto& [key, value] : manifest.notes) notes[key] = value;
  doc["notes"] = notes;
  return doc.dump(2) + "\n";
}

void write_manifest(const RunManifest& manifest, const std::filesystem::path& path) {
  write_file(path, manifest_json(manifest));
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buffer[32];
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buffer;
}

}  // namespace irsevo
