#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace cbfaug {

/// 17 significant digits, '.' decimal separator; "inf", "-inf", "nan".
std::string format_number(double v);

struct RunManifest {
  std::string version;
  std::string subcommand;
  std::uint64_t scenario_hash = 0;
  std::vector<std::string> outputs;

  /// "# manifest: tool=cbfaug version=... subcommand=... scenario=<hex>"
  std::string comment_line() const;
};

/// Writes manifest.json (sorted keys, fixed layout) into dir.
void write_manifest_json(const std::filesystem::path& dir, const RunManifest& manifest);

/// CSV file whose first line is the manifest comment, followed by a header.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const RunManifest& manifest, const std::vector<std::string>& header);

  void row(const std::vector<double>& values);
  void row(const std::vector<std::string>& cells);

 private:
  std::ofstream out_;
  std::size_t columns_;
};

}  // namespace cbfaug
