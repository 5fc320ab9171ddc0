#include "cbfaug/csv_output.hpp"

#include <cmath>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "cbfaug/scenario_io.hpp"
#include "cbfaug/types.hpp"

namespace cbfaug {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";  // folds -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string RunManifest::comment_line() const {
  return "# manifest: tool=cbfaug version=" + version + " subcommand=" + subcommand +
         " scenario=" + hex64(scenario_hash);
}

void write_manifest_json(const std::filesystem::path& dir, const RunManifest& manifest) {
  nlohmann::json j;
  j["tool"] = "cbfaug";
  j["version"] = manifest.version;
  j["subcommand"] = manifest.subcommand;
  j["scenario_hash"] = hex64(manifest.scenario_hash);
  j["outputs"] = manifest.outputs;
  std::ofstream out(dir / "manifest.json", std::ios::binary);
  if (!out) throw InputError("cannot write " + (dir / "manifest.json").string());
  out << j.dump(2) << '\n';
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const RunManifest& manifest,
                     const std::vector<std::string>& header)
    : out_(path, std::ios::binary), columns_(header.size()) {
  if (!out_) throw InputError("cannot write " + path.string());
  out_ << manifest.comment_line() << '\n';
  row(header);
}

void CsvWriter::row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_number(v));
  row(cells);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw Error("csv row width does not match the header");
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (k) out_ << ',';
    out_ << cells[k];
  }
  out_ << '\n';
}

}  // namespace cbfaug
