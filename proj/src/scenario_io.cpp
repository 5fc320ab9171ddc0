#include "cbfaug/scenario_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "cbfaug/csv_output.hpp"

namespace cbfaug {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

class Reader {
 public:
  Reader(std::string origin, std::filesystem::path base_dir)
      : origin_(std::move(origin)), base_dir_(std::move(base_dir)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& msg) const {
    const auto mark = node.Mark();
    if (mark.is_null()) throw ScenarioError(origin_ + ": " + msg);
    throw ScenarioError(origin_ + ":" + std::to_string(mark.line + 1) + ":" + std::to_string(mark.column + 1) +
                        ": " + msg);
  }

  void keys(const YAML::Node& node, const std::string& where, std::initializer_list<const char*> allowed) const {
    if (!node.IsMap()) fail(node, where + " must be a mapping");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& kv : node) {
      const auto key = kv.first.as<std::string>();
      if (!ok.count(key)) fail(kv.first, "unknown key '" + key + "' in " + where);
    }
  }

  YAML::Node need(const YAML::Node& node, const char* key, const std::string& where) const {
    const YAML::Node child = node[key];
    if (!child) fail(node, "missing '" + std::string(key) + "' in " + where);
    return child;
  }

  double number(const YAML::Node& node, const std::string& what) const {
    if (!node.IsScalar()) fail(node, what + " must be a number");
    try {
      return node.as<double>();
    } catch (const YAML::Exception&) {
      fail(node, what + " must be a number");
    }
  }

  long integer(const YAML::Node& node, const std::string& what) const {
    if (!node.IsScalar()) fail(node, what + " must be an integer");
    try {
      return node.as<long>();
    } catch (const YAML::Exception&) {
      fail(node, what + " must be an integer");
    }
  }

  bool boolean(const YAML::Node& node, const std::string& what) const {
    if (!node.IsScalar()) fail(node, what + " must be true or false");
    try {
      return node.as<bool>();
    } catch (const YAML::Exception&) {
      fail(node, what + " must be true or false");
    }
  }

  std::string text(const YAML::Node& node, const std::string& what) const {
    if (!node.IsScalar()) fail(node, what + " must be a string");
    return node.as<std::string>();
  }

  double unit_scale(const YAML::Node& node, const std::string& what, bool required) const {
    const YAML::Node u = node["unit"];
    if (!u) {
      if (required) fail(node, "unit tag missing on " + what);
      return 1.0;
    }
    const auto s = text(u, what + ".unit");
    if (s == "si") return 1.0;
    if (s == "deg") return kDeg;
    fail(u, "unit of " + what + " must be 'si' or 'deg'");
  }

  std::vector<double> numbers(const YAML::Node& node, const std::string& what) const {
    if (!node.IsSequence()) fail(node, what + " must be a list of numbers");
    std::vector<double> out;
    for (const auto& item : node) out.push_back(number(item, what));
    return out;
  }

  /// {dims: [r, c], rows: [[...], ...], unit: si|deg}
  Matrix matrix(const YAML::Node& node, const std::string& name) const {
    keys(node, name, {"dims", "rows", "unit"});
    const auto dims = numbers(need(node, "dims", name), name + ".dims");
    if (dims.size() != 2 || dims[0] < 0 || dims[1] < 0 || dims[0] != std::floor(dims[0]) ||
        dims[1] != std::floor(dims[1])) {
      fail(node["dims"], name + ".dims must be two non-negative integers");
    }
    const auto r = static_cast<Eigen::Index>(dims[0]);
    const auto c = static_cast<Eigen::Index>(dims[1]);
    const YAML::Node rows = need(node, "rows", name);
    if (!rows.IsSequence()) fail(rows, name + ".rows must be a list of rows");
    if (static_cast<Eigen::Index>(rows.size()) != r) {
      fail(rows, "dimension mismatch in " + name + ": declared " + std::to_string(r) + " rows, found " +
                     std::to_string(rows.size()));
    }
    const double scale = unit_scale(node, name, false);
    Matrix M(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
      const auto row = numbers(rows[i], name + " row " + std::to_string(i + 1));
      if (static_cast<Eigen::Index>(row.size()) != c) {
        fail(rows[i], "dimension mismatch in " + name + ": row " + std::to_string(i + 1) + " has " +
                          std::to_string(row.size()) + " entries, declared " + std::to_string(c));
      }
      for (Eigen::Index j = 0; j < c; ++j) M(i, j) = row[j] * scale;
    }
    return M;
  }

  /// {values: [...], unit: si|deg}, or a bare list when no unit is required.
  Vector vector(const YAML::Node& node, const std::string& name, bool unit_required) const {
    if (node.IsSequence()) {
      if (unit_required) fail(node, "unit tag missing on " + name);
      const auto v = numbers(node, name);
      return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
    }
    keys(node, name, {"values", "unit"});
    const double scale = unit_scale(node, name, unit_required);
    const auto v = numbers(need(node, "values", name), name);
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())) * scale;
  }

  GainSource gain(const YAML::Node& node, const std::string& where, const char* given_key) const {
    keys(node, where, {given_key, "lqr"});
    GainSource g;
    if (node[given_key] && node["lqr"]) fail(node, where + " takes either " + given_key + " or lqr, not both");
    if (node[given_key]) {
      g.given = matrix(node[given_key], where + "." + given_key);
    } else if (node["lqr"]) {
      const YAML::Node l = node["lqr"];
      keys(l, where + ".lqr", {"Q", "R"});
      g.lqr = true;
      g.Q = matrix(need(l, "Q", where + ".lqr"), where + ".lqr.Q");
      g.R = matrix(need(l, "R", where + ".lqr"), where + ".lqr.R");
    } else {
      fail(node, where + " needs " + given_key + " or lqr");
    }
    return g;
  }

  DisturbanceProfile disturbance(const YAML::Node& node) const {
    if (!node.IsMap()) fail(node, "disturbance entry must be a mapping");
    const auto type = text(need(node, "type", "disturbance"), "disturbance.type");
    if (type == "none") {
      keys(node, "disturbance", {"type"});
      return disturbance::None{};
    }
    if (type == "step") {
      keys(node, "disturbance", {"type", "t0", "amplitude", "unit"});
      const double s = unit_scale(node, "disturbance", false);
      return disturbance::Step{number(need(node, "t0", "step"), "t0"),
                               number(need(node, "amplitude", "step"), "amplitude") * s};
    }
    if (type == "one_minus_cos") {
      keys(node, "disturbance", {"type", "t0", "duration", "amplitude", "unit"});
      const double s = unit_scale(node, "disturbance", false);
      disturbance::OneMinusCos p{number(need(node, "t0", type), "t0"), number(need(node, "duration", type), "duration"),
                                 number(need(node, "amplitude", type), "amplitude") * s};
      if (!(p.duration > 0.0)) fail(node["duration"], "duration must be positive");
      return p;
    }
    if (type == "filtered_noise") {
      keys(node, "disturbance", {"type", "seed", "bandwidth", "rms", "unit"});
      const double s = unit_scale(node, "disturbance", false);
      const long seed = integer(need(node, "seed", type), "seed");
      if (seed < 0) fail(node["seed"], "seed must be non-negative");
      disturbance::FilteredNoise p{static_cast<std::uint64_t>(seed), number(need(node, "bandwidth", type), "bandwidth"),
                                   number(need(node, "rms", type), "rms") * s};
      if (!(p.bandwidth > 0.0)) fail(node["bandwidth"], "bandwidth must be positive");
      if (!(p.rms >= 0.0)) fail(node["rms"], "rms must be non-negative");
      return p;
    }
    if (type == "csv") {
      keys(node, "disturbance", {"type", "path"});
      const std::filesystem::path written = text(need(node, "path", type), "path");
      try {
        auto table = load_disturbance_csv(written.is_absolute() ? written : base_dir_ / written);
        table.path = written;
        return table;
      } catch (const InputError& e) {
        fail(node["path"], e.what());
      }
    }
    fail(node["type"], "unknown disturbance type '" + type + "'");
  }

  const std::filesystem::path& base_dir() const { return base_dir_; }

 private:
  std::string origin_;
  std::filesystem::path base_dir_;
};

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

ScenarioDocument parse_root(const YAML::Node& root, const Reader& rd) {
  ScenarioDocument doc;
  rd.keys(root, "scenario",
          {"name", "plant", "pi_servo", "limits", "cbf", "baseline", "observer", "sim", "actuator", "analysis"});
  if (root["name"]) doc.name = rd.text(root["name"], "name");

  if (root["plant"] && root["pi_servo"]) rd.fail(root, "give either a plant or a pi_servo section, not both");
  if (root["plant"]) {
    const YAML::Node p = root["plant"];
    rd.keys(p, "plant", {"A", "B", "C", "D", "C_lim", "B_dist"});
    Plant plant;
    plant.A = rd.matrix(rd.need(p, "A", "plant"), "A");
    plant.B = rd.matrix(rd.need(p, "B", "plant"), "B");
    plant.C = rd.matrix(rd.need(p, "C", "plant"), "C");
    if (p["D"]) plant.D = rd.matrix(p["D"], "D");
    plant.C_lim = rd.matrix(rd.need(p, "C_lim", "plant"), "C_lim");
    if (p["B_dist"]) plant.B_dist = rd.matrix(p["B_dist"], "B_dist");
    try {
      doc.plant = Plant::make(plant.A, plant.B, plant.C, plant.D, plant.C_lim, plant.B_dist);
    } catch (const InputError& e) {
      rd.fail(p, e.what());
    }
  } else if (root["pi_servo"]) {
    const YAML::Node p = root["pi_servo"];
    rd.keys(p, "pi_servo", {"A_p", "B_p", "C_p", "D_p", "C_reg", "D_reg", "C_lim", "B_dist", "K_I", "K_P"});
    PhysicalPlant pp;
    pp.A_p = rd.matrix(rd.need(p, "A_p", "pi_servo"), "A_p");
    pp.B_p = rd.matrix(rd.need(p, "B_p", "pi_servo"), "B_p");
    pp.C_p = rd.matrix(rd.need(p, "C_p", "pi_servo"), "C_p");
    if (p["D_p"]) pp.D_p = rd.matrix(p["D_p"], "D_p");
    pp.C_reg = rd.matrix(rd.need(p, "C_reg", "pi_servo"), "C_reg");
    if (p["D_reg"]) pp.D_reg = rd.matrix(p["D_reg"], "D_reg");
    pp.C_lim = rd.matrix(rd.need(p, "C_lim", "pi_servo"), "C_lim");
    if (p["B_dist"]) pp.B_dist = rd.matrix(p["B_dist"], "B_dist");
    doc.K_I = rd.matrix(rd.need(p, "K_I", "pi_servo"), "K_I");
    doc.K_P = rd.matrix(rd.need(p, "K_P", "pi_servo"), "K_P");
    try {
      pp.validate_and_complete();
    } catch (const InputError& e) {
      rd.fail(p, e.what());
    }
    doc.servo = pp;
  } else {
    rd.fail(root, "missing 'plant' or 'pi_servo' section");
  }

  const YAML::Node lim = rd.need(root, "limits", "scenario");
  if (doc.servo) {
    rd.keys(lim, "limits", {"u_min", "u_max", "y_min", "y_max"});
    doc.u_min = rd.vector(rd.need(lim, "u_min", "limits"), "u_min", true);
    doc.u_max = rd.vector(rd.need(lim, "u_max", "limits"), "u_max", true);
  } else {
    rd.keys(lim, "limits", {"y_min", "y_max"});
  }
  doc.y_min = rd.vector(rd.need(lim, "y_min", "limits"), "y_min", true);
  doc.y_max = rd.vector(rd.need(lim, "y_max", "limits"), "y_max", true);

  const YAML::Node cbf = rd.need(root, "cbf", "scenario");
  rd.keys(cbf, "cbf", {"lambdas"});
  const YAML::Node lam = rd.need(cbf, "lambdas", "cbf");
  if (!lam.IsSequence()) rd.fail(lam, "cbf.lambdas must be a list with one list per limited output");
  for (const auto& row : lam) doc.lambdas.push_back(rd.numbers(row, "cbf.lambdas"));

  if (doc.servo) {
    if (root["baseline"]) rd.fail(root["baseline"], "baseline gains of a pi_servo scenario come from K_I and K_P");
  } else {
    doc.baseline = rd.gain(rd.need(root, "baseline", "scenario"), "baseline", "K");
  }
  doc.observer = rd.gain(rd.need(root, "observer", "scenario"), "observer", "L");

  if (root["sim"]) {
    const YAML::Node s = root["sim"];
    rd.keys(s, "sim", {"t_final", "dt", "x0", "xhat0", "command", "disturbance", "augmentation", "state_feedback",
                       "actuator"});
    doc.has_sim = true;
    if (s["t_final"]) doc.t_final = rd.number(s["t_final"], "sim.t_final");
    if (s["dt"]) doc.dt = rd.number(s["dt"], "sim.dt");
    doc.x0 = rd.vector(rd.need(s, "x0", "sim"), "sim.x0", false);
    doc.xhat0 = rd.vector(rd.need(s, "xhat0", "sim"), "sim.xhat0", false);
    if (s["command"]) {
      const YAML::Node c = s["command"];
      if (!c.IsSequence()) rd.fail(c, "sim.command must be a list of {t, value} steps");
      for (const auto& step : c) {
        rd.keys(step, "sim.command", {"t", "value", "unit"});
        CommandStep cs;
        cs.t = rd.number(rd.need(step, "t", "sim.command"), "sim.command.t");
        cs.value = to_vector(rd.numbers(rd.need(step, "value", "sim.command"), "sim.command.value")) *
                   rd.unit_scale(step, "sim.command", false);
        doc.command.push_back(cs);
      }
    }
    if (s["disturbance"]) {
      const YAML::Node d = s["disturbance"];
      if (!d.IsSequence()) rd.fail(d, "sim.disturbance must be a list with one entry per disturbance input");
      for (const auto& item : d) doc.disturbance.push_back(rd.disturbance(item));
    }
    if (s["augmentation"]) doc.augmentation = rd.boolean(s["augmentation"], "sim.augmentation");
    if (s["state_feedback"]) doc.state_feedback = rd.boolean(s["state_feedback"], "sim.state_feedback");
    if (s["actuator"]) doc.actuator_in_sim = rd.boolean(s["actuator"], "sim.actuator");
  }

  if (root["actuator"]) {
    const YAML::Node a = root["actuator"];
    rd.keys(a, "actuator", {"omega_n", "zeta", "channels"});
    ActuatorModel act;
    act.omega_n = rd.number(rd.need(a, "omega_n", "actuator"), "actuator.omega_n");
    act.zeta = rd.number(rd.need(a, "zeta", "actuator"), "actuator.zeta");
    if (!(act.omega_n > 0.0)) rd.fail(a["omega_n"], "actuator.omega_n must be positive");
    if (!(act.zeta > 0.0)) rd.fail(a["zeta"], "actuator.zeta must be positive");
    if (a["channels"]) {
      for (double c : rd.numbers(a["channels"], "actuator.channels")) act.channels.push_back(static_cast<int>(c));
    }
    doc.actuator = act;
  }
  if (doc.actuator_in_sim && !doc.actuator) rd.fail(root["sim"], "sim.actuator is set but there is no actuator section");

  if (root["analysis"]) {
    const YAML::Node a = root["analysis"];
    rd.keys(a, "analysis", {"grid", "deltas", "sweep"});
    if (a["grid"]) {
      const YAML::Node g = a["grid"];
      rd.keys(g, "analysis.grid", {"n", "lo", "hi"});
      if (g["n"]) {
        const long n = rd.integer(g["n"], "analysis.grid.n");
        if (n < 2) rd.fail(g["n"], "analysis.grid.n must be at least 2");
        doc.grid_points = static_cast<std::size_t>(n);
      }
      if (g["lo"]) doc.grid_lo = rd.number(g["lo"], "analysis.grid.lo");
      if (g["hi"]) doc.grid_hi = rd.number(g["hi"], "analysis.grid.hi");
      if (!(doc.grid_lo > 0.0 && doc.grid_hi > doc.grid_lo)) rd.fail(g, "analysis.grid needs 0 < lo < hi");
    }
    if (a["deltas"]) {
      const YAML::Node d = a["deltas"];
      if (!d.IsSequence()) rd.fail(d, "analysis.deltas must be a list of bit strings");
      for (const auto& item : d) {
        const auto bits = rd.text(item, "analysis.deltas");
        try {
          SwitchingMask::from_bits(bits);
        } catch (const InputError& e) {
          rd.fail(item, e.what());
        }
        doc.deltas.push_back(bits);
      }
    }
    if (a["sweep"]) {
      const YAML::Node s = a["sweep"];
      rd.keys(s, "analysis.sweep", {"from", "to", "step", "mode"});
      SweepSpec sw;
      if (s["from"]) sw.from = rd.number(s["from"], "analysis.sweep.from");
      if (s["to"]) sw.to = rd.number(s["to"], "analysis.sweep.to");
      if (s["step"]) sw.step = rd.number(s["step"], "analysis.sweep.step");
      if (s["mode"]) {
        const auto mode = rd.text(s["mode"], "analysis.sweep.mode");
        if (mode != "tied" && mode != "grid") rd.fail(s["mode"], "analysis.sweep.mode must be 'tied' or 'grid'");
        sw.tied = mode == "tied";
      }
      if (!(sw.from > 0.0 && sw.to >= sw.from && sw.step > 0.0)) {
        rd.fail(s, "analysis.sweep needs 0 < from <= to and step > 0");
      }
      doc.sweep = sw;
    }
  }
  return doc;
}

// Canonical writer.

std::string num(double v) { return format_number(v); }

std::string list(const Vector& v) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v(i));
  return s + "]";
}

std::string list(const std::vector<double>& v) { return list(to_vector(v)); }

std::string matrix_text(const Matrix& M) {
  std::string s = "{dims: [" + std::to_string(M.rows()) + ", " + std::to_string(M.cols()) + "], unit: si, rows: [";
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    if (i) s += ", ";
    s += list(Vector(M.row(i).transpose()));
  }
  return s + "]}";
}

std::string vector_text(const Vector& v) { return "{unit: si, values: " + list(v) + "}"; }

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string disturbance_text(const DisturbanceProfile& p) {
  struct Visitor {
    std::string operator()(const disturbance::None&) const { return "{type: none}"; }
    std::string operator()(const disturbance::Step& s) const {
      return "{type: step, t0: " + num(s.t0) + ", amplitude: " + num(s.amplitude) + "}";
    }
    std::string operator()(const disturbance::OneMinusCos& s) const {
      return "{type: one_minus_cos, t0: " + num(s.t0) + ", duration: " + num(s.duration) +
             ", amplitude: " + num(s.amplitude) + "}";
    }
    std::string operator()(const disturbance::FilteredNoise& s) const {
      return "{type: filtered_noise, seed: " + std::to_string(s.seed) + ", bandwidth: " + num(s.bandwidth) +
             ", rms: " + num(s.rms) + "}";
    }
    std::string operator()(const disturbance::Table& s) const {
      return "{type: csv, path: " + quoted(s.path.generic_string()) + "}";
    }
  };
  return std::visit(Visitor{}, p);
}

void gain_text(std::ostringstream& out, const char* section, const char* key, const GainSource& g) {
  out << section << ":\n";
  if (g.lqr) {
    out << "  lqr:\n    Q: " << matrix_text(g.Q) << "\n    R: " << matrix_text(g.R) << "\n";
  } else {
    out << "  " << key << ": " << matrix_text(g.given) << "\n";
  }
}

}  // namespace

ScenarioDocument parse_scenario_text(const std::string& text, const std::string& origin,
                                     const std::filesystem::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ScenarioError(origin + ":" + std::to_string(e.mark.line + 1) + ":" + std::to_string(e.mark.column + 1) +
                        ": " + e.msg);
  }
  const Reader rd(origin, base_dir);
  if (!root.IsMap()) rd.fail(root, "scenario file must be a mapping of sections");
  return parse_root(root, rd);
}

ScenarioDocument read_scenario_document(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read scenario file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario_text(ss.str(), path.string(), path.parent_path());
}

std::string serialize(const ScenarioDocument& doc) {
  std::ostringstream out;
  if (!doc.name.empty()) out << "name: " << quoted(doc.name) << "\n";
  if (doc.plant) {
    const Plant& p = *doc.plant;
    out << "plant:\n";
    out << "  A: " << matrix_text(p.A) << "\n";
    out << "  B: " << matrix_text(p.B) << "\n";
    out << "  C: " << matrix_text(p.C) << "\n";
    out << "  D: " << matrix_text(p.D) << "\n";
    out << "  C_lim: " << matrix_text(p.C_lim) << "\n";
    out << "  B_dist: " << matrix_text(p.B_dist) << "\n";
  }
  if (doc.servo) {
    const PhysicalPlant& p = *doc.servo;
    out << "pi_servo:\n";
    out << "  A_p: " << matrix_text(p.A_p) << "\n";
    out << "  B_p: " << matrix_text(p.B_p) << "\n";
    out << "  C_p: " << matrix_text(p.C_p) << "\n";
    out << "  D_p: " << matrix_text(p.D_p) << "\n";
    out << "  C_reg: " << matrix_text(p.C_reg) << "\n";
    out << "  D_reg: " << matrix_text(p.D_reg) << "\n";
    out << "  C_lim: " << matrix_text(p.C_lim) << "\n";
    out << "  B_dist: " << matrix_text(p.B_dist) << "\n";
    out << "  K_I: " << matrix_text(doc.K_I) << "\n";
    out << "  K_P: " << matrix_text(doc.K_P) << "\n";
  }
  out << "limits:\n";
  if (doc.servo) {
    out << "  u_min: " << vector_text(doc.u_min) << "\n";
    out << "  u_max: " << vector_text(doc.u_max) << "\n";
  }
  out << "  y_min: " << vector_text(doc.y_min) << "\n";
  out << "  y_max: " << vector_text(doc.y_max) << "\n";
  out << "cbf:\n  lambdas: [";
  for (std::size_t i = 0; i < doc.lambdas.size(); ++i) out << (i ? ", " : "") << list(doc.lambdas[i]);
  out << "]\n";
  if (!doc.servo) gain_text(out, "baseline", "K", doc.baseline);
  gain_text(out, "observer", "L", doc.observer);
  if (doc.has_sim) {
    out << "sim:\n";
    out << "  t_final: " << num(doc.t_final) << "\n";
    out << "  dt: " << num(doc.dt) << "\n";
    out << "  x0: " << vector_text(doc.x0) << "\n";
    out << "  xhat0: " << vector_text(doc.xhat0) << "\n";
    out << "  command: [";
    for (std::size_t k = 0; k < doc.command.size(); ++k) {
      out << (k ? ", " : "") << "{t: " << num(doc.command[k].t) << ", unit: si, value: " << list(doc.command[k].value)
          << "}";
    }
    out << "]\n  disturbance: [";
    for (std::size_t k = 0; k < doc.disturbance.size(); ++k) {
      out << (k ? ", " : "") << disturbance_text(doc.disturbance[k]);
    }
    out << "]\n";
    out << "  augmentation: " << (doc.augmentation ? "true" : "false") << "\n";
    out << "  state_feedback: " << (doc.state_feedback ? "true" : "false") << "\n";
    out << "  actuator: " << (doc.actuator_in_sim ? "true" : "false") << "\n";
  }
  if (doc.actuator) {
    out << "actuator:\n  omega_n: " << num(doc.actuator->omega_n) << "\n  zeta: " << num(doc.actuator->zeta) << "\n";
    if (!doc.actuator->channels.empty()) {
      out << "  channels: [";
      for (std::size_t k = 0; k < doc.actuator->channels.size(); ++k) {
        out << (k ? ", " : "") << doc.actuator->channels[k];
      }
      out << "]\n";
    }
  }
  out << "analysis:\n";
  out << "  grid: {n: " << doc.grid_points << ", lo: " << num(doc.grid_lo) << ", hi: " << num(doc.grid_hi) << "}\n";
  if (!doc.deltas.empty()) {
    out << "  deltas: [";
    for (std::size_t k = 0; k < doc.deltas.size(); ++k) out << (k ? ", " : "") << quoted(doc.deltas[k]);
    out << "]\n";
  }
  if (doc.sweep) {
    out << "  sweep: {from: " << num(doc.sweep->from) << ", to: " << num(doc.sweep->to)
        << ", step: " << num(doc.sweep->step) << ", mode: " << (doc.sweep->tied ? "tied" : "grid") << "}\n";
  }
  return out.str();
}

LoadedScenario assemble(ScenarioDocument doc) {
  LoadedScenario out;
  Matrix command_map;
  if (doc.servo) {
    auto ext = extend_system(*doc.servo, doc.K_I, doc.K_P, BoxLimits{doc.u_min, doc.u_max},
                             BoxLimits{doc.y_min, doc.y_max}, doc.lambdas);
    out.plant = ext.plant;
    out.spec = ext.spec;
    command_map = ext.command_map();
    out.extended = std::move(ext);
  } else {
    out.plant = *doc.plant;
    out.spec = ConstraintSpec{doc.y_min, doc.y_max, doc.lambdas};
    out.spec.validate();
    if (out.spec.size() != out.plant.limited_outputs() || doc.y_max.size() != doc.y_min.size()) {
      throw InputError("limits must have one entry per row of C_lim");
    }
    command_map = Matrix::Zero(out.plant.inputs(), 0);
  }
  const Plant& P = out.plant;

  Matrix K;
  if (out.extended) {
    K = out.extended->K_ext;
  } else if (doc.baseline.lqr) {
    K = lqr_gain(AreProblem{P.A, P.B, doc.baseline.Q, doc.baseline.R});
  } else {
    K = doc.baseline.given;
  }
  Matrix L = doc.observer.lqr ? observer_gain(P.A, P.C, doc.observer.Q, doc.observer.R) : doc.observer.given;
  const bool designed = doc.observer.lqr || (!out.extended && doc.baseline.lqr);
  out.gains = make_gain_set(P, K, L, designed ? GainProvenance::lqr_designed : GainProvenance::given);

  try {
    out.design = build_design(P, out.spec);
  } catch (const DesignError& e) {
    out.design_error = e.what();
  }

  std::optional<ActuatorModel> actuator = doc.actuator;
  if (actuator && actuator->channels.empty()) {
    if (out.extended) {
      actuator->channels = out.extended->physical_channels();
    } else {
      for (int i = 0; i < P.inputs(); ++i) actuator->channels.push_back(i);
    }
  }

  if (doc.has_sim) {
    Scenario& sc = out.sim;
    sc.plant = P;
    sc.gains = out.gains;
    sc.spec = out.spec;
    sc.design = out.design;
    sc.command_map = command_map;
    sc.command = doc.command;
    sc.x0 = doc.x0;
    sc.xhat0 = doc.xhat0;
    sc.t_final = doc.t_final;
    sc.dt = doc.dt;
    sc.disturbance = doc.disturbance;
    sc.augmentation_enabled = doc.augmentation;
    sc.state_feedback = doc.state_feedback;
    if (doc.actuator_in_sim) sc.actuator = actuator;
    if (doc.augmentation && !out.design) throw DesignError("augmentation enabled but " + out.design_error);
    sc.validate();
  }

  out.margins.model = P;
  out.margins.gains = out.gains;
  out.margins.design = out.design;
  out.margins.actuator = actuator;
  out.margins.grid = FrequencyGrid::logspace(doc.grid_points, doc.grid_lo, doc.grid_hi);
  out.hash = fnv1a64(serialize(doc));
  out.doc = std::move(doc);
  return out;
}

LoadedScenario load_scenario(const std::filesystem::path& path) { return assemble(read_scenario_document(path)); }

std::vector<SwitchingMask> LoadedScenario::deltas() const {
  if (doc.deltas.empty()) return SwitchingMask::enumerate(spec.size());
  std::vector<SwitchingMask> out;
  for (const auto& bits : doc.deltas) {
    auto mask = SwitchingMask::from_bits(bits);
    if (mask.size() != spec.size()) throw InputError("delta '" + bits + "' does not match the limited outputs");
    out.push_back(mask);
  }
  return out;
}

std::vector<std::vector<double>> LoadedScenario::sweep_points() const {
  const SweepSpec sw = doc.sweep.value_or(SweepSpec{});
  std::vector<double> axis;
  const auto count = static_cast<long>(std::floor((sw.to - sw.from) / sw.step + 1e-9));
  for (long k = 0; k <= count; ++k) axis.push_back(sw.from + static_cast<double>(k) * sw.step);
  const auto m = static_cast<std::size_t>(spec.size());
  std::vector<std::vector<double>> points;
  if (sw.tied) {
    for (double a : axis) points.emplace_back(m, a);
    return points;
  }
  std::vector<std::size_t> idx(m, 0);
  while (true) {
    std::vector<double> p(m);
    for (std::size_t i = 0; i < m; ++i) p[i] = axis[idx[i]];
    points.push_back(p);
    std::size_t i = 0;
    while (i < m && ++idx[i] == axis.size()) idx[i++] = 0;
    if (i == m) break;
  }
  return points;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

}  // namespace cbfaug
