// Command-line front end: check, design, simulate, margins, sweep, bound.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cbfaug/bounds.hpp"
#include "cbfaug/csv_output.hpp"
#include "cbfaug/scenario_io.hpp"

namespace fs = std::filesystem;
using namespace cbfaug;

namespace {

enum Exit { kOk = 0, kInput = 1, kCheckFailed = 2, kBlowUp = 3 };

// CBFAUG_LOG: quiet | info (default) | debug
int log_level() {
  const char* env = std::getenv("CBFAUG_LOG");
  if (!env) return 1;
  const std::string v = env;
  if (v == "quiet") return 0;
  if (v == "debug") return 2;
  return 1;
}

void info(const std::string& msg) {
  if (log_level() >= 1) std::cerr << msg << '\n';
}

void debug(const std::string& msg) {
  if (log_level() >= 2) std::cerr << "debug: " << msg << '\n';
}

struct Options {
  std::string subcommand;
  fs::path scenario;
  fs::path out = "out";
  bool no_augmentation = false;
  std::string delta;
  std::string grid;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

void apply_overrides(LoadedScenario& sc, const Options& opt) {
  if (!opt.grid.empty()) {
    const auto parts = split(opt.grid, ',');
    if (parts.size() != 3) throw InputError("--grid expects n,lo,hi");
    try {
      sc.margins.grid = FrequencyGrid::logspace(std::stoul(parts[0]), std::stod(parts[1]), std::stod(parts[2]));
    } catch (const std::logic_error&) {
      throw InputError("--grid expects n,lo,hi");
    }
  }
  if (!opt.delta.empty()) {
    sc.doc.deltas = split(opt.delta, ',');
    sc.deltas();  // validates sizes
  }
  if (opt.no_augmentation) sc.sim.augmentation_enabled = false;
}

std::string matrix_line(const Matrix& M) {
  std::ostringstream out;
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    out << (i ? "; " : "");
    for (Eigen::Index j = 0; j < M.cols(); ++j) out << (j ? " " : "") << format_number(M(i, j));
  }
  return out.str();
}

std::string eig_line(const EigenReport& r) {
  std::ostringstream out;
  for (std::size_t k = 0; k < r.eigenvalues.size(); ++k) {
    const auto& e = r.eigenvalues[k];
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s%.4f%+.4fi", k ? ", " : "", e.real(), e.imag());
    out << buf;
  }
  return out.str();
}

int cmd_check(const LoadedScenario& sc) {
  const auto report = check_cbf_able(sc.plant, sc.spec);
  const auto obs = eigen_report(sc.plant.A - sc.gains.L * sc.plant.C);
  std::cout << "cbf_able: " << (report.cbf_able ? "yes" : "no") << '\n';
  std::cout << "H_pi nonsingular: " << (report.h_pi_nonsingular ? "yes" : "no") << '\n';
  if (report.constrained_eigs) {
    std::cout << "eig(A - B H_pi^-1 H_x): " << eig_line(*report.constrained_eigs) << " ("
              << to_string(report.constrained_eigs->stability) << ")\n";
  }
  for (const auto& w : report.warnings) std::cout << "warning: " << w << '\n';
  std::cout << "eig(A - BK): " << eig_line(eigen_report(sc.plant.A - sc.plant.B * sc.gains.K)) << '\n';
  std::cout << "eig(A - LC): " << eig_line(obs) << '\n';
  for (const auto& w : sc.gains.warnings) std::cout << "warning: " << w << '\n';
  bool rule_ok = false;
  try {
    const auto rule = check_parameter_rule(sc.spec, obs);
    rule_ok = true;
    for (std::size_t i = 0; i < rule.size(); ++i) {
      std::cout << "parameter rule, output " << i << ": " << (rule[i] ? "holds" : "violated") << " (alpha* = "
                << sc.spec.slowest_rate(static_cast<int>(i)) << ", |max Re eig(A - LC)| = " << -obs.max_real_part
                << ")\n";
      rule_ok = rule_ok && rule[i];
    }
  } catch (const ParameterRuleError& e) {
    std::cout << "parameter rule: " << e.what() << '\n';
  }
  return report.cbf_able && rule_ok ? kOk : kCheckFailed;
}

RunManifest manifest_for(const LoadedScenario& sc, const std::string& sub) {
  RunManifest m;
  m.version = CBFAUG_VERSION;
  m.subcommand = sub;
  m.scenario_hash = sc.hash;
  return m;
}

void finish(const fs::path& dir, RunManifest& m) {
  write_manifest_json(dir, m);
  for (const auto& f : m.outputs) info("wrote " + (dir / f).string());
}

int cmd_design(const LoadedScenario& sc, const fs::path& dir) {
  if (!sc.design) throw DesignError(sc.design_error);
  const auto& d = *sc.design;
  RunManifest m = manifest_for(sc, "design");
  m.outputs = {"design.csv"};
  std::vector<std::string> header = {"output", "relative_degree", "alpha_pi", "y_min", "y_max"};
  for (Eigen::Index j = 0; j < d.H_x.cols(); ++j) header.push_back("H_x_" + std::to_string(j));
  for (Eigen::Index j = 0; j < d.H_pi.cols(); ++j) header.push_back("H_pi_" + std::to_string(j));
  CsvWriter csv(dir / "design.csv", m, header);
  for (int i = 0; i < d.size(); ++i) {
    std::vector<double> row = {static_cast<double>(i), static_cast<double>(d.relative_degree[i]), d.alpha(i),
                               sc.spec.y_min(i), sc.spec.y_max(i)};
    for (Eigen::Index j = 0; j < d.H_x.cols(); ++j) row.push_back(d.H_x(i, j));
    for (Eigen::Index j = 0; j < d.H_pi.cols(); ++j) row.push_back(d.H_pi(i, j));
    csv.row(row);
  }
  std::cout << "H_x: " << matrix_line(d.H_x) << "\nH_pi: " << matrix_line(d.H_pi) << "\n";
  finish(dir, m);
  return kOk;
}

int cmd_simulate(const LoadedScenario& sc, const fs::path& dir) {
  if (!sc.doc.has_sim) throw InputError("simulate needs a sim section");
  const Trajectory tr = simulate(sc.sim);
  const auto n = tr.x.cols();
  const auto nh = tr.x_hat.cols();
  const auto m = tr.u.cols();
  const auto ml = tr.y_lim.cols();

  RunManifest man = manifest_for(sc, "simulate");
  man.outputs = {"trajectory.csv", "violations.csv"};
  std::vector<std::string> header = {"t"};
  for (Eigen::Index i = 0; i < n; ++i) header.push_back("x" + std::to_string(i));
  for (Eigen::Index i = 0; i < nh; ++i) header.push_back("xhat" + std::to_string(i));
  for (Eigen::Index i = 0; i < m; ++i) header.push_back("u" + std::to_string(i));
  for (Eigen::Index i = 0; i < m; ++i) header.push_back("pi" + std::to_string(i));
  for (Eigen::Index i = 0; i < ml; ++i) header.push_back("y_lim" + std::to_string(i));
  for (Eigen::Index i = 0; i < ml; ++i) header.push_back("delta" + std::to_string(i));
  CsvWriter csv(dir / "trajectory.csv", man, header);
  for (std::size_t k = 0; k < tr.samples(); ++k) {
    const auto r = static_cast<Eigen::Index>(k);
    std::vector<double> row = {tr.time[k]};
    for (Eigen::Index i = 0; i < n; ++i) row.push_back(tr.x(r, i));
    for (Eigen::Index i = 0; i < nh; ++i) row.push_back(tr.x_hat(r, i));
    for (Eigen::Index i = 0; i < m; ++i) row.push_back(tr.u(r, i));
    for (Eigen::Index i = 0; i < m; ++i) row.push_back(tr.pi(r, i));
    for (Eigen::Index i = 0; i < ml; ++i) row.push_back(tr.y_lim(r, i));
    for (Eigen::Index i = 0; i < ml; ++i) row.push_back(tr.delta(r, i));
    csv.row(row);
  }

  const auto report = violation_report(tr, sc.spec);
  CsvWriter vcsv(dir / "violations.csv", man,
                 {"output", "max_violation", "first_time", "last_time", "duration", "samples"});
  for (std::size_t i = 0; i < report.outputs.size(); ++i) {
    const auto& o = report.outputs[i];
    vcsv.row(std::vector<double>{static_cast<double>(i), o.max_violation, o.first_time, o.last_time, o.duration,
                                 static_cast<double>(o.samples)});
    std::cout << "output " << i << ": " << (o.any() ? "violated" : "within limits") << ", max violation "
              << format_number(o.max_violation) << ", last at t = " << format_number(o.last_time) << " s\n";
  }
  for (const auto& w : tr.warnings) info("warning: " + w);
  finish(dir, man);
  return kOk;
}

std::string report_tag(const MarginReport& r) { return r.delta.bits() + (r.actuator ? "_act" : ""); }

std::string margin_text(const ClassicalMargins& c) {
  char gm[32] = "inf";
  char pm[32] = "none";
  if (!std::isinf(c.gm_db)) std::snprintf(gm, sizeof gm, "%.2f", c.gm_db);
  if (c.pm_deg) std::snprintf(pm, sizeof pm, "%.2f", *c.pm_deg);
  return "GM = " + std::string(gm) + " dB, PM = " + pm + " deg";
}

std::vector<double> margin_cells(const ClassicalMargins& c) {
  return {c.gm_db, c.pm_deg.value_or(std::nan("")), c.phase_crossover, c.gain_crossover};
}

std::vector<double> disk_cells(const DiskMargins& d) { return {d.alpha, d.gm_low_db, d.gm_high_db, d.pm_deg}; }

int cmd_margins(const LoadedScenario& sc, const fs::path& dir) {
  const auto deltas = sc.deltas();
  for (const auto& d : deltas) {
    if (d.any() && !sc.design) throw DesignError(sc.design_error);
  }
  const auto reports = margin_table(sc.margins, deltas);
  RunManifest man = manifest_for(sc, "margins");
  man.outputs.push_back("margins.csv");
  CsvWriter csv(dir / "margins.csv", man,
                {"delta", "actuator", "channel", "gm_db", "pm_deg", "phase_crossover", "gain_crossover",
                 "disk_alpha", "disk_gm_low_db", "disk_gm_high_db", "disk_pm_deg"});
  for (const auto& r : reports) {
    for (std::size_t ch = 0; ch < r.channel.size(); ++ch) {
      std::vector<std::string> row = {r.delta.bits(), r.actuator ? "1" : "0", std::to_string(ch)};
      for (double v : margin_cells(r.channel[ch])) row.push_back(format_number(v));
      for (double v : disk_cells(r.disk)) row.push_back(format_number(v));
      csv.row(row);
      std::cout << "delta=" << r.delta.bits() << (r.actuator ? " actuator" : "         ") << " channel " << ch << ": "
                << margin_text(r.channel[ch]) << '\n';
    }
    std::cout << "delta=" << r.delta.bits() << (r.actuator ? " actuator" : "         ")
              << " disk: alpha = " << std::to_string(r.disk.alpha) << ", PM >= " << std::to_string(r.disk.pm_deg)
              << " deg\n";
    for (const auto& w : r.warnings) debug(w);
  }

  for (const auto& r : reports) {
    const auto loop = loop_model(sc.margins.model, sc.margins.gains, sc.design ? &*sc.design : nullptr, r.delta,
                                 r.actuator ? with_actuator(sc.margins.model, *sc.margins.actuator)
                                            : sc.margins.model);
    const auto resp = frequency_response(loop, sc.margins.grid);
    const int m = loop.channels();
    std::vector<std::string> bode_header = {"omega"};
    std::vector<std::string> nyq_header = {"omega"};
    for (int ch = 0; ch < m; ++ch) {
      bode_header.push_back("mag_db_" + std::to_string(ch));
      bode_header.push_back("phase_deg_" + std::to_string(ch));
      nyq_header.push_back("re_" + std::to_string(ch));
      nyq_header.push_back("im_" + std::to_string(ch));
    }
    const std::string bode_name = "bode_" + report_tag(r) + ".csv";
    const std::string nyq_name = "nyquist_" + report_tag(r) + ".csv";
    man.outputs.push_back(bode_name);
    man.outputs.push_back(nyq_name);
    CsvWriter bode(dir / bode_name, man, bode_header);
    CsvWriter nyq(dir / nyq_name, man, nyq_header);
    for (std::size_t k = 0; k < resp.size(); ++k) {
      if (!resp.valid[k]) continue;
      std::vector<double> b = {resp.omega[k]};
      std::vector<double> q = {resp.omega[k]};
      for (int ch = 0; ch < m; ++ch) {
        const Complex z = loop_at_a_time(resp.value[k], ch);
        b.push_back(to_db(std::abs(z)));
        b.push_back(phase_deg(z));
        q.push_back(z.real());
        q.push_back(z.imag());
      }
      bode.row(b);
      nyq.row(q);
    }
  }
  finish(dir, man);
  return kOk;
}

int cmd_sweep(const LoadedScenario& sc, const fs::path& dir) {
  const auto points = sc.sweep_points();
  const auto deltas = sc.deltas();
  const auto result = sweep(sc.margins, sc.spec, points, deltas);
  RunManifest man = manifest_for(sc, "sweep");
  man.outputs = {"sweep.csv"};
  std::vector<std::string> header;
  for (int i = 0; i < sc.spec.size(); ++i) header.push_back("alpha_" + std::to_string(i));
  for (const char* h : {"valid", "delta", "actuator", "channel", "gm_db", "pm_deg", "phase_crossover",
                        "gain_crossover", "disk_alpha", "disk_gm_low_db", "disk_gm_high_db", "disk_pm_deg"}) {
    header.push_back(h);
  }
  CsvWriter csv(dir / "sweep.csv", man, header);
  std::size_t invalid = 0;
  for (const auto& p : result) {
    std::vector<std::string> prefix;
    for (double a : p.alpha) prefix.push_back(format_number(a));
    if (!p.valid) {
      ++invalid;
      auto row = prefix;
      row.insert(row.end(), {"0", "", "", "", "nan", "nan", "nan", "nan", "nan", "nan", "nan", "nan"});
      csv.row(row);
      debug("invalid sweep point: " + p.reason);
      continue;
    }
    for (const auto& r : p.reports) {
      for (std::size_t ch = 0; ch < r.channel.size(); ++ch) {
        auto row = prefix;
        row.insert(row.end(), {"1", r.delta.bits(), r.actuator ? "1" : "0", std::to_string(ch)});
        for (double v : margin_cells(r.channel[ch])) row.push_back(format_number(v));
        for (double v : disk_cells(r.disk)) row.push_back(format_number(v));
        csv.row(row);
      }
    }
  }
  std::cout << result.size() << " sweep points, " << invalid << " invalid\n";
  finish(dir, man);
  return kOk;
}

int cmd_bound(const LoadedScenario& sc, const fs::path& dir) {
  if (!sc.doc.has_sim) throw InputError("bound needs a sim section for x0 and xhat0");
  const auto bounds = invariance_bounds(sc.plant, sc.gains.L, sc.spec, sc.doc.x0, sc.doc.xhat0);
  RunManifest man = manifest_for(sc, "bound");
  man.outputs = {"bound.csv"};
  CsvWriter csv(dir / "bound.csv", man,
                {"output", "alpha_star", "lambda_max", "k", "e0_norm", "h_min_0", "h_max_0", "rule_holds",
                 "t_bound"});
  for (const auto& b : bounds) {
    csv.row(std::vector<double>{static_cast<double>(b.output), b.alpha_star, b.lambda_max, b.k, b.e0_norm,
                                b.h_min_0, b.h_max_0, b.rule_holds ? 1.0 : 0.0, b.t_bound});
    std::cout << "output " << b.output << ": k = " << format_number(b.k) << ", rule "
              << (b.rule_holds ? "holds" : "violated") << ", t_bound = " << format_number(b.t_bound) << " s\n";
  }
  finish(dir, man);
  return kOk;
}

int run(const Options& opt) {
  LoadedScenario sc = load_scenario(opt.scenario);
  apply_overrides(sc, opt);
  debug("scenario hash " + hex64(sc.hash));
  if (opt.subcommand == "check") return cmd_check(sc);
  fs::create_directories(opt.out);
  if (opt.subcommand == "design") return cmd_design(sc, opt.out);
  if (opt.subcommand == "simulate") return cmd_simulate(sc, opt.out);
  if (opt.subcommand == "margins") return cmd_margins(sc, opt.out);
  if (opt.subcommand == "sweep") return cmd_sweep(sc, opt.out);
  if (opt.subcommand == "bound") return cmd_bound(sc, opt.out);
  throw InputError("unknown subcommand " + opt.subcommand);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CBF output-feedback augmentation toolkit"};
  app.set_version_flag("--version", std::string(CBFAUG_VERSION));
  app.require_subcommand(1);
  Options opt;
  const std::vector<std::pair<const char*, const char*>> subs = {
      {"check", "CBF-ability and parameter-rule report (exit 2 when either fails)"},
      {"design", "write H_x, H_pi, alpha_pi and relative degrees"},
      {"simulate", "closed-loop simulation and violation report"},
      {"margins", "loop-at-a-time and disk margins per switching mask"},
      {"sweep", "margins over a grid of barrier rates"},
      {"bound", "envelope constant and invariance time per constraint"}};
  for (const auto& [name, help] : subs) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("scenario", opt.scenario, "scenario file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "output directory");
    sub->add_option("--grid", opt.grid, "frequency grid n,lo,hi (rad/s)");
    sub->add_option("--delta", opt.delta, "switching masks, e.g. 10 or 00,10,01,11");
    sub->add_flag("--no-augmentation", opt.no_augmentation, "simulate the baseline only");
    sub->callback([&opt, name = std::string(name)] { opt.subcommand = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kInput;
  }

  try {
    return run(opt);
  } catch (const NumericalBlowUp& e) {
    std::cerr << "error: numerical blow-up: " << e.what() << '\n';
    return kBlowUp;
  } catch (const DesignError& e) {
    std::cerr << "error: design: " << e.what() << '\n';
    return kCheckFailed;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInput;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInput;
  }
}
