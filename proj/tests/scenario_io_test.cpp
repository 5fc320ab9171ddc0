#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "cbfaug/csv_output.hpp"
#include "cbfaug/scenario_io.hpp"

using namespace cbfaug;

namespace {

const std::filesystem::path kData = CBFAUG_DATA_DIR;

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kMinimal = R"(name: tiny
plant:
  A: {dims: [1, 1], rows: [[-1]]}
  B: {dims: [1, 1], rows: [[1]]}
  C: {dims: [1, 1], rows: [[1]]}
  C_lim: {dims: [1, 1], rows: [[1]]}
limits:
  y_min: {values: [-1], unit: si}
  y_max: {values: [1], unit: si}
cbf:
  lambdas: [[-1]]
baseline:
  K: {dims: [1, 1], rows: [[1]]}
observer:
  L: {dims: [1, 1], rows: [[3]]}
)";

std::string with_line(const std::string& base, const std::string& from, const std::string& to) {
  std::string s = base;
  const auto pos = s.find(from);
  EXPECT_NE(pos, std::string::npos);
  s.replace(pos, from.size(), to);
  return s;
}

}  // namespace

TEST(ScenarioIo, FlightServoAssembly) {
  const auto sc = load_scenario(kData / "flight.scn");
  ASSERT_TRUE(sc.extended.has_value());
  EXPECT_EQ(sc.plant.states(), 3);
  EXPECT_EQ(sc.plant.inputs(), 2);
  EXPECT_DOUBLE_EQ(sc.plant.A(2, 0), 0.0);
  EXPECT_DOUBLE_EQ(sc.plant.A(2, 1), -4.47);
  EXPECT_DOUBLE_EQ(sc.plant.A(1, 1), -2.24);
  EXPECT_DOUBLE_EQ(sc.plant.A(1, 2), 0.990);
  EXPECT_NEAR(sc.spec.y_max(0), 8.0 * std::numbers::pi / 180.0, 1e-15);
  EXPECT_NEAR(sc.spec.y_max(0), 0.13963, 1e-5);
  EXPECT_NEAR(sc.spec.y_min(1), -0.08727, 1e-5);
  EXPECT_NEAR(sc.doc.x0(1), -4.0 * std::numbers::pi / 180.0, 1e-15);
  EXPECT_EQ(sc.deltas().size(), 4u);
  EXPECT_EQ(sc.sweep_points().size(), 19u);
  ASSERT_TRUE(sc.margins.actuator.has_value());
  EXPECT_EQ(sc.margins.actuator->channels, std::vector<int>{1});
}

TEST(ScenarioIo, DoubleIntegratorGains) {
  const auto sc = load_scenario(kData / "double_integrator.scn");
  EXPECT_FALSE(sc.extended.has_value());
  EXPECT_DOUBLE_EQ(sc.gains.L(0, 0), 4.0404);
  EXPECT_DOUBLE_EQ(sc.gains.L(1, 0), 3.1623);
  EXPECT_DOUBLE_EQ(sc.gains.K(0, 1), 2.0);
  ASSERT_TRUE(sc.design.has_value());
  EXPECT_DOUBLE_EQ(sc.sim.xhat0(1), 0.2);
  EXPECT_EQ(sc.margins.grid.size(), 2000u);
}

TEST(ScenarioIo, LqrGainSource) {
  const std::string text = with_line(kMinimal, "  K: {dims: [1, 1], rows: [[1]]}",
                                     "  lqr: {Q: {dims: [1, 1], rows: [[3]]}, R: {dims: [1, 1], rows: [[1]]}}");
  const auto sc = assemble(parse_scenario_text(text));
  // a = -1, b = 1, q = 3, r = 1: p^2 + 2p - 3 = 0, p = 1, K = 1.
  EXPECT_NEAR(sc.gains.K(0, 0), 1.0, 1e-12);
}

TEST(ScenarioIo, UnknownKeyReportsPosition) {
  const std::string text = std::string(kMinimal) + "bogus: 1\n";
  try {
    parse_scenario_text(text, "tiny.scn");
    FAIL();
  } catch (const ScenarioError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("tiny.scn:16:"), std::string::npos) << msg;
    EXPECT_NE(msg.find("bogus"), std::string::npos) << msg;
  }
}

TEST(ScenarioIo, DimensionMismatchNamesMatrix) {
  const std::string text = with_line(kMinimal, "B: {dims: [1, 1], rows: [[1]]}", "B: {dims: [2, 1], rows: [[1]]}");
  try {
    parse_scenario_text(text, "tiny.scn");
    FAIL();
  } catch (const ScenarioError& e) {
    EXPECT_NE(std::string(e.what()).find("B"), std::string::npos) << e.what();
  }
}

TEST(ScenarioIo, LimitsRequireUnit) {
  const std::string text = with_line(kMinimal, "y_min: {values: [-1], unit: si}", "y_min: {values: [-1]}");
  EXPECT_THROW(parse_scenario_text(text), ScenarioError);
  const std::string bare = with_line(kMinimal, "y_min: {values: [-1], unit: si}", "y_min: [-1]");
  EXPECT_THROW(parse_scenario_text(bare), ScenarioError);
}

TEST(ScenarioIo, MalformedYaml) { EXPECT_THROW(parse_scenario_text("plant: [unclosed\n"), ScenarioError); }

TEST(ScenarioIo, MissingFile) { EXPECT_THROW(load_scenario(kData / "nope.scn"), InputError); }

TEST(ScenarioIo, CanonicalRoundTrip) {
  for (const char* name : {"flight.scn", "double_integrator.scn", "flight_reconstructed.scn"}) {
    const auto doc = read_scenario_document(kData / name);
    const std::string once = serialize(doc);
    const std::string twice = serialize(parse_scenario_text(once, name, kData));
    EXPECT_EQ(once, twice) << name;
    EXPECT_EQ(fnv1a64(once), load_scenario(kData / name).hash) << name;
  }
}

TEST(ScenarioIo, HashIgnoresFormatting) {
  const std::string spaced = with_line(kMinimal, "rows: [[-1]]", "rows: [ [ -1.0 ] ]");
  EXPECT_EQ(assemble(parse_scenario_text(kMinimal)).hash, assemble(parse_scenario_text(spaced)).hash);
  const std::string changed = with_line(kMinimal, "rows: [[-1]]", "rows: [[-2]]");
  EXPECT_NE(assemble(parse_scenario_text(kMinimal)).hash, assemble(parse_scenario_text(changed)).hash);
}

TEST(Fnv1a, KnownVectors) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(hex64(0xabcULL), "0000000000000abc");
}

TEST(Csv, FormatNumber) {
  EXPECT_EQ(format_number(0.1), "0.10000000000000001");
  EXPECT_EQ(format_number(-0.0), "0");
  EXPECT_EQ(format_number(kInf), "inf");
  EXPECT_EQ(format_number(-kInf), "-inf");
  EXPECT_EQ(format_number(std::nan("")), "nan");
  EXPECT_EQ(format_number(2.0), "2");
}

TEST(Csv, ManifestLineFirstAndWidthChecked) {
  const auto dir = std::filesystem::temp_directory_path() / "cbfaug_csv_test";
  std::filesystem::create_directories(dir);
  RunManifest m{"1.0.0", "simulate", 0x1234, {"x.csv"}};
  {
    CsvWriter w(dir / "x.csv", m, {"a", "b"});
    w.row(std::vector<double>{1.0, 2.5});
    EXPECT_THROW(w.row(std::vector<double>{1.0}), Error);
  }
  const std::string text = slurp(dir / "x.csv");
  EXPECT_EQ(text.rfind(m.comment_line() + "\n", 0), 0u);
  EXPECT_NE(text.find("a,b\n1,2.5\n"), std::string::npos);
  EXPECT_NE(m.comment_line().find("scenario=0000000000001234"), std::string::npos);
  write_manifest_json(dir, m);
  EXPECT_TRUE(std::filesystem::exists(dir / "manifest.json"));
}
