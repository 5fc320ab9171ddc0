#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <numbers>

#include "cbfaug/disturbance.hpp"

using namespace cbfaug;

TEST(Lcg64, MatchesReferenceSequence) {
  // Reference values from an independent big-integer evaluation of the recurrence.
  Lcg64 rng(42);
  EXPECT_DOUBLE_EQ(rng.uniform(), 0.5682303266439076);
  EXPECT_DOUBLE_EQ(rng.uniform(), 0.2254634289477513);
  EXPECT_DOUBLE_EQ(rng.uniform(), 0.41283831882951183);
}

TEST(Lcg64, NormalMoments) {
  Lcg64 rng(7);
  double s = 0, s2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s += z;
    s2 += z * z;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.01);
}

TEST(Disturbance, StepAndOneMinusCos) {
  DisturbanceSignal sig({disturbance::Step{1.0, 2.5}, disturbance::OneMinusCos{2.0, 4.0, 3.0}}, 0.01, 10.0);
  ASSERT_EQ(sig.size(), 2);
  EXPECT_EQ(sig(0.5)(0), 0.0);
  EXPECT_EQ(sig(1.0)(0), 2.5);
  EXPECT_EQ(sig(1.5)(1), 0.0);
  EXPECT_NEAR(sig(4.0)(1), 3.0, 1e-15);
  EXPECT_NEAR(sig(3.0)(1), 1.5 * (1.0 - std::cos(std::numbers::pi / 2)), 1e-15);
  EXPECT_EQ(sig(6.5)(1), 0.0);
}

TEST(Disturbance, FilteredNoiseRmsAndDeterminism) {
  const disturbance::FilteredNoise spec{99, 2.0, 0.01};
  DisturbanceSignal a({spec}, 1e-3, 2000.0);
  DisturbanceSignal b({spec}, 1e-3, 2000.0);
  double s2 = 0;
  int n = 0;
  for (double t = 0; t < 2000.0; t += 0.05, ++n) {
    const double v = a(t)(0);
    ASSERT_EQ(v, b(t)(0));
    s2 += v * v;
  }
  EXPECT_NEAR(std::sqrt(s2 / n), 0.01, 0.001);
  DisturbanceSignal c({disturbance::FilteredNoise{100, 2.0, 0.01}}, 1e-3, 10.0);
  EXPECT_NE(a(1.0)(0), c(1.0)(0));
}

TEST(Disturbance, CsvTableInterpolates) {
  const auto path = std::filesystem::temp_directory_path() / "cbfaug_dist_ok.csv";
  {
    std::ofstream f(path);
    f << "time_s,value\n0,0\n1,2\n3,-2\n";
  }
  const auto tab = load_disturbance_csv(path);
  DisturbanceSignal sig({tab}, 0.01, 5.0);
  EXPECT_DOUBLE_EQ(sig(0.5)(0), 1.0);
  EXPECT_DOUBLE_EQ(sig(2.0)(0), 0.0);
  EXPECT_DOUBLE_EQ(sig(10.0)(0), -2.0);
  EXPECT_DOUBLE_EQ(sig(-1.0)(0), 0.0);
}

TEST(Disturbance, CsvErrors) {
  const auto dir = std::filesystem::temp_directory_path();
  auto write = [&](const char* name, const char* text) {
    const auto p = dir / name;
    std::ofstream(p) << text;
    return p;
  };
  EXPECT_THROW(load_disturbance_csv(dir / "cbfaug_no_such.csv"), InputError);
  EXPECT_THROW(load_disturbance_csv(write("cbfaug_nohdr.csv", "0,1\n1,2\n")), InputError);
  EXPECT_THROW(load_disturbance_csv(write("cbfaug_bad.csv", "t,v\n0,1\n1,abc\n")), InputError);
  EXPECT_THROW(load_disturbance_csv(write("cbfaug_order.csv", "t,v\n0,1\n0,2\n")), InputError);
}
