#include <gtest/gtest.h>

#include <random>

#include "cbfaug/analysis.hpp"
#include "oracles.hpp"

using namespace cbfaug;

namespace {

struct Loop {
  Plant plant;
  GainSet gains;
  ConstraintSpec spec;
  AugmentationDesign design;
};

// Two-input plant with two relative-degree-one limited outputs.
Loop random_loop(std::mt19937_64& rng) {
  Loop l;
  const Matrix A = oracle::random_matrix(rng, 3, 3);
  const Matrix B = oracle::random_matrix(rng, 3, 2);
  const Matrix C = oracle::random_matrix(rng, 2, 3);
  const Matrix Cl = oracle::random_matrix(rng, 2, 3);
  l.plant = Plant::make(A, B, C, Matrix(), Cl);
  const Matrix K = lqr_gain(AreProblem{A, B, Matrix::Identity(3, 3), Matrix::Identity(2, 2)});
  const Matrix L = observer_gain(A, C, Matrix::Identity(3, 3), Matrix::Identity(2, 2));
  l.gains = make_gain_set(l.plant, K, L, GainProvenance::lqr_designed);
  l.spec = ConstraintSpec{Vector::Constant(2, -1), Vector::Constant(2, 1), {{-1.0}, {-2.0}}};
  l.design = build_design(l.plant, l.spec);
  return l;
}

MarginProblem problem_of(const Loop& l, std::size_t n = 300) {
  MarginProblem p;
  p.model = l.plant;
  p.gains = l.gains;
  p.design = l.design;
  p.grid = FrequencyGrid::logspace(n, 1e-2, 1e3);
  return p;
}

}  // namespace

TEST(FrequencyGrid, Logspace) {
  const auto g = FrequencyGrid::logspace(5, 1e-2, 1e2);
  ASSERT_EQ(g.size(), 5u);
  EXPECT_DOUBLE_EQ(g.omega[0], 1e-2);
  EXPECT_NEAR(g.omega[2], 1.0, 1e-14);
  EXPECT_DOUBLE_EQ(g.omega[4], 1e2);
  EXPECT_THROW(FrequencyGrid::logspace(1, 1, 2), InputError);
  EXPECT_THROW(FrequencyGrid::logspace(5, 0, 2), InputError);
  EXPECT_THROW(FrequencyGrid::logspace(5, 3, 2), InputError);
}

TEST(ClassicalMargins, Integrator) {
  const auto m = classical_margins([](double w) { return 1.0 / Complex(0.0, w); }, FrequencyGrid::standard());
  ASSERT_TRUE(m.pm_deg.has_value());
  EXPECT_NEAR(*m.pm_deg, 90.0, 1e-6);
  EXPECT_NEAR(m.gain_crossover, 1.0, 1e-5);
  EXPECT_TRUE(std::isinf(m.gm_db));
}

TEST(ClassicalMargins, IntegratorWithLag) {
  // 1/(s(s+1)): crossover at w^2 = (sqrt(5) - 1)/2, PM = 180 - 90 - atan(w).
  const auto m = classical_margins([](double w) {
    const Complex s(0.0, w);
    return 1.0 / (s * (s + 1.0));
  }, FrequencyGrid::standard());
  const double wc = std::sqrt((std::sqrt(5.0) - 1.0) / 2.0);
  ASSERT_TRUE(m.pm_deg.has_value());
  EXPECT_NEAR(m.gain_crossover, wc, 1e-5);
  EXPECT_NEAR(*m.pm_deg, 90.0 - std::atan(wc) * 180.0 / std::numbers::pi, 1e-4);
  EXPECT_NEAR(*m.pm_deg, 51.83, 0.01);
}

TEST(ClassicalMargins, ThirdOrderGainMargin) {
  // 2/(s+1)^3: phase -180 at w = sqrt(3), |L| = 2/8, GM = 20 log10(4).
  const auto m = classical_margins([](double w) {
    const Complex s(0.0, w);
    return 2.0 / ((s + 1.0) * (s + 1.0) * (s + 1.0));
  }, FrequencyGrid::standard());
  EXPECT_NEAR(m.phase_crossover, std::sqrt(3.0), 1e-5);
  EXPECT_NEAR(m.gm_db, 20.0 * std::log10(4.0), 1e-4);
}

TEST(ClassicalMargins, GridOnlyAgreesWithBisection) {
  const auto grid = FrequencyGrid::standard();
  auto f = [](double w) {
    const Complex s(0.0, w);
    return 2.0 / ((s + 1.0) * (s + 1.0) * (s + 1.0));
  };
  std::vector<Complex> v;
  for (double w : grid.omega) v.push_back(f(w));
  const auto a = classical_margins(grid.omega, v);
  const auto b = classical_margins(f, grid);
  EXPECT_NEAR(a.gm_db, b.gm_db, 1e-2);
  ASSERT_TRUE(a.pm_deg && b.pm_deg);
  EXPECT_NEAR(*a.pm_deg, *b.pm_deg, 1e-2);
}

TEST(DiskMargins, FromAlpha) {
  const auto d = disk_from_alpha(0.5, 1.0);
  EXPECT_NEAR(d.gm_low_db, 20.0 * std::log10(1.0 / 1.5), 1e-12);
  EXPECT_NEAR(d.gm_low_db, -3.52, 5e-3);
  EXPECT_NEAR(d.gm_high_db, 6.02, 5e-3);
  EXPECT_NEAR(d.pm_deg, 2.0 * std::asin(0.25) * 180.0 / std::numbers::pi, 1e-12);
  const auto one = disk_from_alpha(1.0, 1.0);
  EXPECT_NEAR(one.pm_deg, 60.0, 1e-12);
  EXPECT_TRUE(std::isinf(one.gm_high_db));
}

TEST(DiskMargins, ScalarResponse) {
  // Constant loop L = -0.5: |1 + L| = 0.5, |1 + 1/L| = 1.
  FrequencyResponse r;
  r.omega = {1.0, 2.0};
  r.value = {ComplexMatrix::Constant(1, 1, Complex(-0.5, 0.0)), ComplexMatrix::Constant(1, 1, Complex(-0.5, 0.0))};
  r.valid = {true, true};
  const auto d = disk_margins(r);
  EXPECT_NEAR(d.alpha, 0.5, 1e-14);
}

TEST(LoopAtATime, MatchesDirectElimination) {
  ComplexMatrix L(2, 2);
  L << Complex(1, 2), Complex(0.5, -1), Complex(-0.3, 0.2), Complex(2, 1);
  // Channel 0 with channel 1 closed: L00 - L01 L10 / (1 + L11).
  const Complex expected = L(0, 0) - L(0, 1) * L(1, 0) / (1.0 + L(1, 1));
  EXPECT_NEAR(std::abs(loop_at_a_time(L, 0) - expected), 0.0, 1e-14);
  const Complex expected1 = L(1, 1) - L(1, 0) * L(0, 1) / (1.0 + L(0, 0));
  EXPECT_NEAR(std::abs(loop_at_a_time(L, 1) - expected1), 0.0, 1e-14);
  ComplexMatrix one = ComplexMatrix::Constant(1, 1, Complex(0.3, 0.4));
  EXPECT_EQ(loop_at_a_time(one, 0), Complex(0.3, 0.4));
}

TEST(WithActuator, SecondOrderStates) {
  const Plant p = Plant::make(Matrix::Constant(1, 1, -1.0), Matrix::Ones(1, 1), Matrix::Ones(1, 1), Matrix(),
                              Matrix::Ones(1, 1));
  const Plant q = with_actuator(p, ActuatorModel{70.0, 0.7, {0}});
  ASSERT_EQ(q.states(), 3);
  EXPECT_DOUBLE_EQ(q.A(2, 1), -4900.0);
  EXPECT_NEAR(q.A(2, 2), -98.0, 1e-12);
  EXPECT_DOUBLE_EQ(q.A(1, 2), 1.0);
  EXPECT_DOUBLE_EQ(q.A(0, 1), 1.0);
  EXPECT_EQ(q.B(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(q.B(2, 0), 4900.0);
  // DC gain unchanged, and the response equals plant times actuator.
  const Complex dc = oracle::transfer_function(q.A, q.B, q.C, q.D, 0.0)(0, 0);
  EXPECT_NEAR(std::abs(dc - 1.0), 0.0, 1e-12);
  const Complex s(0.0, 30.0);
  const Complex expect = 1.0 / (s + 1.0) * 4900.0 / (s * s + 98.0 * s + 4900.0);
  EXPECT_NEAR(std::abs(oracle::transfer_function(q.A, q.B, q.C, q.D, s)(0, 0) - expect), 0.0, 1e-12);
  EXPECT_THROW(with_actuator(p, ActuatorModel{70.0, 0.7, {1}}), InputError);
}

TEST(LoopModel, InactiveMaskIsBaseline) {
  std::mt19937_64 rng(31);
  const auto l = random_loop(rng);
  const auto loop = loop_model(l.plant, l.gains, &l.design, SwitchingMask::none(2), l.plant);
  EXPECT_LE((loop.K_total - l.gains.K).norm(), 0.0);
  const auto all = loop_model(l.plant, l.gains, &l.design, SwitchingMask::all(2), l.plant);
  EXPECT_LE((all.K_total - l.design.H_pi_inv * l.design.H_x).norm(), 1e-10 * (1.0 + all.K_total.norm()));
  EXPECT_THROW(loop_model(l.plant, l.gains, nullptr, SwitchingMask::all(2), l.plant), InputError);
}

TEST(LoopModel, MatchesRationalOracle) {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 5; ++trial) {
    const auto l = random_loop(rng);
    for (const auto& delta : SwitchingMask::enumerate(2)) {
      const auto loop = loop_model(l.plant, l.gains, &l.design, delta, l.plant);
      const Matrix Z = Matrix::Zero(loop.K_total.rows(), loop.L.cols());
      for (double w : {0.05, 0.7, 3.0, 40.0}) {
        const Complex s(0.0, w);
        const ComplexMatrix ctrl = oracle::transfer_function(loop.A_c, loop.L, loop.K_total, Z, s);
        const ComplexMatrix P = oracle::transfer_function(l.plant.A, l.plant.B, l.plant.C, l.plant.D, s);
        const ComplexMatrix expected = ctrl * P;
        const ComplexMatrix got = loop_gain_at(loop, s);
        EXPECT_LE((got - expected).norm(), 1e-8 * (1.0 + expected.norm())) << "trial " << trial << " w " << w;
      }
    }
  }
}

TEST(LoopModel, PoleOnGridIsReported) {
  Matrix A(2, 2), B(2, 1), C(1, 2), Cl(1, 2), K(1, 2), L(2, 1);
  A << 0, 1, -1, 0;  // poles at +-i
  B << 0, 1;
  C << 1, 0;
  Cl << 0, 1;
  K << 1, 1;
  L << 1, 1;
  const Plant p = Plant::make(A, B, C, Matrix(), Cl);
  const auto gs = make_gain_set(p, K, L, GainProvenance::given);
  const auto loop = loop_model(p, gs, nullptr, SwitchingMask::none(1), p);
  EXPECT_THROW(loop_gain_at(loop, Complex(0.0, 1.0)), PoleAtGridError);
  const auto r = frequency_response(loop, FrequencyGrid::logspace(3, 0.1, 10.0));
  EXPECT_FALSE(r.valid[1]);
  EXPECT_FALSE(r.warnings.empty());
}

TEST(FrequencyResponse, SerialEqualsParallel) {
  std::mt19937_64 rng(41);
  const auto l = random_loop(rng);
  const auto loop = loop_model(l.plant, l.gains, &l.design, SwitchingMask::from_bits("10"), l.plant);
  const auto grid = FrequencyGrid::logspace(500, 1e-3, 1e3);
  const auto a = frequency_response_serial(loop, grid);
  const auto b = frequency_response(loop, grid);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    ASSERT_EQ(a.valid[k], b.valid[k]);
    EXPECT_EQ((a.value[k] - b.value[k]).norm(), 0.0);
  }
}

TEST(MarginTable, ActuatorRowsFollowEachMask) {
  std::mt19937_64 rng(43);
  auto prob = problem_of(random_loop(rng));
  prob.actuator = ActuatorModel{70.0, 0.7, {0, 1}};
  const auto masks = SwitchingMask::enumerate(2);
  const auto table = margin_table(prob, masks);
  ASSERT_EQ(table.size(), 8u);
  EXPECT_FALSE(table[0].actuator);
  EXPECT_TRUE(table[1].actuator);
  EXPECT_EQ(table[2].delta.bits(), "10");
  EXPECT_EQ(table[0].channel.size(), 2u);
}

TEST(Sweep, UniformRates) {
  const ConstraintSpec spec{Vector::Constant(2, -1), Vector::Constant(2, 1), {{-1.0}, {-1.0, -2.0}}};
  const auto s = with_uniform_rates(spec, {1, 2}, {0.5, 3.0});
  EXPECT_EQ(s.lambdas[0], std::vector<double>{-0.5});
  EXPECT_EQ(s.lambdas[1], (std::vector<double>{-3.0, -3.0}));
}

TEST(Sweep, SinglePointMatchesDirectReport) {
  std::mt19937_64 rng(47);
  const auto l = random_loop(rng);
  const auto prob = problem_of(l, 200);
  const auto pts = sweep(prob, l.spec, {{1.0, 2.0}}, {SwitchingMask::from_bits("10")});
  ASSERT_EQ(pts.size(), 1u);
  ASSERT_TRUE(pts[0].valid);
  const auto direct = margin_report(prob, SwitchingMask::from_bits("10"), false);
  ASSERT_EQ(pts[0].reports.size(), 1u);
  EXPECT_EQ(pts[0].reports[0].channel[0].gm_db, direct.channel[0].gm_db);
  EXPECT_EQ(pts[0].reports[0].disk.alpha, direct.disk.alpha);
}

TEST(Sweep, SerialEqualsParallel) {
  std::mt19937_64 rng(53);
  const auto l = random_loop(rng);
  const auto prob = problem_of(l, 150);
  std::vector<std::vector<double>> pts;
  for (double a = 0.5; a <= 4.0; a += 0.5) pts.push_back({a, a});
  const auto masks = SwitchingMask::enumerate(2);
  const auto a = sweep_serial(prob, l.spec, pts, masks);
  const auto b = sweep(prob, l.spec, pts, masks);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    ASSERT_EQ(a[i].valid, b[i].valid);
    ASSERT_EQ(a[i].reports.size(), b[i].reports.size());
    for (std::size_t r = 0; r < a[i].reports.size(); ++r) {
      for (std::size_t c = 0; c < a[i].reports[r].channel.size(); ++c) {
        const auto& x = a[i].reports[r].channel[c];
        const auto& y = b[i].reports[r].channel[c];
        EXPECT_EQ(x.gm_db, y.gm_db);
        EXPECT_EQ(x.pm_deg.has_value(), y.pm_deg.has_value());
        if (x.pm_deg && y.pm_deg) EXPECT_EQ(*x.pm_deg, *y.pm_deg);
      }
      EXPECT_EQ(a[i].reports[r].disk.alpha, b[i].reports[r].disk.alpha);
    }
  }
}
