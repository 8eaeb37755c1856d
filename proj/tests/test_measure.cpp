#include <gtest/gtest.h>

#include <array>
#include <cmath>

#include "bowen/measure.hpp"

using namespace bowen;

namespace {

const System kDoubling = System::doubling_map();
const System kFair = System::bernoulli({0.5, 0.5});
const System kBiased = System::bernoulli({0.3, 0.7});
const System kMarkov = System::markov({{0.9, 0.1}, {0.2, 0.8}});

CylinderWord word(std::initializer_list<Symbol> s) { return CylinderWord(std::vector<Symbol>(s)); }

CylinderWord random_word(CounterStream& s, std::size_t len, std::size_t alphabet) {
  CylinderWord w;
  for (std::size_t i = 0; i < len; ++i) w.symbols.push_back(static_cast<Symbol>(s.next_below(alphabet)));
  return w;
}

}  // namespace

TEST(CylinderMeasure, Examples) {
  EXPECT_DOUBLE_EQ(cylinder_measure(kFair, word({0, 1, 0})).value, 0.125);
  EXPECT_NEAR(cylinder_measure(kMarkov, word({0, 1})).value, 1.0 / 15.0, 1e-15);
  EXPECT_DOUBLE_EQ(cylinder_measure(kDoubling, word({1, 1})).value, 0.25);
  EXPECT_EQ(cylinder_measure(kFair, word({1})).mode, MeasureMode::Exact);
  EXPECT_EQ(cylinder_measure(kFair, word({1})).half_width, 0.0);
}

TEST(CylinderMeasure, MultiplicativeForBernoulli) {
  CounterStream s(make_key(1, StreamPurpose::Auxiliary, 0));
  for (int i = 0; i < 200; ++i) {
    const CylinderWord u = random_word(s, 1 + s.next_below(6), 2);
    const CylinderWord v = random_word(s, 1 + s.next_below(6), 2);
    CylinderWord uv = u;
    uv.symbols.insert(uv.symbols.end(), v.symbols.begin(), v.symbols.end());
    EXPECT_NEAR(cylinder_measure(kBiased, uv).value, cylinder_measure(kBiased, u).value * cylinder_measure(kBiased, v).value, 1e-16);
  }
}

TEST(CylinderMeasure, SumsToOne) {
  for (const System* sys : {&kFair, &kBiased, &kMarkov}) {
    for (std::size_t len = 1; len <= 12; ++len) {
      double total = 0.0;
      for (std::uint64_t idx = 0; idx < (std::uint64_t{1} << len); ++idx) {
        CylinderWord w;
        for (std::size_t i = 0; i < len; ++i) w.symbols.push_back(static_cast<Symbol>((idx >> (len - 1 - i)) & 1U));
        total += cylinder_measure(*sys, w).value;
      }
      EXPECT_NEAR(total, 1.0, 1e-12) << sys->describe() << " length " << len;
    }
  }
}

TEST(BowenMeasure, Examples) {
  EXPECT_DOUBLE_EQ(bowen_measure(kDoubling, {Point::from_real(0.3), std::ldexp(1.0, -5), 10}).value, std::ldexp(1.0, -13));
  EXPECT_DOUBLE_EQ(bowen_measure(kDoubling, {Point::from_real(0.3), std::ldexp(1.0, -6), 10}).value, 6.103515625e-5);
  const Point x = Point::sample(make_key(3, StreamPurpose::Center, 0));
  EXPECT_DOUBLE_EQ(bowen_measure(kFair, {x, 0.125, 5}).value, 0.00390625);
  EXPECT_DOUBLE_EQ(bowen_measure(kFair, {x, 1.5, 1}).value, 1.0);
  EXPECT_DOUBLE_EQ(bowen_measure(kDoubling, {Point::from_real(0.1), 0.2, 1}).value, 0.4);
}

TEST(BowenMeasure, MonteCarloAgreesWithExact) {
  for (int i = 0; i < 10; ++i) {
    const System& sys = i % 3 == 0 ? kDoubling : (i % 3 == 1 ? kFair : kMarkov);
    const Point x = Point::sample(make_key(4, StreamPurpose::Center, static_cast<std::uint64_t>(i)));
    const BowenSpec spec{x, std::array<double, 3>{0.2, 0.1, 0.3}[i % 3], 1 + i % 3};
    const MeasureValue exact = bowen_measure(sys, spec);
    const MeasureValue mc = bowen_measure_mc(sys, spec, 20000, static_cast<std::uint64_t>(i));
    EXPECT_EQ(mc.mode, MeasureMode::MonteCarlo);
    EXPECT_LE(std::abs(mc.value - exact.value), mc.half_width) << sys.describe() << " spec " << i;
  }
}

TEST(BallMeasure, MetricBalls) {
  EXPECT_DOUBLE_EQ(ball_measure(kDoubling, Point::from_real(0.2), 0.1), 0.2);
  EXPECT_DOUBLE_EQ(ball_measure(kDoubling, Point::from_real(0.2), 0.6), 1.0);
  const Point x = Point::from_symbols({1, 1, 0, 1});
  EXPECT_DOUBLE_EQ(ball_measure(kFair, x, 0.3), 0.25);
  EXPECT_DOUBLE_EQ(ball_measure(kFair, x, 2.0), 1.0);
}

TEST(Phi, Examples) {
  EXPECT_NEAR(phi(kDoubling, 0.1, 0.01, Point::from_real(0.4)), 0.2, 1e-12);
  const Point x = Point::sample(make_key(6, StreamPurpose::Center, 0));
  // Both radii between 1/8 and 1/4.
  EXPECT_DOUBLE_EQ(phi(kFair, 0.15625, 0.015625, x), 0.0);
  // eps - delta = 1/8 exactly lies on the boundary of the strict inequality.
  EXPECT_DOUBLE_EQ(phi(kFair, 0.125 + 0.03125, 0.03125, x), 0.5);
  EXPECT_THROW(phi(kFair, 0.1, 0.2, x), Error);
}

TEST(Phi, NonnegativeAndMonotoneInDelta) {
  const Point x = Point::from_real(0.35);
  double prev = 0.0;
  for (int i = 1; i < 20; ++i) {
    const double v = phi(kDoubling, 0.1, 0.005 * i, x);
    EXPECT_GE(v, 0.0);
    EXPECT_GE(v, prev);
    prev = v;
  }
  EXPECT_LT(phi(kDoubling, 0.1, 1e-9, x), 1e-7);
}

TEST(Alpha, BernoulliVanishes) {
  for (std::size_t k = 1; k <= 20; ++k) EXPECT_LE(alpha_coefficient(kBiased, k, 6).value.value, 1e-12);
}

TEST(Alpha, MarkovGeometricRate) {
  const AlphaScan scan = alpha_scan(kMarkov, 5, 15, 6);
  ASSERT_EQ(scan.model.form, AlphaModel::Form::Geometric);
  EXPECT_NEAR(scan.model.rate, 0.7, 0.14);
  for (std::size_t i = 1; i < scan.envelope.size(); ++i) EXPECT_LE(scan.envelope[i], scan.envelope[i - 1]);
  for (std::size_t i = 1; i < scan.raw.size(); ++i) EXPECT_NEAR(scan.raw[i] / scan.raw[i - 1], 0.7, 0.14);
  EXPECT_TRUE(scan.lower_bound);
}

TEST(Alpha, ModelInverse) {
  EXPECT_EQ(AlphaModel::geometric(1.0, 0.5).inverse(std::ldexp(1.0, -11)), 11u);
  EXPECT_EQ(AlphaModel::polynomial(1.0, 1.0).inverse(0.5e-6), 126u);
  const AlphaModel g = AlphaModel::geometric(2.0, 0.8);
  for (std::uint64_t k = 1; k < 40; ++k) EXPECT_LE(g.inverse(g(static_cast<double>(k))), k);
}

TEST(SParameter, Examples) {
  EXPECT_EQ(s_parameter(AlphaModel::zero(), 0.01, 50), 50u);
  EXPECT_EQ(s_parameter(AlphaModel::polynomial(1.0, 1.0), 1e-6, 100, 0.5), 226u);
  EXPECT_EQ(s_parameter(AlphaModel::geometric(1.0, 0.5), std::ldexp(1.0, -10), 10, 0.5), 21u);
  EXPECT_THROW(s_parameter(AlphaModel::zero(), 0.01, 5, 1.5), Error);
}

TEST(SParameter, Monotone) {
  const AlphaModel m = AlphaModel::geometric(1.0, 0.6);
  std::uint64_t prev = ~std::uint64_t{0};
  for (double mu = 1e-8; mu < 0.5; mu *= 3) {
    const auto s = s_parameter(m, mu, 10);
    EXPECT_LE(s, prev);
    prev = s;
  }
  EXPECT_LE(s_parameter(m, 1e-4, 10), s_parameter(m, 1e-4, 11));
}
