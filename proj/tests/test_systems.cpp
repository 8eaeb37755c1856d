#include <gtest/gtest.h>

#include <array>

#include "bowen/systems.hpp"
#include "bowen/symbolic.hpp"

using namespace bowen;

TEST(Systems, FactoriesValidate) {
  EXPECT_THROW(System::bernoulli({0.5, 0.6}), Error);
  EXPECT_THROW(System::bernoulli({1.0}), Error);
  EXPECT_THROW(System::markov({{0.5, 0.5}, {0.2}}), Error);
  EXPECT_THROW(System::markov({{0.5, 0.6}, {0.2, 0.8}}), Error);
  EXPECT_NO_THROW(System::markov({{0.9, 0.1}, {0.2, 0.8}}));
}

TEST(Systems, MarkovStationaryVector) {
  const System m = System::markov({{0.9, 0.1}, {0.2, 0.8}});
  EXPECT_NEAR(m.initial(0), 2.0 / 3.0, 1e-14);
  EXPECT_NEAR(m.initial(1), 1.0 / 3.0, 1e-14);
}

TEST(Systems, Diameter) {
  EXPECT_DOUBLE_EQ(System::doubling_map().diameter(), 0.5);
  EXPECT_DOUBLE_EQ(System::bernoulli({0.5, 0.5}).diameter(), 1.0);
}

TEST(Systems, DoublingPointFromReal) {
  const System d = System::doubling_map();
  const Point x = Point::from_real(0.3);
  EXPECT_NEAR(real_value(d, x), 0.3, 1e-15);
  EXPECT_NEAR(real_value(d, x, 1), 0.6, 1e-15);
  EXPECT_NEAR(real_value(d, x, 2), 0.2, 1e-15);
  EXPECT_THROW(Point::from_real(1.0), Error);
  EXPECT_THROW(Point::from_real(-0.1), Error);
}

TEST(Systems, DeepOrbitsStayExact) {
  const System d = System::doubling_map();
  const Point x = Point::from_real(0.75);
  EXPECT_EQ(real_value(d, x, 1), 0.5);
  EXPECT_EQ(real_value(d, x, 2), 0.0);
  const Point y = Point::sample(make_key(1, StreamPurpose::Center, 0));
  const double v = real_value(d, y, 200);
  EXPECT_GE(v, 0.0);
  EXPECT_LT(v, 1.0);
}

TEST(Systems, StepShiftsSymbols) {
  const System b = System::bernoulli({0.5, 0.5});
  const Point x = Point::from_symbols({1, 0, 1, 1});
  const Point y = step(b, x);
  EXPECT_EQ(y.symbol(b, 0), 0);
  EXPECT_EQ(y.symbol(b, 2), 1);
  EXPECT_EQ(y.symbol(b, 3), 0);  // zero continuation
}

TEST(Systems, ShiftDistance) {
  const System b = System::bernoulli({0.5, 0.5});
  const Point x = Point::from_symbols({1, 0, 1, 1, 0});
  const Point y = Point::from_symbols({1, 0, 1, 0, 0});
  EXPECT_DOUBLE_EQ(distance(b, x, y), 0.125);
  EXPECT_DOUBLE_EQ(distance(b, x, y, 1), 0.25);
  EXPECT_DOUBLE_EQ(distance(b, x, x), 0.0);
  const Point z = Point::from_symbols({0});
  EXPECT_DOUBLE_EQ(distance(b, x, z), 1.0);
}

TEST(Systems, CircleDistance) {
  EXPECT_DOUBLE_EQ(circle_distance(0.1, 0.9), 0.2);
  EXPECT_DOUBLE_EQ(circle_distance(0.25, 0.5), 0.25);
  const System d = System::doubling_map();
  EXPECT_NEAR(distance(d, Point::from_real(0.5), Point::from_real(0.52)), 0.02, 1e-15);
}

TEST(Systems, SampledPointsAreStable) {
  const System m = System::markov({{0.9, 0.1}, {0.2, 0.8}});
  const Point x = Point::sample(make_key(3, StreamPurpose::Center, 1));
  const Point y = Point::sample(make_key(3, StreamPurpose::Center, 1));
  for (std::size_t k = 0; k < 500; ++k) ASSERT_EQ(x.symbol(m, k), y.symbol(m, k));
  const Symbol s = x.symbol(m, 10);
  x.symbol(m, 400);
  EXPECT_EQ(x.symbol(m, 10), s);
}

TEST(Systems, AdvanceDropsOldSymbols) {
  const System b = System::bernoulli({0.3, 0.7});
  Point x = Point::sample(make_key(8, StreamPurpose::Center, 0));
  const Point ref = x;
  for (int i = 0; i < 10000; ++i) x.advance(b);
  EXPECT_EQ(x.position(), 10000u);
  for (std::size_t k = 0; k < 50; ++k) EXPECT_EQ(x.symbol(b, k), ref.symbol(b, 10000 + k));
}

TEST(Systems, MarkovFrequencies) {
  const System m = System::markov({{0.9, 0.1}, {0.2, 0.8}});
  SymbolGenerator gen(make_key(4, StreamPurpose::Trial, 0));
  std::array<double, 4> pairs{};
  Symbol prev = gen.next(m);
  constexpr int kSteps = 300000;
  for (int i = 0; i < kSteps; ++i) {
    const Symbol s = gen.next(m);
    pairs[prev * 2 + s] += 1;
    prev = s;
  }
  EXPECT_NEAR(pairs[0b01] / kSteps, 1.0 / 15.0, 0.004);
  EXPECT_NEAR((pairs[0b00] + pairs[0b01]) / kSteps, 2.0 / 3.0, 0.02);
}

TEST(Systems, FairBitsUseOneDrawPerBlock) {
  const System d = System::doubling_map();
  SymbolGenerator a(make_key(2, StreamPurpose::Trial, 5));
  SymbolGenerator b(make_key(2, StreamPurpose::Trial, 5));
  std::uint64_t block = b.next_block();
  for (int i = 63; i >= 0; --i) EXPECT_EQ(a.next(d), (block >> i) & 1U);
}
