#include <gtest/gtest.h>

#include <array>

#include "bowen/measure.hpp"
#include "bowen/symbolic.hpp"

using namespace bowen;

namespace {

const System kDoubling = System::doubling_map();
const System kFair = System::bernoulli({0.5, 0.5});
const System kMarkov = System::markov({{0.9, 0.1}, {0.2, 0.8}});

CylinderWord word(std::initializer_list<Symbol> s) { return CylinderWord(std::vector<Symbol>(s)); }

}  // namespace

TEST(Coding, DoublingOrbit) {
  EXPECT_EQ(coding(kDoubling, Point::from_real(0.3), 3), word({0, 1, 0}));
  EXPECT_EQ(coding(kDoubling, Point::from_real(0.5), 1), word({1}));
}

TEST(Coding, ShiftPrefix) { EXPECT_EQ(coding(kFair, Point::from_symbols({1, 0, 1}), 2), word({1, 0})); }

TEST(Coding, DoublingDepthCap) {
  EXPECT_NO_THROW(coding(kDoubling, Point::from_real(0.3), 50));
  try {
    coding(kDoubling, Point::from_real(0.3), 51);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DepthExceeded);
  }
}

TEST(Coding, Admissibility) {
  const System m = System::markov({{0.0, 1.0}, {0.5, 0.5}});
  EXPECT_FALSE(admissible(m, word({0, 0})));
  EXPECT_TRUE(admissible(m, word({0, 1, 1})));
  EXPECT_FALSE(in_alphabet(kFair, word({0, 2})));
}

TEST(JoinDiameter, Values) {
  EXPECT_DOUBLE_EQ(join_diameter(kDoubling, 8), 0.00390625);
  EXPECT_DOUBLE_EQ(join_diameter(kFair, 5), 0.03125);
  for (std::size_t k = 1; k < 60; ++k) EXPECT_LT(join_diameter(kFair, k + 1), join_diameter(kFair, k));
}

TEST(BowenContains, Doubling) {
  const BowenSpec spec{Point::from_real(0.5), 0.1, 2};
  EXPECT_TRUE(bowen_contains(kDoubling, spec, Point::from_real(0.52)));
  EXPECT_FALSE(bowen_contains(kDoubling, spec, Point::from_real(0.56)));
}

TEST(BowenContains, ShiftWindow) {
  const Point x = Point::from_symbols({1, 0, 1, 1, 0, 0, 1, 0, 1, 1, 1});
  const BowenSpec spec{x, 0.125, 5};
  EXPECT_TRUE(bowen_contains(kFair, spec, Point::from_symbols({1, 0, 1, 1, 0, 0, 1, 0, 0, 0, 0})));
  EXPECT_FALSE(bowen_contains(kFair, spec, Point::from_symbols({1, 0, 1, 1, 0, 0, 1, 1})));
}

TEST(ResolveBall, Examples) {
  const BallResolution arc = resolve_ball(kDoubling, {Point::from_real(0.5), 0.1, 4});
  ASSERT_TRUE(arc.is_arc());
  EXPECT_DOUBLE_EQ(arc.arc().radius, 0.0125);
  const Point x = Point::sample(make_key(1, StreamPurpose::Center, 0));
  EXPECT_EQ(resolve_ball(kFair, {x, 0.125, 5}).word().size(), 8u);
  EXPECT_EQ(resolve_ball(kFair, {x, 0.6, 1}).word().size(), 1u);
  EXPECT_EQ(resolve_ball(kFair, {x, 1.5, 3}).word().size(), 0u);
  EXPECT_THROW(resolve_ball(kDoubling, {x, 0.3, 1}), Error);
}

TEST(ResolveBall, AgreementRule) {
  EXPECT_EQ(agreement_for_radius(0.125), 4u);
  EXPECT_EQ(agreement_for_radius(0.13), 3u);
  EXPECT_EQ(agreement_for_radius(0.6), 1u);
  EXPECT_EQ(agreement_for_radius(1.0), 1u);
  EXPECT_EQ(agreement_for_radius(1.01), 0u);
}

// Membership of the resolved cylinder agrees with the Bowen condition.
TEST(ResolveBall, MatchesBowenContains) {
  for (const System* sys : {&kFair, &kMarkov}) {
    for (int trial = 0; trial < 20; ++trial) {
      const Point x = Point::sample(make_key(11, StreamPurpose::Center, static_cast<std::uint64_t>(trial)));
      const double eps = std::array<double, 4>{0.6, 0.3, 0.125, 0.07}[trial % 4];
      const BowenSpec spec{x, eps, 1 + trial % 5};
      const CylinderWord w = resolve_ball(*sys, spec).word();
      for (std::uint64_t i = 0; i < 400; ++i) {
        // Half the probes share a prefix of x to exercise both outcomes.
        std::vector<Symbol> prefix;
        const std::size_t keep = i % 2 == 0 ? w.size() + i % 3 - 1 : i % 4;
        for (std::size_t k = 0; k < keep && k < 40; ++k) prefix.push_back(x.symbol(*sys, k));
        const Point y = Point::from_symbols(prefix, make_key(12, StreamPurpose::Auxiliary, i));
        bool in_word = true;
        for (std::size_t k = 0; k < w.size(); ++k) in_word = in_word && y.symbol(*sys, k) == w[k];
        ASSERT_EQ(in_word, bowen_contains(*sys, spec, y));
      }
    }
  }
}

TEST(InnerAnnulus, DoublingExample) {
  const BowenSpec spec{Point::from_real(0.5), 0.1, 4};
  const InnerAnnulus ia = inner_and_annulus(kDoubling, spec, 8);
  ASSERT_EQ(ia.inner.size(), 6u);
  for (std::uint64_t j = 125; j <= 130; ++j) EXPECT_TRUE(ia.inner.contains(detail::dyadic_word(j, 8)));
  EXPECT_DOUBLE_EQ(word_set_measure(kDoubling, ia.inner).value, 0.0234375);
  EXPECT_EQ(ia.annulus.size(), 2u);
  EXPECT_DOUBLE_EQ(word_set_measure(kDoubling, ia.annulus).value, 0.0078125);
  EXPECT_TRUE(ia.annulus.contains(detail::dyadic_word(124, 8)));
  EXPECT_TRUE(ia.annulus.contains(detail::dyadic_word(131, 8)));
}

TEST(InnerAnnulus, ShiftHasNoAnnulus) {
  const Point x = Point::sample(make_key(2, StreamPurpose::Center, 0));
  const BowenSpec spec{x, 0.125, 3};
  const CylinderWord w = resolve_ball(kFair, spec).word();
  const InnerAnnulus same = inner_and_annulus(kFair, spec, w.size());
  ASSERT_EQ(same.inner.size(), 1u);
  EXPECT_EQ(same.inner.words().front(), w);
  EXPECT_TRUE(same.annulus.empty());
  const InnerAnnulus deeper = inner_and_annulus(kMarkov, spec, w.size() + 4);
  EXPECT_TRUE(deeper.annulus.empty());
  EXPECT_NEAR(word_set_measure(kMarkov, deeper.inner).value, cylinder_measure(kMarkov, resolve_ball(kMarkov, spec).word()).value, 1e-15);
}

TEST(InnerAnnulus, SandwichOnRandomPoints) {
  const BowenSpec spec{Point::from_real(0.3), 0.07, 3};
  for (std::size_t depth : {6u, 10u, 14u}) {
    const InnerAnnulus ia = inner_and_annulus(kDoubling, spec, depth);
    const double mu = bowen_measure(kDoubling, spec).value;
    const double inner = word_set_measure(kDoubling, ia.inner).value;
    const double annulus = word_set_measure(kDoubling, ia.annulus).value;
    EXPECT_LE(inner, mu);
    EXPECT_LE(mu, inner + annulus);
    for (std::uint64_t i = 0; i < 10000; ++i) {
      const Point y = Point::sample(make_key(5, StreamPurpose::Auxiliary, i));
      const bool in_ball = bowen_contains(kDoubling, spec, y);
      if (ia.inner.contains_point(kDoubling, y)) {
        ASSERT_TRUE(in_ball);
      }
      if (in_ball) {
        ASSERT_TRUE(ia.inner.contains_point(kDoubling, y) || ia.annulus.contains_point(kDoubling, y));
      }
    }
  }
}

TEST(InnerAnnulus, WrapsAroundZero) {
  const BowenSpec spec{Point::from_real(0.0), 0.1, 1};
  const InnerAnnulus ia = inner_and_annulus(kDoubling, spec, 5);
  // Arc (-0.1, 0.1) on the circle: cells 29..31 and 0..2 inside, 28 and 3 on the boundary.
  EXPECT_EQ(ia.inner.size(), 6u);
  EXPECT_TRUE(ia.inner.contains(detail::dyadic_word(31, 5)));
  EXPECT_TRUE(ia.inner.contains(detail::dyadic_word(0, 5)));
  EXPECT_TRUE(ia.annulus.contains(detail::dyadic_word(28, 5)));
  EXPECT_TRUE(ia.annulus.contains(detail::dyadic_word(3, 5)));
}

TEST(WordSetText, RoundTrip) {
  const InnerAnnulus ia = inner_and_annulus(kDoubling, {Point::from_real(0.5), 0.1, 4}, 8);
  const std::string text = serialize(ia.inner);
  EXPECT_EQ(text.substr(0, text.find('\n')), "N=8 role=inner");
  const WordSet back = parse_word_set(text);
  EXPECT_EQ(back.words(), ia.inner.words());
  EXPECT_EQ(back.role(), WordRole::Inner);
  EXPECT_THROW(parse_word_set("N=3 role=inner\n0101\n"), Error);
  EXPECT_THROW(parse_word_set("bogus\n"), Error);
}
