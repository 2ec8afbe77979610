#include "hens/polynomial.hpp"

#include <gtest/gtest.h>

using hens::Monomial;
using P = hens::Polynomial<double>;

TEST(Monomial, TrimsTrailingZeros) {
  EXPECT_EQ(Monomial({1, 0, 0}), Monomial({1}));
  EXPECT_EQ(Monomial({0, 0}), Monomial{});
  EXPECT_EQ(Monomial({2, 1}).degree(), 3u);
}

TEST(Monomial, GradedOrder) {
  EXPECT_TRUE(Monomial({1}) < Monomial({2}));
  EXPECT_TRUE(Monomial({0, 1}) < Monomial({1}));  // same degree: x0 ranks above x1
  EXPECT_FALSE(Monomial({1}) < Monomial({1}));
}

TEST(Polynomial, RingArithmetic) {
  P x = P::variable(0), y = P::variable(1);
  P sq = (x + y) * (x + y);
  P expanded = x * x + 2.0 * x * y + y * y;
  EXPECT_EQ(sq, expanded);
  EXPECT_TRUE((sq - expanded).is_zero());
  EXPECT_EQ(sq.total_degree(), 2u);
  EXPECT_EQ(sq.width(), 2u);
  EXPECT_DOUBLE_EQ(sq.coefficient(Monomial({1, 1})), 2.0);
}

TEST(Polynomial, CancellationRemovesTerms) {
  P x = P::variable(0);
  P p = x - x;
  EXPECT_TRUE(p.is_zero());
  EXPECT_EQ(p.size(), 0u);
  EXPECT_EQ((P(3.0) * 0.0).size(), 0u);
}

TEST(Polynomial, DerivativeAndEvaluation) {
  P x = P::variable(0), y = P::variable(1);
  P p = 3.0 * x * x * y + y - 2.0;
  P dx = p.derivative(0);
  P dy = p.derivative(1);
  EXPECT_EQ(dx, 6.0 * x * y);
  EXPECT_EQ(dy, 3.0 * x * x + 1.0);
  EXPECT_DOUBLE_EQ(p.evaluate({2.0, 5.0}), 3 * 4 * 5 + 5 - 2);
  EXPECT_THROW(p.evaluate({1.0}), std::invalid_argument);
}

TEST(Polynomial, DerivativeMatchesFiniteDifference) {
  P x = P::variable(0), y = P::variable(1), z = P::variable(2);
  P p = x * y * z + 0.5 * x * x * x - y * z * z;
  std::vector<double> pt{0.3, -1.2, 0.7};
  for (std::size_t v = 0; v < 3; ++v) {
    auto plus = pt, minus = pt;
    plus[v] += 1e-6;
    minus[v] -= 1e-6;
    double fd = (p.evaluate(plus) - p.evaluate(minus)) / 2e-6;
    EXPECT_NEAR(p.derivative(v).evaluate(pt), fd, 1e-8);
  }
}

TEST(Polynomial, PrunedAndNormalized) {
  P x = P::variable(0);
  P p = -2.0 * x + 1e-15;
  EXPECT_EQ(p.pruned(1e-12), -2.0 * x);
  EXPECT_EQ(p.pruned(1e-12).normalized(), 2.0 * x);
  EXPECT_EQ(p.pruned(1e-12).normalized(true), x);
}

TEST(Polynomial, ToString) {
  P a = P::variable(0), c = P::variable(1);
  EXPECT_EQ((a * c).to_string({"a", "c"}), "a*c");
  EXPECT_EQ((-(a * a) + 2.0).to_string({"a"}), "-a^2 + 2");
  EXPECT_EQ(P().to_string(), "0");
}
