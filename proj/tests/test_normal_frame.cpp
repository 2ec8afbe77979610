#include "hens/builtins.hpp"
#include "hens/normal_frame.hpp"

#include <gtest/gtest.h>

using namespace hens;

namespace {

std::vector<Vec> unit_generators(int n, int count) {
  std::vector<Vec> out;
  for (int i = 0; i < count; ++i) out.push_back(basis_vector(n, i));
  return out;
}

}  // namespace

TEST(NormalFrame, HeisenbergTree) {
  auto tree = build_normal_frame(heisenberg1(), unit_generators(3, 2));
  ASSERT_EQ(tree.size(), 3);
  EXPECT_EQ(tree.nodes[2].degree, 2);
  EXPECT_EQ(tree.nodes[2].left, 0);
  EXPECT_EQ(tree.nodes[2].right, 1);
  EXPECT_EQ(tree.word_string(2), "[X1,X2]");
  EXPECT_TRUE(tree.nodes[2].vector.isApprox(basis_vector(3, 2)));
}

TEST(NormalFrame, FiliformPicksLexicographicallyFirstWord) {
  auto tree = build_normal_frame(filiform4(), unit_generators(4, 2));
  ASSERT_EQ(tree.size(), 4);
  EXPECT_EQ(tree.word_string(3), "[X1,[X1,X2]]");
  EXPECT_EQ(tree.nodes[3].degree, 3);
  EXPECT_EQ(tree.degrees(), (std::vector<int>{1, 1, 2, 3}));
  EXPECT_TRUE(tree.nodes[3].vector.isApprox(basis_vector(4, 3)));
}

TEST(NormalFrame, SkipsDependentBrackets) {
  // [X1,X3] = 0 and [X2,X3] = X4: only the second degree-3 word adds rank.
  GradedAlgebra alg("skip", {{"V1", 2}, {"V2", 1}, {"V3", 1}}, {{0, 1, 2, 1.0}, {1, 2, 3, 1.0}},
                    Mat::Identity(2, 2));
  auto tree = build_normal_frame(alg, unit_generators(4, 2));
  ASSERT_EQ(tree.size(), 4);
  EXPECT_EQ(tree.word_string(3), "[X2,[X1,X2]]");
}

TEST(NormalFrame, RejectsBadGenerators) {
  Vec e1 = basis_vector(3, 0);
  EXPECT_THROW(build_normal_frame(heisenberg1(), {e1, Vec(2.0 * e1)}), DomainError);
  EXPECT_THROW(build_normal_frame(heisenberg1(), {e1}), ValidationError);
  EXPECT_THROW(build_normal_frame(heisenberg1(), {}), DomainError);
}

TEST(NormalFrame, ProductRuleMetric) {
  auto tree = build_normal_frame(filiform4(), unit_generators(4, 2));
  Mat g(2, 2);
  g << 2, 0, 0, 3;
  Mat m = extend_metric(tree, g);
  Vec expected(4);
  expected << 2, 3, 6, 12;
  EXPECT_TRUE(m.diagonal().isApprox(expected));
  EXPECT_EQ(m(2, 3), 0.0);
  EXPECT_EQ(m(0, 2), 0.0);
}

TEST(NormalFrame, AmbientMetricPullsBack) {
  // Skewed generators: the ambient form evaluated on frame vectors returns G.
  Vec a(3), b(3);
  a << 1, 1, 0;
  b << 0, 2, 0.5;
  auto tree = build_normal_frame(heisenberg1(), {a, b});
  Mat g(2, 2);
  g << 1, 0.2, 0.2, 2;
  Mat frame = extend_metric(tree, g);
  Mat ambient = frame_metric_in_ambient(tree, frame);
  Mat basis = tree.basis();
  EXPECT_LT(max_abs(Mat(basis.transpose() * ambient * basis - frame)), 1e-12);
}

TEST(NormalFrame, RejectsIndefiniteLeafMetric) {
  auto tree = build_normal_frame(heisenberg1(), unit_generators(3, 2));
  Mat g(2, 2);
  g << 1, 0, 0, -1;
  EXPECT_THROW(extend_metric(tree, g), DomainError);
}
