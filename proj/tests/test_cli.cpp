#include "cli.hpp"

#include "hens/coadjoint.hpp"
#include "hens/io.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace hens;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
  Json json() const { return Json::parse(out); }
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("hens_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  void write(const std::string& name, const std::string& text) const { std::ofstream(path(name)) << text; }

  std::filesystem::path dir_;
};

}  // namespace

TEST_F(CliTest, ValidateBuiltinCone) {
  auto r = run({"validate", "heisenberg1", "--profile", "carnot"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.json()["passed"].get<bool>());
}

TEST_F(CliTest, ClassifyThenValidate) {
  auto c = run({"classify", "contact3", "--rho", "1", "--phi", "0", "--gamma", "1", "-o", path("c3.json")});
  ASSERT_EQ(c.code, 0) << c.err;
  EXPECT_TRUE(c.json()["validation"]["passed"].get<bool>());
  auto v = run({"validate", path("c3.json"), "--profile", "homogeneous_ensemble"});
  EXPECT_EQ(v.code, 0) << v.out;
  EXPECT_EQ(structure_distance(load_algebra(path("c3.json")), contact3(1, 0, 1)), 0.0);
}

TEST_F(CliTest, ConeConditionFailureExitsOne) {
  auto c = run({"classify", "contact4-invariants", "--params", "1,1,0.5,0.7,0", "-o", path("c4.json")});
  ASSERT_EQ(c.code, 0) << c.err;
  auto v = run({"validate", path("c4.json"), "--profile", "homogeneous_space"});
  EXPECT_EQ(v.code, 1);
  auto failures = v.json()["failures"].get<std::vector<std::string>>();
  EXPECT_NE(std::find(failures.begin(), failures.end(), "homs-e"), failures.end());
}

TEST_F(CliTest, Contact4Invariants) {
  auto r = run({"classify", "contact4-invariants", "--params", "1,2,3,4,5", "--alpha", "2,3"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = r.json();
  EXPECT_EQ(j["invariants"][0].get<double>(), 20.0);
  EXPECT_EQ(j["invariants"][1].get<double>(), 2.0);
  EXPECT_NEAR(j["reduced_invariants"][0].get<double>(), 20.0, 1e-12);
  EXPECT_DOUBLE_EQ(j["reduced"][4].get<double>(), 20.0 / 3.0);
}

TEST_F(CliTest, Constraints) {
  auto r = run({"classify", "constraints", "--params", "surface_general"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto c = r.json()["constraints"].get<std::vector<std::string>>();
  EXPECT_EQ(c.size(), 2u);
  EXPECT_NE(std::find(c.begin(), c.end(), "a*c"), c.end());
  EXPECT_NE(std::find(c.begin(), c.end(), "a*d"), c.end());
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({}).code, 64);
  EXPECT_EQ(run({"frobnicate"}).code, 64);
  EXPECT_EQ(run({"validate"}).code, 64);
  EXPECT_EQ(run({"validate", "heisenberg1", "--profile", "nope"}).code, 64);
  EXPECT_EQ(run({"bch", "heisenberg1", "--x", "1,2", "--y", "0,0,0"}).code, 64);
  EXPECT_EQ(run({"validate", "no_such_file.json"}).code, 64);
  auto help = run({"--help"});
  EXPECT_EQ(help.code, 0);
  EXPECT_NE(help.out.find("prequant"), std::string::npos);
}

TEST_F(CliTest, BchAndConical) {
  auto r = run({"bch", "heisenberg1", "--x", "1,0,0", "--y", "0,1,0", "--seed", "3", "--tol", "1e-9"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto v = r.json()["value"].get<std::vector<double>>();
  EXPECT_EQ(v, (std::vector<double>{1.0, 1.0, 0.5}));
  auto c = run({"conical", "contact3(1,0,1)", "--x", "1,0.5,0", "--y", "0,1,0.3"});
  EXPECT_EQ(c.code, 0) << c.out;
  EXPECT_NEAR(c.json()["observed_order"].get<double>(), 1.0, 0.05);
}

TEST_F(CliTest, CcDistDeterministic) {
  std::vector<std::string> args{"ccdist",   "heisenberg1", "--to", "1,0,0", "--segments", "16",
                                "--restarts", "2",         "--seed", "5"};
  auto a = run(args), b = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_NEAR(a.json()["upper"].get<double>(), 1.0, 1e-6);
}

TEST_F(CliTest, ProfileCsv) {
  std::vector<std::string> args{"profile", "heisenberg1", "--eps", "1,0.5", "--samples", "4", "--seed", "2",
                                "--out",   path("curve.csv")};
  auto a = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  std::ifstream in(path("curve.csv"));
  std::string header, line;
  std::getline(in, header);
  EXPECT_EQ(header, "eps,pair_i,pair_j,rescaled_distance");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 2 * 6);
  std::ifstream first(path("curve.csv"));
  std::string csv1((std::istreambuf_iterator<char>(first)), {});
  auto b = run(args);
  std::ifstream second(path("curve.csv"));
  std::string csv2((std::istreambuf_iterator<char>(second)), {});
  EXPECT_EQ(csv1, csv2);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.json()["scales"].get<std::vector<double>>(), (std::vector<double>{1.0, 0.5}));
}

TEST_F(CliTest, GhFiles) {
  write("one.json", R"({"distances": [[0]], "base": 0})");
  write("two.json", R"({"distances": [[0, 1], [1, 0]], "base": 0})");
  auto r = run({"gh", path("one.json"), path("two.json"), "--mode", "exact"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_DOUBLE_EQ(r.json()["upper"].get<double>(), 0.5);
  EXPECT_TRUE(r.json()["exact"].get<bool>());
}

TEST_F(CliTest, FrameAndWPoly) {
  auto f = run({"frame", "filiform4", "--generators", "0,1"});
  ASSERT_EQ(f.code, 0) << f.err;
  EXPECT_EQ(f.json()["degrees"].get<std::vector<int>>(), (std::vector<int>{1, 1, 2, 3}));
  auto w = run({"w-poly", "contact3(1,0,1)", "--x", "0,1,0"});
  ASSERT_EQ(w.code, 0) << w.err;
  EXPECT_EQ(w.json()["degree"].get<int>(), 2);
  EXPECT_EQ(w.json()["coefficients"][2][2][0].get<double>(), 1.0);
  EXPECT_EQ(run({"w-poly", "heisenberg1", "--x", "1,0,0"}).json()["degree"].get<int>(), 0);
}

TEST_F(CliTest, CoadjointCheck) {
  Mat F = sample_member(heisenberg_so2(), 4);
  write("member.json", dump_json(to_json(F)));
  auto ok = run({"coadjoint", "heisenberg_so2", "--check-f", path("member.json")});
  ASSERT_EQ(ok.code, 0) << ok.err << ok.out;
  EXPECT_LT(ok.json()["coadjoint_residual"].get<double>(), 1e-10);
  Mat S = Mat::Identity(4, 4);
  S(1, 1) = 2.0;
  write("scale.json", dump_json(Json{{"matrix", to_json(S)}}));
  auto bad = run({"coadjoint", "heisenberg_so2", "--check-f", path("scale.json")});
  EXPECT_EQ(bad.code, 1);
  EXPECT_FALSE(bad.json()["candidate"]["member"].get<bool>());
  auto sweep = run({"coadjoint", "contact3(1,0,1)", "--samples", "5", "--seed", "9"});
  EXPECT_EQ(sweep.code, 0);
}

TEST_F(CliTest, Prequant) {
  auto alg = heisenberg_so2();
  Mat f = sample_algebra_member(alg, 1);
  write("f.json", dump_json(to_json(f)));
  write("one.json", R"([{"exponents": [], "coefficient": 1}])");
  auto r = run({"prequant", "heisenberg_so2", "--f", path("f.json"), "--h", path("one.json"), "--eps", "0.5", "--u",
                "0.3,1,-2,0.5"});
  ASSERT_EQ(r.code, 0) << r.err;
  Vec u(4);
  u << 0.3, 1, -2, 0.5;
  Mat w = w_polynomial(alg, u).evaluate(0.5);
  EXPECT_NEAR(r.json()["real"].get<double>(), (w * f.transpose()).trace(), 1e-14);
  EXPECT_EQ(r.json()["imag"].get<double>(), 0.0);
  write("cubic.json", R"([{"exponents": [3], "coefficient": 1}])");
  EXPECT_EQ(run({"prequant", "heisenberg_so2", "--f", path("f.json"), "--h", path("cubic.json")}).code, 64);
}
