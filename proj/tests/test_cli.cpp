#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "christoffel/cli.hpp"

using namespace christoffel;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "christoffel_cli");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string sample(const std::string& name) { return std::string(CHRISTOFFEL_SAMPLES_DIR) + "/domains/" + name; }

fs::path scratch_file(const std::string& name, const std::string& text) {
  const fs::path dir = fs::temp_directory_path() / "christoffel_cli_tests";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST(Cli, EvalIntervalEndpoint) {
  const auto r = run({"eval", "--domain", sample("interval.json"), "--degree", "5", "--point", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = io::json::parse(r.out);
  EXPECT_NEAR(j["C"].get<double>(), 18.0, 1e-10);
  EXPECT_NEAR(j["ratio"].get<double>(), std::sqrt(18.0), 1e-10);
  EXPECT_TRUE(j["inside"].get<bool>());
}

TEST(Cli, EvalDegreeZeroAndOutsidePoint) {
  const auto r = run({"eval", "--domain", sample("ball2_2.json"), "--degree", "0", "--point", "0.1,0.2"});
  ASSERT_EQ(r.code, 0);
  EXPECT_NEAR(io::json::parse(r.out)["C"].get<double>() * std::numbers::pi, 1.0, 1e-12);
  const auto outside = run({"eval", "--domain", sample("ball2_2.json"), "--degree", "3", "--point", "1.05,0"});
  ASSERT_EQ(outside.code, 0);
  EXPECT_FALSE(io::json::parse(outside.out)["inside"].get<bool>());
}

TEST(Cli, ExitCodes) {
  const auto bad = scratch_file("bad.json", "{\"type\": \"ball_p\", \"dim\": 2, ");
  EXPECT_EQ(run({"eval", "--domain", bad.string(), "--degree", "2", "--point", "0,0"}).code, 2);
  const auto unknown = scratch_file("unknown.json", "{\"type\": \"torus\"}");
  EXPECT_EQ(run({"eval", "--domain", unknown.string(), "--degree", "2", "--point", "0,0"}).code, 2);
  EXPECT_EQ(run({"eval", "--domain", "/nonexistent/domain.json", "--degree", "2", "--point", "0"}).code, 2);
  EXPECT_EQ(run({"eval", "--domain", sample("ball2_2.json"), "--degree", "2", "--point", "0,0,0"}).code, 3);
  const auto mismatched = scratch_file(
      "mismatched.json", R"({"type": "affine", "map": {"A": [[1,0,0],[0,1,0],[0,0,1]], "b": [0,0,0]},
                             "base": {"type": "cube", "dim": 2}})");
  EXPECT_EQ(run({"eval", "--domain", mismatched.string(), "--degree", "1", "--point", "0,0,0"}).code, 3);
  // a thin parallelogram along the diagonal of its bounding box: the box basis is nearly dependent
  const auto thin = scratch_file(
      "thin.json", R"({"type": "affine", "map": {"A": [[1,1],[1,1.0001]], "b": [0,0]}, "base": {"type": "cube", "dim": 2}})");
  const auto degraded = run({"eval", "--domain", thin.string(), "--degree", "6", "--point", "0,0"});
  EXPECT_EQ(degraded.code, 4);
  EXPECT_TRUE(io::json::parse(degraded.out)["degraded"].get<bool>());
  EXPECT_EQ(run({"eval", "--degree", "2"}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  const auto oversized = run({"certify", "--domain", sample("ball2_2.json"), "--kind", "upper-ellipsoid", "--degree",
                              "4", "--scale", "1.01"});
  EXPECT_EQ(oversized.code, 5);
}

TEST(Cli, DomainJsonRoundTrip) {
  for (const auto& entry : fs::directory_iterator(std::string(CHRISTOFFEL_SAMPLES_DIR) + "/domains")) {
    const Domain d = io::load_domain(entry.path().string());
    const std::string once = io::serialize_domain(d);
    const Domain again = io::parse_domain(once);
    EXPECT_EQ(io::serialize_domain(again), once) << entry.path();
    EXPECT_EQ(again.dim(), d.dim());
    EXPECT_NEAR(again.volume(), d.volume(), 1e-12 * d.volume());
  }
}

TEST(Cli, JsonParsingDetails) {
  EXPECT_EQ(io::parse_domain(R"({"type": "ball_p", "dim": 2, "p": "inf"})").volume(), 4.0);
  EXPECT_NEAR(io::parse_domain(R"({"type": "ball_p", "dim": 2, "p": "1.5"})").volume(), 2.7378536239189035, 1e-13);
  EXPECT_THROW(io::parse_domain(R"({"type": "ball_p", "dim": 2.5, "p": 2})"), ParseError);
  EXPECT_THROW(io::parse_domain(R"({"type": "simplex", "vertices": [[0,0],[1]]})"), ParseError);
  EXPECT_THROW(io::parse_domain(R"({"type": "ball_p", "dim": 2, "p": -1})"), ParseError);
  EXPECT_THROW(io::parse_domain("[1, 2"), ParseError);
}

TEST(Cli, CsvIsByteIdenticalForIdenticalSeeds) {
  const std::vector<std::string> args{"norms", "--domain", sample("cube2.json"), "--degree", "3", "--seed", "9",
                                      "--samples", "20000", "--format", "csv"};
  const auto a = run(args), b = run(args);
  EXPECT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  const auto sa = run({"sigma", "--domain", sample("interval.json"), "--degrees", "4:12:2", "--format", "csv"});
  const auto sb = run({"sigma", "--domain", sample("interval.json"), "--degrees", "4:12:2", "--format", "csv"});
  EXPECT_EQ(sa.out, sb.out);
  EXPECT_EQ(sa.out.substr(0, sa.out.find('\n')), "n,C_max,argmax_1,degraded");
  // 17 significant digits and no locale
  EXPECT_NE(sa.out.find("4,12.5,"), std::string::npos);
  const auto other = run({"norms", "--domain", sample("cube2.json"), "--degree", "3", "--seed", "10", "--samples",
                          "20000", "--format", "csv"});
  EXPECT_NE(other.out, a.out);
}

TEST(Cli, SigmaJsonLayout) {
  const fs::path csv = fs::temp_directory_path() / "christoffel_cli_tests" / "sweep.csv";
  fs::create_directories(csv.parent_path());
  const auto r =
      run({"sigma", "--domain", sample("interval.json"), "--degrees", "4:28:4", "--csv", csv.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = io::json::parse(r.out);
  for (const char* key : {"domain", "degrees", "values", "sigma_fit", "sigma_reference", "certificates"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  // slope of the exact law (n+1)^2/2 over these degrees
  EXPECT_NEAR(j["sigma_fit"]["slope"].get<double>(), 1.8117704381136381, 1e-9);
  EXPECT_EQ(j["sigma_reference"].get<double>(), 2.0);
  EXPECT_TRUE(fs::exists(csv));
}

TEST(Cli, CertifyHalfBallEllipsoidRate) {
  const auto r = run({"certify", "--domain", sample("halfball3.json"), "--kind", "upper-ellipsoid", "--degree", "5"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = io::json::parse(r.out);
  EXPECT_TRUE(j["premise_passed"].get<bool>());
  EXPECT_NEAR(j["rate_value"].get<double>(), 160.0 * 3125.0, 1e-6);
}

TEST(Cli, CertifyParallelExponent) {
  const auto r =
      run({"certify", "--domain", sample("ball2_1.5.json"), "--kind", "lower-parallel", "--degree", "12"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(io::json::parse(r.out)["rate_exponent"].get<double>(), 10.0 / 3.0, 0.02);
}

TEST(Cli, TableRows) {
  const auto r = run({"table"});
  ASSERT_EQ(r.code, 0);
  const auto rows = io::json::parse(r.out);
  bool l1 = false, product = false, cone = false;
  for (const auto& row : rows) {
    const std::string shape = row["shape"];
    if (shape == "ball_p" && row["dim"] == 2 && row["parameter"] == "p=1") l1 = row["sigma"] == 4.0;
    if (shape == "product") product = row["sigma"] == 5.0;
    if (shape == "cone_disk") cone = row["sigma"] == 6.0;
  }
  EXPECT_TRUE(l1);
  EXPECT_TRUE(product);
  EXPECT_TRUE(cone);
}

TEST(Cli, DegreeRanges) {
  EXPECT_EQ(cli::parse_degrees("4:10:3"), (std::vector<int>{4, 7, 10}));
  EXPECT_EQ(cli::parse_degrees("2:4"), (std::vector<int>{2, 3, 4}));
  EXPECT_THROW(cli::parse_degrees("5:4"), Error);
  EXPECT_THROW(cli::parse_degrees("a:b"), Error);
}
