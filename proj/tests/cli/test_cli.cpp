#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "handle_forge/constructors.hpp"
#include "handle_forge/profile_io.hpp"
#include "handle_forge/pseudoconvexity.hpp"

namespace fs = std::filesystem;
using handle_forge::cli::run;
using nlohmann::json;

namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "handle_forge");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Result r;
  r.code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / "handle_forge_cli" / info->name();
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

std::vector<std::vector<double>> read_csv(const std::string& file, std::string* header) {
  std::ifstream in(file);
  std::string line;
  std::getline(in, line);
  if (header) *header = line;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_F(CliTest, OuterRelaxedConstructionSucceedsAndWritesFiles) {
  const Result r = invoke({"construct", "outer", "--lambda", "2", "--a", "1", "--eps", "0.5", "--relax",
                           "--out-dir", path("outer")});
  ASSERT_EQ(r.code, 0) << r.err;
  ASSERT_TRUE(fs::exists(path("outer/handle.json")));
  ASSERT_TRUE(fs::exists(path("outer/certify.json")));
  const json cert = handle_forge::read_json_file(path("outer/certify.json"));
  EXPECT_TRUE(cert.at("certified").get<bool>());
  EXPECT_EQ(cert.at("containment").at("samples").get<std::size_t>(), 100000U);
  EXPECT_EQ(cert.at("containment").at("lower_violations").get<std::size_t>(), 0U);
  EXPECT_EQ(cert.at("containment").at("upper_violations").get<std::size_t>(), 0U);
}

TEST_F(CliTest, OuterWithSmallLambdaIsAUsageError) {
  const Result r =
      invoke({"construct", "outer", "--lambda", "0.5", "--a", "1", "--eps", "0.5", "--out-dir", path("x")});
  EXPECT_EQ(r.code, 2);
  EXPECT_FALSE(fs::exists(path("x/handle.json")));
}

TEST_F(CliTest, InnerWithLargeLambdaIsAUsageError) {
  EXPECT_EQ(invoke({"construct", "inner", "--lambda", "2", "--eps", "0.5", "--out-dir", path("x")}).code, 2);
}

TEST_F(CliTest, MissingOrUnknownArgumentsAreUsageErrors) {
  EXPECT_EQ(invoke({}).code, 2);
  EXPECT_EQ(invoke({"construct", "outer", "--lambda", "2"}).code, 2);
  EXPECT_EQ(invoke({"frobnicate"}).code, 2);
  EXPECT_EQ(invoke({"verify", "--profile", path("h.json"), "--condition", "7"}).code, 2);
}

TEST_F(CliTest, UnsatisfiableEpsilonIsAVerificationFailure) {
  EXPECT_EQ(invoke({"construct", "outer", "--lambda", "10", "--a", "1", "--eps", "1", "--out-dir", path("x")}).code,
            1);
}

TEST_F(CliTest, QuadraticConstantsBlockCarriesC0) {
  const Result r = invoke({"construct", "quadratic", "--A", "diag:2", "--B", "diag:1", "--r", "1", "--eps", "0.5",
                           "--out-dir", path("q")});
  ASSERT_EQ(r.code, 0) << r.err;
  const json h = handle_forge::read_json_file(path("q/handle.json"));
  EXPECT_NEAR(h.at("constants").at("c0").get<double>(), 3.03576, 1e-4);
  EXPECT_NEAR(h.at("constants").at("c0").get<double>(), 85.0 / 28.0, 1e-12);
}

TEST_F(CliTest, AsymmetricMatrixFileIsRejected) {
  std::ofstream(path("A.txt")) << "2 1\n0 3\n";
  const Result r = invoke({"construct", "quadratic", "--A", path("A.txt"), "--B", "diag:1", "--r", "1", "--eps",
                           "0.5", "--out-dir", path("q")});
  EXPECT_EQ(r.code, 2);
}

TEST_F(CliTest, MatrixFileMatchesDiagonalShorthand) {
  std::ofstream(path("A.txt")) << "2 0\n0 3\n";
  const Eigen::MatrixXd a = handle_forge::cli::parse_matrix(path("A.txt"));
  const Eigen::MatrixXd b = handle_forge::cli::parse_matrix("diag:2,3");
  EXPECT_EQ((a - b).norm(), 0.0);
}

TEST_F(CliTest, VerifyMissingFileIsAUsageError) {
  EXPECT_EQ(invoke({"verify", "--profile", path("none.json"), "--condition", "8"}).code, 2);
}

TEST_F(CliTest, VerifyMalformedJsonIsAUsageError) {
  std::ofstream(path("bad.json")) << "{ not json";
  EXPECT_EQ(invoke({"verify", "--profile", path("bad.json"), "--condition", "8"}).code, 2);
}

class ModelVerify : public CliTest {
 protected:
  json verify_model(const std::string& lambda, const std::string& condition, int* code) {
    const std::string d = path("m" + lambda);
    EXPECT_EQ(invoke({"construct", "model", "--lambda", lambda, "--a", "1", "--out-dir", d}).code, 0);
    const Result r = invoke({"verify", "--profile", d + "/handle.json", "--condition", condition, "--grid", "10000",
                             "--lo", "0.1", "--hi", "10", "--levi-oracle", "4"});
    *code = r.code;
    return json::parse(r.out);
  }
};

TEST_F(ModelVerify, LambdaTwoIsDPlusStrong) {
  int code = -1;
  const json rep = verify_model("2", "9", &code);
  EXPECT_EQ(code, 0);
  EXPECT_EQ(rep.at("classification").at("kind"), "DPlusStrong");
  EXPECT_GT(rep.at("classification").at("worst_margin").get<double>(), 0.0);
  EXPECT_EQ(rep.at("levi_oracle").at("mismatches").get<std::size_t>(), 0U);
}

TEST_F(ModelVerify, LambdaHalfIsDMinusStrong) {
  int code = -1;
  const json rep = verify_model("0.5", "8", &code);
  EXPECT_EQ(code, 0);
  EXPECT_EQ(rep.at("classification").at("kind"), "DMinusStrong");
  EXPECT_EQ(rep.at("levi_oracle").at("mismatches").get<std::size_t>(), 0U);
}

TEST_F(ModelVerify, WrongSideFailsWithExitOne) {
  int code = -1;
  verify_model("2", "8", &code);
  EXPECT_EQ(code, 1);
}

TEST_F(CliTest, OuterProfileIsDPlusStrongOnItsDomain) {
  ASSERT_EQ(invoke({"construct", "outer", "--lambda", "2", "--a", "1", "--eps", "0.5", "--relax", "--samples", "0",
                    "--out-dir", path("o")})
                .code,
            0);
  const Result r = invoke({"verify", "--profile", path("o/handle.json"), "--condition", "9", "--which", "f"});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(json::parse(r.out).at("classification").at("kind"), "DPlusStrong");
}

TEST_F(CliTest, VerifyRoundTripReproducesInMemoryMargins) {
  ASSERT_EQ(invoke({"construct", "outer", "--lambda", "2", "--a", "1", "--eps", "0.5", "--relax", "--samples", "0",
                    "--out-dir", path("o")})
                .code,
            0);
  const Result r = invoke({"verify", "--profile", path("o/handle.json"), "--condition", "8", "--grid", "1000",
                           "--report", path("report.json")});
  ASSERT_EQ(r.code, 0) << r.out;
  const json rep = handle_forge::read_json_file(path("report.json"));

  handle_forge::HandleOptions o;
  o.relax = true;
  const auto h = handle_forge::build_outer_handle(2.0, 1.0, 0.5, o);
  const auto range = rep.at("range");
  handle_forge::GridOptions g;
  g.n_grid = 1000;
  g.include_lo = false;
  const auto cls = handle_forge::classify(h.smoothed, handle_forge::Condition::FForm, range[0].get<double>(),
                                          range[1].get<double>(), g);
  const json& c = rep.at("classification");
  EXPECT_NEAR(c.at("worst_margin").get<double>(), cls.worst_margin, 1e-14);
  EXPECT_NEAR(c.at("min_dminus_margin").get<double>(), cls.min_dminus_margin, 1e-14);
  EXPECT_EQ(c.at("points").get<std::size_t>(), cls.points);
}

TEST_F(CliTest, InnerHandlesVerifyWithLeviOracle) {
  for (const char* lambda : {"-1", "0", "0.5"}) {
    const std::string d = path(std::string("i") + lambda);
    ASSERT_EQ(invoke({"construct", "inner", "--lambda", lambda, "--eps", "0.5", "--samples", "20000", "--out-dir", d})
                  .code,
              0)
        << lambda;
    const Result r = invoke({"verify", "--profile", d + "/handle.json", "--condition", "8", "--levi-oracle", "2"});
    EXPECT_EQ(r.code, 0) << lambda << r.out;
  }
}

TEST_F(CliTest, CapConditionOnQuadraticHandle) {
  ASSERT_EQ(invoke({"construct", "quadratic", "--A", "diag:2", "--B", "diag:1", "--r", "1", "--eps", "0.5",
                    "--samples", "0", "--out-dir", path("q")})
                .code,
            0);
  const Result r = invoke({"verify", "--profile", path("q/handle.json"), "--condition", "cap"});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(invoke({"verify", "--profile", path("q/handle.json"), "--condition", "cap", "--levi-oracle", "2"}).code,
            2);
}

TEST_F(CliTest, ModelRegionIsHyperbolaBranch) {
  ASSERT_EQ(invoke({"construct", "model", "--lambda", "2", "--a", "1", "--out-dir", path("m")}).code, 0);
  ASSERT_EQ(invoke({"export", "--profile", path("m/handle.json"), "--what", "region", "--out", path("r.csv")}).code, 0);
  std::string header;
  const auto rows = read_csv(path("r.csv"), &header);
  EXPECT_EQ(header, "abs_x,abs_y");
  ASSERT_GT(rows.size(), 100U);
  for (const auto& row : rows) {
    const double x = row[0], y = row[1];
    EXPECT_NEAR(y * y, 2.0 * x * x + 1.0, 1e-12 * std::max(1.0, y * y));
  }
}

TEST_F(CliTest, BareProfileDocumentIsAccepted) {
  handle_forge::write_json_file(path("g.json"), handle_forge::profile_to_json(handle_forge::sqrt_quadratic(0.5, 1.0)));
  EXPECT_EQ(invoke({"verify", "--profile", path("g.json"), "--condition", "2", "--lo", "0.1", "--hi", "10"}).code, 0);
  EXPECT_EQ(invoke({"export", "--profile", path("g.json"), "--what", "profile", "--out", path("p.csv")}).code, 0);
  std::string header;
  read_csv(path("p.csv"), &header);
  EXPECT_EQ(header, "t,f,fprime,fsecond_left,fsecond_right");
}

TEST_F(CliTest, OuterFprimeExportRunsThroughTangentLogAndInverseSqrt) {
  ASSERT_EQ(invoke({"construct", "outer", "--lambda", "2", "--a", "1", "--eps", "0.5", "--relax", "--samples", "0",
                    "--out-dir", path("o")})
                .code,
            0);
  const json h = handle_forge::read_json_file(path("o/handle.json"));
  std::vector<std::string> kinds;
  for (const auto& s : h.at("fprime").at("segments")) kinds.push_back(s.at("kind").get<std::string>());
  const std::vector<std::string> want{"inv_sqrt_slope", "log_slope", "polynomial"};
  std::size_t k = 0;
  for (const auto& kind : kinds) {
    if (k < want.size() && kind == want[k]) ++k;
  }
  EXPECT_EQ(k, want.size()) << h.at("fprime").dump();

  ASSERT_EQ(invoke({"export", "--profile", path("o/handle.json"), "--what", "fprime", "--out", path("fp.csv"),
                    "--points", "300"})
                .code,
            0);
  const auto rows = read_csv(path("fp.csv"), nullptr);
  ASSERT_GT(rows.size(), 100U);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_GT(rows[i][0], rows[i - 1][0]);
    EXPECT_GT(rows[i][1], 0.0);
  }
  EXPECT_GT(rows.front()[1], 100.0 * rows.back()[1]);
}

TEST_F(CliTest, QuadraticRegionLiesOnLevelSet) {
  ASSERT_EQ(invoke({"construct", "quadratic", "--A", "diag:2", "--B", "diag:1", "--r", "1", "--eps", "0.5",
                    "--samples", "0", "--out-dir", path("q")})
                .code,
            0);
  ASSERT_EQ(invoke({"export", "--profile", path("q/handle.json"), "--what", "region", "--level", "1", "--out",
                    path("k.csv")})
                .code,
            0);
  const json h = handle_forge::read_json_file(path("q/handle.json"));
  const auto cap = handle_forge::profile_from_json(h.at("cap_smoothed"));
  const auto rows = read_csv(path("k.csv"), nullptr);
  ASSERT_GT(rows.size(), 100U);
  for (const auto& row : rows) {
    const double x2 = row[0] * row[0];
    EXPECT_NEAR(row[1] * row[1] - cap.value(x2), 1.0, 1e-10);
  }
}
