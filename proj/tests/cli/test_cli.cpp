// Copyright 2026 The weyldirac Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "weyldirac/potential.hpp"
#include "weyldirac_cli/cli.hpp"

namespace fs = std::filesystem;
using weyldirac::cplx;
namespace cli = weyldirac::cli;

namespace {

const std::string kData = WEYLDIRAC_DATA_DIR;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "weyldirac");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Data rows of a CSV body, comment lines and header dropped.
std::vector<std::vector<std::string>> rows(const std::string& text) {
  std::vector<std::vector<std::string>> out;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    out.push_back(f);
  }
  return out;
}

class CliFiles : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("weyldirac_cli_" + std::string(::testing::UnitTest::GetInstance()
                                                ->current_test_info()
                                                ->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string prefix(const std::string& n) const { return (dir_ / n).string(); }
  fs::path dir_;
};

}  // namespace

TEST(CliParse, Complex) {
  EXPECT_EQ(cli::parse_complex("0+1e3i"), cplx(0, 1000));
  EXPECT_EQ(cli::parse_complex("1i"), cplx(0, 1));
  EXPECT_EQ(cli::parse_complex("i"), cplx(0, 1));
  EXPECT_EQ(cli::parse_complex("-i"), cplx(0, -1));
  EXPECT_EQ(cli::parse_complex("1+i"), cplx(1, 1));
  EXPECT_EQ(cli::parse_complex("3"), cplx(3, 0));
  EXPECT_EQ(cli::parse_complex("-2.5-3e-2i"), cplx(-2.5, -0.03));
  EXPECT_EQ(cli::parse_complex("1e-3+1e+2i"), cplx(1e-3, 100));
  EXPECT_THROW(cli::parse_complex("abc"), weyldirac::Error);
  EXPECT_THROW(cli::parse_complex(""), weyldirac::Error);
}

TEST(CliParse, RealLists) {
  EXPECT_EQ(cli::parse_real_list("1,2.5,-3"), (std::vector<double>{1, 2.5, -3}));
  const auto g = cli::parse_real_list("-3:3:601");
  ASSERT_EQ(g.size(), 601u);
  EXPECT_DOUBLE_EQ(g.front(), -3);
  EXPECT_DOUBLE_EQ(g.back(), 3);
  EXPECT_NEAR(g[300], 0.0, 1e-15);
  const auto l = cli::parse_real_list("10:1000:3:log");
  ASSERT_EQ(l.size(), 3u);
  EXPECT_NEAR(l[1], 100.0, 1e-10);
  EXPECT_THROW(cli::parse_real_list("1:2"), weyldirac::Error);
  EXPECT_THROW(cli::parse_real_list("1:2:0"), weyldirac::Error);
  EXPECT_THROW(cli::parse_real_list("-1:2:3:log"), weyldirac::Error);
  const auto zs = cli::parse_complex_list("i,1+i");
  ASSERT_EQ(zs.size(), 2u);
  EXPECT_EQ(zs[1], cplx(1, 1));
}

TEST_F(CliFiles, MfuncFreeIsIdentityTimesI) {
  const auto r = run({"mfunc", "--potential", kData + "/free.json", "--x0", "0", "--z", "0+1e3i",
                      "-o", prefix("m")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = slurp(prefix("m") + ".csv");
  const auto rs = rows(csv);
  ASSERT_EQ(rs.size(), 1u);
  // z_re,z_im,x0,side,M_re,M_im,...
  EXPECT_NEAR(std::stod(rs[0][4]), 0.0, 1e-10);
  EXPECT_NEAR(std::stod(rs[0][5]), 1.0, 1e-10);
  EXPECT_NE(csv.find("# tolerances"), std::string::npos);

  const auto summary = nlohmann::json::parse(slurp(prefix("m") + ".json"));
  EXPECT_EQ(summary["subcommand"], "mfunc");
  EXPECT_FALSE(summary["partial"].get<bool>());
  EXPECT_TRUE(summary.contains("wall_time_s"));
  EXPECT_TRUE(summary.contains("version"));
  EXPECT_DOUBLE_EQ(summary["tolerances"]["halfline_tol"].get<double>(), 1e-12);
  EXPECT_EQ(summary["inputs"]["z"][0][1].get<double>(), 1000.0);
}

TEST_F(CliFiles, BandsConstantQHasEdgesAtPlusMinusOne) {
  const auto r = run({"bands", "--potential", kData + "/const_q1.json", "--lambda", "-3:3:601",
                      "-o", prefix("b")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto summary = nlohmann::json::parse(slurp(prefix("b") + ".json"));
  const auto& gaps = summary["results"]["gaps"];
  ASSERT_EQ(gaps.size(), 1u);
  EXPECT_NEAR(gaps[0]["lo"].get<double>(), -1.0, 0.01 + 1e-12);
  EXPECT_NEAR(gaps[0]["hi"].get<double>(), 1.0, 0.01 + 1e-12);
  EXPECT_EQ(summary["results"]["bands"].size(), 2u);
}

TEST(Cli, NonHermitianFileFailsWithCategory) {
  const auto r = run({"mfunc", "--potential", kData + "/broken.json", "--z", "1i", "--stdout"});
  EXPECT_EQ(r.code, cli::kExitModuleError);
  const auto e = nlohmann::json::parse(r.err.substr(0, r.err.find('\n')));
  EXPECT_EQ(e["error"], "NonHermitianPiece");
  EXPECT_TRUE(r.out.empty());
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({"nosuch"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"mfunc", "--z", "1i"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"mfunc", "--potential", kData + "/free.json", "--z", "zz"}).code,
            cli::kExitUsage);
  EXPECT_EQ(run({"mfunc", "--potential", kData + "/free.json", "--z", "1i", "--side", "up"}).code,
            cli::kExitUsage);
}

TEST(Cli, MissingPotentialIsIoError) {
  const auto r = run({"mfunc", "--potential", "/nonexistent/p.json", "--z", "1i", "--stdout"});
  EXPECT_EQ(r.code, cli::kExitModuleError);
  EXPECT_NE(r.err.find("\"error\""), std::string::npos);
}

TEST(Cli, NoZIsInvalidArgument) {
  const auto r = run({"mfunc", "--potential", kData + "/free.json", "--stdout"});
  EXPECT_EQ(r.code, cli::kExitModuleError);
  EXPECT_NE(r.err.find("InvalidArgument"), std::string::npos);
}

TEST_F(CliFiles, RealZIsReportedAsPartialOutput) {
  const auto r = run({"mfunc", "--potential", kData + "/const_q1.json", "--z", "1i,0.5,2i",
                      "-o", prefix("p")});
  EXPECT_EQ(r.code, cli::kExitModuleError);
  EXPECT_NE(r.err.find("DegenerateArguments"), std::string::npos);
  const auto csv = slurp(prefix("p") + ".csv");
  EXPECT_NE(csv.find("# partial: 1 of 3"), std::string::npos);
  EXPECT_EQ(rows(csv).size(), 2u);
  const auto summary = nlohmann::json::parse(slurp(prefix("p") + ".json"));
  EXPECT_TRUE(summary["partial"].get<bool>());
  ASSERT_EQ(summary["failures"].size(), 1u);
  EXPECT_EQ(summary["failures"][0]["index"], 1);
  EXPECT_EQ(summary["failures"][0]["error"], "DegenerateArguments");
}

TEST(Cli, OutputIsByteIdenticalAcrossThreadCounts) {
  auto csv = [](const std::string& threads) {
    return run({"bands", "--potential", kData + "/two_step.json", "--lambda", "-4:4:161",
                "--threads", threads, "--stdout", "-o",
                (fs::temp_directory_path() / "weyldirac_det").string()});
  };
  const auto a = csv("1"), b = csv("4"), c = csv("4");
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(b.out, c.out);
  EXPECT_FALSE(a.out.empty());
  fs::remove(fs::temp_directory_path() / "weyldirac_det.json");
}

TEST_F(CliFiles, FulllineUpsilonFreeIsHalfIdentity) {
  const auto r = run({"fullline", "--potential", kData + "/free.json", "--lambda", "0.5,2",
                      "--epsilon", "1e-4", "-o", prefix("u")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto summary = nlohmann::json::parse(slurp(prefix("u") + ".json"));
  EXPECT_EQ(summary["results"]["mode"], "upsilon");
  EXPECT_NEAR(summary["results"]["eigenvalue_range"][0].get<double>(), 0.5, 1e-3);
  EXPECT_NEAR(summary["results"]["eigenvalue_range"][1].get<double>(), 0.5, 1e-3);
}

TEST_F(CliFiles, DiskClassifiesRegularOnBoundaryAndLimitInside) {
  const auto r = run({"disk", "--potential", kData + "/free.json", "--z", "1i", "--c", "1,2",
                      "-o", prefix("d")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rs = rows(slurp(prefix("d") + ".csv"));
  ASSERT_EQ(rs.size(), 2u);
  for (const auto& row : rs) {
    EXPECT_EQ(row[5], "boundary");
    EXPECT_EQ(row[7], "interior");
  }
}

TEST_F(CliFiles, GaugeWritesLoadablePotential) {
  const auto r = run({"gauge", "--potential", kData + "/const_q1.json", "--x0", "0", "--x1", "1",
                      "--omega", "0", "-o", prefix("g")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto spec = weyldirac::load_potential(prefix("g") + ".potential.json");
  EXPECT_EQ(spec.m(), 1);
  const auto summary = nlohmann::json::parse(slurp(prefix("g") + ".json"));
  EXPECT_LT(summary["results"]["normal_form_defect"].get<double>(), 1e-9);
  EXPECT_LT(summary["results"]["max_drift"].get<double>(), 1e-8);
}

TEST_F(CliFiles, OtherSubcommandsRun) {
  const std::string bump = kData + "/bump.json";
  const std::vector<std::vector<std::string>> cases = {
      {"expand", "--potential", bump, "--x", "0,0.3", "--order", "3"},
      {"greens", "--potential", bump, "--z", "1i", "--x", "-0.5,0.5", "--xp", "0.5"},
      {"trace", "--potential", kData + "/const_q1.json", "--x", "0.5", "--zmag", "100,300"},
      {"reflectionless", "--potential", kData + "/free.json", "--lambda", "0.5,1",
       "--epsilon", "1e-4"},
      {"borg", "--potential", kData + "/const_q1.json", "--step", "0.05"},
      {"uniqueness", "--potential", bump, "--potential2", bump, "--a", "1", "--zmag", "20,40"},
  };
  int k = 0;
  for (auto c : cases) {
    c.push_back("-o");
    c.push_back(prefix("o" + std::to_string(k++)));
    const auto r = run(c);
    if (c[0] == "uniqueness") {
      // Identical inputs leave nothing above the noise floor.
      EXPECT_EQ(r.code, cli::kExitModuleError) << c[0];
      EXPECT_NE(r.err.find("DifferenceBelowNoise"), std::string::npos) << r.err;
    } else {
      EXPECT_EQ(r.code, 0) << c[0] << ": " << r.err;
      EXPECT_FALSE(rows(slurp(c.back() + ".csv")).empty()) << c[0];
    }
  }
}
