#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "fracwave/cli.hpp"

using namespace fracwave;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

// Parse "h1,h2\nv,v\n..." into rows of strings.
std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

std::vector<double> column(const std::string& text, std::size_t col) {
  std::vector<double> v;
  const auto rows = csv_rows(text);
  for (std::size_t i = 1; i < rows.size(); ++i) v.push_back(std::stod(rows[i].at(col)));
  return v;
}

std::filesystem::path temp_path(const std::string& name) { return std::filesystem::temp_directory_path() / name; }

}  // namespace

TEST(Cli, HelpListsFigureRecipes) {
  const auto r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("Figure recipes"), std::string::npos);
  for (const char* sub : {"kernel", "green", "dispersion", "validate", "energy"}) EXPECT_NE(r.out.find(sub), std::string::npos);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, cli::kUsage);
  EXPECT_EQ(run({"bogus"}).code, cli::kUsage);
  EXPECT_EQ(run({"kernel", "--grid", "0:1:0"}).code, cli::kUsage);
  EXPECT_EQ(run({"kernel", "--grid", "1:0:5"}).code, cli::kUsage);
  EXPECT_EQ(run({"kernel", "--grid", "0:1"}).code, cli::kUsage);
  EXPECT_EQ(run({"kernel", "--grid", "a:b:c"}).code, cli::kUsage);
  EXPECT_EQ(run({"kernel", "--fn", "nope"}).code, cli::kUsage);
  EXPECT_EQ(run({"green", "--alpha", "2.5"}).code, cli::kUsage);
  EXPECT_EQ(run({"green", "--beta", "1.8", "--alpha", "1.5"}).code, cli::kUsage);
  EXPECT_EQ(run({"green", "--dim", "2"}).code, cli::kUsage);
  EXPECT_EQ(run({"green", "--which", "Q"}).code, cli::kUsage);
  EXPECT_EQ(run({"green", "--t", "0"}).code, cli::kUsage);
  EXPECT_EQ(run({"dispersion", "--grid", "0:10:5"}).code, cli::kUsage);
  EXPECT_EQ(run({"dispersion", "--grid", "-5:10:5"}).code, cli::kUsage);
  EXPECT_EQ(run({"validate", "--only", "12"}).code, cli::kUsage);
  EXPECT_EQ(run({"validate", "--mutate", "unknown"}).code, cli::kUsage);
}

TEST(Cli, KernelMainardiHalfIsGaussian) {
  const auto r = run({"kernel", "--fn", "m_wright", "--gamma", "0.5", "--grid", "0:4:41"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(csv_rows(r.out).front(), (std::vector<std::string>{"y", "value"}));
  const auto z = column(r.out, 0), v = column(r.out, 1);
  ASSERT_EQ(z.size(), 41u);
  for (std::size_t i = 0; i < z.size(); ++i)
    EXPECT_NEAR(v[i], std::exp(-z[i] * z[i] / 4) / std::sqrt(std::numbers::pi), 1e-14);
}

TEST(Cli, KernelZChangesSignForOrderNearTwo) {
  const auto r = run({"kernel", "--fn", "z_alpha", "--alpha", "1.9"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto v = column(r.out, 1);
  EXPECT_EQ(v.size(), 500u);
  int changes = 0;
  for (std::size_t i = 1; i < v.size(); ++i) changes += (v[i - 1] < 0) != (v[i] < 0);
  EXPECT_EQ(changes, 1);
}

TEST(Cli, KernelFloatsCarrySeventeenDigits) {
  const auto r = run({"kernel", "--fn", "x_alpha", "--alpha", "1.5", "--grid", "0.3:0.3:1"});
  ASSERT_EQ(r.code, 0);
  const auto v = column(r.out, 1);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0], x_alpha(1.5, 0.3));
}

TEST(Cli, GreenThreeDimensionalCurve) {
  const auto r = run({"green", "--dim", "3", "--beta", "1.2666", "--alpha", "1.9", "--t", "1", "--grid", "0.1:2:5"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv_rows(r.out);
  EXPECT_EQ(rows.front(), (std::vector<std::string>{"t", "r", "value", "which", "params"}));
  ASSERT_EQ(rows.size(), 6u);
  FracParams p;
  p.beta = 1.2666;
  p.alpha = 1.9;
  EXPECT_EQ(std::stod(rows[2][2]), green3d_isotropic(p, 1.0, std::stod(rows[2][1]), Which::G));
  EXPECT_EQ(rows[2][3], "G");
}

TEST(Cli, GreenNeutralCaseUsesTheSpatialKernel) {
  const auto r = run({"green", "--beta", "1.5", "--alpha", "1.5", "--grid", "0.5:0.5:1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(column(r.out, 2)[0], x_alpha(1.5, 0.5), 1e-15);
}

TEST(Cli, MeasureFileMatchesIsotropicForUniformMeasure) {
  const auto path = temp_path("fracwave_cli_uniform.json");
  std::ofstream(path) << R"({"uniform_mass": 1.0})";
  const std::vector<std::string> base{"green", "--dim", "3", "--beta", "1.2", "--alpha", "1.6", "--grid", "0.3:1.2:4"};
  auto with = base;
  with.insert(with.end(), {"--measure", path.string()});
  const auto iso = run(base), aniso = run(with);
  ASSERT_EQ(iso.code, 0) << iso.err;
  ASSERT_EQ(aniso.code, 0) << aniso.err;
  const auto a = column(iso.out, 2), b = column(aniso.out, 2);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-8);
}

TEST(Cli, MeasureErrors) {
  EXPECT_EQ(run({"green", "--dim", "3", "--measure", "/nonexistent/m.json"}).code, cli::kIo);
  const auto bad = temp_path("fracwave_cli_bad.json");
  std::ofstream(bad) << "{ not json";
  EXPECT_EQ(run({"green", "--dim", "3", "--measure", bad.string()}).code, cli::kIo);
  const auto degenerate = temp_path("fracwave_cli_degenerate.json");
  std::ofstream(degenerate) << R"({"atoms": [{"dir": [1, 0, 0], "weight": 1}]})";
  EXPECT_EQ(run({"green", "--dim", "3", "--beta", "1.2", "--alpha", "1.6", "--measure", degenerate.string(), "--grid",
                 "0.5:0.5:1"})
                .code,
            cli::kNumerical);
  EXPECT_EQ(run({"green", "--dim", "1", "--measure", bad.string()}).code, cli::kUsage);
}

TEST(Cli, OutputFileAndUnwritablePath) {
  const auto path = temp_path("fracwave_cli_out.csv");
  std::filesystem::remove(path);
  const auto r = run({"kernel", "--alpha", "1.5", "--grid", "0.1:1:3", "--out", path.string()});
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(path);
  std::stringstream body;
  body << in.rdbuf();
  EXPECT_EQ(column(body.str(), 0).size(), 3u);
  EXPECT_EQ(run({"kernel", "--alpha", "1.5", "--out", "/nonexistent/dir/x.csv"}).code, cli::kIo);
}

TEST(Cli, OutputIsBitStable) {
  const std::vector<std::string> args{"green", "--beta", "1.3", "--alpha", "1.9", "--which", "H", "--grid", "0.05:3:30"};
  EXPECT_EQ(run(args).out, run(args).out);
}

TEST(Cli, DispersionSlopeAndElasticCase) {
  const auto r = run({"dispersion", "--beta", "1.2", "--alpha", "1.6"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto w = column(r.out, 0), slope = column(r.out, 3);
  EXPECT_EQ(w.size(), 41u);
  EXPECT_NEAR(w.front(), 1e2, 1e-10);
  EXPECT_NEAR(w.back(), 1e6, 1e-4);
  EXPECT_NEAR(slope[0], 0.75, 0.0075);
  const auto el = run({"dispersion"});
  ASSERT_EQ(el.code, 0);
  for (double a : column(el.out, 1)) EXPECT_EQ(a, 0.0);
}

TEST(Cli, EnergySeries) {
  const auto r = run({"energy", "--beta", "2", "--alpha", "2", "--steps", "20", "--points", "256", "--spacing", "0.1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto drift = column(r.out, 4);
  EXPECT_EQ(drift.size(), 21u);
  for (double d : drift) EXPECT_LT(d, 1e-12);
  EXPECT_EQ(run({"energy", "--points", "100"}).code, cli::kUsage);
}

TEST(Cli, ValidateReportAndMutation) {
  auto r = run({"validate", "--only", "1,11"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["schema"], validation::kReportSchema);
  EXPECT_TRUE(j["passed"].get<bool>());
  ASSERT_EQ(j["checks"].size(), 2u);
  EXPECT_EQ(j["checks"][0]["id"], 1);
  EXPECT_FALSE(j["checks"][0]["metrics"].empty());

  r = run({"validate", "--only", "1", "--mutate", "flip-x-sign"});
  EXPECT_EQ(r.code, cli::kNumerical);
  j = nlohmann::json::parse(r.out);
  EXPECT_FALSE(j["passed"].get<bool>());
  EXPECT_FALSE(j["checks"][0]["passed"].get<bool>());
  EXPECT_NE(r.err.find("FAIL"), std::string::npos);
}

TEST(Cli, BinaryExitCodes) {
  const std::string bin = FRACWAVE_CLI_PATH;
  auto status = [&](const std::string& args) {
    const int s = std::system((bin + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
  };
  EXPECT_EQ(status("kernel --alpha 1.5 --grid 0:1:3"), 0);
  EXPECT_EQ(status("kernel --grid 0:1:3"), 1);  // default alpha = 2 is outside the open range of X
  EXPECT_EQ(status("kernel --grid 0:1:0"), 1);
  EXPECT_EQ(status("green --dim 3 --measure /nonexistent/m.json"), 3);
}
