// End-to-end command-line driver tests: golden outputs on analytic fixtures,
// audit-block reproducibility, config files, and exit codes.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "trendratio/cli.hpp"

using namespace trendratio;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("trendratio_test_" + tag);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream os(path);
  os << text;
}

std::string read_file(const std::string& path) {
  std::ifstream is(path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

std::string first_lines(const std::string& text, int n) {
  std::istringstream in(text);
  std::ostringstream out;
  std::string line;
  for (int i = 0; i < n && std::getline(in, line); ++i) out << line << "\n";
  return out.str();
}

// Four noiseless columns: slopes 1.5, 0.5, 2.0, 1.0 -> ratios 3 and 2.
std::string clean_csv() {
  std::ostringstream os;
  os << "year,n1,d1,n2,d2\n";
  for (int t = 0; t < 30; ++t)
    os << 1990 + t << "," << 1.5 * (t + 1) + 3.0 << "," << 0.5 * (t + 1) - 2.0 << ","
       << 2.0 * (t + 1) << "," << 1.0 * (t + 1) + 5.0 << "\n";
  return os.str();
}

int run(const std::vector<std::string>& args) { return cli_main(args); }

}  // namespace

TEST_CASE("compare on a noiseless dataset writes exact golden tables") {
  TempDir dir("golden");
  write_file(dir.file("clean.csv"), clean_csv());

  const int code =
      run({"compare", "--data", dir.file("clean.csv"), "--ratio", "first=n1/d1",
           "--ratio", "second=n2/d2", "--bandwidth", "0.25", "--out-dir",
           dir.file("out")});
  REQUIRE(code == 0);

  const std::string trend = read_file(dir.file("out/trend.csv"));
  CHECK(first_lines(trend, 2) ==
        "series,slope,se,ci_lower,ci_upper,b,cv,degenerate\n"
        "n1,15,0,15,15,0.25,4.202753613,degenerate\n");

  const std::string ratio = read_file(dir.file("out/ratio.csv"));
  CHECK(first_lines(ratio, 3) ==
        "ratio,numerator,denominator,estimate,shape,ci_lower,ci_upper,b,cv,degenerate\n"
        "first,n1,d1,3,interval,3,3,0.25,4.202753613,degenerate\n"
        "second,n2,d2,2,interval,2,2,0.25,4.202753613,degenerate\n");

  const std::string cmp = read_file(dir.file("out/compare.csv"));
  // delta = 3 - 2 = 1; g = 1.5*1 - 2*0.5 = 0.5, scaled by 1e4.
  CHECK(first_lines(cmp, 2) ==
        "ratio_a,ratio_b,delta,delta_ci_lower,delta_ci_upper,delta_star,"
        "g_scaled,g_ci_lower,g_ci_upper,g_star,b_iv,b_prod,degenerate\n"
        "first,second,1,1,1,*,5000,5000,5000,*,0.25,0.25,degenerate\n");

  const nlohmann::json j = nlohmann::json::parse(read_file(dir.file("out/report.json")));
  CHECK(j["dataset"] == "clean");
  CHECK(j["T"] == 30);
  CHECK(j["bandwidth"] == "b0.25");
  CHECK(j["comparisons"][0]["delta"] == 1.0);
}

TEST_CASE("trend subcommand defaults to every series in file order") {
  TempDir dir("trend");
  write_file(dir.file("clean.csv"), clean_csv());
  REQUIRE(run({"trend", "--data", dir.file("clean.csv"), "--out-dir", dir.file("out"),
               "--bandwidth", "0.5", "--format", "csv"}) == 0);
  std::istringstream in(read_file(dir.file("out/trend.csv")));
  std::string line;
  std::getline(in, line);
  std::vector<std::string> labels;
  while (std::getline(in, line)) labels.push_back(line.substr(0, line.find(',')));
  CHECK(labels == std::vector<std::string>{"n1", "d1", "n2", "d2"});
  CHECK(!fs::exists(dir.file("out/report.json")));  // csv-only format
  CHECK(!fs::exists(dir.file("out/ratio.csv")));    // no ratios requested
}

TEST_CASE("audit block alone reproduces a noisy report bitwise") {
  TempDir dir("repro");
  std::ostringstream csv;
  csv << "t,a,b\n";
  for (int t = 0; t < 80; ++t) {
    const double noise = std::sin(0.9 * t) * 0.4;
    csv << t << "," << 2.0 * t + noise << "," << 1.0 * t - 0.3 * noise << "\n";
  }
  write_file(dir.file("noisy.csv"), csv.str());

  const std::vector<std::string> args = {
      "ratio",    "--data",          dir.file("noisy.csv"), "--ratio", "a/b",
      "--kernel", "daniell",         "--bandwidth",         "a91",     "--out-dir",
      dir.file("out"),  "--format", "json"};
  REQUIRE(run(args) == 0);
  const std::string once = read_file(dir.file("out/report.json"));

  // Re-run with the settings recorded in the audit block.
  const nlohmann::json j = nlohmann::json::parse(once);
  const std::vector<std::string> again = {
      "ratio", "--data", dir.file("noisy.csv"), "--ratio", "a/b",
      "--kernel", j["kernel"].get<std::string>(),
      "--bandwidth", j["bandwidth"].get<std::string>(),
      "--seed", std::to_string(j["seed"].get<std::uint64_t>()),
      "--out-dir", dir.file("out2"), "--format", "json"};
  REQUIRE(run(again) == 0);
  CHECK(read_file(dir.file("out2/report.json")) == once);

  // The realized data-dependent bandwidth is recorded and plausible.
  const double b = j["ratios"][0]["b"].get<double>();
  CHECK(b > 0.0);
  CHECK(b <= 1.0);
}

TEST_CASE("simulate null honours a config file and emits both formats") {
  TempDir dir("simcfg");
  write_file(dir.file("exp.toml"),
             "[simulate.null]\n"
             "T = 50\n"
             "ar = \"0.3,0.7,0.5,0.9\"\n"
             "corr = 0.5\n"
             "beta2 = \"10.0\"\n"
             "bandwidths = \"0.25\"\n"
             "reps = 1000\n"
             "seed = 11\n");
  REQUIRE(run({"--config", dir.file("exp.toml"), "simulate", "null", "--out-dir",
               dir.file("out")}) == 0);

  const std::string csv = read_file(dir.file("out/null.csv"));
  CHECK(first_lines(csv, 1) ==
        "T,beta2,theta1,theta2,replications,t_iv_b0.25,t_prod_b0.25,"
        "se_iv_b0.25,se_prod_b0.25\n");
  CHECK(csv.find("50,10,1,1,1000,") != std::string::npos);

  const nlohmann::json j = nlohmann::json::parse(read_file(dir.file("out/null.json")));
  CHECK(j["T"] == 50);
  CHECK(j["replications"] == 1000);
  CHECK(j["seed"] == 11);
  CHECK(j["ar"] == nlohmann::json::array({0.3, 0.7, 0.5, 0.9}));
  CHECK(j["cells"].size() == 1);
  const double rate = j["cells"][0]["rate_iv"][0].get<double>();
  CHECK(rate > 0.0);
  CHECK(rate < 0.3);
}

TEST_CASE("simulate power sweeps the theta2 grid") {
  TempDir dir("simpow");
  REQUIRE(run({"simulate", "power", "--T", "60", "--beta2", "10", "--theta2",
               "0.9,1.0,1.1", "--bandwidths", "0.25", "--reps", "1000", "--seed",
               "5", "--out-dir", dir.file("out"), "--format", "json"}) == 0);
  const nlohmann::json j = nlohmann::json::parse(read_file(dir.file("out/power.json")));
  REQUIRE(j["cells"].size() == 3);
  CHECK(j["cells"][0]["theta2"] == 0.9);
  CHECK(j["cells"][1]["theta2"] == 1.0);
  CHECK(j["cells"][2]["theta2"] == 1.1);
  // Power at the alternatives exceeds size at the null for iid noise.
  const double at_null = j["cells"][1]["rate_iv"][0].get<double>();
  CHECK(j["cells"][0]["rate_iv"][0].get<double>() > at_null);
  CHECK(j["cells"][2]["rate_iv"][0].get<double>() > at_null);
}

TEST_CASE("cv subcommand prints the polynomial value for the default setup") {
  // Captured via a redirect through a file to keep the harness simple.
  TempDir dir("cv");
  const double expected = 1.9659 + 4.0603 * 0.25 + 11.6626 * 0.0625 +
                          34.8269 * 0.015625 - 13.9506 * 0.00390625 +
                          3.2669 * 0.0009765625;
  (void)expected;  // checked in the library suites; here only wiring
  CHECK(run({"cv", "--b", "0.25"}) == 0);
  CHECK(run({"cv", "--b", "0.25", "--kernel", "daniell", "--level", "0.05"}) == 0);
}

TEST_CASE("cv cache file is created and reused across runs") {
  TempDir dir("cache");
  const std::string cache = dir.file("cv_cache.csv");
  REQUIRE(run({"cv", "--b", "0.3", "--kernel", "bartlett", "--reps", "2000",
               "--steps", "120", "--cv-cache", cache}) == 0);
  REQUIRE(fs::exists(cache));
  const std::string stored = read_file(cache);
  CHECK(stored.find("bartlett") != std::string::npos);
  // Second run hits the cache and leaves the file unchanged.
  REQUIRE(run({"cv", "--b", "0.3", "--kernel", "bartlett", "--reps", "2000",
               "--steps", "120", "--cv-cache", cache}) == 0);
  CHECK(read_file(cache) == stored);
}

TEST_CASE("exit codes: 1 for input problems, 0 for help") {
  TempDir dir("exits");
  write_file(dir.file("clean.csv"), clean_csv());
  CHECK(run({"trend", "--data", dir.file("absent.csv")}) == 1);
  CHECK(run({"ratio", "--data", dir.file("clean.csv"), "--ratio", "n1/ghost",
             "--out-dir", dir.file("out")}) == 1);
  CHECK(run({"ratio", "--data", dir.file("clean.csv"), "--ratio", "notaratio",
             "--out-dir", dir.file("out")}) == 1);
  CHECK(run({"compare", "--data", dir.file("clean.csv"), "--ratio", "n1/d1",
             "--bandwidth", "2.5", "--out-dir", dir.file("out")}) == 1);
  CHECK(run({"simulate", "null", "--reps", "10"}) == 1);       // too few reps
  CHECK(run({"simulate", "null", "--ar", "0.3,0.5"}) == 1);    // bad ar count
  CHECK(run({"nonsense"}) == 1);
  CHECK(run({}) == 1);
  CHECK(run({"--help"}) == 0);
  CHECK(run({"trend", "--help"}) == 0);

  // Malformed data file: ragged row.
  write_file(dir.file("ragged.csv"), "t,a\n0,1\n1\n2,3\n");
  CHECK(run({"trend", "--data", dir.file("ragged.csv"), "--out-dir",
             dir.file("out")}) == 1);
}

TEST_CASE("warnings for dropped columns reach stderr but do not fail the run") {
  TempDir dir("drop");
  write_file(dir.file("gap.csv"),
             "t,good,gappy\n0,1.0,5.0\n1,2.0,\n2,3.0,7.0\n3,4.0,8.0\n");
  REQUIRE(run({"trend", "--data", dir.file("gap.csv"), "--bandwidth", "0.5",
               "--out-dir", dir.file("out"), "--format", "csv"}) == 0);
  const std::string trend = read_file(dir.file("out/trend.csv"));
  CHECK(trend.find("good") != std::string::npos);
  CHECK(trend.find("gappy") == std::string::npos);
}
