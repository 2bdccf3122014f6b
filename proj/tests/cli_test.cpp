#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "json.hpp"

using Json = nlohmann::ordered_json;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

const std::string kData = VERILOCAL_DATA;

std::string data(const std::string& name) { return kData + "/" + name; }

Run run(const std::string& args, const std::string& redirect = "2>/dev/null") {
  const std::string cmd = std::string("\"") + VERILOCAL_CLI + "\" " + args + " " + redirect;
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

Json run_json(const std::string& args) {
  const auto r = run(args);
  EXPECT_EQ(r.status, 0) << args;
  return Json::parse(r.out);
}

std::string temp_file(const std::string& name, const std::string& contents) {
  const std::string path = ::testing::TempDir() + "verilocal_" + name;
  std::ofstream(path) << contents;
  return path;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST(CliCheck, CleanK5) {
  const auto j = run_json("check --graph " + data("k5.json"));
  EXPECT_EQ(j["command"], "check");
  EXPECT_EQ(j["classification"], "UniquelyVerifiable");
  EXPECT_EQ(j["optimal_cost"], "0/1");
  EXPECT_EQ(j["edge_costs"].size(), 10u);
  EXPECT_EQ(j["inputs"]["graph"]["fnv1a64"].get<std::string>().size(), 16u);
}

TEST(CliCheck, SingleEdgeOutlier) {
  const auto j = run_json("check --graph " + data("two_node.json") + " --support " + data("two_node_outlier.json"));
  EXPECT_EQ(j["classification"], "NonVerifiable");
  EXPECT_EQ(j["optimal_cost"], "0/1");
  EXPECT_EQ(j["origin_cost"], "1/1");
  EXPECT_TRUE(j["inputs"].contains("support"));
}

TEST(CliCheck, TriangleCornersAndOracle) {
  const auto j = run_json("check --graph " + data("triangle.json") + " --support " + data("triangle_support.json") +
                          " --corners --oracle");
  EXPECT_EQ(j["classification"], "Verifiable");
  EXPECT_EQ(j["optimal_cost"], "1/1");
  EXPECT_EQ(j["corner_count"], "3");
  ASSERT_EQ(j["corners"].size(), 3u);
  EXPECT_EQ(j["corners"][1]["x"], Json::array({"0/1", "0/1", "1/1"}));
  EXPECT_EQ(j["oracle"]["agrees"], true);
  EXPECT_EQ(j["oracle"]["optimal_cost"], "1/1");
}

TEST(CliCheck, NonVerifiableK5Support) {
  const auto j = run_json("check --graph " + data("k5.json") + " --support " + data("k5_three_outliers.json") +
                          " --oracle");
  EXPECT_EQ(j["classification"], "NonVerifiable");
  EXPECT_EQ(j["oracle"]["ver"], 0);
  EXPECT_EQ(j["oracle"]["agrees"], true);
}

TEST(CliCheck, TraceGoesToStderr) {
  const auto trace = ::testing::TempDir() + "verilocal_trace.txt";
  const auto r = run("check --trace --graph " + data("two_node.json") + " --support " + data("two_node_outlier.json"),
                     "2>" + trace);
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(slurp(trace), "pivot row=1 col=x+_2 obj=0/1\n");
  EXPECT_EQ(r.out.find("pivot"), std::string::npos);
}

TEST(CliCheck, ByteIdenticalReruns) {
  const std::string args = "check --corners --oracle --graph " + data("triangle_pendant.json");
  const auto a = run(args);
  const auto b = run(args);
  EXPECT_EQ(a.status, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_FALSE(a.out.empty());
  EXPECT_EQ(a.out.find("timing"), std::string::npos);
  EXPECT_NE(run(args + " --timing").out.find("timing_ms"), std::string::npos);
}

TEST(CliCheck, RationalsAreStrings) {
  const auto j = run_json("check --corners --graph " + data("triangle.json") + " --support " +
                          data("triangle_support.json"));
  std::function<void(const Json&)> walk = [&](const Json& v) {
    EXPECT_FALSE(v.is_number_float());
    if (v.is_structured()) {
      for (const auto& c : v) walk(c);
    }
  };
  walk(j);
}

TEST(CliCorners, Triangle) {
  const auto j = run_json("corners --graph " + data("triangle.json") + " --support " + data("triangle_support.json"));
  EXPECT_EQ(j["classification"], "Verifiable");
  EXPECT_EQ(j["corners"].size(), 3u);
  EXPECT_EQ(j["components"], Json::parse("[[1]]"));
}

TEST(CliCorners, CleanGraphSingleComponent) {
  const auto j = run_json("corners --graph " + data("k5.json"));
  EXPECT_EQ(j["classification"], "UniquelyVerifiable");
  EXPECT_EQ(j["corners"].size(), 1u);
  EXPECT_EQ(j["components"], Json::parse("[[1,2,3,4,5]]"));
}

TEST(CliCorners, PendantComponent) {
  const auto j = run_json("corners --graph " + data("triangle_pendant.json"));
  EXPECT_EQ(j["classification"], "NonVerifiable");
  EXPECT_EQ(j["components"], Json::parse("[[1,2,3]]"));
  EXPECT_EQ(j["corners"][0]["x"], Json::array({"0/1", "0/1", "0/1", "1/1"}));
}

TEST(CliCorners, TwoDimensions) {
  const auto j = run_json("corners --dims 2 --combined --graph " + data("triangle.json") + " --epsilon " +
                          data("triangle_2d.json"));
  EXPECT_EQ(j["dimension"], 2);
  EXPECT_EQ(j["classification"], "Verifiable");
  EXPECT_EQ(j["combined_corner_count"], "3");
  EXPECT_EQ(j["combined_corners"].size(), 3u);
  EXPECT_EQ(j["per_dimension"][1]["classification"], "UniquelyVerifiable");
  EXPECT_EQ(j["components"], Json::parse("[[1]]"));
}

TEST(CliCorners, CapExceededExitsFive) {
  const auto r = run("corners --combined --cap 2 --graph " + data("triangle.json") + " --epsilon " +
                     data("triangle_2d.json"));
  EXPECT_EQ(r.status, 5);
}

TEST(CliCorners, DimsMismatchIsValidationError) {
  EXPECT_EQ(run("corners --dims 3 --graph " + data("triangle.json") + " --epsilon " + data("triangle_2d.json")).status,
            3);
}

TEST(CliPver, K5ExactCensus) {
  const auto csv = ::testing::TempDir() + "verilocal_census.csv";
  const auto poly = ::testing::TempDir() + "verilocal_poly.json";
  const auto j = run_json("pver --exact --grid 0:1:4 --graph " + data("k5.json") + " --census-csv " + csv +
                          " --poly-json " + poly);
  const std::vector<std::uint64_t> verifiable{1, 20, 180, 920, 2680, 4524, 4560, 2820, 1080, 240, 24};
  const std::vector<std::uint64_t> total{1, 20, 180, 960, 3360, 8064, 13440, 15360, 11520, 5120, 1024};
  ASSERT_EQ(j["census"].size(), 11u);
  for (std::size_t k = 0; k <= 10; ++k) {
    EXPECT_EQ(j["census"][k]["verifiable"], verifiable[k]);
    EXPECT_EQ(j["census"][k]["total"], total[k]);
  }
  EXPECT_EQ(j["polynomial"]["coeffs"], Json(verifiable));
  EXPECT_EQ(j["curve"][0]["p"], "0/1");
  EXPECT_EQ(j["curve"][0]["p_ver"], "1/1");
  EXPECT_EQ(slurp(poly), "{\"coeffs\":[1,20,180,920,2680,4524,4560,2820,1080,240,24]}\n");
  EXPECT_EQ(slurp(csv).substr(0, 48), "k,total,verifiable,uniquely_verifiable\n0,1,1,1\n1");
}

TEST(CliPver, SingleEdgeCurveIsOneMinusP) {
  const auto curve = ::testing::TempDir() + "verilocal_curve.csv";
  const auto j = run_json("pver --grid 0:1:4 --graph " + data("two_node.json") + " --curve-csv " + curve +
                          " --p-plus 0.1 --p-minus 0.2");
  EXPECT_EQ(j["mode"], "exact");
  EXPECT_EQ(j["p_ver"]["value"], "7/10");
  const char* expected[] = {"1/1", "3/4", "1/2", "1/4", "0/1"};
  for (int k = 0; k < 5; ++k) EXPECT_EQ(j["curve"][k]["p_ver"], expected[k]);
  EXPECT_EQ(slurp(curve), "p,p_ver\n0,1\n0.25,0.75\n0.5,0.5\n0.75,0.25\n1,0\n");
}

TEST(CliPver, MonteCarloIsDeterministic) {
  const std::string args = "pver --samples 3000 --seed 5 --p-plus 0.1 --p-minus 0.1 --grid 0:0.5:2 --graph " +
                           data("k5.json");
  const auto a = run(args);
  const auto b = run(args);
  EXPECT_EQ(a.status, 0);
  EXPECT_EQ(a.out, b.out);
  const auto j = Json::parse(a.out);
  EXPECT_EQ(j["mode"], "monte_carlo");
  EXPECT_EQ(j["curve"][0]["estimate"], "1");
  const double est = std::stod(j["p_ver"]["estimate"].get<std::string>());
  const double hw = std::stod(j["p_ver"]["half_width"].get<std::string>());
  // exact value for p = 0.2 on K5
  EXPECT_NEAR(est, 0.957835612, 3 * hw);
}

TEST(CliPver, BudgetExceededExitsSix) {
  EXPECT_EQ(run("pver --exact --budget 100 --grid 0:1:2 --graph " + data("k5.json")).status, 6);
}

TEST(CliPver, BadArguments) {
  EXPECT_EQ(run("pver --graph " + data("k5.json")).status, 2);
  EXPECT_EQ(run("pver --grid 0:2:4 --graph " + data("k5.json")).status, 2);
  EXPECT_EQ(run("pver --p-plus 0.6 --p-minus 0.6 --graph " + data("two_node.json")).status, 3);
  EXPECT_EQ(run("pver --p-plus abc --p-minus 0.1 --graph " + data("two_node.json")).status, 2);
}

TEST(CliSample, DeterministicAndReadable) {
  const std::string args = "sample --p-plus 0.2 --p-minus 0.2 --dims 2 --seed 9 --graph " + data("k5.json");
  const auto a = run(args);
  EXPECT_EQ(a.status, 0);
  EXPECT_EQ(a.out, run(args).out);
  const auto path = temp_file("sampled.json", a.out);
  const auto j = run_json("corners --graph " + path);
  EXPECT_EQ(j["dimension"], 2);
  EXPECT_TRUE(j.contains("combined_corner_count"));
}

TEST(CliErrors, ExitCodes) {
  EXPECT_EQ(run("check --graph " + data("disconnected.json")).status, 3);
  EXPECT_EQ(run("check --graph " + temp_file("loop.json", R"({"num_nodes":2,"edges":[{"i":1,"j":1},{"i":1,"j":2}]})"))
                .status,
            3);
  EXPECT_EQ(run("check --graph " + temp_file("broken.json", "{\"num_nodes\": 2,")).status, 2);
  EXPECT_EQ(run("check --graph " + data("missing.json")).status, 2);
  EXPECT_EQ(run("check --no-such-flag --graph " + data("k5.json")).status, 2);
  EXPECT_EQ(run("").status, 2);
  EXPECT_EQ(run("check --graph " + data("triangle.json") + " --support " +
                temp_file("bad_edge.json", R"({"support":[{"edge":9,"sign":"+"}]})"))
                .status,
            3);
}

TEST(CliErrors, DisconnectedMessageNamesComponents) {
  const auto r = run("check --graph " + data("disconnected.json"), "2>&1");
  EXPECT_NE(r.out.find("{1,2} {3,4}"), std::string::npos) << r.out;
}
