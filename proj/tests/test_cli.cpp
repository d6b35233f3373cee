#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "evseq/service.hpp"

namespace evseq {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct CliResult {
  int code;
  std::string out;
};

CliResult run(const std::string& args) {
  std::string cmd = std::string(EVSEQ_CLI) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, p)) out.append(buf, n);
  int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("evseq-cli-" + std::to_string(std::random_device{}()));
    fs::create_directories(dir_);
    csv_ = (dir_ / "demo.csv").string();
    ASSERT_EQ(run("generate " + std::string(EVSEQ_DEMO_SPEC) + " --out " + csv_).code, 0);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
  std::string csv_;
};

TEST_F(CliTest, GenerateIsDeterministic) {
  ASSERT_EQ(run("generate " + std::string(EVSEQ_DEMO_SPEC) + " --out " + path("again.csv")).code, 0);
  EXPECT_EQ(slurp(csv_), slurp(path("again.csv")));
  ASSERT_EQ(run("generate " + std::string(EVSEQ_DEMO_SPEC) + " --seed 99 --out " + path("other.csv")).code, 0);
  EXPECT_NE(slurp(csv_), slurp(path("other.csv")));
}

TEST_F(CliTest, IngestCheck) {
  CliResult r = run("ingest-check " + csv_);
  ASSERT_EQ(r.code, 0);
  json s = json::parse(r.out);
  EXPECT_EQ(s["n_sequences"], 100);
  EXPECT_EQ(s["n_unique_sequences"], 5);
}

TEST_F(CliTest, OverviewFullCoverage) {
  CliResult r = run("overview " + csv_ + " --coverage 1.0 --out " + path("ov.json"));
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("unique sequences   5"), std::string::npos) << r.out;
  json doc = json::parse(slurp(path("ov.json")));
  EXPECT_EQ(doc["rows"].size(), 5u);
  EXPECT_EQ(doc["schema_version"], 1);
}

TEST_F(CliTest, MatchesServiceBytes) {
  ASSERT_EQ(run("overview " + csv_ + " --align \"In Consultation\" --coverage 1.0 --out " + path("a.json")).code, 0);
  Service svc;
  json ds = json::parse(svc.handle({"POST", "/datasets", slurp(csv_)}).body);
  std::string sid =
      json::parse(svc.handle({"POST", "/datasets/" + ds["dataset_id"].get<std::string>() + "/sessions", ""}).body)["session_id"];
  svc.handle({"PATCH", "/sessions/" + sid, R"({"anchors": ["In Consultation"], "coverage": {"threshold": 1.0}})"});
  EXPECT_EQ(slurp(path("a.json")), svc.handle({"GET", "/sessions/" + sid + "/overview", ""}).body);
}

TEST_F(CliTest, FiltersAndScales) {
  CliResult r = run("overview " + csv_ + " --days Thu --axis day-of-week --color month-of-year --k 3 --from 2019-03-01 "
              "--to 2019-03-31 --min-freq 1 --out " + path("f.json"));
  ASSERT_EQ(r.code, 0);
  json doc = json::parse(slurp(path("f.json")));
  EXPECT_EQ(doc["axis"]["kind"], "day-of-week");
  EXPECT_EQ(doc["color_legend"]["entries"].size(), 12u);
}

// Every opened element is closed in order.
bool balanced_tags(const std::string& xml) {
  std::vector<std::string> stack;
  for (std::size_t i = xml.find('<'); i != std::string::npos; i = xml.find('<', i + 1)) {
    std::size_t end = xml.find('>', i);
    if (end == std::string::npos) return false;
    std::string tag = xml.substr(i + 1, end - i - 1);
    if (tag.empty() || tag[0] == '?' || tag[0] == '!') continue;
    if (tag[0] == '/') {
      if (stack.empty() || stack.back() != tag.substr(1)) return false;
      stack.pop_back();
    } else if (tag.back() != '/') {
      stack.push_back(tag.substr(0, tag.find_first_of(" \t\n")));
    }
  }
  return stack.empty();
}

TEST_F(CliTest, SvgOutput) {
  ASSERT_EQ(run("overview " + csv_ + " --format svg --out " + path("ov.svg")).code, 0);
  std::string svg = slurp(path("ov.svg"));
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_TRUE(balanced_tags(svg));
}

TEST_F(CliTest, Trend) {
  CliResult r = run("trend " + csv_ + " --event \"Late Arrival\"");
  ASSERT_EQ(r.code, 0);
  std::istringstream lines(r.out);
  std::string header, row;
  std::getline(lines, header);
  std::getline(lines, row);
  double rho = std::stod(row.substr(row.find_last_of(' ') + 1));
  EXPECT_LE(rho, -0.8);
  EXPECT_EQ(run("trend " + csv_ + " --event Teleport").code, 2);
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(run("").code, 1);
  EXPECT_EQ(run("overview").code, 1);
  EXPECT_EQ(run("overview " + csv_ + " --bogus").code, 1);
  EXPECT_EQ(run("overview " + csv_ + " --format png").code, 1);
  EXPECT_EQ(run("overview " + path("missing.csv")).code, 2);
  EXPECT_EQ(run("overview " + csv_ + " --align Teleport").code, 2);
  EXPECT_EQ(run("overview " + csv_ + " --coverage 1.5").code, 2);
  {
    std::ofstream bad(path("bad.csv"));
    bad << "id,event_type,start,end\np1,A,2019-03-04T09:00:00,\n";
  }
  EXPECT_EQ(run("ingest-check " + path("bad.csv")).code, 2);
  {
    std::ofstream spec(path("spec.json"));
    spec << R"({"templates": [{"signature": ["A"], "frequency": 0}]})";
  }
  EXPECT_EQ(run("generate " + path("spec.json")).code, 2);
}

}  // namespace
}  // namespace evseq
