#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "bubblelab/cli/cli.hpp"
#include "support/golden.hpp"

namespace fs = std::filesystem;
using namespace bubblelab;

namespace {

struct Invocation {
  int code;
  std::string out;
  std::string err;
};

Invocation invoke(std::initializer_list<std::string> args) {
  std::vector<std::string> owned{"bubblelab"};
  owned.insert(owned.end(), args);
  std::vector<const char*> argv;
  for (const auto& a : owned) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("bubblelab-cli-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("simulate then analyze: fundamentalist market tracks intrinsic value") {
  auto dir = scratch("fund");
  auto log = (dir / "seed7.jsonl").string();
  auto sim = invoke({"simulate", "--config", "default", "--roster", "all-fundamentalist", "--seed", "7",
                     "--out", dir.string(), "--log", log});
  REQUIRE(sim.code == cli::kExitOk);
  REQUIRE(fs::exists(log));

  auto analyzed = invoke({"analyze", "--log", log, "--json"});
  REQUIRE(analyzed.code == cli::kExitOk);
  auto report = nlohmann::json::parse(analyzed.out);
  REQUIRE(report["haessel_r2_trading"].is_number());
  CHECK(report["haessel_r2_trading"].get<double>() >= 0.9);

  auto table = invoke({"analyze", "--log", log});
  CHECK(table.code == cli::kExitOk);
  CHECK(table.out.find("haessel") != std::string::npos);
}

TEST_CASE("replay of golden logs") {
  for (const auto& log : golden::logs()) {
    auto r = invoke({"replay", "--log", log.string()});
    CHECK(r.code == cli::kExitOk);
    CHECK(r.out.rfind("replay OK", 0) == 0);
  }
}

TEST_CASE("data errors exit 2") {
  CHECK(invoke({"analyze", "--log", "missing.jsonl"}).code == cli::kExitData);
  CHECK(invoke({"replay", "--log", "missing.jsonl"}).code == cli::kExitData);

  auto dir = scratch("corrupt");
  auto src = golden::slurp(golden::dir() / "fundamentalist-seed-7.jsonl");
  auto pos = src.find("\"price\":", src.find("\"kind\":\"TRADE\""));
  REQUIRE(pos != std::string::npos);
  src.insert(pos + 8, "1");  // 100 -> 1100
  auto bad = dir / "bad.jsonl";
  std::ofstream(bad, std::ios::binary) << src;
  auto r = invoke({"replay", "--log", bad.string()});
  CHECK(r.code == cli::kExitData);
  CHECK(r.out.find("replay OK") == std::string::npos);

  std::ofstream(dir / "garbage.jsonl") << "{not json\n";
  CHECK(invoke({"analyze", "--log", (dir / "garbage.jsonl").string()}).code == cli::kExitData);
}

TEST_CASE("usage errors exit 1 and print help to stderr") {
  auto none = invoke({});
  CHECK(none.code == cli::kExitUsage);
  CHECK(none.err.find("simulate") != std::string::npos);

  CHECK(invoke({"frobnicate"}).code == cli::kExitUsage);
  CHECK(invoke({"analyze"}).code == cli::kExitUsage);
  CHECK(invoke({"simulate", "--seed", "1", "--seeds", "1..3"}).code == cli::kExitUsage);
  CHECK(invoke({"simulate", "--seeds", "5..2"}).code == cli::kExitUsage);
  CHECK(invoke({"simulate", "--roster", "no-such-roster", "--seed", "1"}).code != cli::kExitOk);
}

TEST_CASE("seed batches write one report per seed and a summary") {
  auto dir = scratch("batch");
  auto r = invoke({"simulate", "--roster", "all-zic", "--seeds", "1..3", "--ticks", "8", "--out", dir.string()});
  REQUIRE(r.code == cli::kExitOk);
  for (int s = 1; s <= 3; ++s) {
    CHECK(fs::exists(dir / ("seed-" + std::to_string(s) + ".jsonl")));
    CHECK(fs::exists(dir / ("seed-" + std::to_string(s) + ".report.json")));
  }
  REQUIRE(fs::exists(dir / "summary.json"));
  auto summary = nlohmann::json::parse(golden::slurp(dir / "summary.json"));
  CHECK(summary["sessions"] == 3);
}

TEST_CASE("export-figures writes csv files") {
  auto dir = scratch("figs");
  auto log = golden::dir() / "speculator-majority-seed-3.jsonl";
  auto r = invoke({"export-figures", "--log", log.string(), "--out", dir.string()});
  REQUIRE(r.code == cli::kExitOk);
  for (auto name : {"figure1.csv", "figure2.csv", "trades.csv"}) CHECK(fs::exists(dir / name));
  auto fig1 = golden::slurp(dir / "figure1.csv");
  CHECK(fig1.rfind("t,mean_price,intrinsic,max_pv,mean_declared\n", 0) == 0);
  CHECK(std::count(fig1.begin(), fig1.end(), '\n') == 11);
}
