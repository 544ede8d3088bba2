#pragma once

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bubblelab/analytics/report.hpp"
#include "bubblelab/session/events.hpp"
#include "bubblelab/session/replay.hpp"

namespace golden {

namespace fs = std::filesystem;

inline fs::path dir() { return fs::path(BUBBLELAB_GOLDEN_DIR); }

inline std::vector<fs::path> logs() {
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir()))
    if (entry.path().extension() == ".jsonl") out.push_back(entry.path());
  std::sort(out.begin(), out.end());
  return out;
}

inline std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Rendered {
  std::string accounts;
  std::string report;
};

inline Rendered render(const fs::path& log_path) {
  auto log = bubblelab::session::read_log(log_path);
  auto result = bubblelab::session::replay(log);
  return {bubblelab::session::serialize_accounts(result.accounts) + "\n",
          bubblelab::analytics::to_string(bubblelab::analytics::build_report(log, {}))};
}

inline fs::path accounts_path(const fs::path& log) {
  return fs::path(log).replace_extension(".accounts.json");
}
inline fs::path report_path(const fs::path& log) {
  return fs::path(log).replace_extension(".report.json");
}

// BUBBLELAB_UPDATE_GOLDEN=1 rewrites the frozen outputs.
inline bool updating() { return std::getenv("BUBBLELAB_UPDATE_GOLDEN") != nullptr; }

inline void freeze(const fs::path& log, const Rendered& r) {
  std::ofstream(accounts_path(log), std::ios::binary) << r.accounts;
  std::ofstream(report_path(log), std::ios::binary) << r.report;
}

}  // namespace golden
