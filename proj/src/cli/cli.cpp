#include "bubblelab/cli/cli.hpp"

#include <atomic>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "bubblelab/agents/simulation.hpp"
#include "bubblelab/analytics/report.hpp"
#include "bubblelab/protocol/server.hpp"
#include "bubblelab/session/replay.hpp"

namespace bubblelab::cli {

namespace fs = std::filesystem;

namespace {

/// Problems with input data or the environment, as opposed to usage errors.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::atomic<bool> g_stop{false};

extern "C" void on_signal(int) { g_stop = true; }

session::SessionConfig config_from(const std::string& path) {
  if (path.empty() || path == "default") return session::SessionConfig{};
  return session::load_config(path);
}

std::vector<session::EventRecord> log_from(const std::string& path) {
  if (!fs::exists(path)) throw DataError("no such log: " + path);
  return session::read_log(fs::path(path));
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

std::pair<std::uint64_t, std::uint64_t> parse_seed_range(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) throw CLI::ValidationError("--seeds", "expected A..B");
  try {
    const std::uint64_t a = std::stoull(text.substr(0, dots));
    const std::uint64_t b = std::stoull(text.substr(dots + 2));
    if (b < a) throw CLI::ValidationError("--seeds", "range is empty");
    return {a, b};
  } catch (const std::logic_error&) {
    throw CLI::ValidationError("--seeds", "expected A..B with integers");
  }
}

struct SimulateArgs {
  std::string config;
  std::string roster = "all-fundamentalist";
  std::uint64_t seed = 1;
  std::string seeds;
  std::string out = "simulation";
  std::string log;
  int jobs = 0;
  int ticks = agents::kDefaultTicks;
};

int simulate(const SimulateArgs& a, std::ostream& out) {
  session::SessionConfig config = config_from(a.config);
  const agents::Roster roster = agents::resolve_roster(a.roster, config.n_traders);
  auto [first, last] = a.seeds.empty() ? std::pair{a.seed, a.seed} : parse_seed_range(a.seeds);
  const std::size_t count = static_cast<std::size_t>(last - first + 1);
  const bool batch = !a.seeds.empty();
  const std::string base_id = config.session_id;

  std::vector<std::vector<session::EventRecord>> logs(count);
  std::vector<analytics::MetricsReport> reports(count);
  std::atomic<std::size_t> next{0};
  std::mutex failure_mutex;
  std::string failure;
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        session::SessionConfig c = config;
        c.session_id = base_id + "-seed-" + std::to_string(first + i);
        agents::SimulationOptions options;
        options.ticks = a.ticks;
        logs[i] = agents::run_simulation(c, roster, first + i, options);
        reports[i] = analytics::build_report(logs[i]);
      } catch (const std::exception& e) {
        std::lock_guard lock(failure_mutex);
        failure = e.what();
      }
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t jobs = std::min<std::size_t>(count, a.jobs > 0 ? static_cast<std::size_t>(a.jobs) : hw);
  std::vector<std::thread> pool;
  for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (!failure.empty()) throw DataError(failure);

  const fs::path dir(a.out);
  for (std::size_t i = 0; i < count; ++i) {
    const std::string stem = "seed-" + std::to_string(first + i);
    const fs::path log_path = !batch && !a.log.empty() ? fs::path(a.log) : dir / (stem + ".jsonl");
    write_text(log_path, session::to_jsonl(logs[i]));
    write_text(dir / (stem + ".report.json"), analytics::to_string(reports[i]));
    out << "seed " << first + i << ": " << log_path.string() << "\n";
  }
  if (batch) {
    const std::string summary = analytics::to_json(analytics::summarize(reports)).dump(2) + "\n";
    write_text(dir / "summary.json", summary);
    out << summary;
  } else {
    out << analytics::format_summary(reports.front());
  }
  return kExitOk;
}

struct ServeArgs {
  std::string config;
  std::string bind = "127.0.0.1:7400";
  std::string ws_bind;
  std::string log = "session.jsonl";
  std::vector<std::string> tokens;
  bool no_trade_broadcast = false;
  bool skip_questionnaire = false;
  double summary_seconds = 5.0;
  double join_timeout = 0.0;
};

int serve(const ServeArgs& a, std::ostream& out) {
  const session::SessionConfig config = config_from(a.config);
  protocol::ServerOptions options;
  options.bind = a.bind;
  options.ws_bind = a.ws_bind;
  options.host.tokens = a.tokens;
  options.host.broadcast_trades = !a.no_trade_broadcast;
  options.require_questionnaire = !a.skip_questionnaire;
  options.summary_seconds = a.summary_seconds;
  options.join_timeout_seconds = a.join_timeout;
  options.log_path = a.log;
  options.stop = &g_stop;
  options.on_listening = [&](unsigned short port) {
    out << "listening on port " << port << " for " << config.n_traders << " traders\n" << std::flush;
  };
  options.on_ws_listening = [&](unsigned short port) {
    out << "websocket listener on port " << port << "\n" << std::flush;
  };
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  const auto result = protocol::serve(config, options);
  out << (result.aborted ? "session aborted" : "session ended") << "; log written to " << a.log << "\n";
  return result.aborted ? kExitData : kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Laboratory asset market: live sessions, agent simulation, analysis and replay", "bubblelab"};
  app.require_subcommand(1, 1);

  ServeArgs serve_args;
  auto* serve_cmd = app.add_subcommand("serve", "Run a live session over TCP (and optionally WebSocket)");
  serve_cmd->add_option("--config", serve_args.config, "Session config file, or 'default'");
  serve_cmd->add_option("--bind", serve_args.bind, "Listen address host:port")->capture_default_str();
  serve_cmd->add_option("--ws-bind", serve_args.ws_bind, "Also accept WebSocket clients on host:port");
  serve_cmd->add_option("--log", serve_args.log, "Where to write the event log")->capture_default_str();
  serve_cmd->add_option("--tokens", serve_args.tokens, "Join token per seat, in seat order")->delimiter(',');
  serve_cmd->add_flag("--no-trade-broadcast", serve_args.no_trade_broadcast, "Tell only the two parties about a trade");
  serve_cmd->add_flag("--skip-questionnaire", serve_args.skip_questionnaire, "Start once every seat has joined");
  serve_cmd->add_option("--summary-seconds", serve_args.summary_seconds, "Pause between periods")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  serve_cmd->add_option("--join-timeout", serve_args.join_timeout, "Abort if not started after this many seconds")
      ->check(CLI::NonNegativeNumber);

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Run agent sessions");
  sim_cmd->add_option("--config", sim.config, "Session config file, or 'default'");
  sim_cmd->add_option("--roster", sim.roster, "Roster file or preset (all-fundamentalist, all-zic, speculator-majority)")
      ->capture_default_str();
  auto* seed_opt = sim_cmd->add_option("--seed", sim.seed, "Seed of a single session")->capture_default_str();
  auto* seeds_opt = sim_cmd->add_option("--seeds", sim.seeds, "Inclusive seed range A..B");
  seed_opt->excludes(seeds_opt);
  sim_cmd->add_option("--out", sim.out, "Output directory")->capture_default_str();
  sim_cmd->add_option("--log", sim.log, "Log path for a single seed")->excludes(seeds_opt);
  sim_cmd->add_option("--jobs", sim.jobs, "Worker threads (default: all cores)")->check(CLI::NonNegativeNumber);
  sim_cmd->add_option("--ticks", sim.ticks, "Decision rounds per period")->capture_default_str()->check(CLI::PositiveNumber);

  std::string log_path;
  std::string out_dir;
  bool per_trade = false;
  bool as_json = false;
  auto* analyze_cmd = app.add_subcommand("analyze", "Compute the metrics report of a log");
  analyze_cmd->add_option("--log", log_path, "Event log")->required();
  analyze_cmd->add_option("--out", out_dir, "Also write report.json here");
  analyze_cmd->add_flag("--per-trade", per_trade, "Decompose over traded units instead of trader means");
  analyze_cmd->add_flag("--json", as_json, "Print the report as JSON");

  auto* replay_cmd = app.add_subcommand("replay", "Re-execute a log and check every recorded outcome");
  replay_cmd->add_option("--log", log_path, "Event log")->required();

  auto* export_cmd = app.add_subcommand("export-figures", "Write figure1.csv, figure2.csv and trades.csv");
  export_cmd->add_option("--log", log_path, "Event log")->required();
  export_cmd->add_option("--out", out_dir, "Output directory")->required();
  export_cmd->add_flag("--per-trade", per_trade, "Decompose over traded units instead of trader means");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    err << "\n" << app.help();
    return kExitUsage;
  }

  analytics::ReportOptions report_options;
  if (per_trade) report_options.basis = analytics::DecompositionBasis::PerTrade;

  try {
    if (*serve_cmd) return serve(serve_args, out);
    if (*sim_cmd) return simulate(sim, out);
    if (*analyze_cmd) {
      const auto report = analytics::build_report(log_from(log_path), report_options);
      if (!out_dir.empty()) write_text(fs::path(out_dir) / "report.json", analytics::to_string(report));
      out << (as_json ? analytics::to_string(report) : analytics::format_summary(report));
      return kExitOk;
    }
    if (*replay_cmd) {
      const auto log = log_from(log_path);
      const auto result = session::replay(log);
      analytics::build_report(log);
      out << "replay OK\n";
      out << result.periods_settled << " periods, " << result.trades.size() << " trades, "
          << (result.ended ? "ended" : result.aborted ? "aborted" : "incomplete") << "\n";
      return kExitOk;
    }
    if (*export_cmd) {
      const auto log = log_from(log_path);
      const auto report = analytics::build_report(log, report_options);
      const fs::path dir(out_dir);
      fs::create_directories(dir);
      std::ostringstream f1, f2, trades;
      analytics::write_figure1_csv(report, f1);
      analytics::write_figure2_csv(report, f2);
      session::write_trades_csv(log, trades);
      write_text(dir / "figure1.csv", f1.str());
      write_text(dir / "figure2.csv", f2.str());
      write_text(dir / "trades.csv", trades.str());
      out << "wrote " << (dir / "figure1.csv").string() << ", " << (dir / "figure2.csv").string() << ", "
          << (dir / "trades.csv").string() << "\n";
      return kExitOk;
    }
  } catch (const session::CorruptLog& e) {
    err << "corrupt log: " << e.what() << "\n";
    return kExitData;
  } catch (const CLI::ValidationError& e) {
    err << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace bubblelab::cli
