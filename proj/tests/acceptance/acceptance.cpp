// One line per acceptance criterion: PASS/FAIL, name, detail, elapsed time.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <future>
#include <random>
#include <string>
#include <vector>

#include "bubblelab/agents/simulation.hpp"
#include "bubblelab/analytics/measures.hpp"
#include "bubblelab/analytics/report.hpp"
#include "bubblelab/exchange/order_book.hpp"
#include "bubblelab/session/replay.hpp"
#include "bubblelab/session/schedule.hpp"
#include "bubblelab/session/scripted.hpp"
#include "support/golden.hpp"
#include "support/loopback_session.hpp"
#include "support/random_orders.hpp"
#include "support/reference_matcher.hpp"

using namespace bubblelab;
using Clock = std::chrono::steady_clock;

namespace {

// Pinned limits.
constexpr double kScheduleBudgetMs = 1.0;
constexpr int kMatcherSequences = 10'000;
constexpr int kMatcherMaxOrders = 20;
constexpr int kMatcherTraders = 4;
constexpr double kMatcherBudgetS = 10.0;
constexpr int kConservationSessions = 100;
constexpr double kConservationBudgetS = 30.0;
constexpr int kDecompositionCases = 10'000;
constexpr double kDecompositionRelTol = 1e-9;
constexpr double kWorkedExampleTol = 1e-6;
constexpr int kHaesselCases = 1'000;
constexpr double kHaesselRelTol = 1e-9;
constexpr double kCronbachTol = 1e-12;
constexpr double kReplayBudgetS = 5.0;
constexpr int kPhenomenologySeeds = 30;
constexpr double kFundamentalistMinR2 = 0.9;
constexpr double kFundamentalistMaxShare = 0.5;
constexpr double kSpeculatorAboveFraction = 0.5;
constexpr double kSpeculatorMinShare = 0.5;
constexpr double kSpeculatorMinTrend = 0.0;
constexpr double kPhenomenologyBudgetS = 120.0;
constexpr double kEndToEndBudgetS = 30.0;

struct Verdict {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void criterion(const char* name, double budget_s, const std::function<Verdict()>& body) {
  const auto start = Clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
  if (elapsed > budget_s) {
    v.pass = false;
    v.detail += " [over time budget " + std::to_string(budget_s) + " s]";
  }
  if (!v.pass) ++failures;
  std::printf("%s  %-28s %s (%.3f s)\n", v.pass ? "PASS" : "FAIL", name, v.detail.c_str(), elapsed);
  std::fflush(stdout);
}

bool rel_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", x);
  return buf;
}

Verdict schedule() {
  const session::SessionConfig c;
  for (int t = 1; t <= c.n_periods; ++t) {
    if (session::intrinsic_value(c, t) != 10 * (11 - t)) return {false, "intrinsic_value(" + std::to_string(t) + ")"};
    if (session::max_present_value(c, t) != 20 * (11 - t))
      return {false, "max_present_value(" + std::to_string(t) + ")"};
  }
  return {true, "100..10 and 200..20 cents"};
}

Verdict matcher() {
  Rng rng(mix_seed(20240611, 1));
  long trades = 0;
  for (int round = 0; round < kMatcherSequences; ++round) {
    const auto commands = testing::random_sequence(rng, kMatcherMaxOrders, kMatcherTraders);
    exchange::OrderBook book;
    exchange::Accounts accounts(kMatcherTraders, 400, 3);
    testing::ReferenceMatcher ref(kMatcherTraders, 400, 3);
    const auto fail = [&](const char* what) { return Verdict{false, "sequence " + std::to_string(round) + ": " + what}; };
    for (const auto& command : commands) {
      if (const auto* p = std::get_if<testing::RandomPost>(&command)) {
        const auto got = book.post(p->request, accounts);
        const auto want = ref.post(p->request.trader_id, p->request.side, p->request.price, p->request.quantity);
        if (got.accepted() != want.accepted || got.reject != want.reject || got.order_id != want.order_id)
          return fail("acceptance differs");
        if (got.trades.size() != want.fills.size()) return fail("trade count differs");
        for (std::size_t i = 0; i < got.trades.size(); ++i) {
          const auto& t = got.trades[i];
          if (!(testing::RefFill{t.price, t.quantity, t.buyer_id, t.seller_id, t.resting_order_id,
                                 t.aggressor_order_id} == want.fills[i]))
            return fail("trade differs");
        }
        trades += static_cast<long>(got.trades.size());
      } else {
        const auto& c = std::get<testing::RandomCancel>(command);
        if (book.cancel(c.trader, c.order_id) != ref.cancel(c.trader, c.order_id)) return fail("cancel differs");
      }
      for (const auto& [id, acc] : accounts)
        if (acc.cash != ref.accounts().at(id).cash || acc.shares != ref.accounts().at(id).shares)
          return fail("accounts differ");
    }
  }
  return {true, std::to_string(kMatcherSequences) + " sequences, " + std::to_string(trades) + " trades identical"};
}

Verdict conservation() {
  const session::SessionConfig c;
  const char* presets[] = {"all-fundamentalist", "all-zic", "speculator-majority"};
  std::vector<std::future<std::string>> jobs;
  for (int i = 0; i < kConservationSessions; ++i) {
    jobs.push_back(std::async(std::launch::async, [&c, &presets, i]() -> std::string {
      const auto seed = static_cast<std::uint64_t>(1000 + i);
      const auto log = agents::run_simulation(c, agents::preset_roster(presets[i % 3], c.n_traders), seed);
      const auto rep = session::replay(log);
      const Shares shares = c.n_traders * c.endowment_shares;
      if (rep.accounts.total_shares() != shares) return "shares changed";
      // dividends read straight from the log
      Cents dividends = 0;
      for (const auto& rec : log)
        if (rec.kind == session::EventKind::Dividend) dividends += rec.payload.at("dividend_per_share").get<Cents>() * shares;
      Cents payouts = 0;
      for (const auto& [id, p] : rep.payouts) payouts += p;
      if (static_cast<int>(rep.payouts.size()) != c.n_traders) return "missing payouts";
      if (payouts != c.n_traders * c.endowment_cash + dividends + c.n_traders * c.showup_fee)
        return "payouts " + std::to_string(payouts) + " != endowments + dividends + fees";
      return {};
    }));
  }
  for (int i = 0; i < kConservationSessions; ++i) {
    auto problem = jobs[i].get();
    if (!problem.empty()) return {false, "session " + std::to_string(i) + ": " + problem};
  }
  return {true, std::to_string(kConservationSessions) + " sessions, exact"};
}

Verdict decomposition() {
  {
    const std::vector<double> p{90, 100, 110};
    const auto d = analytics::decompose(p, 80);
    if (!d) return {false, "worked example undefined"};
    if (std::abs(d->dispersion - 200.0 / 3.0) > kWorkedExampleTol * 100 ||
        std::abs(d->common - 400.0) > kWorkedExampleTol * 100)
      return {false, "worked example gave (" + fmt(d->dispersion) + ", " + fmt(d->common) + ")"};
    if (std::abs(d->dispersion - 66.67) > 0.005) return {false, "worked example dispersion"};
  }
  std::mt19937_64 rng(4242);
  std::uniform_int_distribution<int> len(2, 12);
  std::uniform_real_distribution<double> price(0, 500), fundamental(0, 200);
  for (int c = 0; c < kDecompositionCases; ++c) {
    std::vector<double> p(len(rng));
    for (auto& x : p) x = price(rng);
    const double f = fundamental(rng);
    const auto d = analytics::decompose(p, f);
    if (!d) return {false, "case " + std::to_string(c) + " undefined"};
    double m = 0, msd = 0, disp = 0;
    for (double x : p) m += x;
    m /= static_cast<double>(p.size());
    for (double x : p) {
      msd += (x - f) * (x - f);
      disp += (x - m) * (x - m);
    }
    msd /= static_cast<double>(p.size());
    disp /= static_cast<double>(p.size());
    if (!rel_close(d->msd, d->dispersion + d->common, kDecompositionRelTol)) return {false, "identity broken"};
    if (!rel_close(d->msd, msd, kDecompositionRelTol) || !rel_close(d->dispersion, disp, kDecompositionRelTol) ||
        !rel_close(d->common, (m - f) * (m - f), kDecompositionRelTol))
      return {false, "case " + std::to_string(c) + " disagrees with oracle"};
  }
  return {true, "example (66.67, 400); identity on " + std::to_string(kDecompositionCases) + " cases"};
}

double squared_correlation(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy * sxy / (sxx * syy);
}

Verdict metric_oracles() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-100, 100), scale(0.01, 50);
  std::uniform_int_distribution<int> len(3, 30);
  for (int c = 0; c < kHaesselCases; ++c) {
    std::vector<double> x(len(rng)), y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = u(rng);
      y[i] = 0.5 * x[i] + u(rng);
    }
    const double base = *analytics::haessel_r2(y, x);
    if (!rel_close(base, squared_correlation(y, x), kHaesselRelTol)) return {false, "haessel oracle mismatch"};
    const double a = scale(rng) * (c % 2 ? -1 : 1), b = u(rng), a2 = scale(rng), b2 = u(rng);
    std::vector<double> ty(y.size()), tx(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      ty[i] = a * y[i] + b;
      tx[i] = a2 * x[i] + b2;
    }
    if (!rel_close(*analytics::haessel_r2(ty, x), base, kHaesselRelTol) ||
        !rel_close(*analytics::haessel_r2(y, tx), base, kHaesselRelTol))
      return {false, "haessel not affine invariant in case " + std::to_string(c)};
  }

  std::uniform_int_distribution<int> likert(1, 7), items(2, 5), respondents(3, 20);
  for (int c = 0; c < 200; ++c) {
    std::vector<std::vector<double>> m(respondents(rng));
    const int k = items(rng);
    for (auto& row : m) row.assign(k, likert(rng));
    if (m.front()[0] == m.back()[0]) m.back().assign(k, m.front()[0] == 7 ? 1 : 7);
    const auto alpha = analytics::cronbach_alpha(m);
    if (!alpha || std::abs(*alpha - 1.0) > kCronbachTol) return {false, "cronbach of duplicated items != 1"};
  }

  const session::SessionConfig cfg;
  std::vector<Cents> f;
  for (int t = 1; t <= cfg.n_periods; ++t) f.push_back(session::intrinsic_value(cfg, t));
  std::uniform_int_distribution<int> period(1, 10), offset(-3, 3), count(1, 8);
  std::uniform_real_distribution<double> dev(-5, 5);
  for (int c = 0; c < 2000; ++c) {
    const bool on = c % 2 == 0;
    std::vector<analytics::PricedTrade> trades;
    bool all_on = true;
    for (int i = count(rng); i > 0; --i) {
      const int t = period(rng);
      const Cents p = f[t - 1] + (on ? 0 : offset(rng));
      all_on = all_on && p == f[t - 1];
      trades.push_back({t, p, 1, 1, 2});
    }
    if ((*analytics::napd(trades, f) == 0.0) != all_on) return {false, "napd zero-iff broken"};
    std::vector<analytics::PeriodPoint> series;
    double first = 0;
    bool flat = true;
    for (int t = 1; t <= 10; ++t) {
      const double d = on ? 0.0 : (t == 1 ? dev(rng) : first + (t % 3 == 0 ? dev(rng) : 0.0));
      if (t == 1) first = d;
      flat = flat && d == first;
      series.push_back({t, f[t - 1] + d, static_cast<double>(f[t - 1])});
    }
    if ((*analytics::amplitude(series) == 0.0) != flat) return {false, "amplitude zero-iff broken"};
  }
  return {true, "haessel affine x" + std::to_string(kHaesselCases) + ", cronbach 1.0, napd/amplitude zero-iff"};
}

Verdict replay_determinism() {
  const auto logs = golden::logs();
  if (logs.empty()) return {false, "no golden logs"};
  for (const auto& log : logs) {
    const auto r = golden::render(log);
    if (r.accounts != golden::slurp(golden::accounts_path(log)))
      return {false, log.filename().string() + ": accounts differ"};
    if (r.report != golden::slurp(golden::report_path(log)))
      return {false, log.filename().string() + ": report differs"};
  }
  return {true, std::to_string(logs.size()) + " golden logs byte-identical"};
}

std::vector<analytics::MetricsReport> batch(const agents::Roster& roster) {
  const session::SessionConfig c;
  std::vector<std::future<analytics::MetricsReport>> jobs;
  for (int s = 1; s <= kPhenomenologySeeds; ++s)
    jobs.push_back(std::async(std::launch::async, [&c, &roster, s] {
      return analytics::build_report(agents::run_simulation(c, roster, static_cast<std::uint64_t>(s)));
    }));
  std::vector<analytics::MetricsReport> out;
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

Verdict phenomenology() {
  const session::SessionConfig c;
  const auto speculators = agents::preset_roster("speculator-majority", c.n_traders);
  int n_speculators = 0, n_fundamentalists = 0;
  for (const auto& p : speculators) {
    if (p.kind == agents::PolicyKind::AnchorSpeculator && p.anchor_weight == 0.9) ++n_speculators;
    if (p.kind == agents::PolicyKind::Fundamentalist) ++n_fundamentalists;
  }
  if (n_speculators != 5 || n_fundamentalists != 1) return {false, "speculator-majority is not 5 speculators + 1 fundamentalist"};

  const auto fund = batch(agents::preset_roster("all-fundamentalist", c.n_traders));
  double min_r2 = 1.0, fund_share = 0.0;
  for (const auto& r : fund) {
    if (!r.haessel_r2_trading || !r.mean_common_share) return {false, "fundamentalist metric undefined"};
    min_r2 = std::min(min_r2, *r.haessel_r2_trading);
    fund_share += *r.mean_common_share / kPhenomenologySeeds;
  }
  const auto speculator_reports = batch(speculators);
  int above = 0;
  double spec_share = 0.0;
  std::vector<double> trends;
  for (const auto& r : speculator_reports) {
    if (!r.mean_common_share || !r.common_share_trend) return {false, "speculator metric undefined"};
    if (r.periods_above_max_present_value > 0) ++above;
    spec_share += *r.mean_common_share / kPhenomenologySeeds;
    trends.push_back(*r.common_share_trend);
  }
  std::sort(trends.begin(), trends.end());
  const double median = (trends[trends.size() / 2] + trends[(trends.size() - 1) / 2]) / 2.0;
  const double above_fraction = static_cast<double>(above) / kPhenomenologySeeds;

  const bool a = min_r2 >= kFundamentalistMinR2 && fund_share < kFundamentalistMaxShare;
  const bool b = above_fraction >= kSpeculatorAboveFraction && spec_share > kSpeculatorMinShare &&
                 median > kSpeculatorMinTrend;
  return {a && b, "(a) min R2 " + fmt(min_r2) + ", share " + fmt(fund_share) + "; (b) above " +
                      std::to_string(above) + "/" + std::to_string(kPhenomenologySeeds) + ", share " +
                      fmt(spec_share) + ", median trend " + fmt(median)};
}

Verdict end_to_end() {
  const auto outcome = loopback::run();
  const auto replayed = session::replay(outcome.live_log);
  if (!replayed.ended) return {false, "live session did not end"};
  const auto simulated = session::run_scripted_session(outcome.config, outcome.script);
  if (session::to_jsonl(session::without_timing(outcome.live_log)) !=
      session::to_jsonl(session::without_timing(simulated)))
    return {false, "live log differs from in-process log"};
  for (const auto& p : outcome.payouts)
    if (replayed.payouts.at(p.trader_id) != p.payout) return {false, "payout differs"};
  return {true, std::to_string(outcome.live_log.size()) + " events, " +
                    std::to_string(replayed.trades.size()) + " trades, logs equal"};
}

}  // namespace

int main() {
  criterion("intrinsic-value schedule", kScheduleBudgetMs / 1000.0, schedule);
  criterion("matching-engine oracle", kMatcherBudgetS, matcher);
  criterion("conservation suite", kConservationBudgetS, conservation);
  criterion("decomposition identity", 60.0, decomposition);
  criterion("metric oracles", 60.0, metric_oracles);
  criterion("replay determinism", kReplayBudgetS, replay_determinism);
  criterion("bubble phenomenology", kPhenomenologyBudgetS, phenomenology);
  criterion("end-to-end network session", kEndToEndBudgetS, end_to_end);
  std::printf("%d failed\n", failures);
  return failures == 0 ? 0 : 1;
}
