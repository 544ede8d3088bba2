#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "bubblelab/analytics/measures.hpp"
#include "bubblelab/session/events.hpp"

namespace bubblelab::analytics {

/// Which prices enter the per-period discrepancy decomposition.
enum class DecompositionBasis {
  PerTrader,  // each trader's volume-weighted mean price, buys and sells pooled
  PerTrade,   // every traded unit
};

struct ReportOptions {
  DecompositionBasis basis = DecompositionBasis::PerTrader;
};

struct PeriodRow {
  int period = 0;
  Metric mean_price = Undefined::NoTrades;  // volume-weighted
  int trade_count = 0;
  Shares volume = 0;
  Cents intrinsic = 0;
  Cents max_present_value = 0;
  Metric mean_declared = Undefined::NoResponses;
};

struct PeriodDecomposition {
  int period = 0;
  std::map<TraderId, double> trader_means;
  Result<Decomposition> decomposition = Undefined::InsufficientTraders;
};

struct MetricsReport {
  std::string session_id;
  DecompositionBasis basis = DecompositionBasis::PerTrader;
  std::vector<PeriodRow> periods;
  Metric pooled_mean_declared = Undefined::NoResponses;
  Metric haessel_r2_trading = Undefined::NoTrades;
  Metric haessel_r2_declared = Undefined::NoResponses;
  Result<bool> declared_fits_better = Undefined::NoResponses;
  Metric napd = Undefined::NoTrades;
  Metric amplitude = Undefined::NoTrades;
  std::vector<PeriodDecomposition> decomposition;
  Metric mean_common_share = Undefined::NoTrades;    // mean over periods where it is defined
  Metric pooled_common_share = Undefined::NoTrades;  // sum of common over sum of msd
  Metric common_share_trend = Undefined::NoTrades;   // rank correlation of common share with t
  int periods_above_max_present_value = 0;
  std::map<session::ItemGroup, Metric> cronbach_alpha;
  Result<Overconfidence> overconfidence = Undefined::NoResponses;
};

/// Validates the log by replaying it (throws session::CorruptLog), then computes every measure.
MetricsReport build_report(const std::vector<session::EventRecord>& log, const ReportOptions& options = {});

/// Undefined measures serialize as null with the reason under "undefined".
nlohmann::ordered_json to_json(const MetricsReport& report);
std::string to_string(const MetricsReport& report);

/// figure1.csv: t,mean_price,intrinsic,max_pv,mean_declared
void write_figure1_csv(const MetricsReport& report, std::ostream& out);
/// figure2.csv: t,common_component,common_share
void write_figure2_csv(const MetricsReport& report, std::ostream& out);

/// Plain-text table for terminals.
std::string format_summary(const MetricsReport& report);

/// Aggregates over a batch of sessions; each mean skips sessions where the measure is undefined.
struct BatchSummary {
  int sessions = 0;
  Metric mean_haessel_r2_trading = Undefined::NoTrades;
  Metric min_haessel_r2_trading = Undefined::NoTrades;
  Metric mean_common_share = Undefined::NoTrades;
  Metric median_common_share_trend = Undefined::NoTrades;
  int sessions_above_max_present_value = 0;  // at least one period with VWAP above max PV
  Metric mean_napd = Undefined::NoTrades;
  Metric mean_amplitude = Undefined::NoTrades;
};

BatchSummary summarize(const std::vector<MetricsReport>& reports);
nlohmann::ordered_json to_json(const BatchSummary& summary);

}  // namespace bubblelab::analytics
