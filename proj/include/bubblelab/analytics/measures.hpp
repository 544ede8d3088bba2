#pragma once

#include <map>
#include <span>
#include <vector>

#include "bubblelab/analytics/result.hpp"
#include "bubblelab/common/types.hpp"
#include "bubblelab/session/questionnaire.hpp"

namespace bubblelab::analytics {

/// A trade reduced to what the price measures need.
struct PricedTrade {
  int period = 0;  // 1-based
  Cents price = 0;
  Shares quantity = 1;
  TraderId buyer_id = 0;
  TraderId seller_id = 0;
};

/// Haessel's goodness of fit: the squared sample correlation between an
/// observed series and a reference series. Throws std::invalid_argument when
/// the lengths differ or are below 2; undefined when either series is constant.
Metric haessel_r2(std::span<const double> observed, std::span<const double> reference);

/// Spearman rank correlation with average ranks for ties.
Metric rank_correlation(std::span<const double> x, std::span<const double> y);

struct Decomposition {
  double mean = 0.0;        // cross-sectional mean of the prices
  double fundamental = 0.0;
  double dispersion = 0.0;  // mean squared distance from the cross-sectional mean
  double common = 0.0;      // squared distance of the mean from the fundamental
  double msd = 0.0;         // mean squared distance from the fundamental
  Metric common_share = Undefined::DegenerateVariance;  // common / msd, when msd > 0
};

/// Splits the mean squared price discrepancy into a dispersion and a common
/// component. Needs at least two prices.
Result<Decomposition> decompose(std::span<const double> prices, double fundamental);

/// Volume-weighted mean price per trader over both sides of their trades.
std::map<TraderId, double> trader_mean_prices(std::span<const PricedTrade> trades);

/// Quantity-weighted mean absolute deviation of trade prices from the
/// fundamental of their period, divided by the mean fundamental over all
/// periods. `fundamentals[t - 1]` is the fundamental of period t.
Metric napd(std::span<const PricedTrade> trades, std::span<const Cents> fundamentals);

struct PeriodPoint {
  int period = 0;
  Result<double> mean_price = Undefined::NoTrades;  // volume-weighted
  double fundamental = 0.0;
};

/// Range of the per-period mean deviations from the fundamental, divided by
/// the first period's fundamental. Needs at least two periods with trades.
Metric amplitude(std::span<const PeriodPoint> series);

/// Cronbach's alpha of a respondents x items matrix, sample variances.
/// Throws std::invalid_argument for ragged rows; undefined with fewer than
/// two items, fewer than two respondents or zero total-score variance.
Metric cronbach_alpha(const std::vector<std::vector<double>>& items);

struct SignTest {
  int positive = 0;
  int negative = 0;
  int ties = 0;
  double p_value = 1.0;  // exact two-sided binomial test over the non-ties
};

SignTest sign_test(std::span<const double> differences);

struct Overconfidence {
  std::map<TraderId, double> per_trader;  // mean self rating minus mean others rating
  double pooled = 0.0;                    // mean of per-trader indices
  SignTest sign;
};

/// Undefined (MissingGroup) unless every responding trader rated at least one
/// item in each group.
Result<Overconfidence> overconfidence_index(std::span<const session::AssessmentResponse> responses);

}  // namespace bubblelab::analytics
