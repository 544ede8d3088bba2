#include "bubblelab/analytics/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace bubblelab::analytics {

namespace {

double mean(std::span<const double> xs) { return std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size(); }

bool constant(std::span<const double> xs) {
  const auto [lo, hi] = std::ranges::minmax(xs);
  return lo == hi;
}

/// Sample variance, n - 1 denominator.
double sample_variance(std::span<const double> xs) {
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return ss / static_cast<double>(xs.size() - 1);
}

std::vector<double> average_ranks(std::span<const double> xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  std::ranges::stable_sort(order, [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(xs.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

void require_pair(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("series lengths differ");
  if (x.size() < 2) throw std::invalid_argument("series need at least two points");
}

}  // namespace

Metric haessel_r2(std::span<const double> observed, std::span<const double> reference) {
  require_pair(observed, reference);
  if (constant(observed) || constant(reference)) return Undefined::DegenerateSeries;
  const double r = pearson(observed, reference);
  return std::clamp(r * r, 0.0, 1.0);
}

Metric rank_correlation(std::span<const double> x, std::span<const double> y) {
  require_pair(x, y);
  if (constant(x) || constant(y)) return Undefined::DegenerateSeries;
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return std::clamp(pearson(rx, ry), -1.0, 1.0);
}

Result<Decomposition> decompose(std::span<const double> prices, double fundamental) {
  if (prices.size() < 2) return Undefined::InsufficientTraders;
  Decomposition d;
  d.fundamental = fundamental;
  d.mean = mean(prices);
  const double n = static_cast<double>(prices.size());
  for (double x : prices) d.dispersion += (x - d.mean) * (x - d.mean);
  d.dispersion /= n;
  d.common = (d.mean - fundamental) * (d.mean - fundamental);
  for (double x : prices) d.msd += (x - fundamental) * (x - fundamental);
  d.msd /= n;
  if (d.msd > 0.0) d.common_share = std::clamp(d.common / d.msd, 0.0, 1.0);
  return d;
}

std::map<TraderId, double> trader_mean_prices(std::span<const PricedTrade> trades) {
  std::map<TraderId, std::pair<double, double>> acc;  // value, volume
  for (const auto& t : trades) {
    for (TraderId id : {t.buyer_id, t.seller_id}) {
      acc[id].first += static_cast<double>(t.price) * static_cast<double>(t.quantity);
      acc[id].second += static_cast<double>(t.quantity);
    }
  }
  std::map<TraderId, double> out;
  for (const auto& [id, vv] : acc) out[id] = vv.first / vv.second;
  return out;
}

Metric napd(std::span<const PricedTrade> trades, std::span<const Cents> fundamentals) {
  if (trades.empty()) return Undefined::NoTrades;
  if (fundamentals.empty()) throw std::invalid_argument("napd: empty fundamental schedule");
  const double mean_f =
      static_cast<double>(std::accumulate(fundamentals.begin(), fundamentals.end(), Cents{0})) /
      static_cast<double>(fundamentals.size());
  if (mean_f <= 0.0) return Undefined::DegenerateSeries;
  double deviation = 0.0;
  double volume = 0.0;
  for (const auto& t : trades) {
    if (t.period < 1 || static_cast<std::size_t>(t.period) > fundamentals.size())
      throw std::invalid_argument("napd: trade period outside the schedule");
    const auto f = fundamentals[static_cast<std::size_t>(t.period - 1)];
    deviation += static_cast<double>(t.quantity) * std::abs(static_cast<double>(t.price - f));
    volume += static_cast<double>(t.quantity);
  }
  return deviation / (volume * mean_f);
}

Metric amplitude(std::span<const PeriodPoint> series) {
  if (series.empty()) return Undefined::InsufficientPeriods;
  std::vector<double> deviations;
  for (const auto& p : series)
    if (p.mean_price) deviations.push_back(*p.mean_price - p.fundamental);
  if (deviations.size() < 2) return Undefined::InsufficientPeriods;
  const double f1 = series.front().fundamental;
  if (f1 <= 0.0) return Undefined::DegenerateSeries;
  const auto [lo, hi] = std::ranges::minmax(deviations);
  return (hi - lo) / f1;
}

Metric cronbach_alpha(const std::vector<std::vector<double>>& items) {
  if (items.empty()) return Undefined::DegenerateVariance;
  const std::size_t k = items.front().size();
  for (const auto& row : items)
    if (row.size() != k) throw std::invalid_argument("cronbach_alpha: ragged item matrix");
  if (k < 2) return Undefined::InsufficientItems;
  if (items.size() < 2) return Undefined::DegenerateVariance;

  std::vector<double> totals;
  for (const auto& row : items) totals.push_back(std::accumulate(row.begin(), row.end(), 0.0));
  if (constant(totals)) return Undefined::DegenerateVariance;
  const double total_var = sample_variance(totals);

  double item_var_sum = 0.0;
  std::vector<double> column(items.size());
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t i = 0; i < items.size(); ++i) column[i] = items[i][j];
    item_var_sum += sample_variance(column);
  }
  const double kk = static_cast<double>(k);
  return kk / (kk - 1.0) * (1.0 - item_var_sum / total_var);
}

SignTest sign_test(std::span<const double> differences) {
  SignTest s;
  for (double d : differences) {
    if (d > 0) ++s.positive;
    else if (d < 0) ++s.negative;
    else ++s.ties;
  }
  const int n = s.positive + s.negative;
  if (n == 0) return s;
  const int k = std::min(s.positive, s.negative);
  double tail = 0.0;
  for (int i = 0; i <= k; ++i)
    tail += std::exp(std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) - n * std::log(2.0));
  s.p_value = std::min(1.0, 2.0 * tail);
  return s;
}

Result<Overconfidence> overconfidence_index(std::span<const session::AssessmentResponse> responses) {
  struct Sums {
    double self = 0, others = 0;
    int n_self = 0, n_others = 0;
  };
  std::map<TraderId, Sums> by_trader;
  for (const auto& r : responses) {
    auto& s = by_trader[r.trader_id];
    if (r.item_group == session::ItemGroup::SelfPrecision) {
      s.self += r.rating;
      ++s.n_self;
    } else {
      s.others += r.rating;
      ++s.n_others;
    }
  }
  if (by_trader.empty()) return Undefined::MissingGroup;
  Overconfidence oc;
  std::vector<double> diffs;
  for (const auto& [id, s] : by_trader) {
    if (s.n_self == 0 || s.n_others == 0) return Undefined::MissingGroup;
    const double d = s.self / s.n_self - s.others / s.n_others;
    oc.per_trader[id] = d;
    diffs.push_back(d);
  }
  oc.pooled = mean(diffs);
  oc.sign = sign_test(diffs);
  return oc;
}

}  // namespace bubblelab::analytics
