#include "bubblelab/analytics/report.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "bubblelab/session/replay.hpp"
#include "bubblelab/session/schedule.hpp"

namespace bubblelab::analytics {

using nlohmann::ordered_json;

namespace {

std::string number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string cell(const Metric& m) { return m ? number(*m) : std::string(); }

Metric mean_of(const std::vector<double>& xs, Undefined empty) {
  if (xs.empty()) return empty;
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

std::vector<PricedTrade> priced(const std::vector<exchange::Trade>& trades) {
  std::vector<PricedTrade> out;
  out.reserve(trades.size());
  for (const auto& t : trades) out.push_back({t.period, t.price, t.quantity, t.buyer_id, t.seller_id});
  return out;
}

std::vector<std::vector<double>> item_matrix(const std::vector<session::AssessmentResponse>& responses,
                                             session::ItemGroup group) {
  std::map<std::string, int> columns;
  std::map<TraderId, std::map<std::string, double>> by_trader;
  for (const auto& r : responses) {
    if (r.item_group != group) continue;
    columns.emplace(r.item_id, 0);
    by_trader[r.trader_id][r.item_id] = r.rating;
  }
  std::vector<std::vector<double>> rows;
  for (const auto& [trader, items] : by_trader) {
    if (items.size() != columns.size()) continue;  // complete cases only
    std::vector<double> row;
    for (const auto& [item, _] : columns) row.push_back(items.at(item));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string_view basis_name(DecompositionBasis b) {
  return b == DecompositionBasis::PerTrader ? "per_trader" : "per_trade";
}

}  // namespace

MetricsReport build_report(const std::vector<session::EventRecord>& log, const ReportOptions& options) {
  const session::ReplayResult replayed = session::replay(log);
  const session::SessionConfig& config = replayed.config;
  const int n_periods = config.n_periods;

  MetricsReport report;
  report.session_id = config.session_id;
  report.basis = options.basis;

  const auto trades = priced(replayed.trades);
  std::vector<std::vector<PricedTrade>> by_period(n_periods + 1);
  for (const auto& t : trades) by_period.at(t.period).push_back(t);

  std::vector<Cents> fundamentals;
  for (int t = 1; t <= n_periods; ++t) fundamentals.push_back(session::intrinsic_value(config, t));

  std::vector<double> all_declared;
  for (int t = 1; t <= n_periods; ++t) {
    PeriodRow row;
    row.period = t;
    row.intrinsic = fundamentals[t - 1];
    row.max_present_value = session::max_present_value(config, t);
    row.trade_count = static_cast<int>(by_period[t].size());
    double value = 0.0;
    for (const auto& tr : by_period[t]) {
      row.volume += tr.quantity;
      value += static_cast<double>(tr.price) * static_cast<double>(tr.quantity);
    }
    if (row.volume > 0) row.mean_price = value / static_cast<double>(row.volume);

    std::vector<double> declared;
    for (const auto& d : replayed.declared) {
      if (static_cast<int>(d.declared_value_per_period.size()) >= t) {
        declared.push_back(static_cast<double>(d.declared_value_per_period[t - 1]));
      }
    }
    all_declared.insert(all_declared.end(), declared.begin(), declared.end());
    row.mean_declared = mean_of(declared, Undefined::NoResponses);
    if (row.mean_price && *row.mean_price > static_cast<double>(row.max_present_value)) {
      ++report.periods_above_max_present_value;
    }
    report.periods.push_back(row);
  }
  report.pooled_mean_declared = mean_of(all_declared, Undefined::NoResponses);

  {
    std::vector<double> p, f;
    for (const auto& row : report.periods) {
      if (!row.mean_price) continue;
      p.push_back(*row.mean_price);
      f.push_back(static_cast<double>(row.intrinsic));
    }
    if (p.empty()) report.haessel_r2_trading = Undefined::NoTrades;
    else if (p.size() < 2) report.haessel_r2_trading = Undefined::InsufficientPeriods;
    else report.haessel_r2_trading = haessel_r2(p, f);
  }
  {
    std::vector<double> d, f;
    for (const auto& row : report.periods) {
      if (!row.mean_declared) continue;
      d.push_back(*row.mean_declared);
      f.push_back(static_cast<double>(row.intrinsic));
    }
    if (d.empty()) report.haessel_r2_declared = Undefined::NoResponses;
    else if (d.size() < 2) report.haessel_r2_declared = Undefined::InsufficientPeriods;
    else report.haessel_r2_declared = haessel_r2(d, f);
  }
  if (!report.haessel_r2_declared) report.declared_fits_better = report.haessel_r2_declared.reason();
  else if (!report.haessel_r2_trading) report.declared_fits_better = report.haessel_r2_trading.reason();
  else report.declared_fits_better = *report.haessel_r2_declared > *report.haessel_r2_trading;

  report.napd = napd(trades, fundamentals);

  {
    std::vector<PeriodPoint> series;
    for (const auto& row : report.periods) {
      series.push_back({row.period, row.mean_price, static_cast<double>(row.intrinsic)});
    }
    report.amplitude = amplitude(series);
  }

  std::vector<double> shares, share_periods;
  double sum_common = 0.0, sum_msd = 0.0;
  bool any_decomposed = false;
  for (int t = 1; t <= n_periods; ++t) {
    PeriodDecomposition pd;
    pd.period = t;
    pd.trader_means = trader_mean_prices(by_period[t]);
    std::vector<double> prices;
    if (options.basis == DecompositionBasis::PerTrader) {
      for (const auto& [_, x] : pd.trader_means) prices.push_back(x);
      pd.decomposition = decompose(prices, static_cast<double>(fundamentals[t - 1]));
    } else {
      for (const auto& tr : by_period[t]) {
        for (Shares q = 0; q < tr.quantity; ++q) prices.push_back(static_cast<double>(tr.price));
      }
      pd.decomposition = prices.size() < 2 ? Result<Decomposition>(Undefined::NoTrades)
                                           : decompose(prices, static_cast<double>(fundamentals[t - 1]));
    }
    if (pd.decomposition) {
      any_decomposed = true;
      sum_common += pd.decomposition->common;
      sum_msd += pd.decomposition->msd;
      if (pd.decomposition->common_share) {
        shares.push_back(*pd.decomposition->common_share);
        share_periods.push_back(t);
      }
    }
    report.decomposition.push_back(std::move(pd));
  }
  const Undefined no_decomposition = trades.empty() ? Undefined::NoTrades : Undefined::InsufficientTraders;
  report.mean_common_share = shares.empty() ? Metric(any_decomposed ? Undefined::DegenerateVariance : no_decomposition)
                                            : mean_of(shares, Undefined::NoTrades);
  if (!any_decomposed) report.pooled_common_share = no_decomposition;
  else if (sum_msd <= 0.0) report.pooled_common_share = Undefined::DegenerateVariance;
  else report.pooled_common_share = std::clamp(sum_common / sum_msd, 0.0, 1.0);
  if (shares.size() >= 2) report.common_share_trend = rank_correlation(shares, share_periods);
  else report.common_share_trend = shares.empty() ? report.mean_common_share.reason() : Undefined::InsufficientPeriods;

  for (auto group : {session::ItemGroup::SelfPrecision, session::ItemGroup::OthersPrecision}) {
    const auto rows = item_matrix(replayed.assessments, group);
    report.cronbach_alpha.emplace(group, rows.empty() ? Metric(Undefined::NoResponses) : cronbach_alpha(rows));
  }
  report.overconfidence = replayed.assessments.empty() ? Result<Overconfidence>(Undefined::NoResponses)
                                                       : overconfidence_index(replayed.assessments);
  return report;
}

namespace {

struct Writer {
  ordered_json undefined = ordered_json::object();

  ordered_json metric(const std::string& path, const Metric& m) {
    if (m) return *m;
    undefined[path] = std::string(to_string(m.reason()));
    return nullptr;
  }
};

}  // namespace

ordered_json to_json(const MetricsReport& r) {
  Writer w;
  ordered_json j;
  j["session_id"] = r.session_id;
  j["decomposition_basis"] = std::string(basis_name(r.basis));

  ordered_json periods = ordered_json::array();
  for (const auto& row : r.periods) {
    const std::string at = "periods[" + std::to_string(row.period) + "].";
    ordered_json p;
    p["t"] = row.period;
    p["mean_price"] = w.metric(at + "mean_price", row.mean_price);
    p["trade_count"] = row.trade_count;
    p["volume"] = row.volume;
    p["intrinsic"] = row.intrinsic;
    p["max_pv"] = row.max_present_value;
    p["mean_declared"] = w.metric(at + "mean_declared", row.mean_declared);
    periods.push_back(std::move(p));
  }
  j["periods"] = std::move(periods);
  j["pooled_mean_declared"] = w.metric("pooled_mean_declared", r.pooled_mean_declared);
  j["haessel_r2_trading"] = w.metric("haessel_r2_trading", r.haessel_r2_trading);
  j["haessel_r2_declared"] = w.metric("haessel_r2_declared", r.haessel_r2_declared);
  if (r.declared_fits_better) {
    j["declared_fits_better"] = *r.declared_fits_better;
  } else {
    j["declared_fits_better"] = nullptr;
    w.undefined["declared_fits_better"] = std::string(to_string(r.declared_fits_better.reason()));
  }
  j["napd"] = w.metric("napd", r.napd);
  j["amplitude"] = w.metric("amplitude", r.amplitude);
  j["periods_above_max_pv"] = r.periods_above_max_present_value;

  ordered_json decomposition = ordered_json::array();
  for (const auto& pd : r.decomposition) {
    const std::string at = "decomposition[" + std::to_string(pd.period) + "].";
    ordered_json d;
    d["t"] = pd.period;
    ordered_json means = ordered_json::object();
    for (const auto& [trader, x] : pd.trader_means) means[std::to_string(trader)] = x;
    d["trader_means"] = std::move(means);
    if (pd.decomposition) {
      d["mean"] = pd.decomposition->mean;
      d["dispersion"] = pd.decomposition->dispersion;
      d["common"] = pd.decomposition->common;
      d["msd"] = pd.decomposition->msd;
      d["common_share"] = w.metric(at + "common_share", pd.decomposition->common_share);
    } else {
      for (const char* k : {"mean", "dispersion", "common", "msd", "common_share"}) d[k] = nullptr;
      w.undefined[at.substr(0, at.size() - 1)] = std::string(to_string(pd.decomposition.reason()));
    }
    decomposition.push_back(std::move(d));
  }
  j["decomposition"] = std::move(decomposition);
  j["mean_common_share"] = w.metric("mean_common_share", r.mean_common_share);
  j["pooled_common_share"] = w.metric("pooled_common_share", r.pooled_common_share);
  j["common_share_trend"] = w.metric("common_share_trend", r.common_share_trend);

  ordered_json alpha = ordered_json::object();
  for (const auto& [group, m] : r.cronbach_alpha) {
    const std::string name(session::to_string(group));
    alpha[name] = w.metric("cronbach_alpha." + name, m);
  }
  j["cronbach_alpha"] = std::move(alpha);

  if (r.overconfidence) {
    ordered_json oc;
    ordered_json per = ordered_json::object();
    for (const auto& [trader, v] : r.overconfidence->per_trader) per[std::to_string(trader)] = v;
    oc["per_trader"] = std::move(per);
    oc["pooled"] = r.overconfidence->pooled;
    oc["sign_test"] = {{"positive", r.overconfidence->sign.positive},
                       {"negative", r.overconfidence->sign.negative},
                       {"ties", r.overconfidence->sign.ties},
                       {"p_value", r.overconfidence->sign.p_value}};
    j["overconfidence"] = std::move(oc);
  } else {
    j["overconfidence"] = nullptr;
    w.undefined["overconfidence"] = std::string(to_string(r.overconfidence.reason()));
  }
  j["undefined"] = std::move(w.undefined);
  return j;
}

std::string to_string(const MetricsReport& report) { return to_json(report).dump(2) + "\n"; }

void write_figure1_csv(const MetricsReport& report, std::ostream& out) {
  out << "t,mean_price,intrinsic,max_pv,mean_declared\n";
  for (const auto& row : report.periods) {
    out << row.period << ',' << cell(row.mean_price) << ',' << row.intrinsic << ',' << row.max_present_value << ','
        << cell(row.mean_declared) << '\n';
  }
}

void write_figure2_csv(const MetricsReport& report, std::ostream& out) {
  out << "t,common_component,common_share\n";
  for (const auto& pd : report.decomposition) {
    out << pd.period << ',';
    if (pd.decomposition) out << number(pd.decomposition->common) << ',' << cell(pd.decomposition->common_share);
    else out << ',';
    out << '\n';
  }
}

std::string format_summary(const MetricsReport& r) {
  auto fixed = [](const Metric& m, int precision) {
    if (!m) return std::string("-");
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*f", precision, *m);
    return std::string(buf);
  };
  auto value = [&](const Metric& m) {
    return m ? fixed(m, 4) : "undefined (" + std::string(to_string(m.reason())) + ")";
  };
  std::ostringstream out;
  out << "session " << r.session_id << "\n\n";
  out << "   t  trades  mean_price  intrinsic  max_pv  declared  common_share\n";
  for (std::size_t i = 0; i < r.periods.size(); ++i) {
    const auto& row = r.periods[i];
    const auto& pd = r.decomposition[i].decomposition;
    const Metric share = pd ? pd->common_share : Metric(pd.reason());
    char line[160];
    std::snprintf(line, sizeof line, "%4d  %6d  %10s  %9lld  %6lld  %8s  %12s\n", row.period, row.trade_count,
                  fixed(row.mean_price, 2).c_str(), static_cast<long long>(row.intrinsic),
                  static_cast<long long>(row.max_present_value), fixed(row.mean_declared, 2).c_str(),
                  fixed(share, 4).c_str());
    out << line;
  }
  auto line = [&](std::string_view name, const std::string& text) {
    out << "  " << name << std::string(name.size() < 32 ? 32 - name.size() : 1, ' ') << text << "\n";
  };
  out << "\n";
  line("haessel_r2_trading", value(r.haessel_r2_trading));
  line("haessel_r2_declared", value(r.haessel_r2_declared));
  line("declared_fits_better", r.declared_fits_better ? (*r.declared_fits_better ? "yes" : "no")
                                                      : value(Metric(r.declared_fits_better.reason())));
  line("napd", value(r.napd));
  line("amplitude", value(r.amplitude));
  line("periods_above_max_pv", std::to_string(r.periods_above_max_present_value));
  line("mean_common_share", value(r.mean_common_share));
  line("pooled_common_share", value(r.pooled_common_share));
  line("common_share_trend", value(r.common_share_trend));
  for (const auto& [group, m] : r.cronbach_alpha) {
    line("cronbach_alpha " + std::string(session::to_string(group)), value(m));
  }
  line("overconfidence", value(r.overconfidence ? Metric(r.overconfidence->pooled) : Metric(r.overconfidence.reason())));
  return out.str();
}

namespace {

template <class Get>
std::vector<double> defined(const std::vector<MetricsReport>& reports, Get get) {
  std::vector<double> xs;
  for (const auto& r : reports) {
    const Metric m = get(r);
    if (m) xs.push_back(*m);
  }
  return xs;
}

Metric median(std::vector<double> xs) {
  if (xs.empty()) return Undefined::NoTrades;
  std::ranges::sort(xs);
  const std::size_t n = xs.size();
  return n % 2 == 1 ? xs[n / 2] : (xs[n / 2 - 1] + xs[n / 2]) / 2.0;
}

}  // namespace

BatchSummary summarize(const std::vector<MetricsReport>& reports) {
  BatchSummary s;
  s.sessions = static_cast<int>(reports.size());
  const auto r2 = defined(reports, [](const MetricsReport& r) { return r.haessel_r2_trading; });
  s.mean_haessel_r2_trading = mean_of(r2, Undefined::NoTrades);
  if (!r2.empty()) s.min_haessel_r2_trading = *std::ranges::min_element(r2);
  s.mean_common_share =
      mean_of(defined(reports, [](const MetricsReport& r) { return r.mean_common_share; }), Undefined::NoTrades);
  s.median_common_share_trend = median(defined(reports, [](const MetricsReport& r) { return r.common_share_trend; }));
  for (const auto& r : reports) {
    if (r.periods_above_max_present_value > 0) ++s.sessions_above_max_present_value;
  }
  s.mean_napd = mean_of(defined(reports, [](const MetricsReport& r) { return r.napd; }), Undefined::NoTrades);
  s.mean_amplitude = mean_of(defined(reports, [](const MetricsReport& r) { return r.amplitude; }), Undefined::NoTrades);
  return s;
}

ordered_json to_json(const BatchSummary& s) {
  Writer w;
  ordered_json j;
  j["sessions"] = s.sessions;
  j["mean_haessel_r2_trading"] = w.metric("mean_haessel_r2_trading", s.mean_haessel_r2_trading);
  j["min_haessel_r2_trading"] = w.metric("min_haessel_r2_trading", s.min_haessel_r2_trading);
  j["mean_common_share"] = w.metric("mean_common_share", s.mean_common_share);
  j["median_common_share_trend"] = w.metric("median_common_share_trend", s.median_common_share_trend);
  j["sessions_above_max_pv"] = s.sessions_above_max_present_value;
  j["mean_napd"] = w.metric("mean_napd", s.mean_napd);
  j["mean_amplitude"] = w.metric("mean_amplitude", s.mean_amplitude);
  j["undefined"] = std::move(w.undefined);
  return j;
}

}  // namespace bubblelab::analytics
