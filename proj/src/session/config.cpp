#include "bubblelab/session/config.hpp"

#include <charconv>
#include <fstream>
#include <numeric>

namespace bubblelab::session {

void SessionConfig::validate() const {
  if (n_traders < 2) throw ConfigError("n_traders must be >= 2");
  if (n_periods < 1) throw ConfigError("n_periods must be >= 1");
  if (period_seconds < 1) throw ConfigError("period_seconds must be >= 1");
  if (dividend_value < 0) throw ConfigError("dividend_value must be >= 0");
  if (!dividend_prob.valid()) throw ConfigError("dividend_prob must lie in [0, 1]");
  if (endowment_shares < 0) throw ConfigError("endowment_shares must be >= 0");
  if (endowment_cash < 0) throw ConfigError("endowment_cash must be >= 0");
  if (showup_fee < 0) throw ConfigError("showup_fee must be >= 0");
  if (session_id.empty()) throw ConfigError("session_id must not be empty");
}

nlohmann::ordered_json to_json(const SessionConfig& c) {
  nlohmann::ordered_json j;
  j["n_traders"] = c.n_traders;
  j["n_periods"] = c.n_periods;
  j["period_seconds"] = c.period_seconds;
  j["dividend_value"] = c.dividend_value;
  j["dividend_prob"] = std::to_string(c.dividend_prob.num) + "/" + std::to_string(c.dividend_prob.den);
  j["endowment_shares"] = c.endowment_shares;
  j["endowment_cash"] = c.endowment_cash;
  j["showup_fee"] = c.showup_fee;
  j["rng_seed"] = c.rng_seed;
  j["session_id"] = c.session_id;
  return j;
}

namespace {

Probability parse_probability(const nlohmann::json& v) {
  if (v.is_number()) {
    try {
      return Probability::from_double(v.get<double>());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("dividend_prob: ") + e.what());
    }
  }
  if (!v.is_string()) throw ConfigError("dividend_prob must be a number or \"num/den\"");
  const auto s = v.get<std::string>();
  const auto slash = s.find('/');
  std::int64_t num = 0;
  std::int64_t den = 1;
  auto parse = [](std::string_view part, std::int64_t& out) {
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), out);
    return ec == std::errc{} && ptr == part.data() + part.size();
  };
  const std::string_view sv(s);
  const bool ok = slash == std::string::npos ? parse(sv, num)
                                             : parse(sv.substr(0, slash), num) && parse(sv.substr(slash + 1), den);
  if (!ok || den <= 0 || num < 0 || num > den) throw ConfigError("dividend_prob: bad fraction '" + s + "'");
  const auto g = std::gcd(num, den);
  return Probability{num / g, den / g};
}

template <class T>
void read_field(const nlohmann::json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("config field '") + key + "' has the wrong type");
  }
}

}  // namespace

SessionConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  SessionConfig c;
  read_field(j, "n_traders", c.n_traders);
  read_field(j, "n_periods", c.n_periods);
  read_field(j, "period_seconds", c.period_seconds);
  read_field(j, "dividend_value", c.dividend_value);
  if (j.contains("dividend_prob")) c.dividend_prob = parse_probability(j.at("dividend_prob"));
  read_field(j, "endowment_shares", c.endowment_shares);
  read_field(j, "endowment_cash", c.endowment_cash);
  read_field(j, "showup_fee", c.showup_fee);
  read_field(j, "rng_seed", c.rng_seed);
  read_field(j, "session_id", c.session_id);
  c.validate();
  return c;
}

SessionConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

}  // namespace bubblelab::session
