#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

namespace bubblelab::analytics {

/// Why a measure has no value. Undefined measures are reported as such, never as 0.
enum class Undefined {
  DegenerateSeries,
  NoTrades,
  InsufficientPeriods,
  InsufficientTraders,
  InsufficientItems,
  DegenerateVariance,
  MissingGroup,
  NoResponses,
};

constexpr std::string_view to_string(Undefined u) noexcept {
  switch (u) {
    case Undefined::DegenerateSeries: return "degenerate_series";
    case Undefined::NoTrades: return "no_trades";
    case Undefined::InsufficientPeriods: return "insufficient_periods";
    case Undefined::InsufficientTraders: return "insufficient_traders";
    case Undefined::InsufficientItems: return "insufficient_items";
    case Undefined::DegenerateVariance: return "degenerate_variance";
    case Undefined::MissingGroup: return "missing_group";
    case Undefined::NoResponses: return "no_responses";
  }
  return "undefined";
}

/// A value or the reason it is undefined.
template <class T>
class Result {
 public:
  Result(T value) : state_(std::move(value)) {}  // NOLINT: implicit by design of call sites
  Result(Undefined reason) : state_(reason) {}   // NOLINT

  bool defined() const noexcept { return std::holds_alternative<T>(state_); }
  explicit operator bool() const noexcept { return defined(); }

  const T& value() const {
    if (!defined()) throw std::logic_error("undefined measure: " + std::string(to_string(reason())));
    return std::get<T>(state_);
  }
  const T& operator*() const { return value(); }
  const T* operator->() const { return &value(); }
  Undefined reason() const { return std::get<Undefined>(state_); }

  friend bool operator==(const Result&, const Result&) = default;

 private:
  std::variant<T, Undefined> state_;
};

using Metric = Result<double>;

}  // namespace bubblelab::analytics
