#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

namespace bubblelab {

/// Money is always integer cents.
using Cents = std::int64_t;
using Shares = std::int64_t;

/// Seats are numbered 1..n_traders.
using TraderId = std::int32_t;
using OrderId = std::int64_t;
using TradeId = std::int64_t;
using Seq = std::uint64_t;

enum class Side { Bid, Ask };

constexpr Side opposite(Side s) noexcept { return s == Side::Bid ? Side::Ask : Side::Bid; }

constexpr std::string_view to_string(Side s) noexcept { return s == Side::Bid ? "BID" : "ASK"; }

constexpr std::optional<Side> parse_side(std::string_view s) noexcept {
  if (s == "BID") return Side::Bid;
  if (s == "ASK") return Side::Ask;
  return std::nullopt;
}

}  // namespace bubblelab
