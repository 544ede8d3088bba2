#include "bubblelab/exchange/order.hpp"

#include <array>
#include <utility>

namespace bubblelab::exchange {

namespace {

constexpr std::array<std::pair<RejectReason, std::string_view>, 7> kRejectNames{{
    {RejectReason::InvalidPrice, "invalid_price"},
    {RejectReason::InvalidQuantity, "invalid_quantity"},
    {RejectReason::InsufficientCash, "insufficient_cash"},
    {RejectReason::InsufficientShares, "insufficient_shares"},
    {RejectReason::SelfCross, "self_cross"},
    {RejectReason::UnknownTrader, "unknown_trader"},
    {RejectReason::WrongPhase, "wrong_phase"},
}};

}  // namespace

std::string_view to_string(RejectReason r) noexcept {
  for (const auto& [reason, name] : kRejectNames)
    if (reason == r) return name;
  return "unknown";
}

std::optional<RejectReason> parse_reject_reason(std::string_view s) noexcept {
  for (const auto& [reason, name] : kRejectNames)
    if (name == s) return reason;
  return std::nullopt;
}

std::string_view to_string(CancelResult r) noexcept {
  switch (r) {
    case CancelResult::Cancelled: return "cancelled";
    case CancelResult::NotFound: return "not_found";
    case CancelResult::NotOwner: return "not_owner";
    case CancelResult::WrongPhase: return "wrong_phase";
  }
  return "unknown";
}

}  // namespace bubblelab::exchange
