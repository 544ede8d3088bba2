#include <doctest.h>

#include "bubblelab/exchange/order_book.hpp"
#include "support/random_orders.hpp"
#include "support/reference_matcher.hpp"

using namespace bubblelab;
using namespace bubblelab::exchange;

namespace {

constexpr TraderId A = 1;
constexpr TraderId B = 2;
constexpr TraderId C = 3;

OrderRequest bid(TraderId t, Cents p, Shares q = 1) { return {t, Side::Bid, p, q}; }
OrderRequest ask(TraderId t, Cents p, Shares q = 1) { return {t, Side::Ask, p, q}; }

void check_book_invariants(const OrderBook& book, const Accounts& accounts) {
  if (book.best_bid() && book.best_ask()) CHECK(*book.best_bid() < *book.best_ask());
  for (const auto& [id, account] : accounts) {
    CHECK(account.cash >= 0);
    CHECK(account.shares >= 0);
    const auto e = book.exposure(id);
    CHECK(e.bid_value <= account.cash);
    CHECK(e.ask_quantity <= account.shares);
  }
}

}  // namespace

TEST_CASE("posting to an empty book rests") {
  OrderBook book;
  Accounts accounts(3, 600, 3);
  auto out = book.post(bid(A, 95), accounts);
  CHECK(out.status == PostOutcome::Status::Resting);
  CHECK(out.order_id == 1);
  CHECK(out.trades.empty());
  CHECK(book.best_bid() == 95);
}

TEST_CASE("a crossing bid trades at the resting ask's price") {
  OrderBook book;
  Accounts accounts(3, 600, 3);
  REQUIRE(book.post(ask(B, 90), accounts).status == PostOutcome::Status::Resting);
  auto out = book.post(bid(A, 95), accounts);
  REQUIRE(out.status == PostOutcome::Status::Executed);
  REQUIRE(out.trades.size() == 1);
  CHECK(out.trades[0].price == 90);
  CHECK(out.trades[0].buyer_id == A);
  CHECK(out.trades[0].seller_id == B);
  CHECK_FALSE(out.remainder.has_value());
  CHECK(accounts.at(A).cash == 600 - 90);
  CHECK(accounts.at(A).shares == 4);
  CHECK(accounts.at(B).shares == 3 - 1);
  CHECK(accounts.at(B).cash == 690);
  CHECK(accounts.at(A).trading_pnl == -90);
  CHECK(accounts.at(B).trading_pnl == 90);
  CHECK(book.empty());
}

TEST_CASE("a multi-unit bid walks the asks in price order") {
  // asks 90 then 92; bid@92 x2 fills 90 first, then 92
  OrderBook book;
  Accounts accounts(3, 600, 3);
  book.post(ask(B, 90), accounts);
  book.post(ask(C, 92), accounts);
  auto out = book.post(bid(A, 92, 2), accounts);
  REQUIRE(out.trades.size() == 2);
  CHECK(out.trades[0].price == 90);
  CHECK(out.trades[0].seller_id == B);
  CHECK(out.trades[1].price == 92);
  CHECK(out.trades[1].seller_id == C);
  CHECK(accounts.at(A).cash == 600 - 182);
  CHECK(book.empty());
}

TEST_CASE("time priority within a price level") {
  OrderBook book;
  Accounts accounts(3, 600, 3);
  auto first = book.post(ask(B, 90), accounts);
  book.post(ask(C, 90), accounts);
  auto out = book.post(bid(A, 90), accounts);
  REQUIRE(out.trades.size() == 1);
  CHECK(out.trades[0].resting_order_id == first.order_id);
}

TEST_CASE("partial fill leaves the remainder resting") {
  OrderBook book;
  Accounts accounts(3, 600, 3);
  book.post(ask(B, 90), accounts);
  auto out = book.post(bid(A, 95, 3), accounts);
  REQUIRE(out.status == PostOutcome::Status::Executed);
  REQUIRE(out.remainder.has_value());
  CHECK(*out.remainder == out.order_id);
  CHECK(book.best_bid() == 95);
  CHECK(book.snapshot().bids.at(0).quantity == 2);
  check_book_invariants(book, accounts);
}

TEST_CASE("post rejections") {
  OrderBook book;
  Accounts accounts(3, 100, 1);
  CHECK(book.post(bid(A, 0), accounts).reject == RejectReason::InvalidPrice);
  CHECK(book.post(bid(A, -5), accounts).reject == RejectReason::InvalidPrice);
  CHECK(book.post(bid(A, 10, 0), accounts).reject == RejectReason::InvalidQuantity);
  CHECK(book.post(bid(A, 101), accounts).reject == RejectReason::InsufficientCash);
  CHECK(book.post(ask(A, 50, 2), accounts).reject == RejectReason::InsufficientShares);
  CHECK(book.post(bid(9, 10), accounts).reject == RejectReason::UnknownTrader);
  CHECK(book.empty());
}

TEST_CASE("self-cross is rejected without executing anything") {
  OrderBook book;
  Accounts accounts(3, 600, 3);
  book.post(ask(B, 90), accounts);
  book.post(ask(A, 91), accounts);
  const auto before = accounts;
  auto out = book.post(bid(A, 95, 2), accounts);
  CHECK(out.reject == RejectReason::SelfCross);
  CHECK(accounts == before);
  CHECK(book.size() == 2);

  // Own order beyond what the incoming quantity reaches is not a self-cross.
  auto ok = book.post(bid(A, 95, 1), accounts);
  CHECK(ok.status == PostOutcome::Status::Executed);
}

TEST_CASE("validate_order") {
  TraderAccount rich{A, 600, 0, 0, 0};
  CHECK_FALSE(validate_order(rich, {}, bid(A, 100)).has_value());

  TraderAccount poor{A, 100, 0, 0, 0};
  CHECK(validate_order(poor, Exposure{60, 0}, bid(A, 50)) == RejectReason::InsufficientCash);
  CHECK_FALSE(validate_order(poor, Exposure{50, 0}, bid(A, 50)).has_value());

  TraderAccount holder{A, 0, 3, 0, 0};
  CHECK(validate_order(holder, Exposure{0, 3}, ask(A, 10)) == RejectReason::InsufficientShares);
  CHECK_FALSE(validate_order(holder, Exposure{0, 2}, ask(A, 10)).has_value());
}

TEST_CASE("budget is checked against all of a trader's resting orders") {
  OrderBook book;
  Accounts accounts(3, 100, 3);
  REQUIRE(book.post(bid(A, 60), accounts).accepted());
  CHECK(book.post(bid(A, 50), accounts).reject == RejectReason::InsufficientCash);
  REQUIRE(book.post(ask(B, 120, 3), accounts).accepted());
  CHECK(book.post(ask(B, 130), accounts).reject == RejectReason::InsufficientShares);
}

TEST_CASE("cancel_order") {
  OrderBook book;
  Accounts accounts(3, 600, 3);
  auto id = book.post(bid(A, 95), accounts).order_id;
  CHECK(book.cancel(B, id) == CancelResult::NotOwner);
  CHECK(book.cancel(A, id) == CancelResult::Cancelled);
  CHECK(book.cancel(A, id) == CancelResult::NotFound);
  CHECK(book.empty());
  CHECK_FALSE(book.best_bid().has_value());
}

TEST_CASE("book_snapshot") {
  OrderBook book;
  Accounts accounts(3, 600, 3);
  auto empty = book.snapshot();
  CHECK(empty.bids.empty());
  CHECK(empty.asks.empty());
  CHECK_FALSE(empty.best_bid);

  book.post(bid(A, 95), accounts);
  auto one = book.snapshot();
  CHECK(one.best_bid == 95);
  CHECK_FALSE(one.best_ask);

  book.post(bid(B, 93), accounts);
  book.post(ask(C, 98), accounts);
  auto snap = book.snapshot(A);
  CHECK(snap.best_bid == 95);
  CHECK(snap.best_ask == 98);
  REQUIRE(snap.bids.size() == 2);
  CHECK(snap.asks.size() == 1);
  CHECK(snap.bids[0].own);
  CHECK_FALSE(snap.bids[1].own);
  CHECK_FALSE(snap.asks[0].own);
}

TEST_CASE("reset expires resting orders but ids keep counting") {
  OrderBook book;
  Accounts accounts(3, 600, 3);
  book.post(bid(A, 95), accounts);
  book.reset(2);
  CHECK(book.empty());
  CHECK(book.period() == 2);
  CHECK(book.post(bid(A, 95), accounts).order_id == 2);
}

TEST_CASE("property: book matches the brute-force reference matcher") {
  Rng rng(20240611);
  for (int round = 0; round < 2000; ++round) {
    const auto commands = testing::random_sequence(rng, 20, 4);
    OrderBook book;
    Accounts accounts(4, 400, 3);
    testing::ReferenceMatcher ref(4, 400, 3);
    const Cents cash0 = accounts.total_cash();
    const Shares shares0 = accounts.total_shares();
    for (const auto& command : commands) {
      if (auto* p = std::get_if<testing::RandomPost>(&command)) {
        const auto got = book.post(p->request, accounts);
        const auto want = ref.post(p->request.trader_id, p->request.side, p->request.price, p->request.quantity);
        REQUIRE(got.accepted() == want.accepted);
        REQUIRE(got.reject == want.reject);
        REQUIRE(got.order_id == want.order_id);
        REQUIRE(got.trades.size() == want.fills.size());
        for (std::size_t i = 0; i < got.trades.size(); ++i) {
          const auto& t = got.trades[i];
          CHECK(testing::RefFill{t.price, t.quantity, t.buyer_id, t.seller_id, t.resting_order_id,
                                 t.aggressor_order_id} == want.fills[i]);
          CHECK(t.buyer_id != t.seller_id);
        }
      } else {
        const auto& c = std::get<testing::RandomCancel>(command);
        REQUIRE(book.cancel(c.trader, c.order_id) == ref.cancel(c.trader, c.order_id));
      }
      for (const auto& [id, acc] : accounts) {
        REQUIRE(acc.cash == ref.accounts().at(id).cash);
        REQUIRE(acc.shares == ref.accounts().at(id).shares);
      }
      REQUIRE(book.size() == ref.resting().size());
      check_book_invariants(book, accounts);
      REQUIRE(accounts.total_cash() == cash0);
      REQUIRE(accounts.total_shares() == shares0);
    }
  }
}

TEST_CASE("property: identical order sequences give identical trades") {
  Rng rng(7);
  for (int round = 0; round < 200; ++round) {
    const auto commands = testing::random_sequence(rng, 20, 4);
    auto run = [&] {
      OrderBook book;
      Accounts accounts(4, 400, 3);
      std::vector<Trade> trades;
      for (const auto& command : commands) {
        if (auto* p = std::get_if<testing::RandomPost>(&command)) {
          auto out = book.post(p->request, accounts);
          trades.insert(trades.end(), out.trades.begin(), out.trades.end());
        } else {
          const auto& c = std::get<testing::RandomCancel>(command);
          book.cancel(c.trader, c.order_id);
        }
      }
      return std::make_pair(trades, accounts);
    };
    CHECK(run() == run());
  }
}
