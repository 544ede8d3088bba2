#pragma once

// Two scripted bots play a full session against a live server on loopback.

#include <future>
#include <string>
#include <thread>
#include <vector>

#include "bubblelab/protocol/client.hpp"
#include "bubblelab/protocol/server.hpp"
#include "bubblelab/session/schedule.hpp"
#include "bubblelab/session/scripted.hpp"

namespace loopback {

using namespace bubblelab;
using namespace bubblelab::protocol;

struct Outcome {
  session::SessionConfig config;
  std::vector<session::EventRecord> live_log;
  session::Script script;  // what the bots sent, as the server sequenced it
  std::vector<FinalPayout> payouts;
  std::string extra_seat_error;
  std::string early_order_reject;
  int late_rejects = 0;
};

inline session::SessionConfig config() {
  session::SessionConfig c;
  c.session_id = "loopback";
  c.n_traders = 2;
  c.n_periods = 10;
  c.period_seconds = 1;
  c.rng_seed = 2024;
  return c;
}

/// Sends and waits for this bot's ORDER_ACK or ORDER_REJECT.
inline std::variant<OrderAck, OrderReject> order(BotClient& bot, const ClientMessage& m) {
  bot.send(m);
  for (;;) {
    const ServerMessage reply = bot.receive();
    if (const auto* a = std::get_if<OrderAck>(&reply)) return *a;
    if (const auto* r = std::get_if<OrderReject>(&reply)) return *r;
  }
}

inline Outcome run() {
  Outcome result;
  result.config = config();
  const auto& c = result.config;

  std::promise<unsigned short> port_promise;
  auto port_future = port_promise.get_future();
  ServerOptions options;
  options.bind = "127.0.0.1:0";
  options.summary_seconds = 0;
  options.join_timeout_seconds = 20;
  options.on_listening = [&](unsigned short port) { port_promise.set_value(port); };
  auto server = std::async(std::launch::async, [&] { return serve(c, options); });
  const unsigned short port = port_future.get();

  BotClient a("127.0.0.1", port), b("127.0.0.1", port);
  a.send(Hello{"alpha"});
  a.expect<Welcome>();
  b.send(Hello{"beta"});
  b.expect<Welcome>();
  {
    BotClient extra("127.0.0.1", port);
    extra.send(Hello{"gamma"});
    result.extra_seat_error = extra.expect<Error>().code;
  }
  const auto early = order(a, PostOrder{Side::Bid, 50, 1});
  if (const auto* r = std::get_if<OrderReject>(&early)) result.early_order_reject = r->reason;

  BotClient* bots[] = {&a, &b};
  for (TraderId seat = 1; seat <= 2; ++seat) {
    session::QuestionnaireSubmission q;
    q.prices.trader_id = seat;
    SubmitQuestionnaire wire;
    for (int t = 1; t <= c.n_periods; ++t) {
      const Cents v = session::intrinsic_value(c, t) + 3 * seat;
      q.prices.declared_value_per_period.push_back(v);
      wire.declared.push_back(v);
    }
    for (int i = 1; i <= 2; ++i) {
      const auto group = i == 1 ? session::ItemGroup::SelfPrecision : session::ItemGroup::OthersPrecision;
      const std::string id = "item_" + std::to_string(i);
      q.assessments.push_back({seat, id, group, 3 + seat + i});
      wire.responses.push_back({id, group, 3 + seat + i});
    }
    bots[seat - 1]->send(wire);
    bots[seat - 1]->expect<SessionInfo>();
    result.script.questionnaires.push_back(q);
  }

  result.script.periods.resize(static_cast<std::size_t>(c.n_periods));
  for (int t = 1; t <= c.n_periods; ++t) {
    a.expect<PeriodStart>();
    b.expect<PeriodStart>();
    const Cents f = session::intrinsic_value(c, t);
    const TraderId seller = t % 2 == 1 ? 1 : 2;
    const TraderId buyer = 3 - seller;
    BotClient& s = *bots[seller - 1];
    BotClient& k = *bots[buyer - 1];
    auto& period = result.script.periods[t - 1];

    auto step = [&](BotClient& bot, TraderId seat, const ClientMessage& m) -> std::optional<OrderAck> {
      const auto reply = order(bot, m);
      if (const auto* r = std::get_if<OrderReject>(&reply); r && r->reason == "wrong_phase") {
        ++result.late_rejects;
        return std::nullopt;
      }
      if (const auto* p = std::get_if<PostOrder>(&m)) {
        period.push_back(session::PostCommand{{seat, p->side, p->price_cents, p->quantity}});
      } else {
        period.push_back(session::CancelCommand{seat, std::get<CancelOrder>(m).order_id});
      }
      if (const auto* ack = std::get_if<OrderAck>(&reply)) return *ack;
      return std::nullopt;
    };

    step(s, seller, PostOrder{Side::Ask, f + 5, 1});
    step(k, buyer, PostOrder{Side::Bid, f + 8, 1});
    const auto resting = step(k, buyer, PostOrder{Side::Bid, f - 3, 1});
    if (resting) step(k, buyer, CancelOrder{resting->order_id});
    step(k, buyer, CancelOrder{999999});
    step(s, seller, PostOrder{Side::Ask, f - 4, 2});
    step(k, buyer, PostOrder{Side::Bid, f - 4, 1});

    a.expect<PeriodSummary>();
    b.expect<PeriodSummary>();
  }
  result.payouts.push_back(a.expect<FinalPayout>());
  result.payouts.push_back(b.expect<FinalPayout>());
  result.live_log = server.get().log;
  return result;
}

}  // namespace loopback
