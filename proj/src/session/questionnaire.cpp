#include "bubblelab/session/questionnaire.hpp"

#include <stdexcept>

namespace bubblelab::session {

std::string_view to_string(ItemGroup g) noexcept {
  return g == ItemGroup::SelfPrecision ? "SELF_PRECISION" : "OTHERS_PRECISION";
}

std::optional<ItemGroup> parse_item_group(std::string_view s) noexcept {
  if (s == "SELF_PRECISION") return ItemGroup::SelfPrecision;
  if (s == "OTHERS_PRECISION") return ItemGroup::OthersPrecision;
  return std::nullopt;
}

nlohmann::ordered_json to_payload(const DeclaredPrices& d) {
  nlohmann::ordered_json j;
  j["form"] = "PRICE";
  j["trader_id"] = d.trader_id;
  j["declared_values"] = d.declared_value_per_period;
  return j;
}

nlohmann::ordered_json to_payload(const AssessmentResponse& a) {
  nlohmann::ordered_json j;
  j["form"] = "ASSESSMENT";
  j["trader_id"] = a.trader_id;
  j["item_id"] = a.item_id;
  j["item_group"] = std::string(to_string(a.item_group));
  j["rating"] = a.rating;
  return j;
}

bool is_price_form(const nlohmann::json& payload) { return payload.value("form", std::string{}) == "PRICE"; }

DeclaredPrices declared_from_payload(const nlohmann::json& j) {
  return DeclaredPrices{j.at("trader_id").get<TraderId>(), j.at("declared_values").get<std::vector<Cents>>()};
}

AssessmentResponse assessment_from_payload(const nlohmann::json& j) {
  const auto group = parse_item_group(j.at("item_group").get<std::string>());
  if (!group) throw std::invalid_argument("unknown item_group");
  return AssessmentResponse{j.at("trader_id").get<TraderId>(), j.at("item_id").get<std::string>(), *group,
                            j.at("rating").get<int>()};
}

}  // namespace bubblelab::session
