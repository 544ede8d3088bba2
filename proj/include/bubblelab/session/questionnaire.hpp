#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "bubblelab/common/types.hpp"

namespace bubblelab::session {

inline constexpr int kLikertMin = 1;
inline constexpr int kLikertMax = 7;

/// Price questionnaire: one declared value per period.
struct DeclaredPrices {
  TraderId trader_id = 0;
  std::vector<Cents> declared_value_per_period;

  friend bool operator==(const DeclaredPrices&, const DeclaredPrices&) = default;
};

enum class ItemGroup { SelfPrecision, OthersPrecision };

std::string_view to_string(ItemGroup g) noexcept;
std::optional<ItemGroup> parse_item_group(std::string_view s) noexcept;

/// One Likert item of the assessment questionnaire.
struct AssessmentResponse {
  TraderId trader_id = 0;
  std::string item_id;
  ItemGroup item_group = ItemGroup::SelfPrecision;
  int rating = kLikertMin;

  friend bool operator==(const AssessmentResponse&, const AssessmentResponse&) = default;
};

nlohmann::ordered_json to_payload(const DeclaredPrices& d);
nlohmann::ordered_json to_payload(const AssessmentResponse& a);

/// Questionnaire payloads are tagged by "form": "PRICE" or "ASSESSMENT".
bool is_price_form(const nlohmann::json& payload);
DeclaredPrices declared_from_payload(const nlohmann::json& payload);
AssessmentResponse assessment_from_payload(const nlohmann::json& payload);

}  // namespace bubblelab::session

namespace bubblelab::session {

/// Everything one trader submits in the pre-trade phase.
struct QuestionnaireSubmission {
  DeclaredPrices prices;
  std::vector<AssessmentResponse> assessments;

  friend bool operator==(const QuestionnaireSubmission&, const QuestionnaireSubmission&) = default;
};

}  // namespace bubblelab::session
