// Copyright 2026 The Arena Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "arena/pii.hpp"

#include <algorithm>
#include <cctype>
#include <regex>

#include "arena/error.hpp"

namespace arena {

std::string_view to_string(PiiCategory c) {
  switch (c) {
    case PiiCategory::email: return "email";
    case PiiCategory::phone: return "phone";
    case PiiCategory::national_id_like: return "national_id_like";
    case PiiCategory::iban_like: return "iban_like";
    case PiiCategory::address_like: return "address_like";
    case PiiCategory::llm_judged: return "llm_judged";
  }
  return "llm_judged";
}

std::set<PiiCategory> TextPiiDetector::inspect(const Conversation& c) const {
  for (const auto& turn : c.turns) {
    if (matches(turn.user_text)) return {category()};
    for (Side side : {Side::a, Side::b}) {
      if (const auto& msg = turn.assistant(side); msg && matches(msg->text)) return {category()};
    }
  }
  return {};
}

namespace {

// Candidate byte ranges of a text; patterns only run inside them so that
// long texts without any trigger character stay linear.
using WindowFinder = std::vector<std::pair<std::size_t, std::size_t>> (*)(std::string_view);

class RegexDetector final : public TextPiiDetector {
 public:
  RegexDetector(std::string id, PiiCategory category, WindowFinder windows, std::vector<std::regex> patterns)
      : id_(std::move(id)), category_(category), windows_(windows), patterns_(std::move(patterns)) {}

  std::string id() const override { return id_; }
  PiiCategory category() const override { return category_; }
  bool matches(std::string_view text) const override {
    for (const auto& [begin, end] : windows_(text)) {
      for (const auto& re : patterns_) {
        if (std::regex_search(text.begin() + begin, text.begin() + end, re)) return true;
      }
    }
    return false;
  }

 private:
  std::string id_;
  PiiCategory category_;
  WindowFinder windows_;
  std::vector<std::regex> patterns_;
};

bool is_digit(char ch) { return std::isdigit(static_cast<unsigned char>(ch)) != 0; }

// Maximal runs of bytes satisfying in_run, widened by one byte of context
// on each side so that boundary assertions see the real neighbours.
template <typename InRun, typename Keep>
std::vector<std::pair<std::size_t, std::size_t>> runs(std::string_view text, InRun in_run, Keep keep) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!in_run(text[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && in_run(text[j])) ++j;
    if (keep(text.substr(i, j - i))) out.emplace_back(i == 0 ? 0 : i - 1, std::min(text.size(), j + 1));
    i = j;
  }
  return out;
}

std::size_t count_digits(std::string_view s) { return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), is_digit)); }

std::vector<std::pair<std::size_t, std::size_t>> email_windows(std::string_view text) {
  auto local = [](char ch) {
    return std::isalnum(static_cast<unsigned char>(ch)) || ch == '.' || ch == '_' || ch == '%' || ch == '+' ||
           ch == '-' || ch == '@';
  };
  return runs(text, local, [](std::string_view r) { return r.find('@') != std::string_view::npos; });
}

std::vector<std::pair<std::size_t, std::size_t>> phone_windows(std::string_view text) {
  auto phone_char = [](char ch) {
    return is_digit(ch) || ch == '+' || ch == '.' || ch == '-' || ch == '(' || ch == ')' ||
           std::isspace(static_cast<unsigned char>(ch));
  };
  return runs(text, phone_char, [](std::string_view r) { return count_digits(r) >= 8; });
}

std::vector<std::pair<std::size_t, std::size_t>> iban_windows(std::string_view text) {
  auto iban_char = [](char ch) { return (ch >= 'A' && ch <= 'Z') || is_digit(ch) || ch == ' '; };
  return runs(text, iban_char, [](std::string_view r) { return r.size() >= 12 && count_digits(r) >= 2; });
}

std::vector<std::pair<std::size_t, std::size_t>> address_windows(std::string_view text) {
  // A street number followed within a few bytes by the street type.
  constexpr std::size_t kTail = 40;
  auto out = runs(text, is_digit, [](std::string_view r) { return r.size() <= 4; });
  for (auto& w : out) w.second = std::min(text.size(), w.second + kTail);
  return out;
}

class DigitRunDetector final : public TextPiiDetector {
 public:
  std::string id() const override { return "digit_run"; }
  PiiCategory category() const override { return PiiCategory::national_id_like; }
  bool matches(std::string_view text) const override {
    int digits = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
      const char ch = text[i];
      if (std::isdigit(static_cast<unsigned char>(ch))) {
        if (++digits >= kMinDigits) return true;
        continue;
      }
      const bool separator = (ch == ' ' || ch == '.' || ch == '-') && digits > 0 && i + 1 < text.size() &&
                             std::isdigit(static_cast<unsigned char>(text[i + 1]));
      if (!separator) digits = 0;
    }
    return false;
  }

 private:
  static constexpr int kMinDigits = 13;
};

constexpr auto kFlags = std::regex::ECMAScript | std::regex::optimize;

}  // namespace

std::shared_ptr<const PiiDetector> make_email_detector() {
  return std::make_shared<RegexDetector>(
      "email_pattern", PiiCategory::email, email_windows,
      std::vector<std::regex>{std::regex(R"([A-Za-z0-9._%+-]+@[A-Za-z0-9-]+(\.[A-Za-z0-9-]+)*\.[A-Za-z]{2,})", kFlags)});
}

std::shared_ptr<const PiiDetector> make_phone_detector() {
  return std::make_shared<RegexDetector>(
      "phone_pattern", PiiCategory::phone, phone_windows,
      std::vector<std::regex>{
          // +33 6 12 34 56 78, 0033612345678
          std::regex(R"((\+|00)33[\s.-]?\(?0?\)?[1-9]([\s.-]?\d{2}){4})", kFlags),
          // 06 12 34 56 78, 06.12.34.56.78
          std::regex(R"((^|[^\d])0[1-9]([\s.-]?\d{2}){4}($|[^\d]))", kFlags),
          // other international numbers: +<country> then 6-12 digits in groups
          std::regex(R"(\+\d{1,3}[\s.-]?(\(\d{1,4}\)[\s.-]?)?\d{2,4}([\s.-]?\d{2,4}){1,4})", kFlags),
      });
}

std::shared_ptr<const PiiDetector> make_iban_detector() {
  return std::make_shared<RegexDetector>(
      "iban_pattern", PiiCategory::iban_like, iban_windows,
      std::vector<std::regex>{std::regex(R"(\b[A-Z]{2}\d{2}( ?[A-Z0-9]{4}){2,7}( ?[A-Z0-9]{1,4})?\b)", kFlags)});
}

std::shared_ptr<const PiiDetector> make_digit_run_detector() { return std::make_shared<DigitRunDetector>(); }

std::shared_ptr<const PiiDetector> make_address_detector() {
  return std::make_shared<RegexDetector>(
      "address_pattern", PiiCategory::address_like, address_windows,
      std::vector<std::regex>{std::regex(
          R"(\b\d{1,4}( ?(bis|ter))?,? (rue|avenue|av\.|boulevard|bd|chemin|impasse|all(é|e)e|place|quai|route|street|road|lane)\b [^\s,.;]+)",
          kFlags | std::regex::icase)});
}

DetectorList baseline_detectors() {
  return {make_email_detector(), make_phone_detector(), make_iban_detector(), make_digit_run_detector(),
          make_address_detector()};
}

const std::string_view kJudgeInstruction =
    "You review conversations before they are published in an open dataset. "
    "Answer YES if the conversation below contains personal or sensitive information about an "
    "identifiable person (names tied to private details, contact details, identifiers, addresses, "
    "health, finances), otherwise answer NO. Reply with YES or NO on the first line, then one "
    "short sentence of rationale.";

LlmJudgeDetector::LlmJudgeDetector(JudgeClient client, std::string id)
    : client_(std::move(client)), id_(std::move(id)) {
  if (!client_) throw Error(ErrorCode::config_error, "judge detector without a client");
}

std::string LlmJudgeDetector::transcript(const Conversation& c) {
  std::string out;
  for (const auto& turn : c.turns) {
    out += "USER: " + turn.user_text + "\n";
    for (Side side : {Side::a, Side::b}) {
      if (const auto& msg = turn.assistant(side)) {
        out += "ASSISTANT " + std::string(to_string(side)) + ": " + msg->text + "\n";
      }
    }
  }
  return out;
}

std::set<PiiCategory> LlmJudgeDetector::inspect(const Conversation& c) const {
  if (c.turns.empty()) return {};
  const JudgeAnswer answer = client_(transcript(c));
  if (answer.contains_personal_data) return {PiiCategory::llm_judged};
  return {};
}

JudgeClient make_gateway_judge(std::shared_ptr<const Gateway> gateway, ProviderRoute route) {
  return [gateway = std::move(gateway), route = std::move(route)](const std::string& transcript) {
    std::vector<ChatMessage> history{{ChatMessage::Role::user, std::string(kJudgeInstruction) + "\n\n" + transcript}};
    const auto outcome = gateway->complete_stream(route, history, GenerationParams{0.0, 64}, [](const StreamEvent&) {});
    if (outcome.terminal.kind != StreamEvent::Kind::done) {
      throw Error(ErrorCode::upstream_error, "judge request failed: " + outcome.terminal.error_code);
    }
    std::string word;
    for (char ch : outcome.text) {
      const auto uc = static_cast<unsigned char>(ch);
      if (std::isalpha(uc)) {
        word.push_back(static_cast<char>(std::toupper(uc)));
      } else if (!word.empty() || ch == '\n') {
        break;
      }
    }
    if (word == "YES") return JudgeAnswer{true, outcome.text};
    if (word == "NO") return JudgeAnswer{false, outcome.text};
    throw Error(ErrorCode::upstream_error, "unparseable judge reply");
  };
}

PiiVerdict detect_pii(const Conversation& c, const DetectorList& detectors) {
  if (detectors.empty()) throw Error(ErrorCode::config_error, "no PII detectors configured");
  PiiVerdict verdict;
  for (const auto& detector : detectors) {
    std::set<PiiCategory> found;
    std::string label = detector->id();
    try {
      found = detector->inspect(c);
    } catch (const std::exception&) {
      found = {PiiCategory::llm_judged};
      label = detector->failure_label();
    }
    if (!found.empty()) {
      verdict.categories.insert(found.begin(), found.end());
      verdict.detector_labels.push_back(label);
    }
  }
  verdict.flagged = !verdict.categories.empty();
  return verdict;
}

}  // namespace arena
