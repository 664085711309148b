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

#pragma once

#include <functional>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "arena/domain.hpp"
#include "arena/gateway.hpp"

namespace arena {

enum class PiiCategory { email, phone, national_id_like, iban_like, address_like, llm_judged };

std::string_view to_string(PiiCategory c);

struct PiiVerdict {
  bool flagged = false;  // iff categories nonempty
  std::set<PiiCategory> categories;
  std::vector<std::string> detector_labels;
};

// A detector inspects a whole conversation. Rule-based detectors never
// throw; a detector that cannot reach its backend throws, and detect_pii
// turns that into a flagged verdict.
class PiiDetector {
 public:
  virtual ~PiiDetector() = default;
  virtual std::string id() const = 0;
  virtual std::set<PiiCategory> inspect(const Conversation& c) const = 0;
  // Label recorded when inspect throws.
  virtual std::string failure_label() const { return id() + "_unavailable"; }
};

using DetectorList = std::vector<std::shared_ptr<const PiiDetector>>;

// Base class for detectors that look at each user and assistant text
// independently.
class TextPiiDetector : public PiiDetector {
 public:
  std::set<PiiCategory> inspect(const Conversation& c) const override;
  virtual bool matches(std::string_view text) const = 0;
  virtual PiiCategory category() const = 0;
};

std::shared_ptr<const PiiDetector> make_email_detector();
std::shared_ptr<const PiiDetector> make_phone_detector();
std::shared_ptr<const PiiDetector> make_iban_detector();
// Runs of 13 or more digits, allowing single space, dot or hyphen
// separators between digit groups.
std::shared_ptr<const PiiDetector> make_digit_run_detector();
std::shared_ptr<const PiiDetector> make_address_detector();

// Every rule-based detector, in a fixed order.
DetectorList baseline_detectors();

struct JudgeAnswer {
  bool contains_personal_data = true;
  std::string rationale;
};

// Transport to a judging model. Throws on any failure.
using JudgeClient = std::function<JudgeAnswer(const std::string& transcript)>;

// Reference instruction sent ahead of the transcript. Local convention.
extern const std::string_view kJudgeInstruction;

class LlmJudgeDetector : public PiiDetector {
 public:
  explicit LlmJudgeDetector(JudgeClient client, std::string id = "llm_judge");
  std::string id() const override { return id_; }
  std::string failure_label() const override { return "judge_unavailable"; }
  std::set<PiiCategory> inspect(const Conversation& c) const override;

  static std::string transcript(const Conversation& c);

 private:
  JudgeClient client_;
  std::string id_;
};

// Judge client that asks a gateway route and expects a reply starting with
// YES or NO; anything else counts as a failure.
JudgeClient make_gateway_judge(std::shared_ptr<const Gateway> gateway, ProviderRoute route);

// OR over all detectors; a throwing detector flags the conversation with
// llm_judged and the detector's failure label. Throws Error(config_error)
// for an empty detector list.
PiiVerdict detect_pii(const Conversation& c, const DetectorList& detectors);

}  // namespace arena
