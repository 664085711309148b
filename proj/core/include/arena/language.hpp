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

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "arena/domain.hpp"

namespace arena {

inline constexpr std::string_view kUndetermined = "und";

class LanguageDetector {
 public:
  virtual ~LanguageDetector() = default;
  // ISO 639-1 code, or "und".
  virtual std::string detect(std::string_view text) const = 0;
};

// Counts stopword hits for fr, en, es, de, it, pt, nl, pl, sv and tr. The
// winner needs at least min_hits and a strict lead over the runner-up.
class StopwordLanguageDetector : public LanguageDetector {
 public:
  explicit StopwordLanguageDetector(int min_hits = 2);
  std::string detect(std::string_view text) const override;

  std::map<std::string, int> scores(std::string_view text) const;
  static std::vector<std::string> tokenize(std::string_view text);

 private:
  int min_hits_;
  std::map<std::string, std::set<std::string, std::less<>>> profiles_;
};

// Language of the first user message.
std::string tag_language(const Conversation& c, const LanguageDetector& detector);

}  // namespace arena
