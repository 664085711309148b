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

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "arena/domain.hpp"

namespace arena {

using Clock = std::function<Timestamp()>;

Timestamp system_now();

// "2026-03-01T12:00:00.000Z"
std::string format_timestamp(Timestamp t);
Timestamp parse_timestamp(std::string_view s);

inline std::int64_t to_millis(Timestamp t) { return t.time_since_epoch().count(); }
inline Timestamp from_millis(std::int64_t ms) { return Timestamp{std::chrono::milliseconds{ms}}; }

// Random lowercase-hex identifier of 2*bytes characters, drawn from the OS
// entropy source.
std::string random_id(std::size_t bytes = 16);

// Number of UTF-8 code points (invalid lead bytes count as one each).
std::size_t utf8_length(std::string_view s);

// Splits a string into UTF-8 code point substrings.
std::vector<std::string> utf8_chars(std::string_view s);

}  // namespace arena
