// Copyright 2026 The ecodrive Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <optional>
#include <string_view>

namespace ecodrive {

/// Three-way rating shared by comfort and fuel clusters.
enum class Level { Low, Medium, High };

std::string_view level_name(Level l);  // "Low", "Medium", "High"
char level_letter(Level l);            // 'L', 'M', 'H'
std::optional<Level> parse_level(std::string_view s);

}  // namespace ecodrive
