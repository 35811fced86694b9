// Copyright 2026 The qaoalab Authors
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

#include <string>
#include <string_view>

#include <json.hpp>

#include "qaoalab/optimizer.hpp"
#include "qaoalab/shot_noise.hpp"
#include "qaoalab/tts.hpp"

namespace qaoalab {

using Json = nlohmann::json;

/// Lowercase hex SHA-256 of the bytes.
std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::string& path);
/// Hash of the compact dump; nlohmann orders object keys, so equal values hash equally.
std::string json_hash(const Json& j);

/// Edge-list text of g, the form that is written to disk and hashed.
std::string graph_text(const Graph& g);

void to_json(Json& j, const QaoaParams& x);
void from_json(const Json& j, QaoaParams& x);
void to_json(Json& j, const FourierParams& x);
void from_json(const Json& j, FourierParams& x);
void to_json(Json& j, const LocalOptions& x);
void from_json(const Json& j, LocalOptions& x);
void to_json(Json& j, const StrategyConfig& x);
void from_json(const Json& j, StrategyConfig& x);
void to_json(Json& j, const LevelResult& x);
void from_json(const Json& j, LevelResult& x);
void to_json(Json& j, const NoiseConfig& x);
void from_json(const Json& j, NoiseConfig& x);
void to_json(Json& j, const TtsRecord& x);
void from_json(const Json& j, TtsRecord& x);

}  // namespace qaoalab
