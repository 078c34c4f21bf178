/*
 * Copyright 2026 The hesearch Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "hesearch/he/registry.h"

#include "hesearch/ckks/backend.h"
#include "hesearch/error.h"
#include "hesearch/he/plain_backend.h"

namespace hesearch::he {
namespace {

constexpr std::size_t kDeskDegree = 8192;
constexpr std::size_t kDeskDepth = 6;
constexpr std::size_t kDeskMaxDepth = 8;
constexpr std::size_t kToyDegree = 1024;
constexpr std::size_t kToyDepth = 2;

SchemeParams ckks_params(std::string name, std::size_t degree, std::size_t depth) {
  SchemeParams p;
  p.backend = BackendTag::kCkks;
  p.max_depth = static_cast<std::uint32_t>(depth);
  p.ckks = ckks::make_params(std::move(name), degree, depth);
  return p;
}

std::string joined_presets() {
  std::string out;
  for (const auto& name : preset_names()) {
    if (!out.empty()) out += ", ";
    out += name;
  }
  return out;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> names = {"plain", "toy-insecure", "desk"};
  for (std::size_t d = 1; d <= kDeskMaxDepth; ++d) names.push_back("desk-d" + std::to_string(d));
  return names;
}

bool preset_is_insecure(std::string_view name) { return name == "plain" || name == "toy-insecure"; }

SchemeParams preset_params(std::string_view name) {
  if (name == "plain") return PlainBackend::default_params();
  if (name == "toy-insecure") return ckks_params("toy-insecure", kToyDegree, kToyDepth);
  if (name == "desk") return ckks_params("desk", kDeskDegree, kDeskDepth);
  if (name.starts_with("desk-d") && name.size() == 7) {
    const char c = name[6];
    if (c >= '1' && c <= '0' + static_cast<char>(kDeskMaxDepth)) {
      return ckks_params(std::string(name), kDeskDegree, static_cast<std::size_t>(c - '0'));
    }
  }
  throw Error(ErrorCode::kInvalidParams,
              "unknown preset '" + std::string(name) + "' (available: " + joined_presets() + ")");
}

std::unique_ptr<Backend> make_backend(const SchemeParams& params) {
  switch (params.backend) {
    case BackendTag::kPlain:
      return std::make_unique<PlainBackend>(params);
    case BackendTag::kCkks:
      return std::make_unique<ckks::CkksBackend>(params);
  }
  throw Error(ErrorCode::kInvalidParams, "unknown backend tag");
}

std::unique_ptr<Backend> make_backend(std::string_view preset) {
  return make_backend(preset_params(preset));
}

std::unique_ptr<Backend> backend_for_params_id(std::string_view params_id) {
  if (params_id == "plain") return make_backend("plain");
  if (params_id.starts_with("ckks-")) {
    std::string_view name = params_id.substr(5);
    if (name != "plain") {
      for (const auto& preset : preset_names()) {
        if (preset == name) return make_backend(preset);
      }
    }
  }
  throw Error(ErrorCode::kParamsMismatch,
              "parameter set '" + std::string(params_id) + "' is not a known preset");
}

}  // namespace hesearch::he
