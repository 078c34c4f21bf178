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

#ifndef HESEARCH_HE_REGISTRY_H_
#define HESEARCH_HE_REGISTRY_H_

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "hesearch/he/backend.h"

namespace hesearch::he {

// Named parameter sets: "plain", "toy-insecure", "desk" (depth 6) and
// "desk-d1" .. "desk-d8".
std::vector<std::string> preset_names();
bool preset_is_insecure(std::string_view name);

// Throws Error(kInvalidParams) for unknown names.
SchemeParams preset_params(std::string_view name);

std::unique_ptr<Backend> make_backend(const SchemeParams& params);
std::unique_ptr<Backend> make_backend(std::string_view preset);

// Resolves the params-id stored in key and dataset files. Only preset ids
// can be resolved.
std::unique_ptr<Backend> backend_for_params_id(std::string_view params_id);

}  // namespace hesearch::he

#endif  // HESEARCH_HE_REGISTRY_H_
