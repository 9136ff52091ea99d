// Copyright 2026 The ShardSim Authors
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

#ifndef SHARDSIM_API_H_
#define SHARDSIM_API_H_

#include "shardsim/io.h"

namespace shardsim {

struct ApiOptions {
  ParseOptions parse;
  // Simulations one request may run.
  int max_configs = 512;
};

struct ApiResponse {
  int status = 200;
  Json body;
};

// Shared by the CLI and the HTTP service. Bodies are envelopes holding either
// "result" or "errors".
ApiResponse HandleSimulate(const Json& request, const ApiOptions& options);
ApiResponse HandlePlan(const Json& request, const ApiOptions& options);
ApiResponse HandleSweep(const Json& request, const ApiOptions& options);
ApiResponse HandleDecide(const Json& request, const ApiOptions& options);
ApiResponse HandlePresets();
ApiResponse HandleSchema();

// Envelope for a byte-identical comparison between the CLI and the API.
std::string Serialize(const Json& body);

}  // namespace shardsim

#endif  // SHARDSIM_API_H_
