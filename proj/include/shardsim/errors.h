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

#ifndef SHARDSIM_ERRORS_H_
#define SHARDSIM_ERRORS_H_

#include <stdexcept>
#include <string>

namespace shardsim {

// Raised when a structurally valid input describes an impossible setup
// (group larger than the cluster, missing cost entries, bad divisibility).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised for numeric arguments outside their domain.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when calibration data cannot determine a cost model.
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace shardsim

#endif  // SHARDSIM_ERRORS_H_
