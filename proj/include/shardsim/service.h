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

#ifndef SHARDSIM_SERVICE_H_
#define SHARDSIM_SERVICE_H_

#include <memory>
#include <string>

#include "shardsim/api.h"

namespace httplib {
class Server;
}  // namespace httplib

namespace shardsim {

inline constexpr int kDefaultPort = 8080;

// Port from SHARDSIM_PORT, or kDefaultPort when unset or invalid.
int PortFromEnvironment();

class Service {
 public:
  explicit Service(ApiOptions options);
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Binds and serves until Stop(); returns false if binding failed.
  bool Listen(const std::string& host, int port);
  // Binds to an ephemeral port and returns it, or -1. Serve with
  // ListenAfterBind().
  int BindToAnyPort(const std::string& host);
  bool ListenAfterBind();
  void Stop();
  void WaitUntilReady() const;

 private:
  ApiOptions options_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace shardsim

#endif  // SHARDSIM_SERVICE_H_
