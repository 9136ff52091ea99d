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


#include "shardsim/service.h"

#include <cstdlib>

#include "httplib.h"

namespace shardsim {

int PortFromEnvironment() {
  const char* env = std::getenv("SHARDSIM_PORT");
  if (env == nullptr || *env == '\0') return kDefaultPort;
  char* end = nullptr;
  const long port = std::strtol(env, &end, 10);
  if (*end != '\0' || port < 1 || port > 65535) return kDefaultPort;
  return static_cast<int>(port);
}

namespace {

constexpr char kJson[] = "application/json";

void Respond(httplib::Response& res, const ApiResponse& api) {
  res.status = api.status;
  res.set_content(Serialize(api.body), kJson);
}

template <typename Handler>
httplib::Server::Handler Post(Handler handler, const ApiOptions& options) {
  return [handler, options](const httplib::Request& req,
                            httplib::Response& res) {
    Json body;
    try {
      body = Json::parse(req.body);
    } catch (const Json::parse_error& e) {
      Respond(res, {400, ErrorEnvelope({{"", std::string("malformed JSON: ") +
                                                 e.what(),
                                         Violation::Severity::kError}})});
      return;
    }
    Respond(res, handler(body, options));
  };
}

}  // namespace

Service::Service(ApiOptions options)
    : options_(std::move(options)), server_(std::make_unique<httplib::Server>()) {
  // Calibration files are not read on behalf of remote clients.
  options_.parse.allow_cost_params_path = false;
  options_.parse.base_dir.clear();
  httplib::Server& s = *server_;
  s.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                         {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                         {"Access-Control-Allow-Headers", "Content-Type"}});
  s.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
  });
  s.Post("/api/simulate", Post(HandleSimulate, options_));
  s.Post("/api/plan", Post(HandlePlan, options_));
  s.Post("/api/sweep", Post(HandleSweep, options_));
  s.Post("/api/decide", Post(HandleDecide, options_));
  s.Get("/api/presets", [](const httplib::Request&, httplib::Response& res) {
    Respond(res, HandlePresets());
  });
  s.Get("/api/schema", [](const httplib::Request&, httplib::Response& res) {
    Respond(res, HandleSchema());
  });
  s.set_exception_handler([](const httplib::Request&, httplib::Response& res,
                             std::exception_ptr) {
    Respond(res, {500, ErrorEnvelope({{"", "internal error",
                                       Violation::Severity::kError}})});
  });
}

Service::~Service() = default;

bool Service::Listen(const std::string& host, int port) {
  return server_->listen(host, port);
}

int Service::BindToAnyPort(const std::string& host) {
  return server_->bind_to_any_port(host);
}

bool Service::ListenAfterBind() { return server_->listen_after_bind(); }

void Service::Stop() { server_->stop(); }

void Service::WaitUntilReady() const { server_->wait_until_ready(); }

}  // namespace shardsim
