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


#include "shardsim/api.h"

#include <exception>
#include <string>

#include "shardsim/errors.h"

namespace shardsim {

namespace {

ApiResponse Error(int status, std::string path, std::string message) {
  return {status, ErrorEnvelope({{std::move(path), std::move(message),
                                  Violation::Severity::kError}})};
}

ApiResponse Errors(const std::vector<Violation>& errors) {
  return {400, ErrorEnvelope(errors)};
}

template <typename Fn>
ApiResponse Guard(Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    return Error(400, "", e.what());
  } catch (const FitError& e) {
    return Error(400, "", e.what());
  } catch (const ParameterError& e) {
    return Error(400, "", e.what());
  } catch (const std::exception& e) {
    return Error(500, "", std::string("internal error: ") + e.what());
  }
}

Json SimulationResultJson(const Scenario& s, const SimulationResult& sim) {
  Json j;
  j["config"] = ScenarioToJson(s, true);
  j["feasible"] = sim.feasible;
  j["memory"] = ToJson(sim.memory);
  if (!sim.feasible) {
    j["infeasibility"] = sim.infeasibility;
    return j;
  }
  const ClusterTopology topology = s.topology();
  j["critical_stage"] = sim.critical_stage;
  j["breakdown"] = ToJson(sim.breakdown, true);
  j["metrics"] = ToJson(
      ComputeMetrics(sim.breakdown, s.workload, s.parallelism, topology));
  return j;
}

PlanConstraints ReadConstraints(const Json& request,
                                std::vector<Violation>* errors) {
  if (request.is_object() && request.contains("constraints")) {
    return ParseConstraints(request.at("constraints"), "/constraints", errors);
  }
  return PlanConstraints{};
}

}  // namespace

std::string Serialize(const Json& body) { return body.dump(2) + "\n"; }

ApiResponse HandleSimulate(const Json& request, const ApiOptions& options) {
  return Guard([&]() -> ApiResponse {
    ParsedConfig parsed = ParseRunConfig(request, options.parse);
    if (parsed.ok() && !parsed.has_parallelism) {
      parsed.errors.push_back({"/parallelism", "required field missing",
                               Violation::Severity::kError});
    }
    if (!parsed.ok()) return Errors(parsed.errors);
    const Scenario& s = parsed.scenario;
    const ClusterTopology topology = s.topology();
    const SimulationResult sim =
        SimulateStep(s.workload, s.parallelism, topology,
                     CostParamsFor(topology, s.cost_overrides), s.knobs);
    return {200, ResultEnvelope(SimulationResultJson(s, sim))};
  });
}

ApiResponse HandlePlan(const Json& request, const ApiOptions& options) {
  return Guard([&]() -> ApiResponse {
    ParsedConfig parsed =
        ParseRunConfig(request, options.parse, {"constraints"});
    const PlanConstraints constraints = ReadConstraints(request, &parsed.errors);
    if (!parsed.ok()) return Errors(parsed.errors);
    const Scenario& s = parsed.scenario;
    const int cost = static_cast<int>(
        EnumerateConfigs(s.workload, s.topology(), constraints).size());
    if (cost > options.max_configs) {
      return Error(400, "/constraints",
                   "plan would simulate " + std::to_string(cost) +
                       " configs; the cap is " +
                       std::to_string(options.max_configs));
    }
    return {200, ResultEnvelope(ToJson(Plan(s, constraints)))};
  });
}

ApiResponse HandleSweep(const Json& request, const ApiOptions& options) {
  return Guard([&]() -> ApiResponse {
    ParsedConfig parsed =
        ParseRunConfig(request, options.parse, {"constraints", "sweep"});
    const PlanConstraints constraints = ReadConstraints(request, &parsed.errors);
    SweepAxis axis = SweepAxis::kWorld;
    std::vector<std::string> values;
    bool replan = true;
    bool replan_given = false;
    if (!request.is_object() || !request.contains("sweep")) {
      parsed.errors.push_back(
          {"/sweep", "required field missing", Violation::Severity::kError});
    } else {
      const Json& sw = request.at("sweep");
      if (!sw.is_object()) {
        parsed.errors.push_back(
            {"/sweep", "expected an object", Violation::Severity::kError});
      } else {
        for (auto it = sw.begin(); it != sw.end(); ++it) {
          if (it.key() != "axis" && it.key() != "values" &&
              it.key() != "replan") {
            parsed.errors.push_back({"/sweep/" + it.key(), "unknown field",
                                     Violation::Severity::kError});
          }
        }
        if (!sw.contains("axis") || !sw.at("axis").is_string() ||
            !ParseSweepAxis(sw.at("axis").get<std::string>())) {
          parsed.errors.push_back(
              {"/sweep/axis",
               "axis must be one of world, strong, batch, model, seqlen, hw",
               Violation::Severity::kError});
        } else {
          axis = *ParseSweepAxis(sw.at("axis").get<std::string>());
        }
        if (!sw.contains("values") || !sw.at("values").is_array() ||
            sw.at("values").empty()) {
          parsed.errors.push_back({"/sweep/values",
                                   "expected a nonempty array",
                                   Violation::Severity::kError});
        } else {
          const Json& vs = sw.at("values");
          for (size_t i = 0; i < vs.size(); ++i) {
            if (vs[i].is_string()) {
              values.push_back(vs[i].get<std::string>());
            } else if (vs[i].is_number_integer()) {
              values.push_back(std::to_string(vs[i].get<long long>()));
            } else {
              parsed.errors.push_back(
                  {"/sweep/values/" + std::to_string(i),
                   "expected a string or an integer",
                   Violation::Severity::kError});
            }
          }
        }
        if (sw.contains("replan")) {
          if (!sw.at("replan").is_boolean()) {
            parsed.errors.push_back({"/sweep/replan", "expected a boolean",
                                     Violation::Severity::kError});
          } else {
            replan = sw.at("replan").get<bool>();
            replan_given = true;
          }
        }
      }
    }
    if (!parsed.ok()) return Errors(parsed.errors);
    Scenario s = parsed.scenario;
    if (!replan_given) replan = !parsed.has_parallelism;
    const bool needs_config =
        axis == SweepAxis::kWorld ||
        (!replan && axis != SweepAxis::kStrong);
    if (needs_config && !parsed.has_parallelism) {
      if (axis != SweepAxis::kWorld) {
        return Error(400, "/parallelism",
                     "a fixed-config sweep needs a parallelism block");
      }
      s.parallelism.local_batch = 2;
    }
    const int cost = EstimateSweepCost(s, axis, values, replan, constraints);
    if (cost > options.max_configs) {
      return Error(400, "/sweep",
                   "sweep would simulate " + std::to_string(cost) +
                       " configs; the cap is " +
                       std::to_string(options.max_configs));
    }
    return {200,
            ResultEnvelope(ToJson(SweepAlong(s, axis, values, replan,
                                             constraints)))};
  });
}

ApiResponse HandleDecide(const Json& request, const ApiOptions& options) {
  return Guard([&]() -> ApiResponse {
    std::vector<Violation> errors;
    if (!request.is_object() || !request.contains("from") ||
        !request.contains("to")) {
      return Error(400, "", "expected an object with 'from' and 'to' configs");
    }
    for (auto it = request.begin(); it != request.end(); ++it) {
      if (it.key() != "from" && it.key() != "to") {
        errors.push_back(
            {"/" + it.key(), "unknown field", Violation::Severity::kError});
      }
    }
    ParsedConfig sides[2];
    const char* names[2] = {"from", "to"};
    for (int i = 0; i < 2; ++i) {
      sides[i] = ParseRunConfig(request.at(names[i]), options.parse);
      if (sides[i].ok() && !sides[i].has_parallelism) {
        sides[i].errors.push_back({"/parallelism", "required field missing",
                                   Violation::Severity::kError});
      }
      for (Violation v : sides[i].errors) {
        v.path = "/" + std::string(names[i]) + v.path;
        errors.push_back(std::move(v));
      }
    }
    if (!errors.empty()) return Errors(errors);
    const Scenario& a = sides[0].scenario;
    const Scenario& b = sides[1].scenario;
    Json ja = ScenarioToJson(a, false);
    Json jb = ScenarioToJson(b, false);
    for (const char* block : {"hardware", "model", "knobs", "cost_params"}) {
      if (ja[block] != jb[block]) {
        errors.push_back({"/to/" + std::string(block),
                          "differs from /from; decide compares parallelism "
                          "only",
                          Violation::Severity::kError});
      }
    }
    if (ja["workload"]["seq_len"] != jb["workload"]["seq_len"] ||
        ja["workload"]["param_bytes"] != jb["workload"]["param_bytes"]) {
      errors.push_back({"/to/workload", "differs from /from",
                        Violation::Severity::kError});
    }
    if (a.workload.global_batch != b.workload.global_batch) {
      errors.push_back({"/to/workload/global_batch",
                        "configs disagree on global batch: " +
                            std::to_string(a.workload.global_batch) + " vs " +
                            std::to_string(b.workload.global_batch),
                        Violation::Severity::kError});
    }
    if (!errors.empty()) return Errors(errors);
    const ClusterTopology topology = a.topology();
    const Decision d =
        Decide(a.workload, topology, a.parallelism, b.parallelism,
               CostParamsFor(topology, a.cost_overrides), a.knobs);
    Json result = ToJson(d);
    result["from"]["config"] = ToJson(a.parallelism);
    result["to"]["config"] = ToJson(b.parallelism);
    return {200, ResultEnvelope(std::move(result))};
  });
}

ApiResponse HandlePresets() {
  Json hardware;
  for (Generation g :
       {Generation::kV100, Generation::kA100, Generation::kH100}) {
    hardware[std::string(GenerationName(g))] = ToJson(Preset(g));
  }
  Json models;
  for (const std::string& name : ModelPresetNames()) {
    const TransformerArch arch = *ModelPreset(name);
    Json m = ToJson(arch);
    m["param_count"] = ParamCount(arch);
    models[name] = m;
  }
  Json result;
  result["hardware"] = hardware;
  result["models"] = models;
  Json knobs = ToJson(Knobs{});
  result["default_knobs"] = knobs;
  return {200, ResultEnvelope(std::move(result))};
}

}  // namespace shardsim
