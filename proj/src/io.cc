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


#include "shardsim/io.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "shardsim/errors.h"

namespace shardsim {

double RoundSignificant(double value, int digits) {
  if (!std::isfinite(value) || value == 0.0) return value;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, value);
  return std::strtod(buf, nullptr);
}

Json Number(double value) {
  if (!std::isfinite(value)) return nullptr;
  return RoundSignificant(value);
}

namespace {

std::string TypeName(const Json& j) { return j.type_name(); }

// Reads fields of one JSON object, recording errors against a JSON pointer.
class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string path, std::vector<Violation>* errors)
      : j_(j), path_(std::move(path)), errors_(errors) {
    if (!j_.is_object()) {
      Fail(path_.empty() ? "/" : path_,
           "expected an object, got " + TypeName(j_));
      valid_ = false;
    }
  }

  bool valid() const { return valid_; }
  bool Has(const std::string& key) const {
    return valid_ && j_.contains(key);
  }
  std::string Path(const std::string& key) const { return path_ + "/" + key; }
  const Json& At(const std::string& key) {
    used_.insert(key);
    return j_.at(key);
  }

  std::optional<std::int64_t> Int(const std::string& key) {
    if (!Has(key)) return std::nullopt;
    const Json& v = At(key);
    if (v.is_number_integer()) return v.get<std::int64_t>();
    if (v.is_number_float()) {
      const double d = v.get<double>();
      if (std::floor(d) == d && std::abs(d) < 9e15) {
        return static_cast<std::int64_t>(d);
      }
    }
    Fail(Path(key), "expected an integer, got " + Describe(v));
    return std::nullopt;
  }

  std::optional<double> Double(const std::string& key) {
    if (!Has(key)) return std::nullopt;
    const Json& v = At(key);
    if (v.is_number()) return v.get<double>();
    Fail(Path(key), "expected a number, got " + Describe(v));
    return std::nullopt;
  }

  std::optional<std::string> String(const std::string& key) {
    if (!Has(key)) return std::nullopt;
    const Json& v = At(key);
    if (v.is_string()) return v.get<std::string>();
    Fail(Path(key), "expected a string, got " + Describe(v));
    return std::nullopt;
  }

  std::optional<bool> Bool(const std::string& key) {
    if (!Has(key)) return std::nullopt;
    const Json& v = At(key);
    if (v.is_boolean()) return v.get<bool>();
    Fail(Path(key), "expected a boolean, got " + Describe(v));
    return std::nullopt;
  }

  void ReadInt(const std::string& key, int* out) {
    if (auto v = Int(key)) {
      if (*v < INT32_MIN || *v > INT32_MAX) {
        Fail(Path(key), "integer out of range");
      } else {
        *out = static_cast<int>(*v);
      }
    }
  }
  void ReadInt(const std::string& key, std::int64_t* out) {
    if (auto v = Int(key)) *out = *v;
  }
  void ReadDouble(const std::string& key, double* out) {
    if (auto v = Double(key)) *out = *v;
  }

  void Require(const std::string& key) {
    if (valid_ && !j_.contains(key)) Fail(Path(key), "required field missing");
  }

  void Fail(std::string path, std::string message) {
    errors_->push_back(
        {std::move(path), std::move(message), Violation::Severity::kError});
  }

  // Reports keys nobody read.
  void RejectUnknown() {
    if (!valid_) return;
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!used_.count(it.key())) Fail(Path(it.key()), "unknown field");
    }
  }

  void MarkUsed(const std::string& key) { used_.insert(key); }

 private:
  static std::string Describe(const Json& v) {
    return TypeName(v) + " " + v.dump();
  }

  const Json& j_;
  std::string path_;
  std::vector<Violation>* errors_;
  std::set<std::string> used_;
  bool valid_ = true;
};

void PushAll(const std::vector<std::string>& messages, const std::string& path,
             std::vector<Violation>* errors) {
  for (const std::string& m : messages) {
    errors->push_back({path, m, Violation::Severity::kError});
  }
}

NodeSpec ParseHardware(const Json& j, int* num_nodes,
                       std::vector<Violation>* errors) {
  ObjectReader r(j, "/hardware", errors);
  NodeSpec node;
  if (!r.valid()) return node;
  const std::optional<std::string> preset = r.String("preset");
  const bool custom = !preset.has_value();
  if (preset) {
    const std::optional<Generation> gen = ParseGeneration(*preset);
    if (!gen) {
      r.Fail(r.Path("preset"),
             "unknown hardware preset '" + *preset + "' (v100, a100, h100)");
    } else {
      node = Preset(*gen);
    }
  } else {
    node = NodeSpec{};
    for (const char* key : {"gpu", "intranode_bandwidth", "internode_bandwidth",
                            "intranode_latency", "internode_latency"}) {
      r.Require(key);
    }
  }
  r.Require("num_nodes");
  r.ReadInt("num_nodes", num_nodes);
  r.ReadInt("gpus_per_node", &node.gpus_per_node);
  r.ReadDouble("intranode_bandwidth", &node.intranode_bandwidth);
  r.ReadDouble("internode_bandwidth", &node.internode_bandwidth);
  r.ReadDouble("intranode_latency", &node.intranode_latency);
  r.ReadDouble("internode_latency", &node.internode_latency);
  if (r.Has("gpu")) {
    ObjectReader g(r.At("gpu"), "/hardware/gpu", errors);
    if (g.valid()) {
      if (custom) {
        for (const char* key : {"peak_flops", "hbm_bandwidth",
                                "memory_capacity", "power_peak", "power_idle"}) {
          g.Require(key);
        }
      }
      if (auto name = g.String("name")) node.gpu.name = *name;
      g.ReadDouble("peak_flops", &node.gpu.peak_flops);
      g.ReadDouble("hbm_bandwidth", &node.gpu.hbm_bandwidth);
      g.ReadDouble("memory_capacity", &node.gpu.memory_capacity);
      g.ReadDouble("power_peak", &node.gpu.power_peak);
      g.ReadDouble("power_idle", &node.gpu.power_idle);
      g.RejectUnknown();
    }
  }
  r.RejectUnknown();
  if (custom && node.gpu.name.empty()) node.gpu.name = "custom";
  return node;
}

TransformerArch ParseModel(const Json& j, std::vector<Violation>* errors) {
  ObjectReader r(j, "/model", errors);
  TransformerArch arch;
  if (!r.valid()) return arch;
  if (auto preset = r.String("preset")) {
    if (auto found = ModelPreset(*preset)) {
      arch = *found;
    } else {
      r.Fail(r.Path("preset"),
             "unknown model preset '" + *preset + "' (1b, 7b, 13b, 70b)");
    }
  } else {
    for (const char* key : {"num_layers", "hidden_dim", "num_heads", "ffn_dim",
                            "vocab_size", "max_seq_len"}) {
      r.Require(key);
    }
  }
  r.ReadInt("num_layers", &arch.num_layers);
  r.ReadInt("hidden_dim", &arch.hidden_dim);
  r.ReadInt("num_heads", &arch.num_heads);
  r.ReadInt("ffn_dim", &arch.ffn_dim);
  r.ReadInt("vocab_size", &arch.vocab_size);
  r.ReadInt("max_seq_len", &arch.max_seq_len);
  r.RejectUnknown();
  return arch;
}

ParallelismConfig ParseParallelism(const Json& j,
                                   std::vector<Violation>* errors) {
  ObjectReader r(j, "/parallelism", errors);
  ParallelismConfig c;
  if (!r.valid()) return c;
  r.Require("dp_shard");
  r.Require("local_batch");
  r.ReadInt("dp_shard", &c.dp_shard);
  r.ReadInt("tp", &c.tp);
  r.ReadInt("pp", &c.pp);
  r.ReadInt("local_batch", &c.local_batch);
  r.ReadInt("microbatches", &c.num_microbatches);
  r.ReadInt("grad_accum", &c.grad_accum);
  if (auto s = r.String("sharding")) {
    if (auto mode = ParseShardingMode(*s)) {
      c.sharding = *mode;
    } else {
      r.Fail(r.Path("sharding"), "sharding must be 'zero2' or 'zero3'");
    }
  }
  if (auto s = r.String("schedule")) {
    if (*s != "gpipe") r.Fail(r.Path("schedule"), "schedule must be 'gpipe'");
  }
  r.RejectUnknown();
  return c;
}

Knobs ParseKnobs(const Json& j, std::vector<Violation>* errors) {
  ObjectReader r(j, "/knobs", errors);
  Knobs k;
  if (!r.valid()) return k;
  r.ReadInt("prefetch_depth", &k.prefetch_depth);
  r.ReadDouble("compute_efficiency", &k.compute_efficiency);
  r.ReadDouble("s_b_exponent", &k.s_b_exponent);
  r.ReadDouble("s_b_saturation", &k.s_b_saturation);
  r.ReadDouble("tp_overlap", &k.tp_overlap);
  r.RejectUnknown();
  PushAll(CheckKnobs(k), "/knobs", errors);
  return k;
}

}  // namespace

CollectiveCostParams ParseCostParams(const Json& j, const std::string& path,
                                     std::vector<Violation>* errors) {
  CollectiveCostParams params;
  ObjectReader r(j, path, errors);
  if (!r.valid()) return params;
  if (auto a = r.String("allreduce_intra")) {
    if (auto alg = ParseAlgorithm(*a); alg && *alg != Algorithm::kDirect) {
      params.allreduce_intra = *alg;
    } else {
      r.Fail(r.Path("allreduce_intra"), "expected 'ring' or 'tree'");
    }
  }
  if (auto a = r.String("allreduce_cross")) {
    if (auto alg = ParseAlgorithm(*a); alg && *alg != Algorithm::kDirect) {
      params.allreduce_cross = *alg;
    } else {
      r.Fail(r.Path("allreduce_cross"), "expected 'ring' or 'tree'");
    }
  }
  if (auto c = r.Bool("calibrated")) params.calibrated = *c;
  if (r.Has("entries")) {
    const Json& entries = r.At("entries");
    const std::string entries_path = r.Path("entries");
    if (!entries.is_array()) {
      r.Fail(entries_path, "expected an array");
    } else {
      for (size_t i = 0; i < entries.size(); ++i) {
        const std::string ep = entries_path + "/" + std::to_string(i);
        ObjectReader e(entries[i], ep, errors);
        if (!e.valid()) continue;
        e.Require("kind");
        e.Require("algorithm");
        e.Require("span");
        CostKey key{CollectiveKind::kAllGather, Algorithm::kRing,
                    Span::kCrossNode};
        bool key_ok = true;
        if (auto s = e.String("kind")) {
          if (auto k = ParseCollectiveKind(*s)) {
            key.kind = *k;
          } else {
            e.Fail(e.Path("kind"), "unknown collective '" + *s + "'");
            key_ok = false;
          }
        }
        if (auto s = e.String("algorithm")) {
          if (auto a = ParseAlgorithm(*s)) {
            key.algorithm = *a;
          } else {
            e.Fail(e.Path("algorithm"), "unknown algorithm '" + *s + "'");
            key_ok = false;
          }
        }
        if (auto s = e.String("span")) {
          if (*s == "intra_node") {
            key.span = Span::kIntraNode;
          } else if (*s == "cross_node") {
            key.span = Span::kCrossNode;
          } else {
            e.Fail(e.Path("span"), "span must be 'intra_node' or 'cross_node'");
            key_ok = false;
          }
        }
        CostEntry entry;
        e.ReadDouble("alpha", &entry.alpha);
        e.ReadDouble("beta", &entry.beta);
        if (e.Has("measured_curve")) {
          const Json& curve = e.At("measured_curve");
          if (!curve.is_array()) {
            e.Fail(e.Path("measured_curve"), "expected an array");
          } else {
            for (size_t k = 0; k < curve.size(); ++k) {
              ObjectReader p(curve[k],
                             e.Path("measured_curve") + "/" + std::to_string(k),
                             errors);
              if (!p.valid()) continue;
              p.Require("group_size");
              p.Require("message_bytes");
              p.Require("bus_bandwidth");
              MeasuredBandwidthPoint point;
              p.ReadInt("group_size", &point.group_size);
              p.ReadDouble("message_bytes", &point.message_bytes);
              p.ReadDouble("bus_bandwidth", &point.bus_bandwidth);
              p.RejectUnknown();
              if (point.group_size < 2 || !(point.message_bytes > 0) ||
                  !(point.bus_bandwidth > 0)) {
                p.Fail(e.Path("measured_curve") + "/" + std::to_string(k),
                       "needs group_size >= 2 and positive sizes");
              }
              entry.measured_curve.push_back(point);
            }
          }
        }
        e.RejectUnknown();
        if (entry.measured_curve.empty()) {
          if (!(entry.alpha >= 0.0)) e.Fail(e.Path("alpha"), "alpha must be >= 0");
          if (!(entry.beta > 0.0)) e.Fail(e.Path("beta"), "beta must be > 0");
        }
        if (key_ok) params.Set(key, std::move(entry));
      }
    }
  }
  r.RejectUnknown();
  return params;
}

PlanConstraints ParseConstraints(const Json& j, const std::string& path,
                                 std::vector<Violation>* errors) {
  PlanConstraints c;
  ObjectReader r(j, path, errors);
  if (!r.valid()) return c;
  r.ReadInt("max_tp", &c.max_tp);
  r.ReadInt("max_pp", &c.max_pp);
  if (auto cap = r.Double("memory_cap_bytes")) {
    if (!(*cap > 0)) r.Fail(r.Path("memory_cap_bytes"), "must be positive");
    c.memory_cap = *cap;
  }
  if (r.Has("grad_accum")) {
    const Json& g = r.At("grad_accum");
    c.grad_accum.clear();
    if (!g.is_array() || g.empty()) {
      r.Fail(r.Path("grad_accum"), "expected a nonempty array of integers");
    } else {
      for (size_t i = 0; i < g.size(); ++i) {
        if (!g[i].is_number_integer() || g[i].get<int>() < 1) {
          r.Fail(r.Path("grad_accum") + "/" + std::to_string(i),
                 "expected an integer >= 1");
        } else {
          c.grad_accum.push_back(g[i].get<int>());
        }
      }
    }
  }
  if (auto s = r.String("sharding")) {
    if (auto mode = ParseShardingMode(*s)) {
      c.sharding = *mode;
    } else {
      r.Fail(r.Path("sharding"), "sharding must be 'zero2' or 'zero3'");
    }
  }
  if (auto s = r.String("objective")) {
    if (auto o = ParseObjective(*s)) {
      c.objective = *o;
    } else {
      r.Fail(r.Path("objective"), "objective must be 'throughput' or 'energy'");
    }
  }
  if (c.max_tp < 1) r.Fail(r.Path("max_tp"), "must be >= 1");
  if (c.max_pp < 1) r.Fail(r.Path("max_pp"), "must be >= 1");
  r.RejectUnknown();
  return c;
}

ParsedConfig ParseRunConfig(const Json& config, const ParseOptions& options,
                            const std::vector<std::string>& extra_keys) {
  ParsedConfig out;
  std::vector<Violation>* errors = &out.errors;
  ObjectReader r(config, "", errors);
  if (!r.valid()) return out;
  for (const std::string& key : extra_keys) r.MarkUsed(key);
  Scenario& s = out.scenario;

  r.Require("hardware");
  r.Require("model");
  if (r.Has("hardware")) s.node = ParseHardware(r.At("hardware"), &s.num_nodes, errors);
  if (r.Has("model")) s.workload.arch = ParseModel(r.At("model"), errors);
  if (r.Has("parallelism")) {
    s.parallelism = ParseParallelism(r.At("parallelism"), errors);
    out.has_parallelism = true;
  }
  bool have_global_batch = false;
  s.workload.seq_len = 4096;
  if (r.Has("workload")) {
    ObjectReader w(r.At("workload"), "/workload", errors);
    if (w.valid()) {
      have_global_batch = w.Has("global_batch");
      w.ReadInt("global_batch", &s.workload.global_batch);
      w.ReadInt("seq_len", &s.workload.seq_len);
      w.ReadInt("param_bytes", &s.workload.param_bytes);
      w.RejectUnknown();
    }
  }
  if (!have_global_batch) {
    if (out.has_parallelism) {
      s.workload.global_batch = s.parallelism.global_batch();
    } else {
      out.errors.push_back({"/workload/global_batch",
                            "required when there is no parallelism block",
                            Violation::Severity::kError});
    }
  }
  if (r.Has("knobs")) s.knobs = ParseKnobs(r.At("knobs"), errors);
  if (r.Has("cost_params")) {
    const Json& cp = r.At("cost_params");
    if (cp.is_string()) {
      if (!options.allow_cost_params_path || options.base_dir.empty()) {
        r.Fail("/cost_params", "file references are not accepted here; inline "
                               "the calibration object");
      } else {
        std::filesystem::path p = cp.get<std::string>();
        if (p.is_relative()) p = options.base_dir / p;
        std::ifstream in(p);
        if (!in) {
          r.Fail("/cost_params", "cannot read " + p.string());
        } else {
          try {
            Json loaded = Json::parse(in);
            s.cost_overrides = ParseCostParams(loaded, "/cost_params", errors);
          } catch (const Json::parse_error& e) {
            r.Fail("/cost_params", p.string() + ": " + e.what());
          }
        }
      }
    } else {
      s.cost_overrides = ParseCostParams(cp, "/cost_params", errors);
    }
  }
  r.RejectUnknown();

  if (!out.errors.empty()) return out;
  PushAll(CheckNodeSpec(s.node), "/hardware", errors);
  if (s.num_nodes < 1) {
    out.errors.push_back(
        {"/hardware/num_nodes", "num_nodes must be >= 1", Violation::Severity::kError});
  }
  for (const std::string& e : CheckArch(s.workload.arch)) {
    out.errors.push_back({"/model", e, Violation::Severity::kError});
  }
  for (const std::string& e : CheckWorkload(s.workload)) {
    // Arch problems were reported against /model already.
    bool dup = false;
    for (const std::string& a : CheckArch(s.workload.arch)) dup |= a == e;
    if (!dup) out.errors.push_back({"/workload", e, Violation::Severity::kError});
  }
  if (!out.errors.empty() || !out.has_parallelism) return out;
  for (Violation& v : Validate(s.parallelism, s.topology(), s.workload)) {
    if (v.severity == Violation::Severity::kError && v.path != "/model") {
      out.errors.push_back(std::move(v));
    }
  }
  return out;
}

Json ToJson(const NodeSpec& node) {
  Json gpu;
  gpu["name"] = node.gpu.name;
  gpu["peak_flops"] = Number(node.gpu.peak_flops);
  gpu["hbm_bandwidth"] = Number(node.gpu.hbm_bandwidth);
  gpu["memory_capacity"] = Number(node.gpu.memory_capacity);
  gpu["power_peak"] = Number(node.gpu.power_peak);
  gpu["power_idle"] = Number(node.gpu.power_idle);
  Json j;
  j["gpu"] = gpu;
  j["gpus_per_node"] = node.gpus_per_node;
  j["intranode_bandwidth"] = Number(node.intranode_bandwidth);
  j["internode_bandwidth"] = Number(node.internode_bandwidth);
  j["intranode_latency"] = Number(node.intranode_latency);
  j["internode_latency"] = Number(node.internode_latency);
  return j;
}

Json ToJson(const TransformerArch& arch) {
  Json j;
  j["num_layers"] = arch.num_layers;
  j["hidden_dim"] = arch.hidden_dim;
  j["num_heads"] = arch.num_heads;
  j["ffn_dim"] = arch.ffn_dim;
  j["vocab_size"] = arch.vocab_size;
  j["max_seq_len"] = arch.max_seq_len;
  return j;
}

Json ToJson(const ParallelismConfig& c) {
  Json j;
  j["dp_shard"] = c.dp_shard;
  j["tp"] = c.tp;
  j["pp"] = c.pp;
  j["local_batch"] = c.local_batch;
  j["microbatches"] = c.num_microbatches;
  j["grad_accum"] = c.grad_accum;
  j["sharding"] = std::string(ShardingModeName(c.sharding));
  j["schedule"] = "gpipe";
  return j;
}

Json ToJson(const Knobs& k) {
  Json j;
  j["prefetch_depth"] = k.prefetch_depth;
  j["compute_efficiency"] = Number(k.compute_efficiency);
  j["s_b_exponent"] = Number(k.s_b_exponent);
  j["s_b_saturation"] = Number(k.s_b_saturation);
  j["tp_overlap"] = Number(k.tp_overlap);
  return j;
}

Json ToJson(const CollectiveCostParams& params) {
  Json j;
  j["allreduce_intra"] = std::string(AlgorithmName(params.allreduce_intra));
  j["allreduce_cross"] = std::string(AlgorithmName(params.allreduce_cross));
  j["calibrated"] = params.calibrated;
  Json entries = Json::array();
  for (const auto& [key, entry] : params.entries()) {
    Json e;
    e["kind"] = std::string(CollectiveKindName(key.kind));
    e["algorithm"] = std::string(AlgorithmName(key.algorithm));
    e["span"] = std::string(SpanName(key.span));
    e["alpha"] = Number(entry.alpha);
    e["beta"] = Number(entry.beta);
    if (!entry.measured_curve.empty()) {
      Json curve = Json::array();
      for (const MeasuredBandwidthPoint& p : entry.measured_curve) {
        Json q;
        q["group_size"] = p.group_size;
        q["message_bytes"] = Number(p.message_bytes);
        q["bus_bandwidth"] = Number(p.bus_bandwidth);
        curve.push_back(q);
      }
      e["measured_curve"] = curve;
    }
    entries.push_back(e);
  }
  j["entries"] = entries;
  return j;
}

Json ToJson(const MemoryBreakdown& m) {
  Json j;
  j["params"] = Number(m.params);
  j["grads"] = Number(m.grads);
  j["optimizer"] = Number(m.optimizer);
  j["activations"] = Number(m.activations);
  j["total"] = Number(m.total());
  return j;
}

Json ToJson(const StepBreakdown& b, bool with_phases) {
  Json j;
  j["compute_time"] = Number(b.compute_time);
  j["comm_total"] = Number(b.comm_total);
  j["comm_exposed"] = Number(b.comm_exposed);
  j["bubble_time"] = Number(b.bubble_time);
  j["step_time"] = Number(b.step_time);
  if (with_phases) {
    Json phases = Json::array();
    for (const PhaseBreakdown& p : b.per_phase) {
      Json q;
      q["label"] = p.label;
      q["compute"] = Number(p.compute);
      q["comm"] = Number(p.comm);
      q["exposed"] = Number(p.exposed);
      phases.push_back(q);
    }
    j["per_phase"] = phases;
  }
  return j;
}

Json ToJson(const MetricsReport& m) {
  Json j;
  j["wps_global"] = Number(m.wps_global);
  j["wps_per_gpu"] = Number(m.wps_per_gpu);
  j["mfu"] = Number(m.mfu);
  j["observed_flops_per_gpu"] = Number(m.observed_flops_per_gpu);
  j["power_per_gpu"] = Number(m.power_per_gpu);
  j["tokens_per_watt"] = Number(m.tokens_per_watt);
  j["memory_per_gpu_bytes"] = Number(m.memory_per_gpu_bytes);
  j["exposed_comm_fraction"] = Number(m.exposed_comm_fraction);
  return j;
}

Json ToJson(const PlanConstraints& c) {
  Json j;
  j["max_tp"] = c.max_tp;
  j["max_pp"] = c.max_pp;
  j["memory_cap_bytes"] =
      c.memory_cap ? Number(*c.memory_cap) : Json(nullptr);
  j["grad_accum"] = c.grad_accum;
  j["sharding"] = std::string(ShardingModeName(c.sharding));
  j["objective"] = std::string(ObjectiveName(c.objective));
  return j;
}

Json ToJson(const PlanResult& plan) {
  Json j;
  j["feasible"] = plan.feasible();
  if (!plan.feasible()) j["message"] = "no feasible configuration";
  j["enumerated"] = plan.enumerated;
  j["infeasible"] = plan.infeasible;
  j["constraints"] = ToJson(plan.constraints);
  Json ranked = Json::array();
  int rank = 1;
  for (const PlanEntry& e : plan.ranked) {
    Json q;
    q["rank"] = rank++;
    q["config"] = ToJson(e.config);
    q["metrics"] = ToJson(e.metrics);
    q["breakdown"] = ToJson(e.breakdown, false);
    ranked.push_back(q);
  }
  j["ranked"] = ranked;
  Json rejected = Json::array();
  for (const RejectedConfig& r : plan.rejected) {
    Json q;
    q["config"] = ToJson(r.config);
    q["reason"] = r.reason;
    rejected.push_back(q);
  }
  j["rejected"] = rejected;
  return j;
}

Json ToJson(const SweepSeries& series) {
  Json j;
  j["axis"] = std::string(SweepAxisName(series.axis));
  Json points = Json::array();
  for (const SweepPoint& p : series.points) {
    Json q;
    q["axis_value"] = Number(p.axis_value);
    q["label"] = p.label;
    q["num_nodes"] = p.num_nodes;
    q["world_size"] = p.config.world_size();
    q["feasible"] = p.feasible;
    q["config"] = ToJson(p.config);
    q["metrics"] = ToJson(p.metrics);
    q["breakdown"] = ToJson(p.breakdown, false);
    if (p.wps_ideal) q["wps_ideal"] = Number(*p.wps_ideal);
    points.push_back(q);
  }
  j["points"] = points;
  j["notices"] = series.notices;
  j["simulated"] = series.simulated;
  return j;
}

Json ToJson(const ShardScaling& s) {
  Json j;
  j["p"] = Number(s.p);
  j["p_prime"] = Number(s.p_prime);
  j["s_b"] = Number(s.s_b);
  j["s_c"] = Number(s.s_c);
  j["ell"] = Number(s.ell);
  j["c"] = Number(s.c);
  return j;
}

namespace {

Json SimulationJson(const SimulationResult& sim, const MetricsReport& metrics) {
  Json j;
  j["feasible"] = sim.feasible;
  if (!sim.feasible) j["infeasibility"] = sim.infeasibility;
  j["critical_stage"] = sim.critical_stage;
  j["memory"] = ToJson(sim.memory);
  j["breakdown"] = ToJson(sim.breakdown, false);
  j["metrics"] = ToJson(metrics);
  return j;
}

}  // namespace

Json ToJson(const Decision& d) {
  Json j;
  j["scaling"] = ToJson(d.scaling);
  j["improves"] = d.improves;
  j["simulated_throughput_ratio"] = Number(d.simulated_throughput_ratio);
  j["agrees"] = d.agrees;
  j["from"] = SimulationJson(d.from, d.from_metrics);
  j["to"] = SimulationJson(d.to, d.to_metrics);
  return j;
}

Json ToJson(const std::vector<Violation>& violations) {
  Json arr = Json::array();
  for (const Violation& v : violations) {
    Json e;
    e["path"] = v.path;
    e["message"] = v.message;
    e["severity"] =
        v.severity == Violation::Severity::kError ? "error" : "infeasible";
    arr.push_back(e);
  }
  return arr;
}

Json ScenarioToJson(const Scenario& s, bool with_parallelism) {
  Json j;
  Json hw = ToJson(s.node);
  Json ordered;
  ordered["num_nodes"] = s.num_nodes;
  for (auto it = hw.begin(); it != hw.end(); ++it) ordered[it.key()] = it.value();
  j["hardware"] = ordered;
  j["model"] = ToJson(s.workload.arch);
  Json w;
  w["global_batch"] = s.workload.global_batch;
  w["seq_len"] = s.workload.seq_len;
  w["param_bytes"] = s.workload.param_bytes;
  j["workload"] = w;
  if (with_parallelism) j["parallelism"] = ToJson(s.parallelism);
  j["knobs"] = ToJson(s.knobs);
  j["cost_params"] = ToJson(s.cost_overrides);
  return j;
}

Json ResultEnvelope(Json result) {
  Json j;
  j["engine_version"] = kEngineVersion;
  j["result"] = std::move(result);
  return j;
}

Json ErrorEnvelope(const std::vector<Violation>& errors) {
  Json j;
  j["engine_version"] = kEngineVersion;
  j["errors"] = ToJson(errors);
  return j;
}

namespace {

std::string Fmt(double v) {
  if (!std::isfinite(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

constexpr char kConfigColumns[] =
    "dp_shard,tp,pp,local_batch,microbatches,grad_accum,sharding";
constexpr char kResultColumns[] =
    "compute_time,comm_total,comm_exposed,bubble_time,step_time,wps_global,"
    "wps_per_gpu,mfu,observed_flops_per_gpu,power_per_gpu,tokens_per_watt,"
    "memory_per_gpu_bytes,exposed_comm_fraction";

std::string ConfigCells(const ParallelismConfig& c) {
  return std::to_string(c.dp_shard) + "," + std::to_string(c.tp) + "," +
         std::to_string(c.pp) + "," + std::to_string(c.local_batch) + "," +
         std::to_string(c.num_microbatches) + "," +
         std::to_string(c.grad_accum) + "," +
         std::string(ShardingModeName(c.sharding));
}

std::string ResultCells(const StepBreakdown& b, const MetricsReport& m) {
  std::string out;
  for (double v :
       {b.compute_time, b.comm_total, b.comm_exposed, b.bubble_time,
        b.step_time, m.wps_global, m.wps_per_gpu, m.mfu,
        m.observed_flops_per_gpu, m.power_per_gpu, m.tokens_per_watt,
        m.memory_per_gpu_bytes, m.exposed_comm_fraction}) {
    if (!out.empty()) out += ",";
    out += Fmt(v);
  }
  return out;
}

}  // namespace

std::string SweepCsv(const SweepSeries& series) {
  std::ostringstream out;
  out << "axis,axis_value,label,num_nodes,world_size,feasible," << kConfigColumns
      << "," << kResultColumns << ",wps_ideal\n";
  for (const SweepPoint& p : series.points) {
    out << SweepAxisName(series.axis) << "," << Fmt(p.axis_value) << ","
        << CsvField(p.label) << "," << p.num_nodes << ","
        << p.config.world_size() << "," << (p.feasible ? "true" : "false")
        << "," << ConfigCells(p.config) << ","
        << ResultCells(p.breakdown, p.metrics) << ","
        << (p.wps_ideal ? Fmt(*p.wps_ideal) : "") << "\n";
  }
  return out.str();
}

std::string PlanCsv(const PlanResult& plan) {
  std::ostringstream out;
  out << "rank," << kConfigColumns << "," << kResultColumns << "\n";
  int rank = 1;
  for (const PlanEntry& e : plan.ranked) {
    out << rank++ << "," << ConfigCells(e.config) << ","
        << ResultCells(e.breakdown, e.metrics) << "\n";
  }
  return out.str();
}

std::string CostParamsCsv(const CollectiveCostParams& params) {
  std::ostringstream out;
  out << "kind,algorithm,span,alpha_s,beta_bytes_per_s,measured_points\n";
  for (const auto& [key, entry] : params.entries()) {
    out << CollectiveKindName(key.kind) << "," << AlgorithmName(key.algorithm)
        << "," << SpanName(key.span) << "," << Fmt(entry.alpha) << ","
        << Fmt(entry.beta) << "," << entry.measured_curve.size() << "\n";
  }
  return out.str();
}

std::string MetricsTable(const StepBreakdown& b, const MetricsReport& m) {
  const std::pair<const char*, std::string> rows[] = {
      {"compute_time_s", Fmt(b.compute_time)},
      {"comm_total_s", Fmt(b.comm_total)},
      {"comm_exposed_s", Fmt(b.comm_exposed)},
      {"bubble_time_s", Fmt(b.bubble_time)},
      {"step_time_s", Fmt(b.step_time)},
      {"wps_global", Fmt(m.wps_global)},
      {"wps_per_gpu", Fmt(m.wps_per_gpu)},
      {"mfu", Fmt(m.mfu)},
      {"observed_flops_per_gpu", Fmt(m.observed_flops_per_gpu)},
      {"power_per_gpu_w", Fmt(m.power_per_gpu)},
      {"tokens_per_watt", Fmt(m.tokens_per_watt)},
      {"memory_per_gpu_gib", Fmt(m.memory_per_gpu_bytes / kGiB)},
      {"exposed_comm_fraction", Fmt(m.exposed_comm_fraction)},
  };
  std::string out;
  char line[128];
  for (const auto& [name, value] : rows) {
    std::snprintf(line, sizeof(line), "%-24s %14s\n", name, value.c_str());
    out += line;
  }
  return out;
}

std::string SweepTable(const SweepSeries& series) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-10s %6s %4s %4s %6s %12s %8s %8s %8s\n",
                "value", "world", "tp", "pp", "dp", "wps_global", "mfu",
                "exposed", "power_w");
  out += line;
  for (const SweepPoint& p : series.points) {
    std::snprintf(line, sizeof(line),
                  "%-10s %6d %4d %4d %6d %12s %8s %8s %8s\n", p.label.c_str(),
                  p.config.world_size(), p.config.tp, p.config.pp,
                  p.config.dp_shard, Fmt(p.metrics.wps_global).c_str(),
                  Fmt(p.metrics.mfu).c_str(),
                  Fmt(p.metrics.exposed_comm_fraction).c_str(),
                  Fmt(p.metrics.power_per_gpu).c_str());
    out += line;
  }
  for (const std::string& n : series.notices) out += "# " + n + "\n";
  return out;
}

std::string PlanTable(const PlanResult& plan, int max_rows) {
  if (!plan.feasible()) return "no feasible configuration\n";
  std::string out;
  char line[256];
  std::snprintf(line, sizeof(line), "%4s %6s %4s %4s %6s %4s %12s %8s %8s\n",
                "rank", "dp", "tp", "pp", "batch", "m", "wps_global", "mfu",
                "exposed");
  out += line;
  for (int i = 0; i < max_rows && i < static_cast<int>(plan.ranked.size());
       ++i) {
    const PlanEntry& e = plan.ranked[i];
    std::snprintf(line, sizeof(line), "%4d %6d %4d %4d %6lld %4d %12s %8s %8s\n",
                  i + 1, e.config.dp_shard, e.config.tp, e.config.pp,
                  static_cast<long long>(e.config.local_batch),
                  e.config.num_microbatches,
                  Fmt(e.metrics.wps_global).c_str(), Fmt(e.metrics.mfu).c_str(),
                  Fmt(e.metrics.exposed_comm_fraction).c_str());
    out += line;
  }
  std::snprintf(line, sizeof(line), "# %d enumerated, %d infeasible\n",
                plan.enumerated, plan.infeasible);
  out += line;
  return out;
}

std::vector<BenchmarkRow> ParseBenchmarkCsv(const std::string& text) {
  std::vector<BenchmarkRow> rows;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (!header_seen) {
      header_seen = true;
      if (cells.size() != 4 || cells[0] != "kind" || cells[1] != "group_size" ||
          cells[2] != "message_bytes" ||
          cells[3] != "bus_bandwidth_bytes_per_s") {
        throw ConfigError(where +
                          "expected header kind,group_size,message_bytes,"
                          "bus_bandwidth_bytes_per_s");
      }
      continue;
    }
    if (cells.size() != 4) throw ConfigError(where + "expected 4 columns");
    const std::optional<CollectiveKind> kind = ParseCollectiveKind(cells[0]);
    if (!kind) throw ConfigError(where + "unknown collective '" + cells[0] + "'");
    char* end = nullptr;
    const long g = std::strtol(cells[1].c_str(), &end, 10);
    if (cells[1].empty() || *end != '\0' || g < 2) {
      throw ConfigError(where + "group_size must be an integer >= 2");
    }
    const double bytes = std::strtod(cells[2].c_str(), &end);
    if (cells[2].empty() || *end != '\0' || !(bytes > 0)) {
      throw ConfigError(where + "message_bytes must be positive");
    }
    const double bw = std::strtod(cells[3].c_str(), &end);
    if (cells[3].empty() || *end != '\0' || !(bw > 0)) {
      throw ConfigError(where + "bus bandwidth must be positive");
    }
    rows.push_back({*kind, {static_cast<int>(g), bytes, bw}});
  }
  if (!header_seen) throw ConfigError("empty benchmark file");
  return rows;
}

}  // namespace shardsim
