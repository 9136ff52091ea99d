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

namespace shardsim {

namespace {

constexpr char kSchema[] = R"json({
  "openapi": "3.0.3",
  "info": {"title": "shardsim", "version": "0.1.0"},
  "paths": {
    "/api/simulate": {"post": {
      "summary": "Simulate one training step for a run config",
      "requestBody": {"content": {"application/json": {"schema": {"$ref": "#/components/schemas/RunConfig"}}}},
      "responses": {"200": {"description": "result envelope; infeasible memory is a result"},
                    "400": {"description": "error envelope with violations"}}}},
    "/api/plan": {"post": {
      "summary": "Rank feasible parallelism configs",
      "requestBody": {"content": {"application/json": {"schema": {"allOf": [
        {"$ref": "#/components/schemas/RunConfig"},
        {"type": "object", "properties": {"constraints": {"$ref": "#/components/schemas/Constraints"}}}]}}}},
      "responses": {"200": {"description": "plan result"}, "400": {"description": "errors or cap exceeded"}}}},
    "/api/sweep": {"post": {
      "summary": "Sweep one axis",
      "requestBody": {"content": {"application/json": {"schema": {"allOf": [
        {"$ref": "#/components/schemas/RunConfig"},
        {"type": "object", "required": ["sweep"], "properties": {
          "constraints": {"$ref": "#/components/schemas/Constraints"},
          "sweep": {"type": "object", "required": ["axis", "values"], "properties": {
            "axis": {"type": "string", "enum": ["world", "strong", "batch", "model", "seqlen", "hw"]},
            "values": {"type": "array", "items": {"oneOf": [{"type": "string"}, {"type": "integer"}]}},
            "replan": {"type": "boolean"}}}}}]}}}},
      "responses": {"200": {"description": "sweep series"}, "400": {"description": "errors or cap exceeded"}}}},
    "/api/decide": {"post": {
      "summary": "Compare two parallelism configs with the sharding cost factor",
      "requestBody": {"content": {"application/json": {"schema": {"type": "object", "required": ["from", "to"], "properties": {
        "from": {"$ref": "#/components/schemas/RunConfig"},
        "to": {"$ref": "#/components/schemas/RunConfig"}}}}}},
      "responses": {"200": {"description": "decision record"}, "400": {"description": "errors"}}}},
    "/api/presets": {"get": {"summary": "Hardware and model presets", "responses": {"200": {"description": "presets"}}}},
    "/api/schema": {"get": {"summary": "This document", "responses": {"200": {"description": "schema"}}}}
  },
  "components": {"schemas": {
    "RunConfig": {"type": "object", "required": ["hardware", "model"], "properties": {
      "hardware": {"type": "object", "required": ["num_nodes"], "properties": {
        "preset": {"type": "string", "enum": ["v100", "a100", "h100"]},
        "num_nodes": {"type": "integer", "minimum": 1},
        "gpus_per_node": {"type": "integer"},
        "intranode_bandwidth": {"type": "number"}, "internode_bandwidth": {"type": "number"},
        "intranode_latency": {"type": "number"}, "internode_latency": {"type": "number"},
        "gpu": {"type": "object", "properties": {
          "name": {"type": "string"}, "peak_flops": {"type": "number"}, "hbm_bandwidth": {"type": "number"},
          "memory_capacity": {"type": "number"}, "power_peak": {"type": "number"}, "power_idle": {"type": "number"}}}}},
      "model": {"type": "object", "properties": {
        "preset": {"type": "string", "enum": ["1b", "7b", "13b", "70b"]},
        "num_layers": {"type": "integer"}, "hidden_dim": {"type": "integer"}, "num_heads": {"type": "integer"},
        "ffn_dim": {"type": "integer"}, "vocab_size": {"type": "integer"}, "max_seq_len": {"type": "integer"}}},
      "workload": {"type": "object", "properties": {
        "global_batch": {"type": "integer"}, "seq_len": {"type": "integer", "default": 4096},
        "param_bytes": {"type": "integer", "enum": [2, 4], "default": 2}}},
      "parallelism": {"type": "object", "required": ["dp_shard", "local_batch"], "properties": {
        "dp_shard": {"type": "integer"}, "tp": {"type": "integer", "default": 1}, "pp": {"type": "integer", "default": 1},
        "local_batch": {"type": "integer"}, "microbatches": {"type": "integer", "default": 1},
        "grad_accum": {"type": "integer", "default": 1},
        "sharding": {"type": "string", "enum": ["zero2", "zero3"], "default": "zero2"},
        "schedule": {"type": "string", "enum": ["gpipe"], "default": "gpipe"}}},
      "knobs": {"type": "object", "properties": {
        "prefetch_depth": {"type": "integer", "default": 1},
        "compute_efficiency": {"type": "number", "default": 0.65},
        "s_b_exponent": {"type": "number", "default": 1.0},
        "s_b_saturation": {"type": "number", "default": 16},
        "tp_overlap": {"type": "number", "default": 0.0}}},
      "cost_params": {"type": "object", "properties": {
        "allreduce_intra": {"type": "string", "enum": ["ring", "tree"]},
        "allreduce_cross": {"type": "string", "enum": ["ring", "tree"]},
        "calibrated": {"type": "boolean"},
        "entries": {"type": "array", "items": {"type": "object", "required": ["kind", "algorithm", "span"], "properties": {
          "kind": {"type": "string", "enum": ["AllGather", "ReduceScatter", "AllReduce", "PointToPoint"]},
          "algorithm": {"type": "string", "enum": ["ring", "tree", "direct"]},
          "span": {"type": "string", "enum": ["intra_node", "cross_node"]},
          "alpha": {"type": "number"}, "beta": {"type": "number"},
          "measured_curve": {"type": "array", "items": {"type": "object", "properties": {
            "group_size": {"type": "integer"}, "message_bytes": {"type": "number"}, "bus_bandwidth": {"type": "number"}}}}}}}}}}},
    "Constraints": {"type": "object", "properties": {
      "max_tp": {"type": "integer", "default": 16}, "max_pp": {"type": "integer", "default": 16},
      "memory_cap_bytes": {"type": "number"},
      "grad_accum": {"type": "array", "items": {"type": "integer"}, "default": [1]},
      "sharding": {"type": "string", "enum": ["zero2", "zero3"]},
      "objective": {"type": "string", "enum": ["throughput", "energy"]}}},
    "Envelope": {"type": "object", "required": ["engine_version"], "properties": {
      "engine_version": {"type": "string"},
      "result": {"type": "object"},
      "errors": {"type": "array", "items": {"type": "object", "properties": {
        "path": {"type": "string"}, "message": {"type": "string"}, "severity": {"type": "string"}}}}}}
  }}
})json";

}  // namespace

ApiResponse HandleSchema() { return {200, Json::parse(kSchema)}; }

}  // namespace shardsim
