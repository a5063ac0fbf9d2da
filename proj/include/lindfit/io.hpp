// Copyright 2026 The lindfit Authors
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

#include "json.hpp"

#include "lindfit/multi.hpp"
#include "lindfit/pipeline.hpp"

namespace lindfit {

// {"dim": n, "data": [[re, im], ...]} with n*n entries in row-major order.
nlohmann::json matrix_to_json(const CMat& m);
CMat matrix_from_json(const nlohmann::json& j);

TransferMatrix read_matrix_file(const std::string& path);
void write_matrix_file(const std::string& path, const CMat& m);

// FNV-1a over the entries, hex encoded.
std::string matrix_digest(const CMat& m);

nlohmann::json settings_json(const PipelineConfig& cfg);
nlohmann::json pipeline_report(const CMat& input, const PipelineConfig& cfg, const PipelineResult& res,
                               double wall_seconds);
nlohmann::json multi_report(const SnapshotSeries& series, double eps, const BranchPolicy& policy,
                            const MultiFitSearch& res, double wall_seconds);

void write_json_file(const std::string& path, const nlohmann::json& j);

}  // namespace lindfit
