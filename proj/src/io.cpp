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

#include "lindfit/io.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace lindfit {

using nlohmann::json;

json matrix_to_json(const CMat& m) {
  json data = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back({m(r, c).real(), m(r, c).imag()});
  return json{{"dim", m.rows()}, {"data", std::move(data)}};
}

CMat matrix_from_json(const json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("data"))
    raise(ErrorKind::InputError, "matrix file needs \"dim\" and \"data\"");
  if (!j["dim"].is_number_integer() || j["dim"].get<long long>() <= 0)
    raise(ErrorKind::InputError, "\"dim\" must be a positive integer");
  const auto n = static_cast<Eigen::Index>(j["dim"].get<long long>());
  const json& data = j["data"];
  if (!data.is_array() || static_cast<Eigen::Index>(data.size()) != n * n)
    raise(ErrorKind::InputError, "\"data\" must hold dim*dim entries");
  CMat m(n, n);
  for (Eigen::Index k = 0; k < n * n; ++k) {
    const json& e = data[static_cast<std::size_t>(k)];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
      raise(ErrorKind::InputError, "entries must be [re, im] pairs");
    const double re = e[0].get<double>(), im = e[1].get<double>();
    if (!std::isfinite(re) || !std::isfinite(im)) raise(ErrorKind::InputError, "non-finite matrix entry");
    m(k / n, k % n) = cplx(re, im);
  }
  return m;
}

TransferMatrix read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorKind::InputError, "cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    raise(ErrorKind::InputError, path + ": " + e.what());
  }
  TransferMatrix t;
  t.mat = matrix_from_json(j);
  t.d = sqrt_dim(t.mat.rows());
  return t;
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) raise(ErrorKind::InputError, "cannot write " + path);
  out << std::setprecision(17) << j.dump(2) << "\n";
}

void write_matrix_file(const std::string& path, const CMat& m) { write_json_file(path, matrix_to_json(m)); }

std::string matrix_digest(const CMat& m) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&](double x) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &x, sizeof(double));
    for (unsigned char b : bytes) h = (h ^ b) * 0x100000001b3ULL;
  };
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      feed(m(r, c).real());
      feed(m(r, c).imag());
    }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

namespace {

const char* mode_name(BranchMode m) {
  switch (m) {
    case BranchMode::Auto: return "auto";
    case BranchMode::Exhaustive: return "exhaustive";
    case BranchMode::Paired: return "paired";
  }
  return "auto";
}

json policy_json(const BranchPolicy& p) {
  return {{"m_max", p.m_max},
          {"mode", mode_name(p.mode)},
          {"max_active_pairs", p.max_active_pairs},
          {"exhaustive_limit", p.exhaustive_limit}};
}

json check_json(const LindbladCheck& c, double tol) {
  return {{"ok", c.ok}, {"tol", tol}, {"herm", c.herm}, {"ccp", c.ccp}, {"trace", c.trace}};
}

json optional_int(const std::optional<int>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

json settings_json(const PipelineConfig& cfg) {
  return {{"epsilon", cfg.eps},
          {"precision", cfg.precision},
          {"samples", cfg.basis.samples},
          {"seed", cfg.basis.seed},
          {"max_condition", cfg.basis.max_condition},
          {"branch_policy", policy_json(cfg.policy)},
          {"delta_step", cfg.sweep.delta_step},
          {"solver",
           {{"primal_tol", cfg.solver.primal_tol},
            {"dual_tol", cfg.solver.dual_tol},
            {"cone_tol", cfg.solver.cone_tol},
            {"max_iters", cfg.solver.max_iters},
            {"over_relaxation", cfg.solver.over_relaxation},
            {"rho", cfg.solver.rho}}},
          {"preprocess", cfg.preprocess},
          {"run_fit", cfg.run_fit},
          {"run_mu", cfg.run_mu},
          {"mu_max_samples", cfg.mu_max_samples}};
}

json pipeline_report(const CMat& input, const PipelineConfig& cfg, const PipelineResult& res,
                     double wall_seconds) {
  const int d = sqrt_dim(input.rows());
  json verdict = {{"kind", to_string(res.verdict)}};
  if (res.verdict == Verdict::Markovian && res.fit) {
    verdict["lindbladian"] = matrix_to_json(res.fit->lindbladian);
    verdict["distance"] = res.fit->distance;
    verdict["distance_bound"] = cfg.eps;
    verdict["branch"] = res.fit->branch;
    verdict["basis_sample_id"] = optional_int(res.fit->basis_sample_id);
    verdict["check"] = check_json(res.fit->check, 1e-7);
  } else if (res.verdict == Verdict::NonMarkovian && res.mu) {
    const MaxEntangled w = MaxEntangled::make(d);
    verdict["mu_min"] = res.mu->mu_min;
    verdict["generator"] = matrix_to_json(res.mu->generator);
    verdict["delta"] = res.mu->delta_used;
    verdict["distance"] = res.mu->distance;
    verdict["distance_bound"] = cfg.eps;
    verdict["branch"] = res.mu->branch;
    verdict["score"] = res.score;
    verdict["basis_sample_id"] = optional_int(res.mu->basis_sample_id);
    verdict["check"] = check_json(is_lindbladian(res.mu->generator - res.mu->mu_min * w.omega_perp, 1e-6), 1e-6);
  }

  json pre = {{"kind", res.preprocess_kind == PreprocessOutcome::Kind::Samples     ? "samples"
                       : res.preprocess_kind == PreprocessOutcome::Kind::Identity ? "identity"
                                                                                   : "passthrough"},
              {"perturbed", res.perturbed},
              {"positive_sets", res.partition.positive_sets},
              {"negative_sets", res.partition.negative_sets},
              {"complex_sets", res.partition.complex_sets},
              {"basis_failure", res.basis_failure ? json(*res.basis_failure) : json(nullptr)}};

  json trace = json::array();
  for (double x : res.sample_min_distance) trace.push_back(std::isfinite(x) ? json(x) : json(nullptr));

  return {{"input_digest", matrix_digest(input)},
          {"dimension", d},
          {"verdict", std::move(verdict)},
          {"settings", settings_json(cfg)},
          {"preprocess", std::move(pre)},
          {"branches_tried", res.branches_tried},
          {"sample_min_distance", std::move(trace)},
          {"unrepaired_min_distance", res.unrepaired_min_distance && std::isfinite(*res.unrepaired_min_distance)
                                          ? json(*res.unrepaired_min_distance)
                                          : json(nullptr)},
          {"wall_seconds", wall_seconds}};
}

json multi_report(const SnapshotSeries& series, double eps, const BranchPolicy& policy, const MultiFitSearch& res,
                  double wall_seconds) {
  json digests = json::array();
  for (const auto& s : series.snapshots) digests.push_back(matrix_digest(s.mat));
  json verdict = {{"kind", res.best ? "Markovian" : "NoResult"}};
  if (res.best) {
    verdict["lindbladian"] = matrix_to_json(res.best->fit.lindbladian);
    verdict["distance"] = res.best->fit.distance;
    verdict["snapshot_distances"] = res.best->snapshot_distances;
    verdict["distance_bound"] = eps;
    verdict["branches"] = res.best->branches;
    verdict["check"] = check_json(res.best->fit.check, 1e-7);
  }
  return {{"input_digests", std::move(digests)},
          {"times", series.times},
          {"verdict", std::move(verdict)},
          {"settings", {{"epsilon", eps}, {"branch_policy", policy_json(policy)}, {"delta", res.delta},
                        {"delta_source", "first snapshot"}}},
          {"assignments_tried", res.assignments_tried},
          {"wall_seconds", wall_seconds}};
}

}  // namespace lindfit
