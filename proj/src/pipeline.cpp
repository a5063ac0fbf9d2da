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

#include "lindfit/pipeline.hpp"

#include <cmath>
#include <limits>

#include "lindfit/parallel.hpp"

namespace lindfit {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Markovian: return "Markovian";
    case Verdict::NonMarkovian: return "NonMarkovian";
    case Verdict::Identity: return "Identity";
    case Verdict::NoResult: return "NoResult";
  }
  return "Unknown";
}

PipelineResult run_pipeline(const TransferMatrix& m_snapshot, const PipelineConfig& cfg) {
  if (!(cfg.eps >= 0.0)) raise(ErrorKind::OutOfRange, "epsilon must be nonnegative");
  const CMat& m = m_snapshot.mat;
  const int d = sqrt_dim(m.rows());
  PipelineResult out;

  std::vector<CMat> samples;
  if (cfg.preprocess) {
    PreprocessOutcome pre = preprocess_main(m_snapshot, cfg.precision, cfg.eps, cfg.basis, cfg.jobs);
    out.preprocess_kind = pre.kind;
    out.perturbed = pre.perturbed;
    out.partition = std::move(pre.partition);
    out.basis_failure = std::move(pre.basis_failure);
    if (pre.kind == PreprocessOutcome::Kind::Identity) {
      out.verdict = Verdict::Identity;
      out.score = 1.0;
      return out;
    }
    samples = std::move(pre.samples);
    // The unrepaired matrix stays a candidate: a cluster can be a false
    // alarm between genuinely distinct eigenvalues.
    if (pre.kind == PreprocessOutcome::Kind::Samples) samples.push_back(std::move(pre.nd2));
  } else {
    samples = {m};
  }
  const bool tagged = out.preprocess_kind == PreprocessOutcome::Kind::Samples && cfg.preprocess;
  const std::size_t n_random = tagged ? samples.size() - 1 : samples.size();

  // One sample: parallelize over branches. Many: over samples.
  const bool many = samples.size() > 1;
  std::vector<FitSearch> searches(samples.size());
  if (!cfg.run_fit) searches.clear();
  parallel_for(searches.size(), many ? cfg.jobs : 1, [&](std::size_t r) {
    searches[r] = fit_search(m, samples[r], cfg.eps, cfg.policy, cfg.solver, many ? 1 : cfg.jobs);
  });
  out.sample_min_distance.reserve(n_random);
  for (std::size_t r = 0; r < searches.size(); ++r) {
    FitSearch& fs = searches[r];
    if (r < n_random)
      out.sample_min_distance.push_back(fs.min_distance);
    else
      out.unrepaired_min_distance = fs.min_distance;
    out.branches_tried += fs.branches_tried;
    out.roundtrip_rejected += fs.roundtrip_rejected ? 1 : 0;
    if (!fs.best) continue;
    if (!out.fit || fs.best->distance < out.fit->distance) {
      out.fit = std::move(fs.best);
      if (tagged && r < n_random) out.fit->basis_sample_id = static_cast<int>(r);
    }
  }
  if (out.fit) {
    out.verdict = Verdict::Markovian;
    out.score = 1.0;
    return out;
  }
  if (!cfg.run_mu) return out;

  // The first few repaired samples, then the unrepaired matrix if present.
  std::vector<std::size_t> pick;
  for (std::size_t r = 0; r < std::min(n_random, static_cast<std::size_t>(std::max(1, cfg.mu_max_samples))); ++r)
    pick.push_back(r);
  if (tagged) pick.push_back(samples.size() - 1);
  const bool many_mu = pick.size() > 1;
  std::vector<std::optional<MuResult>> mus(pick.size());
  parallel_for(pick.size(), many_mu ? cfg.jobs : 1, [&](std::size_t k) {
    mus[k] = mu_search(m, samples[pick[k]], cfg.eps, cfg.policy, cfg.sweep, cfg.solver, many_mu ? 1 : cfg.jobs).best;
  });
  for (std::size_t k = 0; k < pick.size(); ++k) {
    if (!mus[k]) continue;
    if (!out.mu || mus[k]->mu_min < out.mu->mu_min) {
      out.mu = std::move(mus[k]);
      if (tagged && pick[k] < n_random) out.mu->basis_sample_id = static_cast<int>(pick[k]);
    }
  }
  if (out.mu) {
    out.verdict = Verdict::NonMarkovian;
    out.score = markovianity_score(out.mu->mu_min, d);
  }
  return out;
}

std::vector<double> epsilon_range(double from, double to, double step) {
  if (!(step > 0.0)) raise(ErrorKind::OutOfRange, "epsilon step must be positive");
  std::vector<double> out;
  if (to < from) return out;
  const auto n = static_cast<long long>(std::floor((to - from) / step + 1e-9));
  for (long long k = 0; k <= n; ++k) out.push_back(from + static_cast<double>(k) * step);
  return out;
}

std::vector<SweepRow> sweep_epsilon(const TransferMatrix& m_snapshot, const std::vector<double>& eps_values,
                                    const PipelineConfig& cfg) {
  std::vector<SweepRow> rows;
  rows.reserve(eps_values.size());
  for (double eps : eps_values) {
    PipelineConfig c = cfg;
    c.eps = eps;
    const PipelineResult res = run_pipeline(m_snapshot, c);
    SweepRow row;
    row.eps = eps;
    row.verdict = res.verdict;
    row.distance = std::numeric_limits<double>::quiet_NaN();
    if (res.fit) row.distance = res.fit->distance;
    if (res.mu) {
      row.mu = res.mu->mu_min;
      row.distance = res.mu->distance;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace lindfit
