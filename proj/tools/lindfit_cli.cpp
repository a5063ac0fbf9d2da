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

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "lindfit/io.hpp"

using namespace lindfit;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNoResult = 2;
constexpr int kExitInput = 3;
constexpr int kExitNumerical = 4;

struct FitFlags {
  std::string in;
  double eps = -1.0;
  int m_max = 1;
  std::string mode = "auto";
  int samples = 1000;
  double precision = 0.1;
  std::uint64_t seed = 0;
  double delta_step = 0.01;
  int mu_samples = 16;
  bool no_preprocess = false;
  std::string report;
  int jobs = 1;
};

void add_common(CLI::App* cmd, FitFlags& f, bool sampling) {
  cmd->add_option("--in", f.in, "snapshot matrix file")->required();
  cmd->add_option("--m-max", f.m_max, "largest branch index")->check(CLI::NonNegativeNumber);
  cmd->add_option("--branch-mode", f.mode, "auto, exhaustive or paired")
      ->check(CLI::IsMember({"auto", "exhaustive", "paired"}));
  cmd->add_option("--jobs", f.jobs, "worker threads")->check(CLI::PositiveNumber);
  if (sampling) {
    cmd->add_option("--samples", f.samples, "random bases per clustered snapshot")->check(CLI::PositiveNumber);
    cmd->add_option("--precision", f.precision, "eigenvalue cluster precision")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", f.seed, "basis sampling seed");
    cmd->add_flag("--no-preprocess", f.no_preprocess, "fit the snapshot's own logarithm only");
    cmd->add_option("--mu-samples", f.mu_samples, "repaired samples searched for mu")->check(CLI::PositiveNumber);
  }
}

PipelineConfig make_config(const FitFlags& f) {
  PipelineConfig cfg;
  cfg.eps = f.eps;
  cfg.precision = f.precision;
  cfg.basis.samples = f.samples;
  cfg.basis.seed = f.seed;
  cfg.policy.m_max = f.m_max;
  cfg.policy.mode = f.mode == "exhaustive" ? BranchMode::Exhaustive
                    : f.mode == "paired"   ? BranchMode::Paired
                                           : BranchMode::Auto;
  cfg.sweep.delta_step = f.delta_step;
  cfg.jobs = f.jobs;
  cfg.preprocess = !f.no_preprocess;
  cfg.mu_max_samples = f.mu_samples;
  return cfg;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      raise(ErrorKind::InputError, "not a number: '" + item + "'");
    }
  }
  return out;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void emit(const std::string& path, const nlohmann::json& j) {
  if (path.empty()) std::cout << j.dump(2) << "\n";
  else write_json_file(path, j);
}

int exit_for(Verdict v) { return v == Verdict::NoResult ? kExitNoResult : kExitOk; }

ChannelSpec channel_from_flags(const std::string& name, const std::string& p, const std::string& gamma, double t,
                               int dim) {
  if (name == "xgate") return channel::Unitary{gates::pauli_x()};
  if (name == "iswap") return channel::Unitary{gates::iswap()};
  if (name == "cz") return channel::Unitary{gates::cz()};
  if (name == "identity") return channel::Identity{dim};
  if (name == "depol") {
    const auto v = parse_list(p);
    if (v.size() != 1) raise(ErrorKind::InputError, "depol takes --p <p>");
    return channel::Depolarizing{v[0]};
  }
  if (name == "unital") {
    const auto g = parse_list(gamma);
    if (g.size() != 3) raise(ErrorKind::InputError, "unital takes --gamma g1,g2,g3");
    return channel::UnitalPauli{g[0], g[1], g[2], t};
  }
  if (name == "depolcz") {
    const auto v = parse_list(p);
    if (v.size() != 4) raise(ErrorKind::InputError, "depolcz takes --p p_cz,p_xx,p_yy,p_zz");
    return channel::DepolarizingCZ{v[0], v[1], v[2], v[3]};
  }
  raise(ErrorKind::InputError, "unknown channel " + name);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fit Lindblad generators to quantum channel snapshots"};
  app.require_subcommand(1);

  // simulate
  std::string channel_name, p_list, gamma_list, sim_out;
  double sim_t = 1.0;
  int sim_dim = 2;
  std::int64_t shots = 10000;
  std::uint64_t sim_seed = 0;
  bool exact = false;
  auto* sim = app.add_subcommand("simulate", "simulated process tomography of a benchmark channel");
  sim->add_option("--channel", channel_name, "xgate, iswap, cz, identity, depol, unital, depolcz")->required();
  sim->add_option("--p", p_list, "noise parameters");
  sim->add_option("--gamma", gamma_list, "unital rates g1,g2,g3");
  sim->add_option("--t", sim_t, "evolution time for unital");
  sim->add_option("--dim", sim_dim, "identity dimension")->check(CLI::PositiveNumber);
  sim->add_option("--shots", shots, "shots per setting")->check(CLI::PositiveNumber);
  sim->add_option("--seed", sim_seed, "tomography seed");
  sim->add_flag("--exact", exact, "write the exact transfer matrix");
  sim->add_option("--out", sim_out, "output file (stdout if absent)");

  FitFlags fit_f, mu_f, sweep_f;
  auto* fit = app.add_subcommand("fit", "preprocess, fit, and fall back to the noise measure");
  add_common(fit, fit_f, true);
  fit->add_option("--epsilon", fit_f.eps, "distance budget")->required()->check(CLI::NonNegativeNumber);
  fit->add_option("--delta-step", fit_f.delta_step, "delta grid step")->check(CLI::PositiveNumber);
  fit->add_option("--report", fit_f.report, "report file (stdout if absent)");

  auto* mu = app.add_subcommand("mu", "minimal white noise that makes the snapshot Markovian");
  add_common(mu, mu_f, true);
  mu->add_option("--epsilon", mu_f.eps, "distance budget")->required()->check(CLI::NonNegativeNumber);
  mu->add_option("--delta-step", mu_f.delta_step, "delta grid step")->check(CLI::PositiveNumber);
  mu->add_option("--report", mu_f.report, "report file (stdout if absent)");

  double from = 0.0, to = 0.0, step = 0.01;
  std::string csv;
  auto* sweep = app.add_subcommand("sweep-epsilon", "verdict and mu over a range of epsilon");
  add_common(sweep, sweep_f, true);
  sweep->add_option("--from", from)->required();
  sweep->add_option("--to", to)->required();
  sweep->add_option("--step", step)->check(CLI::PositiveNumber);
  sweep->add_option("--delta-step", sweep_f.delta_step, "delta grid step")->check(CLI::PositiveNumber);
  sweep->add_option("--csv", csv, "csv file (stdout if absent)");

  FitFlags multi_f;
  std::string multi_in, multi_times;
  auto* multi = app.add_subcommand("multifit", "one generator for a series of snapshots");
  multi->add_option("--in", multi_in, "comma separated snapshot files")->required();
  multi->add_option("--times", multi_times, "comma separated times")->required();
  multi->add_option("--epsilon", multi_f.eps, "distance budget")->required()->check(CLI::NonNegativeNumber);
  multi->add_option("--m-max", multi_f.m_max)->check(CLI::NonNegativeNumber);
  multi->add_option("--jobs", multi_f.jobs)->check(CLI::PositiveNumber);
  multi->add_option("--report", multi_f.report, "report file (stdout if absent)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (*sim) {
      const ChannelSpec spec = channel_from_flags(channel_name, p_list, gamma_list, sim_t, sim_dim);
      const TransferMatrix m = exact ? exact_transfer(spec) : simulate_process_tomography(spec, {shots, sim_seed});
      emit(sim_out, matrix_to_json(m.mat));
      return kExitOk;
    }
    if (*fit) {
      const TransferMatrix m = read_matrix_file(fit_f.in);
      const PipelineConfig cfg = make_config(fit_f);
      const PipelineResult res = run_pipeline(m, cfg);
      emit(fit_f.report, pipeline_report(m.mat, cfg, res, seconds_since(t0)));
      std::cerr << "verdict: " << to_string(res.verdict) << "\n";
      return exit_for(res.verdict);
    }
    if (*mu) {
      const TransferMatrix m = read_matrix_file(mu_f.in);
      PipelineConfig cfg = make_config(mu_f);
      cfg.run_fit = false;
      const PipelineResult res = run_pipeline(m, cfg);
      emit(mu_f.report, pipeline_report(m.mat, cfg, res, seconds_since(t0)));
      std::cerr << "verdict: " << to_string(res.verdict) << "\n";
      return exit_for(res.verdict);
    }
    if (*sweep) {
      const TransferMatrix m = read_matrix_file(sweep_f.in);
      const PipelineConfig cfg = make_config(sweep_f);
      const auto rows = sweep_epsilon(m, epsilon_range(from, to, step), cfg);
      std::ostringstream os;
      os.precision(12);
      os << "epsilon,mu,mu_sentinel,distance,samples,m_max\n";
      for (const auto& r : rows) {
        // A Lindbladian needs no added noise; 1000 marks "no mu found".
        double shown = 1000.0;
        std::string mu_field;
        if (r.verdict == Verdict::Markovian) shown = 0.0;
        if (r.mu) shown = *r.mu;
        if (r.verdict != Verdict::NoResult) {
          std::ostringstream f;
          f.precision(12);
          f << shown;
          mu_field = f.str();
        }
        os << r.eps << "," << mu_field << "," << shown << ",";
        if (std::isfinite(r.distance)) os << r.distance;
        os << "," << cfg.basis.samples << "," << cfg.policy.m_max << "\n";
      }
      if (csv.empty()) {
        std::cout << os.str();
      } else {
        std::ofstream out(csv);
        if (!out) raise(ErrorKind::InputError, "cannot write " + csv);
        out << os.str();
      }
      return kExitOk;
    }
    if (*multi) {
      SnapshotSeries series;
      for (const auto& path : split(multi_in)) series.snapshots.push_back(read_matrix_file(path));
      series.times = parse_list(multi_times);
      BranchPolicy policy;
      policy.m_max = multi_f.m_max;
      const MultiFitSearch res = best_fit_multi(series, multi_f.eps, policy, {}, multi_f.jobs);
      emit(multi_f.report, multi_report(series, multi_f.eps, policy, res, seconds_since(t0)));
      std::cerr << "verdict: " << (res.best ? "Markovian" : "NoResult") << "\n";
      return res.best ? kExitOk : kExitNoResult;
    }
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::InputError:
      case ErrorKind::DimensionMismatch:
      case ErrorKind::NotPerfectSquareDim:
      case ErrorKind::OutOfRange:
      case ErrorKind::NotUnitary:
      case ErrorKind::NotCompletelyPositive:
      case ErrorKind::NotHermitianHamiltonian:
        return kExitInput;
      default:
        return kExitNumerical;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}
