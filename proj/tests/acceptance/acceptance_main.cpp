// Copyright 2026 The IntraMix Lab Authors.
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


// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failed criteria (0 when all pass).

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "intramix/intramix.hpp"
#include "support/gradient_check.hpp"

namespace {

using namespace intramix;
namespace fs = std::filesystem;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

constexpr std::size_t kTrials = 1000000;
constexpr std::size_t kSeeds = 10;

// 1, 2 ----------------------------------------------------------------------

Verdict theorem1_probability() {
  const auto t0 = Clock::now();
  bool ok = true;
  std::string detail;
  for (double l : {0.1, 0.3, 0.5}) {
    const auto closed = closed_form_theorem1(l);
    const auto est = mc_theorem1(l, NoiseModel{}, kTrials, 100).pooled;
    const double err = std::abs(est.prob - closed.prob);
    ok &= err <= 0.005;
    detail += fmt("l=%.1f mc=%.5f closed=%.5f; ", l, est.prob, closed.prob);
  }
  const double secs = seconds_since(t0);
  ok &= secs < 30.0;
  return {ok, detail + fmt("%.2fs", secs)};
}

Verdict theorem1_ratio() {
  bool ok = true;
  std::string detail;
  for (double l : {0.1, 0.3, 0.5}) {
    const auto closed = closed_form_theorem1(l);
    const auto est = mc_theorem1(l, NoiseModel{}, kTrials, 100).pooled;
    ok &= std::abs(est.ratio - closed.ratio) <= 0.005;
    detail += fmt("l=%.1f mc=%.5f closed=%.5f; ", l, est.ratio, closed.ratio);
  }
  const double unit = mc_theorem1(1.0, NoiseModel{}, kTrials, 100).pooled.ratio;
  ok &= unit == 1.0 && closed_form_theorem1(1.0).ratio == 1.0;
  return {ok, detail + fmt("l=1 ratio=%.17g", unit)};
}

// 3 -------------------------------------------------------------------------

Verdict theorem2_adjudication() {
  LinearGnnConfig cfg;
  cfg.trials = kTrials;
  cfg.seed = 200;
  const auto est = mc_theorem2(cfg, NoiseModel{}, 0.01);
  const bool single = est.verdict == Theorem2Verdict::kPrinted ||
                      est.verdict == Theorem2Verdict::kDerivation;
  std::string detail = fmt("ratio=%.5f printed=%.4f derivation=%.4f verdict=", est.ratio,
                           est.closed.ratio_printed, est.closed.ratio_derivation);
  detail += to_string(est.verdict);
  bool monotone = true;
  double prev = 0.0;
  detail += "; eta sweep";
  for (std::size_t k = 0; k < 3; ++k) {
    LinearGnnConfig c = cfg;
    c.eta1 = c.eta2 = 0.5 * static_cast<double>(k);
    c.seed = 201 + k;
    const double r = mc_theorem2(c, NoiseModel{}).ratio;
    if (k > 0 && !(r < prev)) monotone = false;
    prev = r;
    detail += fmt(" %.4f", r);
  }
  return {single && monotone, detail};
}

// 4 -------------------------------------------------------------------------

Verdict gradient_check() {
  const auto t0 = Clock::now();
  constexpr std::size_t kInstances = 25;
  double worst = 0.0;
  std::size_t entries = 0;
  for (std::size_t s = 0; s < kInstances; ++s) {
    const auto r = intramix::testing::check_gradients(intramix::testing::random_gradient_instance(s));
    worst = std::max(worst, r.max_relative_error);
    entries += r.entries;
  }
  const double secs = seconds_since(t0);
  return {worst < 1e-4 && secs < 60.0,
          fmt("%zu instances, %zu entries, max rel err %.3g, %.2fs", kInstances, entries, worst,
              secs)};
}

// Shared benchmark ------------------------------------------------------------

Dataset benchmark(std::uint64_t seed) {
  BenchmarkSpec spec;
  spec.sbm.seed = seed;
  return make_benchmark(spec);
}

// 5 -------------------------------------------------------------------------

Verdict noise_reduction() {
  std::size_t wins = 0;
  std::string detail;
  for (std::size_t s = 0; s < kSeeds; ++s) {
    const Dataset d = benchmark(1000 + s);
    PipelineConfig cfg;
    cfg.pseudo_label_noise = 0.2;
    const auto base = run_baseline(d, cfg, s);
    AugmentationConfig aug = cfg.augment;
    aug.seed = s;
    const auto batch = mixup_generate(base.working, aug);
    const auto audit = audit_mixup_label_noise(batch, label_vector(base.working),
                                               label_vector(d.table));
    wins += audit.generated_noise <= audit.source_noise;
    detail += fmt(" %.3f/%.3f", audit.generated_noise, audit.source_noise);
  }
  return {wins >= 9, fmt("%zu/10 seeds generated<=source (gen/src):", wins) + detail};
}

// 6, 7 ----------------------------------------------------------------------

struct StrategyRuns {
  std::vector<double> baseline, intramix, pl_only, random_con, zeros, lambda_half, lambda_low;
  double seconds = 0.0;
};

const StrategyRuns& strategy_runs() {
  static const StrategyRuns runs = [] {
    StrategyRuns r;
    const auto t0 = Clock::now();
    const PipelineConfig cfg;
    for (std::size_t s = 0; s < kSeeds; ++s) {
      const Dataset d = benchmark(2000 + s);
      const auto base = run_baseline(d, cfg, s);
      r.baseline.push_back(base.test_accuracy);
      auto run = [&](Strategy st) {
        AugmentationConfig aug = cfg.augment;
        aug.strategy = st;
        return run_strategy(d, base, cfg, aug).test_accuracy;
      };
      r.intramix.push_back(run(Strategy::kIntraMix));
      r.pl_only.push_back(run(Strategy::kPseudoLabelOnly));
      r.random_con.push_back(run(Strategy::kRandomCon));
      r.zeros.push_back(run(Strategy::kZeros));
      r.seconds = seconds_since(t0);
      for (double l : {0.5, 0.05}) {
        AugmentationConfig aug = cfg.augment;
        aug.lambda = LambdaLaw::fixed(l);
        (l == 0.5 ? r.lambda_half : r.lambda_low)
            .push_back(run_strategy(d, base, cfg, aug).test_accuracy);
      }
    }
    return r;
  }();
  return runs;
}

double mean(const std::vector<double>& v) { return summarize(v).mean; }

Verdict accuracy_gain() {
  const auto& r = strategy_runs();
  const double b = mean(r.baseline), im = mean(r.intramix), pl = mean(r.pl_only),
               rc = mean(r.random_con), z = mean(r.zeros);
  const double gain = 100.0 * (im - b);
  std::vector<std::string> broken;
  if (!(gain >= 1.0)) broken.push_back("gain");
  if (!(im > pl)) broken.push_back("intramix>pl_only");
  if (!(pl > b)) broken.push_back("pl_only>baseline");
  if (!(im > rc)) broken.push_back("intramix>random_con");
  if (!(z > b)) broken.push_back("zeros>baseline");
  if (!(r.seconds < 600.0)) broken.push_back("runtime");
  std::string detail = fmt(
      "baseline %.4f intramix %.4f pl_only %.4f random_con %.4f zeros %.4f gain %+.2f pts "
      "%.1fs",
      b, im, pl, rc, z, gain, r.seconds);
  for (const auto& x : broken) detail += "; violated: " + x;
  return {broken.empty(), detail};
}

Verdict lambda_sensitivity() {
  const auto& r = strategy_runs();
  const double hi = mean(r.lambda_half), lo = mean(r.lambda_low);
  return {hi >= lo, fmt("lambda=0.5 %.4f, lambda=0.05 %.4f", hi, lo)};
}

// 8 -------------------------------------------------------------------------

Verdict oversmoothing() {
  constexpr std::size_t kMadSeeds = 5;
  std::size_t wins = 0;
  std::size_t shrink = 0;
  double d2_sum = 0.0, d8_sum = 0.0;
  std::string detail;
  const PipelineConfig cfg;
  std::uint64_t graph_seed = 3000;
  for (std::size_t s = 0; s < kMadSeeds; ++s) {
    Dataset d;
    for (;; ++graph_seed) {
      d = benchmark(graph_seed);
      const auto dist = bfs_distances(d.graph, 0);
      if (std::find(dist.begin(), dist.end(), kUnreachable) == dist.end()) break;
    }
    ++graph_seed;
    const auto classes = hop_distance_classes(d.graph, 2, 4);
    const auto base = run_baseline(d, cfg, s);
    const auto shallow = run_madgap_depth(d, base, cfg, classes, 2);
    const auto deep = run_madgap_depth(d, base, cfg, classes, 8);
    wins += deep.intramix >= deep.baseline;
    shrink += deep.baseline < shallow.baseline;
    d2_sum += shallow.baseline;
    d8_sum += deep.baseline;
    detail += fmt(" [d2 %.3f d8 %.3f mix8 %.3f]", shallow.baseline, deep.baseline, deep.intramix);
  }
  const double d2 = d2_sum / kMadSeeds, d8 = d8_sum / kMadSeeds;
  return {wins >= 4 && d8 < d2,
          fmt("intramix>=baseline at depth 8 in %zu/5; baseline mean d8 %.4f vs d2 %.4f "
              "(per seed d8<d2 in %zu/5):",
              wins, d8, d2, shrink) +
              detail};
}

// 9 -------------------------------------------------------------------------

double r_squared(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
}

Verdict complexity() {
  PipelineConfig cfg;
  cfg.train.patience = cfg.train.max_epochs;
  const Dataset d = benchmark(4000);
  const auto base = run_baseline(d, cfg, 1);

  std::vector<double> ms, secs;
  constexpr int kReps = 15;
  for (std::size_t m : {100, 200, 400, 800}) {
    AugmentationConfig aug = cfg.augment;
    aug.nodes_per_class = m / static_cast<std::size_t>(d.table.num_classes);
    aug.seed = 1;
    std::vector<double> times;
    for (int k = 0; k < kReps; ++k) {
      const auto t0 = Clock::now();
      const auto out = apply_strategy(d.graph, base.working, d.split, aug);
      times.push_back(seconds_since(t0));
      if (out.batch.size() != m) return {false, "unexpected batch size"};
    }
    std::sort(times.begin(), times.end());
    ms.push_back(static_cast<double>(m));
    secs.push_back(times[kReps / 2]);
  }
  const double r2 = r_squared(ms, secs);

  AugmentationConfig aug = cfg.augment;
  aug.nodes_per_class = d.table.num_nodes() / 10 / static_cast<std::size_t>(d.table.num_classes);
  const auto out = run_strategy(d, base, cfg, aug);
  const double augmented =
      base.inference_seconds + out.generation_seconds + out.wiring_seconds + out.train_seconds;
  const double ratio = augmented / base.train_seconds;
  return {r2 >= 0.95 && ratio <= 1.5,
          fmt("median augmentation s at m=100..800: %.2e %.2e %.2e %.2e, R^2 %.4f; "
              "augmented/baseline at m=0.1|V| %.3f (%.3fs vs %.3fs)",
              secs[0], secs[1], secs[2], secs[3], r2, ratio, augmented, base.train_seconds)};
}

// 10 ------------------------------------------------------------------------

struct CliResult {
  int code = -1;
  std::string out;
};

CliResult cli(const std::string& args) {
  const std::string cmd = std::string(INTRAMIX_CLI_PATH) + " " + args + " 2>/dev/null";
  CliResult r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string without_timing(const std::string& text) {
  auto j = Json::parse(text);
  j.erase("timing");
  return j.dump();
}

Verdict determinism() {
  const fs::path dir = fs::temp_directory_path() / ("intramix_accept_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::vector<std::string> broken;

  const std::string gen = "gen-data --per-class 100 --p-intra 0.05 --p-inter 0.005 --val-size 100 --seed 5 --out ";
  const bool gen_ok = cli(gen + (dir / "a").string()).code == 0 &&
                      cli(gen + (dir / "b").string()).code == 0;
  if (gen_ok) {
    for (const auto& e : fs::directory_iterator(dir / "a")) {
      if (slurp(e.path()) != slurp(dir / "b" / e.path().filename())) {
        broken.push_back("gen-data " + e.path().filename().string());
      }
    }
  } else {
    broken.push_back("gen-data failed");
  }

  const std::string data = " --data " + (dir / "a").string();
  const std::vector<std::string> commands{
      "run" + data + " --seeds 2 --epochs 80 --patience 30",
      "run" + data + " --seeds 1 --epochs 80 --patience 30 --strategy random_con",
      "sweep-lambda" + data + " --seeds 1 --epochs 60 --patience 30 --grid 0.05,0.5",
      "madgap" + data + " --seeds 1 --epochs 60 --patience 30 --depths 2,4",
      "verify-theorems --trials 100000",
  };
  for (const auto& c : commands) {
    const auto a = cli(c);
    const auto b = cli(c);
    if (a.code != 0 || b.code != 0) {
      broken.push_back(c + " (exit " + std::to_string(a.code) + ")");
    } else if (without_timing(a.out) != without_timing(b.out)) {
      broken.push_back(c);
    }
  }
  fs::remove_all(dir);
  std::string detail = fmt("gen-data + %zu report commands compared", commands.size());
  for (const auto& x : broken) detail += "; differs: " + x;
  return {broken.empty(), detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"1 label-noise probability", theorem1_probability},
      {"2 label-noise expectation ratio", theorem1_ratio},
      {"3 propagation-noise adjudication", theorem2_adjudication},
      {"4 gradient correctness", gradient_check},
      {"5 generated-label noise reduction", noise_reduction},
      {"6 accuracy gain and strategy ordering", accuracy_gain},
      {"7 lambda sensitivity", lambda_sensitivity},
      {"8 over-smoothing", oversmoothing},
      {"9 augmentation complexity", complexity},
      {"10 CLI determinism", determinism},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += !v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << name << ": " << v.detail
              << std::endl;
  }
  return failed;
}
