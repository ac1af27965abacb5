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

// intramix: data generation, paired augmentation runs, lambda sweeps,
// theorem checks and MADGap curves from one binary.
//
// Exit codes: 0 ok, 2 usage or configuration error, 3 tolerance failure.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "intramix/intramix.hpp"

namespace {

using intramix::Json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitTolerance = 3;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommonFlags {
  std::uint64_t seed = 0;
  std::size_t seeds = 10;
  std::string out;
};

struct PipelineFlags {
  std::string data;
  std::string strategy = "intramix";
  std::size_t nodes_per_class = 30;
  double lambda_alpha = 2.0;
  double lambda_beta = 2.0;
  std::optional<double> lambda_fixed;
  std::vector<double> ensemble_dropouts{0.3, 0.4, 0.5, 0.6, 0.7};
  double pseudo_noise = 0.0;
  intramix::TrainConfig train;
  std::string checkpoint;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--seed", f.seed, "base seed; run k uses seed + k");
  cmd->add_option("--seeds", f.seeds, "number of paired runs")->check(CLI::PositiveNumber);
  cmd->add_option("--out", f.out, "write the JSON report here instead of stdout");
}

void add_training(CLI::App* cmd, intramix::TrainConfig& t) {
  cmd->add_option("--hidden", t.hidden_dim, "hidden width");
  cmd->add_option("--lr", t.learning_rate, "Adam learning rate");
  cmd->add_option("--weight-decay", t.weight_decay, "L2 coefficient on weights");
  cmd->add_option("--dropout", t.dropout, "training dropout probability");
  cmd->add_option("--epochs", t.max_epochs, "maximum epochs");
  cmd->add_option("--patience", t.patience, "early-stopping patience");
}

void add_pipeline(CLI::App* cmd, PipelineFlags& p) {
  cmd->add_option("--data", p.data, "container directory")->required();
  cmd->add_option("--nodes-per-class", p.nodes_per_class, "generated nodes per class");
  cmd->add_option("--lambda-alpha", p.lambda_alpha, "Beta law alpha");
  cmd->add_option("--lambda-beta", p.lambda_beta, "Beta law beta");
  cmd->add_option("--lambda-fixed", p.lambda_fixed, "fixed mixing coefficient");
  cmd->add_option("--ensemble-dropouts", p.ensemble_dropouts,
                  "comma-separated dropout probabilities for the consistency ensemble")
      ->delimiter(',');
  cmd->add_option("--pseudo-noise", p.pseudo_noise,
                  "fraction of pseudo labels flipped to a wrong class");
  add_training(cmd, p.train);
}

intramix::PipelineConfig make_pipeline(const PipelineFlags& p) {
  intramix::PipelineConfig cfg;
  cfg.train = p.train;
  cfg.ensemble.dropout_probs = p.ensemble_dropouts;
  auto strategy = intramix::parse_strategy(p.strategy);
  if (!strategy) throw UsageError("unknown strategy '" + p.strategy + "'");
  cfg.augment.strategy = *strategy;
  cfg.augment.nodes_per_class = p.nodes_per_class;
  cfg.augment.lambda = p.lambda_fixed ? intramix::LambdaLaw::fixed(*p.lambda_fixed)
                                      : intramix::LambdaLaw::beta_law(p.lambda_alpha,
                                                                       p.lambda_beta);
  cfg.pseudo_label_noise = p.pseudo_noise;
  try {
    cfg.train.validate();
    cfg.ensemble.validate();
    cfg.augment.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (!(p.pseudo_noise >= 0.0 && p.pseudo_noise <= 1.0)) {
    throw UsageError("--pseudo-noise must lie in [0, 1]");
  }
  return cfg;
}

Json data_summary(const intramix::Dataset& d, const std::string& dir) {
  return {{"path", dir},
          {"num_nodes", d.table.num_nodes()},
          {"num_edges", d.graph.edge_count()},
          {"feature_dim", d.table.feature_dim()},
          {"num_classes", d.table.num_classes},
          {"train", d.split.train.size()},
          {"validation", d.split.validation.size()},
          {"test", d.split.test.size()}};
}

void emit(const Json& report, const std::string& out, const std::string& summary) {
  const std::string text = report.dump(2) + "\n";
  if (out.empty()) {
    std::cerr << summary;
    std::cout << text;
  } else {
    intramix::detail::write_file(out, text);
    std::cout << summary;
  }
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c, d);
  return buf;
}

// gen-data ------------------------------------------------------------------

struct GenFlags {
  intramix::SbmConfig sbm;
  std::size_t labels_per_class = 5;
  std::size_t val_size = 500;
  std::string out;
};

int cmd_gen_data(const GenFlags& f) {
  intramix::BenchmarkSpec spec;
  spec.sbm = f.sbm;
  spec.labels_per_class = f.labels_per_class;
  spec.val_size = f.val_size;
  intramix::Dataset d;
  try {
    spec.sbm.validate();
    d = intramix::make_benchmark(spec);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  intramix::save_container(f.out, d);
  std::cout << "wrote " << f.out << ": " << d.table.num_nodes() << " nodes, "
            << d.graph.edge_count() << " edges, " << d.table.num_classes << " classes, seed "
            << f.sbm.seed << "\n";
  return kExitOk;
}

// run -----------------------------------------------------------------------

int cmd_run(const CommonFlags& c, const PipelineFlags& p) {
  const auto cfg = make_pipeline(p);
  const intramix::Dataset d = intramix::load_container(p.data);

  Json runs = Json::array();
  Json timing = Json::array();
  std::vector<double> base_acc, aug_acc;
  std::vector<std::uint64_t> seeds;
  std::ostringstream text;
  text << "run strategy=" << p.strategy << " seed=" << c.seed << " seeds=" << c.seeds << "\n";
  intramix::ModelParams last_params;
  for (std::size_t k = 0; k < c.seeds; ++k) {
    const std::uint64_t seed = c.seed + k;
    const auto base = intramix::run_baseline(d, cfg, seed);
    const auto out = intramix::run_strategy(d, base, cfg, cfg.augment);
    runs.push_back(intramix::run_record(base, out));
    timing.push_back(intramix::timing_record(base, out));
    base_acc.push_back(base.test_accuracy);
    aug_acc.push_back(out.test_accuracy);
    seeds.push_back(seed);
    text << fmt("  seed %.0f  baseline %.4f  augmented %.4f\n", static_cast<double>(seed),
                base.test_accuracy, out.test_accuracy);
    last_params = out.params;
  }
  const auto sb = intramix::summarize(base_acc);
  const auto sa = intramix::summarize(aug_acc);
  text << fmt("  mean baseline %.4f +- %.4f  augmented %.4f +- %.4f\n", sb.mean, sb.stddev,
              sa.mean, sa.stddev);
  if (!p.checkpoint.empty()) intramix::save_checkpoint(p.checkpoint, last_params);

  Json report = {{"command", "run"},
                 {"seed", c.seed},
                 {"seeds", seeds},
                 {"config", intramix::to_json(cfg)},
                 {"data", data_summary(d, p.data)},
                 {"runs", runs},
                 {"baseline", intramix::to_json(sb)},
                 {"augmented", intramix::to_json(sa)},
                 {"gain", sa.mean - sb.mean},
                 {"timing", {{"per_seed", timing}}}};
  emit(report, c.out, text.str());
  return kExitOk;
}

// sweep-lambda --------------------------------------------------------------

int cmd_sweep_lambda(const CommonFlags& c, const PipelineFlags& p, std::vector<double> grid) {
  auto cfg = make_pipeline(p);
  for (double v : grid) {
    if (!(v >= 0.0 && v <= 1.0)) throw UsageError("lambda grid values must lie in [0, 1]");
  }
  const intramix::Dataset d = intramix::load_container(p.data);

  std::vector<std::vector<double>> acc(grid.size());
  std::vector<double> base_acc;
  std::vector<std::uint64_t> seeds;
  Json timing = Json::array();
  for (std::size_t k = 0; k < c.seeds; ++k) {
    const std::uint64_t seed = c.seed + k;
    const auto base = intramix::run_baseline(d, cfg, seed);
    base_acc.push_back(base.test_accuracy);
    seeds.push_back(seed);
    for (std::size_t g = 0; g < grid.size(); ++g) {
      auto aug = cfg.augment;
      aug.lambda = intramix::LambdaLaw::fixed(grid[g]);
      const auto out = intramix::run_strategy(d, base, cfg, aug);
      acc[g].push_back(out.test_accuracy);
      Json t = intramix::timing_record(base, out);
      t["lambda"] = grid[g];
      timing.push_back(t);
    }
  }
  std::ostringstream text;
  text << "sweep-lambda strategy=" << p.strategy << " seed=" << c.seed << " seeds=" << c.seeds
       << "\n";
  Json rows = Json::array();
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const auto s = intramix::summarize(acc[g]);
    const auto closed = intramix::closed_form_theorem1(grid[g]);
    rows.push_back({{"lambda", grid[g]},
                    {"accuracy", acc[g]},
                    {"mean", s.mean},
                    {"std", s.stddev},
                    {"theorem_ratio", closed.ratio},
                    {"theorem_prob", closed.prob}});
    text << fmt("  lambda %.2f  accuracy %.4f +- %.4f  noise ratio %.4f\n", grid[g], s.mean,
                s.stddev, closed.ratio);
  }
  const auto sb = intramix::summarize(base_acc);
  text << fmt("  baseline %.4f +- %.4f\n", sb.mean, sb.stddev);
  Json report = {{"command", "sweep-lambda"},
                 {"seed", c.seed},
                 {"seeds", seeds},
                 {"config", intramix::to_json(cfg)},
                 {"data", data_summary(d, p.data)},
                 {"baseline", {{"accuracy", base_acc}, {"mean", sb.mean}, {"std", sb.stddev}}},
                 {"grid", rows},
                 {"timing", {{"per_run", timing}}}};
  emit(report, c.out, text.str());
  return kExitOk;
}

// verify-theorems -----------------------------------------------------------

struct TheoremFlags {
  std::size_t trials = 1000000;
  std::vector<double> lambdas{0.1, 0.3, 0.5};
  std::vector<double> sigmas{1.0};
  std::vector<double> etas{0.0, 0.5, 1.0};
  double tol1 = 0.005;
  double tol2 = 0.01;
};

int cmd_verify_theorems(const CommonFlags& c, const TheoremFlags& f) {
  if (f.trials < intramix::kMinTheoremTrials) {
    std::cerr << "warning: --trials " << f.trials << " is below the minimum of "
              << intramix::kMinTheoremTrials << "\n";
    return kExitUsage;
  }
  intramix::NoiseModel noise;
  noise.sigma_per_class = f.sigmas;
  for (double l : f.lambdas) {
    if (!(l >= 0.0 && l <= 1.0)) throw UsageError("--lambda values must lie in [0, 1]");
  }
  if (f.etas.size() < 2) throw UsageError("--eta-grid needs at least two values");
  try {
    noise.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  std::vector<std::string> offenders;
  std::ostringstream text;
  text << "verify-theorems seed=" << c.seed << " trials=" << f.trials << "\n";
  text << "  lambda   prob(closed)  prob(mc)   ratio(closed)  ratio(mc)\n";
  Json rows = Json::array();
  for (std::size_t k = 0; k < f.lambdas.size(); ++k) {
    const double lambda = f.lambdas[k];
    const auto closed = intramix::closed_form_theorem1(lambda);
    const auto mc = intramix::mc_theorem1(lambda, noise, f.trials, c.seed + k);
    Json per_class = Json::array();
    for (const auto& e : mc.per_class) per_class.push_back(intramix::to_json(e));
    const bool prob_ok = std::abs(mc.pooled.prob - closed.prob) <= f.tol1;
    const bool ratio_ok = std::abs(mc.pooled.ratio - closed.ratio) <= f.tol1;
    if (!prob_ok) offenders.push_back("theorem1 prob at lambda " + std::to_string(lambda));
    if (!ratio_ok) offenders.push_back("theorem1 ratio at lambda " + std::to_string(lambda));
    rows.push_back({{"lambda", lambda},
                    {"closed_prob", closed.prob},
                    {"closed_ratio", closed.ratio},
                    {"pooled", intramix::to_json(mc.pooled)},
                    {"per_class", per_class},
                    {"tolerance", f.tol1},
                    {"pass", prob_ok && ratio_ok}});
    text << fmt("  %.3f    %.5f       %.5f    ", lambda, closed.prob, mc.pooled.prob)
         << fmt("%.5f        %.5f\n", closed.ratio, mc.pooled.ratio);
  }

  intramix::LinearGnnConfig lin;
  lin.trials = f.trials;
  lin.seed = c.seed;
  const auto adjudication = intramix::mc_theorem2(lin, noise, f.tol2);
  const bool single_match = adjudication.verdict == intramix::Theorem2Verdict::kPrinted ||
                            adjudication.verdict == intramix::Theorem2Verdict::kDerivation;
  if (!single_match) {
    offenders.push_back("theorem2 adjudication verdict '" +
                        std::string(intramix::to_string(adjudication.verdict)) + "'");
  }
  text << fmt("  propagation ratio %.5f (printed %.5f, derivation %.5f)", adjudication.ratio,
              adjudication.closed.ratio_printed, adjudication.closed.ratio_derivation)
       << " verdict " << intramix::to_string(adjudication.verdict) << "\n";

  Json sweep = Json::array();
  double previous = 0.0;
  bool monotone = true;
  for (std::size_t k = 0; k < f.etas.size(); ++k) {
    intramix::LinearGnnConfig cfg = lin;
    cfg.eta1 = cfg.eta2 = f.etas[k];
    cfg.seed = c.seed + 1 + k;
    const auto est = intramix::mc_theorem2(cfg, noise, f.tol2);
    if (k > 0 && !(est.ratio < previous)) monotone = false;
    previous = est.ratio;
    sweep.push_back({{"eta1", cfg.eta1}, {"eta2", cfg.eta2}, {"estimate", intramix::to_json(est)}});
    text << fmt("  eta1=eta2=%.2f  ratio %.5f\n", cfg.eta1, est.ratio);
  }
  if (!monotone) offenders.push_back("theorem2 ratio not decreasing over the eta grid");

  text << (offenders.empty() ? "PASS\n" : "FAIL\n");
  for (const auto& o : offenders) text << "  offender: " << o << "\n";
  Json report = {{"command", "verify-theorems"},
                 {"seed", c.seed},
                 {"trials", f.trials},
                 {"sigma_per_class", f.sigmas},
                 {"theorem1", rows},
                 {"theorem2", {{"adjudication", intramix::to_json(adjudication)},
                               {"eta_sweep", sweep},
                               {"monotone_decreasing", monotone}}},
                 {"offenders", offenders},
                 {"pass", offenders.empty()}};
  emit(report, c.out, text.str());
  return offenders.empty() ? kExitOk : kExitTolerance;
}

// madgap --------------------------------------------------------------------

struct MadGapFlags {
  std::vector<std::size_t> depths{2, 4, 6, 8};
  std::size_t near = 2;
  std::size_t far = 4;
};

int cmd_madgap(const CommonFlags& c, const PipelineFlags& p, const MadGapFlags& f) {
  auto cfg = make_pipeline(p);
  cfg.augment.strategy = intramix::Strategy::kIntraMix;
  intramix::MadGapConfig mg{f.near, f.far};
  try {
    mg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  for (std::size_t depth : f.depths) {
    if (depth == 0) throw UsageError("--depths values must be positive");
  }
  const intramix::Dataset d = intramix::load_container(p.data);
  const auto classes = intramix::hop_distance_classes(d.graph, mg.near_max_hops, mg.far_min_hops);

  std::vector<std::vector<double>> base_gap(f.depths.size()), mix_gap(f.depths.size());
  Json runs = Json::array();
  std::vector<std::uint64_t> seeds;
  for (std::size_t k = 0; k < c.seeds; ++k) {
    const std::uint64_t seed = c.seed + k;
    seeds.push_back(seed);
    const auto base = intramix::run_baseline(d, cfg, seed);
    Json points = Json::array();
    for (std::size_t i = 0; i < f.depths.size(); ++i) {
      const auto pt = intramix::run_madgap_depth(d, base, cfg, classes, f.depths[i]);
      base_gap[i].push_back(pt.baseline);
      mix_gap[i].push_back(pt.intramix);
      points.push_back({{"depth", pt.depth},
                        {"baseline", pt.baseline},
                        {"intramix", pt.intramix},
                        {"baseline_accuracy", pt.baseline_test_accuracy},
                        {"intramix_accuracy", pt.intramix_test_accuracy}});
    }
    runs.push_back({{"seed", seed}, {"depths", points}});
  }
  std::ostringstream text;
  text << "madgap seed=" << c.seed << " seeds=" << c.seeds << "\n";
  Json curve = Json::array();
  for (std::size_t i = 0; i < f.depths.size(); ++i) {
    const auto sb = intramix::summarize(base_gap[i]);
    const auto sm = intramix::summarize(mix_gap[i]);
    curve.push_back({{"depth", f.depths[i]},
                     {"baseline", intramix::to_json(sb)},
                     {"intramix", intramix::to_json(sm)}});
    text << fmt("  depth %.0f  baseline %.4f  intramix %.4f\n",
                static_cast<double>(f.depths[i]), sb.mean, sm.mean);
  }
  Json report = {{"command", "madgap"},
                 {"seed", c.seed},
                 {"seeds", seeds},
                 {"config", intramix::to_json(cfg)},
                 {"near_max_hops", mg.near_max_hops},
                 {"far_min_hops", mg.far_min_hops},
                 {"data", data_summary(d, p.data)},
                 {"runs", runs},
                 {"curve", curve}};
  emit(report, c.out, text.str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"IntraMix graph augmentation lab"};
  app.require_subcommand(1);

  GenFlags gen;
  auto* gen_cmd = app.add_subcommand("gen-data", "generate a stochastic block model container");
  gen_cmd->add_option("--classes", gen.sbm.num_classes, "number of classes");
  gen_cmd->add_option("--per-class", gen.sbm.nodes_per_class, "nodes per class");
  gen_cmd->add_option("--p-intra", gen.sbm.p_intra, "within-class edge probability");
  gen_cmd->add_option("--p-inter", gen.sbm.p_inter, "between-class edge probability");
  gen_cmd->add_option("--feature-dim", gen.sbm.feature_dim, "feature dimension");
  gen_cmd->add_option("--separation", gen.sbm.class_mean_separation, "class mean separation");
  gen_cmd->add_option("--sigma", gen.sbm.feature_noise_sigma, "feature noise sigma");
  gen_cmd->add_option("--labels-per-class", gen.labels_per_class, "gold labels per class");
  gen_cmd->add_option("--val-size", gen.val_size, "validation nodes");
  gen_cmd->add_option("--seed", gen.sbm.seed, "generator seed");
  gen_cmd->add_option("--out", gen.out, "output directory")->required();

  CommonFlags run_common;
  PipelineFlags run_pipe;
  auto* run_cmd = app.add_subcommand("run", "paired baseline / augmented runs");
  add_common(run_cmd, run_common);
  add_pipeline(run_cmd, run_pipe);
  run_cmd->add_option("--strategy", run_pipe.strategy, "augmentation strategy");
  run_cmd->add_option("--checkpoint", run_pipe.checkpoint,
                      "save the last augmented model as JSON");

  CommonFlags sweep_common;
  PipelineFlags sweep_pipe;
  std::vector<double> grid{0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5};
  auto* sweep_cmd = app.add_subcommand("sweep-lambda", "accuracy over a fixed-lambda grid");
  add_common(sweep_cmd, sweep_common);
  add_pipeline(sweep_cmd, sweep_pipe);
  sweep_cmd->add_option("--strategy", sweep_pipe.strategy, "augmentation strategy");
  sweep_cmd->add_option("--grid", grid, "comma-separated lambda values")->delimiter(',');

  CommonFlags theorem_common;
  TheoremFlags theorem;
  auto* theorem_cmd = app.add_subcommand("verify-theorems", "Monte-Carlo checks of the noise bounds");
  theorem_cmd->add_option("--seed", theorem_common.seed, "seed");
  theorem_cmd->add_option("--out", theorem_common.out, "write the JSON report here");
  theorem_cmd->add_option("--trials", theorem.trials, "Monte-Carlo trials per estimate");
  theorem_cmd->add_option("--lambda", theorem.lambdas, "comma-separated lambda values")
      ->delimiter(',');
  theorem_cmd->add_option("--sigmas", theorem.sigmas, "per-class label noise sigmas")
      ->delimiter(',');
  theorem_cmd->add_option("--eta-grid", theorem.etas, "eta values for the monotonicity sweep")
      ->delimiter(',');

  CommonFlags madgap_common;
  madgap_common.seeds = 5;
  PipelineFlags madgap_pipe;
  MadGapFlags madgap;
  auto* madgap_cmd = app.add_subcommand("madgap", "MADGap against depth with and without intramix");
  add_common(madgap_cmd, madgap_common);
  add_pipeline(madgap_cmd, madgap_pipe);
  madgap_cmd->add_option("--depths", madgap.depths, "comma-separated layer counts")
      ->delimiter(',');
  madgap_cmd->add_option("--near", madgap.near, "largest hop count of a near pair");
  madgap_cmd->add_option("--far", madgap.far, "smallest hop count of a far pair");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*gen_cmd) return cmd_gen_data(gen);
    if (*run_cmd) return cmd_run(run_common, run_pipe);
    if (*sweep_cmd) return cmd_sweep_lambda(sweep_common, sweep_pipe, grid);
    if (*theorem_cmd) return cmd_verify_theorems(theorem_common, theorem);
    if (*madgap_cmd) return cmd_madgap(madgap_common, madgap_pipe, madgap);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const intramix::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitUsage;
}
