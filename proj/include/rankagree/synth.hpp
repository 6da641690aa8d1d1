#pragma once

#include "rankagree/lowrank.hpp"

#include <random>

namespace rankagree {

/// Seeded generator family. Each (tag, row, col) key yields an independent
/// engine, so draws for a cell do not depend on evaluation order or on any
/// other cell.
class RandomStreams {
 public:
  explicit RandomStreams(std::uint64_t seed) : seed_(seed) {}

  std::mt19937_64 substream(std::string_view tag, std::uint64_t row, std::uint64_t col) const;

 private:
  std::uint64_t seed_;
};

enum class EvalMode { Direct, TrainBeforeTest };

std::string_view to_string(EvalMode m);
EvalMode parse_eval_mode(std::string_view s);

/// Latent-factor score generator. Success probability for benchmark i and
/// model j is logistic(a_i g_j + b_i + w p_ij + u_i) with w = 1, u_i = 0 for
/// direct evaluation and w = residual_prep, u_i = finetune_uplift_i after
/// fine-tuning on the task. Scores are binomial accuracies over n_items.
struct SyntheticConfig {
  int n_models = 20;
  int n_benchmarks = 12;
  std::uint64_t seed = 0;
  double capability_slope = 1.5;  // latent skill per unit of normalized log compute
  double flops_min = 1e20;
  double flops_max = 1e24;
  std::vector<double> benchmark_loading;  // a_i > 0
  std::vector<double> benchmark_bias;     // b_i
  double prep_sd = 0.5;                   // sd of preparation offsets p_ij
  double residual_prep = 0.0;             // share of p_ij kept under train-before-test
  std::vector<double> finetune_uplift;    // u_i >= 0
  std::vector<std::int64_t> n_items;      // per benchmark

  /// Default per-benchmark parameters for the given shape: loadings spread
  /// over [0.6, 1.4], biases over [-1, 1], uplift 0.5, 2000 items.
  static SyntheticConfig with_defaults(int n_models, int n_benchmarks, std::uint64_t seed = 0);
};

void validate(const SyntheticConfig& cfg);

std::vector<std::string> synthetic_model_ids(const SyntheticConfig& cfg);
std::vector<std::string> synthetic_benchmark_ids(const SyntheticConfig& cfg);

/// Pre-training compute per model, log-evenly spaced over [flops_min, flops_max].
std::vector<double> synthetic_flops(const SyntheticConfig& cfg);

/// Model metadata whose 6 * params * tokens reproduces synthetic_flops.
std::vector<ModelRecord> synthetic_models(const SyntheticConfig& cfg);

ScoreMatrix generate(const SyntheticConfig& cfg, EvalMode mode);

struct PairedSummary {
  double mean_tau_direct = 0.0;
  double mean_tau_tbt = 0.0;
  double evr1_direct = 0.0;
  double evr1_tbt = 0.0;
  double tau_gain() const { return mean_tau_tbt - mean_tau_direct; }
  double evr1_gain() const { return evr1_tbt - evr1_direct; }
};

/// Generates both modes from the same draws and compares mean pairwise tau
/// and the first explained-variance ratio (centered PCA).
PairedSummary paired_experiment(const SyntheticConfig& cfg);

}  // namespace rankagree
