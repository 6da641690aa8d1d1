#include "rankagree/synth.hpp"

#include <cstdio>

namespace rankagree {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<double> spread(int n, double lo, double hi) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = n == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * i / (n - 1);
  return v;
}

std::vector<std::string> numbered(const char* prefix, int n) {
  std::vector<std::string> ids;
  const int width = n > 100 ? 3 : 2;
  char buf[32];
  for (int i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof buf, "%s%0*d", prefix, width, i);
    ids.emplace_back(buf);
  }
  return ids;
}

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

std::mt19937_64 RandomStreams::substream(std::string_view tag, std::uint64_t row, std::uint64_t col) const {
  std::uint64_t key = splitmix64(seed_ ^ splitmix64(fnv1a(tag)));
  key = splitmix64(key ^ splitmix64(row + 0x632be59bd9b4e019ULL));
  key = splitmix64(key ^ splitmix64(col + 0x8cb92ba72f3d8dd7ULL));
  std::seed_seq seq{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)};
  return std::mt19937_64(seq);
}

std::string_view to_string(EvalMode m) { return m == EvalMode::Direct ? "direct" : "tbt"; }

EvalMode parse_eval_mode(std::string_view s) {
  if (s == "direct") return EvalMode::Direct;
  if (s == "tbt" || s == "train-before-test") return EvalMode::TrainBeforeTest;
  throw InputError("mode must be 'direct' or 'tbt', got '" + std::string(s) + "'");
}

SyntheticConfig SyntheticConfig::with_defaults(int n_models, int n_benchmarks, std::uint64_t seed) {
  SyntheticConfig cfg;
  cfg.n_models = n_models;
  cfg.n_benchmarks = n_benchmarks;
  cfg.seed = seed;
  cfg.benchmark_loading = spread(n_benchmarks, 0.6, 1.4);
  cfg.benchmark_bias = spread(n_benchmarks, -1.0, 1.0);
  cfg.finetune_uplift.assign(n_benchmarks, 0.5);
  cfg.n_items.assign(n_benchmarks, 2000);
  return cfg;
}

void validate(const SyntheticConfig& cfg) {
  if (cfg.n_models < 2 || cfg.n_benchmarks < 2) throw InputError("synthetic config needs at least 2 models and 2 benchmarks");
  const auto nb = static_cast<std::size_t>(cfg.n_benchmarks);
  const auto sized = [&](std::size_t got, const char* what) {
    if (got != nb)
      throw InputError(std::string(what) + " has " + std::to_string(got) + " entries for " + std::to_string(nb) +
                       " benchmarks");
  };
  sized(cfg.benchmark_loading.size(), "benchmark_loading");
  sized(cfg.benchmark_bias.size(), "benchmark_bias");
  sized(cfg.finetune_uplift.size(), "finetune_uplift");
  sized(cfg.n_items.size(), "n_items");
  for (std::size_t i = 0; i < nb; ++i) {
    if (!(cfg.benchmark_loading[i] > 0.0) || !std::isfinite(cfg.benchmark_loading[i]))
      throw InputError("benchmark_loading must be > 0");
    if (!std::isfinite(cfg.benchmark_bias[i])) throw InputError("benchmark_bias must be finite");
    if (!(cfg.finetune_uplift[i] >= 0.0) || !std::isfinite(cfg.finetune_uplift[i]))
      throw InputError("finetune_uplift must be >= 0");
    if (cfg.n_items[i] < 1) throw InputError("n_items must be >= 1");
  }
  if (!(cfg.prep_sd >= 0.0) || !std::isfinite(cfg.prep_sd)) throw InputError("prep_sd must be >= 0");
  if (!(cfg.residual_prep >= 0.0 && cfg.residual_prep <= 1.0)) throw InputError("residual_prep must lie in [0, 1]");
  if (!std::isfinite(cfg.capability_slope)) throw InputError("capability_slope must be finite");
  if (!(cfg.flops_min > 0.0) || !(cfg.flops_max >= cfg.flops_min) || !std::isfinite(cfg.flops_max))
    throw InputError("flops range must satisfy 0 < flops_min <= flops_max");
}

std::vector<std::string> synthetic_model_ids(const SyntheticConfig& cfg) { return numbered("model-", cfg.n_models); }

std::vector<std::string> synthetic_benchmark_ids(const SyntheticConfig& cfg) {
  return numbered("bench-", cfg.n_benchmarks);
}

std::vector<double> synthetic_flops(const SyntheticConfig& cfg) {
  validate(cfg);
  std::vector<double> out;
  for (double lf : spread(cfg.n_models, std::log10(cfg.flops_min), std::log10(cfg.flops_max)))
    out.push_back(std::pow(10.0, lf));
  return out;
}

std::vector<ModelRecord> synthetic_models(const SyntheticConfig& cfg) {
  const auto ids = synthetic_model_ids(cfg);
  const auto flops = synthetic_flops(cfg);
  std::vector<ModelRecord> out;
  for (std::size_t j = 0; j < ids.size(); ++j) {
    // tokens = 20 * params, so flops = 120 * params^2 (billions, 1e18 scale)
    const double params_b = std::sqrt(flops[j] / 1.2e20);
    out.push_back({ids[j], "synthetic", params_b, 20.0 * params_b, false});
  }
  return out;
}

ScoreMatrix generate(const SyntheticConfig& cfg, EvalMode mode) {
  validate(cfg);
  const Eigen::Index nb = cfg.n_benchmarks;
  const Eigen::Index nm = cfg.n_models;

  const double lo = std::log10(cfg.flops_min);
  const double hi = std::log10(cfg.flops_max);
  const auto log_flops = spread(cfg.n_models, lo, hi);
  Eigen::VectorXd capability(nm);
  for (Eigen::Index j = 0; j < nm; ++j) {
    const double normalized = hi > lo ? 2.0 * (log_flops[j] - lo) / (hi - lo) - 1.0 : 0.0;
    capability(j) = cfg.capability_slope * normalized;
  }

  const bool tuned = mode == EvalMode::TrainBeforeTest;
  const double prep_weight = tuned ? cfg.residual_prep : 1.0;
  const RandomStreams streams(cfg.seed);

  ScoreMatrixDraft d;
  d.benchmark_ids = synthetic_benchmark_ids(cfg);
  d.model_ids = synthetic_model_ids(cfg);
  d.scores.resize(nb, nm);
  d.stderrs.resize(nb, nm);
  d.directions.assign(nb, Direction::HigherIsBetter);
  for (Eigen::Index i = 0; i < nb; ++i) {
    const std::int64_t items = cfg.n_items[i];
    d.n_items.emplace_back(items);
    const double uplift = tuned ? cfg.finetune_uplift[i] : 0.0;
    for (Eigen::Index j = 0; j < nm; ++j) {
      // Both modes read the same two substreams for a cell.
      auto prep_rng = streams.substream("prep", i, j);
      const double prep = cfg.prep_sd * std::normal_distribution<double>(0.0, 1.0)(prep_rng);
      const double q = logistic(cfg.benchmark_loading[i] * capability(j) + cfg.benchmark_bias[i] +
                                prep * prep_weight + uplift);
      auto item_rng = streams.substream("items", i, j);
      const auto correct = std::binomial_distribution<std::int64_t>(items, q)(item_rng);
      const double score = static_cast<double>(correct) / static_cast<double>(items);
      d.scores(i, j) = score;
      d.stderrs(i, j) = std::sqrt(score * (1.0 - score) / static_cast<double>(items));
    }
  }
  return validate_score_matrix(std::move(d));
}

PairedSummary paired_experiment(const SyntheticConfig& cfg) {
  const ScoreMatrix direct = generate(cfg, EvalMode::Direct);
  const ScoreMatrix tbt = generate(cfg, EvalMode::TrainBeforeTest);
  PairedSummary s;
  s.mean_tau_direct = overall_mean_agreement(agreement_matrix(direct, AgreementMethod::Tau)).value();
  s.mean_tau_tbt = overall_mean_agreement(agreement_matrix(tbt, AgreementMethod::Tau)).value();
  s.evr1_direct = fit_pca(direct).evr(0);
  s.evr1_tbt = fit_pca(tbt).evr(0);
  return s;
}

}  // namespace rankagree
