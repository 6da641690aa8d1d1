#include "rankagree/lowrank.hpp"

#include <map>

namespace rankagree {

std::string_view to_string(Preprocessing p) { return p == Preprocessing::Center ? "center" : "zscore"; }

Preprocessing parse_preprocessing(std::string_view s) {
  if (s == "center") return Preprocessing::Center;
  if (s == "zscore") return Preprocessing::ZScore;
  throw InputError("preprocessing must be 'center' or 'zscore', got '" + std::string(s) + "'");
}

PcaResult fit_pca(const ScoreMatrix& m, Preprocessing preprocessing) {
  const Eigen::Index n_models = m.n_models();
  const Eigen::Index n_features = m.n_benchmarks();
  if (n_models < 2 || n_features < 2) throw InputError("PCA needs at least 2 models and 2 benchmarks");

  Eigen::MatrixXd x(n_models, n_features);
  for (Eigen::Index i = 0; i < n_features; ++i) x.col(i) = oriented_scores(m, i);
  x.rowwise() -= x.colwise().mean();
  if (preprocessing == Preprocessing::ZScore) {
    for (Eigen::Index i = 0; i < n_features; ++i) {
      const double sd = std::sqrt(x.col(i).squaredNorm() / static_cast<double>(n_models - 1));
      if (sd == 0.0) throw DegenerateError("benchmark '" + m.benchmark_ids()[i] + "' has zero variance; cannot z-score");
      x.col(i) /= sd;
    }
  }

  Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(n_models - 1);
  cov = (0.5 * (cov + cov.transpose())).eval();
  auto eig = jacobi_eigen(cov);
  if (!eig.converged) throw DegenerateError("eigensolver did not converge within the sweep limit");

  PcaResult r;
  r.preprocessing = preprocessing;
  r.model_ids = m.model_ids();
  r.benchmark_ids = m.benchmark_ids();
  r.eigenvalues = eig.eigenvalues.cwiseMax(0.0);
  const double total = r.eigenvalues.sum();
  if (!(total > 0.0)) throw DegenerateError("score matrix has zero total variance");
  r.evr = r.eigenvalues / total;
  r.components = std::move(eig.eigenvectors);
  r.sweeps = eig.sweeps;

  r.pc1_scores = x * r.components.col(0);
  const Eigen::VectorXd mean_score = x.rowwise().mean();
  const double agreement = (r.pc1_scores.array() - r.pc1_scores.mean()).matrix().dot(
      (mean_score.array() - mean_score.mean()).matrix());
  bool flip = agreement < 0.0;
  if (agreement == 0.0) {
    // No preference from the mean score: make the first nonzero loading positive.
    for (Eigen::Index k = 0; k < n_features; ++k)
      if (r.components(k, 0) != 0.0) {
        flip = r.components(k, 0) < 0.0;
        break;
      }
  }
  if (flip) {
    r.components.col(0) = -r.components.col(0);
    r.pc1_scores = -r.pc1_scores;
  }
  r.preprocessed = std::move(x);
  return r;
}

double explained_variance_share(const PcaResult& r, Eigen::Index k) {
  if (k < 1 || k > r.evr.size())
    throw InputError("component count " + std::to_string(k) + " outside [1, " + std::to_string(r.evr.size()) + "]");
  return r.evr.head(k).sum();
}

double compute_flops(double params_billions, double tokens_billions) {
  if (!(params_billions > 0.0) || !std::isfinite(params_billions)) throw InputError("parameter count must be > 0");
  if (!(tokens_billions > 0.0) || !std::isfinite(tokens_billions)) throw InputError("token count must be > 0");
  return 6.0 * params_billions * tokens_billions * 1e18;
}

std::vector<ComputeRecord> compute_records(const std::vector<ModelRecord>& models) {
  std::vector<ComputeRecord> out;
  for (const auto& rec : models) {
    validate(rec);
    if (rec.token_count_b) out.push_back({rec.model_id, compute_flops(rec.param_count_b, *rec.token_count_b)});
  }
  return out;
}

Pc1ComputeCorrelation pc1_compute_correlation(const PcaResult& r, const std::vector<ComputeRecord>& compute) {
  std::map<std::string, double, std::less<>> flops;
  for (const auto& c : compute) {
    if (!(c.flops > 0.0) || !std::isfinite(c.flops)) throw InputError("model '" + c.model_id + "': flops must be > 0");
    if (!flops.emplace(c.model_id, c.flops).second) throw InputError("duplicate compute record for '" + c.model_id + "'");
  }

  Pc1ComputeCorrelation out;
  for (std::size_t j = 0; j < r.model_ids.size(); ++j) {
    const auto it = flops.find(r.model_ids[j]);
    if (it == flops.end()) continue;
    out.points.push_back({r.model_ids[j], std::log10(it->second), r.pc1_scores(static_cast<Eigen::Index>(j))});
  }
  if (out.points.size() < 2) throw InputError("fewer than 2 models have both PC1 scores and compute records");

  Eigen::VectorXd pc1(out.points.size()), logf(out.points.size());
  for (std::size_t k = 0; k < out.points.size(); ++k) {
    pc1(static_cast<Eigen::Index>(k)) = out.points[k].pc1;
    logf(static_cast<Eigen::Index>(k)) = out.points[k].log10_flops;
  }
  out.tau = rank_correlation(pc1, logf);
  return out;
}

}  // namespace rankagree
