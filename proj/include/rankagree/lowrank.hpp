#pragma once

#include "rankagree/rank_stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rankagree {

template <typename Scalar>
struct SymmetricEigen {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> eigenvalues;                // non-increasing
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> eigenvectors;  // column k pairs with eigenvalue k
  int sweeps = 0;
  bool converged = false;
};

/// Cyclic Jacobi eigensolver for a real symmetric matrix.
///
/// Sweeps visit the strict upper triangle row by row, annihilating each
/// off-diagonal entry with a plane rotation. Iteration stops once the
/// off-diagonal Frobenius norm is at most `rel_tol` times the Frobenius norm
/// of the input, or after `max_sweeps` sweeps. Eigenpairs come back sorted by
/// decreasing eigenvalue; ties keep their diagonal order.
template <typename Derived>
SymmetricEigen<typename Derived::Scalar> jacobi_eigen(const Eigen::MatrixBase<Derived>& input,
                                                      typename Derived::Scalar rel_tol = 1e-12,
                                                      int max_sweeps = 100) {
  using Scalar = typename Derived::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (input.rows() != input.cols()) throw InputError("eigensolver needs a square matrix");
  const Eigen::Index n = input.rows();

  Matrix a = input;
  if (!a.allFinite()) throw InputError("eigensolver input has non-finite entries");
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > Scalar(0) && n > 0)
    throw InputError("eigensolver needs a symmetric matrix");
  Matrix v = Matrix::Identity(n, n);

  const auto off_norm = [&] {
    Scalar s = 0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) s += 2 * a(p, q) * a(p, q);
    return std::sqrt(s);
  };
  const Scalar threshold = rel_tol * a.norm();

  SymmetricEigen<Scalar> out;
  out.converged = off_norm() <= threshold;
  while (!out.converged && out.sweeps < max_sweeps) {
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const Scalar apq = a(p, q);
        if (apq == Scalar(0)) continue;
        // tan of the rotation angle, the smaller root of t^2 + 2 theta t - 1 = 0
        const Scalar theta = (a(q, q) - a(p, p)) / (2 * apq);
        const Scalar t = (theta >= 0 ? Scalar(1) : Scalar(-1)) / (std::abs(theta) + std::sqrt(theta * theta + 1));
        const Scalar c = 1 / std::sqrt(t * t + 1);
        const Scalar s = t * c;

        for (Eigen::Index k = 0; k < n; ++k) {
          const Scalar akp = a(k, p);
          const Scalar akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const Scalar apk = a(p, k);
          const Scalar aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0;
        for (Eigen::Index k = 0; k < n; ++k) {
          const Scalar vkp = v(k, p);
          const Scalar vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
    ++out.sweeps;
    out.converged = off_norm() <= threshold;
  }

  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) { return a(i, i) > a(j, j); });
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.eigenvalues(k) = a(order[k], order[k]);
    out.eigenvectors.col(k) = v.col(order[k]);
  }
  return out;
}

enum class Preprocessing { Center, ZScore };

std::string_view to_string(Preprocessing p);
Preprocessing parse_preprocessing(std::string_view s);

/// PCA of the models x benchmarks matrix (models are observations).
struct PcaResult {
  Preprocessing preprocessing = Preprocessing::Center;
  std::vector<std::string> model_ids;
  std::vector<std::string> benchmark_ids;
  Eigen::VectorXd eigenvalues;   // non-increasing, >= 0
  Eigen::VectorXd evr;           // eigenvalues / sum
  Eigen::MatrixXd components;    // benchmarks x components, orthonormal columns
  Eigen::VectorXd pc1_scores;    // per model
  Eigen::MatrixXd preprocessed;  // models x benchmarks, the matrix that was decomposed
  int sweeps = 0;
};

/// Orients every benchmark, preprocesses each feature, and decomposes the
/// sample covariance (divisor n - 1). PC1 is signed so that it correlates
/// non-negatively with each model's mean preprocessed score.
PcaResult fit_pca(const ScoreMatrix& m, Preprocessing preprocessing = Preprocessing::Center);

/// Sum of the first k explained-variance ratios.
double explained_variance_share(const PcaResult& r, Eigen::Index k);

/// Pre-training compute by the 6 * params * tokens rule. Inputs are in
/// billions; the result is in absolute floating-point operations.
double compute_flops(double params_billions, double tokens_billions);

struct ComputeRecord {
  std::string model_id;
  double flops = 0.0;
};

/// Records for models with a known token count; the rest are skipped.
std::vector<ComputeRecord> compute_records(const std::vector<ModelRecord>& models);

struct Pc1ComputePoint {
  std::string model_id;
  double log10_flops = 0.0;
  double pc1 = 0.0;
};

struct Pc1ComputeCorrelation {
  std::vector<Pc1ComputePoint> points;  // matched models, in PCA model order
  Correlation tau;
};

/// Kendall's tau between PC1 scores and log compute over models present in
/// both. Exact ties (e.g. base and instruction-tuned variants sharing a
/// compute budget) are handled by tau-b.
Pc1ComputeCorrelation pc1_compute_correlation(const PcaResult& r, const std::vector<ComputeRecord>& compute);

}  // namespace rankagree
