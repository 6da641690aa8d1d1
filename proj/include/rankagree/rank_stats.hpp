#pragma once

#include "rankagree/core.hpp"

#include <cmath>
#include <cstdint>

namespace rankagree {

/// Two-sided z-test level. critical_z is derived from alpha on construction.
class SignificanceConfig {
 public:
  SignificanceConfig() : SignificanceConfig(0.05) {}
  explicit SignificanceConfig(double alpha);

  double alpha() const { return alpha_; }
  double critical_z() const { return critical_z_; }

 private:
  double alpha_;
  double critical_z_;
};

/// True iff |s1 - s2| / sqrt(se1^2 + se2^2) exceeds the critical value.
/// With both standard errors zero this is plain inequality.
bool significant_difference(double s1, double se1, double s2, double se2, const SignificanceConfig& cfg);

namespace detail {

void require_same_length(Eigen::Index a, Eigen::Index b, Eigen::Index min_len);
[[noreturn]] void throw_exact_tie(Eigen::Index i, Eigen::Index j, char which);

inline int sign(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace detail

/// Kendall's tau-a, (C - D) / (n choose 2). Rejects exact ties; use
/// kendall_tau_b when ties are possible.
template <typename DerivedX, typename DerivedY>
double kendall_tau(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y) {
  const Eigen::Index n = x.size();
  detail::require_same_length(n, y.size(), 2);
  std::int64_t concordant = 0;
  std::int64_t discordant = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const int sx = detail::sign(x(i) - x(j));
      const int sy = detail::sign(y(i) - y(j));
      if (sx == 0) detail::throw_exact_tie(i, j, 'x');
      if (sy == 0) detail::throw_exact_tie(i, j, 'y');
      (sx == sy ? concordant : discordant) += 1;
    }
  }
  const std::int64_t pairs = n * (n - 1) / 2;
  return static_cast<double>(concordant - discordant) / static_cast<double>(pairs);
}

/// Pair tallies behind tau-b. Pairs tied in both dimensions appear in none.
struct TauBCounts {
  std::int64_t concordant = 0;
  std::int64_t discordant = 0;
  std::int64_t tied_x_only = 0;
  std::int64_t tied_y_only = 0;
  std::int64_t tied_both = 0;
};

template <typename DX, typename DSX, typename DY, typename DSY>
TauBCounts tau_b_counts(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DSX>& se_x,
                        const Eigen::MatrixBase<DY>& y, const Eigen::MatrixBase<DSY>& se_y,
                        const SignificanceConfig& cfg) {
  const Eigen::Index n = x.size();
  detail::require_same_length(n, y.size(), 2);
  detail::require_same_length(n, se_x.size(), 2);
  detail::require_same_length(n, se_y.size(), 2);
  TauBCounts c;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const bool tx = !significant_difference(x(i), se_x(i), x(j), se_x(j), cfg);
      const bool ty = !significant_difference(y(i), se_y(i), y(j), se_y(j), cfg);
      if (tx && ty) {
        ++c.tied_both;
      } else if (tx) {
        ++c.tied_x_only;
      } else if (ty) {
        ++c.tied_y_only;
      } else if (detail::sign(x(i) - x(j)) == detail::sign(y(i) - y(j))) {
        ++c.concordant;
      } else {
        ++c.discordant;
      }
    }
  }
  return c;
}

inline Correlation tau_b_from_counts(const TauBCounts& c) {
  const std::int64_t untied = c.concordant + c.discordant;
  const double denom =
      static_cast<double>(untied + c.tied_x_only) * static_cast<double>(untied + c.tied_y_only);
  if (denom == 0.0) return Correlation::degenerate();
  return Correlation(static_cast<double>(c.concordant - c.discordant) / std::sqrt(denom));
}

/// Kendall's tau-b where a pair counts as tied in a dimension when the two
/// scores are not significantly different given their standard errors.
template <typename DX, typename DSX, typename DY, typename DSY>
Correlation kendall_tau_b(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DSX>& se_x,
                          const Eigen::MatrixBase<DY>& y, const Eigen::MatrixBase<DSY>& se_y,
                          const SignificanceConfig& cfg) {
  return tau_b_from_counts(tau_b_counts(x, se_x, y, se_y, cfg));
}

template <typename Derived>
bool has_exact_ties(const Eigen::MatrixBase<Derived>& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    for (Eigen::Index j = i + 1; j < v.size(); ++j)
      if (v(i) == v(j)) return true;
  return false;
}

/// Rank correlation for plain score vectors: tau-a when neither vector has
/// exact ties, otherwise classical tau-b over exact ties.
template <typename DX, typename DY>
Correlation rank_correlation(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DY>& y) {
  if (!has_exact_ties(x) && !has_exact_ties(y)) return Correlation(kendall_tau(x, y));
  const Eigen::VectorXd zeros = Eigen::VectorXd::Zero(x.size());
  return kendall_tau_b(x, zeros, y, zeros, SignificanceConfig());
}

enum class AgreementMethod { Tau, TauB };

std::string_view to_string(AgreementMethod m);
AgreementMethod parse_agreement_method(std::string_view s);

/// Pairwise rank agreement between benchmark rows (on oriented scores).
/// Tau uses rank_correlation; TauB uses significance ties from stderrs.
AgreementMatrix agreement_matrix(const ScoreMatrix& m, AgreementMethod method,
                                 const SignificanceConfig& cfg = SignificanceConfig());

struct MeanAgreement {
  std::string benchmark_id;
  Correlation mean;              // degenerate when every off-diagonal cell was
  std::size_t n_used = 0;
  std::size_t n_degenerate = 0;  // cells skipped
};

/// Mean of each benchmark's off-diagonal agreement, skipping degenerate cells.
std::vector<MeanAgreement> mean_agreement(const AgreementMatrix& am);

/// Mean of every defined off-diagonal cell (upper triangle).
Correlation overall_mean_agreement(const AgreementMatrix& am);

struct CategoryAgreement {
  std::vector<Category> categories;
  Eigen::MatrixXd values;
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> degenerate;

  Correlation cell(Eigen::Index i, Eigen::Index j) const {
    return degenerate(i, j) ? Correlation::degenerate() : Correlation(values(i, j));
  }
};

/// Averages agreement over benchmark pairs by category. Off-diagonal entries
/// average every cross pair; diagonal entries average distinct pairs within a
/// category. Categories appear in canonical order, restricted to those used.
CategoryAgreement category_agreement(const AgreementMatrix& am, const std::vector<BenchmarkRecord>& cats);

/// Negative log-likelihood in nats over a byte count, expressed in bits per byte.
double bits_per_byte(double total_nll_nats, double total_bytes);

struct AveragedScores {
  Eigen::VectorXd values;  // per model
  bool constant = false;   // all models equal: rank statistics are degenerate
};

/// Per-model mean of oriented scores over a subset of benchmarks.
AveragedScores average_rank_vector(const ScoreMatrix& m, const std::vector<std::string>& subset);

}  // namespace rankagree
