#include "rankagree/rank_stats.hpp"

#include <boost/math/distributions/normal.hpp>

#include <map>
#include <set>

namespace rankagree {

SignificanceConfig::SignificanceConfig(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1), got " + std::to_string(alpha));
  critical_z_ = boost::math::quantile(boost::math::normal_distribution<double>(), 1.0 - alpha / 2.0);
}

bool significant_difference(double s1, double se1, double s2, double se2, const SignificanceConfig& cfg) {
  if (!std::isfinite(s1) || !std::isfinite(s2) || !std::isfinite(se1) || !std::isfinite(se2))
    throw InputError("significance test on non-finite input");
  if (se1 < 0.0 || se2 < 0.0) throw InputError("significance test with negative standard error");
  if (se1 == 0.0 && se2 == 0.0) return s1 != s2;
  return std::abs(s1 - s2) / std::sqrt(se1 * se1 + se2 * se2) > cfg.critical_z();
}

namespace detail {

void require_same_length(Eigen::Index a, Eigen::Index b, Eigen::Index min_len) {
  if (a != b) throw InputError("length mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
  if (a < min_len) throw InputError("need at least " + std::to_string(min_len) + " entries, got " + std::to_string(a));
}

void throw_exact_tie(Eigen::Index i, Eigen::Index j, char which) {
  throw InputError(std::string("exact tie in ") + which + " at indices " + std::to_string(i) + " and " +
                   std::to_string(j) + "; use tau-b");
}

}  // namespace detail

std::string_view to_string(AgreementMethod m) { return m == AgreementMethod::Tau ? "tau" : "tau-b"; }

AgreementMethod parse_agreement_method(std::string_view s) {
  if (s == "tau") return AgreementMethod::Tau;
  if (s == "tau-b" || s == "tau_b") return AgreementMethod::TauB;
  throw InputError("method must be 'tau' or 'tau-b', got '" + std::string(s) + "'");
}

AgreementMatrix agreement_matrix(const ScoreMatrix& m, AgreementMethod method, const SignificanceConfig& cfg) {
  const Eigen::Index nb = m.n_benchmarks();
  if (nb < 2) throw InputError("agreement needs at least 2 benchmarks");
  if (m.n_models() < 2) throw InputError("agreement needs at least 2 models");

  std::vector<Eigen::VectorXd> rows;
  rows.reserve(nb);
  for (Eigen::Index i = 0; i < nb; ++i) rows.push_back(oriented_scores(m, i));

  AgreementMatrix am;
  am.benchmark_ids = m.benchmark_ids();
  am.values = Eigen::MatrixXd::Identity(nb, nb);
  am.degenerate = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(nb, nb, false);
  for (Eigen::Index a = 0; a < nb; ++a) {
    for (Eigen::Index b = a + 1; b < nb; ++b) {
      const Correlation c =
          method == AgreementMethod::Tau
              ? rank_correlation(rows[a], rows[b])
              : kendall_tau_b(rows[a], m.stderrs().row(a).transpose(), rows[b], m.stderrs().row(b).transpose(), cfg);
      am.degenerate(a, b) = am.degenerate(b, a) = c.is_degenerate();
      am.values(a, b) = am.values(b, a) = c.is_degenerate() ? 0.0 : *c.optional();
    }
  }
  return am;
}

std::vector<MeanAgreement> mean_agreement(const AgreementMatrix& am) {
  const Eigen::Index nb = am.size();
  if (nb < 2) throw InputError("mean agreement needs at least 2 benchmarks");
  std::vector<MeanAgreement> out;
  out.reserve(nb);
  for (Eigen::Index i = 0; i < nb; ++i) {
    MeanAgreement r;
    r.benchmark_id = am.benchmark_ids[i];
    double sum = 0.0;
    for (Eigen::Index j = 0; j < nb; ++j) {
      if (j == i) continue;
      if (am.degenerate(i, j)) {
        ++r.n_degenerate;
      } else {
        sum += am.values(i, j);
        ++r.n_used;
      }
    }
    r.mean = r.n_used ? Correlation(sum / static_cast<double>(r.n_used)) : Correlation::degenerate();
    out.push_back(std::move(r));
  }
  return out;
}

Correlation overall_mean_agreement(const AgreementMatrix& am) {
  double sum = 0.0;
  std::size_t n = 0;
  for (Eigen::Index i = 0; i < am.size(); ++i)
    for (Eigen::Index j = i + 1; j < am.size(); ++j)
      if (!am.degenerate(i, j)) {
        sum += am.values(i, j);
        ++n;
      }
  return n ? Correlation(sum / static_cast<double>(n)) : Correlation::degenerate();
}

CategoryAgreement category_agreement(const AgreementMatrix& am, const std::vector<BenchmarkRecord>& cats) {
  std::map<std::string, Category, std::less<>> lookup;
  for (const auto& r : cats)
    if (!lookup.emplace(trim(r.benchmark_id), r.category).second)
      throw InputError("benchmark '" + r.benchmark_id + "' assigned a category twice");

  std::vector<Category> of(am.benchmark_ids.size());
  std::set<Category> used;
  for (std::size_t i = 0; i < am.benchmark_ids.size(); ++i) {
    const auto it = lookup.find(am.benchmark_ids[i]);
    if (it == lookup.end()) throw InputError("benchmark '" + am.benchmark_ids[i] + "' has no category");
    of[i] = it->second;
    used.insert(it->second);
  }

  CategoryAgreement out;
  for (Category c : kAllCategories)
    if (used.count(c)) out.categories.push_back(c);
  const auto nc = static_cast<Eigen::Index>(out.categories.size());
  out.values = Eigen::MatrixXd::Zero(nc, nc);
  out.degenerate = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(nc, nc, false);

  for (Eigen::Index p = 0; p < nc; ++p) {
    for (Eigen::Index q = p; q < nc; ++q) {
      const Category cp = out.categories[p];
      const Category cq = out.categories[q];
      double sum = 0.0;
      std::size_t n = 0;
      std::size_t members = 0;
      for (Eigen::Index a = 0; a < am.size(); ++a) {
        if (of[a] != cp) continue;
        ++members;
        // Within a category, count each unordered pair once and skip self-pairs.
        for (Eigen::Index b = (p == q ? a + 1 : 0); b < am.size(); ++b) {
          if (of[b] != cq || am.degenerate(a, b)) continue;
          sum += am.values(a, b);
          ++n;
        }
      }
      if (p == q && members < 2)
        throw InputError("category " + std::string(to_string(cp)) +
                         " has a single benchmark; its within-category agreement is undefined");
      const bool degenerate = n == 0;
      const double v = degenerate ? 0.0 : sum / static_cast<double>(n);
      out.values(p, q) = out.values(q, p) = v;
      out.degenerate(p, q) = out.degenerate(q, p) = degenerate;
    }
  }
  return out;
}

double bits_per_byte(double total_nll_nats, double total_bytes) {
  if (!(total_bytes > 0.0) || !std::isfinite(total_bytes)) throw InputError("byte count must be positive");
  if (!(total_nll_nats >= 0.0) || !std::isfinite(total_nll_nats))
    throw InputError("negative log-likelihood must be finite and >= 0");
  return total_nll_nats / (total_bytes * std::log(2.0));
}

AveragedScores average_rank_vector(const ScoreMatrix& m, const std::vector<std::string>& subset) {
  if (subset.empty()) throw InputError("average over an empty benchmark subset");
  std::set<std::string_view> seen;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(m.n_models());
  for (const auto& id : subset) {
    if (!seen.insert(id).second) throw InputError("benchmark '" + id + "' listed twice in subset");
    sum += oriented_scores(m, id);
  }
  AveragedScores out;
  out.values = sum / static_cast<double>(subset.size());
  out.constant = out.values.size() > 0 && (out.values.array() == out.values(0)).all();
  return out;
}

}  // namespace rankagree
