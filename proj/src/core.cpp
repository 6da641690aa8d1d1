#include "rankagree/core.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace rankagree {

namespace {

std::string cell_name(const ScoreMatrixDraft& d, Eigen::Index row, Eigen::Index col) {
  std::ostringstream os;
  os << "benchmark " << row << " '" << d.benchmark_ids[row] << "' / model " << col << " '" << d.model_ids[col]
     << "'";
  return os.str();
}

void check_unique(const std::vector<std::string>& ids, const char* what) {
  std::set<std::string_view> seen;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i].empty()) throw ValidationError(std::string("empty ") + what + " id at index " + std::to_string(i));
    if (!seen.insert(ids[i]).second)
      throw ValidationError(std::string("duplicate ") + what + " id '" + ids[i] + "'");
  }
}

}  // namespace

std::string_view to_string(Direction d) { return d == Direction::HigherIsBetter ? "higher" : "lower"; }

Direction parse_direction(std::string_view s) {
  if (s == "higher") return Direction::HigherIsBetter;
  if (s == "lower") return Direction::LowerIsBetter;
  throw InputError("direction must be 'higher' or 'lower', got '" + std::string(s) + "'");
}

std::string_view to_string(Category c) {
  switch (c) {
    case Category::LU: return "LU";
    case Category::CR: return "CR";
    case Category::QA: return "QA";
    case Category::PBC: return "PBC";
    case Category::Math: return "Math";
    case Category::Med: return "Med";
    case Category::PPL: return "PPL";
  }
  return "?";
}

Category parse_category(std::string_view s) {
  for (Category c : kAllCategories)
    if (to_string(c) == s) return c;
  throw InputError("unknown benchmark category '" + std::string(s) + "'");
}

std::string trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return std::string(s);
}

ScoreMatrix validate_score_matrix(ScoreMatrixDraft raw) {
  for (auto& id : raw.benchmark_ids) id = trim(id);
  for (auto& id : raw.model_ids) id = trim(id);

  const auto nb = static_cast<Eigen::Index>(raw.benchmark_ids.size());
  const auto nm = static_cast<Eigen::Index>(raw.model_ids.size());
  if (raw.scores.rows() != nb || raw.scores.cols() != nm) {
    std::ostringstream os;
    os << "dimension mismatch: scores are " << raw.scores.rows() << "x" << raw.scores.cols() << " but ids give "
       << nb << "x" << nm;
    throw ValidationError(os.str());
  }
  if (raw.stderrs.rows() != nb || raw.stderrs.cols() != nm) {
    std::ostringstream os;
    os << "dimension mismatch: stderrs are " << raw.stderrs.rows() << "x" << raw.stderrs.cols()
       << " but scores are " << nb << "x" << nm;
    throw ValidationError(os.str());
  }
  if (static_cast<Eigen::Index>(raw.directions.size()) != nb)
    throw ValidationError("dimension mismatch: " + std::to_string(raw.directions.size()) + " directions for " +
                          std::to_string(nb) + " benchmarks");
  if (raw.n_items.empty()) raw.n_items.assign(nb, std::nullopt);
  if (static_cast<Eigen::Index>(raw.n_items.size()) != nb)
    throw ValidationError("dimension mismatch: " + std::to_string(raw.n_items.size()) + " item counts for " +
                          std::to_string(nb) + " benchmarks");

  check_unique(raw.benchmark_ids, "benchmark");
  check_unique(raw.model_ids, "model");

  for (Eigen::Index i = 0; i < nb; ++i) {
    if (raw.n_items[i] && *raw.n_items[i] < 1)
      throw ValidationError("item count must be >= 1 for benchmark " + std::to_string(i) + " '" +
                                raw.benchmark_ids[i] + "'",
                            i);
    for (Eigen::Index j = 0; j < nm; ++j) {
      if (!std::isfinite(raw.scores(i, j)))
        throw ValidationError("non-finite score at " + cell_name(raw, i, j), i, j);
      if (!std::isfinite(raw.stderrs(i, j)))
        throw ValidationError("non-finite stderr at " + cell_name(raw, i, j), i, j);
      if (raw.stderrs(i, j) < 0.0) throw ValidationError("negative stderr at " + cell_name(raw, i, j), i, j);
    }
  }

  ScoreMatrix m;
  m.benchmark_ids_ = std::move(raw.benchmark_ids);
  m.model_ids_ = std::move(raw.model_ids);
  m.scores_ = std::move(raw.scores);
  m.stderrs_ = std::move(raw.stderrs);
  m.n_items_ = std::move(raw.n_items);
  m.directions_ = std::move(raw.directions);
  return m;
}

Eigen::Index ScoreMatrix::benchmark_index(std::string_view id) const {
  const auto it = std::find(benchmark_ids_.begin(), benchmark_ids_.end(), id);
  if (it == benchmark_ids_.end()) throw InputError("unknown benchmark '" + std::string(id) + "'");
  return it - benchmark_ids_.begin();
}

std::optional<Eigen::Index> ScoreMatrix::find_model(std::string_view id) const {
  const auto it = std::find(model_ids_.begin(), model_ids_.end(), id);
  if (it == model_ids_.end()) return std::nullopt;
  return it - model_ids_.begin();
}

ScoreMatrixDraft ScoreMatrix::draft() const {
  return {benchmark_ids_, model_ids_, scores_, stderrs_, n_items_, directions_};
}

ScoreMatrix ScoreMatrix::select_benchmarks(const std::vector<std::string>& ids) const {
  ScoreMatrixDraft d;
  d.model_ids = model_ids_;
  d.scores.resize(static_cast<Eigen::Index>(ids.size()), n_models());
  d.stderrs.resize(static_cast<Eigen::Index>(ids.size()), n_models());
  for (std::size_t k = 0; k < ids.size(); ++k) {
    const Eigen::Index row = benchmark_index(ids[k]);
    d.benchmark_ids.push_back(benchmark_ids_[row]);
    d.scores.row(static_cast<Eigen::Index>(k)) = scores_.row(row);
    d.stderrs.row(static_cast<Eigen::Index>(k)) = stderrs_.row(row);
    d.n_items.push_back(n_items_[row]);
    d.directions.push_back(directions_[row]);
  }
  return validate_score_matrix(std::move(d));
}

Eigen::VectorXd oriented_scores(const ScoreMatrix& m, Eigen::Index row) {
  Eigen::VectorXd v = m.scores().row(row).transpose();
  if (m.directions()[row] == Direction::LowerIsBetter) v = -v;
  return v;
}

Eigen::VectorXd oriented_scores(const ScoreMatrix& m, std::string_view benchmark) {
  return oriented_scores(m, m.benchmark_index(benchmark));
}

void validate(const ModelRecord& r) {
  if (trim(r.model_id).empty()) throw InputError("model record with empty id");
  if (!(r.param_count_b > 0.0) || !std::isfinite(r.param_count_b))
    throw InputError("model '" + r.model_id + "': params_b must be > 0");
  if (r.token_count_b && (!(*r.token_count_b > 0.0) || !std::isfinite(*r.token_count_b)))
    throw InputError("model '" + r.model_id + "': tokens_b must be > 0 when present");
}

double Correlation::value() const {
  if (!value_) throw DegenerateError("correlation is undefined (zero denominator)");
  return *value_;
}

}  // namespace rankagree
