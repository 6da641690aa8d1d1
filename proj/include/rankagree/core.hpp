#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rankagree {

/// Malformed or inconsistent input (CLI exit code 2).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A requested statistic is undefined for the given data (CLI exit code 3).
class DegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by validation; carries the offending cell when there is one.
class ValidationError : public InputError {
 public:
  ValidationError(const std::string& what, std::optional<Eigen::Index> row = std::nullopt,
                  std::optional<Eigen::Index> col = std::nullopt)
      : InputError(what), row_(row), col_(col) {}

  std::optional<Eigen::Index> row() const { return row_; }
  std::optional<Eigen::Index> col() const { return col_; }

 private:
  std::optional<Eigen::Index> row_;
  std::optional<Eigen::Index> col_;
};

enum class Direction { HigherIsBetter, LowerIsBetter };

std::string_view to_string(Direction d);
Direction parse_direction(std::string_view s);

enum class Category { LU, CR, QA, PBC, Math, Med, PPL };

inline constexpr Category kAllCategories[] = {Category::LU,   Category::CR,  Category::QA, Category::PBC,
                                              Category::Math, Category::Med, Category::PPL};

std::string_view to_string(Category c);
Category parse_category(std::string_view s);

std::string trim(std::string_view s);

/// Unvalidated score matrix as assembled by a reader or generator.
struct ScoreMatrixDraft {
  std::vector<std::string> benchmark_ids;
  std::vector<std::string> model_ids;
  Eigen::MatrixXd scores;   // rows = benchmarks, cols = models
  Eigen::MatrixXd stderrs;  // same shape as scores
  std::vector<std::optional<std::int64_t>> n_items;  // per benchmark; may be empty
  std::vector<Direction> directions;                 // per benchmark
};

/// Benchmark x model scores with standard errors. Immutable once built; the
/// only way to obtain one is validate_score_matrix().
class ScoreMatrix {
 public:
  const std::vector<std::string>& benchmark_ids() const { return benchmark_ids_; }
  const std::vector<std::string>& model_ids() const { return model_ids_; }
  const Eigen::MatrixXd& scores() const { return scores_; }
  const Eigen::MatrixXd& stderrs() const { return stderrs_; }
  const std::vector<std::optional<std::int64_t>>& n_items() const { return n_items_; }
  const std::vector<Direction>& directions() const { return directions_; }

  Eigen::Index n_benchmarks() const { return scores_.rows(); }
  Eigen::Index n_models() const { return scores_.cols(); }

  /// Row index of a benchmark; throws InputError when absent.
  Eigen::Index benchmark_index(std::string_view id) const;
  std::optional<Eigen::Index> find_model(std::string_view id) const;

  ScoreMatrixDraft draft() const;

  /// Copy restricted to the given benchmark rows, in the given order.
  ScoreMatrix select_benchmarks(const std::vector<std::string>& ids) const;

 private:
  friend ScoreMatrix validate_score_matrix(ScoreMatrixDraft raw);
  ScoreMatrix() = default;

  std::vector<std::string> benchmark_ids_;
  std::vector<std::string> model_ids_;
  Eigen::MatrixXd scores_;
  Eigen::MatrixXd stderrs_;
  std::vector<std::optional<std::int64_t>> n_items_;
  std::vector<Direction> directions_;
};

/// Trims identifiers and checks shape, uniqueness, finiteness and stderr >= 0.
/// Directions are stored as given; nothing is reoriented here.
ScoreMatrix validate_score_matrix(ScoreMatrixDraft raw);

/// Scores of one benchmark row, negated when lower is better.
Eigen::VectorXd oriented_scores(const ScoreMatrix& m, std::string_view benchmark);
Eigen::VectorXd oriented_scores(const ScoreMatrix& m, Eigen::Index row);

struct ModelRecord {
  std::string model_id;
  std::string family;
  double param_count_b = 0.0;
  std::optional<double> token_count_b;
  bool instruction_tuned = false;
};

void validate(const ModelRecord& r);

struct BenchmarkRecord {
  std::string benchmark_id;
  Category category = Category::LU;
};

/// Result of a correlation that may be undefined (zero denominator). Never NaN.
class Correlation {
 public:
  Correlation() = default;
  explicit Correlation(double v) : value_(v) {}
  static Correlation degenerate() { return Correlation(); }

  bool is_degenerate() const { return !value_.has_value(); }
  /// Throws DegenerateError on a degenerate result.
  double value() const;
  const std::optional<double>& optional() const { return value_; }

  friend bool operator==(const Correlation&, const Correlation&) = default;

 private:
  std::optional<double> value_;
};

/// Symmetric benchmark x benchmark rank correlations with unit diagonal.
/// Degenerate cells have degenerate(i, j) set and a stored value of 0.
struct AgreementMatrix {
  std::vector<std::string> benchmark_ids;
  Eigen::MatrixXd values;
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> degenerate;

  Eigen::Index size() const { return values.rows(); }
  Correlation cell(Eigen::Index i, Eigen::Index j) const {
    return degenerate(i, j) ? Correlation::degenerate() : Correlation(values(i, j));
  }
};

}  // namespace rankagree
