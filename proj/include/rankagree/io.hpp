#pragma once

#include "rankagree/alignment.hpp"
#include "rankagree/synth.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>

namespace rankagree {

using Json = nlohmann::json;

inline constexpr int kFormatVersion = 1;
inline constexpr std::string_view kToolVersion = "0.1.0";

std::string read_file(const std::filesystem::path& path);
std::string sha256_hex(std::string_view bytes);

/// 17 significant digits, independent of the C locale.
std::string format_double(double v);
double parse_double(std::string_view s);

struct InputDigest {
  std::string path;
  std::string sha256;
};

/// Provenance block embedded in every artifact.
struct RunManifest {
  std::string subcommand;
  std::vector<InputDigest> inputs;
  std::vector<std::pair<std::string, std::string>> flags;  // resolved values, in declaration order
  std::string tool_version{kToolVersion};
};

Json to_json(const RunManifest& m);
RunManifest manifest_from_json(const Json& j);

// ---- score matrices ---------------------------------------------------------

enum class ScoreFormat { LongCsv, CanonicalJson };

/// .csv selects long CSV; anything else canonical JSON.
ScoreFormat score_format_for(const std::filesystem::path& path);

/// Long CSV with header `benchmark,model,score,stderr,n,direction` (any column
/// order, `n` optional). Lines starting with '#' are comments.
ScoreMatrix parse_scores_csv(std::string_view text);
ScoreMatrix parse_scores_json(std::string_view text);
ScoreMatrix load_scores(const std::filesystem::path& path, ScoreFormat format);
ScoreMatrix load_scores(const std::filesystem::path& path);

std::string write_scores_csv(const ScoreMatrix& m, const RunManifest* manifest = nullptr);
std::string write_scores_json(const ScoreMatrix& m, const RunManifest* manifest = nullptr);

// ---- metadata ---------------------------------------------------------------

/// CSV `model,family,params_b,tokens_b,instruction_tuned`; tokens_b may be empty.
std::vector<ModelRecord> parse_model_metadata(std::string_view text);
std::vector<ModelRecord> load_model_metadata(const std::filesystem::path& path);
std::string write_model_metadata(const std::vector<ModelRecord>& models);

/// CSV `benchmark,category`.
std::vector<BenchmarkRecord> parse_categories(std::string_view text);
std::vector<BenchmarkRecord> load_categories(const std::filesystem::path& path);

/// JSON object; absent keys take SyntheticConfig::with_defaults values and
/// per-benchmark keys accept a scalar (broadcast) or an array.
SyntheticConfig parse_synthetic_config(std::string_view text);

// ---- artifacts --------------------------------------------------------------

Json agreement_to_json(const AgreementMatrix& am, AgreementMethod method, const SignificanceConfig& cfg);
Json alignment_to_json(const AlignedRanking& a, const std::string& benchmark_a, const std::string& benchmark_b,
                       const Eigen::VectorXd& score1, const Eigen::VectorXd& se1, const Eigen::VectorXd& score2,
                       const Eigen::VectorXd& se2);
Json pca_to_json(const PcaResult& r, Eigen::Index top_k);
Json flops_to_json(const std::vector<ModelRecord>& models);

/// Wraps a payload with kind, format_version and manifest.
Json make_artifact(std::string_view kind, Json payload, const RunManifest& manifest);

/// Canonical artifact text (sorted keys, two-space indent, trailing newline).
std::string dump_artifact(const Json& artifact);

/// Parses an artifact and checks the schema for its kind; throws InputError.
Json parse_artifact(std::string_view text);
Json load_artifact(const std::filesystem::path& path);
void validate_artifact(const Json& artifact);

}  // namespace rankagree
