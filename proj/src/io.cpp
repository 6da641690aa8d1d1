#include "rankagree/io.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace rankagree {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
  const std::string t = trim(s);
  double v = 0.0;
  const char* first = t.data();
  if (!t.empty() && t.front() == '+') ++first;
  const auto res = std::from_chars(first, t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
    throw InputError("not a number: '" + std::string(s) + "'");
  return v;
}

namespace {

std::int64_t parse_int(std::string_view s) {
  const std::string t = trim(s);
  std::int64_t v = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
    throw InputError("not an integer: '" + std::string(s) + "'");
  return v;
}

bool parse_bool(std::string_view s) {
  const std::string t = trim(s);
  if (t == "true" || t == "1") return true;
  if (t == "false" || t == "0") return false;
  throw InputError("not a boolean: '" + std::string(s) + "'");
}

// ---- minimal RFC 4180 reader ----

struct CsvRow {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

std::vector<CsvRow> read_csv(std::string_view text) {
  std::vector<CsvRow> rows;
  std::size_t line = 1;
  std::size_t pos = 0;
  if (text.substr(0, 3) == "\xEF\xBB\xBF") pos = 3;
  while (pos < text.size()) {
    const std::size_t start_line = line;
    if (text[pos] == '#') {
      while (pos < text.size() && text[pos] != '\n') ++pos;
      ++pos;
      ++line;
      continue;
    }
    CsvRow row;
    row.line = start_line;
    std::string field;
    bool quoted = false;
    bool row_done = false;
    while (pos < text.size() && !row_done) {
      const char c = text[pos++];
      if (quoted) {
        if (c == '"') {
          if (pos < text.size() && text[pos] == '"') {
            field += '"';
            ++pos;
          } else {
            quoted = false;
          }
        } else {
          if (c == '\n') ++line;
          field += c;
        }
      } else if (c == '"') {
        quoted = true;
      } else if (c == ',') {
        row.fields.push_back(std::move(field));
        field.clear();
      } else if (c == '\n') {
        ++line;
        row_done = true;
      } else if (c != '\r') {
        field += c;
      }
    }
    if (quoted) throw InputError("line " + std::to_string(start_line) + ": unterminated quoted field");
    row.fields.push_back(std::move(field));
    const bool blank = row.fields.size() == 1 && trim(row.fields[0]).empty();
    if (!blank) rows.push_back(std::move(row));
  }
  return rows;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

class CsvHeader {
 public:
  CsvHeader(const CsvRow& header, std::vector<std::string> required, std::vector<std::string> optional) {
    for (std::size_t k = 0; k < header.fields.size(); ++k) {
      const std::string name = trim(header.fields[k]);
      if (!index_.emplace(name, k).second)
        throw InputError("line " + std::to_string(header.line) + ": duplicate column '" + name + "'");
    }
    for (const auto& r : required)
      if (!index_.count(r))
        throw InputError("line " + std::to_string(header.line) + ": header is missing column '" + r + "'");
    for (const auto& [name, k] : index_)
      if (std::find(required.begin(), required.end(), name) == required.end() &&
          std::find(optional.begin(), optional.end(), name) == optional.end())
        throw InputError("line " + std::to_string(header.line) + ": unknown column '" + name + "'");
    width_ = header.fields.size();
  }

  bool has(const std::string& name) const { return index_.count(name) != 0; }

  const std::string& get(const CsvRow& row, const std::string& name) const {
    return row.fields.at(index_.at(name));
  }

  void check_width(const CsvRow& row) const {
    if (row.fields.size() != width_)
      throw InputError("line " + std::to_string(row.line) + ": expected " + std::to_string(width_) + " fields, got " +
                       std::to_string(row.fields.size()));
  }

 private:
  std::map<std::string, std::size_t> index_;
  std::size_t width_ = 0;
};

template <typename F>
auto at_line(std::size_t line, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ValidationError&) {
    throw;
  } catch (const InputError& e) {
    throw InputError("line " + std::to_string(line) + ": " + e.what());
  }
}

void require(const Json& j, const char* key, Json::value_t type, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw InputError(where + ": missing key '" + key + "'");
  const Json& v = j.at(key);
  const bool ok = type == Json::value_t::number_float ? v.is_number()
                  : type == Json::value_t::number_unsigned ? v.is_number_integer()
                                                           : v.type() == type;
  if (!ok) throw InputError(where + ": key '" + key + "' has the wrong type");
}

void require_number_or_null(const Json& v, const std::string& where) {
  if (!v.is_number() && !v.is_null()) throw InputError(where + ": expected number or null");
}

void require_number_matrix(const Json& v, std::size_t rows, std::size_t cols, bool nullable, const std::string& where) {
  if (!v.is_array() || v.size() != rows) throw InputError(where + ": expected " + std::to_string(rows) + " rows");
  for (const auto& row : v) {
    if (!row.is_array() || row.size() != cols) throw InputError(where + ": expected " + std::to_string(cols) + " columns");
    for (const auto& x : row) {
      if (nullable)
        require_number_or_null(x, where);
      else if (!x.is_number())
        throw InputError(where + ": expected numbers");
    }
  }
}

Json nullable(const Correlation& c) { return c.is_degenerate() ? Json(nullptr) : Json(*c.optional()); }

}  // namespace

// ---- manifest -----------------------------------------------------------------

Json to_json(const RunManifest& m) {
  Json inputs = Json::array();
  for (const auto& in : m.inputs) inputs.push_back({{"path", in.path}, {"sha256", in.sha256}});
  Json flags = Json::array();
  for (const auto& [k, v] : m.flags) flags.push_back({{"flag", k}, {"value", v}});
  return {{"subcommand", m.subcommand}, {"inputs", inputs}, {"flags", flags}, {"tool_version", m.tool_version}};
}

RunManifest manifest_from_json(const Json& j) {
  const std::string where = "manifest";
  require(j, "subcommand", Json::value_t::string, where);
  require(j, "inputs", Json::value_t::array, where);
  require(j, "flags", Json::value_t::array, where);
  require(j, "tool_version", Json::value_t::string, where);
  RunManifest m;
  m.subcommand = j.at("subcommand").get<std::string>();
  m.tool_version = j.at("tool_version").get<std::string>();
  for (const auto& in : j.at("inputs")) {
    require(in, "path", Json::value_t::string, where);
    require(in, "sha256", Json::value_t::string, where);
    m.inputs.push_back({in.at("path").get<std::string>(), in.at("sha256").get<std::string>()});
  }
  for (const auto& f : j.at("flags")) {
    require(f, "flag", Json::value_t::string, where);
    require(f, "value", Json::value_t::string, where);
    m.flags.emplace_back(f.at("flag").get<std::string>(), f.at("value").get<std::string>());
  }
  return m;
}

// ---- score matrices -------------------------------------------------------------

ScoreFormat score_format_for(const fs::path& path) {
  return path.extension() == ".csv" ? ScoreFormat::LongCsv : ScoreFormat::CanonicalJson;
}

ScoreMatrix parse_scores_csv(std::string_view text) {
  const auto rows = read_csv(text);
  if (rows.empty()) throw InputError("score file is empty; header required");
  const CsvHeader header(rows[0], {"benchmark", "model", "score", "stderr", "direction"}, {"n"});

  struct Cell {
    double score;
    double stderr_;
  };
  std::vector<std::string> benchmarks, models;
  std::map<std::string, std::size_t> bindex, mindex;
  std::map<std::pair<std::size_t, std::size_t>, Cell> cells;
  std::vector<Direction> directions;
  std::vector<std::optional<std::int64_t>> n_items;

  for (std::size_t r = 1; r < rows.size(); ++r) {
    const CsvRow& row = rows[r];
    header.check_width(row);
    at_line(row.line, [&] {
      const std::string b = trim(header.get(row, "benchmark"));
      const std::string m = trim(header.get(row, "model"));
      if (b.empty() || m.empty()) throw InputError("empty benchmark or model id");
      const Direction dir = parse_direction(trim(header.get(row, "direction")));
      std::optional<std::int64_t> n;
      if (header.has("n") && !trim(header.get(row, "n")).empty()) n = parse_int(header.get(row, "n"));

      auto [bit, bnew] = bindex.emplace(b, benchmarks.size());
      if (bnew) {
        benchmarks.push_back(b);
        directions.push_back(dir);
        n_items.push_back(n);
      } else if (directions[bit->second] != dir) {
        throw InputError("benchmark '" + b + "' has conflicting directions");
      } else if (n_items[bit->second] != n) {
        throw InputError("benchmark '" + b + "' has conflicting item counts");
      }
      auto [mit, mnew] = mindex.emplace(m, models.size());
      if (mnew) models.push_back(m);

      const Cell cell{parse_double(header.get(row, "score")), parse_double(header.get(row, "stderr"))};
      if (!cells.emplace(std::pair{bit->second, mit->second}, cell).second)
        throw InputError("duplicate row for benchmark '" + b + "', model '" + m + "'");
      return 0;
    });
  }

  ScoreMatrixDraft d;
  d.scores.resize(static_cast<Eigen::Index>(benchmarks.size()), static_cast<Eigen::Index>(models.size()));
  d.stderrs.resizeLike(d.scores);
  for (std::size_t i = 0; i < benchmarks.size(); ++i)
    for (std::size_t j = 0; j < models.size(); ++j) {
      const auto it = cells.find({i, j});
      if (it == cells.end())
        throw InputError("incomplete matrix: no row for benchmark '" + benchmarks[i] + "', model '" + models[j] + "'");
      d.scores(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = it->second.score;
      d.stderrs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = it->second.stderr_;
    }
  d.benchmark_ids = std::move(benchmarks);
  d.model_ids = std::move(models);
  d.directions = std::move(directions);
  d.n_items = std::move(n_items);
  return validate_score_matrix(std::move(d));
}

ScoreMatrix parse_scores_json(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InputError(std::string("invalid JSON: ") + e.what());
  }
  const std::string where = "score_matrix";
  require(j, "format_version", Json::value_t::number_unsigned, where);
  if (j.at("format_version").get<int>() != kFormatVersion) throw InputError("unsupported format_version");
  require(j, "kind", Json::value_t::string, where);
  if (j.at("kind") != "score_matrix") throw InputError("expected kind 'score_matrix'");
  require(j, "benchmarks", Json::value_t::array, where);
  require(j, "models", Json::value_t::array, where);
  require(j, "scores", Json::value_t::array, where);
  require(j, "stderrs", Json::value_t::array, where);

  ScoreMatrixDraft d;
  for (const auto& b : j.at("benchmarks")) {
    require(b, "id", Json::value_t::string, where);
    require(b, "direction", Json::value_t::string, where);
    d.benchmark_ids.push_back(b.at("id").get<std::string>());
    d.directions.push_back(parse_direction(b.at("direction").get<std::string>()));
    if (b.contains("n_items") && !b.at("n_items").is_null()) {
      if (!b.at("n_items").is_number_integer()) throw InputError(where + ": n_items must be an integer");
      d.n_items.emplace_back(b.at("n_items").get<std::int64_t>());
    } else {
      d.n_items.emplace_back(std::nullopt);
    }
  }
  for (const auto& m : j.at("models")) {
    if (!m.is_string()) throw InputError(where + ": model ids must be strings");
    d.model_ids.push_back(m.get<std::string>());
  }
  const std::size_t nb = d.benchmark_ids.size();
  const std::size_t nm = d.model_ids.size();
  require_number_matrix(j.at("scores"), nb, nm, false, where + ".scores");
  require_number_matrix(j.at("stderrs"), nb, nm, false, where + ".stderrs");
  d.scores.resize(static_cast<Eigen::Index>(nb), static_cast<Eigen::Index>(nm));
  d.stderrs.resizeLike(d.scores);
  for (std::size_t i = 0; i < nb; ++i)
    for (std::size_t k = 0; k < nm; ++k) {
      d.scores(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = j.at("scores")[i][k].get<double>();
      d.stderrs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = j.at("stderrs")[i][k].get<double>();
    }
  return validate_score_matrix(std::move(d));
}

ScoreMatrix load_scores(const fs::path& path, ScoreFormat format) {
  const std::string text = read_file(path);
  try {
    return format == ScoreFormat::LongCsv ? parse_scores_csv(text) : parse_scores_json(text);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

ScoreMatrix load_scores(const fs::path& path) { return load_scores(path, score_format_for(path)); }

std::string write_scores_csv(const ScoreMatrix& m, const RunManifest* manifest) {
  std::ostringstream os;
  os << "# format_version: " << kFormatVersion << "\n";
  if (manifest) os << "# manifest: " << to_json(*manifest).dump() << "\n";
  os << "benchmark,model,score,stderr,n,direction\n";
  for (Eigen::Index i = 0; i < m.n_benchmarks(); ++i) {
    const auto& n = m.n_items()[i];
    for (Eigen::Index j = 0; j < m.n_models(); ++j) {
      os << csv_field(m.benchmark_ids()[i]) << ',' << csv_field(m.model_ids()[j]) << ','
         << format_double(m.scores()(i, j)) << ',' << format_double(m.stderrs()(i, j)) << ','
         << (n ? std::to_string(*n) : std::string()) << ',' << to_string(m.directions()[i]) << '\n';
    }
  }
  return os.str();
}

std::string write_scores_json(const ScoreMatrix& m, const RunManifest* manifest) {
  Json benchmarks = Json::array();
  Json scores = Json::array();
  Json stderrs = Json::array();
  for (Eigen::Index i = 0; i < m.n_benchmarks(); ++i) {
    const auto& n = m.n_items()[i];
    benchmarks.push_back({{"id", m.benchmark_ids()[i]},
                          {"direction", to_string(m.directions()[i])},
                          {"n_items", n ? Json(*n) : Json(nullptr)}});
    Json srow = Json::array();
    Json erow = Json::array();
    for (Eigen::Index j = 0; j < m.n_models(); ++j) {
      srow.push_back(m.scores()(i, j));
      erow.push_back(m.stderrs()(i, j));
    }
    scores.push_back(std::move(srow));
    stderrs.push_back(std::move(erow));
  }
  Json j = {{"format_version", kFormatVersion}, {"kind", "score_matrix"}, {"benchmarks", benchmarks},
            {"models", m.model_ids()},          {"scores", scores},       {"stderrs", stderrs}};
  if (manifest) j["manifest"] = to_json(*manifest);
  return dump_artifact(j);
}

// ---- metadata -----------------------------------------------------------------

std::vector<ModelRecord> parse_model_metadata(std::string_view text) {
  const auto rows = read_csv(text);
  if (rows.empty()) throw InputError("model metadata is empty; header required");
  const CsvHeader header(rows[0], {"model", "family", "params_b", "tokens_b", "instruction_tuned"}, {});
  std::vector<ModelRecord> out;
  std::set<std::string> seen;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const CsvRow& row = rows[r];
    header.check_width(row);
    at_line(row.line, [&] {
      ModelRecord rec;
      rec.model_id = trim(header.get(row, "model"));
      rec.family = trim(header.get(row, "family"));
      rec.param_count_b = parse_double(header.get(row, "params_b"));
      if (!trim(header.get(row, "tokens_b")).empty()) rec.token_count_b = parse_double(header.get(row, "tokens_b"));
      rec.instruction_tuned = parse_bool(header.get(row, "instruction_tuned"));
      validate(rec);
      if (!seen.insert(rec.model_id).second) throw InputError("duplicate model '" + rec.model_id + "'");
      out.push_back(std::move(rec));
      return 0;
    });
  }
  return out;
}

std::vector<ModelRecord> load_model_metadata(const fs::path& path) {
  try {
    return parse_model_metadata(read_file(path));
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

std::string write_model_metadata(const std::vector<ModelRecord>& models) {
  std::ostringstream os;
  os << "model,family,params_b,tokens_b,instruction_tuned\n";
  for (const auto& m : models)
    os << csv_field(m.model_id) << ',' << csv_field(m.family) << ',' << format_double(m.param_count_b) << ','
       << (m.token_count_b ? format_double(*m.token_count_b) : std::string()) << ','
       << (m.instruction_tuned ? "true" : "false") << '\n';
  return os.str();
}

std::vector<BenchmarkRecord> parse_categories(std::string_view text) {
  const auto rows = read_csv(text);
  if (rows.empty()) throw InputError("category file is empty; header required");
  const CsvHeader header(rows[0], {"benchmark", "category"}, {});
  std::vector<BenchmarkRecord> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    header.check_width(rows[r]);
    at_line(rows[r].line, [&] {
      out.push_back({trim(header.get(rows[r], "benchmark")), parse_category(trim(header.get(rows[r], "category")))});
      return 0;
    });
  }
  return out;
}

std::vector<BenchmarkRecord> load_categories(const fs::path& path) {
  try {
    return parse_categories(read_file(path));
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

SyntheticConfig parse_synthetic_config(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InputError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InputError("synthetic config must be a JSON object");
  static const std::set<std::string> known = {
      "format_version", "n_models",   "n_benchmarks",     "seed",          "capability_slope", "flops_min",
      "flops_max",      "benchmark_loading", "benchmark_bias", "prep_sd", "residual_prep",    "finetune_uplift",
      "n_items"};
  for (const auto& [k, v] : j.items())
    if (!known.count(k)) throw InputError("synthetic config: unknown key '" + k + "'");
  if (j.contains("format_version") && j.at("format_version") != kFormatVersion)
    throw InputError("synthetic config: unsupported format_version");

  const auto get_int = [&](const char* key, int fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number_integer()) throw InputError(std::string("synthetic config: '") + key + "' must be an integer");
    return j.at(key).get<int>();
  };
  const auto get_num = [&](const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) throw InputError(std::string("synthetic config: '") + key + "' must be a number");
    return j.at(key).get<double>();
  };

  SyntheticConfig cfg = SyntheticConfig::with_defaults(get_int("n_models", 20), get_int("n_benchmarks", 12));
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) throw InputError("synthetic config: 'seed' must be a non-negative integer");
    cfg.seed = j.at("seed").get<std::uint64_t>();
  }
  cfg.capability_slope = get_num("capability_slope", cfg.capability_slope);
  cfg.flops_min = get_num("flops_min", cfg.flops_min);
  cfg.flops_max = get_num("flops_max", cfg.flops_max);
  cfg.prep_sd = get_num("prep_sd", cfg.prep_sd);
  cfg.residual_prep = get_num("residual_prep", cfg.residual_prep);

  const auto per_benchmark = [&](const char* key, auto& target) {
    using T = typename std::decay_t<decltype(target)>::value_type;
    if (!j.contains(key)) return;
    const Json& v = j.at(key);
    const auto convert = [&](const Json& x) {
      if (!x.is_number() || (std::is_integral_v<T> && !x.is_number_integer()))
        throw InputError(std::string("synthetic config: '") + key + "' has a non-numeric entry");
      return x.get<T>();
    };
    if (v.is_array()) {
      target.clear();
      for (const auto& x : v) target.push_back(convert(x));
    } else {
      target.assign(static_cast<std::size_t>(std::max(cfg.n_benchmarks, 0)), convert(v));
    }
  };
  per_benchmark("benchmark_loading", cfg.benchmark_loading);
  per_benchmark("benchmark_bias", cfg.benchmark_bias);
  per_benchmark("finetune_uplift", cfg.finetune_uplift);
  per_benchmark("n_items", cfg.n_items);
  validate(cfg);
  return cfg;
}

// ---- artifacts ------------------------------------------------------------------

Json agreement_to_json(const AgreementMatrix& am, AgreementMethod method, const SignificanceConfig& cfg) {
  Json values = Json::array();
  for (Eigen::Index i = 0; i < am.size(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < am.size(); ++k) row.push_back(nullable(am.cell(i, k)));
    values.push_back(std::move(row));
  }
  Json means = Json::array();
  for (const auto& r : mean_agreement(am))
    means.push_back({{"benchmark", r.benchmark_id},
                     {"mean", nullable(r.mean)},
                     {"n_used", r.n_used},
                     {"n_degenerate", r.n_degenerate}});
  return {{"benchmarks", am.benchmark_ids},
          {"method", to_string(method)},
          {"alpha", cfg.alpha()},
          {"critical_z", cfg.critical_z()},
          {"values", values},
          {"mean_agreement", means},
          {"overall_mean", nullable(overall_mean_agreement(am))}};
}

Json alignment_to_json(const AlignedRanking& a, const std::string& benchmark_a, const std::string& benchmark_b,
                       const Eigen::VectorXd& score1, const Eigen::VectorXd& se1, const Eigen::VectorXd& score2,
                       const Eigen::VectorXd& se2) {
  Json rows = Json::array();
  for (Eigen::Index m : a.order1)
    rows.push_back({{"model", a.model_ids[m]},
                    {"rank1", a.rank1[m]},
                    {"rank2", a.rank2[m]},
                    {"score1", score1(m)},
                    {"se1", se1(m)},
                    {"score2", score2(m)},
                    {"se2", se2(m)}});
  return {{"benchmark_a", benchmark_a}, {"benchmark_b", benchmark_b}, {"crossings", crossing_count(a)}, {"rows", rows}};
}

Json pca_to_json(const PcaResult& r, Eigen::Index top_k) {
  if (top_k < 1 || top_k > r.evr.size())
    throw InputError("top-k must lie in [1, " + std::to_string(r.evr.size()) + "]");
  Json evr = Json::array();
  Json eig = Json::array();
  for (Eigen::Index k = 0; k < top_k; ++k) {
    evr.push_back(r.evr(k));
    eig.push_back(r.eigenvalues(k));
  }
  Json pc1 = Json::array();
  for (std::size_t j = 0; j < r.model_ids.size(); ++j)
    pc1.push_back({{"model", r.model_ids[j]}, {"pc1", r.pc1_scores(static_cast<Eigen::Index>(j))}});
  return {{"preprocessing", to_string(r.preprocessing)},
          {"benchmarks", r.benchmark_ids},
          {"n_components", r.evr.size()},
          {"top_k", top_k},
          {"eigenvalues", eig},
          {"evr", evr},
          {"cumulative_evr", explained_variance_share(r, top_k)},
          {"pc1_scores", pc1}};
}

Json flops_to_json(const std::vector<ModelRecord>& models) {
  Json rows = Json::array();
  Json skipped = Json::array();
  for (const auto& m : models) {
    validate(m);
    if (!m.token_count_b) {
      skipped.push_back(m.model_id);
      continue;
    }
    const double flops = compute_flops(m.param_count_b, *m.token_count_b);
    rows.push_back({{"model", m.model_id},
                    {"family", m.family},
                    {"params_b", m.param_count_b},
                    {"tokens_b", *m.token_count_b},
                    {"flops", flops},
                    {"flops_e18", flops / 1e18},
                    {"log10_flops", std::log10(flops)}});
  }
  return {{"rows", rows}, {"skipped", skipped}};
}

Json make_artifact(std::string_view kind, Json payload, const RunManifest& manifest) {
  payload["format_version"] = kFormatVersion;
  payload["kind"] = kind;
  payload["manifest"] = to_json(manifest);
  return payload;
}

std::string dump_artifact(const Json& artifact) { return artifact.dump(2) + "\n"; }

namespace {

void validate_alignment_payload(const Json& j, const std::string& where) {
  require(j, "benchmark_a", Json::value_t::string, where);
  require(j, "benchmark_b", Json::value_t::string, where);
  require(j, "crossings", Json::value_t::number_unsigned, where);
  require(j, "rows", Json::value_t::array, where);
  std::set<long> r1, r2;
  for (const auto& row : j.at("rows")) {
    require(row, "model", Json::value_t::string, where);
    require(row, "rank1", Json::value_t::number_unsigned, where);
    require(row, "rank2", Json::value_t::number_unsigned, where);
    for (const char* k : {"score1", "se1", "score2", "se2"}) require(row, k, Json::value_t::number_float, where);
    r1.insert(row.at("rank1").get<long>());
    r2.insert(row.at("rank2").get<long>());
  }
  const auto n = static_cast<long>(j.at("rows").size());
  const auto is_perm = [n](const std::set<long>& s) {
    return static_cast<long>(s.size()) == n && (n == 0 || (*s.begin() == 1 && *s.rbegin() == n));
  };
  if (!is_perm(r1) || !is_perm(r2)) throw InputError(where + ": ranks are not a permutation of 1..n");
}

void validate_square(const Json& v, std::size_t n, const std::string& where) {
  require_number_matrix(v, n, n, true, where);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (v[a][b] != v[b][a]) throw InputError(where + ": matrix is not symmetric");
}

void validate_evr_list(const Json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) throw InputError(where + ": expected a non-empty list");
  double prev = 2.0;
  for (const auto& x : v) {
    if (!x.is_number()) throw InputError(where + ": expected numbers");
    const double d = x.get<double>();
    if (d < 0.0 || d > 1.0 + 1e-9 || d > prev) throw InputError(where + ": ratios must be in [0,1] and non-increasing");
    prev = d;
  }
}

}  // namespace

static void validate_artifact_impl(const Json& a) {
  require(a, "kind", Json::value_t::string, "artifact");
  const std::string kind = a.at("kind").get<std::string>();
  const std::string where = kind;
  require(a, "format_version", Json::value_t::number_unsigned, where);
  if (a.at("format_version") != kFormatVersion) throw InputError(where + ": unsupported format_version");
  require(a, "manifest", Json::value_t::object, where);
  manifest_from_json(a.at("manifest"));

  if (kind == "score_matrix") {
    parse_scores_json(a.dump());
  } else if (kind == "agreement") {
    require(a, "benchmarks", Json::value_t::array, where);
    require(a, "method", Json::value_t::string, where);
    require(a, "alpha", Json::value_t::number_float, where);
    require(a, "values", Json::value_t::array, where);
    require(a, "mean_agreement", Json::value_t::array, where);
    require_number_or_null(a.at("overall_mean"), where);
    const std::size_t n = a.at("benchmarks").size();
    validate_square(a.at("values"), n, where + ".values");
    for (std::size_t i = 0; i < n; ++i)
      if (a.at("values")[i][i] != 1.0) throw InputError(where + ": diagonal must be 1");
    if (a.at("mean_agreement").size() != n) throw InputError(where + ": mean_agreement length mismatch");
  } else if (kind == "alignment") {
    validate_alignment_payload(a, where);
  } else if (kind == "pca") {
    require(a, "preprocessing", Json::value_t::string, where);
    require(a, "evr", Json::value_t::array, where);
    require(a, "eigenvalues", Json::value_t::array, where);
    require(a, "pc1_scores", Json::value_t::array, where);
    validate_evr_list(a.at("evr"), where + ".evr");
  } else if (kind == "flops") {
    require(a, "rows", Json::value_t::array, where);
    require(a, "skipped", Json::value_t::array, where);
    for (const auto& row : a.at("rows")) {
      require(row, "model", Json::value_t::string, where);
      for (const char* k : {"params_b", "tokens_b", "flops", "flops_e18", "log10_flops"})
        require(row, k, Json::value_t::number_float, where);
    }
  } else if (kind == "report_alignment") {
    require(a, "pairs", Json::value_t::array, where);
    if (a.at("pairs").empty()) throw InputError(where + ": no benchmark pairs");
    for (const auto& p : a.at("pairs")) {
      require(p, "mode", Json::value_t::string, where);
      validate_alignment_payload(p, where);
    }
  } else if (kind == "report_mean_agreement") {
    require(a, "method", Json::value_t::string, where);
    require(a, "rows", Json::value_t::array, where);
    require(a, "overall", Json::value_t::object, where);
    for (const auto& row : a.at("rows")) {
      require(row, "benchmark", Json::value_t::string, where);
      require_number_or_null(row.at("direct"), where);
      require_number_or_null(row.at("tbt"), where);
    }
  } else if (kind == "report_category_agreement") {
    require(a, "categories", Json::value_t::array, where);
    const std::size_t n = a.at("categories").size();
    for (const char* mode : {"direct", "tbt"}) {
      require(a, mode, Json::value_t::array, where);
      validate_square(a.at(mode), n, where + "." + mode);
    }
    require(a, "ppl_vs_downstream", Json::value_t::object, where);
  } else if (kind == "report_evr") {
    require(a, "preprocessing", Json::value_t::string, where);
    for (const char* mode : {"direct", "tbt"}) {
      require(a, mode, Json::value_t::array, where);
      validate_evr_list(a.at(mode), where + "." + mode);
    }
  } else if (kind == "report_pc1_compute") {
    for (const char* mode : {"direct", "tbt"}) {
      require(a, mode, Json::value_t::object, where);
      const Json& m = a.at(mode);
      require(m, "points", Json::value_t::array, where);
      require_number_or_null(m.at("tau"), where);
      for (const auto& p : m.at("points")) {
        require(p, "model", Json::value_t::string, where);
        require(p, "log10_flops", Json::value_t::number_float, where);
        require(p, "pc1", Json::value_t::number_float, where);
      }
    }
  } else {
    throw InputError("unknown artifact kind '" + kind + "'");
  }
}

void validate_artifact(const Json& a) {
  try {
    validate_artifact_impl(a);
  } catch (const Json::exception& e) {
    throw InputError(std::string("malformed artifact: ") + e.what());
  }
}

Json parse_artifact(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InputError(std::string("invalid JSON: ") + e.what());
  }
  validate_artifact(j);
  return j;
}

Json load_artifact(const fs::path& path) {
  try {
    return parse_artifact(read_file(path));
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

}  // namespace rankagree
