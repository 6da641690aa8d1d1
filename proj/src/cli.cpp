#include "rankagree/cli.hpp"

#include "rankagree/io.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>

namespace rankagree {

namespace fs = std::filesystem;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Output {
  fs::path path;  // empty: standard output
  std::string content;
};

class ManifestBuilder {
 public:
  explicit ManifestBuilder(std::string subcommand) { m_.subcommand = std::move(subcommand); }

  /// Reads an input file once, recording its digest.
  std::string input(const std::string& path) {
    std::string bytes = read_file(path);
    m_.inputs.push_back({path, sha256_hex(bytes)});
    return bytes;
  }
  void flag(std::string name, std::string value) { m_.flags.emplace_back(std::move(name), std::move(value)); }
  void flag(std::string name, double value) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    flag(std::move(name), std::string(buf, res.ptr));
  }
  const RunManifest& get() const { return m_; }

 private:
  RunManifest m_;
};

ScoreMatrix scores_from(ManifestBuilder& mb, const std::string& path) {
  const std::string bytes = mb.input(path);
  try {
    return score_format_for(path) == ScoreFormat::LongCsv ? parse_scores_csv(bytes) : parse_scores_json(bytes);
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

/// Same data as `src`, with benchmark rows and model columns in the order of `ref`.
ScoreMatrix reorder_like(const ScoreMatrix& src, const ScoreMatrix& ref, const std::string& what) {
  if (src.n_models() != ref.n_models() || src.n_benchmarks() != ref.n_benchmarks())
    throw InputError(what + " covers a different set of benchmarks or models");
  ScoreMatrixDraft d = src.select_benchmarks(ref.benchmark_ids()).draft();
  ScoreMatrixDraft out = d;
  out.model_ids = ref.model_ids();
  for (Eigen::Index j = 0; j < ref.n_models(); ++j) {
    const auto k = src.find_model(ref.model_ids()[j]);
    if (!k) throw InputError(what + " has no model '" + ref.model_ids()[j] + "'");
    out.scores.col(j) = d.scores.col(*k);
    out.stderrs.col(j) = d.stderrs.col(*k);
  }
  return validate_score_matrix(std::move(out));
}

Json alignment_payload(const ScoreMatrix& ma, Eigen::Index ra, const ScoreMatrix& mb, Eigen::Index rb,
                       const SignificanceConfig& cfg) {
  const ScoreMatrix b = ma.model_ids() == mb.model_ids() ? mb : [&] {
    // Permute mb's models into ma's order.
    if (ma.n_models() != mb.n_models()) throw InputError("alignment inputs cover different model sets");
    ScoreMatrixDraft d = mb.draft();
    d.model_ids = ma.model_ids();
    for (Eigen::Index j = 0; j < ma.n_models(); ++j) {
      const auto k = mb.find_model(ma.model_ids()[j]);
      if (!k) throw InputError("alignment inputs cover different model sets; missing '" + ma.model_ids()[j] + "'");
      d.scores.col(j) = mb.scores().col(*k);
      d.stderrs.col(j) = mb.stderrs().col(*k);
    }
    return validate_score_matrix(std::move(d));
  }();
  const Eigen::VectorXd s1 = oriented_scores(ma, ra);
  const Eigen::VectorXd s2 = oriented_scores(b, rb);
  const Eigen::VectorXd se1 = ma.stderrs().row(ra).transpose();
  const Eigen::VectorXd se2 = b.stderrs().row(rb).transpose();
  const AlignedRanking a = rank_models(ma.model_ids(), s1, se1, s2, se2, cfg);
  // Tables show scores as reported, not oriented.
  const Eigen::VectorXd raw1 = ma.scores().row(ra).transpose();
  const Eigen::VectorXd raw2 = b.scores().row(rb).transpose();
  return alignment_to_json(a, ma.benchmark_ids()[ra], b.benchmark_ids()[rb], raw1, se1, raw2, se2);
}

Json nullable(const Correlation& c) { return c.is_degenerate() ? Json(nullptr) : Json(*c.optional()); }

Json category_matrix_json(const CategoryAgreement& ca) {
  Json rows = Json::array();
  for (Eigen::Index p = 0; p < ca.values.rows(); ++p) {
    Json row = Json::array();
    for (Eigen::Index q = 0; q < ca.values.cols(); ++q) row.push_back(nullable(ca.cell(p, q)));
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Perplexity rows against downstream categories, plus tau between the
/// averaged perplexity ranking and the averaged downstream ranking.
Json ppl_block(const ScoreMatrix& m, const AgreementMatrix& am, const std::vector<BenchmarkRecord>& cats,
               const std::vector<Category>& downstream) {
  std::map<std::string, Category> of;
  for (const auto& c : cats) of[c.benchmark_id] = c.category;
  std::vector<std::string> ppl, rest;
  for (const auto& b : m.benchmark_ids()) (of.at(b) == Category::PPL ? ppl : rest).push_back(b);

  Json table = Json::array();
  for (const auto& p : ppl) {
    const Eigen::Index i = m.benchmark_index(p);
    Json row = Json::array();
    for (Category c : downstream) {
      double sum = 0.0;
      std::size_t n = 0;
      for (const auto& d : rest) {
        const Eigen::Index k = m.benchmark_index(d);
        if (of.at(d) != c || am.degenerate(i, k)) continue;
        sum += am.values(i, k);
        ++n;
      }
      row.push_back(n ? Json(sum / static_cast<double>(n)) : Json(nullptr));
    }
    table.push_back(std::move(row));
  }
  const AveragedScores avg_ppl = average_rank_vector(m, ppl);
  const AveragedScores avg_down = average_rank_vector(m, rest);
  return {{"by_category", table}, {"average_tau", nullable(rank_correlation(avg_ppl.values, avg_down.values))}};
}

std::vector<Output> run_report(ManifestBuilder& mb, const std::string& direct_path, const std::string& tbt_path,
                               const std::string& categories_path, const std::string& models_path,
                               const fs::path& out_dir, AgreementMethod method, const SignificanceConfig& cfg,
                               Preprocessing prep, const std::vector<std::string>& pair_specs) {
  const ScoreMatrix direct = scores_from(mb, direct_path);
  const ScoreMatrix tbt = reorder_like(scores_from(mb, tbt_path), direct, tbt_path);
  const auto cats = parse_categories(mb.input(categories_path));
  const auto models = parse_model_metadata(mb.input(models_path));
  const RunManifest& manifest = mb.get();

  struct Mode {
    const char* name;
    const ScoreMatrix* m;
  };
  const Mode modes[] = {{"direct", &direct}, {"tbt", &tbt}};

  std::vector<std::pair<std::string, std::string>> pairs;
  for (const auto& spec : pair_specs) {
    const auto comma = spec.find_first_of(",:");
    if (comma == std::string::npos) throw UsageError("--pair expects A,B; got '" + spec + "'");
    pairs.emplace_back(trim(spec.substr(0, comma)), trim(spec.substr(comma + 1)));
  }
  if (pairs.empty()) pairs.emplace_back(direct.benchmark_ids()[0], direct.benchmark_ids()[1]);

  std::vector<Output> outputs;
  const auto emit = [&](const char* file, const char* kind, Json payload) {
    Json artifact = make_artifact(kind, std::move(payload), manifest);
    validate_artifact(artifact);
    outputs.push_back({out_dir / file, dump_artifact(artifact)});
  };

  // Pairwise alignments.
  Json fig1 = Json::array();
  for (const auto& [a, b] : pairs)
    for (const Mode& mode : modes) {
      Json p = alignment_payload(*mode.m, mode.m->benchmark_index(a), *mode.m, mode.m->benchmark_index(b), cfg);
      p["mode"] = mode.name;
      fig1.push_back(std::move(p));
    }
  emit("fig1_alignment.json", "report_alignment", {{"alpha", cfg.alpha()}, {"pairs", fig1}});

  // Agreement, per benchmark and per category.
  const AgreementMatrix am_direct = agreement_matrix(direct, method, cfg);
  const AgreementMatrix am_tbt = agreement_matrix(tbt, method, cfg);
  const auto mean_direct = mean_agreement(am_direct);
  const auto mean_tbt = mean_agreement(am_tbt);
  std::map<std::string, Category> category_of;
  for (const auto& c : cats) category_of[c.benchmark_id] = c.category;
  Json fig2_rows = Json::array();
  for (std::size_t i = 0; i < mean_direct.size(); ++i) {
    const auto it = category_of.find(mean_direct[i].benchmark_id);
    fig2_rows.push_back({{"benchmark", mean_direct[i].benchmark_id},
                         {"category", it == category_of.end() ? Json(nullptr) : Json(to_string(it->second))},
                         {"direct", nullable(mean_direct[i].mean)},
                         {"tbt", nullable(mean_tbt[i].mean)},
                         {"n_degenerate_direct", mean_direct[i].n_degenerate},
                         {"n_degenerate_tbt", mean_tbt[i].n_degenerate}});
  }
  emit("fig2_mean_agreement.json", "report_mean_agreement",
       {{"method", to_string(method)},
        {"alpha", cfg.alpha()},
        {"rows", fig2_rows},
        {"overall",
         {{"direct", nullable(overall_mean_agreement(am_direct))}, {"tbt", nullable(overall_mean_agreement(am_tbt))}}}});

  const CategoryAgreement ca_direct = category_agreement(am_direct, cats);
  const CategoryAgreement ca_tbt = category_agreement(am_tbt, cats);
  Json cat_names = Json::array();
  std::vector<Category> downstream;
  bool has_ppl = false;
  for (Category c : ca_direct.categories) {
    cat_names.push_back(to_string(c));
    if (c == Category::PPL)
      has_ppl = true;
    else
      downstream.push_back(c);
  }
  Json ppl = {{"available", has_ppl && !downstream.empty()}};
  if (has_ppl && !downstream.empty()) {
    Json names = Json::array();
    for (Category c : downstream) names.push_back(to_string(c));
    ppl["downstream_categories"] = names;
    Json ppl_ids = Json::array();
    for (const auto& b : direct.benchmark_ids())
      if (category_of.at(b) == Category::PPL) ppl_ids.push_back(b);
    ppl["ppl_benchmarks"] = ppl_ids;
    ppl["direct"] = ppl_block(direct, am_direct, cats, downstream);
    ppl["tbt"] = ppl_block(tbt, am_tbt, cats, downstream);
  }
  emit("fig3_category_agreement.json", "report_category_agreement",
       {{"method", to_string(method)},
        {"categories", cat_names},
        {"direct", category_matrix_json(ca_direct)},
        {"tbt", category_matrix_json(ca_tbt)},
        {"ppl_vs_downstream", ppl}});

  // Low-rank structure and its relation to compute.
  const PcaResult pca_direct = fit_pca(direct, prep);
  const PcaResult pca_tbt = fit_pca(tbt, prep);
  const auto to_list = [](const Eigen::VectorXd& v) {
    Json l = Json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k) l.push_back(v(k));
    return l;
  };
  emit("fig6_evr.json", "report_evr",
       {{"preprocessing", to_string(prep)}, {"direct", to_list(pca_direct.evr)}, {"tbt", to_list(pca_tbt.evr)}});

  const auto records = compute_records(models);
  Json fig7 = {{"preprocessing", to_string(prep)}};
  for (const auto& [name, pca] : {std::pair{"direct", &pca_direct}, std::pair{"tbt", &pca_tbt}}) {
    const Pc1ComputeCorrelation c = pc1_compute_correlation(*pca, records);
    if (c.tau.is_degenerate()) throw DegenerateError(std::string("PC1-vs-compute tau is undefined for ") + name);
    Json points = Json::array();
    for (const auto& p : c.points) points.push_back({{"model", p.model_id}, {"log10_flops", p.log10_flops}, {"pc1", p.pc1}});
    fig7[name] = {{"points", points}, {"tau", c.tau.value()}};
  }
  emit("fig7_pc1_compute.json", "report_pc1_compute", fig7);
  return outputs;
}

std::string one_line(std::string s) {
  for (char& c : s)
    if (c == '\n' || c == '\r') c = ' ';
  return s;
}

void write_outputs(const std::vector<Output>& outputs, std::ostream& out) {
  for (const auto& o : outputs) {
    if (o.path.empty()) {
      out << o.content;
      continue;
    }
    if (o.path.has_parent_path()) fs::create_directories(o.path.parent_path());
    std::ofstream f(o.path, std::ios::binary | std::ios::trunc);
    if (!f) throw InputError("cannot write '" + o.path.string() + "'");
    f << o.content;
    if (!f) throw InputError("failed writing '" + o.path.string() + "'");
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rank agreement, ranking alignment and low-rank analysis of benchmark score matrices", "rankagree"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  double alpha = 0.05;
  std::string out_path;

  auto* agree = app.add_subcommand("agree", "Pairwise Kendall agreement between benchmarks");
  std::string agree_scores, agree_method = "tau";
  agree->add_option("--scores", agree_scores, "Score file (.csv long format or .json)")->required();
  agree->add_option("--method", agree_method, "tau or tau-b")->check(CLI::IsMember({"tau", "tau-b"}));
  agree->add_option("--alpha", alpha, "Significance level for tau-b ties");
  agree->add_option("--out", out_path, "Output JSON (default: stdout)");

  auto* align = app.add_subcommand("align", "Significance-respecting ranking alignment of two benchmarks");
  std::string scores_a, scores_b, bench_a, bench_b;
  align->add_option("--scores-a", scores_a)->required();
  align->add_option("--scores-b", scores_b)->required();
  align->add_option("--benchmark-a", bench_a)->required();
  align->add_option("--benchmark-b", bench_b)->required();
  align->add_option("--alpha", alpha);
  align->add_option("--out", out_path);

  auto* pca = app.add_subcommand("pca", "Principal components of the model-score matrix");
  std::string pca_scores, preprocess = "center";
  int top_k = 0;
  pca->add_option("--scores", pca_scores)->required();
  pca->add_option("--preprocess", preprocess)->check(CLI::IsMember({"center", "zscore"}));
  pca->add_option("--top-k", top_k, "Components to list (default min(5, all))");
  pca->add_option("--out", out_path);

  auto* flops = app.add_subcommand("flops", "Pre-training compute from model metadata");
  std::string models_path;
  flops->add_option("--models", models_path)->required();
  flops->add_option("--out", out_path);

  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic score matrix");
  std::string config_path, mode_name = "direct", models_out;
  std::optional<std::uint64_t> seed;
  simulate->add_option("--config", config_path)->required();
  simulate->add_option("--mode", mode_name)->check(CLI::IsMember({"direct", "tbt"}));
  simulate->add_option("--seed", seed, "Overrides the config seed");
  simulate->add_option("--out", out_path, "Output (.csv long format, otherwise JSON; default stdout JSON)");
  simulate->add_option("--models-out", models_out, "Also write model metadata CSV");

  auto* report = app.add_subcommand("report", "Figure-data tables comparing direct and train-before-test scores");
  std::string scores_direct, scores_tbt, categories_path, report_models, out_dir, report_method = "tau";
  std::vector<std::string> pair_specs;
  report->add_option("--scores-direct", scores_direct)->required();
  report->add_option("--scores-tbt", scores_tbt)->required();
  report->add_option("--categories", categories_path)->required();
  report->add_option("--models", report_models)->required();
  report->add_option("--out-dir", out_dir)->required();
  report->add_option("--method", report_method)->check(CLI::IsMember({"tau", "tau-b"}));
  report->add_option("--alpha", alpha);
  report->add_option("--preprocess", preprocess)->check(CLI::IsMember({"center", "zscore"}));
  report->add_option("--pair", pair_specs, "Benchmark pair A,B for alignment tables (repeatable)");

  std::vector<const char*> argv{"rankagree"};
  for (const auto& a : args) argv.push_back(a.c_str());

  const auto fail = [&](const char* kind, const std::string& reason, int code) {
    err << "rankagree: error[" << kind << "]: " << one_line(reason) << "\n";
    return code;
  };

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::Success& e) {
    std::ostringstream help, ignored;
    app.exit(e, help, ignored);
    out << help.str();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), kExitUsage);
  }

  try {
    const SignificanceConfig cfg(alpha);
    std::vector<Output> outputs;

    if (agree->parsed()) {
      ManifestBuilder mb("agree");
      mb.flag("method", agree_method);
      mb.flag("alpha", alpha);
      const ScoreMatrix m = scores_from(mb, agree_scores);
      const AgreementMethod method = parse_agreement_method(agree_method);
      outputs.push_back(
          {out_path, dump_artifact(make_artifact("agreement", agreement_to_json(agreement_matrix(m, method, cfg), method, cfg),
                                                 mb.get()))});
    } else if (align->parsed()) {
      ManifestBuilder mb("align");
      mb.flag("benchmark-a", bench_a);
      mb.flag("benchmark-b", bench_b);
      mb.flag("alpha", alpha);
      const ScoreMatrix ma = scores_from(mb, scores_a);
      const ScoreMatrix mbm = scores_b == scores_a ? ma : scores_from(mb, scores_b);
      Json payload = alignment_payload(ma, ma.benchmark_index(bench_a), mbm, mbm.benchmark_index(bench_b), cfg);
      payload["alpha"] = alpha;
      outputs.push_back({out_path, dump_artifact(make_artifact("alignment", std::move(payload), mb.get()))});
    } else if (pca->parsed()) {
      ManifestBuilder mb("pca");
      mb.flag("preprocess", preprocess);
      const ScoreMatrix m = scores_from(mb, pca_scores);
      const PcaResult r = fit_pca(m, parse_preprocessing(preprocess));
      const Eigen::Index k = top_k > 0 ? top_k : std::min<Eigen::Index>(5, r.evr.size());
      mb.flag("top-k", std::to_string(k));
      outputs.push_back({out_path, dump_artifact(make_artifact("pca", pca_to_json(r, k), mb.get()))});
    } else if (flops->parsed()) {
      ManifestBuilder mb("flops");
      const auto models = parse_model_metadata(mb.input(models_path));
      outputs.push_back({out_path, dump_artifact(make_artifact("flops", flops_to_json(models), mb.get()))});
    } else if (simulate->parsed()) {
      ManifestBuilder mb("simulate");
      SyntheticConfig sc = parse_synthetic_config(mb.input(config_path));
      if (seed) sc.seed = *seed;
      const EvalMode mode = parse_eval_mode(mode_name);
      mb.flag("mode", std::string(to_string(mode)));
      mb.flag("seed", std::to_string(sc.seed));
      const ScoreMatrix m = generate(sc, mode);
      const bool csv = !out_path.empty() && score_format_for(out_path) == ScoreFormat::LongCsv;
      outputs.push_back({out_path, csv ? write_scores_csv(m, &mb.get()) : write_scores_json(m, &mb.get())});
      if (!models_out.empty()) outputs.push_back({models_out, write_model_metadata(synthetic_models(sc))});
    } else if (report->parsed()) {
      ManifestBuilder mb("report");
      mb.flag("method", report_method);
      mb.flag("alpha", alpha);
      mb.flag("preprocess", preprocess);
      for (const auto& p : pair_specs) mb.flag("pair", p);
      outputs = run_report(mb, scores_direct, scores_tbt, categories_path, report_models, out_dir,
                           parse_agreement_method(report_method), cfg, parse_preprocessing(preprocess), pair_specs);
    }
    write_outputs(outputs, out);
  } catch (const UsageError& e) {
    return fail("usage", e.what(), kExitUsage);
  } catch (const DegenerateError& e) {
    return fail("degenerate", e.what(), kExitDegenerate);
  } catch (const InputError& e) {
    return fail("input", e.what(), kExitInput);
  } catch (const fs::filesystem_error& e) {
    return fail("input", e.what(), kExitInput);
  }
  return kExitOk;
}

}  // namespace rankagree
