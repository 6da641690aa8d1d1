// Acceptance checks. One PASS/FAIL line per criterion; nonzero exit if any fail.
#include "rankagree/io.hpp"

#include "oracles/oracles.hpp"

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace rankagree;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

std::vector<std::string> letters(int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back(std::string(1, static_cast<char>('A' + i)));
  return out;
}

// ---------------------------------------------------------------------------

std::string tau_oracle_equivalence() {
  std::mt19937_64 rng(1001);
  const auto t0 = Clock::now();
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = std::uniform_int_distribution<int>(2, 10)(rng);
    std::vector<int> px(n), py(n);
    std::iota(px.begin(), px.end(), 0);
    std::iota(py.begin(), py.end(), 0);
    std::shuffle(px.begin(), px.end(), rng);
    std::shuffle(py.begin(), py.end(), rng);
    Eigen::VectorXd x(n), y(n);
    for (int i = 0; i < n; ++i) {
      x(i) = px[i] + 0.25 * std::uniform_real_distribution<double>(0, 1)(rng);
      y(i) = py[i] - 3.0;
    }
    if (kendall_tau(x, y) != oracles::tau_oracle(to_std(x), to_std(y)))
      return "mismatch at trial " + std::to_string(trial);
  }
  const double s = seconds_since(t0);
  if (s >= 5.0) return "took " + std::to_string(s) + " s";
  return {};
}

std::string taub_correctness() {
  std::mt19937_64 rng(1002);
  const SignificanceConfig cfg;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = std::uniform_int_distribution<int>(2, 10)(rng);
    const double scale = std::pow(10.0, std::uniform_real_distribution<double>(-3, 0.5)(rng));
    Eigen::VectorXd x(n), y(n), ex(n), ey(n);
    for (int i = 0; i < n; ++i) {
      // coarse grid so exact ties appear too
      x(i) = std::uniform_int_distribution<int>(0, 6)(rng) / 6.0;
      y(i) = std::uniform_real_distribution<double>(0, 1)(rng);
      ex(i) = trial % 5 == 0 ? 0.0 : scale * std::uniform_real_distribution<double>(0, 1)(rng);
      ey(i) = scale * std::uniform_real_distribution<double>(0, 1)(rng);
    }
    const Correlation got = kendall_tau_b(x, ex, y, ey, cfg);
    const auto want = oracles::taub_oracle(to_std(x), to_std(ex), to_std(y), to_std(ey), cfg.critical_z());
    if (got.is_degenerate() != !want.has_value()) return "definedness mismatch at trial " + std::to_string(trial);
    if (want && got.value() != *want) return "value mismatch at trial " + std::to_string(trial);
  }
  const Correlation hand = kendall_tau_b(Eigen::Vector3d(1, 1, 2), Eigen::Vector3d::Zero(), Eigen::Vector3d(3, 2, 1),
                                         Eigen::Vector3d::Zero(), cfg);
  if (hand.is_degenerate() || std::abs(hand.value() + 2.0 / std::sqrt(6.0)) > 1e-12) return "hand-worked case";
  const Correlation tied = kendall_tau_b(Eigen::Vector3d::Constant(0.5), Eigen::Vector3d::Zero(),
                                         Eigen::Vector3d::Constant(0.5), Eigen::Vector3d::Zero(), cfg);
  if (!tied.is_degenerate()) return "all-tied input is not degenerate";
  return {};
}

std::string alignment_validity() {
  std::mt19937_64 rng(1003);
  std::uniform_real_distribution<double> u(0, 1);
  const SignificanceConfig cfg;
  const auto t0 = Clock::now();
  for (int trial = 0; trial < 500; ++trial) {
    const int n = std::uniform_int_distribution<int>(1, 6)(rng);
    const double scale = std::pow(10.0, std::uniform_real_distribution<double>(-4, 1)(rng));
    Eigen::VectorXd s1(n), s2(n), e1(n), e2(n);
    for (int i = 0; i < n; ++i) {
      s1(i) = u(rng);
      s2(i) = u(rng);
      e1(i) = scale * u(rng);
      e2(i) = scale * u(rng);
    }
    const auto ids = letters(n);
    const PartialOrder g1 = build_partial_order(ids, s1, e1, cfg);
    const PartialOrder g2 = build_partial_order(ids, s2, e2, cfg);
    const AlignedRanking a = rank_models(ids, s1, e1, s2, e2, cfg);
    const std::string at = " at trial " + std::to_string(trial);
    if (!is_linear_extension(a.order1, g1) || !is_linear_extension(a.order2, g2)) return "not a linear extension" + at;
    if (union_is_acyclic(g1, g2) && a.order1 != a.order2) return "acyclic union but orders differ" + at;
    const int best = oracles::alignment_oracle(g1, g2);
    const int got = static_cast<int>(crossing_count(a));
    if (got < best) return "beat the oracle" + at;
    if (best == 0 && got != 0) return "missed a zero-crossing alignment" + at;
  }
  const double s = seconds_since(t0);
  if (s >= 30.0) return "took " + std::to_string(s) + " s";
  return {};
}

ScoreMatrix models_by_benchmarks(const Eigen::MatrixXd& x) {
  ScoreMatrixDraft d;
  d.scores = x.transpose();
  d.stderrs = Eigen::MatrixXd::Zero(d.scores.rows(), d.scores.cols());
  for (Eigen::Index i = 0; i < d.scores.rows(); ++i) d.benchmark_ids.push_back("b" + std::to_string(i));
  for (Eigen::Index j = 0; j < d.scores.cols(); ++j) d.model_ids.push_back("m" + std::to_string(j));
  d.directions.assign(d.scores.rows(), Direction::HigherIsBetter);
  return validate_score_matrix(std::move(d));
}

std::string pca_numerics() {
  std::mt19937_64 rng(1004);
  std::normal_distribution<double> z(0, 1);
  const auto random = [&](Eigen::Index r, Eigen::Index c) {
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
      for (Eigen::Index j = 0; j < c; ++j) m(i, j) = z(rng);
    return m;
  };
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd g = random(15, 1), a = random(8, 1).array().abs() + 0.1, b = random(8, 1);
    const Eigen::MatrixXd x = g * a.transpose() + Eigen::VectorXd::Ones(15) * b.transpose();
    if (std::abs(fit_pca(models_by_benchmarks(x)).evr(0) - 1.0) > 1e-9) return "rank-one EVR1";
  }
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::MatrixXd x = random(10, 2);
    const Eigen::MatrixXd xc = x.rowwise() - x.colwise().mean();
    const Eigen::MatrixXd c = xc.transpose() * xc / 9.0;
    const auto [hi, lo] = oracles::eig2_oracle(c(0, 0), c(0, 1), c(0, 1), c(1, 1));
    const PcaResult r = fit_pca(models_by_benchmarks(x));
    if (std::abs(r.eigenvalues(0) - hi) > 1e-10 || std::abs(r.eigenvalues(1) - lo) > 1e-10) return "2-feature eigenvalues";
  }
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd x = random(20, 12);
    const PcaResult r = fit_pca(models_by_benchmarks(x));
    const Eigen::MatrixXd& xc = r.preprocessed;
    if ((xc * r.components * r.components.transpose() - xc).cwiseAbs().maxCoeff() >= 1e-9) return "reconstruction";
    const double trace = (xc.transpose() * xc / 19.0).trace();
    if (std::abs(r.eigenvalues.sum() - trace) > 1e-9) return "trace";
    const PcaResult scaled = fit_pca(models_by_benchmarks(7.5 * x));
    if ((scaled.evr - r.evr).cwiseAbs().maxCoeff() > 1e-12) return "rescaling";
  }
  return {};
}

std::string flops_table() {
  // printed to two decimals in units of 1e18
  const auto printed = [](double f) { return std::round(f / 1e16) / 100.0; };
  if (printed(compute_flops(8.03, 15000)) != 722700.0) return "8.03B x 15000B";
  if (printed(compute_flops(0.07, 300)) != 126.0) return "0.07B x 300B";
  return {};
}

// Seeds and thresholds fixed after a calibration run over seeds 0..99.
constexpr int kSimSeeds = 20;
constexpr double kTauGain = 0.1;
constexpr double kEvrGain = 0.05;
constexpr int kRequired = 18;

std::string simulator_contrast() {
  const auto t0 = Clock::now();
  int tau_ok = 0, evr_ok = 0;
  std::ostringstream detail;
  for (int s = 0; s < kSimSeeds; ++s) {
    SyntheticConfig c = SyntheticConfig::with_defaults(20, 12, static_cast<std::uint64_t>(s));
    c.n_items.assign(12, 2000);
    c.prep_sd = 0.5;
    c.residual_prep = 0.0;
    const PairedSummary p = paired_experiment(c);
    tau_ok += p.tau_gain() >= kTauGain;
    evr_ok += p.evr1_gain() >= kEvrGain;
  }
  const double secs = seconds_since(t0);
  detail << "tau gain on " << tau_ok << "/" << kSimSeeds << " seeds, EVR1 gain on " << evr_ok << "/" << kSimSeeds
         << ", " << secs << " s";
  if (tau_ok < kRequired || evr_ok < kRequired || secs >= 60.0) return detail.str();
  return {};
}

// ---- subprocess helpers -----------------------------------------------------

fs::path workdir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("rankagree_accept_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int cli(const std::string& args) {
  const std::string cmd = std::string(RANKAGREE_CLI) + " " + args + " >/dev/null 2>>" + (workdir() / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) { return read_file(p); }

void put(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

// Simulated inputs shared by the last two criteria.
struct Inputs {
  fs::path config, direct, tbt, models, categories;
};

std::optional<Inputs> make_inputs() {
  const fs::path w = workdir();
  Inputs in{w / "config.json", w / "direct.csv", w / "tbt.csv", w / "models.csv", w / "categories.csv"};
  put(in.config, R"({"n_models": 20, "n_benchmarks": 12, "n_items": 2000, "prep_sd": 0.5})");
  std::ostringstream cats;
  cats << "benchmark,category\n";
  const char* names[] = {"LU", "LU", "CR", "CR", "QA", "QA", "PBC", "PBC", "Math", "Math", "PPL", "PPL"};
  for (int i = 0; i < 12; ++i) cats << "bench-" << (i < 10 ? "0" : "") << i << "," << names[i] << "\n";
  put(in.categories, cats.str());
  if (cli("simulate --config " + in.config.string() + " --mode direct --seed 7 --out " + in.direct.string() +
          " --models-out " + in.models.string()) != 0)
    return std::nullopt;
  if (cli("simulate --config " + in.config.string() + " --mode tbt --seed 7 --out " + in.tbt.string()) != 0)
    return std::nullopt;
  return in;
}

std::string determinism(const Inputs& in) {
  const fs::path w = workdir();
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"simulate", "simulate --config " + in.config.string() + " --mode tbt --seed 11 --out {}.csv"},
      {"simulate-json", "simulate --config " + in.config.string() + " --seed 11 --out {}.json"},
      {"agree", "agree --scores " + in.direct.string() + " --method tau-b --out {}.json"},
      {"align", "align --scores-a " + in.direct.string() + " --scores-b " + in.tbt.string() +
                    " --benchmark-a bench-00 --benchmark-b bench-00 --out {}.json"},
      {"pca", "pca --scores " + in.tbt.string() + " --preprocess zscore --out {}.json"},
      {"flops", "flops --models " + in.models.string() + " --out {}.json"},
  };
  for (const auto& [name, tmpl] : commands) {
    std::string digests[2];
    for (int k = 0; k < 2; ++k) {
      std::string args = tmpl;
      const fs::path stem = w / ("det_" + name + "_" + std::to_string(k));
      args.replace(args.find("{}"), 2, stem.string());
      if (cli(args) != 0) return name + " failed";
      const std::string ext = tmpl.substr(tmpl.rfind('.'));
      digests[k] = sha256_hex(slurp(stem.string() + ext));
    }
    if (digests[0] != digests[1]) return name + " output differs between runs";
  }
  std::string reports[2];
  for (int k = 0; k < 2; ++k) {
    const fs::path dir = w / ("det_report_" + std::to_string(k));
    if (cli("report --scores-direct " + in.direct.string() + " --scores-tbt " + in.tbt.string() + " --categories " +
            in.categories.string() + " --models " + in.models.string() + " --out-dir " + dir.string()) != 0)
      return "report failed";
    for (const auto& e : fs::directory_iterator(dir)) reports[k] += e.path().filename().string();
    for (const char* f : {"fig1_alignment.json", "fig2_mean_agreement.json", "fig3_category_agreement.json",
                          "fig6_evr.json", "fig7_pc1_compute.json"})
      reports[k] += sha256_hex(slurp(dir / f));
  }
  if (reports[0] != reports[1]) return "report output differs between runs";
  return {};
}

std::string report_smoke(const Inputs& in) {
  const fs::path dir = workdir() / "report";
  const int code = cli("report --scores-direct " + in.direct.string() + " --scores-tbt " + in.tbt.string() +
                       " --categories " + in.categories.string() + " --models " + in.models.string() +
                       " --out-dir " + dir.string());
  if (code != 0) return "exit code " + std::to_string(code);
  for (const char* f : {"fig1_alignment.json", "fig2_mean_agreement.json", "fig3_category_agreement.json",
                        "fig6_evr.json", "fig7_pc1_compute.json"}) {
    try {
      load_artifact(dir / f);
    } catch (const std::exception& e) {
      return std::string(f) + ": " + e.what();
    }
  }
  return {};
}

}  // namespace

int main() {
  int failures = 0;
  const auto check = [&](int id, const char* title, const std::function<std::string()>& body) {
    std::string problem;
    try {
      problem = body();
    } catch (const std::exception& e) {
      problem = std::string("exception: ") + e.what();
    }
    std::cout << (problem.empty() ? "PASS" : "FAIL") << "  [" << id << "] " << title;
    if (!problem.empty()) std::cout << ": " << problem;
    std::cout << std::endl;
    failures += !problem.empty();
  };

  check(1, "tau matches the pair-counting oracle", tau_oracle_equivalence);
  check(2, "tau-b matches the oracle; hand case; degenerate marker", taub_correctness);
  check(3, "alignment outputs are valid and oracle-consistent", alignment_validity);
  check(4, "PCA numerics", pca_numerics);
  check(5, "compute estimates reproduce the table rows", flops_table);
  check(6, "simulator shows the train-before-test contrast", simulator_contrast);

  const auto inputs = make_inputs();
  check(7, "every subcommand is byte-deterministic", [&]() -> std::string {
    return inputs ? determinism(*inputs) : "could not simulate inputs";
  });
  check(8, "report runs end to end and its tables re-load", [&]() -> std::string {
    return inputs ? report_smoke(*inputs) : "could not simulate inputs";
  });

  if (failures == 0) fs::remove_all(workdir());
  return failures == 0 ? 0 : 1;
}
