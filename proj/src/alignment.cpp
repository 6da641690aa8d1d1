#include "rankagree/alignment.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>

namespace rankagree {

namespace {

using BoolMatrix = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

bool acyclic(const BoolMatrix& adj) {
  const Eigen::Index n = adj.rows();
  std::vector<Eigen::Index> indegree(n, 0);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b)
      if (adj(a, b)) ++indegree[b];
  std::vector<Eigen::Index> ready;
  for (Eigen::Index v = 0; v < n; ++v)
    if (indegree[v] == 0) ready.push_back(v);
  Eigen::Index removed = 0;
  while (!ready.empty()) {
    const Eigen::Index v = ready.back();
    ready.pop_back();
    ++removed;
    for (Eigen::Index b = 0; b < n; ++b)
      if (adj(v, b) && --indegree[b] == 0) ready.push_back(b);
  }
  return removed == n;
}

std::vector<Eigen::Index> positions_of(const Ordering& order) {
  std::vector<Eigen::Index> pos(order.size());
  for (std::size_t p = 0; p < order.size(); ++p) pos[order[p]] = static_cast<Eigen::Index>(p);
  return pos;
}

}  // namespace

PartialOrder::PartialOrder(std::vector<std::string> model_ids, BoolMatrix edges)
    : model_ids_(std::move(model_ids)), edges_(std::move(edges)) {
  const auto n = static_cast<Eigen::Index>(model_ids_.size());
  if (edges_.rows() != n || edges_.cols() != n) throw InputError("partial order adjacency does not match model list");
  if (!acyclic(edges_)) throw InputError("partial order contains a cycle");
}

std::vector<std::pair<Eigen::Index, Eigen::Index>> PartialOrder::edges() const {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> out;
  for (Eigen::Index a = 0; a < size(); ++a)
    for (Eigen::Index b = 0; b < size(); ++b)
      if (edges_(a, b)) out.emplace_back(a, b);
  return out;
}

PartialOrder build_partial_order(const std::vector<std::string>& model_ids, const Eigen::VectorXd& scores,
                                 const Eigen::VectorXd& stderrs, const SignificanceConfig& cfg) {
  const auto n = static_cast<Eigen::Index>(model_ids.size());
  if (n < 1) throw InputError("partial order needs at least one model");
  if (scores.size() != n || stderrs.size() != n) throw InputError("score/stderr length does not match model list");
  BoolMatrix edges = BoolMatrix::Constant(n, n, false);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = a + 1; b < n; ++b)
      if (significant_difference(scores(a), stderrs(a), scores(b), stderrs(b), cfg)) {
        if (scores(a) > scores(b))
          edges(a, b) = true;
        else
          edges(b, a) = true;
      }
  return PartialOrder(model_ids, std::move(edges));
}

std::vector<int> vanilla_ranks(const std::vector<std::string>& model_ids, const Eigen::VectorXd& scores) {
  const auto n = static_cast<Eigen::Index>(model_ids.size());
  if (scores.size() != n) throw InputError("score length does not match model list");
  for (Eigen::Index i = 0; i < n; ++i)
    if (!std::isfinite(scores(i))) throw InputError("non-finite score for model '" + model_ids[i] + "'");
  std::vector<Eigen::Index> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (scores(a) != scores(b)) return scores(a) > scores(b);
    return model_ids[a] < model_ids[b];
  });
  std::vector<int> ranks(n);
  for (Eigen::Index p = 0; p < n; ++p) ranks[idx[p]] = static_cast<int>(p + 1);
  return ranks;
}

ParallelOrders parallel_greedy_rank(const std::vector<std::string>& model_ids, const PartialOrder& g1,
                                    const PartialOrder& g2, const Eigen::VectorXd& score1,
                                    const Eigen::VectorXd& score2) {
  if (g1.model_ids() != model_ids || g2.model_ids() != model_ids)
    throw InputError("partial orders are over different model sets");
  const auto n = static_cast<Eigen::Index>(model_ids.size());
  const std::vector<int> vr1 = vanilla_ranks(model_ids, score1);
  const std::vector<int> vr2 = vanilla_ranks(model_ids, score2);

  std::vector<Eigen::Index> indeg1(n, 0), indeg2(n, 0);
  for (auto [a, b] : g1.edges()) ++indeg1[b];
  for (auto [a, b] : g2.edges()) ++indeg2[b];
  std::vector<bool> placed1(n, false), placed2(n, false);

  ParallelOrders out;
  out.order1.reserve(n);
  out.order2.reserve(n);
  using Cost = std::tuple<int, int, int, const std::string&, const std::string&>;
  const auto cost_of = [&](Eigen::Index m1, Eigen::Index m2) {
    const bool mismatch = m1 != m2;
    // A mismatched pick whose members are still unplaced on the other side
    // commits to a crossing later on.
    const int penalty = (mismatch && !placed2[m1]) + (mismatch && !placed1[m2]);
    return Cost{penalty, mismatch, vr2[m1] + vr1[m2], model_ids[m1], model_ids[m2]};
  };

  for (Eigen::Index step = 0; step < n; ++step) {
    std::optional<std::pair<Eigen::Index, Eigen::Index>> best;
    for (Eigen::Index m1 = 0; m1 < n; ++m1) {
      if (placed1[m1] || indeg1[m1] != 0) continue;
      for (Eigen::Index m2 = 0; m2 < n; ++m2) {
        if (placed2[m2] || indeg2[m2] != 0) continue;
        if (!best || cost_of(m1, m2) < cost_of(best->first, best->second)) best.emplace(m1, m2);
      }
    }
    if (!best) throw InputError("partial order contains a cycle; no available model");
    const auto [m1, m2] = *best;
    out.order1.push_back(m1);
    out.order2.push_back(m2);
    placed1[m1] = true;
    placed2[m2] = true;
    for (Eigen::Index b = 0; b < n; ++b) {
      if (g1.has_edge(m1, b)) --indeg1[b];
      if (g2.has_edge(m2, b)) --indeg2[b];
    }
  }
  return out;
}

AlignedRanking rank_models(const std::vector<std::string>& model_ids, const Eigen::VectorXd& score1,
                           const Eigen::VectorXd& se1, const Eigen::VectorXd& score2, const Eigen::VectorXd& se2,
                           const SignificanceConfig& cfg) {
  const PartialOrder g1 = build_partial_order(model_ids, score1, se1, cfg);
  const PartialOrder g2 = build_partial_order(model_ids, score2, se2, cfg);
  ParallelOrders orders = parallel_greedy_rank(model_ids, g1, g2, score1, score2);

  AlignedRanking a;
  a.model_ids = model_ids;
  a.rank1.resize(model_ids.size());
  a.rank2.resize(model_ids.size());
  for (std::size_t p = 0; p < model_ids.size(); ++p) {
    a.rank1[orders.order1[p]] = static_cast<int>(p + 1);
    a.rank2[orders.order2[p]] = static_cast<int>(p + 1);
  }
  a.order1 = std::move(orders.order1);
  a.order2 = std::move(orders.order2);
  return a;
}

std::size_t crossing_count(const Ordering& order1, const Ordering& order2) {
  if (order1.size() != order2.size()) throw InputError("orders have different lengths");
  const auto pos1 = positions_of(order1);
  const auto pos2 = positions_of(order2);
  std::size_t crossings = 0;
  for (std::size_t a = 0; a < pos1.size(); ++a)
    for (std::size_t b = a + 1; b < pos1.size(); ++b)
      if ((pos1[a] < pos1[b]) != (pos2[a] < pos2[b])) ++crossings;
  return crossings;
}

std::size_t crossing_count(const AlignedRanking& a) { return crossing_count(a.order1, a.order2); }

bool is_linear_extension(const Ordering& order, const PartialOrder& g) {
  if (static_cast<Eigen::Index>(order.size()) != g.size()) return false;
  std::vector<bool> seen(order.size(), false);
  for (Eigen::Index v : order) {
    if (v < 0 || v >= g.size() || seen[v]) return false;
    seen[v] = true;
  }
  const auto pos = positions_of(order);
  for (auto [a, b] : g.edges())
    if (pos[a] > pos[b]) return false;
  return true;
}

bool union_is_acyclic(const PartialOrder& g1, const PartialOrder& g2) {
  if (g1.size() != g2.size()) throw InputError("partial orders differ in size");
  return acyclic(g1.adjacency() || g2.adjacency());
}

}  // namespace rankagree
