#pragma once

#include "rankagree/rank_stats.hpp"

#include <utility>

namespace rankagree {

/// DAG over models: edge a -> b when a scores significantly higher than b.
class PartialOrder {
 public:
  PartialOrder() = default;
  /// Throws InputError if the edge set contains a cycle.
  PartialOrder(std::vector<std::string> model_ids, Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> edges);

  const std::vector<std::string>& model_ids() const { return model_ids_; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(model_ids_.size()); }
  bool has_edge(Eigen::Index from, Eigen::Index to) const { return edges_(from, to); }
  const Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>& adjacency() const { return edges_; }
  std::vector<std::pair<Eigen::Index, Eigen::Index>> edges() const;
  std::size_t edge_count() const { return static_cast<std::size_t>(edges_.count()); }

 private:
  std::vector<std::string> model_ids_;
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> edges_;
};

PartialOrder build_partial_order(const std::vector<std::string>& model_ids, const Eigen::VectorXd& scores,
                                 const Eigen::VectorXd& stderrs, const SignificanceConfig& cfg = SignificanceConfig());

/// Ordinal ranks, 1 = highest score; exact ties broken by model id.
std::vector<int> vanilla_ranks(const std::vector<std::string>& model_ids, const Eigen::VectorXd& scores);

/// Model indices in display order, top first.
using Ordering = std::vector<Eigen::Index>;

struct ParallelOrders {
  Ordering order1;
  Ordering order2;
};

/// Greedy construction of two linear extensions that share as much order as
/// the two partial orders allow. Each step takes one zero-in-degree node from
/// each graph, choosing the pair with the smallest cost tuple
/// (future-crossing penalty, mismatch, cross vanilla rank sum, ids).
ParallelOrders parallel_greedy_rank(const std::vector<std::string>& model_ids, const PartialOrder& g1,
                                    const PartialOrder& g2, const Eigen::VectorXd& score1,
                                    const Eigen::VectorXd& score2);

struct AlignedRanking {
  std::vector<std::string> model_ids;
  Ordering order1;
  Ordering order2;
  std::vector<int> rank1;  // per model index, 1-based
  std::vector<int> rank2;
};

AlignedRanking rank_models(const std::vector<std::string>& model_ids, const Eigen::VectorXd& score1,
                           const Eigen::VectorXd& se1, const Eigen::VectorXd& score2, const Eigen::VectorXd& se2,
                           const SignificanceConfig& cfg = SignificanceConfig());

/// Pairs of models whose relative order differs between the two orders.
std::size_t crossing_count(const AlignedRanking& a);
std::size_t crossing_count(const Ordering& order1, const Ordering& order2);

/// True when no edge of g points from a later to an earlier position.
bool is_linear_extension(const Ordering& order, const PartialOrder& g);

/// True when the union of both edge sets has no cycle.
bool union_is_acyclic(const PartialOrder& g1, const PartialOrder& g2);

}  // namespace rankagree
