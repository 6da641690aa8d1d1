#include "rankagree/alignment.hpp"

#include "oracles/oracles.hpp"

#include <doctest.h>

#include <random>

using namespace rankagree;

namespace {

using BoolMatrix = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

PartialOrder chain(const std::vector<std::string>& ids) {
  BoolMatrix e = BoolMatrix::Constant(ids.size(), ids.size(), false);
  for (std::size_t a = 0; a < ids.size(); ++a)
    for (std::size_t b = a + 1; b < ids.size(); ++b) e(a, b) = true;
  return PartialOrder(ids, e);
}

std::vector<std::string> ids(int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back(std::string(1, static_cast<char>('A' + i)));
  return out;
}

}  // namespace

TEST_CASE("partial order examples") {
  const SignificanceConfig cfg;
  PartialOrder g = build_partial_order({"A", "B"}, Eigen::Vector2d(0.9, 0.1), Eigen::Vector2d(0.01, 0.01), cfg);
  CHECK(g.edges() == std::vector<std::pair<Eigen::Index, Eigen::Index>>{{0, 1}});

  g = build_partial_order(ids(3), Eigen::Vector3d(0.5, 0.5, 0.5), Eigen::Vector3d(0.01, 0.0, 0.2), cfg);
  CHECK(g.edge_count() == 0);

  // (0,1): z = 0.1 / 0.0566 ~ 1.77, not significant
  g = build_partial_order(ids(3), Eigen::Vector3d(0.9, 0.8, 0.1), Eigen::Vector3d::Constant(0.04), cfg);
  CHECK(g.edges() == std::vector<std::pair<Eigen::Index, Eigen::Index>>{{0, 2}, {1, 2}});

  CHECK_THROWS_AS(build_partial_order(ids(2), Eigen::Vector3d(1, 2, 3), Eigen::Vector3d::Zero(), cfg), InputError);
  CHECK_THROWS_AS(build_partial_order(ids(2), Eigen::Vector2d(1, std::nan("")), Eigen::Vector2d::Zero(), cfg),
                  InputError);
}

TEST_CASE("partial order edges point from significantly higher to lower") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0, 1), se(0, 0.1);
  const SignificanceConfig cfg;
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd s(6), e(6);
    for (int i = 0; i < 6; ++i) {
      s(i) = u(rng);
      e(i) = se(rng);
    }
    const PartialOrder g = build_partial_order(ids(6), s, e, cfg);
    for (Eigen::Index a = 0; a < 6; ++a)
      for (Eigen::Index b = 0; b < 6; ++b) {
        const bool want = a != b && s(a) > s(b) && significant_difference(s(a), e(a), s(b), e(b), cfg);
        CHECK(g.has_edge(a, b) == want);
      }
  }
}

TEST_CASE("cyclic adjacency is rejected") {
  BoolMatrix e = BoolMatrix::Constant(2, 2, false);
  e(0, 1) = e(1, 0) = true;
  CHECK_THROWS_AS(PartialOrder(ids(2), e), InputError);
}

TEST_CASE("vanilla ranks") {
  CHECK(vanilla_ranks(ids(3), Eigen::Vector3d(0.9, 0.5, 0.7)) == std::vector<int>{1, 3, 2});
  CHECK(vanilla_ranks({"C", "A", "B"}, Eigen::Vector3d(0.5, 0.5, 0.5)) == std::vector<int>{3, 1, 2});
  CHECK(vanilla_ranks({"solo"}, Eigen::VectorXd::Constant(1, 0.3)) == std::vector<int>{1});
}

TEST_CASE("identical chains align without crossings") {
  const auto m = ids(3);
  const Eigen::Vector3d s(0.9, 0.5, 0.1);
  const ParallelOrders o = parallel_greedy_rank(m, chain(m), chain(m), s, s);
  CHECK(o.order1 == Ordering{0, 1, 2});
  CHECK(o.order2 == Ordering{0, 1, 2});
}

TEST_CASE("an insignificant swap is not displayed") {
  // task 2 scores B above A, but not significantly; both beat C
  const auto m = ids(3);
  BoolMatrix e2 = BoolMatrix::Constant(3, 3, false);
  e2(0, 2) = e2(1, 2) = true;
  const ParallelOrders o =
      parallel_greedy_rank(m, chain(m), PartialOrder(m, e2), Eigen::Vector3d(0.9, 0.5, 0.1), Eigen::Vector3d(0.6, 0.62, 0.1));
  CHECK(o.order1 == Ordering{0, 1, 2});
  CHECK(o.order2 == Ordering{0, 1, 2});
}

TEST_CASE("a significant reversal is displayed") {
  const auto m = ids(2);
  BoolMatrix e1 = BoolMatrix::Constant(2, 2, false), e2 = e1;
  e1(0, 1) = true;
  e2(1, 0) = true;
  const ParallelOrders o =
      parallel_greedy_rank(m, PartialOrder(m, e1), PartialOrder(m, e2), Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1));
  CHECK(o.order1 == Ordering{0, 1});
  CHECK(o.order2 == Ordering{1, 0});

  const AlignedRanking a = rank_models(m, Eigen::Vector2d(0.9, 0.1), Eigen::Vector2d(0.01, 0.01),
                                       Eigen::Vector2d(0.1, 0.9), Eigen::Vector2d(0.01, 0.01));
  CHECK(a.rank1 == std::vector<int>{1, 2});
  CHECK(a.rank2 == std::vector<int>{2, 1});
  CHECK(crossing_count(a) == 1);
}

TEST_CASE("mismatched model sets are rejected") {
  const auto m = ids(3);
  CHECK_THROWS_AS(parallel_greedy_rank(m, chain(m), chain({"A", "B", "X"}), Eigen::Vector3d::Zero(),
                                       Eigen::Vector3d::Zero()),
                  InputError);
}

TEST_CASE("rank_models on identical inputs gives identical ranks") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, 1);
  Eigen::VectorXd s(8), e(8);
  for (int i = 0; i < 8; ++i) {
    s(i) = u(rng);
    e(i) = 0.05 * u(rng);
  }
  const AlignedRanking a = rank_models(ids(8), s, e, s, e);
  CHECK(a.rank1 == a.rank2);
  CHECK(crossing_count(a) == 0);
}

TEST_CASE("crossing count") {
  CHECK(crossing_count(Ordering{0, 1, 2}, Ordering{0, 1, 2}) == 0);
  CHECK(crossing_count(Ordering{0, 1, 2}, Ordering{2, 1, 0}) == 3);
  CHECK(crossing_count(Ordering{0, 1, 2, 3}, Ordering{0, 2, 1, 3}) == 1);
}

TEST_CASE("greedy orders are linear extensions and respect the oracle bound") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0, 1);
  const SignificanceConfig cfg;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = std::uniform_int_distribution<int>(1, 6)(rng);
    const double scale = std::pow(10.0, std::uniform_real_distribution<double>(-3, 0)(rng));
    Eigen::VectorXd s1(n), s2(n), e1(n), e2(n);
    for (int i = 0; i < n; ++i) {
      s1(i) = u(rng);
      s2(i) = u(rng);
      e1(i) = scale * u(rng);
      e2(i) = scale * u(rng);
    }
    const auto m = ids(n);
    const PartialOrder g1 = build_partial_order(m, s1, e1, cfg);
    const PartialOrder g2 = build_partial_order(m, s2, e2, cfg);
    const AlignedRanking a = rank_models(m, s1, e1, s2, e2, cfg);
    CHECK(is_linear_extension(a.order1, g1));
    CHECK(is_linear_extension(a.order2, g2));
    const int best = oracles::alignment_oracle(g1, g2);
    CHECK(static_cast<int>(crossing_count(a)) >= best);
    if (union_is_acyclic(g1, g2)) {
      CHECK(best == 0);
      CHECK(a.order1 == a.order2);
    } else {
      CHECK(crossing_count(a) > 0);
    }
    // deterministic
    const AlignedRanking again = rank_models(m, s1, e1, s2, e2, cfg);
    CHECK(again.order1 == a.order1);
    CHECK(again.order2 == a.order2);
  }
}

TEST_CASE("linear extension check") {
  const auto m = ids(3);
  CHECK(is_linear_extension(Ordering{0, 1, 2}, chain(m)));
  CHECK_FALSE(is_linear_extension(Ordering{1, 0, 2}, chain(m)));
  CHECK_FALSE(is_linear_extension(Ordering{0, 0, 2}, chain(m)));
  CHECK_FALSE(is_linear_extension(Ordering{0, 1}, chain(m)));
}
