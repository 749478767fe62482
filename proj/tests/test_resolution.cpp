#include <functional>
#include <map>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "sandwich/error.hpp"
#include "sandwich/resolution.hpp"

using namespace sandwich;

namespace {

std::string error_kind(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return "";
}

// Intersection numbers of the strict transforms F(P) = e_P - sum_{Q -> P} e_Q
// in the lattice of total transforms (e_P . e_Q = -[P = Q]).
std::vector<std::vector<int>> strict_transform_form(const ProximityCluster& cl) {
  const std::size_t n = cl.size();
  std::vector<std::vector<int>> coeff(n, std::vector<int>(n, 0));
  for (std::size_t p = 0; p < n; ++p) {
    coeff[p][p] = 1;
    for (auto q : cl.proximate_to(p)) coeff[p][q] -= 1;
  }
  std::vector<std::vector<int>> form(n, std::vector<int>(n, 0));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t t = 0; t < n; ++t) form[a][b] -= coeff[a][t] * coeff[b][t];
  return form;
}

std::map<std::string, int> weights_by_label(const WeightedTree& t) {
  std::map<std::string, int> out;
  for (std::size_t v = 0; v < t.size(); ++v) out[t.label(v)] = t.weight(v);
  return out;
}

std::set<std::pair<std::string, std::string>> edges_by_label(const WeightedTree& t) {
  std::set<std::pair<std::string, std::string>> out;
  for (auto [a, b] : t.edges()) out.insert(std::minmax(t.label(a), t.label(b)));
  return out;
}

}  // namespace

TEST_CASE("extended clusters realise the decoration exactly") {
  auto six = oracle::bundled_germ("six-lines");
  auto ext = extend_cluster(six);
  REQUIRE(ext.chains.size() == 6);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(ext.chains[i].size() == 5);
    CHECK(ext.cluster.id(ext.chains[i][0]) == "q0");
    CHECK(ext.cluster.id(ext.chains[i][1]) == "p" + std::to_string(i + 1));
    CHECK(ext.multiplicities[i] == std::vector<int>{1, 1, 1, 1, 1});
  }

  auto cusp = oracle::bundled_germ("cusp-line");
  ext = extend_cluster(cusp);
  CHECK(ext.multiplicities[0] == std::vector<int>{2, 1, 1, 1, 1});
  CHECK(ext.chains[0].size() == 5);
  for (std::size_t k = 3; k < 5; ++k) {
    CHECK(ext.appended[ext.chains[0][k]]);
    CHECK_FALSE(ext.cluster.is_satellite(ext.chains[0][k]));
  }
  CHECK(ext.multiplicities[1] == std::vector<int>{1, 1, 1});

  auto smooth = parse_germ("point q0\nbranch a chain=q0 l=1\n");
  CHECK(extend_cluster(smooth).chains[0].size() == 1);

  // Truncation: the y^2 = x^5 chain (2,2,1,1) cut back to l = 4.
  auto a25 = parse_germ("point q0\npoint q1 parent=q0\npoint q2 parent=q1\npoint q3 parent=q2 proximate=q1\n"
                        "branch c chain=q0,q1,q2,q3 l=4\n");
  CHECK(extend_cluster(a25).chains[0].size() == 2);
  // l = 3 would have to cut through the middle of the multiplicity 2.
  CHECK(error_kind([&] { extend_cluster(a25.with_decorations({3})); }) == "DecorationTooSmall");
}

TEST_CASE("the three reference configurations") {
  SUBCASE("six lines: star with centre -7") {
    auto g = sandwiched_graph(oracle::bundled_germ("six-lines"));
    CHECK(trees_isomorphic(g.tree, oracle::star(-7, std::vector<std::vector<int>>(6, {-2, -2, -2}))));
    CHECK(g.connected);
    CHECK(g.negative_definite);
  }
  SUBCASE("cusp(5) and tangent line: chain (-3,-2,-3)") {
    auto g = sandwiched_graph(oracle::bundled_germ("cusp5-line"));
    CHECK(trees_isomorphic(g.tree, oracle::chain({-3, -2, -3})));
    auto m = marking(oracle::bundled_germ("cusp5-line"));
    CHECK(m.pieces == std::vector<std::string>{"q2", "q1"});
  }
  SUBCASE("cusp(6) and tangent line: star with centre -2") {
    auto g = sandwiched_graph(oracle::bundled_germ("cusp-line"));
    CHECK(trees_isomorphic(g.tree, oracle::star(-2, {{-3}, {-3}, {-2}})));
  }
  SUBCASE("six lines marking hits the arm ends") {
    auto germ = oracle::bundled_germ("six-lines");
    auto m = marking(germ);
    auto g = sandwiched_graph(germ);
    for (std::size_t i = 0; i < 6; ++i) {
      auto v = *g.tree.find(m.pieces[i]);
      CHECK(g.tree.valence(v) == 1);
      CHECK(g.tree.weight(v) == -2);
      CHECK(m.pieces[i] == "L" + std::to_string(i + 1) + ".4");
    }
  }
}

TEST_CASE("degenerate configurations") {
  auto two = oracle::bundled_germ("two-lines");
  CHECK(error_kind([&] { sandwiched_graph(two.with_decorations({1, 1})); }) == "EmptyGraph");
  CHECK(error_kind([&] { marking(two.with_decorations({1, 1})); }) == "EmptyGraph");
  auto g = sandwiched_graph(two);
  REQUIRE(g.tree.size() == 1);
  CHECK(g.tree.weight(0) == -3);

  auto one = sandwiched_graph(oracle::bundled_germ("one-line-l2"));
  REQUIRE(one.tree.size() == 1);
  CHECK(one.tree.weight(0) == -2);

}

TEST_CASE("exceptional graph agrees with the lattice of total transforms") {
  std::mt19937_64 rng(7);
  int connected = 0;
  for (int trial = 0; trial < 300; ++trial) {
    auto germ = oracle::random_germ(rng, 9, 4);
    CAPTURE(serialize_germ(germ));
    ExtendedCluster ext = [&] {
      try {
        return extend_cluster(germ);
      } catch (const Error& e) {
        // Only a truncation can fail; give the germ its full chain sums instead.
        REQUIRE(e.kind() == "DecorationTooSmall");
        std::vector<int> l;
        for (std::size_t i = 0; i < germ.branch_count(); ++i) {
          auto m = germ.multiplicities(i);
          l.push_back(std::accumulate(m.begin(), m.end(), 0) + 1);
        }
        germ = germ.with_decorations(l);
        return extend_cluster(germ);
      }
    }();
    for (std::size_t i = 0; i < germ.branch_count(); ++i)
      CHECK(std::accumulate(ext.multiplicities[i].begin(), ext.multiplicities[i].end(), 0) == germ.decoration(i));

    auto g = exceptional_graph(ext);
    auto form = strict_transform_form(ext.cluster);
    for (std::size_t a = 0; a < g.tree.size(); ++a) {
      auto pa = g.point_of[a];
      CHECK(g.tree.weight(a) == form[pa][pa]);
      for (std::size_t b = 0; b < g.tree.size(); ++b) {
        if (a == b) continue;
        auto pb = g.point_of[b];
        bool adjacent = std::find(g.tree.neighbors(a).begin(), g.tree.neighbors(a).end(), b) !=
                        g.tree.neighbors(a).end();
        CHECK(form[pa][pb] == (adjacent ? 1 : 0));
      }
    }
    if (is_standard(germ, MRule::PlainNormalCrossings))
      for (auto e : g.attachment_vertex) CHECK(g.tree.weight(e) == -1);

    // A blow-up of a smooth point contracts to nothing.
    CHECK(reduce(g.tree).smooth());
    std::mt19937_64 order(trial);
    CHECK(reduce(g.tree, order).smooth());

    // Contracting E_i and then the appended free points recovers the graph
    // of the cluster without them.
    bool any_appended = std::find(ext.appended.begin(), ext.appended.end(), true) != ext.appended.end();
    bool truncated = false;
    for (std::size_t i = 0; i < germ.branch_count(); ++i)
      truncated |= ext.chains[i].size() < germ.branch(i).chain.size();
    if (any_appended && !truncated) {
      WeightedTree t = g.tree;
      for (std::size_t i = 0; i < germ.branch_count(); ++i)
        for (std::size_t k = ext.chains[i].size(); k-- > 0;) {
          auto p = ext.chains[i][k];
          if (!ext.appended[p]) break;
          t = blow_down_step(t, *t.find(ext.cluster.id(p)));
        }
      std::vector<int> base_l;
      for (std::size_t i = 0; i < germ.branch_count(); ++i) {
        auto m = germ.multiplicities(i);
        base_l.push_back(std::accumulate(m.begin(), m.end(), 0));
      }
      auto base = exceptional_graph(extend_cluster(germ.with_decorations(base_l))).tree;
      CHECK(weights_by_label(t) == weights_by_label(base));
      CHECK(edges_by_label(t) == edges_by_label(base));
    }

    if (is_standard(germ) && g.ecl_vertices().empty()) {
      CHECK(error_kind([&] { sandwiched_graph(germ); }) == "EmptyGraph");
    } else if (is_standard(germ)) {
      auto s = sandwiched_graph(germ);
      CHECK(s.connected);
      CHECK(s.negative_definite);
      auto m = marking(germ);
      for (std::size_t i = 0; i < germ.branch_count(); ++i) {
        auto e = g.attachment_vertex[i];
        int inside = 0;
        for (auto w : g.tree.neighbors(e)) inside += g.in_ecl[w] ? 1 : 0;
        CHECK(inside == 1);
        CHECK(s.tree.find(m.pieces[i]).has_value());
      }
      ++connected;
    }
  }
  CHECK(connected > 50);
}
