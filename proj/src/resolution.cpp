#include "sandwich/resolution.hpp"

#include <algorithm>
#include <set>

#include "sandwich/error.hpp"
#include "text_util.hpp"

namespace sandwich {

ExtendedCluster extend_cluster(const DecoratedGerm& germ) {
  const auto& base = germ.cluster();
  const std::size_t r = germ.branch_count();

  // Per-branch prefix length and number of appended points.
  std::vector<std::size_t> keep(r);
  std::vector<int> extra(r, 0);
  for (std::size_t i = 0; i < r; ++i) {
    const auto& mult = germ.multiplicities(i);
    int target = germ.decoration(i);
    int sum = 0;
    std::size_t k = 0;
    while (k < mult.size() && sum < target) sum += mult[k++];
    if (sum < target) {
      keep[i] = mult.size();
      extra[i] = target - sum;
    } else if (sum == target) {
      keep[i] = k;
    } else {
      throw Error("DecorationTooSmall", "no prefix of the chain of branch '" + germ.branch(i).name +
                                            "' has multiplicity sum " + std::to_string(target));
    }
  }

  std::vector<bool> used(base.size(), false);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t k = 0; k < keep[i]; ++k) used[germ.branch(i).chain[k]] = true;

  std::vector<PointRecord> records;
  std::set<std::string> ids;
  for (std::size_t p = 0; p < base.size(); ++p)
    if (used[p]) {
      records.push_back(base.records()[p]);
      ids.insert(base.id(p));
    }
  std::vector<std::vector<std::string>> chain_ids(r);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t k = 0; k < keep[i]; ++k) chain_ids[i].push_back(base.id(germ.branch(i).chain[k]));
    for (int j = 0; j < extra[i]; ++j) {
      std::string id = germ.branch(i).name + "." + std::to_string(chain_ids[i].size() + 1);
      while (ids.count(id)) id += "'";
      ids.insert(id);
      records.push_back({id, chain_ids[i].back(), std::nullopt});
      chain_ids[i].push_back(id);
    }
  }
  const std::size_t base_count = std::count(used.begin(), used.end(), true);

  ExtendedCluster ext{ProximityCluster(std::move(records)), {}, {}, {}, {}};
  ext.appended.assign(ext.cluster.size(), false);
  for (std::size_t p = base_count; p < ext.cluster.size(); ++p) ext.appended[p] = true;
  for (std::size_t i = 0; i < r; ++i) {
    std::vector<std::size_t> chain;
    for (const auto& id : chain_ids[i]) chain.push_back(ext.cluster.index_of(id));
    // Multiplicities are those of the actual branch, i.e. of the full chain;
    // appended free points do not change them.
    std::vector<int> mult(germ.multiplicities(i).begin(), germ.multiplicities(i).begin() + keep[i]);
    mult.insert(mult.end(), extra[i], 1);
    ext.attachment.push_back(chain.back());
    ext.chains.push_back(std::move(chain));
    ext.multiplicities.push_back(std::move(mult));
  }
  return ext;
}

ExceptionalGraph exceptional_graph(const ExtendedCluster& ext) {
  const auto& cl = ext.cluster;
  const std::size_t n = cl.size();
  std::vector<std::string> labels(n);
  for (std::size_t p = 0; p < n; ++p) {
    std::vector<std::size_t> through;
    for (std::size_t i = 0; i < ext.chains.size(); ++i)
      if (std::find(ext.chains[i].begin(), ext.chains[i].end(), p) != ext.chains[i].end()) through.push_back(i + 1);
    labels[p] = detail::join(through, ",");
  }
  auto order = canonical_point_order(cl, labels);

  ExceptionalGraph g;
  std::vector<std::size_t> vertex_of(n);
  for (auto p : order) {
    int weight = -1 - static_cast<int>(cl.proximate_to(p).size());
    vertex_of[p] = g.tree.add_vertex(weight, cl.id(p));
    g.point_of.push_back(p);
  }
  for (std::size_t q = 0; q < n; ++q) {
    for (std::size_t p = 0; p < n; ++p) {
      if (p == q || !cl.is_proximate(q, p)) continue;
      bool separated = false;
      for (std::size_t s = 0; s < n && !separated; ++s)
        separated = s != p && s != q && cl.is_proximate(s, p) && cl.is_proximate(s, q);
      if (!separated) g.tree.add_edge(vertex_of[p], vertex_of[q]);
    }
  }
  // The strict transform of branch i meets F(P) with multiplicity m_P minus
  // the multiplicities at later chain centres proximate to P. This is 1 at
  // the last centre and 0 elsewhere, except after a truncation just before a
  // satellite point.
  g.in_ecl.assign(n, true);
  for (std::size_t i = 0; i < ext.chains.size(); ++i) {
    const auto& chain = ext.chains[i];
    const auto& mult = ext.multiplicities[i];
    for (std::size_t k = 0; k < chain.size(); ++k) {
      int meet = mult[k];
      for (std::size_t j = k + 1; j < chain.size(); ++j)
        if (cl.is_proximate(chain[j], chain[k])) meet -= mult[j];
      if (meet > 0) g.in_ecl[vertex_of[chain[k]]] = false;
    }
    g.attachment_vertex.push_back(vertex_of[ext.attachment[i]]);
  }
  return g;
}

GraphDocument ExceptionalGraph::document() const {
  GraphDocument doc = make_document(tree);
  doc.in_ecl = in_ecl;
  for (std::size_t i = 0; i < attachment_vertex.size(); ++i)
    doc.attach[attachment_vertex[i]].push_back(static_cast<int>(i + 1));
  return doc;
}

std::vector<std::size_t> ExceptionalGraph::ecl_vertices() const {
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < tree.size(); ++v)
    if (in_ecl[v]) out.push_back(v);
  return out;
}

SandwichedGraph sandwiched_graph(const DecoratedGerm& germ) {
  auto graph = exceptional_graph(extend_cluster(germ));
  auto keep = graph.ecl_vertices();
  if (keep.empty()) throw Error("EmptyGraph", "X(C,l) is a smooth point");
  SandwichedGraph out{graph.tree.induced(keep), false, false};
  out.connected = out.tree.connected();
  if (!out.connected) throw Error("NotConnected", "E(C,l) is disconnected; l is too small");
  out.negative_definite = is_negative_definite(out.tree);
  return out;
}

Marking marking(const DecoratedGerm& germ) {
  auto graph = exceptional_graph(extend_cluster(germ));
  if (graph.ecl_vertices().empty()) throw Error("EmptyGraph", "X(C,l) is a smooth point");
  if (!graph.tree.induced(graph.ecl_vertices()).connected())
    throw Error("NotConnected", "E(C,l) is disconnected; l is too small");
  Marking m;
  for (std::size_t i = 0; i < graph.attachment_vertex.size(); ++i) {
    auto e = graph.attachment_vertex[i];
    std::vector<std::size_t> inside;
    for (auto w : graph.tree.neighbors(e))
      if (graph.in_ecl[w]) inside.push_back(w);
    if (inside.size() != 1)
      throw Error("AmbiguousAttachment", "E_" + std::to_string(i + 1) + " meets " + std::to_string(inside.size()) +
                                             " components of E(C,l)");
    m.pieces.push_back(graph.tree.label(inside.front()));
  }
  return m;
}

}  // namespace sandwich
