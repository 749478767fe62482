#pragma once

// Plumbing calculus on integer-weighted trees of rational curves: blow-downs,
// smoothness, negative definiteness and sandwiched-graph recognition.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sandwich/format.hpp"

namespace sandwich {

class WeightedTree {
 public:
  /// Labels must be unique; an empty label becomes "v<index>".
  std::size_t add_vertex(int weight, std::string label = {});
  /// Throws Error("NotATree") on self-loops, repeated edges or cycles.
  void add_edge(std::size_t a, std::size_t b);

  std::size_t size() const { return weights_.size(); }
  bool empty() const { return weights_.empty(); }
  int weight(std::size_t v) const { return weights_.at(v); }
  void set_weight(std::size_t v, int w) { weights_.at(v) = w; }
  const std::string& label(std::size_t v) const { return labels_.at(v); }
  const std::vector<std::size_t>& neighbors(std::size_t v) const { return adjacency_.at(v); }
  std::size_t valence(std::size_t v) const { return adjacency_.at(v).size(); }
  /// Edges (a, b) with a < b, sorted.
  std::vector<std::pair<std::size_t, std::size_t>> edges() const;

  std::optional<std::size_t> find(std::string_view label) const;
  bool connected() const;

  /// Subgraph induced on `keep` (in that order); labels preserved.
  WeightedTree induced(const std::vector<std::size_t>& keep) const;

  friend bool operator==(const WeightedTree&, const WeightedTree&) = default;

 private:
  std::vector<int> weights_;
  std::vector<std::string> labels_;
  std::vector<std::vector<std::size_t>> adjacency_;
};

/// True when `v` can be contracted: weight -1 and valence at most 2.
bool is_contractible(const WeightedTree& tree, std::size_t v);

/// Contracts a (-1)-vertex of valence <= 2. Each neighbour gains +1, and two
/// neighbours become adjacent. Throws Error("NotContractible").
WeightedTree blow_down_step(const WeightedTree& tree, std::size_t v);

struct ReduceResult {
  WeightedTree normal_form;
  std::vector<std::string> trace;  // labels of contracted vertices, in order
  bool smooth() const { return normal_form.empty(); }
};

/// Contracts eligible vertices until none is left; the lowest index first.
ReduceResult reduce(const WeightedTree& tree);
/// Same, choosing uniformly among eligible vertices at every step.
ReduceResult reduce(const WeightedTree& tree, std::mt19937_64& rng);

/// Intersection matrix (weights on the diagonal, 1 per edge) is negative
/// definite; decided with exact leading principal minors.
bool is_negative_definite(const WeightedTree& tree);

struct Certificate {
  std::vector<std::pair<std::string, int>> additions;  // (host label, number of -1 leaves)
  std::vector<std::string> contractions;               // labels, leaves included
};

/// Label given to the j-th (1-based) added leaf on `host`.
std::string leaf_label(const std::string& host, int j);

/// Replays a certificate from scratch: adds the leaves, then contracts in the
/// recorded order. True iff every step is legal and the result is empty.
bool verify_certificate(const WeightedTree& tree, const Certificate& certificate);

struct RecognizeOptions {
  /// Uniform cap on added leaves per vertex; default |weight(v)|.
  std::optional<int> max_extra;
  unsigned jobs = 1;
};

struct Recognition {
  enum class Status { Sandwiched, NotSandwiched, Unknown };
  Status status = Status::Unknown;
  std::optional<Certificate> certificate;
  std::vector<int> bounds;  // effective per-vertex bound searched
  std::uint64_t candidates = 0;
};

std::string to_string(Recognition::Status status);

/// Bounded search for (-1)-leaf additions that make the tree blow down to
/// nothing, smallest total first and lexicographically smallest within a total.
/// A vertex can never take more than |w|-1 leaves (weights only grow under
/// blow-down and a contracted vertex has weight -1), so when every bound
/// reaches |w|-1 an unsuccessful search is a proof: NotSandwiched. Otherwise
/// failure is reported as Unknown.
/// Throws Error("NonRationalWeight") for weights >= 0 and
/// Error("NotNegativeDefinite").
Recognition recognize_sandwiched(const WeightedTree& tree, const RecognizeOptions& options = {});

/// Weight-preserving isomorphism invariant rooted at the centroid(s).
std::string canonical_tree_form(const WeightedTree& tree);
/// Vertex preorder from the canonical root with canonically sorted children.
std::vector<std::size_t> canonical_tree_order(const WeightedTree& tree);
bool trees_isomorphic(const WeightedTree& a, const WeightedTree& b);

/// A weighted tree together with the per-vertex flags of the graph format.
struct GraphDocument {
  WeightedTree tree;
  std::vector<bool> in_ecl;
  std::vector<std::vector<int>> attach;  // 1-based branch numbers per vertex
};

GraphDocument make_document(WeightedTree tree);

/// Parses the text format (or JSON lines when the first non-blank line starts
/// with '{'). Throws ParseError; cyclic input throws Error("NotATree").
GraphDocument parse_graph(std::string_view text);
/// Renders in the given vertex order (all vertices when `order` is empty).
std::string render_graph(const GraphDocument& doc, OutputFormat format, std::vector<std::size_t> order = {});

}  // namespace sandwich
