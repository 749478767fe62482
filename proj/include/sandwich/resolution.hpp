#pragma once

// The blow-up process dictated by a decorated germ (C, l): the extended
// cluster, the dual graph of the full exceptional divisor, the sandwiched
// configuration E(C, l) and the marking of its pieces.

#include <cstddef>
#include <string>
#include <vector>

#include "sandwich/germ.hpp"
#include "sandwich/plumbing.hpp"

namespace sandwich {

/// Blow-up centres of (C, l): each branch chain truncated or prolonged by free
/// simple points so that its multiplicities add up to exactly l_i.
struct ExtendedCluster {
  ProximityCluster cluster;
  std::vector<std::vector<std::size_t>> chains;  // per branch, indices into `cluster`
  std::vector<std::vector<int>> multiplicities;  // per branch, along its chain
  std::vector<std::size_t> attachment;           // last centre of each chain
  std::vector<bool> appended;                    // per point: added free point
};

/// Throws Error("DecorationTooSmall") when no prefix of a chain sums to l_i.
ExtendedCluster extend_cluster(const DecoratedGerm& germ);

struct ExceptionalGraph {
  /// One vertex F(P) per centre P, in canonical order; labelled by point id.
  WeightedTree tree;
  std::vector<std::size_t> point_of;           // vertex -> centre in the extended cluster
  std::vector<bool> in_ecl;                    // vertex belongs to E(C, l)
  std::vector<std::size_t> attachment_vertex;  // E_i per branch

  GraphDocument document() const;
  /// Vertices of E(C, l) in canonical order.
  std::vector<std::size_t> ecl_vertices() const;
};

/// weight F(P) = -1 - #{Q proximate to P}; F(P) -- F(Q) iff Q is proximate
/// to P and no third centre is proximate to both.
ExceptionalGraph exceptional_graph(const ExtendedCluster& ext);

struct SandwichedGraph {
  WeightedTree tree;
  bool connected = false;
  bool negative_definite = false;
};

/// E(C, l) alone. Throws Error("EmptyGraph") when every exceptional curve
/// meets the strict transform (X(C, l) is a smooth point) and
/// Error("NotConnected") when the configuration falls apart.
SandwichedGraph sandwiched_graph(const DecoratedGerm& germ);

/// Branch i -> the piece F_i of E(C, l) meeting E_i (vertex label).
struct Marking {
  std::vector<std::string> pieces;
};

/// Throws Error("AmbiguousAttachment") when some E_i does not have exactly
/// one neighbour in E(C, l).
Marking marking(const DecoratedGerm& germ);

}  // namespace sandwich
