#pragma once

// Combinatorial model of decorated plane-curve germs: proximity clusters of
// infinitely near points, branches given as root paths through the cluster,
// and the numerical invariants derived from them.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sandwich {

struct PointRecord {
  std::string id;
  std::optional<std::string> parent;
  std::optional<std::string> satellite_target;
};

struct ClusterViolation {
  std::string kind;  // CyclicParentage, MultipleRoots, BadSatelliteTarget, ...
  std::string point_id;
  std::string message;
};

struct ClusterVerdict {
  std::vector<ClusterViolation> violations;
  bool ok() const { return violations.empty(); }
};

/// Checks the Enriques consistency of a raw list of point records. Every
/// violation is reported, each with the offending point id.
ClusterVerdict validate_cluster(std::span<const PointRecord> points);

/// A validated rooted tree of infinitely near points. A point Q is proximate
/// to its parent and, when present, to its satellite target.
class ProximityCluster {
 public:
  /// Throws Error with the kind of the first violation found.
  explicit ProximityCluster(std::vector<PointRecord> points);

  std::size_t size() const { return records_.size(); }
  std::size_t root() const { return root_; }
  const std::string& id(std::size_t p) const { return records_[p].id; }
  const std::vector<PointRecord>& records() const { return records_; }

  std::optional<std::size_t> parent(std::size_t p) const;
  std::optional<std::size_t> satellite_target(std::size_t p) const;
  const std::vector<std::size_t>& children(std::size_t p) const { return children_[p]; }
  std::size_t depth(std::size_t p) const { return depth_[p]; }
  bool is_satellite(std::size_t p) const { return satellite_[p] != kNone; }

  /// True iff q is proximate to p.
  bool is_proximate(std::size_t q, std::size_t p) const;
  /// Points proximate to p, in index order.
  std::vector<std::size_t> proximate_to(std::size_t p) const;

  std::optional<std::size_t> find(std::string_view id) const;
  /// Throws Error("UnknownPoint") when absent.
  std::size_t index_of(std::string_view id) const;

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  std::vector<PointRecord> records_;
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> satellite_;
  std::vector<std::vector<std::size_t>> children_;
  std::vector<std::size_t> depth_;
  std::size_t root_ = 0;
};

/// Multiplicities of the branch running along `chain` (a root path), by the
/// backward proximity recursion: the last point has multiplicity 1 and every
/// earlier point carries the sum over the later chain points proximate to it.
/// Throws Error("InvalidChain") if `chain` is not a root path.
std::vector<int> chain_multiplicities(const ProximityCluster& cluster,
                                      std::span<const std::size_t> chain);

struct Branch {
  std::string name;
  std::vector<std::size_t> chain;
};

struct BranchSpec {
  std::string name;
  std::vector<std::string> chain;
  long long l = 0;
};

/// Raw content of a germ file, before validation.
struct GermRecords {
  std::vector<PointRecord> points;
  std::vector<BranchSpec> branches;
};

/// A germ (C, l): cluster, numbered branches and decoration lengths.
/// Construction validates everything; instances are immutable.
class DecoratedGerm {
 public:
  DecoratedGerm(ProximityCluster cluster, std::vector<Branch> branches, std::vector<int> l);

  static DecoratedGerm from_records(const GermRecords& records);

  const ProximityCluster& cluster() const { return cluster_; }
  std::size_t branch_count() const { return branches_.size(); }
  const Branch& branch(std::size_t i) const { return branches_.at(i); }
  int decoration(std::size_t i) const { return l_.at(i); }
  const std::vector<int>& decorations() const { return l_; }

  /// Multiplicity of branch i at each point of its chain.
  const std::vector<int>& multiplicities(std::size_t i) const { return mult_.at(i); }
  /// m_P(C_i); zero when P is not on the chain of branch i.
  int multiplicity_at(std::size_t i, std::size_t point) const;
  /// m_P(C) = sum over branches.
  int curve_multiplicity_at(std::size_t point) const;
  /// Indices of the branches whose chains contain `point`.
  std::vector<std::size_t> branches_through(std::size_t point) const;

  /// Same curve, new decoration vector (re-validated).
  DecoratedGerm with_decorations(std::vector<int> l) const;

 private:
  ProximityCluster cluster_;
  std::vector<Branch> branches_;
  std::vector<int> l_;
  std::vector<std::vector<int>> mult_;
  std::vector<std::vector<int>> mult_by_point_;  // [branch][point]
};

enum class MRule {
  PaperCalibrated,       // embedded chain extended by a free point after a satellite centre
  PlainNormalCrossings,  // literal minimal normal-crossings resolution
};

std::string to_string(MRule rule);
/// Accepts "paper-calibrated" and "plain-nc".
MRule parse_m_rule(std::string_view text);

// Branch indices below are 0-based; text output numbers branches from 1.

std::vector<int> branch_multiplicities(const DecoratedGerm& germ, std::size_t i);
int delta_branch(const DecoratedGerm& germ, std::size_t i);
/// Sum over all cluster points of m_P(C)(m_P(C)-1)/2. Cross-checked against
/// sum of branch deltas plus pairwise intersections; a mismatch throws.
int delta_curve(const DecoratedGerm& germ);
/// Noether sum over the shared prefix of the two chains.
int pairwise_intersection(const DecoratedGerm& germ, std::size_t i, std::size_t k);
/// m(i): multiplicities summed over the points blown up by the minimal
/// abstract resolution (points where C has multiplicity >= 2).
int total_multiplicity(const DecoratedGerm& germ, std::size_t i);
/// M(i): multiplicities summed over the chain of branch i inside the minimal
/// embedded resolution, adjusted according to `rule`.
int embedded_total_multiplicity(const DecoratedGerm& germ, std::size_t i, MRule rule);
/// Points blown up by the minimal embedded resolution, in index order.
std::vector<std::size_t> embedded_resolution_points(const DecoratedGerm& germ);
bool is_standard(const DecoratedGerm& germ, MRule rule = MRule::PaperCalibrated);

struct GermInvariants {
  std::vector<int> delta;       // per branch
  std::vector<int> m;           // total multiplicities m(i)
  std::vector<int> big_m;       // embedded total multiplicities M(i)
  std::vector<std::vector<int>> intersections;  // symmetric, diagonal 0
  int delta_curve = 0;
  bool standard = false;
};

GermInvariants compute_invariants(const DecoratedGerm& germ, MRule rule);

/// Canonical preorder of the cluster points. `labels[p]` is an extra invariant
/// attached to point p (e.g. the branches through it); children are visited in
/// order of their canonical subtree keys.
std::vector<std::size_t> canonical_point_order(const ProximityCluster& cluster,
                                               const std::vector<std::string>& labels);

/// Relabelling-invariant text form of (cluster, branch numbering, l).
std::string canonical_form(const DecoratedGerm& germ);

struct Equivalence {
  bool equivalent = false;
  /// Point id of A -> point id of B, when equivalent.
  std::vector<std::pair<std::string, std::string>> point_map;
};

Equivalence are_topologically_equivalent(const DecoratedGerm& a, const DecoratedGerm& b);

GermRecords parse_germ_records(std::string_view text);
DecoratedGerm parse_germ(std::string_view text);
/// Germ text format with points in canonical DFS order.
std::string serialize_germ(const DecoratedGerm& germ);

}  // namespace sandwich
