#include "sandwich/germ.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "sandwich/error.hpp"
#include "text_util.hpp"

namespace sandwich {

namespace {

int triangular(int m) { return m * (m - 1) / 2; }

}  // namespace

// ---------------------------------------------------------------------------
// Cluster validation

ClusterVerdict validate_cluster(std::span<const PointRecord> points) {
  ClusterVerdict verdict;
  auto report = [&](std::string kind, const std::string& id, std::string message) {
    verdict.violations.push_back({std::move(kind), id, std::move(message)});
  };

  if (points.empty()) {
    report("EmptyCluster", "", "a cluster needs a root point");
    return verdict;
  }

  std::map<std::string, std::size_t> index;
  for (std::size_t p = 0; p < points.size(); ++p) {
    if (!index.emplace(points[p].id, p).second)
      report("DuplicateId", points[p].id, "point id declared more than once");
  }

  std::vector<std::optional<std::size_t>> parent(points.size());
  std::vector<std::size_t> roots;
  for (std::size_t p = 0; p < points.size(); ++p) {
    const auto& rec = points[p];
    if (!rec.parent) {
      roots.push_back(p);
      continue;
    }
    auto it = index.find(*rec.parent);
    if (it == index.end()) {
      report("UnknownPoint", rec.id, "parent '" + *rec.parent + "' is not declared");
      continue;
    }
    parent[p] = it->second;
  }
  for (std::size_t k = 1; k < roots.size(); ++k)
    report("MultipleRoots", points[roots[k]].id,
           "second point without parent (first root is '" + points[roots[0]].id + "')");

  // A point is well-founded when following parents reaches a root.
  enum class Mark { Unknown, Visiting, Good, Bad };
  std::vector<Mark> mark(points.size(), Mark::Unknown);
  std::function<Mark(std::size_t)> resolve = [&](std::size_t p) -> Mark {
    if (mark[p] == Mark::Visiting) return Mark::Bad;
    if (mark[p] != Mark::Unknown) return mark[p];
    if (!points[p].parent) return mark[p] = Mark::Good;
    if (!parent[p]) return mark[p] = Mark::Bad;
    mark[p] = Mark::Visiting;
    Mark up = resolve(*parent[p]);
    return mark[p] = up;
  };
  for (std::size_t p = 0; p < points.size(); ++p) {
    if (resolve(p) == Mark::Bad && points[p].parent && parent[p])
      report("CyclicParentage", points[p].id, "parent links never reach a root");
  }

  for (std::size_t p = 0; p < points.size(); ++p) {
    const auto& rec = points[p];
    if (!rec.satellite_target) continue;
    const std::string& target = *rec.satellite_target;
    auto it = index.find(target);
    if (it == index.end()) {
      report("BadSatelliteTarget", rec.id, "satellite target '" + target + "' is not declared");
      continue;
    }
    if (!parent[p]) {
      report("BadSatelliteTarget", rec.id, "a point without parent cannot be satellite");
      continue;
    }
    if (mark[p] != Mark::Good) continue;  // ancestry already reported
    std::size_t par = *parent[p];
    if (it->second == par || it->second == p) {
      report("BadSatelliteTarget", rec.id, "satellite target must differ from the point and its parent");
      continue;
    }
    // The exceptional curves through the parent are those it is proximate to.
    bool allowed = false;
    if (parent[par] && *parent[par] == it->second) allowed = true;
    if (points[par].satellite_target && *points[par].satellite_target == target) allowed = true;
    if (!allowed) {
      report("BadSatelliteTarget", rec.id,
             "'" + target + "' is not a point that parent '" + points[par].id + "' is proximate to");
      continue;
    }
    // The exceptional curves of the parent and the target meet in one point.
    for (std::size_t q = 0; q < p; ++q)
      if (parent[q] == parent[p] && points[q].satellite_target == rec.satellite_target) {
        report("BadSatelliteTarget", rec.id,
               "'" + points[q].id + "' already is the satellite point of '" + points[par].id + "' on '" + target +
                   "'");
        break;
      }
  }
  return verdict;
}

// ---------------------------------------------------------------------------
// ProximityCluster

ProximityCluster::ProximityCluster(std::vector<PointRecord> points) : records_(std::move(points)) {
  auto verdict = validate_cluster(records_);
  if (!verdict.ok()) {
    const auto& v = verdict.violations.front();
    throw Error(v.kind, (v.point_id.empty() ? "" : "point '" + v.point_id + "': ") + v.message);
  }
  const std::size_t n = records_.size();
  parent_.assign(n, kNone);
  satellite_.assign(n, kNone);
  children_.assign(n, {});
  depth_.assign(n, 0);
  for (std::size_t p = 0; p < n; ++p) {
    if (records_[p].parent) {
      parent_[p] = index_of(*records_[p].parent);
      children_[parent_[p]].push_back(p);
    } else {
      root_ = p;
    }
    if (records_[p].satellite_target) satellite_[p] = index_of(*records_[p].satellite_target);
  }
  std::vector<std::size_t> stack{root_};
  while (!stack.empty()) {
    std::size_t p = stack.back();
    stack.pop_back();
    for (std::size_t c : children_[p]) {
      depth_[c] = depth_[p] + 1;
      stack.push_back(c);
    }
  }
}

std::optional<std::size_t> ProximityCluster::parent(std::size_t p) const {
  if (parent_[p] == kNone) return std::nullopt;
  return parent_[p];
}

std::optional<std::size_t> ProximityCluster::satellite_target(std::size_t p) const {
  if (satellite_[p] == kNone) return std::nullopt;
  return satellite_[p];
}

bool ProximityCluster::is_proximate(std::size_t q, std::size_t p) const {
  return (parent_[q] == p) || (satellite_[q] == p);
}

std::vector<std::size_t> ProximityCluster::proximate_to(std::size_t p) const {
  std::vector<std::size_t> out;
  for (std::size_t q = 0; q < size(); ++q)
    if (is_proximate(q, p)) out.push_back(q);
  return out;
}

std::optional<std::size_t> ProximityCluster::find(std::string_view id) const {
  for (std::size_t p = 0; p < records_.size(); ++p)
    if (records_[p].id == id) return p;
  return std::nullopt;
}

std::size_t ProximityCluster::index_of(std::string_view id) const {
  if (auto p = find(id)) return *p;
  throw Error("UnknownPoint", "no point with id '" + std::string(id) + "'");
}

// ---------------------------------------------------------------------------
// Branches and germs

std::vector<int> chain_multiplicities(const ProximityCluster& cluster,
                                      std::span<const std::size_t> chain) {
  if (chain.empty()) throw Error("InvalidChain", "empty chain");
  if (chain.front() != cluster.root())
    throw Error("InvalidChain", "chain must start at the root '" + cluster.id(cluster.root()) + "'");
  for (std::size_t k = 1; k < chain.size(); ++k) {
    auto par = cluster.parent(chain[k]);
    if (!par || *par != chain[k - 1])
      throw Error("InvalidChain", "'" + cluster.id(chain[k - 1]) + "' is not the parent of '" +
                                      cluster.id(chain[k]) + "'");
  }
  std::vector<int> mult(chain.size(), 0);
  mult.back() = 1;
  for (std::size_t k = chain.size() - 1; k-- > 0;) {
    int sum = 0;
    for (std::size_t j = k + 1; j < chain.size(); ++j)
      if (cluster.is_proximate(chain[j], chain[k])) sum += mult[j];
    mult[k] = sum;
  }
  return mult;
}

DecoratedGerm::DecoratedGerm(ProximityCluster cluster, std::vector<Branch> branches, std::vector<int> l)
    : cluster_(std::move(cluster)), branches_(std::move(branches)), l_(std::move(l)) {
  if (branches_.empty()) throw Error("EmptyGerm", "a germ needs at least one branch");
  if (l_.size() != branches_.size())
    throw Error("InvalidDecoration", "decoration vector length differs from branch count");

  std::set<std::string> names;
  for (const auto& b : branches_)
    if (!names.insert(b.name).second) throw Error("DuplicateBranchName", "branch '" + b.name + "'");

  const std::size_t n = cluster_.size();
  mult_.reserve(branches_.size());
  mult_by_point_.assign(branches_.size(), std::vector<int>(n, 0));
  for (std::size_t i = 0; i < branches_.size(); ++i) {
    mult_.push_back(chain_multiplicities(cluster_, branches_[i].chain));
    for (std::size_t k = 0; k < branches_[i].chain.size(); ++k)
      mult_by_point_[i][branches_[i].chain[k]] = mult_[i][k];
    if (l_[i] < 1)
      throw Error("InvalidDecoration", "branch '" + branches_[i].name + "' needs l >= 1");
  }

  for (std::size_t p = 0; p < n; ++p) {
    bool covered = false;
    for (const auto& row : mult_by_point_) covered = covered || row[p] > 0;
    if (!covered) throw Error("UncoveredPoint", "point '" + cluster_.id(p) + "' lies on no branch");
  }

  for (std::size_t i = 0; i < branches_.size(); ++i)
    for (std::size_t k = i + 1; k < branches_.size(); ++k)
      if (branches_[i].chain == branches_[k].chain)
        throw Error("BranchesNotSeparated",
                    "branches '" + branches_[i].name + "' and '" + branches_[k].name + "' have identical chains");

  for (std::size_t i = 0; i < branches_.size(); ++i) {
    int m = total_multiplicity(*this, i);
    if (l_[i] < m)
      throw Error("DecorationTooSmall", "branch '" + branches_[i].name + "': l = " + std::to_string(l_[i]) +
                                            " is below the total multiplicity " + std::to_string(m));
  }
}

DecoratedGerm DecoratedGerm::from_records(const GermRecords& records) {
  ProximityCluster cluster(records.points);
  std::vector<Branch> branches;
  std::vector<int> l;
  for (const auto& spec : records.branches) {
    Branch b{spec.name, {}};
    for (const auto& id : spec.chain) b.chain.push_back(cluster.index_of(id));
    branches.push_back(std::move(b));
    if (spec.l < 1 || spec.l > 1'000'000)
      throw Error("InvalidDecoration", "branch '" + spec.name + "' has l = " + std::to_string(spec.l));
    l.push_back(static_cast<int>(spec.l));
  }
  return DecoratedGerm(std::move(cluster), std::move(branches), std::move(l));
}

int DecoratedGerm::multiplicity_at(std::size_t i, std::size_t point) const {
  return mult_by_point_.at(i).at(point);
}

int DecoratedGerm::curve_multiplicity_at(std::size_t point) const {
  int sum = 0;
  for (const auto& row : mult_by_point_) sum += row.at(point);
  return sum;
}

std::vector<std::size_t> DecoratedGerm::branches_through(std::size_t point) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < mult_by_point_.size(); ++i)
    if (mult_by_point_[i].at(point) > 0) out.push_back(i);
  return out;
}

DecoratedGerm DecoratedGerm::with_decorations(std::vector<int> l) const {
  return DecoratedGerm(cluster_, branches_, std::move(l));
}

// ---------------------------------------------------------------------------
// Invariants

std::string to_string(MRule rule) {
  return rule == MRule::PaperCalibrated ? "paper-calibrated" : "plain-nc";
}

MRule parse_m_rule(std::string_view text) {
  if (text == "paper-calibrated") return MRule::PaperCalibrated;
  if (text == "plain-nc") return MRule::PlainNormalCrossings;
  throw Error("UnknownRule", "expected 'paper-calibrated' or 'plain-nc', got '" + std::string(text) + "'");
}

std::vector<int> branch_multiplicities(const DecoratedGerm& germ, std::size_t i) {
  return germ.multiplicities(i);
}

int delta_branch(const DecoratedGerm& germ, std::size_t i) {
  int sum = 0;
  for (int m : germ.multiplicities(i)) sum += triangular(m);
  return sum;
}

int pairwise_intersection(const DecoratedGerm& germ, std::size_t i, std::size_t k) {
  if (i == k) throw Error("BranchesNotSeparated", "intersection of a branch with itself");
  const auto& a = germ.branch(i).chain;
  const auto& b = germ.branch(k).chain;
  if (a == b) throw Error("BranchesNotSeparated", "identical chains");
  int sum = 0;
  for (std::size_t d = 0; d < std::min(a.size(), b.size()) && a[d] == b[d]; ++d)
    sum += germ.multiplicities(i)[d] * germ.multiplicities(k)[d];
  return sum;
}

int delta_curve(const DecoratedGerm& germ) {
  int direct = 0;
  for (std::size_t p = 0; p < germ.cluster().size(); ++p) direct += triangular(germ.curve_multiplicity_at(p));

  int split = 0;
  for (std::size_t i = 0; i < germ.branch_count(); ++i) {
    split += delta_branch(germ, i);
    for (std::size_t k = i + 1; k < germ.branch_count(); ++k) split += pairwise_intersection(germ, i, k);
  }
  if (direct != split)
    throw std::logic_error("delta mismatch: " + std::to_string(direct) + " vs " + std::to_string(split));
  return direct;
}

int total_multiplicity(const DecoratedGerm& germ, std::size_t i) {
  const auto& chain = germ.branch(i).chain;
  const auto& mult = germ.multiplicities(i);
  int sum = 0;
  for (std::size_t k = 0; k < chain.size(); ++k)
    if (germ.curve_multiplicity_at(chain[k]) >= 2) sum += mult[k];
  return sum;
}

std::vector<std::size_t> embedded_resolution_points(const DecoratedGerm& germ) {
  const auto& cl = germ.cluster();
  // A reached point is blown up unless the total transform is already a
  // normal-crossings divisor there and the strict transform is smooth.
  auto needs_blow_up = [&](std::size_t p) {
    if (germ.curve_multiplicity_at(p) >= 2) return true;
    auto through = germ.branches_through(p);
    if (through.size() != 1) return false;
    if (cl.is_satellite(p)) return true;  // two exceptional curves plus the branch
    const auto& chain = germ.branch(through.front()).chain;
    std::size_t pos = cl.depth(p);
    // Tangent to the exceptional curve through p iff the next point is satellite.
    return pos + 1 < chain.size() && cl.is_satellite(chain[pos + 1]);
  };
  std::vector<std::size_t> blown;
  std::vector<std::size_t> frontier{cl.root()};
  while (!frontier.empty()) {
    std::size_t p = frontier.back();
    frontier.pop_back();
    if (!needs_blow_up(p)) continue;
    blown.push_back(p);
    for (std::size_t c : cl.children(p)) frontier.push_back(c);
  }
  std::sort(blown.begin(), blown.end());
  return blown;
}

int embedded_total_multiplicity(const DecoratedGerm& germ, std::size_t i, MRule rule) {
  auto blown = embedded_resolution_points(germ);
  const auto& chain = germ.branch(i).chain;
  const auto& mult = germ.multiplicities(i);
  int sum = 0;
  std::optional<std::size_t> last;
  for (std::size_t k = 0; k < chain.size(); ++k) {
    if (!std::binary_search(blown.begin(), blown.end(), chain[k])) break;
    sum += mult[k];
    last = chain[k];
  }
  if (rule == MRule::PaperCalibrated && last && germ.cluster().is_satellite(*last)) {
    // One more free simple centre after a satellite one.
    sum += 1;
  }
  return sum;
}

bool is_standard(const DecoratedGerm& germ, MRule rule) {
  for (std::size_t i = 0; i < germ.branch_count(); ++i)
    if (germ.decoration(i) < embedded_total_multiplicity(germ, i, rule) + 1) return false;
  return true;
}

GermInvariants compute_invariants(const DecoratedGerm& germ, MRule rule) {
  GermInvariants inv;
  const std::size_t r = germ.branch_count();
  inv.intersections.assign(r, std::vector<int>(r, 0));
  for (std::size_t i = 0; i < r; ++i) {
    inv.delta.push_back(delta_branch(germ, i));
    inv.m.push_back(total_multiplicity(germ, i));
    inv.big_m.push_back(embedded_total_multiplicity(germ, i, rule));
    for (std::size_t k = i + 1; k < r; ++k)
      inv.intersections[i][k] = inv.intersections[k][i] = pairwise_intersection(germ, i, k);
  }
  inv.delta_curve = delta_curve(germ);
  inv.standard = is_standard(germ, rule);
  return inv;
}

// ---------------------------------------------------------------------------
// Canonical forms

std::vector<std::size_t> canonical_point_order(const ProximityCluster& cluster,
                                               const std::vector<std::string>& labels) {
  const std::size_t n = cluster.size();
  std::vector<std::size_t> by_depth(n);
  std::iota(by_depth.begin(), by_depth.end(), 0);
  std::stable_sort(by_depth.begin(), by_depth.end(),
                   [&](std::size_t a, std::size_t b) { return cluster.depth(a) > cluster.depth(b); });

  std::vector<std::string> key(n);
  std::vector<std::vector<std::size_t>> sorted_children(n);
  for (std::size_t p : by_depth) {
    auto kids = cluster.children(p);
    std::stable_sort(kids.begin(), kids.end(), [&](std::size_t a, std::size_t b) { return key[a] < key[b]; });
    std::string k = "(" + labels.at(p) + "/";
    if (auto sat = cluster.satellite_target(p)) k += std::to_string(cluster.depth(p) - cluster.depth(*sat));
    for (std::size_t c : kids) k += key[c];
    k += ")";
    key[p] = std::move(k);
    sorted_children[p] = std::move(kids);
  }

  std::vector<std::size_t> order;
  order.reserve(n);
  std::vector<std::size_t> stack{cluster.root()};
  while (!stack.empty()) {
    std::size_t p = stack.back();
    stack.pop_back();
    order.push_back(p);
    const auto& kids = sorted_children[p];
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
  }
  return order;
}

namespace {

std::vector<std::string> branch_labels(const DecoratedGerm& germ) {
  std::vector<std::string> labels(germ.cluster().size());
  for (std::size_t p = 0; p < labels.size(); ++p) {
    std::vector<std::size_t> numbers;
    for (std::size_t i : germ.branches_through(p)) numbers.push_back(i + 1);
    labels[p] = detail::join(numbers, ",");
  }
  return labels;
}

std::string render_germ(const DecoratedGerm& germ, const std::vector<std::size_t>& order,
                        const std::function<std::string(std::size_t)>& name_of, bool use_branch_names) {
  const auto& cl = germ.cluster();
  std::ostringstream out;
  for (std::size_t p : order) {
    out << "point " << name_of(p);
    if (auto par = cl.parent(p)) out << " parent=" << name_of(*par);
    if (auto sat = cl.satellite_target(p)) out << " proximate=" << name_of(*sat);
    out << '\n';
  }
  for (std::size_t i = 0; i < germ.branch_count(); ++i) {
    out << "branch " << (use_branch_names ? germ.branch(i).name : std::to_string(i + 1)) << " chain=";
    const auto& chain = germ.branch(i).chain;
    for (std::size_t k = 0; k < chain.size(); ++k) out << (k ? "," : "") << name_of(chain[k]);
    out << " l=" << germ.decoration(i) << '\n';
  }
  return out.str();
}

}  // namespace

std::string canonical_form(const DecoratedGerm& germ) {
  auto order = canonical_point_order(germ.cluster(), branch_labels(germ));
  std::vector<std::size_t> position(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) position[order[k]] = k;
  return render_germ(
      germ, order, [&](std::size_t p) { return "P" + std::to_string(position[p]); }, false);
}

Equivalence are_topologically_equivalent(const DecoratedGerm& a, const DecoratedGerm& b) {
  Equivalence result;
  if (canonical_form(a) != canonical_form(b)) return result;
  auto order_a = canonical_point_order(a.cluster(), branch_labels(a));
  auto order_b = canonical_point_order(b.cluster(), branch_labels(b));
  result.equivalent = true;
  for (std::size_t k = 0; k < order_a.size(); ++k)
    result.point_map.emplace_back(a.cluster().id(order_a[k]), b.cluster().id(order_b[k]));
  return result;
}

std::string serialize_germ(const DecoratedGerm& germ) {
  auto order = canonical_point_order(germ.cluster(), branch_labels(germ));
  return render_germ(
      germ, order, [&](std::size_t p) { return germ.cluster().id(p); }, true);
}

// ---------------------------------------------------------------------------
// Parsing

GermRecords parse_germ_records(std::string_view text) {
  GermRecords records;
  auto lines = detail::split_lines(text);
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    const std::size_t line_no = ln + 1;
    auto tokens = detail::tokenize(detail::strip_comment(lines[ln]));
    if (tokens.empty()) continue;
    auto need_id = [&](const detail::Token& t) {
      if (!detail::valid_identifier(t.text)) throw ParseError(line_no, t.column, "invalid identifier '" + std::string(t.text) + "'");
      return std::string(t.text);
    };
    if (tokens[0].text == "point") {
      if (tokens.size() < 2) throw ParseError(line_no, tokens[0].column, "point needs an id");
      PointRecord rec{need_id(tokens[1]), std::nullopt, std::nullopt};
      for (std::size_t t = 2; t < tokens.size(); ++t) {
        auto tok = tokens[t].text;
        auto eq = tok.find('=');
        if (eq == std::string_view::npos)
          throw ParseError(line_no, tokens[t].column, "expected key=value, got '" + std::string(tok) + "'");
        auto key = tok.substr(0, eq);
        detail::Token value{tok.substr(eq + 1), tokens[t].column + eq + 1};
        if (key == "parent" && !rec.parent)
          rec.parent = need_id(value);
        else if (key == "proximate" && !rec.satellite_target)
          rec.satellite_target = need_id(value);
        else
          throw ParseError(line_no, tokens[t].column, "unexpected attribute '" + std::string(key) + "'");
      }
      records.points.push_back(std::move(rec));
    } else if (tokens[0].text == "branch") {
      if (tokens.size() < 2) throw ParseError(line_no, tokens[0].column, "branch needs a name");
      BranchSpec spec{need_id(tokens[1]), {}, 0};
      bool have_chain = false, have_l = false;
      for (std::size_t t = 2; t < tokens.size(); ++t) {
        auto tok = tokens[t].text;
        auto eq = tok.find('=');
        if (eq == std::string_view::npos)
          throw ParseError(line_no, tokens[t].column, "expected key=value, got '" + std::string(tok) + "'");
        auto key = tok.substr(0, eq);
        auto value = tok.substr(eq + 1);
        std::size_t value_col = tokens[t].column + eq + 1;
        if (key == "chain" && !have_chain) {
          have_chain = true;
          std::size_t offset = 0;
          for (auto part : detail::split(value, ',')) {
            spec.chain.push_back(need_id({part, value_col + offset}));
            offset += part.size() + 1;
          }
        } else if (key == "l" && !have_l) {
          auto v = detail::parse_integer(value);
          if (!v) throw ParseError(line_no, value_col, "l must be an integer, got '" + std::string(value) + "'");
          spec.l = *v;
          have_l = true;
        } else {
          throw ParseError(line_no, tokens[t].column, "unexpected attribute '" + std::string(key) + "'");
        }
      }
      if (!have_chain) throw ParseError(line_no, 0, "branch '" + spec.name + "' has no chain=");
      if (!have_l) throw ParseError(line_no, 0, "branch '" + spec.name + "' has no l=");
      records.branches.push_back(std::move(spec));
    } else {
      throw ParseError(line_no, tokens[0].column, "unknown declaration '" + std::string(tokens[0].text) + "'");
    }
  }
  return records;
}

DecoratedGerm parse_germ(std::string_view text) { return DecoratedGerm::from_records(parse_germ_records(text)); }

}  // namespace sandwich
