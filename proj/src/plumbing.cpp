#include "sandwich/plumbing.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <numeric>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "sandwich/error.hpp"
#include "sandwich/linalg.hpp"
#include "text_util.hpp"

namespace sandwich {

OutputFormat parse_output_format(std::string_view text) {
  if (text == "text") return OutputFormat::Text;
  if (text == "json") return OutputFormat::Json;
  throw Error("UnknownFormat", "expected 'text' or 'json', got '" + std::string(text) + "'");
}

std::string to_string(OutputFormat format) { return format == OutputFormat::Text ? "text" : "json"; }

// ---------------------------------------------------------------------------
// WeightedTree

std::size_t WeightedTree::add_vertex(int weight, std::string label) {
  std::size_t v = weights_.size();
  if (label.empty()) label = "v" + std::to_string(v);
  if (find(label)) throw Error("DuplicateId", "vertex '" + label + "' declared twice");
  weights_.push_back(weight);
  labels_.push_back(std::move(label));
  adjacency_.emplace_back();
  return v;
}

void WeightedTree::add_edge(std::size_t a, std::size_t b) {
  if (a >= size() || b >= size()) throw std::out_of_range("WeightedTree::add_edge");
  if (a == b) throw Error("NotATree", "self-loop at '" + labels_[a] + "'");
  // Reject the edge when b is already reachable from a.
  std::vector<bool> seen(size(), false);
  std::vector<std::size_t> stack{a};
  seen[a] = true;
  while (!stack.empty()) {
    auto v = stack.back();
    stack.pop_back();
    if (v == b) throw Error("NotATree", "edge " + labels_[a] + " -- " + labels_[b] + " closes a cycle");
    for (auto w : adjacency_[v])
      if (!seen[w]) {
        seen[w] = true;
        stack.push_back(w);
      }
  }
  adjacency_[a].push_back(b);
  adjacency_[b].push_back(a);
}

std::vector<std::pair<std::size_t, std::size_t>> WeightedTree::edges() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t a = 0; a < size(); ++a)
    for (auto b : adjacency_[a])
      if (a < b) out.emplace_back(a, b);
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<std::size_t> WeightedTree::find(std::string_view label) const {
  for (std::size_t v = 0; v < labels_.size(); ++v)
    if (labels_[v] == label) return v;
  return std::nullopt;
}

bool WeightedTree::connected() const {
  if (empty()) return true;
  std::vector<bool> seen(size(), false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  std::size_t count = 1;
  while (!stack.empty()) {
    auto v = stack.back();
    stack.pop_back();
    for (auto w : adjacency_[v])
      if (!seen[w]) {
        seen[w] = true;
        ++count;
        stack.push_back(w);
      }
  }
  return count == size();
}

WeightedTree WeightedTree::induced(const std::vector<std::size_t>& keep) const {
  WeightedTree out;
  std::vector<std::size_t> position(size(), static_cast<std::size_t>(-1));
  for (auto v : keep) position[v] = out.add_vertex(weights_.at(v), labels_.at(v));
  for (auto [a, b] : edges())
    if (position[a] != static_cast<std::size_t>(-1) && position[b] != static_cast<std::size_t>(-1))
      out.add_edge(position[a], position[b]);
  return out;
}

// ---------------------------------------------------------------------------
// Blow-downs

bool is_contractible(const WeightedTree& tree, std::size_t v) {
  return tree.weight(v) == -1 && tree.valence(v) <= 2;
}

WeightedTree blow_down_step(const WeightedTree& tree, std::size_t v) {
  if (v >= tree.size()) throw std::out_of_range("blow_down_step");
  if (!is_contractible(tree, v))
    throw Error("NotContractible", "vertex '" + tree.label(v) + "' has weight " + std::to_string(tree.weight(v)) +
                                       " and valence " + std::to_string(tree.valence(v)));
  std::vector<std::size_t> keep;
  for (std::size_t u = 0; u < tree.size(); ++u)
    if (u != v) keep.push_back(u);
  WeightedTree out = tree.induced(keep);
  std::vector<std::size_t> nbrs;
  for (auto u : tree.neighbors(v)) {
    auto pos = *out.find(tree.label(u));
    out.set_weight(pos, out.weight(pos) + 1);
    nbrs.push_back(pos);
  }
  if (nbrs.size() == 2) out.add_edge(nbrs[0], nbrs[1]);
  return out;
}

namespace {

ReduceResult reduce_with(const WeightedTree& tree,
                         const std::function<std::size_t(const std::vector<std::size_t>&)>& choose) {
  ReduceResult result{tree, {}};
  while (true) {
    std::vector<std::size_t> eligible;
    for (std::size_t v = 0; v < result.normal_form.size(); ++v)
      if (is_contractible(result.normal_form, v)) eligible.push_back(v);
    if (eligible.empty()) break;
    auto v = choose(eligible);
    result.trace.push_back(result.normal_form.label(v));
    result.normal_form = blow_down_step(result.normal_form, v);
  }
  return result;
}

Matrix<Integer> negated_intersection_matrix(const WeightedTree& tree) {
  Matrix<Integer> m(tree.size(), std::vector<Integer>(tree.size(), 0));
  for (std::size_t v = 0; v < tree.size(); ++v) m[v][v] = -tree.weight(v);
  for (auto [a, b] : tree.edges()) m[a][b] = m[b][a] = -1;
  return m;
}

}  // namespace

ReduceResult reduce(const WeightedTree& tree) {
  return reduce_with(tree, [](const std::vector<std::size_t>& e) { return e.front(); });
}

ReduceResult reduce(const WeightedTree& tree, std::mt19937_64& rng) {
  return reduce_with(tree, [&](const std::vector<std::size_t>& e) { return e[rng() % e.size()]; });
}

bool is_negative_definite(const WeightedTree& tree) {
  return is_positive_definite(negated_intersection_matrix(tree));
}

// ---------------------------------------------------------------------------
// Sandwiched recognition

std::string leaf_label(const std::string& host, int j) { return host + "+" + std::to_string(j); }

bool verify_certificate(const WeightedTree& tree, const Certificate& certificate) {
  WeightedTree work = tree;
  try {
    for (const auto& [host, count] : certificate.additions) {
      auto h = work.find(host);
      if (!h || count < 0) return false;
      for (int j = 1; j <= count; ++j) {
        auto leaf = work.add_vertex(-1, leaf_label(host, j));
        work.add_edge(*h, leaf);
      }
    }
    for (const auto& label : certificate.contractions) {
      auto v = work.find(label);
      if (!v || !is_contractible(work, *v)) return false;
      work = blow_down_step(work, *v);
    }
  } catch (const Error&) {
    return false;
  }
  return work.empty();
}

std::string to_string(Recognition::Status status) {
  switch (status) {
    case Recognition::Status::Sandwiched: return "sandwiched";
    case Recognition::Status::NotSandwiched: return "not-sandwiched";
    case Recognition::Status::Unknown: return "unknown";
  }
  return "unknown";
}

Recognition recognize_sandwiched(const WeightedTree& tree, const RecognizeOptions& options) {
  for (std::size_t v = 0; v < tree.size(); ++v)
    if (tree.weight(v) >= 0)
      throw Error("NonRationalWeight", "vertex '" + tree.label(v) + "' has weight " + std::to_string(tree.weight(v)));
  if (!tree.connected()) throw Error("NotATree", "graph is disconnected");
  if (!is_negative_definite(tree)) throw Error("NotNegativeDefinite", "intersection form is not negative definite");

  Recognition result;
  const std::size_t n = tree.size();
  bool complete = true;
  for (std::size_t v = 0; v < n; ++v) {
    int useful = -tree.weight(v) - 1;
    int cap = options.max_extra ? *options.max_extra : -tree.weight(v);
    if (cap < useful) complete = false;
    result.bounds.push_back(std::max(0, std::min(cap, useful)));
  }
  std::vector<int> suffix(n + 1, 0);
  for (std::size_t v = n; v-- > 0;) suffix[v] = suffix[v + 1] + result.bounds[v];

  // With k_v leaves on v, contracting the leaves first just adds k_v to the
  // weight of v; smoothness of the extension is smoothness of that tree.
  auto smooth_with = [&](const std::vector<int>& extra) {
    WeightedTree modified = tree;
    for (std::size_t v = 0; v < n; ++v) modified.set_weight(v, tree.weight(v) + extra[v]);
    return reduce(modified).smooth();
  };

  const unsigned jobs = std::max(1u, options.jobs);
  constexpr std::size_t kChunk = 4096;
  std::optional<std::vector<int>> found;

  for (int total = 0; total <= suffix[0] && !found; ++total) {
    std::vector<std::vector<int>> chunk;
    std::vector<int> current(n, 0);
    bool stop = false;

    auto flush = [&]() {
      if (chunk.empty() || stop) return;
      std::atomic<std::size_t> best{chunk.size()};
      auto worker = [&](unsigned id) {
        for (std::size_t k = id; k < chunk.size(); k += jobs) {
          if (k >= best.load()) break;
          if (smooth_with(chunk[k])) {
            std::size_t prev = best.load();
            while (k < prev && !best.compare_exchange_weak(prev, k)) {
            }
            break;
          }
        }
      };
      if (jobs == 1) {
        worker(0);
      } else {
        std::vector<std::thread> pool;
        for (unsigned id = 0; id < jobs; ++id) pool.emplace_back(worker, id);
        for (auto& t : pool) t.join();
      }
      result.candidates += std::min(best.load() + 1, chunk.size());
      if (best.load() < chunk.size()) {
        found = chunk[best.load()];
        stop = true;
      }
      chunk.clear();
    };

    std::function<void(std::size_t, int)> generate = [&](std::size_t pos, int remaining) {
      if (stop) return;
      if (pos == n) {
        if (remaining == 0) {
          chunk.push_back(current);
          if (chunk.size() == kChunk) flush();
        }
        return;
      }
      int hi = std::min(result.bounds[pos], remaining);
      int lo = std::max(0, remaining - suffix[pos + 1]);
      for (int k = lo; k <= hi && !stop; ++k) {
        current[pos] = k;
        generate(pos + 1, remaining - k);
      }
      current[pos] = 0;
    };
    generate(0, total);
    flush();
  }

  if (!found) {
    result.status = complete ? Recognition::Status::NotSandwiched : Recognition::Status::Unknown;
    return result;
  }

  Certificate cert;
  WeightedTree modified = tree;
  for (std::size_t v = 0; v < n; ++v) {
    int k = (*found)[v];
    if (k == 0) continue;
    cert.additions.emplace_back(tree.label(v), k);
    for (int j = 1; j <= k; ++j) cert.contractions.push_back(leaf_label(tree.label(v), j));
    modified.set_weight(v, tree.weight(v) + k);
  }
  auto tail = reduce(modified).trace;
  cert.contractions.insert(cert.contractions.end(), tail.begin(), tail.end());
  if (!verify_certificate(tree, cert)) throw std::logic_error("recognize_sandwiched: certificate does not replay");
  result.status = Recognition::Status::Sandwiched;
  result.certificate = std::move(cert);
  return result;
}

// ---------------------------------------------------------------------------
// Canonical forms

namespace {

std::vector<std::size_t> centroids(const WeightedTree& tree) {
  const std::size_t n = tree.size();
  std::vector<std::size_t> parent(n, n), order;
  order.reserve(n);
  std::vector<std::size_t> stack{0};
  parent[0] = 0;
  while (!stack.empty()) {
    auto v = stack.back();
    stack.pop_back();
    order.push_back(v);
    for (auto w : tree.neighbors(v))
      if (parent[w] == n) {
        parent[w] = v;
        stack.push_back(w);
      }
  }
  std::vector<std::size_t> subtree(n, 1);
  for (auto it = order.rbegin(); it != order.rend(); ++it)
    if (*it != 0) subtree[parent[*it]] += subtree[*it];
  std::vector<std::size_t> best;
  std::size_t best_size = n + 1;
  for (std::size_t v = 0; v < n; ++v) {
    std::size_t largest = n - subtree[v];
    for (auto w : tree.neighbors(v))
      if (parent[w] == v && w != 0) largest = std::max(largest, subtree[w]);
    if (largest < best_size) {
      best_size = largest;
      best = {v};
    } else if (largest == best_size) {
      best.push_back(v);
    }
  }
  return best;
}

std::string rooted_code(const WeightedTree& tree, std::size_t v, std::size_t from,
                        std::vector<std::pair<std::string, std::size_t>>* children_out = nullptr) {
  std::vector<std::pair<std::string, std::size_t>> kids;
  for (auto w : tree.neighbors(v))
    if (w != from) kids.emplace_back(rooted_code(tree, w, v), w);
  std::sort(kids.begin(), kids.end());
  std::string code = "(" + std::to_string(tree.weight(v));
  for (const auto& k : kids) code += k.first;
  code += ")";
  if (children_out) *children_out = std::move(kids);
  return code;
}

std::size_t canonical_root(const WeightedTree& tree) {
  auto cs = centroids(tree);
  std::size_t root = cs.front();
  std::string best = rooted_code(tree, root, root);
  for (std::size_t k = 1; k < cs.size(); ++k) {
    auto code = rooted_code(tree, cs[k], cs[k]);
    if (code < best) {
      best = code;
      root = cs[k];
    }
  }
  return root;
}

}  // namespace

std::string canonical_tree_form(const WeightedTree& tree) {
  if (tree.empty()) return "()";
  auto root = canonical_root(tree);
  return rooted_code(tree, root, root);
}

std::vector<std::size_t> canonical_tree_order(const WeightedTree& tree) {
  std::vector<std::size_t> order;
  if (tree.empty()) return order;
  std::function<void(std::size_t, std::size_t)> visit = [&](std::size_t v, std::size_t from) {
    order.push_back(v);
    std::vector<std::pair<std::string, std::size_t>> kids;
    rooted_code(tree, v, from, &kids);
    for (const auto& k : kids) visit(k.second, v);
  };
  auto root = canonical_root(tree);
  visit(root, root);
  return order;
}

bool trees_isomorphic(const WeightedTree& a, const WeightedTree& b) {
  return a.size() == b.size() && canonical_tree_form(a) == canonical_tree_form(b);
}

// ---------------------------------------------------------------------------
// Graph text / JSON format

GraphDocument make_document(WeightedTree tree) {
  GraphDocument doc{std::move(tree), {}, {}};
  doc.in_ecl.assign(doc.tree.size(), false);
  doc.attach.assign(doc.tree.size(), {});
  return doc;
}

namespace {

GraphDocument parse_graph_json(const std::vector<std::string_view>& lines) {
  GraphDocument doc;
  std::vector<std::pair<std::string, std::string>> pending_edges;
  std::vector<std::size_t> edge_lines;
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    auto line = lines[ln];
    if (detail::tokenize(line).empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(ln + 1, e.byte, "invalid JSON");
    }
    try {
      auto type = obj.at("type").get<std::string>();
      if (type == "vertex") {
        doc.tree.add_vertex(obj.at("weight").get<int>(), obj.at("id").get<std::string>());
        doc.in_ecl.push_back(obj.value("in_ecl", false));
        doc.attach.push_back(obj.value("attach", std::vector<int>{}));
      } else if (type == "edge") {
        pending_edges.emplace_back(obj.at("a").get<std::string>(), obj.at("b").get<std::string>());
        edge_lines.push_back(ln + 1);
      } else if (type != "summary") {  // summaries mirror '#' comments of the text form
        throw ParseError(ln + 1, 0, "unknown object type '" + type + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(ln + 1, 0, std::string("malformed object: ") + e.what());
    }
  }
  for (std::size_t k = 0; k < pending_edges.size(); ++k) {
    auto a = doc.tree.find(pending_edges[k].first), b = doc.tree.find(pending_edges[k].second);
    if (!a || !b) throw ParseError(edge_lines[k], 0, "edge refers to an undeclared vertex");
    doc.tree.add_edge(*a, *b);
  }
  return doc;
}

}  // namespace

GraphDocument parse_graph(std::string_view text) {
  auto lines = detail::split_lines(text);
  for (auto line : lines) {
    auto tokens = detail::tokenize(line);
    if (tokens.empty()) continue;
    if (tokens.front().text.front() == '{') return parse_graph_json(lines);
    break;
  }

  GraphDocument doc;
  struct PendingEdge {
    std::string a, b;
    std::size_t line, column;
  };
  std::vector<PendingEdge> edges;
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    const std::size_t line_no = ln + 1;
    auto tokens = detail::tokenize(detail::strip_comment(lines[ln]));
    if (tokens.empty()) continue;
    if (tokens[0].text == "vertex") {
      if (tokens.size() < 3) throw ParseError(line_no, tokens[0].column, "vertex needs an id and weight=");
      if (!detail::valid_identifier(tokens[1].text)) throw ParseError(line_no, tokens[1].column, "invalid vertex id");
      std::optional<long long> weight;
      bool ecl = false;
      std::vector<int> attach;
      for (std::size_t t = 2; t < tokens.size(); ++t) {
        auto tok = tokens[t].text;
        if (tok == "in-ecl" || tok == "in-ecl,") {
          ecl = true;
        } else if (tok.starts_with("weight=")) {
          weight = detail::parse_integer(tok.substr(7));
          if (!weight || *weight < -1'000'000 || *weight > 1'000'000)
            throw ParseError(line_no, tokens[t].column + 7, "weight must be an integer");
        } else if (tok.starts_with("attach=")) {
          for (auto part : detail::split(tok.substr(7), ',')) {
            auto b = detail::parse_integer(part);
            if (!b || *b < 1) throw ParseError(line_no, tokens[t].column + 7, "attach expects branch numbers");
            attach.push_back(static_cast<int>(*b));
          }
        } else {
          throw ParseError(line_no, tokens[t].column, "unexpected token '" + std::string(tok) + "'");
        }
      }
      if (!weight) throw ParseError(line_no, 0, "vertex without weight=");
      doc.tree.add_vertex(static_cast<int>(*weight), std::string(tokens[1].text));
      doc.in_ecl.push_back(ecl);
      doc.attach.push_back(std::move(attach));
    } else if (tokens[0].text == "edge") {
      if (tokens.size() != 3) throw ParseError(line_no, tokens[0].column, "edge needs exactly two vertex ids");
      edges.push_back({std::string(tokens[1].text), std::string(tokens[2].text), line_no, tokens[1].column});
    } else {
      throw ParseError(line_no, tokens[0].column, "unknown declaration '" + std::string(tokens[0].text) + "'");
    }
  }
  for (const auto& e : edges) {
    auto a = doc.tree.find(e.a), b = doc.tree.find(e.b);
    if (!a || !b) throw ParseError(e.line, e.column, "edge refers to an undeclared vertex");
    doc.tree.add_edge(*a, *b);
  }
  return doc;
}

std::string render_graph(const GraphDocument& doc, OutputFormat format, std::vector<std::size_t> order) {
  const auto& tree = doc.tree;
  if (order.empty()) {
    order.resize(tree.size());
    std::iota(order.begin(), order.end(), 0);
  }
  std::vector<std::size_t> position(tree.size());
  for (std::size_t k = 0; k < order.size(); ++k) position[order[k]] = k;
  auto edges = tree.edges();
  for (auto& [a, b] : edges)
    if (position[a] > position[b]) std::swap(a, b);
  std::sort(edges.begin(), edges.end(), [&](const auto& x, const auto& y) {
    return std::pair(position[x.first], position[x.second]) < std::pair(position[y.first], position[y.second]);
  });

  std::ostringstream out;
  for (auto v : order) {
    bool ecl = v < doc.in_ecl.size() && doc.in_ecl[v];
    std::vector<int> attach = v < doc.attach.size() ? doc.attach[v] : std::vector<int>{};
    if (format == OutputFormat::Json) {
      nlohmann::json obj = {{"type", "vertex"}, {"id", tree.label(v)}, {"weight", tree.weight(v)},
                            {"in_ecl", ecl}, {"attach", attach}};
      out << obj.dump() << '\n';
    } else {
      out << "vertex " << tree.label(v) << " weight=" << tree.weight(v);
      if (ecl) out << " in-ecl";
      if (!attach.empty()) out << " attach=" << detail::join(attach, ",");
      out << '\n';
    }
  }
  for (auto [a, b] : edges) {
    if (format == OutputFormat::Json) {
      nlohmann::json obj = {{"type", "edge"}, {"a", tree.label(a)}, {"b", tree.label(b)}};
      out << obj.dump() << '\n';
    } else {
      out << "edge " << tree.label(a) << ' ' << tree.label(b) << '\n';
    }
  }
  return out.str();
}

}  // namespace sandwich
