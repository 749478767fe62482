#include "sandwich/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "parallel.hpp"
#include "sandwich/error.hpp"
#include "sandwich/fillings.hpp"
#include "sandwich/incidence.hpp"
#include "sandwich/linalg.hpp"
#include "sandwich/plumbing.hpp"
#include "sandwich/resolution.hpp"
#include "text_util.hpp"

#ifndef SANDWICH_DATA_DIR
#define SANDWICH_DATA_DIR "data"
#endif

namespace sandwich {

namespace {

using ojson = nlohmann::ordered_json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("IoError", "cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("IoError", "cannot write '" + path + "'");
  out << text;
}

DecoratedGerm load_germ(const std::string& path) { return parse_germ(read_file(path)); }

std::vector<IncidenceMatrix> load_matrices(const std::vector<std::string>& paths) {
  std::vector<IncidenceMatrix> out;
  for (const auto& p : paths) {
    auto set = parse_matrix_set(read_file(p));
    out.insert(out.end(), set.begin(), set.end());
  }
  return out;
}

const std::string& require_file(const RunConfig& c, std::size_t i, const char* what) {
  if (c.files.size() <= i) throw Error("MissingArgument", std::string("missing ") + what);
  return c.files[i];
}

std::string double_text(double v) {
  std::ostringstream s;
  s << std::setprecision(3) << std::scientific << v;
  return s.str();
}

std::string rows_text(const std::vector<std::vector<int>>& m, std::string_view indent) {
  std::string out;
  for (const auto& row : m) out += std::string(indent) + detail::join(row, " ") + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// germ

std::string invariants_text(const DecoratedGerm& germ, MRule rule, OutputFormat format) {
  auto inv = compute_invariants(germ, rule);
  std::vector<std::string> names;
  for (std::size_t i = 0; i < germ.branch_count(); ++i) names.push_back(germ.branch(i).name);
  if (format == OutputFormat::Json) {
    ojson j{{"branches", names},       {"l", germ.decorations()},   {"delta", inv.delta},
            {"m", inv.m},              {"M", inv.big_m},             {"m_big_rule", to_string(rule)},
            {"intersections", inv.intersections}, {"delta_curve", inv.delta_curve}, {"standard", inv.standard}};
    return j.dump() + "\n";
  }
  std::string out;
  out += "branches: " + detail::join(names, " ") + "\n";
  out += "l: " + detail::join(germ.decorations(), " ") + "\n";
  out += "delta: " + detail::join(inv.delta, " ") + "\n";
  out += "m: " + detail::join(inv.m, " ") + "\n";
  out += "M: " + detail::join(inv.big_m, " ") + "\n";
  out += "M rule: " + to_string(rule) + "\n";
  out += "intersections:\n" + rows_text(inv.intersections, "  ");
  out += "delta(C): " + std::to_string(inv.delta_curve) + "\n";
  out += std::string("standard: ") + (inv.standard ? "true" : "false") + "\n";
  return out;
}

int germ_check(const RunConfig& c, std::ostream& out) {
  auto records = parse_germ_records(read_file(require_file(c, 0, "germ file")));
  auto verdict = validate_cluster(records.points);
  if (!verdict.ok()) {
    for (const auto& v : verdict.violations)
      out << "violation " << v.kind << " point=" << v.point_id << ": " << v.message << "\n";
    throw Error(verdict.violations.front().kind, verdict.violations.front().message);
  }
  auto germ = DecoratedGerm::from_records(records);
  if (c.format == OutputFormat::Json)
    out << ojson{{"valid", true}, {"points", germ.cluster().size()}, {"branches", germ.branch_count()}}.dump()
        << "\n";
  else
    out << "valid germ: " << germ.cluster().size() << " points, " << germ.branch_count() << " branches\n";
  return 0;
}

int germ_equivalent(const RunConfig& c, std::ostream& out) {
  auto a = load_germ(require_file(c, 0, "first germ file"));
  auto b = load_germ(require_file(c, 1, "second germ file"));
  auto eq = are_topologically_equivalent(a, b);
  if (c.format == OutputFormat::Json) {
    ojson map = ojson::object();
    for (const auto& [p, q] : eq.point_map) map[p] = q;
    out << ojson{{"equivalent", eq.equivalent}, {"point_map", map}}.dump() << "\n";
    return 0;
  }
  out << (eq.equivalent ? "equivalent" : "not equivalent") << "\n";
  for (const auto& [p, q] : eq.point_map) out << "  " << p << " -> " << q << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// resolve

std::string resolve_text(const DecoratedGerm& germ, OutputFormat format) {
  auto sandwiched = sandwiched_graph(germ);  // raises EmptyGraph / NotConnected
  auto mark = marking(germ);
  auto graph = exceptional_graph(extend_cluster(germ));
  std::string out = render_graph(graph.document(), format);
  std::size_t ecl = graph.ecl_vertices().size();
  if (format == OutputFormat::Json) {
    ojson m = ojson::object();
    for (std::size_t i = 0; i < germ.branch_count(); ++i) m[germ.branch(i).name] = mark.pieces[i];
    out += ojson{{"type", "summary"},
                 {"ecl_vertices", ecl},
                 {"connected", sandwiched.connected},
                 {"negative_definite", sandwiched.negative_definite},
                 {"marking", m}}
               .dump() +
           "\n";
    return out;
  }
  out += "# E(C,l): " + std::to_string(ecl) + " vertices, " + (sandwiched.connected ? "connected" : "disconnected") +
         ", " + (sandwiched.negative_definite ? "negative definite" : "not negative definite") + "\n";
  for (std::size_t i = 0; i < germ.branch_count(); ++i)
    out += "# marking: " + germ.branch(i).name + " -> " + mark.pieces[i] + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// graph

GraphDocument load_graph(const RunConfig& c) { return parse_graph(read_file(require_file(c, 0, "graph file"))); }

int graph_blowdown(const RunConfig& c, std::ostream& out) {
  auto doc = load_graph(c);
  auto r = reduce(doc.tree);
  if (c.format == OutputFormat::Json) {
    out << ojson{{"type", "summary"}, {"contracted", r.trace}, {"smooth", r.smooth()}}.dump() << "\n";
    out << render_graph(make_document(r.normal_form), c.format);
    return 0;
  }
  out << "# contracted: " << detail::join(r.trace, " ") << "\n";
  out << "# result: " << (r.smooth() ? "smooth point" : "minimal graph") << "\n";
  out << render_graph(make_document(r.normal_form), c.format);
  return 0;
}

int graph_definite(const RunConfig& c, std::ostream& out) {
  auto doc = load_graph(c);
  const auto& t = doc.tree;
  Matrix<Integer> neg(t.size(), std::vector<Integer>(t.size(), 0));
  for (std::size_t v = 0; v < t.size(); ++v) neg[v][v] = -t.weight(v);
  for (auto [a, b] : t.edges()) neg[a][b] = neg[b][a] = -1;
  auto minors = leading_principal_minors(neg);
  bool definite = is_negative_definite(t);
  std::vector<std::string> text;
  for (const auto& m : minors) text.push_back(m.str());
  if (c.format == OutputFormat::Json) {
    out << ojson{{"negative_definite", definite}, {"minors", text}}.dump() << "\n";
  } else {
    out << "negative definite: " << (definite ? "true" : "false") << "\n";
    out << "leading minors of -A: " << detail::join(text, " ") << "\n";
  }
  return 0;
}

int graph_recognize(const RunConfig& c, std::ostream& out) {
  auto doc = load_graph(c);
  RecognizeOptions opt;
  opt.max_extra = c.max_extra;
  opt.jobs = c.jobs;
  auto rec = recognize_sandwiched(doc.tree, opt);
  bool verified = rec.certificate && verify_certificate(doc.tree, *rec.certificate);
  if (c.format == OutputFormat::Json) {
    ojson j{{"status", to_string(rec.status)}, {"bounds", rec.bounds}, {"candidates", rec.candidates}};
    if (rec.certificate) {
      ojson adds = ojson::array();
      for (const auto& [host, n] : rec.certificate->additions) adds.push_back({{"host", host}, {"count", n}});
      j["additions"] = adds;
      j["contractions"] = rec.certificate->contractions;
      j["certificate_verified"] = verified;
    }
    out << j.dump() << "\n";
    return 0;
  }
  out << "status: " << to_string(rec.status) << "\n";
  out << "bounds: " << detail::join(rec.bounds, " ") << "\n";
  out << "candidates examined: " << rec.candidates << "\n";
  if (rec.certificate) {
    for (const auto& [host, n] : rec.certificate->additions) out << "add " << host << " " << n << "\n";
    for (const auto& label : rec.certificate->contractions) out << "contract " << label << "\n";
    out << "certificate verified: " << (verified ? "true" : "false") << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// incidence

std::vector<Rational> resolve_slopes(const RunConfig& c, std::size_t r) {
  if (!c.slopes) throw Error("MissingArgument", "--slopes is required");
  if (*c.slopes == "generic") return random_slopes(r, c.seed);
  if (*c.slopes == "quadrilateral") {
    if (r != 6) throw Error("PreconditionViolated", "quadrilateral slopes need exactly six lines");
    return complete_quadrilateral_slopes();
  }
  return parse_slopes(*c.slopes);
}

int enumerate_cmd(const RunConfig& c, std::ostream& out) {
  auto germ = load_germ(require_file(c, 0, "--germ"));
  out << render_matrix_set(enumerate_matrices(constraints_of(germ), c.jobs), c.format);
  return 0;
}

int realizable_cmd(const RunConfig& c, std::ostream& out) {
  auto germ = load_germ(require_file(c, 0, "--germ"));
  auto cs = constraints_of(germ);
  auto slopes = resolve_slopes(c, cs.r);
  RealizabilityOptions opt{c.samples, c.seed};
  bool json = c.format == OutputFormat::Json;
  if (!c.matrices.empty()) {
    auto ms = load_matrices(c.matrices);
    auto verdicts = detail::parallel_map(ms.size(), c.jobs, [&](std::size_t i) {
      return realizable_by_translated_lines(ms[i], cs, slopes, opt);
    });
    for (std::size_t i = 0; i < ms.size(); ++i) {
      const auto& v = verdicts[i];
      std::vector<std::string> offsets;
      for (const auto& b : v.offsets) offsets.push_back(format_rational(b));
      if (json) {
        ojson j{{"index", i + 1}, {"realizable", v.realizable}, {"samples", v.samples_used},
                {"solution_dimension", v.solution_dimension}};
        if (v.realizable) j["offsets"] = offsets;
        else j["failure_bound"] = double_text(v.failure_bound);
        out << j.dump() << "\n";
      } else if (v.realizable) {
        out << "matrix " << i + 1 << ": realizable, offsets " << detail::join(offsets, " ") << "\n";
      } else {
        out << "matrix " << i + 1 << ": not realizable (" << v.samples_used
            << " samples, error probability <= " << double_text(v.failure_bound) << ")\n";
      }
    }
    return 0;
  }
  auto set = enumerate_realizable(cs, slopes, opt, c.jobs);
  out << render_matrix_set(set, c.format);
  if (json)
    out << ojson{{"type", "summary"}, {"realizable_classes", set.size()}}.dump() << "\n";
  else
    out << "# realizable classes: " << set.size() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// fillings

std::vector<FillingReport> reports_for(const DecoratedGerm& germ, const std::vector<IncidenceMatrix>& ms,
                                       unsigned jobs) {
  return detail::parallel_map(ms.size(), jobs, [&](std::size_t i) { return filling_report(germ, ms[i]); });
}

int fillings_report(const RunConfig& c, std::ostream& out) {
  auto germ = load_germ(require_file(c, 0, "--germ"));
  if (c.matrices.empty()) throw Error("MissingArgument", "--matrices is required");
  auto ms = load_matrices(c.matrices);
  out << render_reports(germ, reports_for(germ, ms, c.jobs), CountKind::NecessaryCondition, c.format, c.rule);
  return 0;
}

int fillings_distinguish(const RunConfig& c, std::ostream& out) {
  auto germ = load_germ(require_file(c, 0, "--germ"));
  auto ms = load_matrices(c.matrices);
  if (ms.size() != 2) throw Error("MissingArgument", "distinguish needs exactly two matrices");
  auto v = distinguish(germ, ms[0], ms[1]);
  if (c.format == OutputFormat::Json)
    out << ojson{{"verdict", to_string(v.verdict)}, {"reason", v.reason}}.dump() << "\n";
  else
    out << to_string(v.verdict) << "\nreason: " << v.reason << "\n";
  return 0;
}

int fillings_count(const RunConfig& c, std::ostream& out) {
  if (c.files.empty()) throw Error("MissingArgument", "--germs is required");
  if (!c.matrices.empty() && c.matrices.size() != c.files.size())
    throw Error("MissingArgument", "give one --matrices file per germ, or none");
  std::vector<GermMatrixSet> sets;
  CountKind kind = c.slopes ? CountKind::Realized : CountKind::NecessaryCondition;
  for (std::size_t i = 0; i < c.files.size(); ++i) {
    auto germ = load_germ(c.files[i]);
    std::vector<IncidenceMatrix> ms;
    if (!c.matrices.empty()) {
      ms = parse_matrix_set(read_file(c.matrices[i]));
    } else {
      auto cs = constraints_of(germ);
      ms = c.slopes ? enumerate_realizable(cs, resolve_slopes(c, cs.r), {c.samples, c.seed}, c.jobs)
                    : enumerate_matrices(cs, c.jobs);
    }
    sets.push_back({std::move(germ), std::move(ms)});
  }
  auto n = filling_lower_bound(sets);
  if (c.format == OutputFormat::Json)
    out << ojson{{"kind", to_string(kind)}, {"classes", n}}.dump() << "\n";
  else
    out << to_string(kind) << " classes: " << n << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// reproductions

WeightedTree make_chain(const std::vector<int>& weights) {
  WeightedTree t;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    t.add_vertex(weights[i]);
    if (i > 0) t.add_edge(i - 1, i);
  }
  return t;
}

WeightedTree make_star(int centre, const std::vector<std::vector<int>>& legs) {
  WeightedTree t;
  auto c = t.add_vertex(centre);
  for (const auto& leg : legs) {
    auto prev = c;
    for (int w : leg) {
      auto v = t.add_vertex(w);
      t.add_edge(prev, v);
      prev = v;
    }
  }
  return t;
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

std::string germ_path(const RunConfig& c, const std::string& name) {
  return (c.data_dir.empty() ? default_data_dir() : c.data_dir) + "/germs/" + name + ".germ";
}

std::string six_lines_report(const RunConfig& c) {
  auto germ = load_germ(germ_path(c, "six-lines"));
  std::string out = "# six concurrent lines, l = 5 on every branch\n";
  out += invariants_text(germ, c.rule, OutputFormat::Text);

  auto sandwiched = sandwiched_graph(germ);
  auto expected = make_star(-7, std::vector<std::vector<int>>(6, {-2, -2, -2}));
  out += "E(C,l) is the star with centre -7 and six arms -2,-2,-2: " +
         yes_no(trees_isomorphic(sandwiched.tree, expected)) + "\n";
  out += "E(C,l) negative definite: " + yes_no(sandwiched.negative_definite) + "\n";
  out += cap_description(germ, c.rule).render();

  auto cs = constraints_of(germ);
  auto all = enumerate_matrices(cs, c.jobs);
  out += "necessary-condition classes: " + std::to_string(all.size()) + "\n";

  std::set<IncidenceMatrix> generic;
  std::vector<std::size_t> sizes;
  bool agree = true;
  for (std::uint64_t run = 0; run < 3; ++run) {
    std::uint64_t seed = c.seed + run;
    auto set = enumerate_realizable(cs, random_slopes(6, seed), {c.samples, seed}, c.jobs);
    std::set<IncidenceMatrix> s(set.begin(), set.end());
    if (run > 0 && s != generic) agree = false;
    generic.insert(s.begin(), s.end());
    out += "generic slopes, run " + std::to_string(run + 1) + ": " + std::to_string(set.size()) + " classes\n";
  }
  out += "generic runs agree: " + yes_no(agree) + "\n";

  auto special = enumerate_realizable(cs, complete_quadrilateral_slopes(), {c.samples, c.seed}, c.jobs);
  out += "complete-quadrilateral slopes: " + std::to_string(special.size()) + " classes\n";
  std::vector<IncidenceMatrix> extra;
  for (const auto& m : special)
    if (!generic.count(m)) extra.push_back(m);
  out += "classes beyond the generic runs: " + std::to_string(extra.size()) + "\n";
  for (std::size_t i = 0; i < extra.size(); ++i) {
    std::size_t multiple = 0;
    for (const auto& col : extra[i].columns())
      if (std::count(col.begin(), col.end(), 1) >= 3) ++multiple;
    out += "extra class " + std::to_string(i + 1) + " (" + std::to_string(extra[i].cols()) + " points, " +
           std::to_string(multiple) + " triple points)\n";
    out += rows_text(extra[i].to_rows(), "  ");
  }

  std::vector<IncidenceMatrix> realized(generic.begin(), generic.end());
  realized.insert(realized.end(), special.begin(), special.end());
  auto total = filling_lower_bound({{germ, realized}});
  out += "realized incidence classes: " + std::to_string(total) + "\n";
  return out;
}

std::string cusp_line_report(const RunConfig& c) {
  auto germ = load_germ(germ_path(c, "cusp-line"));
  std::string out = "# cusp (l = 6) and its tangent line (l = 3)\n";
  out += invariants_text(germ, c.rule, OutputFormat::Text);
  MRule other = c.rule == MRule::PaperCalibrated ? MRule::PlainNormalCrossings : MRule::PaperCalibrated;
  auto inv_other = compute_invariants(germ, other);
  out += "M under " + to_string(other) + ": " + detail::join(inv_other.big_m, " ") + "\n";
  out += "exceptional graph\n";
  out += resolve_text(germ, OutputFormat::Text);
  auto matrices = enumerate_matrices(constraints_of(germ), c.jobs);
  out += render_reports(germ, reports_for(germ, matrices, c.jobs), CountKind::NecessaryCondition, OutputFormat::Text,
                        c.rule);
  return out;
}

std::string fig1_report(const RunConfig& c) {
  std::string out = "# cusp and tangent line: E(C,l) for l = (5,3) and l = (6,3)\n";
  auto short_germ = load_germ(germ_path(c, "cusp5-line"));
  auto long_germ = load_germ(germ_path(c, "cusp-line"));

  auto describe = [&](const DecoratedGerm& germ) {
    std::string s;
    s += "l: " + detail::join(germ.decorations(), " ") + "\n";
    for (MRule rule : {MRule::PaperCalibrated, MRule::PlainNormalCrossings}) {
      auto inv = compute_invariants(germ, rule);
      s += "  " + to_string(rule) + ": M = " + detail::join(inv.big_m, " ") +
           ", standard: " + yes_no(inv.standard) + "\n";
    }
    auto g = sandwiched_graph(germ);
    s += "  E(C,l):\n";
    auto rendered = render_graph(make_document(g.tree), OutputFormat::Text);
    for (const auto& line : detail::split_lines(rendered))
      s += "    " + std::string(line) + "\n";
    auto rec = recognize_sandwiched(g.tree);
    bool verified = rec.certificate && verify_certificate(g.tree, *rec.certificate);
    s += "  recognition: " + to_string(rec.status) + ", certificate verified: " + yes_no(verified) + "\n";
    auto mark = marking(germ);
    for (std::size_t i = 0; i < germ.branch_count(); ++i)
      s += "  marking: " + germ.branch(i).name + " -> " + mark.pieces[i] + "\n";
    return std::pair{s, g.tree};
  };

  auto [short_text, short_tree] = describe(short_germ);
  out += short_text;
  out += "  isomorphic to the chain (-3,-2,-3): " + yes_no(trees_isomorphic(short_tree, make_chain({-3, -2, -3}))) +
         "\n";
  auto [long_text, long_tree] = describe(long_germ);
  out += long_text;
  out += "  isomorphic to the star with centre -2 and legs -3, -3, -2: " +
         yes_no(trees_isomorphic(long_tree, make_star(-2, {{-3}, {-3}, {-2}}))) + "\n";
  out += "  isomorphic to the chain (-3,-2,-3): " + yes_no(trees_isomorphic(long_tree, make_chain({-3, -2, -3}))) +
         "\n";
  out +=
      "compatibility note: the cyclic-quotient chain (-3,-2,-3) arises from l = (5,3), which is not standard under "
      "the paper-calibrated rule (M(1) = 5 needs l_1 >= 6) but is standard under plain-nc (M(1) = 4). The standard "
      "decoration l = (6,3) adds one free point on the cusp and yields a star, not a chain. Both graphs are "
      "reported; neither reading is chosen silently.\n";
  return out;
}

// ---------------------------------------------------------------------------

int reproduce_cmd(const RunConfig& c, std::ostream& out) {
  auto report = reproduction_report(c.example, c);
  auto golden = (c.data_dir.empty() ? default_data_dir() : c.data_dir) + "/golden/" + c.example + ".txt";
  out << report;
  if (c.write_golden) {
    write_file(golden, report);
    return 0;
  }
  auto expected = read_file(golden);
  if (expected == report) return 0;
  auto a = detail::split_lines(expected), b = detail::split_lines(report);
  std::size_t i = 0;
  while (i < a.size() && i < b.size() && a[i] == b[i]) ++i;
  std::string want = i < a.size() ? std::string(a[i]) : "<end of file>";
  std::string got = i < b.size() ? std::string(b[i]) : "<end of output>";
  throw Error("GoldenMismatch", "line " + std::to_string(i + 1) + ": expected '" + want + "', got '" + got + "'");
}

int dispatch(const RunConfig& c, std::ostream& out) {
  const auto& cmd = c.command;
  auto is = [&](std::initializer_list<const char*> words) {
    return std::equal(cmd.begin(), cmd.end(), words.begin(), words.end(),
                      [](const std::string& a, const char* b) { return a == b; });
  };
  if (is({"germ", "check"})) return germ_check(c, out);
  if (is({"germ", "invariants"})) {
    out << invariants_text(load_germ(require_file(c, 0, "germ file")), c.rule, c.format);
    return 0;
  }
  if (is({"germ", "equivalent"})) return germ_equivalent(c, out);
  if (is({"resolve"})) {
    out << resolve_text(load_germ(require_file(c, 0, "germ file")), c.format);
    return 0;
  }
  if (is({"graph", "blowdown"})) return graph_blowdown(c, out);
  if (is({"graph", "definite"})) return graph_definite(c, out);
  if (is({"graph", "recognize"})) return graph_recognize(c, out);
  if (is({"enumerate"})) return enumerate_cmd(c, out);
  if (is({"realizable"})) return realizable_cmd(c, out);
  if (is({"fillings", "report"})) return fillings_report(c, out);
  if (is({"fillings", "distinguish"})) return fillings_distinguish(c, out);
  if (is({"fillings", "count"})) return fillings_count(c, out);
  if (is({"reproduce"})) return reproduce_cmd(c, out);
  throw Error("UnknownCommand", "'" + detail::join(cmd, " ") + "'");
}

}  // namespace

std::string default_data_dir() {
  if (const char* env = std::getenv("SANDWICH_DATA_DIR"); env && *env) return env;
  return SANDWICH_DATA_DIR;
}

std::string reproduction_report(const std::string& name, const RunConfig& config) {
  if (name == "six-lines") return six_lines_report(config);
  if (name == "cusp-line") return cusp_line_report(config);
  if (name == "fig1-graph") return fig1_report(config);
  throw Error("UnknownExample", "'" + name + "' (expected six-lines, cusp-line or fig1-graph)");
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    if (config.jobs < 1) throw Error("InvalidArgument", "--jobs must be at least 1");
    return dispatch(config, out);
  } catch (const ParseError& e) {
    err << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return 1;
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Decorated plane-curve germs, sandwiched singularities and their picture deformations", "sandwich"};
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig c;
  std::string rule = "paper-calibrated", format = "text";
  app.add_option("--m-big-rule", rule, "Rule for M(i): paper-calibrated or plain-nc");
  app.add_option("--format", format, "Output format: text or json");
  app.add_option("--jobs", c.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--seed", c.seed, "Seed for random slopes and genericity samples");
  app.add_option("--samples", c.samples, "Genericity samples per matrix")->check(CLI::PositiveNumber);
  app.add_option("--data-dir", c.data_dir, "Directory with bundled germs and golden files");

  auto* germ = app.add_subcommand("germ", "Germ validation and invariants")->require_subcommand(1);
  auto* check = germ->add_subcommand("check", "Validate a germ file");
  check->add_option("file", c.files, "Germ file")->required();
  auto* inv = germ->add_subcommand("invariants", "delta, m, M, intersections, standardness");
  inv->add_option("file", c.files, "Germ file")->required();
  auto* eqv = germ->add_subcommand("equivalent", "Topological equivalence respecting branch numbering and l");
  eqv->add_option("files", c.files, "Two germ files")->required()->expected(2);

  auto* resolve = app.add_subcommand("resolve", "Exceptional graph and E(C,l)");
  resolve->add_option("file", c.files, "Germ file")->required();

  auto* graph = app.add_subcommand("graph", "Plumbing calculus on weighted trees")->require_subcommand(1);
  auto* bd = graph->add_subcommand("blowdown", "Contract (-1)-vertices");
  bd->add_option("file", c.files, "Graph file")->required();
  auto* def = graph->add_subcommand("definite", "Negative definiteness");
  def->add_option("file", c.files, "Graph file")->required();
  auto* rec = graph->add_subcommand("recognize", "Search for (-1)-leaves that make the tree contract to nothing");
  rec->add_option("file", c.files, "Graph file")->required();
  rec->add_option("--max-extra", c.max_extra, "Cap on added leaves per vertex")->check(CLI::NonNegativeNumber);

  auto* en = app.add_subcommand("enumerate", "All incidence matrices satisfying the constraints");
  en->add_option("--germ", c.files, "Germ file")->required()->expected(1);

  auto* re = app.add_subcommand("realizable", "Incidence matrices realized by translated lines");
  re->add_option("--germ", c.files, "Germ file")->required()->expected(1);
  re->add_option("--slopes", c.slopes, "a1,...,ar | generic | quadrilateral")->required();
  re->add_option("--matrices", c.matrices, "Judge these matrices instead of enumerating");

  auto* fl = app.add_subcommand("fillings", "Milnor-fibre data and filling counts")->require_subcommand(1);
  auto* rep = fl->add_subcommand("report", "Gram matrix, handles, Euler number, kernel lattice");
  rep->add_option("--germ", c.files, "Germ file")->required()->expected(1);
  rep->add_option("--matrices", c.matrices, "Matrix file")->required();
  auto* dis = fl->add_subcommand("distinguish", "Compare two matrices up to column permutation");
  dis->add_option("--germ", c.files, "Germ file")->required()->expected(1);
  dis->add_option("--matrices", c.matrices, "One file with two matrices, or two files")->required();
  auto* cnt = fl->add_subcommand("count", "Lower bound on the number of fillings");
  cnt->add_option("--germs", c.files, "Pairwise equivalent germ files")->required();
  cnt->add_option("--matrices", c.matrices, "One matrix file per germ (default: enumerate)");
  cnt->add_option("--slopes", c.slopes, "Count only matrices realized by translated lines");

  auto* repro = app.add_subcommand("reproduce", "Run a bundled example and compare with its golden output");
  repro->add_option("name", c.example, "six-lines | cusp-line | fig1-graph")->required();
  repro->add_flag("--write-golden", c.write_golden, "Overwrite the golden file instead of comparing");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "ParseError: " << e.what() << "\n";
    return 2;
  }

  try {
    c.rule = parse_m_rule(rule);
    c.format = parse_output_format(format);
  } catch (const Error& e) {
    err << e.what() << "\n";
    return 2;
  }
  for (const auto* sub = app.get_subcommands().front(); sub;) {
    c.command.push_back(sub->get_name());
    auto subs = sub->get_subcommands();
    sub = subs.empty() ? nullptr : subs.front();
  }
  return run(c, out, err);
}

}  // namespace sandwich
