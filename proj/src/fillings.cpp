#include "sandwich/fillings.hpp"

#include <algorithm>
#include <set>

#include "json.hpp"

#include "sandwich/error.hpp"
#include "sandwich/resolution.hpp"
#include "text_util.hpp"

namespace sandwich {

namespace {

std::string render_rows(const IntMatrix& m, std::string_view indent) {
  std::string out;
  for (const auto& row : m) out += std::string(indent) + detail::join(row, " ") + "\n";
  return out;
}

IntMatrix to_long(const Matrix<Integer>& m) {
  IntMatrix out;
  for (const auto& row : m) {
    std::vector<long long> r;
    for (const auto& v : row) r.push_back(static_cast<long long>(v));
    out.push_back(std::move(r));
  }
  return out;
}

void require_valid(const IncidenceMatrix& m, const ConstraintSet& cs, std::string_view what) {
  auto verdict = validate_matrix(m, cs);
  if (!verdict.ok())
    throw Error("ConstraintMismatch", std::string(what) + ": " + verdict.violations.front().describe());
}

}  // namespace

IntMatrix sphere_gram_closed_form(const ConstraintSet& cs) {
  IntMatrix g(cs.r, std::vector<long long>(cs.r));
  for (std::size_t i = 0; i < cs.r; ++i)
    for (std::size_t k = 0; k < cs.r; ++k)
      g[i][k] = i == k ? -(static_cast<long long>(cs.l[i]) + 2LL * cs.delta[i]) : -static_cast<long long>(cs.x[i][k]);
  return g;
}

IntMatrix sphere_gram(const DecoratedGerm& germ, const IncidenceMatrix& m) {
  auto cs = constraints_of(germ);
  require_valid(m, cs, "matrix");
  IntMatrix g(cs.r, std::vector<long long>(cs.r, 0));
  for (const auto& c : m.columns())
    for (std::size_t i = 0; i < cs.r; ++i)
      for (std::size_t k = 0; k < cs.r; ++k) g[i][k] -= static_cast<long long>(c[i]) * c[k];
  if (g != sphere_gram_closed_form(cs))
    throw Error("ConstraintMismatch", "-M M^T differs from the closed-form sphere intersections");
  return g;
}

// ---------------------------------------------------------------------------
// Cap

std::string CapDescription::render(OutputFormat format) const {
  std::string out;
  for (std::size_t i = 0; i < handles.size(); ++i) {
    const auto& h = handles[i];
    if (format == OutputFormat::Json) {
      nlohmann::ordered_json j{{"type", "handle"},
                               {"index", i + 1},
                               {"branch", h.branch},
                               {"framing", h.framing},
                               {"piece", h.piece},
                               {"piece_weight", h.piece_weight},
                               {"fiber_framing_offset", h.fiber_framing_offset}};
      out += j.dump() + "\n";
    } else {
      out += "handle " + std::to_string(i + 1) + " branch=" + h.branch + " framing=" + std::to_string(h.framing) +
             " piece=" + h.piece + " piece-weight=" + std::to_string(h.piece_weight) +
             " fiber-offset=+" + std::to_string(h.fiber_framing_offset) + "\n";
    }
  }
  return out;
}

CapDescription cap_description(const DecoratedGerm& germ, MRule rule) {
  if (!is_standard(germ, rule))
    throw Error("NotStandard", "the decoration is too short for a standard germ under the " + to_string(rule) +
                                   " rule");
  auto mark = marking(germ);
  auto graph = sandwiched_graph(germ);
  CapDescription cap;
  for (std::size_t i = 0; i < germ.branch_count(); ++i) {
    HandleRecord h;
    h.branch = germ.branch(i).name;
    h.framing = -(static_cast<long long>(germ.decoration(i)) + 2LL * delta_branch(germ, i));
    h.piece = mark.pieces.at(i);
    h.piece_weight = graph.tree.weight(*graph.tree.find(h.piece));
    cap.handles.push_back(std::move(h));
  }
  return cap;
}

long long euler_number(const IncidenceMatrix& m) {
  return 1 + static_cast<long long>(m.cols()) - static_cast<long long>(m.rows());
}

KernelLattice kernel_lattice(const IncidenceMatrix& m) {
  Matrix<Integer> a;
  for (const auto& row : m.to_rows()) a.emplace_back(row.begin(), row.end());
  KernelLattice k;
  k.basis = integer_kernel(a, m.cols());
  k.rank = k.basis.size();
  k.gram.assign(k.rank, std::vector<Integer>(k.rank, 0));
  for (std::size_t i = 0; i < k.rank; ++i)
    for (std::size_t j = 0; j < k.rank; ++j)
      for (std::size_t t = 0; t < m.cols(); ++t) k.gram[i][j] -= k.basis[i][t] * k.basis[j][t];
  return k;
}

// ---------------------------------------------------------------------------
// Classes and counts

std::string to_string(Distinction d) { return d == Distinction::SameClass ? "SameClass" : "DistinctFillings"; }

DistinctionVerdict distinguish(const DecoratedGerm& germ, const IncidenceMatrix& a, const IncidenceMatrix& b) {
  auto cs = constraints_of(germ);
  require_valid(a, cs, "first matrix");
  require_valid(b, cs, "second matrix");
  if (canonicalize(a) == canonicalize(b))
    return {Distinction::SameClass, "the matrices agree up to a permutation of columns"};
  return {Distinction::DistinctFillings,
          "the matrices differ up to permutation of columns, so the Milnor fibres are not diffeomorphic by an "
          "orientation-preserving diffeomorphism preserving the markings"};
}

std::size_t filling_lower_bound(const std::vector<GermMatrixSet>& sets) {
  for (std::size_t i = 0; i < sets.size(); ++i)
    for (std::size_t k = i + 1; k < sets.size(); ++k)
      if (!are_topologically_equivalent(sets[i].germ, sets[k].germ).equivalent)
        throw Error("NotEquivalentGerms",
                    "germs " + std::to_string(i + 1) + " and " + std::to_string(k + 1) + " have different topology");
  std::set<IncidenceMatrix> classes;
  for (const auto& s : sets) {
    auto cs = constraints_of(s.germ);
    for (const auto& m : s.matrices) {
      require_valid(m, cs, "matrix");
      classes.insert(canonicalize(m));
    }
  }
  return classes.size();
}

std::string to_string(CountKind kind) {
  return kind == CountKind::NecessaryCondition ? "necessary-condition" : "realized incidence";
}

FillingReport filling_report(const DecoratedGerm& germ, const IncidenceMatrix& m) {
  FillingReport r;
  r.gram = sphere_gram(germ, m);
  r.matrix = canonicalize(m);
  r.euler = euler_number(m);
  r.lattice = kernel_lattice(r.matrix);
  return r;
}

std::string render_reports(const DecoratedGerm& germ, const std::vector<FillingReport>& reports, CountKind kind,
                           OutputFormat format, MRule rule) {
  std::string out;
  bool json = format == OutputFormat::Json;
  if (is_standard(germ, rule)) {
    out += cap_description(germ, rule).render(format);
  } else if (json) {
    out += nlohmann::ordered_json{{"type", "cap"}, {"available", false}, {"reason", "NotStandard"}}.dump() + "\n";
  } else {
    out += "cap: unavailable (NotStandard)\n";
  }
  std::set<IncidenceMatrix> classes;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    classes.insert(r.matrix);
    auto lattice_gram = to_long(r.lattice.gram);
    if (json) {
      nlohmann::ordered_json j{{"type", "matrix"},
                               {"index", i + 1},
                               {"rows", r.matrix.to_rows()},
                               {"gram", r.gram},
                               {"euler_number", r.euler},
                               {"kernel_lattice_rank", r.lattice.rank},
                               {"kernel_lattice_gram", lattice_gram}};
      out += j.dump() + "\n";
    } else {
      out += "matrix " + std::to_string(i + 1) + "\n";
      IntMatrix rows;
      for (const auto& row : r.matrix.to_rows()) rows.emplace_back(row.begin(), row.end());
      out += render_rows(rows, "  ");
      out += "gram\n" + render_rows(r.gram, "  ");
      out += "euler number: " + std::to_string(r.euler) + "\n";
      out += "kernel lattice rank: " + std::to_string(r.lattice.rank) + "\n";
      if (r.lattice.rank > 0) out += "kernel lattice gram\n" + render_rows(lattice_gram, "  ");
    }
  }
  if (json)
    out += nlohmann::ordered_json{{"type", "count"}, {"kind", to_string(kind)}, {"classes", classes.size()}}.dump() +
           "\n";
  else
    out += to_string(kind) + " classes: " + std::to_string(classes.size()) + "\n";
  return out;
}

}  // namespace sandwich
