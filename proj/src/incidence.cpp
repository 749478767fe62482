#include "sandwich/incidence.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"

#include "parallel.hpp"
#include "sandwich/error.hpp"
#include "text_util.hpp"

namespace sandwich {

namespace {

long long tri(long long m) { return m * (m - 1) / 2; }

void check_constraints(const ConstraintSet& cs) {
  if (cs.delta.size() != cs.r || cs.l.size() != cs.r || cs.x.size() != cs.r)
    throw Error("DimensionMismatch", "constraint vectors do not have length r");
  for (const auto& row : cs.x)
    if (row.size() != cs.r) throw Error("DimensionMismatch", "intersection matrix is not r x r");
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

ConstraintSet constraints_of(const DecoratedGerm& germ) {
  ConstraintSet cs;
  cs.r = germ.branch_count();
  cs.l = germ.decorations();
  cs.x.assign(cs.r, std::vector<int>(cs.r, 0));
  for (std::size_t i = 0; i < cs.r; ++i) {
    cs.delta.push_back(delta_branch(germ, i));
    for (std::size_t k = i + 1; k < cs.r; ++k) cs.x[i][k] = cs.x[k][i] = pairwise_intersection(germ, i, k);
  }
  return cs;
}

// ---------------------------------------------------------------------------
// IncidenceMatrix

IncidenceMatrix::IncidenceMatrix(std::size_t rows, std::vector<std::vector<int>> columns)
    : rows_(rows), columns_(std::move(columns)) {
  for (const auto& c : columns_)
    if (c.size() != rows_) throw Error("DimensionMismatch", "column of length " + std::to_string(c.size()) +
                                                                " in a matrix with " + std::to_string(rows_) + " rows");
}

IncidenceMatrix IncidenceMatrix::from_rows(const std::vector<std::vector<int>>& rows) {
  std::size_t n = rows.empty() ? 0 : rows.front().size();
  for (const auto& row : rows)
    if (row.size() != n) throw Error("DimensionMismatch", "rows of unequal length");
  std::vector<std::vector<int>> columns(n, std::vector<int>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < n; ++j) columns[j][i] = rows[i][j];
  return IncidenceMatrix(rows.size(), std::move(columns));
}

std::vector<std::vector<int>> IncidenceMatrix::to_rows() const {
  std::vector<std::vector<int>> rows(rows_, std::vector<int>(columns_.size()));
  for (std::size_t j = 0; j < columns_.size(); ++j)
    for (std::size_t i = 0; i < rows_; ++i) rows[i][j] = columns_[j][i];
  return rows;
}

std::string MatrixViolation::describe() const {
  std::string where;
  switch (equation) {
    case Equation::Delta:
      where = "delta equation, row " + std::to_string(i + 1);
      break;
    case Equation::Intersection:
      where = "intersection equation, rows " + std::to_string(i + 1) + "," + std::to_string(k + 1);
      break;
    case Equation::RowSum:
      where = "row-sum equation, row " + std::to_string(i + 1);
      break;
  }
  return where + ": expected " + std::to_string(expected) + ", got " + std::to_string(actual);
}

MatrixVerdict validate_matrix(const IncidenceMatrix& m, const ConstraintSet& cs) {
  check_constraints(cs);
  if (m.rows() != cs.r)
    throw Error("DimensionMismatch",
                "matrix has " + std::to_string(m.rows()) + " rows, germ has " + std::to_string(cs.r) + " branches");
  for (std::size_t j = 0; j < m.cols(); ++j) {
    const auto& c = m.columns()[j];
    if (std::any_of(c.begin(), c.end(), [](int v) { return v < 0; }))
      throw Error("NegativeEntry", "column " + std::to_string(j + 1) + " has a negative entry");
    if (std::all_of(c.begin(), c.end(), [](int v) { return v == 0; }))
      throw Error("ZeroColumn", "column " + std::to_string(j + 1) + " is zero");
  }
  MatrixVerdict verdict;
  using E = MatrixViolation::Equation;
  for (std::size_t i = 0; i < cs.r; ++i) {
    long long d = 0, s = 0;
    for (const auto& c : m.columns()) {
      d += tri(c[i]);
      s += c[i];
    }
    if (d != cs.delta[i]) verdict.violations.push_back({E::Delta, i, i, cs.delta[i], d});
    for (std::size_t k = i + 1; k < cs.r; ++k) {
      long long x = 0;
      for (const auto& c : m.columns()) x += static_cast<long long>(c[i]) * c[k];
      if (x != cs.x[i][k]) verdict.violations.push_back({E::Intersection, i, k, cs.x[i][k], x});
    }
    if (s != cs.l[i]) verdict.violations.push_back({E::RowSum, i, i, cs.l[i], s});
  }
  return verdict;
}

IncidenceMatrix canonicalize(const IncidenceMatrix& m) {
  auto columns = m.columns();
  std::sort(columns.begin(), columns.end(), std::greater<>());
  return IncidenceMatrix(m.rows(), std::move(columns));
}

// ---------------------------------------------------------------------------
// Orderly enumeration

namespace {

class Enumerator {
 public:
  explicit Enumerator(const ConstraintSet& cs) : cs_(cs), r_(cs.r) {
    std::vector<int> bound(r_);
    for (std::size_t i = 0; i < r_; ++i) {
      int b = 0;
      while (b + 1 <= cs.l[i] && tri(b + 1) <= cs.delta[i]) ++b;
      bound[i] = b;
    }
    // All nonzero columns within the entry bounds, non-increasing lex order.
    std::vector<int> c(r_, 0);
    std::function<void(std::size_t)> build = [&](std::size_t i) {
      if (i == r_) {
        if (std::any_of(c.begin(), c.end(), [](int v) { return v != 0; })) candidates_.push_back(c);
        return;
      }
      for (int v = bound[i]; v >= 0; --v) {
        c[i] = v;
        build(i + 1);
      }
    };
    if (r_ > 0) build(0);
    for (const auto& col : candidates_) {
      std::size_t z = 0;
      while (col[z] == 0) ++z;
      first_nonzero_.push_back(z);
    }
  }

  std::size_t candidate_count() const { return candidates_.size(); }

  /// All solutions whose first (largest) column is candidates_[first].
  std::vector<IncidenceMatrix> solutions_from(std::size_t first) const {
    State s = initial();
    std::vector<IncidenceMatrix> out;
    if (!blocked(s, first) && apply(s, first)) {
      std::vector<std::vector<int>> chosen{candidates_[first]};
      search(s, first, chosen, out);
    }
    return out;
  }

 private:
  struct State {
    std::vector<long long> l, d;
    std::vector<std::vector<long long>> x;
  };

  State initial() const {
    State s;
    for (std::size_t i = 0; i < r_; ++i) {
      s.l.push_back(cs_.l[i]);
      s.d.push_back(cs_.delta[i]);
    }
    s.x.assign(r_, std::vector<long long>(r_, 0));
    for (std::size_t i = 0; i < r_; ++i)
      for (std::size_t k = 0; k < r_; ++k) s.x[i][k] = i == k ? 0 : cs_.x[i][k];
    return s;
  }

  // Every later candidate shares the leading zeros of candidates_[idx], so
  // rows above them must already be complete.
  bool blocked(const State& s, std::size_t idx) const {
    for (std::size_t i = 0; i < first_nonzero_[idx]; ++i)
      if (s.l[i] != 0 || s.d[i] != 0) return true;
    for (std::size_t i = 0; i < first_nonzero_[idx]; ++i)
      for (std::size_t k = i + 1; k < r_; ++k)
        if (s.x[i][k] != 0) return true;
    return false;
  }

  // Subtracts the column; returns false (leaving s untouched) if it does not fit.
  bool apply(State& s, std::size_t idx) const {
    const auto& c = candidates_[idx];
    for (std::size_t i = 0; i < r_; ++i) {
      if (c[i] > s.l[i] || tri(c[i]) > s.d[i]) return false;
      for (std::size_t k = i + 1; k < r_; ++k)
        if (static_cast<long long>(c[i]) * c[k] > s.x[i][k]) return false;
    }
    for (std::size_t i = 0; i < r_; ++i) {
      s.l[i] -= c[i];
      s.d[i] -= tri(c[i]);
      for (std::size_t k = i + 1; k < r_; ++k) s.x[i][k] -= static_cast<long long>(c[i]) * c[k];
    }
    return true;
  }

  void undo(State& s, std::size_t idx) const {
    const auto& c = candidates_[idx];
    for (std::size_t i = 0; i < r_; ++i) {
      s.l[i] += c[i];
      s.d[i] += tri(c[i]);
      for (std::size_t k = i + 1; k < r_; ++k) s.x[i][k] += static_cast<long long>(c[i]) * c[k];
    }
  }

  // Remaining budgets must be achievable by the remaining row sums.
  bool promising(const State& s) const {
    for (std::size_t i = 0; i < r_; ++i) {
      if (s.d[i] > tri(s.l[i])) return false;
      for (std::size_t k = i + 1; k < r_; ++k)
        if (s.x[i][k] > s.l[i] * s.l[k]) return false;
    }
    return true;
  }

  bool done(const State& s) const {
    for (std::size_t i = 0; i < r_; ++i) {
      if (s.l[i] != 0 || s.d[i] != 0) return false;
      for (std::size_t k = i + 1; k < r_; ++k)
        if (s.x[i][k] != 0) return false;
    }
    return true;
  }

  void search(State& s, std::size_t from, std::vector<std::vector<int>>& chosen,
              std::vector<IncidenceMatrix>& out) const {
    if (!promising(s)) return;
    if (done(s)) {
      out.emplace_back(r_, chosen);
      return;
    }
    for (std::size_t idx = from; idx < candidates_.size(); ++idx) {
      if (blocked(s, idx)) break;
      if (!apply(s, idx)) continue;
      chosen.push_back(candidates_[idx]);
      search(s, idx, chosen, out);
      chosen.pop_back();
      undo(s, idx);
    }
  }

  const ConstraintSet& cs_;
  std::size_t r_;
  std::vector<std::vector<int>> candidates_;
  std::vector<std::size_t> first_nonzero_;
};

}  // namespace

std::vector<IncidenceMatrix> enumerate_matrices(const ConstraintSet& cs, unsigned jobs) {
  check_constraints(cs);
  if (cs.r == 0) return {};
  Enumerator e(cs);
  auto parts = detail::parallel_map(e.candidate_count(), jobs, [&](std::size_t i) { return e.solutions_from(i); });
  std::vector<IncidenceMatrix> out;
  for (auto& part : parts) std::move(part.begin(), part.end(), std::back_inserter(out));
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Translated lines

namespace {

// Zero iff lines y = a x + b with indices i, j, k pass through one point
// (slopes pairwise distinct).
Rational concurrency(const std::vector<Rational>& a, const std::vector<Rational>& b, std::size_t i, std::size_t j,
                     std::size_t k) {
  return a[i] * (b[j] - b[k]) + (a[j] * b[k] - a[k] * b[j]) + b[i] * (a[k] - a[j]);
}

}  // namespace

RealizabilityVerdict realizable_by_translated_lines(const IncidenceMatrix& m, const ConstraintSet& cs,
                                                    const std::vector<Rational>& slopes,
                                                    const RealizabilityOptions& options) {
  check_constraints(cs);
  const std::size_t r = cs.r;
  for (std::size_t i = 0; i < r; ++i) {
    if (cs.delta[i] != 0) throw Error("PreconditionViolated", "branch " + std::to_string(i + 1) + " is singular");
    for (std::size_t k = i + 1; k < r; ++k)
      if (cs.x[i][k] != 1)
        throw Error("PreconditionViolated",
                    "branches " + std::to_string(i + 1) + "," + std::to_string(k + 1) + " are not transverse");
  }
  if (slopes.size() != r)
    throw Error("PreconditionViolated",
                std::to_string(slopes.size()) + " slopes given for " + std::to_string(r) + " lines");
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t k = i + 1; k < r; ++k)
      if (slopes[i] == slopes[k]) throw Error("PreconditionViolated", "slopes are not distinct");
  if (!validate_matrix(m, cs).ok()) throw Error("ConstraintMismatch", "matrix does not satisfy the constraints");
  for (const auto& c : m.columns())
    for (int v : c)
      if (v > 1) throw Error("PreconditionViolated", "matrix entries must be 0 or 1");

  // Each pair of lines meets in exactly one column (C_i.C_k = 1).
  std::vector<std::vector<std::size_t>> block_of(r, std::vector<std::size_t>(r, 0));
  Matrix<Rational> conditions;
  for (std::size_t j = 0; j < m.cols(); ++j) {
    std::vector<std::size_t> lines;
    for (std::size_t i = 0; i < r; ++i)
      if (m.columns()[j][i] == 1) lines.push_back(i);
    for (std::size_t p = 0; p < lines.size(); ++p)
      for (std::size_t q = 0; q < lines.size(); ++q) block_of[lines[p]][lines[q]] = j;
    for (std::size_t t = 2; t < lines.size(); ++t) {
      std::size_t i0 = lines[0], i1 = lines[1], k = lines[t];
      std::vector<Rational> row(r, 0);
      row[i0] = slopes[k] - slopes[i1];
      row[i1] = slopes[i0] - slopes[k];
      row[k] = slopes[i1] - slopes[i0];
      conditions.push_back(std::move(row));
    }
  }

  RealizabilityVerdict verdict;
  auto basis = nullspace(conditions, r);
  verdict.solution_dimension = basis.size();

  std::size_t triples = r < 3 ? 0 : r * (r - 1) * (r - 2) / 6;
  constexpr long long kRange = 1LL << 20;
  double per_sample = static_cast<double>(triples) / static_cast<double>(2 * kRange + 1);
  verdict.failure_bound = 1.0;

  std::mt19937_64 rng(options.seed ^ fnv1a(render_matrix(canonicalize(m))));
  for (unsigned s = 0; s < std::max(1u, options.samples); ++s) {
    ++verdict.samples_used;
    verdict.failure_bound *= per_sample;
    std::vector<Rational> b(r, 0);
    for (const auto& v : basis) {
      long long coeff = static_cast<long long>(rng() % static_cast<std::uint64_t>(2 * kRange + 1)) - kRange;
      for (std::size_t i = 0; i < r; ++i) b[i] += coeff * v[i];
    }
    bool ok = true;
    for (std::size_t i = 0; i < r && ok; ++i)
      for (std::size_t j = i + 1; j < r && ok; ++j)
        for (std::size_t k = j + 1; k < r && ok; ++k) {
          bool same_block = block_of[i][j] == block_of[i][k];
          if ((concurrency(slopes, b, i, j, k) == 0) != same_block) ok = false;
        }
    if (ok) {
      verdict.realizable = true;
      verdict.offsets = std::move(b);
      verdict.failure_bound = 0.0;
      return verdict;
    }
  }
  verdict.failure_bound = std::min(1.0, verdict.failure_bound);
  return verdict;
}

std::vector<IncidenceMatrix> enumerate_realizable(const ConstraintSet& cs, const std::vector<Rational>& slopes,
                                                  const RealizabilityOptions& options, unsigned jobs) {
  auto all = enumerate_matrices(cs, jobs);
  auto flags = detail::parallel_map(all.size(), jobs, [&](std::size_t i) {
    return realizable_by_translated_lines(all[i], cs, slopes, options).realizable ? 1 : 0;
  });
  std::vector<IncidenceMatrix> out;
  for (std::size_t i = 0; i < all.size(); ++i)
    if (flags[i]) out.push_back(std::move(all[i]));
  return out;
}

std::vector<Rational> random_slopes(std::size_t r, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Rational> out;
  while (out.size() < r) {
    long long p = static_cast<long long>(rng() % 2001) - 1000;
    long long q = static_cast<long long>(rng() % 1000) + 1;
    Rational a(p, q);
    if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
  }
  return out;
}

std::vector<Rational> complete_quadrilateral_slopes() {
  const std::pair<long long, long long> pts[4] = {{0, 0}, {1, 2}, {3, 1}, {4, 5}};
  std::vector<Rational> out;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      out.emplace_back(pts[j].second - pts[i].second, pts[j].first - pts[i].first);
  return out;
}

// ---------------------------------------------------------------------------
// Text formats

Rational parse_rational(std::string_view text) {
  auto bad = [&] { return Error("InvalidRational", "cannot parse '" + std::string(text) + "' as a rational"); };
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    auto p = detail::parse_integer(text.substr(0, slash));
    auto q = detail::parse_integer(text.substr(slash + 1));
    if (!p || !q || *q <= 0 || !std::isdigit(static_cast<unsigned char>(text[slash + 1]))) throw bad();
    return Rational(Integer(*p), Integer(*q));
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view whole = text.substr(0, dot), frac = text.substr(dot + 1);
    bool negative = !whole.empty() && whole.front() == '-';
    if (frac.empty() || frac.front() == '+' || frac.front() == '-') throw bad();
    auto w = whole.empty() || whole == "-" || whole == "+" ? std::optional<long long>(0) : detail::parse_integer(whole);
    auto f = detail::parse_integer(frac);
    if (!w || !f || frac.size() > 18) throw bad();
    Integer scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    Rational value = Rational(Integer(*w)) + (negative ? -1 : 1) * Rational(Integer(*f), scale);
    return value;
  }
  auto v = detail::parse_integer(text);
  if (!v) throw bad();
  return Rational(*v);
}

std::vector<Rational> parse_slopes(std::string_view text) {
  std::vector<Rational> out;
  for (auto part : detail::split(text, ',')) out.push_back(parse_rational(detail::trim(part)));
  return out;
}

std::string format_rational(const Rational& q) {
  if (denominator(q) == 1) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

std::vector<IncidenceMatrix> parse_matrix_set(std::string_view text) {
  std::vector<IncidenceMatrix> out;
  std::vector<std::vector<int>> rows;
  std::size_t first_line = 0;
  auto flush = [&] {
    if (rows.empty()) return;
    for (const auto& row : rows)
      if (row.size() != rows.front().size())
        throw ParseError(first_line, 1, "rows of unequal length in matrix");
    out.push_back(IncidenceMatrix::from_rows(rows));
    rows.clear();
  };
  auto lines = detail::split_lines(text);
  bool json = false;
  for (auto line : lines) {
    auto toks = detail::tokenize(detail::strip_comment(line));
    if (!toks.empty()) {
      json = toks.front().text.front() == '{';
      break;
    }
  }
  for (std::size_t n = 0; n < lines.size(); ++n) {
    std::size_t lineno = n + 1;
    if (json) {
      std::string_view raw = lines[n];
      if (detail::tokenize(raw).empty()) continue;
      try {
        auto doc = nlohmann::json::parse(raw);
        if (doc.is_object() && doc.value("type", "") == "summary") continue;
        auto r = doc.at("rows").get<std::vector<std::vector<int>>>();
        for (const auto& row : r)
          if (row.size() != r.front().size()) throw ParseError(lineno, 1, "rows of unequal length in matrix");
        out.push_back(IncidenceMatrix::from_rows(r));
      } catch (const nlohmann::json::exception& e) {
        throw ParseError(lineno, 1, std::string("invalid JSON matrix: ") + e.what());
      }
      continue;
    }
    auto toks = detail::tokenize(detail::strip_comment(lines[n]));
    if (toks.empty()) {
      // Comment-only lines do not separate matrices; truly blank lines do.
      if (detail::tokenize(lines[n]).empty()) flush();
      continue;
    }
    if (rows.empty()) first_line = lineno;
    std::vector<int> row;
    for (const auto& t : toks) {
      auto v = detail::parse_integer(t.text);
      if (!v) throw ParseError(lineno, t.column, "expected an integer, got '" + std::string(t.text) + "'");
      row.push_back(static_cast<int>(*v));
    }
    rows.push_back(std::move(row));
  }
  flush();
  return out;
}

std::string render_matrix(const IncidenceMatrix& m, OutputFormat format) {
  if (format == OutputFormat::Json) return nlohmann::json{{"rows", m.to_rows()}}.dump() + "\n";
  std::string out;
  for (const auto& row : m.to_rows()) out += detail::join(row, " ") + "\n";
  return out;
}

std::string render_matrix_set(const std::vector<IncidenceMatrix>& set, OutputFormat format) {
  std::string out;
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (i > 0 && format == OutputFormat::Text) out += "\n";
    out += render_matrix(set[i], format);
  }
  return out;
}

}  // namespace sandwich
