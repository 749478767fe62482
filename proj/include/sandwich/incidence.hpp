#pragma once

// Incidence matrices of picture deformations: the three constraint
// equations, a column-permutation normal form, exhaustive orderly
// enumeration and a realizability oracle for translated line arrangements.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sandwich/format.hpp"
#include "sandwich/germ.hpp"
#include "sandwich/linalg.hpp"

namespace sandwich {

struct ConstraintSet {
  std::size_t r = 0;
  std::vector<int> delta;           // delta_i
  std::vector<int> l;               // l_i
  std::vector<std::vector<int>> x;  // C_i . C_k, symmetric, diagonal unused (0)
};

ConstraintSet constraints_of(const DecoratedGerm& germ);

/// r x n matrix of non-negative integers, stored column by column.
class IncidenceMatrix {
 public:
  IncidenceMatrix() = default;
  IncidenceMatrix(std::size_t rows, std::vector<std::vector<int>> columns);
  static IncidenceMatrix from_rows(const std::vector<std::vector<int>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return columns_.size(); }
  int at(std::size_t i, std::size_t j) const { return columns_.at(j).at(i); }
  const std::vector<std::vector<int>>& columns() const { return columns_; }
  std::vector<std::vector<int>> to_rows() const;

  auto operator<=>(const IncidenceMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::vector<std::vector<int>> columns_;
};

struct MatrixViolation {
  enum class Equation { Delta, Intersection, RowSum };
  Equation equation;
  std::size_t i = 0;
  std::size_t k = 0;  // second row for Intersection
  long long expected = 0;
  long long actual = 0;

  std::string describe() const;
};

struct MatrixVerdict {
  std::vector<MatrixViolation> violations;
  bool ok() const { return violations.empty(); }
};

/// Exact check of the three equations. Throws Error("DimensionMismatch"),
/// Error("ZeroColumn") or Error("NegativeEntry") for malformed matrices.
MatrixVerdict validate_matrix(const IncidenceMatrix& m, const ConstraintSet& cs);

/// Columns sorted in non-increasing lexicographic order.
IncidenceMatrix canonicalize(const IncidenceMatrix& m);

/// Every solution of the constraint equations without zero columns, once per
/// column-permutation class, in sorted order. Columns are appended in
/// non-increasing order with residual-budget pruning; the first column is
/// distributed over `jobs` workers.
std::vector<IncidenceMatrix> enumerate_matrices(const ConstraintSet& cs, unsigned jobs = 1);

struct RealizabilityOptions {
  unsigned samples = 8;
  std::uint64_t seed = 0;
};

struct RealizabilityVerdict {
  bool realizable = false;
  std::vector<Rational> offsets;  // witness b_i when realizable
  std::size_t solution_dimension = 0;
  unsigned samples_used = 0;
  /// Upper bound on the probability that a realizable matrix is reported as
  /// not realizable (one-sided: positive answers carry an exact witness).
  double failure_bound = 0.0;
};

/// Decides whether lines y = a_i x + b_i with the given slopes can be
/// translated so that their multiple points are exactly the columns of M
/// with two or more ones. Concurrency of a column is a linear condition on b;
/// the absence of further concurrences is tested at random points of the
/// solution space with exact arithmetic.
/// Throws Error("PreconditionViolated") unless cs describes pairwise
/// transverse smooth branches (delta = 0, C_i.C_k = 1) and M is 0/1, and
/// Error("ConstraintMismatch") if M does not satisfy cs.
RealizabilityVerdict realizable_by_translated_lines(const IncidenceMatrix& m, const ConstraintSet& cs,
                                                    const std::vector<Rational>& slopes,
                                                    const RealizabilityOptions& options = {});

std::vector<IncidenceMatrix> enumerate_realizable(const ConstraintSet& cs, const std::vector<Rational>& slopes,
                                                  const RealizabilityOptions& options = {}, unsigned jobs = 1);

/// Distinct random rationals p/q, |p| <= 1000, 1 <= q <= 1000.
std::vector<Rational> random_slopes(std::size_t r, std::uint64_t seed);
/// Slopes of the six lines joining four points in general position, ordered
/// AB, AC, AD, BC, BD, CD.
std::vector<Rational> complete_quadrilateral_slopes();

/// Accepts "p/q", integers and finite decimals.
Rational parse_rational(std::string_view text);
std::vector<Rational> parse_slopes(std::string_view text);
std::string format_rational(const Rational& q);

/// Matrix text format: one row per line; matrices separated by blank lines.
std::vector<IncidenceMatrix> parse_matrix_set(std::string_view text);
std::string render_matrix(const IncidenceMatrix& m, OutputFormat format = OutputFormat::Text);
std::string render_matrix_set(const std::vector<IncidenceMatrix>& set, OutputFormat format = OutputFormat::Text);

}  // namespace sandwich
