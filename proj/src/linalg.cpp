#include "sandwich/linalg.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace sandwich {

std::vector<Integer> leading_principal_minors(Matrix<Integer> a) {
  const std::size_t n = a.size();
  std::vector<Integer> minors;
  Integer previous = 1;
  for (std::size_t k = 0; k < n; ++k) {
    if (a[k].size() != n) throw std::invalid_argument("leading_principal_minors: matrix is not square");
    // Invariant: a[k][k] is the (k+1)-th leading principal minor.
    minors.push_back(a[k][k]);
    if (a[k][k] == 0) break;
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) a[i][j] = (a[k][k] * a[i][j] - a[i][k] * a[k][j]) / previous;
      a[i][k] = 0;
    }
    previous = a[k][k];
  }
  return minors;
}

bool is_positive_definite(const Matrix<Integer>& a) {
  auto minors = leading_principal_minors(a);
  if (minors.size() != a.size()) return false;
  return std::all_of(minors.begin(), minors.end(), [](const Integer& m) { return m > 0; });
}

Integer determinant(Matrix<Integer> a) {
  const std::size_t n = a.size();
  if (n == 0) return 1;
  Integer previous = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a[k][k] == 0) {
      std::size_t swap_row = k + 1;
      while (swap_row < n && a[swap_row][k] == 0) ++swap_row;
      if (swap_row == n) return 0;
      std::swap(a[k], a[swap_row]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) a[i][j] = (a[k][k] * a[i][j] - a[i][k] * a[k][j]) / previous;
      a[i][k] = 0;
    }
    previous = a[k][k];
  }
  return sign * a[n - 1][n - 1];
}

std::vector<std::size_t> row_reduce(Matrix<Rational>& a) {
  std::vector<std::size_t> pivots;
  if (a.empty()) return pivots;
  const std::size_t rows = a.size(), cols = a[0].size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && a[p][c] == 0) ++p;
    if (p == rows) continue;
    std::swap(a[r], a[p]);
    Rational inv = 1 / a[r][c];
    for (auto& x : a[r]) x *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || a[i][c] == 0) continue;
      Rational f = a[i][c];
      for (std::size_t j = c; j < cols; ++j) a[i][j] -= f * a[r][j];
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

std::size_t rank(Matrix<Rational> a) { return row_reduce(a).size(); }

std::vector<std::vector<Rational>> nullspace(Matrix<Rational> a, std::size_t cols) {
  auto pivots = row_reduce(a);
  std::vector<bool> is_pivot(cols, false);
  for (auto c : pivots) is_pivot[c] = true;
  std::vector<std::vector<Rational>> basis;
  for (std::size_t free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    std::vector<Rational> v(cols, Rational(0));
    v[free] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -a[r][free];
    basis.push_back(std::move(v));
  }
  return basis;
}

Matrix<Integer> hermite_normal_form(Matrix<Integer> rows) {
  if (rows.empty()) return rows;
  const std::size_t cols = rows[0].size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows.size(); ++c) {
    // Euclid on column c among rows r.. until a single non-zero remains.
    while (true) {
      std::size_t best = rows.size();
      for (std::size_t i = r; i < rows.size(); ++i)
        if (rows[i][c] != 0 && (best == rows.size() || abs(rows[i][c]) < abs(rows[best][c]))) best = i;
      if (best == rows.size()) break;
      std::swap(rows[r], rows[best]);
      bool done = true;
      for (std::size_t i = r + 1; i < rows.size(); ++i) {
        if (rows[i][c] == 0) continue;
        Integer q = rows[i][c] / rows[r][c];
        for (std::size_t j = c; j < cols; ++j) rows[i][j] -= q * rows[r][j];
        if (rows[i][c] != 0) done = false;
      }
      if (done) break;
    }
    if (rows[r][c] == 0) continue;
    if (rows[r][c] < 0)
      for (auto& x : rows[r]) x = -x;
    for (std::size_t i = 0; i < r; ++i) {
      // Reduce entries above the pivot into [0, pivot).
      Integer q = rows[i][c] / rows[r][c];
      if (rows[i][c] - q * rows[r][c] < 0) q -= 1;
      if (q != 0)
        for (std::size_t j = c; j < cols; ++j) rows[i][j] -= q * rows[r][j];
    }
    ++r;
  }
  rows.resize(r);
  return rows;
}

Matrix<Integer> integer_kernel(const Matrix<Integer>& a, std::size_t cols) {
  // Column reduction A U = [H | 0] with U unimodular; the columns of U that
  // end up opposite zero columns span the kernel over Z.
  Matrix<Integer> work = a;
  Matrix<Integer> u(cols, std::vector<Integer>(cols, 0));
  for (std::size_t i = 0; i < cols; ++i) u[i][i] = 1;
  auto column_op = [&](std::size_t dst, std::size_t src, const Integer& q) {  // col dst -= q col src
    for (auto& row : work) row[dst] -= q * row[src];
    for (auto& row : u) row[dst] -= q * row[src];
  };
  auto column_swap = [&](std::size_t x, std::size_t y) {
    for (auto& row : work) std::swap(row[x], row[y]);
    for (auto& row : u) std::swap(row[x], row[y]);
  };
  std::size_t pivot_col = 0;
  for (std::size_t i = 0; i < work.size() && pivot_col < cols; ++i) {
    while (true) {
      std::size_t best = cols;
      for (std::size_t j = pivot_col; j < cols; ++j)
        if (work[i][j] != 0 && (best == cols || abs(work[i][j]) < abs(work[i][best]))) best = j;
      if (best == cols) break;
      column_swap(pivot_col, best);
      bool done = true;
      for (std::size_t j = pivot_col + 1; j < cols; ++j) {
        if (work[i][j] == 0) continue;
        column_op(j, pivot_col, work[i][j] / work[i][pivot_col]);
        if (work[i][j] != 0) done = false;
      }
      if (done) {
        ++pivot_col;
        break;
      }
    }
  }
  Matrix<Integer> kernel;
  for (std::size_t j = pivot_col; j < cols; ++j) {
    std::vector<Integer> v(cols);
    for (std::size_t k = 0; k < cols; ++k) v[k] = u[k][j];
    kernel.push_back(std::move(v));
  }
  return hermite_normal_form(std::move(kernel));
}

}  // namespace sandwich
