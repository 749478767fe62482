#pragma once

// Exact integer and rational linear algebra on small dense matrices.

#include <cstddef>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace sandwich {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

template <typename T>
using Matrix = std::vector<std::vector<T>>;

/// Leading principal minors det(A[0..k, 0..k]) for k = 1..n, by fraction-free
/// Bareiss elimination without pivoting. Stops early (returning the minors so
/// far, the last one being zero) when a minor vanishes.
std::vector<Integer> leading_principal_minors(Matrix<Integer> a);

/// Sylvester criterion on a symmetric integer matrix.
bool is_positive_definite(const Matrix<Integer>& a);

Integer determinant(Matrix<Integer> a);

/// Reduced row echelon form in place; returns the pivot columns.
std::vector<std::size_t> row_reduce(Matrix<Rational>& a);

std::size_t rank(Matrix<Rational> a);

/// Basis of {x : A x = 0} over Q, one vector per free column of the RREF.
/// `cols` is needed when A has no rows.
std::vector<std::vector<Rational>> nullspace(Matrix<Rational> a, std::size_t cols);

/// Z-basis of the integer kernel {v in Z^n : A v = 0}, returned as rows in
/// Hermite normal form (deterministic for a given A).
Matrix<Integer> integer_kernel(const Matrix<Integer>& a, std::size_t cols);

/// Row Hermite normal form of an integer matrix (zero rows dropped).
Matrix<Integer> hermite_normal_form(Matrix<Integer> rows);

}  // namespace sandwich
