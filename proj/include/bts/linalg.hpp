#pragma once

// Dense matrices over Q with exact row reduction: ranks, kernels, quotients.

#include "bts/rational.hpp"

#include <json.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bts {

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : r_(rows), c_(cols), a_(rows * cols, BigRational(0)) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }
  static Matrix from_rows(const std::vector<std::vector<BigRational>>& rows, std::size_t cols = 0) {
    Matrix m(rows.size(), rows.empty() ? cols : rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != m.c_) throw std::invalid_argument("ragged matrix rows");
      for (std::size_t j = 0; j < m.c_; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }
  /// Columns side by side; every column has `rows` entries.
  static Matrix from_columns(const std::vector<std::vector<BigRational>>& cols, std::size_t rows) {
    Matrix m(rows, cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j)
      for (std::size_t i = 0; i < rows; ++i) m(i, j) = cols[j][i];
    return m;
  }

  std::size_t rows() const { return r_; }
  std::size_t cols() const { return c_; }
  BigRational& operator()(std::size_t i, std::size_t j) { return a_[i * c_ + j]; }
  const BigRational& operator()(std::size_t i, std::size_t j) const { return a_[i * c_ + j]; }

  std::vector<BigRational> column(std::size_t j) const {
    std::vector<BigRational> v(r_);
    for (std::size_t i = 0; i < r_; ++i) v[i] = (*this)(i, j);
    return v;
  }

  Matrix transpose() const {
    Matrix t(c_, r_);
    for (std::size_t i = 0; i < r_; ++i)
      for (std::size_t j = 0; j < c_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  friend Matrix operator*(const Matrix& x, const Matrix& y) {
    if (x.c_ != y.r_) throw std::invalid_argument("matrix shapes do not compose");
    Matrix z(x.r_, y.c_);
    for (std::size_t i = 0; i < x.r_; ++i)
      for (std::size_t k = 0; k < x.c_; ++k) {
        const BigRational& a = x(i, k);
        if (a == 0) continue;
        for (std::size_t j = 0; j < y.c_; ++j) z(i, j) += a * y(k, j);
      }
    return z;
  }
  friend Matrix operator-(const Matrix& x, const Matrix& y) {
    if (x.r_ != y.r_ || x.c_ != y.c_) throw std::invalid_argument("matrix shapes differ");
    Matrix z = x;
    for (std::size_t i = 0; i < z.a_.size(); ++i) z.a_[i] -= y.a_[i];
    return z;
  }
  friend bool operator==(const Matrix& x, const Matrix& y) { return x.r_ == y.r_ && x.c_ == y.c_ && x.a_ == y.a_; }

  bool is_zero() const {
    for (const auto& x : a_)
      if (x != 0) return false;
    return true;
  }

  /// [x | y]
  Matrix hcat(const Matrix& y) const {
    if (r_ != y.r_) throw std::invalid_argument("hcat needs equal row counts");
    Matrix z(r_, c_ + y.c_);
    for (std::size_t i = 0; i < r_; ++i) {
      for (std::size_t j = 0; j < c_; ++j) z(i, j) = (*this)(i, j);
      for (std::size_t j = 0; j < y.c_; ++j) z(i, c_ + j) = y(i, j);
    }
    return z;
  }

  nlohmann::json to_json() const {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < r_; ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (std::size_t j = 0; j < c_; ++j) row.push_back((*this)(i, j).str());
      rows.push_back(row);
    }
    return rows;
  }

 private:
  std::size_t r_ = 0, c_ = 0;
  std::vector<BigRational> a_;
};

struct RowEchelon {
  Matrix reduced;
  std::vector<std::size_t> pivots;  // pivot column of each nonzero row
};

/// Reduced row echelon form.
inline RowEchelon rref(Matrix m) {
  RowEchelon out;
  std::size_t row = 0;
  for (std::size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
    std::size_t piv = row;
    while (piv < m.rows() && m(piv, col) == 0) ++piv;
    if (piv == m.rows()) continue;
    for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(row, j), m(piv, j));
    BigRational inv = 1 / m(row, col);
    for (std::size_t j = 0; j < m.cols(); ++j) m(row, j) *= inv;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == row || m(i, col) == 0) continue;
      BigRational f = m(i, col);
      for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) -= f * m(row, j);
    }
    out.pivots.push_back(col);
    ++row;
  }
  out.reduced = std::move(m);
  return out;
}

inline std::size_t rank(const Matrix& m) { return rref(m).pivots.size(); }

/// Basis of {x : m x = 0} as the columns of an (m.cols() x k) matrix.
inline Matrix nullspace(const Matrix& m) {
  RowEchelon e = rref(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto c : e.pivots) is_pivot[c] = true;
  std::vector<std::vector<BigRational>> basis;
  for (std::size_t free = 0; free < m.cols(); ++free) {
    if (is_pivot[free]) continue;
    std::vector<BigRational> v(m.cols(), BigRational(0));
    v[free] = 1;
    for (std::size_t r = 0; r < e.pivots.size(); ++r) v[e.pivots[r]] = -e.reduced(r, free);
    basis.push_back(std::move(v));
  }
  return Matrix::from_columns(basis, m.cols());
}

/// Some x with a x = b, if one exists.
inline std::optional<Matrix> solve(const Matrix& a, const Matrix& b) {
  RowEchelon e = rref(a.hcat(b));
  Matrix x(a.cols(), b.cols());
  for (std::size_t r = 0; r < e.pivots.size(); ++r) {
    if (e.pivots[r] >= a.cols()) return std::nullopt;  // a pivot in b: inconsistent
    for (std::size_t j = 0; j < b.cols(); ++j) x(e.pivots[r], j) = e.reduced(r, a.cols() + j);
  }
  return x;
}

/// V / W for V = Q^n and W spanned by the columns of `span`: the projection is a
/// basis of the annihilator of W (so ker proj = W), and section is a right inverse.
struct Quotient {
  Matrix proj;     // dim x n
  Matrix section;  // n x dim, proj * section = 1

  std::size_t dim() const { return proj.rows(); }
  std::size_t ambient() const { return proj.cols(); }
};

inline Quotient quotient(const Matrix& span, std::size_t n) {
  if (span.cols() > 0 && span.rows() != n) throw std::invalid_argument("spanning vectors have the wrong length");
  Matrix proj = span.cols() == 0 ? Matrix::identity(n) : nullspace(span.transpose()).transpose();
  if (proj.rows() == 0) return {Matrix(0, n), Matrix(n, 0)};
  auto sec = solve(proj, Matrix::identity(proj.rows()));
  if (!sec) throw std::logic_error("annihilator basis is not of full rank");
  return {proj, *sec};
}

/// The map V/W -> V'/W' induced by f: V -> V'; nullopt when f(W) is not inside W'.
inline std::optional<Matrix> induced_map(const Quotient& from, const Quotient& to, const Matrix& f) {
  // f(W) in W'  iff  proj' f kills ker proj, i.e. proj' f = (proj' f section) proj
  Matrix m = to.proj * f * from.section;
  if (!(m * from.proj == to.proj * f)) return std::nullopt;
  return m;
}

}  // namespace bts
