#pragma once

// Semi-tensor-product algebra over logical and exact-rational matrices.
//
// Index conventions: CanonicalVector::index and LogicalMatrix column entries
// are 1-based, matching the delta_d^i notation. RationalMatrix element access
// is 0-based.

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "bcn/rational.hpp"

namespace bcn {

/// delta_dim^index: the index-th column of I_dim.
class CanonicalVector {
 public:
  CanonicalVector(std::size_t dim, std::size_t index);

  std::size_t dim() const { return dim_; }
  std::size_t index() const { return index_; }

  friend bool operator==(const CanonicalVector&, const CanonicalVector&) = default;

 private:
  std::size_t dim_;
  std::size_t index_;
};

/// Bits X_1..X_n, each 0 or 1.
struct BitVector {
  std::vector<std::uint8_t> bits;

  std::size_t size() const { return bits.size(); }
  friend bool operator==(const BitVector&, const BitVector&) = default;
};

class RationalMatrix {
 public:
  RationalMatrix() = default;
  RationalMatrix(std::size_t rows, std::size_t cols);
  RationalMatrix(std::size_t rows, std::size_t cols, std::vector<Rational> row_major);

  static RationalMatrix identity(std::size_t d);
  static RationalMatrix column(std::span<const Rational> entries);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Rational& at(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Rational& at(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  RationalMatrix transpose() const;
  bool is_nonnegative() const;
  bool is_column_stochastic() const;

  friend RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b);
  friend bool operator==(const RationalMatrix& a, const RationalMatrix& b);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rational> data_;
};

/// Column-canonical 0/1 matrix stored as its column-index sequence.
class LogicalMatrix {
 public:
  LogicalMatrix() = default;
  LogicalMatrix(std::size_t rows, std::vector<std::size_t> col_index);

  static LogicalMatrix identity(std::size_t d);
  static LogicalMatrix from_vector(const CanonicalVector& v);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return col_index_.size(); }

  /// Row index (1-based) of the single 1 in column j (1-based).
  std::size_t column(std::size_t j) const { return col_index_[j - 1]; }
  std::span<const std::size_t> col_index() const { return col_index_; }

  CanonicalVector apply(const CanonicalVector& x) const;
  RationalMatrix densify() const;

  /// Renders as "delta_rows[c1,c2,...]".
  std::string to_string() const;

  friend bool operator==(const LogicalMatrix&, const LogicalMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::vector<std::size_t> col_index_;
};

/// Shorthand for delta_rows[cols...].
LogicalMatrix delta(std::size_t rows, std::initializer_list<std::size_t> cols);

/// Dense densification of a canonical vector (dim x 1).
RationalMatrix densify(const CanonicalVector& v);

/// Recovers a logical matrix from a dense one; DimensionError if some column
/// is not canonical.
LogicalMatrix to_logical(const RationalMatrix& m);

RationalMatrix kron(const RationalMatrix& a, const RationalMatrix& b);
LogicalMatrix kron(const LogicalMatrix& a, const LogicalMatrix& b);
CanonicalVector kron(const CanonicalVector& a, const CanonicalVector& b);

/// (A kron I_{l/a.cols}) (B kron I_{l/b.rows}) with l = lcm(a.cols, b.rows).
RationalMatrix stp(const RationalMatrix& a, const RationalMatrix& b);

/// Logical fast path of stp, pure index arithmetic.
LogicalMatrix stp(const LogicalMatrix& a, const LogicalMatrix& b);

/// W_[m,n]: W (u kron v) = v kron u for u in Delta_m, v in Delta_n.
LogicalMatrix swap_matrix(std::size_t m, std::size_t n);

/// Phi_d: d^2 x d with Phi x = x kron x for canonical x.
LogicalMatrix power_reducing_matrix(std::size_t d);

/// index = 1 + sum_i (1 - X_i) 2^{n-i}; X_1 is the outermost factor.
CanonicalVector encode_state(const BitVector& x);
BitVector decode_state(const CanonicalVector& x, std::size_t n);

/// Structure matrix (2 x 2^n) of a scalar Boolean function given by its outputs
/// in encoded-input order.
LogicalMatrix structure_matrix(std::span<const std::uint8_t> truth_table);

/// Transposition of positions k and d (identity when k == d). Involutive.
LogicalMatrix equilibrium_permutation(std::size_t k, std::size_t d);

/// Upper bound on dense entries any single operation may allocate.
inline constexpr std::size_t kMaxDenseEntries = std::size_t{1} << 26;

/// Upper bound on logical-matrix columns (2^kMaxLogicalBits).
inline constexpr std::size_t kMaxLogicalBits = 28;

}  // namespace bcn
