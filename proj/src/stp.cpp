#include "bcn/stp.hpp"

#include <limits>
#include <numeric>
#include <sstream>

namespace bcn {

namespace {

std::size_t checked_mul(std::size_t a, std::size_t b, const char* what) {
  if (a != 0 && b > std::numeric_limits<std::size_t>::max() / a) {
    throw CapacityError(std::string(what) + ": dimension product overflows");
  }
  return a * b;
}

void check_dense(std::size_t rows, std::size_t cols, const char* what) {
  if (checked_mul(rows, cols, what) > kMaxDenseEntries) {
    throw CapacityError(std::string(what) + ": dense result " + std::to_string(rows) + "x" +
                        std::to_string(cols) + " exceeds the dense-entry cap");
  }
}

void check_logical(std::size_t cols, const char* what) {
  if (cols > (std::size_t{1} << kMaxLogicalBits)) {
    throw CapacityError(std::string(what) + ": logical result with " + std::to_string(cols) +
                        " columns exceeds the capacity cap");
  }
}

}  // namespace

CanonicalVector::CanonicalVector(std::size_t dim, std::size_t index) : dim_(dim), index_(index) {
  if (dim == 0 || index == 0 || index > dim) {
    throw DimensionError("canonical vector delta_" + std::to_string(dim) + "^" +
                         std::to_string(index) + " out of range");
  }
}

// ---------------------------------------------------------------------------
// RationalMatrix

RationalMatrix::RationalMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {
  check_dense(rows, cols, "RationalMatrix");
  data_.assign(rows * cols, Rational(0));
}

RationalMatrix::RationalMatrix(std::size_t rows, std::size_t cols, std::vector<Rational> row_major)
    : rows_(rows), cols_(cols), data_(std::move(row_major)) {
  if (data_.size() != checked_mul(rows, cols, "RationalMatrix")) {
    throw DimensionError("RationalMatrix: entry count does not match shape");
  }
}

RationalMatrix RationalMatrix::identity(std::size_t d) {
  RationalMatrix m(d, d);
  for (std::size_t i = 0; i < d; ++i) m.at(i, i) = 1;
  return m;
}

RationalMatrix RationalMatrix::column(std::span<const Rational> entries) {
  return RationalMatrix(entries.size(), 1, std::vector<Rational>(entries.begin(), entries.end()));
}

RationalMatrix RationalMatrix::transpose() const {
  RationalMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t.at(j, i) = at(i, j);
  return t;
}

bool RationalMatrix::is_nonnegative() const {
  for (const auto& v : data_)
    if (sgn(v) < 0) return false;
  return true;
}

bool RationalMatrix::is_column_stochastic() const {
  if (!is_nonnegative()) return false;
  for (std::size_t j = 0; j < cols_; ++j) {
    Rational sum = 0;
    for (std::size_t i = 0; i < rows_; ++i) sum += at(i, j);
    if (sum != 1) return false;
  }
  return true;
}

RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b) {
  if (a.cols_ != b.rows_) {
    throw DimensionError("matrix product: inner dimensions " + std::to_string(a.cols_) + " and " +
                         std::to_string(b.rows_) + " differ");
  }
  RationalMatrix c(a.rows_, b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i) {
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const Rational& aik = a.at(i, k);
      if (sgn(aik) == 0) continue;
      for (std::size_t j = 0; j < b.cols_; ++j) c.at(i, j) += aik * b.at(k, j);
    }
  }
  return c;
}

bool operator==(const RationalMatrix& a, const RationalMatrix& b) {
  return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
}

// ---------------------------------------------------------------------------
// LogicalMatrix

LogicalMatrix::LogicalMatrix(std::size_t rows, std::vector<std::size_t> col_index)
    : rows_(rows), col_index_(std::move(col_index)) {
  if (rows == 0 || col_index_.empty()) throw DimensionError("LogicalMatrix: empty shape");
  for (std::size_t r : col_index_) {
    if (r == 0 || r > rows) {
      throw DimensionError("LogicalMatrix: column entry " + std::to_string(r) +
                           " outside [1, " + std::to_string(rows) + "]");
    }
  }
}

LogicalMatrix LogicalMatrix::identity(std::size_t d) {
  std::vector<std::size_t> cols(d);
  std::iota(cols.begin(), cols.end(), std::size_t{1});
  return LogicalMatrix(d, std::move(cols));
}

LogicalMatrix LogicalMatrix::from_vector(const CanonicalVector& v) {
  return LogicalMatrix(v.dim(), {v.index()});
}

CanonicalVector LogicalMatrix::apply(const CanonicalVector& x) const {
  if (x.dim() != cols()) {
    throw DimensionError("LogicalMatrix::apply: vector dimension " + std::to_string(x.dim()) +
                         " != column count " + std::to_string(cols()));
  }
  return CanonicalVector(rows_, column(x.index()));
}

RationalMatrix LogicalMatrix::densify() const {
  RationalMatrix m(rows_, cols());
  for (std::size_t j = 0; j < cols(); ++j) m.at(col_index_[j] - 1, j) = 1;
  return m;
}

std::string LogicalMatrix::to_string() const {
  std::ostringstream os;
  os << "delta_" << rows_ << "[";
  for (std::size_t j = 0; j < col_index_.size(); ++j) os << (j ? "," : "") << col_index_[j];
  os << "]";
  return os.str();
}

LogicalMatrix delta(std::size_t rows, std::initializer_list<std::size_t> cols) {
  return LogicalMatrix(rows, std::vector<std::size_t>(cols));
}

RationalMatrix densify(const CanonicalVector& v) {
  return LogicalMatrix::from_vector(v).densify();
}

LogicalMatrix to_logical(const RationalMatrix& m) {
  std::vector<std::size_t> cols(m.cols());
  for (std::size_t j = 0; j < m.cols(); ++j) {
    std::size_t hit = 0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      const auto& v = m.at(i, j);
      if (v == 1 && hit == 0) {
        hit = i + 1;
      } else if (sgn(v) != 0) {
        throw DimensionError("to_logical: column " + std::to_string(j + 1) + " is not canonical");
      }
    }
    if (hit == 0) throw DimensionError("to_logical: column " + std::to_string(j + 1) + " is zero");
    cols[j] = hit;
  }
  return LogicalMatrix(m.rows(), std::move(cols));
}

// ---------------------------------------------------------------------------
// Products

RationalMatrix kron(const RationalMatrix& a, const RationalMatrix& b) {
  const std::size_t rows = checked_mul(a.rows(), b.rows(), "kron");
  const std::size_t cols = checked_mul(a.cols(), b.cols(), "kron");
  check_dense(rows, cols, "kron");
  RationalMatrix c(rows, cols);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const Rational& aij = a.at(i, j);
      if (sgn(aij) == 0) continue;
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          c.at(i * b.rows() + k, j * b.cols() + l) = aij * b.at(k, l);
    }
  return c;
}

LogicalMatrix kron(const LogicalMatrix& a, const LogicalMatrix& b) {
  const std::size_t rows = checked_mul(a.rows(), b.rows(), "kron");
  const std::size_t cols = checked_mul(a.cols(), b.cols(), "kron");
  check_logical(cols, "kron");
  std::vector<std::size_t> idx(cols);
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t l = 0; l < b.cols(); ++l)
      idx[j * b.cols() + l] = (a.col_index()[j] - 1) * b.rows() + b.col_index()[l];
  return LogicalMatrix(rows, std::move(idx));
}

CanonicalVector kron(const CanonicalVector& a, const CanonicalVector& b) {
  return CanonicalVector(checked_mul(a.dim(), b.dim(), "kron"),
                         (a.index() - 1) * b.dim() + b.index());
}

RationalMatrix stp(const RationalMatrix& a, const RationalMatrix& b) {
  const std::size_t l = std::lcm(a.cols(), b.rows());
  if (l == a.cols() && l == b.rows()) return a * b;
  return kron(a, RationalMatrix::identity(l / a.cols())) *
         kron(b, RationalMatrix::identity(l / b.rows()));
}

LogicalMatrix stp(const LogicalMatrix& a, const LogicalMatrix& b) {
  const std::size_t l = std::lcm(a.cols(), b.rows());
  const std::size_t pad_a = l / a.cols();
  const std::size_t pad_b = l / b.rows();
  const std::size_t out_cols = checked_mul(b.cols(), pad_b, "stp");
  check_logical(out_cols, "stp");
  std::vector<std::size_t> idx(out_cols);
  // Column c = jb * pad_b + k of (B kron I_pad_b) has its 1 in row
  // (b_jb - 1) * pad_b + k; that row selects a column of (A kron I_pad_a).
  for (std::size_t jb = 0; jb < b.cols(); ++jb) {
    for (std::size_t k = 0; k < pad_b; ++k) {
      const std::size_t mid = (b.col_index()[jb] - 1) * pad_b + k;  // 0-based
      const std::size_t ja = mid / pad_a;
      const std::size_t ka = mid % pad_a;
      idx[jb * pad_b + k] = (a.col_index()[ja] - 1) * pad_a + ka + 1;
    }
  }
  return LogicalMatrix(checked_mul(a.rows(), pad_a, "stp"), std::move(idx));
}

// ---------------------------------------------------------------------------
// Structural matrices

LogicalMatrix swap_matrix(std::size_t m, std::size_t n) {
  if (m == 0 || n == 0) throw DimensionError("swap_matrix: m and n must be positive");
  const std::size_t d = checked_mul(m, n, "swap_matrix");
  check_logical(d, "swap_matrix");
  // Column for u = delta_m^i, v = delta_n^j is (i-1) n + j; image v kron u is
  // delta_mn^{(j-1) m + i}.
  std::vector<std::size_t> idx(d);
  for (std::size_t i = 1; i <= m; ++i)
    for (std::size_t j = 1; j <= n; ++j) idx[(i - 1) * n + j - 1] = (j - 1) * m + i;
  return LogicalMatrix(d, std::move(idx));
}

LogicalMatrix power_reducing_matrix(std::size_t d) {
  if (d == 0) throw DimensionError("power_reducing_matrix: d must be positive");
  const std::size_t rows = checked_mul(d, d, "power_reducing_matrix");
  std::vector<std::size_t> idx(d);
  for (std::size_t i = 1; i <= d; ++i) idx[i - 1] = (i - 1) * d + i;
  return LogicalMatrix(rows, std::move(idx));
}

CanonicalVector encode_state(const BitVector& x) {
  const std::size_t n = x.size();
  if (n == 0) throw DimensionError("encode_state: empty bit vector");
  if (n >= 63) throw CapacityError("encode_state: too many bits");
  std::size_t index = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (x.bits[i] > 1) throw DimensionError("encode_state: bit value must be 0 or 1");
    if (x.bits[i] == 0) index += std::size_t{1} << (n - 1 - i);
  }
  return CanonicalVector(std::size_t{1} << n, index);
}

BitVector decode_state(const CanonicalVector& x, std::size_t n) {
  if (n == 0 || n >= 63 || x.dim() != (std::size_t{1} << n)) {
    throw DimensionError("decode_state: dimension " + std::to_string(x.dim()) + " is not 2^" +
                         std::to_string(n));
  }
  BitVector out;
  out.bits.resize(n);
  const std::size_t offset = x.index() - 1;
  for (std::size_t i = 0; i < n; ++i) {
    out.bits[i] = ((offset >> (n - 1 - i)) & 1U) ? 0 : 1;
  }
  return out;
}

LogicalMatrix structure_matrix(std::span<const std::uint8_t> truth_table) {
  const std::size_t len = truth_table.size();
  if (len == 0 || (len & (len - 1)) != 0) {
    throw DimensionError("structure_matrix: table length " + std::to_string(len) +
                         " is not a power of two");
  }
  std::vector<std::size_t> idx(len);
  for (std::size_t j = 0; j < len; ++j) {
    if (truth_table[j] > 1) throw DimensionError("structure_matrix: entries must be 0 or 1");
    idx[j] = truth_table[j] ? 1 : 2;
  }
  return LogicalMatrix(2, std::move(idx));
}

LogicalMatrix equilibrium_permutation(std::size_t k, std::size_t d) {
  if (d == 0 || k == 0 || k > d) {
    throw DimensionError("equilibrium_permutation: k=" + std::to_string(k) + " outside [1, " +
                         std::to_string(d) + "]");
  }
  std::vector<std::size_t> idx(d);
  std::iota(idx.begin(), idx.end(), std::size_t{1});
  std::swap(idx[k - 1], idx[d - 1]);
  return LogicalMatrix(d, std::move(idx));
}

}  // namespace bcn
