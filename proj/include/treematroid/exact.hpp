#pragma once

// Exact rational arithmetic and dense linear algebra over Q.
//
// Everything in this header is exact: ranks, coordinates, kernels and the
// Fourier-Motzkin feasibility decision never touch floating point.  Integer
// matrices are reduced fraction-free with overflow-checked 64-bit arithmetic;
// callers that cannot rule out overflow fall back to the rational path.

#include <gmpxx.h>

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

namespace treematroid {

using Rational = mpq_class;

/// Thrown when an instance exceeds a configured desk-scale bound.
class ScaleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses "7", "-3/2", "0.125", "1e-3", "2.5E2" into an exact rational.
inline Rational parse_rational(std::string_view text) {
  auto fail = [&]() -> Rational {
    throw std::invalid_argument("not a rational number: '" + std::string(text) + "'");
  };
  if (text.empty()) return fail();

  std::size_t pos = 0;
  bool negative = false;
  if (text[pos] == '+' || text[pos] == '-') {
    negative = text[pos] == '-';
    ++pos;
  }
  auto digits = [&](std::size_t from) {
    std::size_t to = from;
    while (to < text.size() && std::isdigit(static_cast<unsigned char>(text[to]))) ++to;
    return to;
  };

  const std::size_t int_end = digits(pos);
  std::string int_part(text.substr(pos, int_end - pos));
  pos = int_end;

  if (pos < text.size() && text[pos] == '/') {
    const std::size_t den_end = digits(pos + 1);
    if (int_part.empty() || den_end == pos + 1 || den_end != text.size()) return fail();
    mpz_class num(int_part, 10);
    mpz_class den(std::string(text.substr(pos + 1, den_end - pos - 1)), 10);
    if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    Rational q(num, den);
    q.canonicalize();
    return negative ? Rational(-q) : q;
  }

  std::string frac_part;
  if (pos < text.size() && text[pos] == '.') {
    const std::size_t frac_end = digits(pos + 1);
    frac_part = std::string(text.substr(pos + 1, frac_end - pos - 1));
    pos = frac_end;
  }
  if (int_part.empty() && frac_part.empty()) return fail();

  long exponent = 0;
  if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
    ++pos;
    bool exp_negative = false;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
      exp_negative = text[pos] == '-';
      ++pos;
    }
    const std::size_t exp_end = digits(pos);
    if (exp_end == pos || exp_end - pos > 6) return fail();
    exponent = std::stol(std::string(text.substr(pos, exp_end - pos)));
    if (exp_negative) exponent = -exponent;
    pos = exp_end;
  }
  if (pos != text.size()) return fail();

  const std::string all_digits = (int_part.empty() ? std::string("0") : int_part) + frac_part;
  mpz_class mantissa(all_digits, 10);
  exponent -= static_cast<long>(frac_part.size());

  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
  Rational q = exponent < 0 ? Rational(mantissa, scale) : Rational(mantissa * scale);
  q.canonicalize();
  return negative ? Rational(-q) : q;
}

inline std::string to_string(const Rational& q) { return q.get_str(); }

namespace detail {

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("int64 overflow in elimination");
  return r;
}

inline std::int64_t checked_sub(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_sub_overflow(a, b, &r)) throw std::overflow_error("int64 overflow in elimination");
  return r;
}

inline bool is_zero(const Rational& q) { return sgn(q) == 0; }
inline bool is_zero(std::int64_t v) { return v == 0; }

}  // namespace detail

/// Dense row-major matrix.
template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, T(0)) {}

  static Matrix from_rows(const std::vector<std::vector<T>>& rows, std::size_t cols) {
    Matrix m(rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != cols) throw std::invalid_argument("ragged matrix rows");
      std::copy(rows[r].begin(), rows[r].end(), m.data_.begin() + static_cast<std::ptrdiff_t>(r * cols));
    }
    return m;
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  /// Keeps the listed columns, in the given order.
  Matrix select_columns(std::span<const std::size_t> columns) const {
    Matrix m(rows_, columns.size());
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < columns.size(); ++c) m(r, c) = (*this)(r, columns[c]);
    return m;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using RationalMatrix = Matrix<Rational>;

template <class T>
Matrix<T> operator*(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matrix product: dimension mismatch");
  Matrix<T> p(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      if (detail::is_zero(a(i, k))) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) p(i, j) += a(i, k) * b(k, j);
    }
  return p;
}

/// Converts an integer matrix to rationals.
inline RationalMatrix to_rational(const Matrix<std::int64_t>& m) {
  RationalMatrix q(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) q(r, c) = Rational(static_cast<long>(m(r, c)));
  return q;
}

/// Incrementally maintained row echelon form.  Rows are reduced against the
/// stored pivots in insertion order; the pivot of a new row is its first
/// nonzero entry after reduction.
///
/// Over Rational the stored rows are scaled to pivot 1.  Over int64 the
/// reduction is fraction-free and rows are kept primitive; any overflow
/// throws std::overflow_error.
template <class T>
class RowEchelon {
 public:
  explicit RowEchelon(std::size_t columns) : columns_(columns) {}

  std::size_t columns() const { return columns_; }
  std::size_t rank() const { return rows_.size(); }

  /// The residual of `row` after elimination against every stored pivot.
  std::vector<T> reduce(std::vector<T> row) const {
    if (row.size() != columns_) throw std::invalid_argument("row length differs from column count");
    for (std::size_t i = 0; i < rows_.size(); ++i) eliminate(row, rows_[i], pivots_[i]);
    return row;
  }

  bool in_span(std::vector<T> row) const {
    const auto residual = reduce(std::move(row));
    return std::all_of(residual.begin(), residual.end(), [](const T& v) { return detail::is_zero(v); });
  }

  /// Adds `row`; returns false (and stores nothing) when it is already in the span.
  bool insert(std::vector<T> row) {
    row = reduce(std::move(row));
    const auto it = std::find_if(row.begin(), row.end(), [](const T& v) { return !detail::is_zero(v); });
    if (it == row.end()) return false;
    const auto pivot = static_cast<std::size_t>(it - row.begin());
    if constexpr (std::is_integral_v<T>) {
      make_primitive(row);
    } else {
      const T scale = row[pivot];
      for (auto& v : row) v /= scale;
    }
    rows_.push_back(std::move(row));
    pivots_.push_back(pivot);
    return true;
  }

 private:
  static void eliminate(std::vector<T>& row, const std::vector<T>& base, std::size_t pivot) {
    if (detail::is_zero(row[pivot])) return;
    if constexpr (std::is_integral_v<T>) {
      const T p = base[pivot];
      const T f = row[pivot];
      for (std::size_t c = 0; c < row.size(); ++c)
        row[c] = detail::checked_sub(detail::checked_mul(p, row[c]), detail::checked_mul(f, base[c]));
      make_primitive(row);
    } else {
      const T f = row[pivot];
      for (std::size_t c = 0; c < row.size(); ++c)
        if (!detail::is_zero(base[c])) row[c] -= f * base[c];
    }
  }

  static void make_primitive(std::vector<T>& row) requires std::is_integral_v<T> {
    T g = 0;
    for (const T v : row) g = std::gcd(g, v);
    if (g > 1)
      for (auto& v : row) v /= g;
  }

  std::size_t columns_;
  std::vector<std::vector<T>> rows_;
  std::vector<std::size_t> pivots_;
};

/// Rank by Gaussian elimination; first-nonzero pivoting.
template <class T>
std::size_t rank(const Matrix<T>& m) {
  RowEchelon<T> echelon(m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) echelon.insert(std::vector<T>(m.row(r).begin(), m.row(r).end()));
  return echelon.rank();
}

/// Rank of an integer matrix; exact, using the rational path if int64 overflows.
inline std::size_t integer_rank(const Matrix<std::int64_t>& m) {
  try {
    return rank(m);
  } catch (const std::overflow_error&) {
    return rank(to_rational(m));
  }
}

/// Solution of the square system a x = b as (d, d x) with d = |det a| > 0,
/// so d x is integral (Cramer).  Fraction-free elimination; nullopt when a is
/// singular; std::overflow_error when int64 is exceeded.
inline std::optional<std::pair<std::int64_t, std::vector<std::int64_t>>> integer_cramer(Matrix<std::int64_t> a,
                                                                                    std::vector<std::int64_t> b) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.size() != n) throw std::invalid_argument("integer_cramer needs a square system");
  std::int64_t previous = 1;
  bool negate = false;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    while (pivot < n && a(pivot, k) == 0) ++pivot;
    if (pivot == n) return std::nullopt;
    if (pivot != k) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a(k, c), a(pivot, c));
      std::swap(b[k], b[pivot]);
      negate = !negate;
    }
    for (std::size_t r = k + 1; r < n; ++r) {
      for (std::size_t c = k + 1; c < n; ++c)
        a(r, c) = detail::checked_sub(detail::checked_mul(a(k, k), a(r, c)), detail::checked_mul(a(r, k), a(k, c))) / previous;
      b[r] = detail::checked_sub(detail::checked_mul(a(k, k), b[r]), detail::checked_mul(a(r, k), b[k])) / previous;
      a(r, k) = 0;
    }
    previous = a(k, k);
  }
  std::int64_t det = negate ? -a(n - 1, n - 1) : a(n - 1, n - 1);
  std::vector<std::int64_t> y(n);
  for (std::size_t i = n; i-- > 0;) {
    std::int64_t rhs = detail::checked_mul(det, b[i]);
    for (std::size_t j = i + 1; j < n; ++j) rhs = detail::checked_sub(rhs, detail::checked_mul(a(i, j), y[j]));
    y[i] = rhs / a(i, i);
  }
  if (det < 0) {
    det = -det;
    for (auto& v : y) v = -v;
  }
  return std::make_pair(det, std::move(y));
}

/// Reduced row echelon form in place; returns the pivot columns.
inline std::vector<std::size_t> reduce_to_rref(RationalMatrix& m, std::size_t pivot_limit) {
  std::vector<std::size_t> pivots;
  std::size_t lead_row = 0;
  for (std::size_t col = 0; col < pivot_limit && lead_row < m.rows(); ++col) {
    std::size_t r = lead_row;
    while (r < m.rows() && detail::is_zero(m(r, col))) ++r;
    if (r == m.rows()) continue;
    if (r != lead_row)
      for (std::size_t c = 0; c < m.cols(); ++c) std::swap(m(r, c), m(lead_row, c));
    const Rational inv = 1 / m(lead_row, col);
    for (std::size_t c = 0; c < m.cols(); ++c) m(lead_row, c) *= inv;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == lead_row || detail::is_zero(m(i, col))) continue;
      const Rational f = m(i, col);
      for (std::size_t c = 0; c < m.cols(); ++c)
        if (!detail::is_zero(m(lead_row, c))) m(i, c) -= f * m(lead_row, c);
    }
    pivots.push_back(col);
    ++lead_row;
  }
  return pivots;
}

/// Expresses target vectors as combinations of a fixed family of linearly
/// independent rows.  The elimination is done once, so repeated queries
/// against the same family cost one matrix-vector product each.
class CoordinateSolver {
 public:
  explicit CoordinateSolver(const RationalMatrix& basis_rows)
      : count_(basis_rows.rows()), dim_(basis_rows.cols()) {
    // Gauss-Jordan on [B^T | I]; the right block records the row operations.
    RationalMatrix work(dim_, count_ + dim_);
    for (std::size_t i = 0; i < count_; ++i)
      for (std::size_t j = 0; j < dim_; ++j) work(j, i) = basis_rows(i, j);
    for (std::size_t j = 0; j < dim_; ++j) work(j, count_ + j) = 1;
    const auto pivots = reduce_to_rref(work, count_);
    if (pivots.size() != count_) throw std::invalid_argument("coordinate basis rows are linearly dependent");
    transform_ = RationalMatrix(dim_, dim_);
    for (std::size_t r = 0; r < dim_; ++r)
      for (std::size_t c = 0; c < dim_; ++c) transform_(r, c) = work(r, count_ + c);
  }

  std::size_t size() const { return count_; }

  /// Coefficients c with sum_i c[i] * basis_row[i] == target, or nullopt when
  /// target lies outside the span.
  std::optional<std::vector<Rational>> solve(std::span<const Rational> target) const {
    if (target.size() != dim_) throw std::invalid_argument("target length differs from basis width");
    std::vector<Rational> image(dim_);
    for (std::size_t r = 0; r < dim_; ++r)
      for (std::size_t c = 0; c < dim_; ++c)
        if (!detail::is_zero(target[c]) && !detail::is_zero(transform_(r, c))) image[r] += transform_(r, c) * target[c];
    for (std::size_t r = count_; r < dim_; ++r)
      if (!detail::is_zero(image[r])) return std::nullopt;
    image.resize(count_);
    return image;
  }

 private:
  std::size_t count_;
  std::size_t dim_;
  RationalMatrix transform_;
};

/// One-shot form of CoordinateSolver.  Throws std::invalid_argument when
/// basis_rows is rank-deficient.
inline std::optional<std::vector<Rational>> solve_coordinates(const RationalMatrix& basis_rows,
                                                              std::span<const Rational> target) {
  return CoordinateSolver(basis_rows).solve(target);
}

/// Basis of the right null space {x : Mx = 0}, one vector per free column.
inline std::vector<std::vector<Rational>> kernel_basis(const RationalMatrix& m) {
  RationalMatrix work = m;
  const auto pivots = reduce_to_rref(work, work.cols());
  std::vector<bool> is_pivot(m.cols(), false);
  for (const auto p : pivots) is_pivot[p] = true;

  std::vector<std::vector<Rational>> basis;
  for (std::size_t free = 0; free < m.cols(); ++free) {
    if (is_pivot[free]) continue;
    std::vector<Rational> v(m.cols());
    v[free] = 1;
    for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = -work(i, free);
    basis.push_back(std::move(v));
  }
  return basis;
}

// ---------------------------------------------------------------------------
// Linear feasibility with strict inequalities.

/// One row of a linear system: coefficients . x  (relation)  rhs.
struct LinearRow {
  std::vector<Rational> coefficients;
  Rational rhs;
};

/// Equalities, strict inequalities (row.x > rhs) and weak inequalities
/// (row.x >= rhs) over a common variable vector.
class LinearSystem {
 public:
  explicit LinearSystem(std::size_t dimension) : dimension_(dimension) {}

  std::size_t dimension() const { return dimension_; }

  void add_equality(std::vector<Rational> row, Rational rhs = 0) { equalities_.push_back(check({std::move(row), std::move(rhs)})); }
  void add_strict(std::vector<Rational> row, Rational rhs = 0) { strict_.push_back(check({std::move(row), std::move(rhs)})); }
  void add_weak(std::vector<Rational> row, Rational rhs = 0) { weak_.push_back(check({std::move(row), std::move(rhs)})); }

  const std::vector<LinearRow>& equalities() const { return equalities_; }
  const std::vector<LinearRow>& strict_inequalities() const { return strict_; }
  const std::vector<LinearRow>& weak_inequalities() const { return weak_; }

  /// True iff x satisfies every constraint.
  bool satisfied_by(std::span<const Rational> x) const {
    auto dot = [&](const LinearRow& r) {
      Rational s = 0;
      for (std::size_t i = 0; i < dimension_; ++i) s += r.coefficients[i] * x[i];
      return s;
    };
    return std::all_of(equalities_.begin(), equalities_.end(), [&](const auto& r) { return dot(r) == r.rhs; }) &&
           std::all_of(strict_.begin(), strict_.end(), [&](const auto& r) { return dot(r) > r.rhs; }) &&
           std::all_of(weak_.begin(), weak_.end(), [&](const auto& r) { return dot(r) >= r.rhs; });
  }

 private:
  LinearRow check(LinearRow row) const {
    if (row.coefficients.size() != dimension_) throw std::invalid_argument("constraint width differs from system dimension");
    return row;
  }

  std::size_t dimension_;
  std::vector<LinearRow> equalities_;
  std::vector<LinearRow> strict_;
  std::vector<LinearRow> weak_;
};

struct FeasibilityOptions {
  std::size_t max_variables = 24;
  std::size_t max_constraints = 200000;
};

namespace detail {

// Inequalities keyed by their normalized coefficient vector; the value keeps
// the tightest rhs seen (strict wins ties).
using InequalityPool = std::map<std::vector<Rational>, std::pair<Rational, bool>>;

// Returns false when the constraint is a violated constant.
inline bool add_inequality(InequalityPool& pool, std::vector<Rational> a, Rational b, bool strict) {
  const auto lead = std::find_if(a.begin(), a.end(), [](const Rational& v) { return !is_zero(v); });
  if (lead == a.end()) return strict ? sgn(b) < 0 : sgn(b) <= 0;
  const Rational scale = abs(*lead);
  if (scale != 1) {
    for (auto& v : a) v /= scale;
    b /= scale;
  }
  auto [it, inserted] = pool.try_emplace(std::move(a), b, strict);
  if (!inserted) {
    auto& [rhs, is_strict] = it->second;
    if (b > rhs) {
      rhs = b;
      is_strict = strict;
    } else if (b == rhs) {
      is_strict = is_strict || strict;
    }
  }
  return true;
}

}  // namespace detail

/// Decides whether some rational x satisfies every constraint of `system`.
///
/// Equalities are eliminated first by substitution; the remaining strict and
/// weak inequalities go through Fourier-Motzkin elimination in ascending
/// variable order.  A combined inequality is strict iff one of its two
/// parents is.  Throws ScaleError past the configured bounds.
inline bool feasible(const LinearSystem& system, const FeasibilityOptions& options = {}) {
  const std::size_t dim = system.dimension();
  if (dim > options.max_variables)
    throw ScaleError("feasibility system has " + std::to_string(dim) + " variables; bound is " +
                     std::to_string(options.max_variables));

  // Equalities: RREF of [A | b].
  RationalMatrix eq(system.equalities().size(), dim + 1);
  for (std::size_t r = 0; r < system.equalities().size(); ++r) {
    const auto& row = system.equalities()[r];
    for (std::size_t c = 0; c < dim; ++c) eq(r, c) = row.coefficients[c];
    eq(r, dim) = row.rhs;
  }
  const auto pivots = reduce_to_rref(eq, dim);
  for (std::size_t r = pivots.size(); r < eq.rows(); ++r)
    if (!detail::is_zero(eq(r, dim))) return false;

  // x_p = rhs_r - sum_{j free} eq(r, j) x_j for every pivot row r.
  auto substitute = [&](std::vector<Rational> a, Rational b) {
    for (std::size_t r = 0; r < pivots.size(); ++r) {
      const std::size_t p = pivots[r];
      if (detail::is_zero(a[p])) continue;
      const Rational c = a[p];
      for (std::size_t j = 0; j < dim; ++j)
        if (!detail::is_zero(eq(r, j))) a[j] -= c * eq(r, j);
      b -= c * eq(r, dim);
    }
    return std::pair{std::move(a), std::move(b)};
  };

  detail::InequalityPool pool;
  for (const auto& [rows, strict] : {std::pair{&system.strict_inequalities(), true}, std::pair{&system.weak_inequalities(), false}}) {
    for (const auto& row : *rows) {
      auto [a, b] = substitute(row.coefficients, row.rhs);
      if (!detail::add_inequality(pool, std::move(a), std::move(b), strict)) return false;
    }
  }

  for (std::size_t var = 0; var < dim; ++var) {
    std::vector<detail::InequalityPool::value_type*> lower, upper;
    detail::InequalityPool next;
    for (auto& entry : pool) {
      const int s = sgn(entry.first[var]);
      if (s > 0) lower.push_back(&entry);
      else if (s < 0) upper.push_back(&entry);
      else next.insert(std::move(entry));
    }
    if (lower.size() * upper.size() + next.size() > options.max_constraints)
      throw ScaleError("Fourier-Motzkin elimination exceeded the constraint bound");
    for (const auto* lo : lower) {
      for (const auto* up : upper) {
        // lo: a.x >= b with a[var] > 0 (normalized to 1 when var leads);
        // up: c.x >= d with c[var] < 0.  Scale both so var cancels.
        const Rational alpha = -up->first[var];
        const Rational beta = lo->first[var];
        std::vector<Rational> combined(dim);
        for (std::size_t j = 0; j < dim; ++j) combined[j] = alpha * lo->first[j] + beta * up->first[j];
        combined[var] = 0;
        Rational rhs = alpha * lo->second.first + beta * up->second.first;
        const bool strict = lo->second.second || up->second.second;
        if (!detail::add_inequality(next, std::move(combined), std::move(rhs), strict)) return false;
      }
    }
    pool = std::move(next);
  }
  return true;
}

}  // namespace treematroid
