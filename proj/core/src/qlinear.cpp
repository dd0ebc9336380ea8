#include "minflow/qlinear.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <utility>

namespace minflow::qlinear {

namespace {

constexpr int kSignRounds = 64;
constexpr int kFloorRounds = 256;
constexpr std::size_t kBisectionCap = 100000;

void validate_spec(const GeneratorSpec& g) {
  if (g.name.empty()) throw std::invalid_argument("generator name must be nonempty");
  if (!(g.enclosure.lo < g.enclosure.hi))
    throw std::invalid_argument("generator '" + g.name + "': enclosure needs lo < hi");
  switch (g.refiner) {
    case RefinerKind::SqrtInt: {
      if (g.sqrt_arg < 2)
        throw std::invalid_argument("generator '" + g.name + "': sqrt radicand must be >= 2");
      if (g.enclosure.lo < 0)
        throw std::invalid_argument("generator '" + g.name + "': sqrt enclosure must be nonnegative");
      Rational n{g.sqrt_arg};
      if (g.enclosure.lo * g.enclosure.lo > n || g.enclosure.hi * g.enclosure.hi < n)
        throw std::invalid_argument("generator '" + g.name + "': enclosure does not bracket sqrt");
      break;
    }
    case RefinerKind::DecimalLiteral:
      if (g.decimal_digits.empty())
        throw std::invalid_argument("generator '" + g.name + "': missing decimal literal");
      break;
    case RefinerKind::Opaque:
      break;
  }
  if (g.quadratic_closure && g.refiner != RefinerKind::SqrtInt)
    throw std::invalid_argument("generator '" + g.name +
                                "': quadratic closure requires a sqrt refiner");
}

struct DecimalParts {
  bool negative = false;
  std::string whole;
  std::string frac;
};

DecimalParts split_decimal(const std::string& name, const std::string& text) {
  DecimalParts p;
  std::string_view s{text};
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    p.negative = s.front() == '-';
    s.remove_prefix(1);
  }
  auto dot = s.find('.');
  std::string_view whole = dot == std::string_view::npos ? s : s.substr(0, dot);
  std::string_view frac = dot == std::string_view::npos ? std::string_view{} : s.substr(dot + 1);
  auto digits = [](std::string_view t) {
    return !t.empty() && std::all_of(t.begin(), t.end(), [](unsigned char c) {
      return std::isdigit(c) != 0;
    });
  };
  if (!digits(whole) || (dot != std::string_view::npos && !digits(frac)))
    throw std::invalid_argument("generator '" + name + "': malformed decimal literal");
  p.whole = std::string(whole);
  p.frac = std::string(frac);
  return p;
}

}  // namespace

GeneratorBasis::GeneratorBasis(std::vector<GeneratorSpec> generators,
                               std::string independence_note)
    : generators_(std::move(generators)), independence_note_(std::move(independence_note)) {
  for (std::size_t i = 0; i < generators_.size(); ++i) {
    validate_spec(generators_[i]);
    for (std::size_t j = 0; j < i; ++j)
      if (generators_[j].name == generators_[i].name)
        throw std::invalid_argument("duplicate generator name '" + generators_[i].name + "'");
  }
  std::ostringstream id;
  id << "basis(";
  for (std::size_t i = 0; i < generators_.size(); ++i)
    id << (i ? "," : "") << generators_[i].name;
  id << ")";
  id_ = id.str();

  cache_.reserve(generators_.size());
  for (const auto& g : generators_) cache_.push_back(g.enclosure);
  decimal_consumed_.assign(generators_.size(), 0);
}

std::shared_ptr<const GeneratorBasis> GeneratorBasis::create(
    std::vector<GeneratorSpec> generators, std::string independence_note) {
  return std::shared_ptr<const GeneratorBasis>(
      new GeneratorBasis(std::move(generators), std::move(independence_note)));
}

std::optional<std::size_t> GeneratorBasis::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < generators_.size(); ++i)
    if (generators_[i].name == name) return i;
  return std::nullopt;
}

Interval GeneratorBasis::current_enclosure(std::size_t i) const {
  std::lock_guard lock(cache_mutex_);
  return cache_.at(i);
}

Interval GeneratorBasis::refined_enclosure(std::size_t i, const Rational& target_width) const {
  std::lock_guard lock(cache_mutex_);
  Interval& cur = cache_.at(i);
  if (cur.width() <= target_width) return cur;

  const GeneratorSpec& g = generators_.at(i);
  switch (g.refiner) {
    case RefinerKind::SqrtInt: {
      const Rational n{g.sqrt_arg};
      std::size_t steps = 0;
      while (cur.width() > target_width) {
        if (++steps > kBisectionCap)
          throw RefinementError("sqrt refiner exceeded iteration budget for '" + g.name + "'", cur);
        Rational mid = cur.midpoint();
        if (mid * mid <= n)
          cur.lo = mid;
        else
          cur.hi = mid;
      }
      return cur;
    }
    case RefinerKind::DecimalLiteral: {
      DecimalParts parts = split_decimal(g.name, g.decimal_digits);
      std::size_t& consumed = decimal_consumed_.at(i);
      auto digit_interval = [&](std::size_t k) {
        Integer scale = 1;
        Integer num{parts.whole};
        for (std::size_t d = 0; d < k; ++d) {
          scale *= 10;
          num = num * 10 + (parts.frac[d] - '0');
        }
        Interval mag{Rational(num, scale), Rational(num + 1, scale)};
        if (parts.negative) return Interval{-mag.hi, -mag.lo};
        return mag;
      };
      while (cur.width() > target_width) {
        if (consumed >= parts.frac.size())
          throw RefinementError("decimal literal for '" + g.name +
                                    "' has no further digits (width " +
                                    fraction_string(cur.width()) + " > requested)",
                                cur);
        ++consumed;
        Interval next = digit_interval(consumed);
        // nested intersection with whatever the declared enclosure already pinned
        next.lo = std::max(next.lo, cur.lo);
        next.hi = std::min(next.hi, cur.hi);
        if (!(next.lo <= next.hi))
          throw std::invalid_argument("decimal literal for '" + g.name +
                                      "' contradicts its declared enclosure");
        cur = next;
      }
      return cur;
    }
    case RefinerKind::Opaque:
      throw RefinementError("generator '" + g.name + "' is opaque; cannot refine below width " +
                                fraction_string(cur.width()),
                            cur);
  }
  throw std::logic_error("unreachable refiner kind");
}

// ---------------------------------------------------------------------------
// ExactReal

ExactReal::ExactReal(BasisPtr basis, std::vector<Rational> coeffs)
    : basis_(std::move(basis)),
      coeffs_(std::move(coeffs)),
      numeric_cache_(std::make_shared<NumericCache>()) {
  if (!basis_) throw std::invalid_argument("ExactReal requires a basis");
  if (coeffs_.size() != basis_->dimension())
    throw std::invalid_argument("coefficient vector has wrong dimension for " + basis_->id());
}

ExactReal ExactReal::rational(BasisPtr basis, Rational q) {
  std::vector<Rational> c(basis->dimension(), Rational(0));
  c[0] = std::move(q);
  return ExactReal(std::move(basis), std::move(c));
}

ExactReal ExactReal::zero(BasisPtr basis) { return rational(std::move(basis), Rational(0)); }

ExactReal ExactReal::generator(BasisPtr basis, std::size_t index) {
  if (index >= basis->generator_count())
    throw std::out_of_range("generator index out of range for " + basis->id());
  std::vector<Rational> c(basis->dimension(), Rational(0));
  c[index + 1] = 1;
  return ExactReal(std::move(basis), std::move(c));
}

bool ExactReal::is_zero() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](const Rational& q) { return q == 0; });
}

bool ExactReal::is_rational() const {
  return std::all_of(coeffs_.begin() + 1, coeffs_.end(),
                     [](const Rational& q) { return q == 0; });
}

namespace {
void require_same_basis(const ExactReal& a, const ExactReal& b) {
  if (a.basis() != b.basis())
    throw BasisMismatchError("basis mismatch: " + a.basis()->id() + " vs " + b.basis()->id());
}
}  // namespace

ExactReal ExactReal::operator-() const {
  std::vector<Rational> c(coeffs_.size());
  for (std::size_t i = 0; i < coeffs_.size(); ++i) c[i] = -coeffs_[i];
  return ExactReal(basis_, std::move(c));
}

ExactReal operator+(const ExactReal& a, const ExactReal& b) {
  require_same_basis(a, b);
  std::vector<Rational> c(a.coeffs_.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = a.coeffs_[i] + b.coeffs_[i];
  return ExactReal(a.basis_, std::move(c));
}

ExactReal operator-(const ExactReal& a, const ExactReal& b) { return a + (-b); }

bool operator==(const ExactReal& a, const ExactReal& b) {
  require_same_basis(a, b);
  return a.coeffs_ == b.coeffs_;
}

ExactReal scale(const ExactReal& a, const Rational& c) {
  std::vector<Rational> out(a.coeffs().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.coeffs()[i] * c;
  return ExactReal(a.basis(), std::move(out));
}

Interval ExactReal::approx(const Rational& eps) const {
  if (eps <= 0) throw std::invalid_argument("approx requires eps > 0");
  Interval acc{coeffs_[0], coeffs_[0]};
  std::size_t live = 0;
  for (std::size_t i = 1; i < coeffs_.size(); ++i)
    if (coeffs_[i] != 0) ++live;
  if (live == 0) return acc;
  // aim a factor below the requested width so results sit well inside
  // decimal windows of width eps
  for (std::size_t i = 1; i < coeffs_.size(); ++i) {
    const Rational& q = coeffs_[i];
    if (q == 0) continue;
    Rational target = eps / (Rational(4 * static_cast<int>(live)) * boost::multiprecision::abs(q));
    Interval enc = basis_->refined_enclosure(i - 1, target);
    acc = acc + enc.scaled(q);
  }
  return acc;
}

namespace {
// Like approx, but silently settles for whatever width opaque/short refiners
// can deliver.
Interval approx_best_effort(const ExactReal& x, const Rational& eps) {
  const auto& coeffs = x.coeffs();
  Interval acc{coeffs[0], coeffs[0]};
  std::size_t live = 0;
  for (std::size_t i = 1; i < coeffs.size(); ++i)
    if (coeffs[i] != 0) ++live;
  if (live == 0) return acc;
  for (std::size_t i = 1; i < coeffs.size(); ++i) {
    const Rational& q = coeffs[i];
    if (q == 0) continue;
    Rational target = eps / (Rational(4 * static_cast<int>(live)) * boost::multiprecision::abs(q));
    Interval enc;
    try {
      enc = x.basis()->refined_enclosure(i - 1, target);
    } catch (const RefinementError& e) {
      enc = e.best_interval;
    }
    acc = acc + enc.scaled(q);
  }
  return acc;
}
}  // namespace

double ExactReal::numeric() const {
  if (numeric_cache_->ready.load(std::memory_order_acquire))
    return numeric_cache_->value.load(std::memory_order_relaxed);
  Rational eps{Integer(1), Integer(1) << 62};
  double v = to_double(approx_best_effort(*this, eps).midpoint());
  numeric_cache_->value.store(v, std::memory_order_relaxed);
  numeric_cache_->ready.store(true, std::memory_order_release);
  return v;
}

int ExactReal::sign() const {
  if (is_rational()) return coeffs_[0].sign();
  Rational eps{1};
  Interval last{coeffs_[0], coeffs_[0]};
  for (int round = 0; round < kSignRounds; ++round) {
    last = approx_best_effort(*this, eps);
    if (last.lo > 0) return 1;
    if (last.hi < 0) return -1;
    eps /= 16;
  }
  throw RefinementError("sign of " + to_string() + " undetermined within refinement budget", last);
}

Integer ExactReal::floor() const {
  if (is_rational()) return floor_rational(coeffs_[0]);
  Rational eps{Rational(1, 4)};
  Interval last{coeffs_[0], coeffs_[0]};
  for (int round = 0; round < kFloorRounds; ++round) {
    last = approx(eps);
    Integer fl = floor_rational(last.lo);
    Integer fh = floor_rational(last.hi);
    if (fl == fh) return fl;
    eps /= 2;
  }
  throw RefinementError("floor of " + to_string() + " undetermined within refinement budget",
                        last);
}

std::string ExactReal::to_string() const {
  std::ostringstream out;
  bool emitted = false;
  if (coeffs_[0] != 0) {
    out << fraction_string(coeffs_[0]);
    emitted = true;
  }
  for (std::size_t i = 1; i < coeffs_.size(); ++i) {
    const Rational& q = coeffs_[i];
    if (q == 0) continue;
    const std::string& name = basis_->generator(i - 1).name;
    if (!emitted) {
      if (q == 1)
        out << name;
      else if (q == -1)
        out << "-" << name;
      else
        out << fraction_string(q) << "*" << name;
    } else {
      Rational mag = boost::multiprecision::abs(q);
      out << (q.sign() < 0 ? " - " : " + ");
      if (mag == 1)
        out << name;
      else
        out << fraction_string(mag) << "*" << name;
    }
    emitted = true;
  }
  if (!emitted) out << "0";
  return out.str();
}

// ---------------------------------------------------------------------------
// products and reciprocals

namespace {
// index of the single supporting irrational generator, if any
std::optional<std::size_t> sole_support(const ExactReal& a) {
  std::optional<std::size_t> found;
  for (std::size_t i = 1; i < a.coeffs().size(); ++i) {
    if (a.coeffs()[i] == 0) continue;
    if (found) return std::nullopt;
    found = i - 1;
  }
  return found;
}
}  // namespace

std::optional<ExactReal> try_mul(const ExactReal& a, const ExactReal& b) {
  require_same_basis(a, b);
  if (a.is_rational()) return scale(b, a.rational_part());
  if (b.is_rational()) return scale(a, b.rational_part());
  auto ia = sole_support(a);
  auto ib = sole_support(b);
  if (!ia || !ib || *ia != *ib) return std::nullopt;
  const GeneratorSpec& g = a.basis()->generator(*ia);
  if (!g.quadratic_closure) return std::nullopt;
  const Rational n{g.sqrt_arg};
  const Rational a0 = a.rational_part(), a1 = a.coeff(*ia + 1);
  const Rational b0 = b.rational_part(), b1 = b.coeff(*ia + 1);
  std::vector<Rational> c(a.basis()->dimension(), Rational(0));
  c[0] = a0 * b0 + a1 * b1 * n;
  c[*ia + 1] = a0 * b1 + a1 * b0;
  return ExactReal(a.basis(), std::move(c));
}

std::optional<ExactReal> reciprocal(const ExactReal& a) {
  if (a.is_zero()) throw DivisionByZeroError("reciprocal of zero");
  if (a.is_rational())
    return ExactReal::rational(a.basis(), Rational(1) / a.rational_part());
  auto idx = sole_support(a);
  if (!idx) return std::nullopt;
  const GeneratorSpec& g = a.basis()->generator(*idx);
  if (!g.quadratic_closure) return std::nullopt;
  const Rational n{g.sqrt_arg};
  const Rational p = a.rational_part(), q = a.coeff(*idx + 1);
  Rational denom = p * p - q * q * n;  // (p + q g)(p - q g)
  if (denom == 0) return std::nullopt;
  std::vector<Rational> c(a.basis()->dimension(), Rational(0));
  c[0] = p / denom;
  c[*idx + 1] = -q / denom;
  return ExactReal(a.basis(), std::move(c));
}

// ---------------------------------------------------------------------------
// literal parsing

std::optional<ExactReal> parse_exact_real(const BasisPtr& basis, std::string_view text) {
  std::vector<Rational> coeffs(basis->dimension(), Rational(0));
  std::size_t pos = 0;
  bool any_term = false;

  auto skip_ws = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };

  skip_ws();
  while (pos < text.size()) {
    int sign = 1;
    if (text[pos] == '+' || text[pos] == '-') {
      sign = text[pos] == '-' ? -1 : 1;
      ++pos;
      skip_ws();
    } else if (any_term) {
      return std::nullopt;  // terms must be joined by +/-
    }
    std::size_t start = pos;
    while (pos < text.size() && text[pos] != '+' && text[pos] != '-') ++pos;
    std::string_view term = text.substr(start, pos - start);
    // trim
    while (!term.empty() && std::isspace(static_cast<unsigned char>(term.back())))
      term.remove_suffix(1);
    if (term.empty()) return std::nullopt;

    std::string_view coef_part = term;
    std::string_view name_part;
    if (auto star = term.find('*'); star != std::string_view::npos) {
      coef_part = term.substr(0, star);
      name_part = term.substr(star + 1);
      while (!coef_part.empty() && std::isspace(static_cast<unsigned char>(coef_part.back())))
        coef_part.remove_suffix(1);
      while (!name_part.empty() && std::isspace(static_cast<unsigned char>(name_part.front())))
        name_part.remove_prefix(1);
    }

    if (name_part.empty()) {
      if (auto q = parse_rational(coef_part)) {
        coeffs[0] += Rational(sign) * *q;
      } else if (auto idx = basis->index_of(coef_part)) {
        coeffs[*idx + 1] += sign;
      } else {
        return std::nullopt;
      }
    } else {
      auto q = parse_rational(coef_part);
      auto idx = basis->index_of(name_part);
      if (!q || !idx) return std::nullopt;
      coeffs[*idx + 1] += Rational(sign) * *q;
    }
    any_term = true;
    skip_ws();
  }
  if (!any_term) return std::nullopt;
  return ExactReal(basis, std::move(coeffs));
}

// ---------------------------------------------------------------------------
// rational linear algebra

namespace {

using Row = std::vector<Rational>;

// Canonical reduced row echelon form; returns surviving rows and pivot columns.
std::pair<std::vector<Row>, std::vector<std::size_t>> rref(std::vector<Row> rows) {
  std::vector<std::size_t> pivots;
  if (rows.empty()) return {rows, pivots};
  const std::size_t cols = rows[0].size();
  std::size_t r = 0;
  for (std::size_t col = 0; col < cols && r < rows.size(); ++col) {
    std::size_t p = r;
    while (p < rows.size() && rows[p][col] == 0) ++p;
    if (p == rows.size()) continue;
    std::swap(rows[r], rows[p]);
    Rational inv = Rational(1) / rows[r][col];
    for (auto& v : rows[r]) v *= inv;
    for (std::size_t q = 0; q < rows.size(); ++q) {
      if (q == r || rows[q][col] == 0) continue;
      Rational factor = rows[q][col];
      for (std::size_t j = 0; j < cols; ++j) rows[q][j] -= factor * rows[r][j];
    }
    pivots.push_back(col);
    ++r;
  }
  rows.resize(r);
  return {rows, pivots};
}

// Solves A c = b over Q with free variables pinned to zero (column order
// breaks ties). A is n x m, given as the augmented matrix [A | b].
std::optional<std::vector<Rational>> solve_rational(std::vector<Row> aug, std::size_t m) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t col = 0; col < m && r < aug.size(); ++col) {
    std::size_t p = r;
    while (p < aug.size() && aug[p][col] == 0) ++p;
    if (p == aug.size()) continue;
    std::swap(aug[r], aug[p]);
    Rational inv = Rational(1) / aug[r][col];
    for (auto& v : aug[r]) v *= inv;
    for (std::size_t q = 0; q < aug.size(); ++q) {
      if (q == r || aug[q][col] == 0) continue;
      Rational factor = aug[q][col];
      for (std::size_t j = 0; j <= m; ++j) aug[q][j] -= factor * aug[r][j];
    }
    pivots.push_back(col);
    ++r;
  }
  for (std::size_t q = r; q < aug.size(); ++q)
    if (aug[q][m] != 0) return std::nullopt;  // inconsistent
  std::vector<Rational> c(m, Rational(0));
  for (std::size_t i = 0; i < pivots.size(); ++i) c[pivots[i]] = aug[i][m];
  return c;
}

// Decides A n = b over the integers via column reduction to echelon form
// (H = A U with U unimodular), then forward substitution with divisibility
// checks. Free columns of H are identically zero, so the particular solution
// is unique up to them; they resolve to zero.
std::optional<std::vector<Integer>> solve_integer(std::vector<std::vector<Integer>> a,
                                                  std::vector<Integer> b) {
  const std::size_t d = a.size();
  const std::size_t m = d == 0 ? 0 : a[0].size();
  std::vector<std::vector<Integer>> u(m, std::vector<Integer>(m, 0));
  for (std::size_t i = 0; i < m; ++i) u[i][i] = 1;

  auto col_swap = [&](std::size_t i, std::size_t j) {
    for (std::size_t r = 0; r < d; ++r) std::swap(a[r][i], a[r][j]);
    for (std::size_t r = 0; r < m; ++r) std::swap(u[r][i], u[r][j]);
  };
  auto col_axpy = [&](std::size_t dst, std::size_t src, const Integer& q) {
    for (std::size_t r = 0; r < d; ++r) a[r][dst] -= q * a[r][src];
    for (std::size_t r = 0; r < m; ++r) u[r][dst] -= q * u[r][src];
  };
  auto col_negate = [&](std::size_t j) {
    for (std::size_t r = 0; r < d; ++r) a[r][j] = -a[r][j];
    for (std::size_t r = 0; r < m; ++r) u[r][j] = -u[r][j];
  };

  std::vector<std::ptrdiff_t> pivot_col_of_row(d, -1);
  std::size_t c = 0;
  for (std::size_t r = 0; r < d && c < m; ++r) {
    for (;;) {
      std::size_t best = m;
      for (std::size_t j = c; j < m; ++j) {
        if (a[r][j] == 0) continue;
        if (best == m || boost::multiprecision::abs(a[r][j]) <
                             boost::multiprecision::abs(a[r][best]))
          best = j;
      }
      if (best == m) break;  // row has no pivot among remaining columns
      if (best != c) col_swap(best, c);
      bool clean = true;
      for (std::size_t j = c + 1; j < m; ++j) {
        if (a[r][j] == 0) continue;
        Integer q = a[r][j] / a[r][c];
        if (q != 0) col_axpy(j, c, q);
        if (a[r][j] != 0) clean = false;
      }
      if (clean) break;
    }
    if (a[r][c] != 0) {
      if (a[r][c] < 0) col_negate(c);
      pivot_col_of_row[r] = static_cast<std::ptrdiff_t>(c);
      ++c;
    }
  }

  std::vector<Integer> y(m, 0);
  for (std::size_t r = 0; r < d; ++r) {
    Integer residual = b[r];
    for (std::size_t j = 0; j < c; ++j) residual -= a[r][j] * y[j];
    if (pivot_col_of_row[r] >= 0) {
      std::size_t p = static_cast<std::size_t>(pivot_col_of_row[r]);
      Integer quot = residual / a[r][p];
      if (quot * a[r][p] != residual) return std::nullopt;  // non-integral
      y[p] = quot;
    } else if (residual != 0) {
      return std::nullopt;  // inconsistent
    }
  }

  std::vector<Integer> n(m, 0);
  for (std::size_t i = 0; i < m; ++i) {
    Integer acc = 0;
    for (std::size_t j = 0; j < m; ++j) acc += u[i][j] * y[j];
    n[i] = acc;
  }
  return n;
}

}  // namespace

// ---------------------------------------------------------------------------
// QSubspace

QSubspace QSubspace::span_of(BasisPtr basis, std::vector<ExactReal> generators) {
  QSubspace v;
  v.basis_ = std::move(basis);
  for (const auto& g : generators)
    if (g.basis() != v.basis_)
      throw BasisMismatchError("span generator over " + g.basis()->id() + ", expected " +
                               v.basis_->id());
  v.origin_ = std::move(generators);
  std::vector<std::vector<Rational>> rows;
  rows.reserve(v.origin_.size());
  for (const auto& g : v.origin_) rows.push_back(g.coeffs());
  v.rref_ = rref(std::move(rows)).first;
  return v;
}

std::optional<std::vector<Rational>> QSubspace::membership(const ExactReal& x) const {
  if (x.basis() != basis_)
    throw BasisMismatchError("membership query over " + x.basis()->id() + ", expected " +
                             basis_->id());
  const std::size_t m = origin_.size();
  if (m == 0) {
    if (x.is_zero()) return std::vector<Rational>{};
    return std::nullopt;
  }
  const std::size_t dim = basis_->dimension();
  std::vector<std::vector<Rational>> aug(dim, std::vector<Rational>(m + 1, Rational(0)));
  for (std::size_t d = 0; d < dim; ++d) {
    for (std::size_t j = 0; j < m; ++j) aug[d][j] = origin_[j].coeffs()[d];
    aug[d][m] = x.coeffs()[d];
  }
  return solve_rational(std::move(aug), m);
}

// ---------------------------------------------------------------------------
// FgSubgroup

FgSubgroup FgSubgroup::generated_by(BasisPtr basis, std::vector<ExactReal> generators) {
  FgSubgroup g;
  g.basis_ = basis;
  for (const auto& gen : generators)
    if (gen.basis() != basis)
      throw BasisMismatchError("subgroup generator over " + gen.basis()->id() + ", expected " +
                               basis->id());
  g.generators_ = std::move(generators);
  g.qspan_ = std::make_shared<const QSubspace>(QSubspace::span_of(basis, g.generators_));
  return g;
}

bool FgSubgroup::is_trivial() const {
  return std::all_of(generators_.begin(), generators_.end(),
                     [](const ExactReal& g) { return g.is_zero(); });
}

std::optional<std::vector<Integer>> FgSubgroup::membership(const ExactReal& x) const {
  if (x.basis() != basis_)
    throw BasisMismatchError("membership query over " + x.basis()->id() + ", expected " +
                             basis_->id());
  const std::size_t m = generators_.size();
  if (m == 0) {
    if (x.is_zero()) return std::vector<Integer>{};
    return std::nullopt;
  }
  const std::size_t dim = basis_->dimension();
  std::vector<std::vector<Integer>> a(dim, std::vector<Integer>(m));
  std::vector<Integer> b(dim);
  for (std::size_t d = 0; d < dim; ++d) {
    Integer common = rat_den(x.coeffs()[d]);
    for (std::size_t j = 0; j < m; ++j)
      common = boost::multiprecision::lcm(common, rat_den(generators_[j].coeffs()[d]));
    for (std::size_t j = 0; j < m; ++j) {
      const Rational& q = generators_[j].coeffs()[d];
      a[d][j] = rat_num(q) * (common / rat_den(q));
    }
    const Rational& qx = x.coeffs()[d];
    b[d] = rat_num(qx) * (common / rat_den(qx));
  }
  auto n = solve_integer(std::move(a), std::move(b));
  if (!n) return std::nullopt;
  // certificates must recombine exactly before they leave the solver
  if (!(combine(*n) == x))
    throw std::logic_error("integer membership certificate failed to recombine");
  return n;
}

ExactReal FgSubgroup::combine(const std::vector<Integer>& coefficients) const {
  if (coefficients.size() != generators_.size())
    throw std::invalid_argument("certificate length does not match generator count");
  ExactReal acc = ExactReal::zero(basis_);
  for (std::size_t i = 0; i < generators_.size(); ++i)
    acc = acc + scale(generators_[i], Rational(coefficients[i]));
  return acc;
}

FgSubgroup scale_subgroup(const FgSubgroup& g, const Rational& c) {
  std::vector<ExactReal> scaled;
  scaled.reserve(g.generators().size());
  for (const auto& gen : g.generators()) scaled.push_back(scale(gen, c));
  return FgSubgroup::generated_by(g.basis(), std::move(scaled));
}

}  // namespace minflow::qlinear
