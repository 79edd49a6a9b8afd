#include "runlab/speeds.hpp"

#include "runlab/errors.hpp"

#include <cctype>
#include <fstream>
#include <functional>
#include <sstream>

namespace runlab {

namespace {

constexpr std::uint64_t kMaxPowParts = 1024;
constexpr unsigned kRootScaleBits = 32;

SparseRational sr(const Rational& q) { return SparseRational::from(q); }

Interval point(const SparseRational& v) { return {v, v}; }

bool is_pow2_u64(std::uint64_t b) { return b && (b & (b - 1)) == 0; }

unsigned log2_u64(std::uint64_t b) { return static_cast<unsigned>(63 - __builtin_clzll(b)); }

// floor(x / b) and x mod b for x >= 0.
std::pair<Index, std::uint64_t> div_small(const Index& x, std::uint64_t b) {
  if (b == 1) return {x, 0};
  if (is_pow2_u64(b)) return {x.floor_div_pow2(log2_u64(b)), x.mod(b)};
  if (auto d = x.to_bigint(Index::kDenseBits)) {
    BigInt q = *d / b;
    return {Index(q), static_cast<std::uint64_t>(BigInt(*d - q * b).convert_to<std::uint64_t>())};
  }
  throw PrecisionError("division of " + x.to_string() + " by " + std::to_string(b) +
                       " is outside the sparse integer's exact operations");
}

Index small_pow(const Index& n, std::uint64_t a) {
  Index r = 1;
  Index base = n;
  while (a) {
    if (a & 1) r *= base;
    a >>= 1;
    if (a) base *= base;
  }
  return r;
}

std::uint64_t u64_of(const BigInt& v) { return v.convert_to<std::uint64_t>(); }

// Certified interval for log2 n, n >= 1.
Interval log2_interval(const Index& n) {
  if (auto d = n.to_bigint(Index::kDenseBits)) {
    auto [lo, hi] = log2_bounds(*d);
    return {sr(lo), sr(hi)};
  }
  Index e = n.floor_log2();
  if (n.is_pow2()) return point(e);
  return {SparseRational(e), SparseRational(e + 1)};
}

// floor(log2(num/den)) for positive integers.
Index floor_log2_ratio(const Index& num, const Index& den) {
  Index k = num.floor_log2() - den.floor_log2();
  bool ok = k.sign() >= 0 ? num >= den.shl(k) : num.shl(-k) >= den;
  return ok ? k : k - 1;
}

Index ceil_div_pow2_times(const BigInt& num, const BigInt& den, const Index& t) {
  // least n with num * n >= den * 2^t
  if (auto tt = t.to_u64(); tt && *tt < 8 * Index::kDenseBits) {
    BigInt target = den << *tt;
    BigInt q = target / num;
    if (q * num < target) q += 1;
    return Index(q);
  }
  Index e = t + Index(BigInt(msb(den) + 1)) - Index(BigInt(msb(num)));
  return Index::pow2(max(e, Index(0)));
}

std::vector<std::pair<BigInt, Rational>> read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParameter("cannot open speed table " + path);
  std::vector<std::pair<BigInt, Rational>> rows;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw InvalidParameter("speed table " + path + " row " + std::to_string(row) + ": expected 'n,phi'");
    }
    std::string a = line.substr(0, comma), b = line.substr(comma + 1);
    if (row == 1 && (a.empty() || !std::isdigit(static_cast<unsigned char>(a[0])))) continue;  // header
    try {
      BigInt n(a);
      rows.emplace_back(n, parse_rational(b));
    } catch (const std::exception& e) {
      throw InvalidParameter("speed table " + path + " row " + std::to_string(row) + ": cannot parse '" + line + "'");
    }
    const auto& [n, v] = rows.back();
    if (n < 1 || v <= 0) {
      throw InvalidParameter("speed table " + path + " row " + std::to_string(row) + ": need n >= 1 and phi > 0");
    }
    if (rows.size() > 1) {
      const auto& prev = rows[rows.size() - 2];
      if (n <= prev.first) {
        throw InvalidParameter("speed table " + path + " row " + std::to_string(row) + ": n not increasing");
      }
      if (v < prev.second) {
        throw InvalidParameter("speed table " + path + " row " + std::to_string(row) + ": phi decreases");
      }
    }
  }
  if (rows.empty()) throw InvalidParameter("speed table " + path + " has no rows");
  return rows;
}

}  // namespace

BigInt floor_log2(const Rational& q) {
  if (q <= 0) throw InvalidParameter("floor_log2 of a non-positive rational");
  BigInt num = numerator(q), den = denominator(q);
  BigInt k = BigInt(msb(num)) - BigInt(msb(den));
  bool ok = k >= 0 ? num >= (den << k.convert_to<std::size_t>()) : (num << BigInt(-k).convert_to<std::size_t>()) >= den;
  return ok ? k : BigInt(k - 1);
}

Speed Speed::parse(const std::string& spec) {
  Speed s;
  if (spec == "log2") {
    s.kind_ = Kind::log2;
    s.name_ = "log2";
    return s;
  }
  if (spec == "loglog") {
    s.kind_ = Kind::loglog;
    s.name_ = "loglog";
    return s;
  }
  auto colon = spec.find(':');
  std::string head = spec.substr(0, colon);
  std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (head == "pow" && !arg.empty()) return power(parse_rational(arg));
  if (head == "linear" && !arg.empty()) return linear(parse_rational(arg));
  if (head == "custom-table" && !arg.empty()) return table(read_table(arg), spec);
  throw InvalidParameter("unknown speed '" + spec + "' (expected log2, loglog, pow:<b>, linear:<c>, custom-table:<file>)");
}

Speed Speed::power(const Rational& beta) {
  if (beta <= 0) throw InvalidParameter("pow exponent must be positive");
  if (numerator(beta) > kMaxPowParts || denominator(beta) > kMaxPowParts) {
    throw InvalidParameter("pow exponent numerator and denominator must be <= 1024");
  }
  Speed s;
  s.kind_ = Kind::pow;
  s.param_ = beta;
  s.name_ = "pow:" + to_string(beta);
  return s;
}

Speed Speed::linear(const Rational& c) {
  if (c <= 0) throw InvalidParameter("linear coefficient must be positive");
  Speed s;
  s.kind_ = Kind::linear;
  s.param_ = c;
  s.name_ = "linear:" + to_string(c);
  return s;
}

Speed Speed::table(std::vector<std::pair<BigInt, Rational>> rows, std::string name) {
  if (rows.empty()) throw InvalidParameter("empty speed table");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].first < 1 || rows[i].second <= 0) {
      throw InvalidParameter("speed table row " + std::to_string(i + 1) + ": need n >= 1 and phi > 0");
    }
    if (i > 0 && (rows[i].first <= rows[i - 1].first || rows[i].second < rows[i - 1].second)) {
      throw InvalidParameter("speed table row " + std::to_string(i + 1) + ": not monotone");
    }
  }
  Speed s;
  s.kind_ = Kind::table;
  s.rows_ = std::move(rows);
  s.name_ = std::move(name);
  return s;
}

Interval Speed::eval(const Index& n) const {
  if (n < 1) throw OutOfRange("speeds are defined for n >= 1");
  switch (kind_) {
    case Kind::log2: {
      if (n < 2) return point(SparseRational(1));
      return log2_interval(n);
    }
    case Kind::pow: {
      std::uint64_t a = u64_of(numerator(param_));
      std::uint64_t b = u64_of(denominator(param_));
      if (auto d = n.to_bigint(Index::kDenseBits)) {
        BigInt big = pow(*d, static_cast<unsigned>(a)) << (kRootScaleBits * b);
        BigInt r = iroot_floor(big, b);
        BigInt scale = BigInt(1) << kRootScaleBits;
        Rational lo(r, scale);
        if (pow(r, static_cast<unsigned>(b)) == big) return point(sr(lo));
        return {sr(lo), sr(Rational(BigInt(r + 1), scale))};
      }
      Index e = n.floor_log2();
      Index ea = e * Index(a);
      if (n.is_pow2()) {
        auto [q, rem] = div_small(ea, b);
        if (rem == 0) return point(SparseRational(Index::pow2(q)));
      }
      auto [qlo, rlo] = div_small(ea, b);
      auto [qhi, rhi] = div_small(ea + Index(a), b);
      return {SparseRational(Index::pow2(qlo)), SparseRational(Index::pow2(rhi ? qhi + 1 : qhi))};
    }
    case Kind::linear:
      return point(SparseRational(Index(BigInt(numerator(param_))) * n, Index(BigInt(denominator(param_)))));
    case Kind::loglog: {
      if (n < 4) return point(SparseRational(1));
      if (auto d = n.to_bigint(Index::kDenseBits)) {
        auto [lo, hi] = log2_bounds(*d);
        return {sr(log2_bounds(lo).first), sr(log2_bounds(hi).second)};
      }
      Index e = n.floor_log2();
      Interval a = log2_interval(e);
      Interval b = log2_interval(n.is_pow2() ? e : e + 1);
      return {a.lo, b.hi};
    }
    case Kind::table: {
      const Rational* v = &rows_.front().second;
      for (const auto& [k, val] : rows_) {
        if (Index(k) <= n) {
          v = &val;
        } else {
          break;
        }
      }
      return point(sr(*v));
    }
  }
  throw Unsupported("unknown speed kind");
}

Index Speed::floor_log2(const Index& n) const {
  if (n < 1) throw OutOfRange("speeds are defined for n >= 1");
  switch (kind_) {
    case Kind::log2:
      if (n < 2) return 0;
      return n.floor_log2().floor_log2();
    case Kind::pow: {
      std::uint64_t a = u64_of(numerator(param_));
      std::uint64_t b = u64_of(denominator(param_));
      return div_small(small_pow(n, a).floor_log2(), b).first;
    }
    case Kind::linear: {
      Index k = floor_log2_ratio(Index(BigInt(numerator(param_))) * n, Index(BigInt(denominator(param_))));
      return k.sign() < 0 ? Index(0) : k;
    }
    case Kind::loglog:
      if (n < 4) return 0;
      return n.floor_log2().floor_log2().floor_log2();
    case Kind::table: {
      Interval v = eval(n);
      auto q = *v.lo.to_rational();
      if (q < 1) return 0;
      return Index(runlab::floor_log2(q));
    }
  }
  throw Unsupported("unknown speed kind");
}

Interval Speed::ratio(const Index& n) const {
  Interval v = eval(n);
  SparseRational nn(n);
  return {nn / v.hi, nn / v.lo};
}

Index Speed::least_with_floor_log2(const Index& t) const {
  if (t.sign() <= 0) return 1;
  switch (kind_) {
    case Kind::log2:
      return Index::pow2(Index::pow2(t));
    case Kind::loglog:
      return Index::pow2(Index::pow2(Index::pow2(t)));
    case Kind::pow: {
      std::uint64_t a = u64_of(numerator(param_));
      std::uint64_t b = u64_of(denominator(param_));
      Index bt = t * Index(b);
      auto [q, rem] = div_small(bt, a);
      if (rem == 0) return Index::pow2(q);
      if (auto e = bt.to_u64(); e && *e <= 8 * Index::kDenseBits) {
        BigInt target = BigInt(1) << *e;
        BigInt r = iroot_floor(target, a);
        if (pow(r, static_cast<unsigned>(a)) < target) r += 1;
        return Index(r);
      }
      return Index::pow2(q + 1);
    }
    case Kind::linear:
      return ceil_div_pow2_times(numerator(param_), denominator(param_), t);
    case Kind::table: {
      for (std::size_t i = 0; i < rows_.size(); ++i) {
        const Rational& v = rows_[i].second;
        if (v >= 1 && Index(runlab::floor_log2(v)) >= t) return i == 0 ? Index(1) : Index(rows_[i].first);
      }
      throw BudgetExceeded("speed table " + name_ + " never reaches [log2 phi] >= " + t.to_string());
    }
  }
  throw Unsupported("unknown speed kind");
}

BigInt ceil_pow(const BigInt& n, const Rational& exponent) {
  std::uint64_t a = u64_of(numerator(exponent));
  std::uint64_t b = u64_of(denominator(exponent));
  BigInt big = pow(n, static_cast<unsigned>(a));
  BigInt r = iroot_floor(big, b);
  if (pow(r, static_cast<unsigned>(b)) < big) r += 1;
  return r;
}

namespace {

using RatioFn = std::function<Interval(const Index&)>;

// Geometric grid 2^j up to 2^4096, then towers 2^(previous), then the bound.
std::vector<Index> witness_grid(const Index& bound, bool dense_only) {
  std::vector<Index> grid;
  for (std::size_t j = 0; j <= Index::kDenseBits; ++j) {
    Index g = Index::pow2(j);
    if (g > bound) break;
    grid.push_back(g);
  }
  if (!dense_only) {
    Index g = Index::pow2(Index::kDenseBits);
    for (int level = 0; level < 8; ++level) {
      g = Index::pow2(g);
      if (g > bound) break;
      grid.push_back(g);
    }
  }
  if (grid.empty() || grid.back() < bound) grid.push_back(bound);
  return grid;
}

ClassWitness search(const RatioFn& ratio, const std::vector<Rational>& targets, const Index& bound, bool dense_only) {
  for (std::size_t i = 1; i < targets.size(); ++i) {
    if (targets[i] <= targets[i - 1]) throw InvalidParameter("witness targets must be strictly increasing");
  }
  if (bound < 1) throw InvalidParameter("search bound must be >= 1");
  ClassWitness w;
  w.search_bound = bound;
  std::vector<Index> grid = witness_grid(bound, dense_only);
  std::size_t pos = 0;
  for (const Rational& m : targets) {
    SparseRational target = SparseRational::from(m);
    while (pos < grid.size() && ratio(grid[pos]).lo < target) ++pos;
    if (pos == grid.size()) {
      w.missed = m;
      return w;
    }
    Index hi = grid[pos];
    if (pos > 0 && hi.is_dense()) {
      Index lo = grid[pos - 1];
      if (!(ratio(lo).lo < target)) lo = hi;
      while (hi - lo > 1) {
        Index mid = (lo + hi).half_floor();
        if (ratio(mid).lo >= target) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
    }
    w.ladder.push_back({m, hi, ratio(hi)});
  }
  w.witnessed = true;
  return w;
}

}  // namespace

ClassWitness ratio_divergence_witness(const Speed& phi, const std::vector<Rational>& targets, const Index& bound) {
  ClassWitness w = search([&](const Index& n) { return phi.ratio(n); }, targets, bound, false);
  w.condition = WitnessCondition::ratio_divergence;
  return w;
}

ClassWitness class_a_witness(const Speed& phi, const Rational& alpha, const std::vector<Rational>& targets,
                             const Index& bound) {
  if (alpha <= 0 || alpha > 1) throw InvalidParameter("alpha must lie in (0, 1]");
  if (!bound.is_dense() || bound.floor_log2() >= Index(Index::kDenseBits / 2)) {
    throw InvalidParameter("class-A search bound must be below 2^2048");
  }
  Rational e = alpha + 1;
  ClassWitness w = search(
      [&](const Index& n) {
        Interval v = phi.eval(Index(ceil_pow(*n.to_bigint(), e)));
        SparseRational nn(n);
        return Interval{nn / v.hi, nn / v.lo};
      },
      targets, bound, true);
  w.condition = WitnessCondition::class_a;
  w.alpha = alpha;
  return w;
}

}  // namespace runlab
