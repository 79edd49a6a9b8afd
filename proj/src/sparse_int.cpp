#include "runlab/sparse_int.hpp"

#include "runlab/errors.hpp"

#include <algorithm>
#include <cctype>

namespace runlab {

namespace {

using Term = SparseInt::Term;

struct Digit {
  SparseInt exp;
  long value;
};

std::vector<Term> naf_of(const BigInt& v) {
  std::vector<Term> out;
  if (v == 0) return out;
  const int s = v.sign();
  BigInt x = abs(v);
  std::size_t pos = 0;
  while (x != 0) {
    std::size_t z = boost::multiprecision::lsb(x);
    if (z) {
      x >>= z;
      pos += z;
    }
    if (!boost::multiprecision::bit_test(x, 1)) {
      out.push_back({SparseInt(pos), s});
      x -= 1;
    } else {
      out.push_back({SparseInt(pos), -s});
      x += 1;
    }
  }
  std::reverse(out.begin(), out.end());
  return out;
}

// Carry-propagating conversion of arbitrary signed digits to non-adjacent form.
std::vector<Term> normalize(std::vector<Digit> ds) {
  std::sort(ds.begin(), ds.end(), [](const Digit& a, const Digit& b) { return a.exp < b.exp; });
  std::vector<Digit> merged;
  for (auto& d : ds) {
    if (!merged.empty() && merged.back().exp == d.exp) {
      merged.back().value += d.value;
    } else {
      merged.push_back(std::move(d));
    }
  }
  std::vector<Term> out;
  std::size_t i = 0;
  long carry = 0;
  SparseInt carry_pos;
  const std::size_t n = merged.size();
  while (true) {
    SparseInt pos;
    long d;
    if (carry != 0) {
      pos = carry_pos;
      d = carry;
      if (i < n && merged[i].exp == carry_pos) {
        d += merged[i].value;
        ++i;
      }
    } else if (i < n) {
      pos = merged[i].exp;
      d = merged[i].value;
      ++i;
    } else {
      break;
    }
    carry = 0;
    if (d == 0) continue;
    SparseInt next_pos = pos + 1;
    if (d % 2 == 0) {
      carry = d / 2;
      carry_pos = std::move(next_pos);
      continue;
    }
    long next = (i < n && merged[i].exp == next_pos) ? merged[i].value : 0;
    long m = ((d + 2 * next) % 4 + 4) % 4;
    int z = (m == 1) ? 1 : -1;
    out.push_back({pos, z});
    carry = (d - z) / 2;
    carry_pos = std::move(next_pos);
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::vector<Digit> digits_of(const std::vector<Term>& ts) {
  std::vector<Digit> out;
  out.reserve(ts.size());
  for (const auto& t : ts) out.push_back({t.exp, t.sign});
  return out;
}

SparseInt canonical(const BigInt& v) {
  if (v == 0 || msb(boost::multiprecision::abs(v)) < SparseInt::kDenseBits) return SparseInt(v);
  return SparseInt::from_terms(naf_of(v));
}

BigInt dense_sum(const std::vector<Term>& ts) {
  BigInt acc = 0;
  for (const auto& t : ts) {
    auto e = t.exp.to_u64();
    if (!e) throw BudgetExceeded("value too large to materialize");
    BigInt p = BigInt(1) << *e;
    if (t.sign > 0) {
      acc += p;
    } else {
      acc -= p;
    }
  }
  return acc;
}

std::uint64_t powmod_u64(std::uint64_t base, std::uint64_t e, std::uint64_t m) {
  unsigned __int128 r = 1 % m;
  unsigned __int128 b = base % m;
  while (e) {
    if (e & 1) r = r * b % m;
    b = b * b % m;
    e >>= 1;
  }
  return static_cast<std::uint64_t>(r);
}

std::uint64_t totient(std::uint64_t q) {
  std::uint64_t result = q;
  std::uint64_t n = q;
  for (std::uint64_t f = 2; f * f <= n; ++f) {
    if (n % f == 0) {
      while (n % f == 0) n /= f;
      result -= result / f;
    }
  }
  if (n > 1) result -= result / n;
  return result;
}

std::int64_t inverse_mod(std::int64_t a, std::int64_t m) {
  std::int64_t g = m, x = 0, x1 = 1, a1 = a % m;
  while (a1 != 0) {
    std::int64_t q = g / a1;
    std::tie(g, a1) = std::make_pair(a1, g - q * a1);
    std::tie(x, x1) = std::make_pair(x1, x - q * x1);
  }
  return ((x % m) + m) % m;
}

// 2^e mod m for e >= 0.
std::uint64_t pow2_mod(const SparseInt& e, std::uint64_t m) {
  if (m == 1) return 0;
  if (auto small = e.to_u64()) return powmod_u64(2, *small, m);
  if (e.is_dense()) {
    auto dense = e.to_bigint(SparseInt::kDenseBits);
    BigInt r;
    BigInt two = 2;
    BigInt mod = m;
    mpz_powm(r.backend().data(), two.backend().data(), dense->backend().data(), mod.backend().data());
    return r.convert_to<std::uint64_t>();
  }
  // e >= 2^kDenseBits exceeds the 2-adic valuation of m.
  std::uint64_t a = 0;
  std::uint64_t q = m;
  while (q % 2 == 0) {
    q /= 2;
    ++a;
  }
  if (q == 1) return 0;
  std::uint64_t rq = powmod_u64(2, e.mod(totient(q)), q);
  std::uint64_t two_a = (std::uint64_t{1} << a) % q;
  auto inv = static_cast<std::uint64_t>(inverse_mod(static_cast<std::int64_t>(two_a), static_cast<std::int64_t>(q)));
  unsigned __int128 k = static_cast<unsigned __int128>(rq) * inv % q;
  return static_cast<std::uint64_t>((k << a) % m);
}

std::string render_compact(const SparseInt& x);

std::string render_exp(const SparseInt& e) {
  if (auto v = e.to_u64()) return std::to_string(*v);
  return "(" + render_compact(e) + ")";
}

std::string render_compact(const SparseInt& x) {
  if (x.is_zero()) return "0";
  if (x.is_dense() && msb(abs(*x.to_bigint(SparseInt::kDenseBits))) < 64) {
    return x.to_bigint(SparseInt::kDenseBits)->str();
  }
  std::string out;
  BigInt low = 0;
  for (const auto& t : x.terms()) {
    auto e = t.exp.to_u64();
    if (e && *e < 64) {
      BigInt p = BigInt(1) << *e;
      low += t.sign > 0 ? p : BigInt(-p);
      continue;
    }
    if (out.empty()) {
      if (t.sign < 0) out += "-";
    } else {
      out += t.sign < 0 ? "-" : "+";
    }
    out += "2^" + render_exp(t.exp);
  }
  if (low > 0) {
    out += (out.empty() ? "" : "+") + low.str();
  } else if (low < 0) {
    out += low.str();
  }
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  SparseInt parse() {
    SparseInt v = expr();
    skip();
    if (i_ != s_.size()) fail("unexpected character");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("cannot parse integer '" + std::string(s_) + "': " + what, 1, i_ + 1);
  }
  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  bool eat(char c) {
    skip();
    if (i_ < s_.size() && s_[i_] == c) {
      ++i_;
      return true;
    }
    return false;
  }
  SparseInt expr() {
    bool neg = false;
    if (eat('-')) {
      neg = true;
    } else {
      eat('+');
    }
    SparseInt v = product();
    if (neg) v = -v;
    while (true) {
      if (eat('+')) {
        v += product();
      } else if (eat('-')) {
        v -= product();
      } else {
        return v;
      }
    }
  }
  SparseInt product() {
    SparseInt v = power();
    while (eat('*')) v *= power();
    return v;
  }
  SparseInt power() {
    SparseInt base = primary();
    if (!eat('^')) return base;
    SparseInt e = power();
    if (e.sign() < 0) fail("negative exponent");
    if (base == 2) return SparseInt::pow2(e);
    auto b = base.to_bigint(SparseInt::kDenseBits);
    auto k = e.to_u64();
    if (!b || !k) fail("power too large");
    if (*b == 0 || *b == 1 || *b == -1) return SparseInt(BigInt(pow(*b, static_cast<unsigned>(std::min<std::uint64_t>(*k, 2)))));
    if ((msb(abs(*b)) + 1) * *k > (std::uint64_t{1} << 22)) fail("power too large");
    return SparseInt(BigInt(pow(*b, static_cast<unsigned>(*k))));
  }
  SparseInt primary() {
    skip();
    if (eat('(')) {
      SparseInt v = expr();
      if (!eat(')')) fail("missing ')'");
      return v;
    }
    std::size_t start = i_;
    while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
    if (start == i_) fail("expected a number");
    return SparseInt(BigInt(std::string(s_.substr(start, i_ - start))));
  }

  std::string_view s_;
  std::size_t i_ = 0;
};

}  // namespace

SparseInt::SparseInt(const BigInt& v) {
  if (v == 0 || msb(boost::multiprecision::abs(v)) < kDenseBits) {
    dense_ = v;
  } else {
    *this = from_terms(naf_of(v));
  }
}

SparseInt SparseInt::from_terms(std::vector<Term> ts) {
  std::vector<Term> t = normalize(digits_of(ts));
  SparseInt r;
  if (t.empty()) return r;
  SparseInt fl = t[0].exp;
  if (t.size() > 1 && t[1].sign != t[0].sign) fl -= 1;
  if (fl < SparseInt(kDenseBits)) {
    r.dense_ = dense_sum(t);
    return r;
  }
  r.terms_ = std::move(t);
  return r;
}

SparseInt SparseInt::pow2(const SparseInt& e) { return SparseInt(1).shl(e); }

SparseInt SparseInt::parse(std::string_view text) { return Parser(text).parse(); }

int SparseInt::sign() const { return terms_.empty() ? dense_.sign() : terms_[0].sign; }

bool SparseInt::is_pow2() const {
  if (!terms_.empty()) return terms_.size() == 1 && terms_[0].sign > 0;
  return dense_ > 0 && boost::multiprecision::lsb(dense_) == msb(dense_);
}

bool SparseInt::is_odd() const {
  if (!terms_.empty()) return terms_.back().exp.is_zero();
  return dense_ != 0 && boost::multiprecision::bit_test(boost::multiprecision::abs(dense_), 0);
}

std::optional<std::uint64_t> SparseInt::to_u64() const {
  if (!terms_.empty() || dense_ < 0) return std::nullopt;
  if (dense_ != 0 && msb(dense_) >= 64) return std::nullopt;
  return dense_.convert_to<std::uint64_t>();
}

std::optional<BigInt> SparseInt::to_bigint(std::size_t max_bits) const {
  if (terms_.empty()) {
    if (dense_ != 0 && msb(boost::multiprecision::abs(dense_)) >= max_bits) return std::nullopt;
    return dense_;
  }
  if (abs().floor_log2() >= SparseInt(max_bits)) return std::nullopt;
  return dense_sum(terms_);
}

std::vector<SparseInt::Term> SparseInt::terms() const {
  if (terms_.empty()) return naf_of(dense_);
  return terms_;
}

SparseInt SparseInt::floor_log2() const {
  if (sign() <= 0) throw InvalidParameter("floor_log2 of a non-positive value");
  if (terms_.empty()) return SparseInt(msb(dense_));
  if (terms_.size() > 1 && terms_[1].sign < 0) return terms_[0].exp - 1;
  return terms_[0].exp;
}

SparseInt SparseInt::floor_div_pow2(const SparseInt& s) const {
  if (s.sign() < 0) throw InvalidParameter("negative shift");
  if (s.is_zero()) return *this;
  if (terms_.empty()) {
    auto k = s.to_u64();
    if (k && *k <= (std::uint64_t{1} << 32)) {
      BigInt r;
      mpz_fdiv_q_2exp(r.backend().data(), dense_.backend().data(), *k);
      return SparseInt(r);
    }
    return dense_.sign() >= 0 ? SparseInt(0) : SparseInt(-1);
  }
  std::vector<Term> high;
  int low_sign = 0;
  for (const auto& t : terms_) {
    if (t.exp >= s) {
      high.push_back({t.exp - s, t.sign});
    } else if (low_sign == 0) {
      low_sign = t.sign;
    }
  }
  SparseInt r = from_terms(std::move(high));
  if (low_sign < 0) r -= 1;
  return r;
}

SparseInt SparseInt::shl(const SparseInt& s) const {
  if (s.sign() < 0) throw InvalidParameter("negative shift");
  if (is_zero()) return *this;
  if (terms_.empty()) {
    auto k = s.to_u64();
    if (k && msb(boost::multiprecision::abs(dense_)) + *k < kDenseBits) return SparseInt(BigInt(dense_ << *k));
  }
  std::vector<Term> ts = terms();
  for (auto& t : ts) t.exp += s;
  return from_terms(std::move(ts));
}

std::uint64_t SparseInt::mod(std::uint64_t m) const {
  if (m == 0 || m >= (std::uint64_t{1} << 32)) throw InvalidParameter("modulus out of range");
  if (terms_.empty()) return mpz_fdiv_ui(dense_.backend().data(), m);
  std::uint64_t acc = 0;
  for (const auto& t : terms_) {
    std::uint64_t r = pow2_mod(t.exp, m);
    acc = t.sign > 0 ? (acc + r) % m : (acc + m - r) % m;
  }
  return acc;
}

std::uint64_t SparseInt::hash() const {
  if (terms_.empty()) {
    if (dense_ >= std::numeric_limits<std::int64_t>::min() && dense_ <= std::numeric_limits<std::int64_t>::max()) {
      return mix64(static_cast<std::uint64_t>(dense_.convert_to<std::int64_t>()));
    }
    std::uint64_t h = mix64(dense_.sign() < 0 ? 0x2545F4914F6CDD1DULL : 0x9E3779B97F4A7C15ULL);
    const mpz_t& z = dense_.backend().data();
    for (long i = 0; i < static_cast<long>(mpz_size(z)); ++i) {
      h = mix64(h ^ static_cast<std::uint64_t>(mpz_getlimbn(z, i)));
    }
    return h;
  }
  std::uint64_t h = 0xD1B54A32D192ED03ULL;
  for (const auto& t : terms_) {
    h = mix64(h ^ t.exp.hash() ^ (t.sign < 0 ? 0xA0761D6478BD642FULL : 0));
  }
  return h;
}

std::string SparseInt::to_string(std::size_t decimal_bits) const {
  if (auto v = to_bigint(decimal_bits)) return v->str();
  return render_compact(*this);
}

SparseInt SparseInt::operator-() const {
  SparseInt r;
  if (terms_.empty()) {
    r.dense_ = -dense_;
    return r;
  }
  r.terms_ = terms_;
  for (auto& t : r.terms_) t.sign = -t.sign;
  return r;
}

SparseInt operator+(const SparseInt& a, const SparseInt& b) {
  if (a.terms_.empty() && b.terms_.empty()) return canonical(a.dense_ + b.dense_);
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  std::vector<Digit> ds = digits_of(a.terms());
  for (const auto& t : b.terms()) ds.push_back({t.exp, t.sign});
  SparseInt r;
  auto ts = normalize(std::move(ds));
  if (ts.empty()) return r;
  return SparseInt::from_terms(std::move(ts));
}

SparseInt operator-(const SparseInt& a, const SparseInt& b) { return a + (-b); }

SparseInt operator*(const SparseInt& a, const SparseInt& b) {
  if (a.terms_.empty() && b.terms_.empty()) return canonical(a.dense_ * b.dense_);
  if (a.is_zero() || b.is_zero()) return SparseInt();
  std::vector<Digit> ds;
  auto ta = a.terms();
  auto tb = b.terms();
  ds.reserve(ta.size() * tb.size());
  for (const auto& x : ta) {
    for (const auto& y : tb) ds.push_back({x.exp + y.exp, x.sign * y.sign});
  }
  return SparseInt::from_terms([&] {
    auto ts = normalize(std::move(ds));
    return ts;
  }());
}

bool operator==(const SparseInt& a, const SparseInt& b) {
  if (a.terms_.empty() != b.terms_.empty()) return false;
  if (a.terms_.empty()) return a.dense_ == b.dense_;
  if (a.terms_.size() != b.terms_.size()) return false;
  for (std::size_t i = 0; i < a.terms_.size(); ++i) {
    if (a.terms_[i].sign != b.terms_[i].sign || !(a.terms_[i].exp == b.terms_[i].exp)) return false;
  }
  return true;
}

std::strong_ordering operator<=>(const SparseInt& a, const SparseInt& b) {
  if (a.terms_.empty() && b.terms_.empty()) {
    int c = a.dense_.compare(b.dense_);
    return c < 0 ? std::strong_ordering::less : c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
  }
  if (a.terms_.empty()) return b.sign() > 0 ? std::strong_ordering::less : std::strong_ordering::greater;
  if (b.terms_.empty()) return a.sign() > 0 ? std::strong_ordering::greater : std::strong_ordering::less;
  int s = (a - b).sign();
  return s < 0 ? std::strong_ordering::less : s > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
}

SparseInt min(const SparseInt& a, const SparseInt& b) { return b < a ? b : a; }
SparseInt max(const SparseInt& a, const SparseInt& b) { return a < b ? b : a; }

SparseRational::SparseRational(SparseInt n, SparseInt d) : num(std::move(n)), den(std::move(d)) {
  if (den.is_zero()) throw InvalidParameter("zero denominator");
  if (den.sign() < 0) {
    num = -num;
    den = -den;
  }
}

SparseRational SparseRational::from(const Rational& q) {
  return SparseRational(SparseInt(BigInt(numerator(q))), SparseInt(BigInt(denominator(q))));
}

std::optional<Rational> SparseRational::to_rational() const {
  auto n = num.to_bigint();
  auto d = den.to_bigint();
  if (!n || !d) return std::nullopt;
  return Rational(*n, *d);
}

std::string SparseRational::to_string() const {
  if (auto q = to_rational()) return runlab::to_string(*q);
  if (den == 1) return num.to_string();
  auto wrap = [](std::string t) {
    return t.find_first_of("+-", 1) == std::string::npos ? t : "(" + t + ")";
  };
  return wrap(num.to_string()) + "/" + wrap(den.to_string());
}

SparseRational operator*(const SparseRational& a, const SparseRational& b) {
  return SparseRational(a.num * b.num, a.den * b.den);
}

SparseRational operator/(const SparseRational& a, const SparseRational& b) {
  if (b.num.is_zero()) throw InvalidParameter("division by zero");
  return SparseRational(a.num * b.den, a.den * b.num);
}

std::strong_ordering operator<=>(const SparseRational& a, const SparseRational& b) {
  return a.num * b.den <=> b.num * a.den;
}

bool operator==(const SparseRational& a, const SparseRational& b) { return a.num * b.den == b.num * a.den; }

}  // namespace runlab
