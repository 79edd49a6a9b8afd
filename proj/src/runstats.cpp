#include "runlab/runstats.hpp"

#include "runlab/errors.hpp"
#include "runlab/rng.hpp"
#include "runlab/words.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <thread>

namespace runlab {

namespace {

void check_n(std::uint64_t n) {
  if (n < 1 || n > kDpLimit) {
    throw OutOfRange("n = " + std::to_string(n) + " outside the DP range [1, " + std::to_string(kDpLimit) + "]");
  }
}

BigInt pow2(std::uint64_t e) { return BigInt(1) << e; }

unsigned pool_size(unsigned threads, std::size_t jobs) {
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(jobs, 1)));
}

// A(n, k) for several k at once, in parallel.
std::map<std::uint64_t, BigInt> count_many(std::uint64_t n, std::vector<std::uint64_t> ks) {
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  std::vector<BigInt> out(ks.size());
  unsigned threads = pool_size(0, ks.size());
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < ks.size(); i += threads) out[i] = count_no_run(n, ks[i]);
    });
  }
  for (auto& th : pool) th.join();
  std::map<std::uint64_t, BigInt> m;
  for (std::size_t i = 0; i < ks.size(); ++i) m.emplace(ks[i], std::move(out[i]));
  return m;
}

}  // namespace

BigInt count_no_run(std::uint64_t n, std::uint64_t k) {
  if (n > kDpLimit) throw OutOfRange("n exceeds the DP budget");
  if (k == 0) return 0;
  if (k > n) return pow2(n);
  if (2 * k > n) {
    // at most one run of length >= k fits
    BigInt bad = pow2(n - k);
    if (n > k) bad += BigInt(n - k) * pow2(n - k - 1);
    return pow2(n) - bad;
  }
  // A(m) = 2^m for m < k, A(k) = 2^k - 1, A(m) = 2 A(m-1) - A(m-k-1)
  std::vector<BigInt> ring(k + 1);
  for (std::uint64_t m = 0; m < k; ++m) ring[m] = pow2(m);
  ring[k] = pow2(k) - 1;
  BigInt tmp;
  for (std::uint64_t m = k + 1; m <= n; ++m) {
    const BigInt& prev = ring[(m - 1) % (k + 1)];
    BigInt& slot = ring[m % (k + 1)];
    mpz_mul_2exp(tmp.backend().data(), prev.backend().data(), 1);
    mpz_sub(slot.backend().data(), tmp.backend().data(), slot.backend().data());
  }
  return ring[n % (k + 1)];
}

Rational exact_run_cdf(std::uint64_t n, std::uint64_t k) {
  check_n(n);
  if (k < 1 || k > n + 1) throw OutOfRange("k must lie in [1, n + 1]");
  return Rational(count_no_run(n, k), pow2(n));
}

Rational RunDistribution::cdf(std::uint64_t k) const {
  if (k > n + 1) return 1;
  return Rational(table[k], pow2(n));
}

Rational RunDistribution::pmf(std::uint64_t k) const {
  if (k > n) return 0;
  return Rational(BigInt(table[k + 1] - table[k]), pow2(n));
}

Rational RunDistribution::mean() const {
  BigInt acc = 0;
  for (std::uint64_t k = 1; k <= n; ++k) acc += pow2(n) - table[k];
  return Rational(acc, pow2(n));
}

std::string RunDistribution::to_csv() const {
  std::ostringstream os;
  os << "k,A(n;k),P(r_n<k)\n";
  for (std::uint64_t k = 0; k <= n + 1; ++k) os << k << ',' << table[k].str() << ',' << to_string(cdf(k)) << '\n';
  return os.str();
}

RunDistribution run_distribution(std::uint64_t n) {
  check_n(n);
  if (n > kTableLimit) {
    throw BudgetExceeded("full distribution table limited to n <= " + std::to_string(kTableLimit));
  }
  RunDistribution d;
  d.n = n;
  std::vector<std::uint64_t> ks;
  for (std::uint64_t k = 0; k <= n + 1; ++k) ks.push_back(k);
  auto m = count_many(n, ks);
  for (std::uint64_t k = 0; k <= n + 1; ++k) d.table.push_back(m.at(k));
  return d;
}

std::pair<Rational, Rational> mean_run_length(std::uint64_t n) {
  check_n(n);
  if (n <= 1024) {
    Rational m = run_distribution(n).mean();
    return {m, m};
  }
  std::uint64_t big_k = msb(BigInt(n)) + 64;
  std::vector<std::uint64_t> ks;
  for (std::uint64_t k = 1; k <= std::min(big_k, n); ++k) ks.push_back(k);
  auto m = count_many(n, ks);
  BigInt acc = 0;
  for (auto& [k, a] : m) acc += pow2(n) - a;
  Rational lo(acc, pow2(n));
  // P(r_n >= k) <= n 2^-k, so the remaining terms sum to at most n 2^-K
  Rational hi = big_k >= n ? lo : lo + Rational(BigInt(n), pow2(big_k));
  return {lo, hi};
}

Rational ERSample::mean() const {
  BigInt acc = 0;
  for (const auto& t : data) acc += t.r;
  return Rational(acc, BigInt(trials));
}

std::uint64_t ERSample::min() const {
  std::uint64_t m = UINT64_MAX;
  for (const auto& t : data) m = std::min(m, t.r);
  return m;
}

std::uint64_t ERSample::max() const {
  std::uint64_t m = 0;
  for (const auto& t : data) m = std::max(m, t.r);
  return m;
}

std::uint64_t ERSample::quantile(const Rational& q) const {
  std::vector<std::uint64_t> r;
  for (const auto& t : data) r.push_back(t.r);
  std::sort(r.begin(), r.end());
  Rational pos = q * Rational(BigInt(trials));
  BigInt c = numerator(pos) / denominator(pos);
  if (Rational(c) < pos) c += 1;
  std::uint64_t idx = c <= 0 ? 0 : c.convert_to<std::uint64_t>() - 1;
  return r[std::min<std::uint64_t>(idx, r.size() - 1)];
}

std::string ERSample::to_csv() const {
  std::ostringstream os;
  os << "trial,seed,r_n,log2n_lo,log2n_hi,ratio_lo,ratio_hi\n";
  std::string lo = to_string(log2n_lo), hi = to_string(log2n_hi);
  for (const auto& t : data) {
    Rational r(BigInt(t.r));
    os << t.trial << ',' << t.seed << ',' << t.r << ',' << lo << ',' << hi << ',' << to_string(r / log2n_hi) << ','
       << to_string(r / log2n_lo) << '\n';
  }
  return os.str();
}

nlohmann::json ERSample::summary_json() const {
  return {{"n", n},
          {"trials", trials},
          {"master_seed", master_seed},
          {"log2n_lo", to_string(log2n_lo)},
          {"log2n_hi", to_string(log2n_hi)},
          {"mean_r", to_string(mean())},
          {"min_r", min()},
          {"max_r", max()},
          {"q10_r", quantile(Rational(1, 10))},
          {"median_r", quantile(Rational(1, 2))},
          {"q90_r", quantile(Rational(9, 10))}};
}

ERSample er_monte_carlo(std::uint64_t n, std::uint64_t trials, std::uint64_t master_seed, unsigned threads) {
  if (n < 2) throw OutOfRange("n must be >= 2");
  if (trials < 1) throw OutOfRange("trials must be >= 1");
  if (n > kDefaultMaterializeBudget) throw BudgetExceeded("n exceeds the materialization budget");
  ERSample s;
  s.n = n;
  s.trials = trials;
  s.master_seed = master_seed;
  s.data.resize(trials);
  std::tie(s.log2n_lo, s.log2n_hi) = log2_bounds(BigInt(n));
  unsigned pool = pool_size(threads, trials);
  std::vector<std::thread> workers;
  for (unsigned t = 0; t < pool; ++t) {
    workers.emplace_back([&, t] {
      for (std::uint64_t i = t; i < trials; i += pool) {
        std::uint64_t seed = trial_seed(master_seed, i);
        Philox4x32 gen(seed);
        RunState st;
        std::uint64_t left = n;
        for (; left >= 64; left -= 64) st.push_bits(gen.next64(), 64);
        if (left) st.push_bits(gen.next64(), static_cast<unsigned>(left));
        s.data[i] = {i, seed, st.max};
      }
    });
  }
  for (auto& w : workers) w.join();
  return s;
}

DkwCheck dkw_check(const ERSample& s, const Rational& alpha) {
  if (alpha <= 0 || alpha >= 1) throw InvalidParameter("alpha must lie in (0, 1)");
  DkwCheck c;
  c.alpha = alpha;
  std::uint64_t lo = s.min(), hi = s.max();
  std::vector<std::uint64_t> ks;
  for (std::uint64_t x = lo == 0 ? 0 : lo - 1; x <= hi; ++x) ks.push_back(x + 1);
  auto a = count_many(s.n, ks);
  std::map<std::uint64_t, std::uint64_t> hist;
  for (const auto& t : s.data) ++hist[t.r];
  BigInt denom = pow2(s.n);
  std::uint64_t below = 0;
  for (std::uint64_t x = 0; x <= hi; ++x) {
    below += hist.count(x) ? hist[x] : 0;
    if (x + 1 < lo) continue;
    Rational emp(BigInt(below), BigInt(s.trials));
    Rational exact(a.at(x + 1), denom);
    Rational d = abs(emp - exact);
    if (d > c.distance) {
      c.distance = d;
      c.at = x;
    }
  }
  auto [ln_lo, ln_hi] = ln_bounds(Rational(2) / alpha);
  Rational two_t(BigInt(2 * s.trials));
  c.band_sq_lo = ln_lo / two_t;
  c.band_sq_hi = ln_hi / two_t;
  Rational d2 = c.distance * c.distance;
  if (d2 <= c.band_sq_lo) {
    c.inside = true;
  } else if (d2 > c.band_sq_hi) {
    c.inside = false;
  } else {
    throw PrecisionError("DKW distance too close to the band edge to certify");
  }
  return c;
}

namespace {

// Smallest integer r >= 0 with r > t (strict) or r >= t, for t in [lo, hi].
std::uint64_t first_integer_above(const Rational& lo, const Rational& hi, bool strict, std::uint64_t cap) {
  if (hi < 0 || (!strict && hi <= 0)) return 0;
  BigInt start = numerator(lo) / denominator(lo);
  start = start < 1 ? BigInt(0) : BigInt(start - 1);
  for (BigInt r = start; r <= BigInt(cap); ++r) {
    Rational rr(r);
    bool yes = strict ? rr > hi : rr >= hi;
    bool no = strict ? rr <= lo : rr < lo;
    if (yes) return r.convert_to<std::uint64_t>();
    if (!no) throw PrecisionError("threshold comparison too close to certify");
  }
  return cap + 1;
}

}  // namespace

Rational er_deviation_report(std::uint64_t n, const Rational& eps) {
  check_n(n);
  if (n < 2) throw OutOfRange("log2 n must be positive: n >= 2");
  if (eps <= 0) throw InvalidParameter("epsilon must be positive");
  auto [llo, lhi] = log2_bounds(BigInt(n));
  // r < (1 - eps) log2 n  <=>  r < c1
  Rational a = 1 - eps;
  std::uint64_t c1 = a <= 0 ? 0 : first_integer_above(a * llo, a * lhi, false, n + 1);
  // r > (1 + eps) log2 n  <=>  r >= c2
  Rational b = 1 + eps;
  std::uint64_t c2 = first_integer_above(b * llo, b * lhi, true, n + 1);
  std::vector<std::uint64_t> ks;
  if (c1 >= 1) ks.push_back(std::min(c1, n + 1));
  if (c2 <= n) ks.push_back(c2);
  auto m = count_many(n, ks);
  BigInt denom = pow2(n);
  Rational p = 0;
  if (c1 >= 1) p += Rational(m.at(std::min(c1, n + 1)), denom);
  if (c2 <= n) p += 1 - Rational(m.at(c2), denom);
  return p;
}

}  // namespace runlab
