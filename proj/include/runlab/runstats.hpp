#pragma once

#include "runlab/sparse_int.hpp"

#include "json.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace runlab {

/// Largest n accepted by the exact DP.
inline constexpr std::uint64_t kDpLimit = 1'000'000;
/// Largest n for which the full distribution table is built.
inline constexpr std::uint64_t kTableLimit = 4096;

/// A(n, k): words of length n whose longest run of ones is < k.
BigInt count_no_run(std::uint64_t n, std::uint64_t k);

/// P(r_n < k) = A(n, k) / 2^n for fair digits, 1 <= k <= n + 1.
Rational exact_run_cdf(std::uint64_t n, std::uint64_t k);

struct RunDistribution {
  std::uint64_t n = 0;
  /// table[k] = A(n, k), 0 <= k <= n + 1.
  std::vector<BigInt> table;

  Rational cdf(std::uint64_t k) const;   // P(r_n < k)
  Rational pmf(std::uint64_t k) const;   // P(r_n = k)
  Rational mean() const;
  std::string to_csv() const;
};

RunDistribution run_distribution(std::uint64_t n);

/// E[r_n] as a certified interval: exact for n <= 1024, otherwise exact terms
/// up to floor(log2 n) + 64 plus the tail bound n 2^{-K}.
std::pair<Rational, Rational> mean_run_length(std::uint64_t n);

struct ERTrial {
  std::uint64_t trial = 0;
  std::uint64_t seed = 0;
  std::uint64_t r = 0;
};

struct ERSample {
  std::uint64_t n = 0;
  std::uint64_t trials = 0;
  std::uint64_t master_seed = 0;
  std::vector<ERTrial> data;
  /// Certified bounds on log2 n.
  Rational log2n_lo, log2n_hi;

  Rational mean() const;
  std::uint64_t min() const;
  std::uint64_t max() const;
  /// Empirical q-quantile of r_n (smallest r with at least q of the mass).
  std::uint64_t quantile(const Rational& q) const;

  std::string to_csv() const;
  nlohmann::json summary_json() const;
};

/// r_n over `trials` independent fair digit strings from Philox4x32-10 keyed
/// by trial_seed(master_seed, i). Independent of thread count.
ERSample er_monte_carlo(std::uint64_t n, std::uint64_t trials, std::uint64_t master_seed, unsigned threads = 0);

struct DkwCheck {
  Rational alpha;
  /// sup_x |F_hat(x) - F(x)| over the empirical range.
  Rational distance;
  std::uint64_t at = 0;
  /// Certified bounds on the squared band half-width ln(2/alpha) / (2 trials).
  Rational band_sq_lo, band_sq_hi;
  bool inside = false;
};

/// Dvoretzky-Kiefer-Wolfowitz check of the sample against the exact CDF.
DkwCheck dkw_check(const ERSample& s, const Rational& alpha = Rational(1, 1000));

/// P(|r_n / log2 n - 1| > eps), exact.
Rational er_deviation_report(std::uint64_t n, const Rational& eps);

}  // namespace runlab
