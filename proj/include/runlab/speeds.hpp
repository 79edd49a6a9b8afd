#pragma once

#include "runlab/sparse_int.hpp"

#include <string>
#include <vector>

namespace runlab {

/// Speed function phi in class H. Values are certified intervals of rationals
/// (exact when phi(n) is rational).
///
/// Built-ins, addressable by name:
///   log2             max(1, log2 n)
///   pow:<a/b>        n^(a/b), 0 < a/b < 1 recommended
///   linear:<c>       c * n
///   loglog           log2 log2 n, clamped to 1 below n = 4
///   custom-table:F   CSV rows "n,phi" step-interpolated, monotone
class Speed {
 public:
  enum class Kind { log2, pow, linear, loglog, table };

  static Speed parse(const std::string& spec);
  static Speed log2() { return parse("log2"); }
  static Speed power(const Rational& beta);
  static Speed linear(const Rational& c);
  static Speed table(std::vector<std::pair<BigInt, Rational>> rows, std::string name = "custom-table");

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }

  /// Certified interval containing phi(n), n >= 1.
  Interval eval(const Index& n) const;
  /// [log2 phi(n)] computed by integer bracketing; 0 when phi(n) < 1.
  Index floor_log2(const Index& n) const;
  /// Certified interval containing n / phi(n).
  Interval ratio(const Index& n) const;
  /// Least n >= 1 with floor_log2(n) >= t, or (past dense range) the least
  /// power of two with that property.
  Index least_with_floor_log2(const Index& t) const;

 private:
  Kind kind_ = Kind::log2;
  std::string name_;
  Rational param_ = 1;
  std::vector<std::pair<BigInt, Rational>> rows_;
};

/// floor(log2 q) for a positive rational.
BigInt floor_log2(const Rational& q);

enum class WitnessCondition { ratio_divergence, class_a };

struct WitnessEntry {
  Rational target;
  Index n;
  Interval ratio;
};

struct ClassWitness {
  WitnessCondition condition = WitnessCondition::ratio_divergence;
  Rational alpha = 0;
  std::vector<WitnessEntry> ladder;
  Index search_bound;
  bool witnessed = false;
  /// First target that could not be reached, when refuted.
  std::optional<Rational> missed;

  std::string verdict() const { return witnessed ? "witnessed" : "refuted-up-to-bound"; }
};

/// For each target M, the least n found <= bound with n / phi(n) >= M
/// (certified lower bound), searching a geometric grid and refining.
ClassWitness ratio_divergence_witness(const Speed& phi, const std::vector<Rational>& targets, const Index& bound);

/// Same with ratio n / phi(ceil(n^(1+alpha))); the bound must be below 2^4096.
ClassWitness class_a_witness(const Speed& phi, const Rational& alpha, const std::vector<Rational>& targets,
                             const Index& bound);

/// ceil(n^(1+alpha)) for dense n.
BigInt ceil_pow(const BigInt& n, const Rational& exponent);

}  // namespace runlab
