#pragma once

#include "runlab/constructions.hpp"

#include <functional>
#include <memory>

namespace runlab {

enum class Admit { yes, no, unknown };

/// Finite-level view of a symbolic set: which words are prefixes of some
/// element. Must be hereditary (a rejected word has only rejected extensions).
class CylinderPredicate {
 public:
  virtual ~CylinderPredicate() = default;
  virtual Admit admits(const Word& w) const = 0;
  /// Highest level the predicate decides exactly.
  virtual std::size_t declared_levels() const = 0;
  /// Exact count at a level when a closed form is known.
  virtual std::optional<BigInt> closed_form(std::size_t /*level*/) const { return std::nullopt; }
  virtual std::string describe() const = 0;
};

/// Prefixes of E_p: 1^p, then blocks 0 * ... * 0.
class EpPredicate final : public CylinderPredicate {
 public:
  explicit EpPredicate(unsigned p);
  Admit admits(const Word& w) const override;
  std::size_t declared_levels() const override { return SIZE_MAX; }
  /// 2^{(p-2)q + max(0, min(r, p-1) - 1)} at level p + qp + r.
  std::optional<BigInt> closed_form(std::size_t level) const override;
  std::string describe() const override { return "E_" + std::to_string(p_); }

 private:
  unsigned p_;
};

/// Words without a run of k ones.
class NoLongRunPredicate final : public CylinderPredicate {
 public:
  explicit NoLongRunPredicate(std::size_t k) : k_(k) {}
  Admit admits(const Word& w) const override { return run_length(w) < k_ ? Admit::yes : Admit::no; }
  std::size_t declared_levels() const override { return SIZE_MAX; }
  std::string describe() const override { return "no-run-" + std::to_string(k_); }

 private:
  std::size_t k_;
};

class LambdaPredicate final : public CylinderPredicate {
 public:
  using Fn = std::function<Admit(const Word&)>;
  LambdaPredicate(Fn f, std::size_t levels, std::string name)
      : f_(std::move(f)), levels_(levels), name_(std::move(name)) {}
  Admit admits(const Word& w) const override { return f_(w); }
  std::size_t declared_levels() const override { return levels_; }
  std::string describe() const override { return name_; }

 private:
  Fn f_;
  std::size_t levels_;
  std::string name_;
};

/// Enumeration limit for generic predicates (2^24 words).
inline constexpr std::size_t kEnumerationLevels = 24;

/// Number of admitted words of the given length: the closed form when the
/// predicate has one, otherwise pruned enumeration (level <= 24).
BigInt cylinder_count(const CylinderPredicate& pred, std::size_t level);
/// Always enumerates; `threads` shards by prefix and does not change the result.
BigInt enumerate_count(const CylinderPredicate& pred, std::size_t level, unsigned threads = 0);

struct SlopeValue {
  Interval value;
  /// Exact rational when both counts are powers of two.
  bool exact = false;
};

struct CountProfile {
  std::vector<std::size_t> levels;
  std::vector<BigInt> counts;
  std::vector<SlopeValue> slopes;

  std::string to_csv() const;
  nlohmann::json to_json() const;
};

CountProfile count_profile(const CylinderPredicate& pred, const std::vector<std::size_t>& levels);

struct DimensionEstimate {
  SlopeValue last;
  std::vector<SlopeValue> slopes;
};

/// Successive slopes (log2 N_j+1 - log2 N_j) / (level_j+1 - level_j).
DimensionEstimate dimension_slope(const CountProfile& profile);

/// A pair of E_p bases; y usually shares a long prefix with x.
struct BasePair {
  Selector x;
  Selector y;
};

struct PairProbe {
  BasePair pair;
  /// Common-prefix lengths (disagreement exponents); nullopt when identical to depth.
  std::optional<std::uint64_t> k_base;
  std::optional<std::uint64_t> k_image;
  /// k_base == offset_accounting(k_image) when both are defined.
  bool offset_consistent = true;
  /// Maximal runs [lo, hi] of n violating the implication.
  std::vector<std::pair<std::uint64_t, std::uint64_t>> violations;
};

struct ProbeReport {
  Rational epsilon;
  std::uint64_t n0 = 0;
  std::uint64_t depth = 0;
  std::vector<PairProbe> pairs;
  /// Smallest N0 with no violation on these pairs.
  std::uint64_t min_valid_n0 = 0;

  std::size_t violation_count() const;
  nlohmann::json to_json() const;
};

/// Checks, for every N0 < n <= depth:  K_f > n  implies  K_b > n (1 - eps),
/// where K_f, K_b are common-prefix lengths of f(x), f(y) and of x, y.
ProbeReport nearly_lipschitz_probe(const std::vector<BasePair>& pairs, unsigned p, const Schedule& schedule,
                                   const Speed& phi, const Rational& epsilon, std::uint64_t n0,
                                   std::uint64_t depth);

/// Pairs (seeded(s), spliced(s, s', at)) with splice positions drawn below max_index.
std::vector<BasePair> sample_base_pairs(std::size_t count, std::uint64_t seed, std::uint64_t max_index);

}  // namespace runlab
