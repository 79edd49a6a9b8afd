#pragma once

#include "runlab/speeds.hpp"
#include "runlab/stream.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace runlab {

/// Chooses the p-2 free middle bits of each E_p block. Bits of the block
/// starting at position s are a pure function of (seed, s):
///   chunk t = mix64(mix64(seed) ^ hash(s) + (t + 1) * 0x9E3779B97F4A7C15)
/// and bit j is bit j % 64 of chunk j / 64.
struct Selector {
  enum class Kind { all_zeros, all_ones, seeded, spliced };
  Kind kind = Kind::seeded;
  std::uint64_t seed = 0;
  /// spliced: blocks starting at or after splice_at use alt_seed.
  std::uint64_t alt_seed = 0;
  Index splice_at = 0;

  static Selector zeros() { return {Kind::all_zeros}; }
  static Selector ones() { return {Kind::all_ones}; }
  static Selector seeded(std::uint64_t seed) { return {Kind::seeded, seed}; }
  static Selector spliced(std::uint64_t seed, std::uint64_t alt, Index at) {
    return {Kind::spliced, seed, alt, std::move(at)};
  }
  /// "seeded", "zeros", "ones".
  static Selector parse(const std::string& name, std::uint64_t seed);

  std::uint64_t chunk(const Index& block_start, std::uint64_t block_hash, std::size_t t) const;
  bool bit(const Index& block_start, unsigned j) const;
  std::string describe() const;
};

struct EpSpec {
  unsigned p = 3;
  Selector selector;
};

/// Element of E_p: digits 1..p are 1; every later length-p block starts and
/// ends with 0, middle bits from the selector.
class EpStream final : public StructuredStream {
 public:
  explicit EpStream(EpSpec spec);
  StreamKind kind() const override { return StreamKind::self_similar; }
  bool digit(const Index& i) const override;
  Word materialize(std::uint64_t first, std::uint64_t count) const override;
  std::optional<RunSummary> summary(const Index& first, const Index& count) const override;
  std::optional<bool> eventually_constant() const override;
  std::string describe() const override;
  const EpSpec& spec() const { return spec_; }

 private:
  RunSummary block_part(const Index& start, unsigned from, unsigned to) const;
  void append_block(Word& w, std::uint64_t start, unsigned from, unsigned to) const;
  EpSpec spec_;
};

/// make_ep_stream(spec, seed): the seed replaces the selector's seed.
Stream make_ep_stream(EpSpec spec, std::uint64_t seed);
Stream make_ep_stream(EpSpec spec);

enum class ScheduleMode { faithful, relaxed };
std::string to_string(ScheduleMode m);
ScheduleMode parse_mode(const std::string& s);

struct CheckpointFlags {
  /// n_1 >= n0 for k = 1, n_k >= 2^{n_{k-1}} afterwards.
  bool growth = true;
  /// n_k / phi(n_k) >= k (certified).
  bool ratio = true;
  /// odd k >= 3: [log2 phi(n_k)] >= n_{k-1}.
  bool dominance = true;
  /// even k: n_k > 2 n_{k-1}.
  bool even_growth = true;
  /// inserted block starts at least 3 past the previous block's end
  /// (p + 1 for the first block).
  bool spacing = true;
};

struct Schedule {
  ScheduleMode mode = ScheduleMode::relaxed;
  unsigned p = 3;
  std::string speed;
  Index n0 = 1;
  std::vector<Index> checkpoints;
  /// L_k: [log2 phi(n_k)] on odd steps, [n_k / 2] on even steps.
  std::vector<Index> runs;
  std::vector<CheckpointFlags> flags;

  bool valid() const;
};

/// Checkpoints for the insertion construction. Emptiness branch when n/phi(n)
/// never reaches the ladder below budget.
Schedule build_schedule_thm1(const Speed& phi, unsigned p, unsigned count, ScheduleMode mode, const Index& budget);

/// Schedule with given checkpoints; runs and flags computed.
Schedule make_schedule(const Speed& phi, unsigned p, std::vector<Index> checkpoints, ScheduleMode mode);

/// Block 0 1^run 0 at final positions start .. start + run + 1, start =
/// checkpoint - run; inserted after evolving-sequence index start - 1.
struct Insertion {
  unsigned k = 0;
  Index checkpoint;
  Index run;
  Index start;
  Index end() const { return start + run + 1; }
  Index after_index() const { return start - 1; }
  Index length() const { return run + 2; }
};

struct InsertionPlan {
  std::vector<Insertion> insertions;
};

class InsertionStream final : public StructuredStream {
 public:
  InsertionStream(Stream base, InsertionPlan plan) : base_(std::move(base)), plan_(std::move(plan)) {}
  StreamKind kind() const override { return StreamKind::insertion_composite; }
  bool digit(const Index& i) const override;
  Word materialize(std::uint64_t first, std::uint64_t count) const override;
  std::optional<RunSummary> summary(const Index& first, const Index& count) const override;
  std::optional<bool> eventually_constant() const override { return base_->eventually_constant(); }
  std::string describe() const override;
  const InsertionPlan& plan() const { return plan_; }
  const Stream& base() const { return base_; }

 private:
  Stream base_;
  InsertionPlan plan_;
};

InsertionPlan make_plan(const Schedule& schedule);
std::pair<Stream, InsertionPlan> apply_insertions(Stream base, const Schedule& schedule, const Speed& phi);

/// n minus the lengths of all blocks whose checkpoint is <= n.
Index offset_accounting(const InsertionPlan& plan, const Index& n);
Index offset_accounting(const Schedule& schedule, const Index& n);

struct CheckpointRow {
  unsigned k = 0;
  bool odd = true;
  Index n;
  std::optional<Index> r;
  Index expected;
  Interval ratio;
  /// Set when the prefix was also scanned digit by digit.
  std::optional<bool> brute_ok;
  bool pass = false;
  std::string note;
};

struct CheckpointReport {
  std::vector<CheckpointRow> rows;
  bool odd_ladder_ok = true;
  bool even_ladder_ok = true;
  bool pass = true;

  std::string to_csv() const;
  nlohmann::json to_json() const;
};

/// Rows for checkpoints n_k: analytic r_{n_k} against [log2 phi(n_k)] (odd k)
/// or [n_k / 2] (even k), certified ratio r / phi(n_k), and a brute scan for
/// every n_k <= brute_budget.
CheckpointReport verify_checkpoints(const StructuredStream& s, const std::vector<Index>& checkpoints,
                                    const Speed& phi, std::uint64_t brute_budget = 0);
CheckpointReport verify_checkpoints(const StructuredStream& s, const Schedule& schedule, const Speed& phi,
                                    std::uint64_t brute_budget = 0);

struct OmegaStage {
  Index n;
  Index pad;
  Index run;
};

struct OmegaElement {
  Word seed;
  std::vector<OmegaStage> stages;

  Index length() const { return stages.empty() ? Index(seed.size()) : stages.back().n; }
  std::vector<Index> checkpoints() const;
  /// Materialized word when length() <= budget.
  Word word(std::uint64_t budget = kDefaultMaterializeBudget) const;
};

/// Seed, then per stage 0^pad 1^run, then (01)^infinity so the oracle is total.
class OmegaStream final : public StructuredStream {
 public:
  explicit OmegaStream(OmegaElement e) : e_(std::move(e)) {}
  StreamKind kind() const override { return StreamKind::omega_composite; }
  bool digit(const Index& i) const override;
  Word materialize(std::uint64_t first, std::uint64_t count) const override;
  std::optional<RunSummary> summary(const Index& first, const Index& count) const override;
  std::optional<bool> eventually_constant() const override { return false; }
  std::string describe() const override;
  const OmegaElement& element() const { return e_; }

 private:
  OmegaElement e_;
};

/// Least valid checkpoints for a seed of the given length: ratio ladder
/// n_k / phi(n_k) >= k plus the stage side conditions.
std::vector<Index> omega_schedule(std::size_t seed_length, const Speed& phi, unsigned stages, const Index& budget);

/// Stage words per the nested block recursion. Side conditions are checked on
/// the supplied checkpoints; empty checkpoints means omega_schedule.
std::pair<OmegaElement, Stream> build_omega_element(const Word& seed, const Speed& phi,
                                                    const std::vector<Index>& checkpoints, unsigned stages,
                                                    const Index& budget);

/// An Omega element extending the prefix.
OmegaElement omega_density_probe(const Word& prefix, const Speed& phi, const Index& budget, unsigned stages = 2);

/// Default bound on checkpoint magnitudes.
Index default_index_budget();

nlohmann::json to_json(const Schedule& s);
nlohmann::json to_json(const InsertionPlan& p);
nlohmann::json to_json(const OmegaElement& e);

}  // namespace runlab
