#pragma once

#include "runlab/sparse_int.hpp"
#include "runlab/words.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>

namespace runlab {

/// Run statistics of a contiguous segment; combines associatively.
/// lead/trail are exact; the internal maximum may be a certified range when
/// the segment is too long to scan.
struct RunSummary {
  Index length = 0;
  Index lead = 0;
  Index trail = 0;
  Index max_lo = 0;
  Index max_hi = 0;

  bool all_ones() const { return lead == length; }
  bool exact() const { return max_lo == max_hi; }

  static RunSummary constant(bool bit, const Index& length);
  static RunSummary of_word(const Word& w, std::size_t from = 1, std::size_t count = SIZE_MAX);
};

RunSummary operator+(const RunSummary& a, const RunSummary& b);

enum class StreamKind { explicit_prefix, self_similar, insertion_composite, omega_composite, unstructured };

std::string to_string(StreamKind k);

/// Element of Sigma^infinity as a pure digit oracle over 1-based big indices.
class StructuredStream {
 public:
  virtual ~StructuredStream() = default;
  virtual StreamKind kind() const = 0;
  virtual bool digit(const Index& i) const = 0;
  /// Digits first .. first+count-1.
  virtual Word materialize(std::uint64_t first, std::uint64_t count) const;
  /// Analytic summary of digits first .. first+count-1 (count >= 1); nullopt
  /// when the stream has no block structure.
  virtual std::optional<RunSummary> summary(const Index& first, const Index& count) const;
  /// true/false when the structure decides eventual constancy.
  virtual std::optional<bool> eventually_constant() const { return std::nullopt; }
  virtual std::string describe() const = 0;
};

using Stream = std::shared_ptr<const StructuredStream>;

/// A finite word followed by a constant padding digit.
class ExplicitPrefixStream final : public StructuredStream {
 public:
  ExplicitPrefixStream(Word prefix, bool pad) : prefix_(std::move(prefix)), pad_(pad) {}
  StreamKind kind() const override { return StreamKind::explicit_prefix; }
  bool digit(const Index& i) const override;
  Word materialize(std::uint64_t first, std::uint64_t count) const override;
  std::optional<RunSummary> summary(const Index& first, const Index& count) const override;
  std::optional<bool> eventually_constant() const override { return true; }
  std::string describe() const override;
  const Word& prefix() const { return prefix_; }

 private:
  Word prefix_;
  bool pad_;
};

/// Opaque digit oracle over machine-size indices. No structure, so run
/// lengths are only available by scanning.
class UnstructuredStream final : public StructuredStream {
 public:
  using Oracle = std::function<bool(std::uint64_t)>;
  UnstructuredStream(Oracle f, std::string name) : f_(std::move(f)), name_(std::move(name)) {}
  StreamKind kind() const override { return StreamKind::unstructured; }
  bool digit(const Index& i) const override;
  std::string describe() const override { return name_; }

 private:
  Oracle f_;
  std::string name_;
};

Stream make_explicit_stream(Word prefix, bool pad = false);

/// r_n for a stream: analytic when the stream has structure, otherwise a scan
/// of at most `budget` digits.
Index run_length(const StructuredStream& s, const Index& n, std::uint64_t budget = kDefaultMaterializeBudget);

/// r_n from block structure alone. Unsupported for unstructured streams;
/// PrecisionError if the structure cannot pin the maximum.
Index analytic_run_length(const StructuredStream& s, const Index& n);

/// Streaming scan of the first n digits.
std::uint64_t scan_run_length(const StructuredStream& s, std::uint64_t n);

/// min{k : x_{k+1} != y_{k+1}} if found at an index <= max_depth.
std::optional<std::uint64_t> metric_distance_exponent(const StructuredStream& x, const StructuredStream& y,
                                                      std::uint64_t max_depth);

/// Whether pi(stream) is a dyadic rational (eventually constant digits).
bool is_dyadic_endpoint(const StructuredStream& s);

}  // namespace runlab
