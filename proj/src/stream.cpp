#include "runlab/stream.hpp"

#include "runlab/errors.hpp"

#include <algorithm>
#include <bit>

namespace runlab {

RunSummary RunSummary::constant(bool bit, const Index& length) {
  RunSummary s;
  s.length = length;
  if (bit) {
    s.lead = s.trail = s.max_lo = s.max_hi = length;
  }
  return s;
}

RunSummary RunSummary::of_word(const Word& w, std::size_t from, std::size_t count) {
  std::size_t end = count == SIZE_MAX ? w.size() : from - 1 + count;
  if (from < 1 || end > w.size() || end + 1 < from) throw OutOfRange("segment outside word");
  std::uint64_t lead = 0, cur = 0, best = 0;
  bool leading = true;
  for (std::size_t i = from - 1; i < end; ++i) {
    if (w[i]) {
      ++cur;
      if (leading) ++lead;
      best = std::max(best, cur);
    } else {
      cur = 0;
      leading = false;
    }
  }
  RunSummary s;
  s.length = Index(end - (from - 1));
  s.lead = lead;
  s.trail = cur;
  s.max_lo = s.max_hi = best;
  return s;
}

RunSummary operator+(const RunSummary& a, const RunSummary& b) {
  if (a.length.is_zero()) return b;
  if (b.length.is_zero()) return a;
  RunSummary s;
  s.length = a.length + b.length;
  s.lead = a.all_ones() ? a.length + b.lead : a.lead;
  s.trail = b.all_ones() ? b.length + a.trail : b.trail;
  Index join = a.trail + b.lead;
  s.max_lo = max(max(a.max_lo, b.max_lo), join);
  s.max_hi = max(max(a.max_hi, b.max_hi), join);
  return s;
}

std::string to_string(StreamKind k) {
  switch (k) {
    case StreamKind::explicit_prefix: return "explicit-prefix";
    case StreamKind::self_similar: return "self-similar";
    case StreamKind::insertion_composite: return "insertion-composite";
    case StreamKind::omega_composite: return "omega-composite";
    case StreamKind::unstructured: return "unstructured";
  }
  return "?";
}

Word StructuredStream::materialize(std::uint64_t first, std::uint64_t count) const {
  if (first < 1) throw OutOfRange("digit indices start at 1");
  Word w;
  for (std::uint64_t i = 0; i < count; ++i) w.push_back(digit(Index(first + i)));
  return w;
}

std::optional<RunSummary> StructuredStream::summary(const Index&, const Index&) const { return std::nullopt; }

bool ExplicitPrefixStream::digit(const Index& i) const {
  if (i < 1) throw OutOfRange("digit indices start at 1");
  if (i <= Index(prefix_.size())) return prefix_[*i.to_u64() - 1];
  return pad_;
}

Word ExplicitPrefixStream::materialize(std::uint64_t first, std::uint64_t count) const {
  if (first < 1) throw OutOfRange("digit indices start at 1");
  Word w;
  std::uint64_t i = first;
  for (; i < first + count && i <= prefix_.size(); ++i) w.push_back(prefix_[i - 1]);
  if (i < first + count) w.append_run(pad_, first + count - i);
  return w;
}

std::optional<RunSummary> ExplicitPrefixStream::summary(const Index& first, const Index& count) const {
  Index last = first + count - 1;
  Index size(prefix_.size());
  RunSummary s;
  if (first <= size) {
    std::uint64_t f = *first.to_u64();
    std::uint64_t e = *min(last, size).to_u64();
    s = RunSummary::of_word(prefix_, f, e - f + 1);
  }
  if (last > size) s = s + RunSummary::constant(pad_, last - max(first, size + 1) + 1);
  return s;
}

std::string ExplicitPrefixStream::describe() const {
  return "explicit-prefix(" + std::to_string(prefix_.size()) + " digits, pad " + (pad_ ? "1" : "0") + ")";
}

bool UnstructuredStream::digit(const Index& i) const {
  auto k = i.to_u64();
  if (!k || *k < 1) throw OutOfRange("index outside the oracle's machine range");
  return f_(*k);
}

Stream make_explicit_stream(Word prefix, bool pad) {
  return std::make_shared<ExplicitPrefixStream>(std::move(prefix), pad);
}

std::uint64_t scan_run_length(const StructuredStream& s, std::uint64_t n) {
  constexpr std::uint64_t kChunk = 1 << 20;
  RunState st;
  for (std::uint64_t first = 1; first <= n; first += kChunk) {
    std::uint64_t c = std::min(kChunk, n - first + 1);
    Word w = s.materialize(first, c);
    st.push_word(w, w.size());
  }
  return st.max;
}

Index analytic_run_length(const StructuredStream& s, const Index& n) {
  if (n < 1) throw OutOfRange("n must be >= 1");
  auto sum = s.summary(1, n);
  if (!sum) throw Unsupported("stream of kind " + to_string(s.kind()) + " has no block structure");
  if (!sum->exact()) {
    throw PrecisionError("run length at n = " + n.to_string() + " only bracketed in [" + sum->max_lo.to_string() +
                         ", " + sum->max_hi.to_string() + "]");
  }
  return sum->max_lo;
}

Index run_length(const StructuredStream& s, const Index& n, std::uint64_t budget) {
  if (n < 1) throw OutOfRange("n must be >= 1");
  if (s.kind() != StreamKind::unstructured) {
    auto sum = s.summary(1, n);
    if (sum && sum->exact()) return sum->max_lo;
  }
  if (n > Index(budget)) {
    throw BudgetExceeded("scanning " + n.to_string() + " digits exceeds the materialization budget " +
                         std::to_string(budget));
  }
  return Index(scan_run_length(s, *n.to_u64()));
}

std::optional<std::uint64_t> metric_distance_exponent(const StructuredStream& x, const StructuredStream& y,
                                                      std::uint64_t max_depth) {
  if (max_depth < 1) throw InvalidParameter("max_depth must be >= 1");
  constexpr std::uint64_t kChunk = 1 << 16;
  for (std::uint64_t first = 1; first <= max_depth; first += kChunk) {
    std::uint64_t c = std::min(kChunk, max_depth - first + 1);
    Word a = x.materialize(first, c);
    Word b = y.materialize(first, c);
    const auto& la = a.limbs();
    const auto& lb = b.limbs();
    for (std::size_t j = 0; j < la.size(); ++j) {
      if (std::uint64_t d = la[j] ^ lb[j]) {
        return first - 1 + 64 * j + static_cast<std::uint64_t>(std::countr_zero(d));
      }
    }
  }
  return std::nullopt;
}

bool is_dyadic_endpoint(const StructuredStream& s) {
  auto c = s.eventually_constant();
  if (!c) throw Undecidable("eventual constancy of an unstructured stream cannot be decided from finite data");
  return *c;
}

}  // namespace runlab
