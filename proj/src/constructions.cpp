#include "runlab/constructions.hpp"

#include "runlab/errors.hpp"

#include <algorithm>
#include <sstream>

namespace runlab {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr unsigned kMaxP = 4096;
// middle stretches with at most this many full blocks are scanned exactly
constexpr std::uint64_t kScanBlocks = 4096;
constexpr std::uint64_t kSampleBlocks = 4096;
constexpr std::uint64_t kExactDigits = std::uint64_t{1} << 24;

Index least_ratio_at_least(const Speed& phi, unsigned k, Index lower, const Index& budget) {
  SparseRational target{Index(k)};
  auto ok = [&](const Index& n) { return phi.ratio(n).lo >= target; };
  if (lower > budget) {
    throw BudgetExceeded("checkpoint " + std::to_string(k) + " needs n >= " + lower.to_string() +
                         ", beyond the budget " + budget.to_string());
  }
  if (ok(lower)) return lower;
  Index lo = lower, hi = lower.shl(1);
  while (!ok(hi)) {
    if (hi > budget) {
      throw BudgetExceeded("no n <= budget with n / phi(n) >= " + std::to_string(k) + " for checkpoint " +
                           std::to_string(k));
    }
    lo = hi;
    hi = hi.shl(1);
  }
  if (hi.is_dense()) {
    while (hi - lo > 1) {
      Index mid = (lo + hi).half_floor();
      if (ok(mid)) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
  }
  if (hi > budget) throw BudgetExceeded("checkpoint " + std::to_string(k) + " exceeds the budget");
  return hi;
}

void require_divergence(const Speed& phi, unsigned count, const Index& budget) {
  std::vector<Rational> targets;
  for (unsigned k = 1; k <= std::max(count, 1U); ++k) targets.emplace_back(k);
  ClassWitness w = ratio_divergence_witness(phi, targets, budget);
  if (!w.witnessed) {
    throw EmptinessBranch("n / phi(n) stays below " + to_string(*w.missed) + " for all n up to " +
                          budget.to_string() + " with phi = " + phi.name() +
                          "; since r_n <= n, r_n / phi(n) is then bounded and no point has limsup r_n / phi(n) = "
                          "infinity, so the set of extreme divergence points is empty");
  }
}

Index run_for(const Speed& phi, unsigned k, const Index& n) { return k % 2 == 1 ? phi.floor_log2(n) : n.half_floor(); }

std::string str(const Index& v) { return v.to_string(); }

}  // namespace

Selector Selector::parse(const std::string& name, std::uint64_t seed) {
  if (name == "seeded") return seeded(seed);
  if (name == "zeros") return zeros();
  if (name == "ones") return ones();
  throw InvalidParameter("unknown selector '" + name + "' (expected seeded, zeros, ones)");
}

std::uint64_t Selector::chunk(const Index& block_start, std::uint64_t block_hash, std::size_t t) const {
  std::uint64_t s = seed;
  if (kind == Kind::spliced && block_start >= splice_at) s = alt_seed;
  return mix64((mix64(s) ^ block_hash) + (t + 1) * kGolden);
}

bool Selector::bit(const Index& block_start, unsigned j) const {
  switch (kind) {
    case Kind::all_zeros: return false;
    case Kind::all_ones: return true;
    default: return (chunk(block_start, block_start.hash(), j / 64) >> (j % 64)) & 1U;
  }
}

std::string Selector::describe() const {
  switch (kind) {
    case Kind::all_zeros: return "zeros";
    case Kind::all_ones: return "ones";
    case Kind::seeded: return "seeded:" + std::to_string(seed);
    case Kind::spliced:
      return "spliced:" + std::to_string(seed) + "->" + std::to_string(alt_seed) + "@" + splice_at.to_string();
  }
  return "?";
}

EpStream::EpStream(EpSpec spec) : spec_(std::move(spec)) {
  if (spec_.p < 3) throw InvalidParameter("E_p needs p >= 3 (p = 2 leaves a single point)");
  if (spec_.p > kMaxP) throw InvalidParameter("p above 4096 is not supported");
}

bool EpStream::digit(const Index& i) const {
  if (i < 1) throw OutOfRange("digit indices start at 1");
  const unsigned p = spec_.p;
  if (i <= Index(p)) return true;
  auto r = static_cast<unsigned>((i - 1).mod(p));
  if (r == 0 || r == p - 1) return false;
  return spec_.selector.bit(i - Index(r), r - 1);
}

void EpStream::append_block(Word& w, std::uint64_t start, unsigned from, unsigned to) const {
  const unsigned p = spec_.p;
  const Selector& sel = spec_.selector;
  bool hashed = sel.kind == Selector::Kind::seeded || sel.kind == Selector::Kind::spliced;
  Index start_index;
  if (hashed && sel.kind == Selector::Kind::spliced) start_index = Index(start);
  std::uint64_t h = mix64(start);
  std::uint64_t cached = 0;
  std::size_t cached_t = SIZE_MAX;
  for (unsigned o = from; o <= to; ++o) {
    bool b = false;
    if (o != 0 && o != p - 1) {
      unsigned j = o - 1;
      if (sel.kind == Selector::Kind::all_ones) {
        b = true;
      } else if (hashed) {
        if (j / 64 != cached_t) {
          cached_t = j / 64;
          cached = sel.chunk(start_index, h, cached_t);
        }
        b = (cached >> (j % 64)) & 1U;
      }
    }
    w.push_back(b);
  }
}

Word EpStream::materialize(std::uint64_t first, std::uint64_t count) const {
  if (first < 1) throw OutOfRange("digit indices start at 1");
  const std::uint64_t p = spec_.p;
  Word w;
  std::uint64_t i = first;
  const std::uint64_t last = first + count - 1;
  if (count == 0) return w;
  if (i <= p) {
    std::uint64_t e = std::min(last, p);
    w.append_run(true, e - i + 1);
    i = e + 1;
  }
  while (i <= last) {
    auto r = static_cast<unsigned>((i - 1) % p);
    std::uint64_t s = i - r;
    auto to = static_cast<unsigned>(std::min<std::uint64_t>(p - 1, r + (last - i)));
    append_block(w, s, r, to);
    i += to - r + 1;
  }
  return w;
}

RunSummary EpStream::block_part(const Index& start, unsigned from, unsigned to) const {
  if (auto s = start.to_u64(); s && *s < (std::uint64_t{1} << 62)) {
    Word w;
    append_block(w, *s, from, to);
    return RunSummary::of_word(w);
  }
  Word w;
  for (unsigned o = from; o <= to; ++o) {
    bool b = false;
    if (o != 0 && o != spec_.p - 1) b = spec_.selector.bit(start, o - 1);
    w.push_back(b);
  }
  return RunSummary::of_word(w);
}

std::optional<RunSummary> EpStream::summary(const Index& first, const Index& count) const {
  if (first < 1 || count < 1) throw OutOfRange("empty or out-of-range segment");
  const unsigned p = spec_.p;
  const Index pp(p);
  Index a = first;
  const Index e = first + count - 1;
  RunSummary out;
  if (a <= pp) {
    Index top = min(e, pp);
    out = RunSummary::constant(true, top - a + 1);
    if (e <= pp) return out;
    a = pp + 1;
  }
  auto ra = static_cast<unsigned>((a - 1).mod(p));
  Index sa = a - Index(ra);
  auto re = static_cast<unsigned>((e - 1).mod(p));
  Index se = e - Index(re);
  if (sa == se) return out + block_part(sa, ra, re);
  out = out + block_part(sa, ra, p - 1);
  Index b = sa + pp;
  Index span = se - b;
  if (!span.is_zero()) {
    if (span <= Index(kExactDigits) && b.to_u64()) {
      out = out + RunSummary::of_word(materialize(*b.to_u64(), *span.to_u64()));
    } else if (span <= Index(kScanBlocks * p)) {
      std::uint64_t m = *span.to_u64() / p;
      for (std::uint64_t j = 0; j < m; ++j) out = out + block_part(b + Index(j * p), 0, p - 1);
    } else {
      RunSummary mid;
      mid.length = span;
      const Selector::Kind kind = spec_.selector.kind;
      if (kind == Selector::Kind::all_zeros) {
        mid.max_lo = mid.max_hi = 0;
      } else if (kind == Selector::Kind::all_ones) {
        mid.max_lo = mid.max_hi = p - 2;
      } else {
        // a sample of blocks pins a lower bound; p - 2 is the structural cap
        Index lo = 0;
        for (std::uint64_t j = 0; j < kSampleBlocks && lo < Index(p - 2); ++j) {
          lo = max(lo, block_part(b + Index(j * p), 0, p - 1).max_lo);
        }
        mid.max_lo = lo;
        mid.max_hi = p - 2;
      }
      out = out + mid;
    }
  }
  return out + block_part(se, 0, re);
}

std::optional<bool> EpStream::eventually_constant() const {
  return spec_.selector.kind == Selector::Kind::all_zeros;
}

std::string EpStream::describe() const {
  return "E_" + std::to_string(spec_.p) + "(" + spec_.selector.describe() + ")";
}

Stream make_ep_stream(EpSpec spec, std::uint64_t seed) {
  spec.selector.seed = seed;
  return std::make_shared<EpStream>(std::move(spec));
}

Stream make_ep_stream(EpSpec spec) { return std::make_shared<EpStream>(std::move(spec)); }

std::string to_string(ScheduleMode m) { return m == ScheduleMode::faithful ? "faithful" : "relaxed"; }

ScheduleMode parse_mode(const std::string& s) {
  if (s == "faithful") return ScheduleMode::faithful;
  if (s == "relaxed") return ScheduleMode::relaxed;
  throw InvalidParameter("mode must be faithful or relaxed, got '" + s + "'");
}

bool Schedule::valid() const {
  for (std::size_t i = 0; i < flags.size(); ++i) {
    const auto& f = flags[i];
    if (i > 0 && checkpoints[i] <= checkpoints[i - 1]) return false;
    if (!f.ratio || !f.dominance || !f.even_growth || !f.spacing) return false;
    if (mode == ScheduleMode::faithful && !f.growth) return false;
  }
  return true;
}

Schedule make_schedule(const Speed& phi, unsigned p, std::vector<Index> checkpoints, ScheduleMode mode) {
  Schedule s;
  s.mode = mode;
  s.p = p;
  s.speed = phi.name();
  s.n0 = phi.least_with_floor_log2(Index(p));
  s.checkpoints = std::move(checkpoints);
  for (std::size_t i = 0; i < s.checkpoints.size(); ++i) {
    auto k = static_cast<unsigned>(i + 1);
    const Index& n = s.checkpoints[i];
    Index run = run_for(phi, k, n);
    CheckpointFlags f;
    f.ratio = phi.ratio(n).lo >= SparseRational(Index(k));
    if (k == 1) {
      f.growth = n >= s.n0;
      f.spacing = n - run >= Index(p + 1);
    } else {
      const Index& prev = s.checkpoints[i - 1];
      f.growth = n >= Index::pow2(prev);
      f.spacing = n - run >= prev + 3;
      if (k % 2 == 1) {
        f.dominance = run >= prev;
      } else {
        f.even_growth = n > prev.shl(1);
      }
    }
    s.runs.push_back(std::move(run));
    s.flags.push_back(f);
  }
  return s;
}

Schedule build_schedule_thm1(const Speed& phi, unsigned p, unsigned count, ScheduleMode mode, const Index& budget) {
  if (p < 3) throw InvalidParameter("p must be >= 3");
  require_divergence(phi, count, budget);
  const Index n0 = phi.least_with_floor_log2(Index(p));
  std::vector<Index> cps;
  for (unsigned k = 1; k <= count; ++k) {
    Index lower;
    Index min_start;
    if (k == 1) {
      lower = n0;
      min_start = Index(p + 1);
    } else {
      const Index& prev = cps.back();
      min_start = prev + 3;
      lower = k % 2 == 1 ? max(prev + 1, phi.least_with_floor_log2(prev)) : prev.shl(1) + 5;
      if (mode == ScheduleMode::faithful) lower = max(lower, Index::pow2(prev));
    }
    Index n = least_ratio_at_least(phi, k, lower, budget);
    while (true) {
      Index start = n - run_for(phi, k, n);
      if (start >= min_start) break;
      n += min_start - start;
    }
    if (n > budget) {
      throw BudgetExceeded("checkpoint " + std::to_string(k) + " = " + n.to_string() + " exceeds the budget " +
                           budget.to_string());
    }
    cps.push_back(std::move(n));
  }
  Schedule s = make_schedule(phi, p, std::move(cps), mode);
  if (!s.valid()) throw InvalidSchedule("constructed schedule fails its own conditions");
  return s;
}

InsertionPlan make_plan(const Schedule& schedule) {
  InsertionPlan plan;
  for (std::size_t i = 0; i < schedule.checkpoints.size(); ++i) {
    Insertion ins;
    ins.k = static_cast<unsigned>(i + 1);
    ins.checkpoint = schedule.checkpoints[i];
    ins.run = schedule.runs[i];
    ins.start = ins.checkpoint - ins.run;
    plan.insertions.push_back(std::move(ins));
  }
  return plan;
}

std::pair<Stream, InsertionPlan> apply_insertions(Stream base, const Schedule& schedule, const Speed& phi) {
  if (schedule.runs.size() != schedule.checkpoints.size()) throw InvalidSchedule("schedule runs/checkpoints mismatch");
  for (std::size_t i = 0; i < schedule.checkpoints.size(); ++i) {
    auto k = static_cast<unsigned>(i + 1);
    if (run_for(phi, k, schedule.checkpoints[i]) != schedule.runs[i]) {
      throw InvalidSchedule("run length of checkpoint " + std::to_string(k) + " does not match phi = " + phi.name());
    }
    if (schedule.runs[i] < 1) throw InvalidSchedule("checkpoint " + std::to_string(k) + " has an empty run");
    if (schedule.mode == ScheduleMode::faithful && !schedule.flags[i].dominance) {
      throw InvalidSchedule("faithful schedule violates odd-step dominance at checkpoint " + std::to_string(k));
    }
  }
  if (schedule.mode == ScheduleMode::faithful && !schedule.valid()) {
    throw InvalidSchedule("faithful schedule does not satisfy its growth conditions");
  }
  InsertionPlan plan = make_plan(schedule);
  for (std::size_t i = 0; i < plan.insertions.size(); ++i) {
    if (plan.insertions[i].start < 1) throw InvalidSchedule("block would start before digit 1");
    if (i > 0 && plan.insertions[i].start <= plan.insertions[i - 1].end()) {
      throw InvalidSchedule("blocks " + std::to_string(i) + " and " + std::to_string(i + 1) + " overlap");
    }
  }
  Stream out = std::make_shared<InsertionStream>(std::move(base), plan);
  return {out, plan};
}

bool InsertionStream::digit(const Index& i) const {
  if (i < 1) throw OutOfRange("digit indices start at 1");
  Index offset = 0;
  for (const auto& ins : plan_.insertions) {
    if (i < ins.start) break;
    if (i <= ins.end()) return i != ins.start && i != ins.end();
    offset += ins.length();
  }
  return base_->digit(i - offset);
}

Word InsertionStream::materialize(std::uint64_t first, std::uint64_t count) const {
  if (first < 1) throw OutOfRange("digit indices start at 1");
  Word w;
  if (count == 0) return w;
  const std::uint64_t last = first + count - 1;
  std::uint64_t i = first;
  Index offset = 0;
  for (const auto& ins : plan_.insertions) {
    if (i > last) break;
    if (ins.start > Index(last)) break;
    std::uint64_t start = *ins.start.to_u64();
    if (i < start) {
      std::uint64_t e = start - 1;
      w.append(base_->materialize(*(Index(i) - offset).to_u64(), e - i + 1));
      i = start;
    }
    Index end = ins.end();
    if (Index(i) <= end) {
      std::uint64_t e = end <= Index(last) ? *end.to_u64() : last;
      for (; i <= e; ++i) w.push_back(i != start && Index(i) != end);
    }
    offset += ins.length();
  }
  if (i <= last) w.append(base_->materialize(*(Index(i) - offset).to_u64(), last - i + 1));
  return w;
}

std::optional<RunSummary> InsertionStream::summary(const Index& first, const Index& count) const {
  if (first < 1 || count < 1) throw OutOfRange("empty or out-of-range segment");
  const Index last = first + count - 1;
  Index i = first;
  Index offset = 0;
  RunSummary out;
  for (const auto& ins : plan_.insertions) {
    if (i > last || ins.start > last) break;
    if (i < ins.start) {
      auto part = base_->summary(i - offset, ins.start - i);
      if (!part) return std::nullopt;
      out = out + *part;
      i = ins.start;
    }
    const Index end = ins.end();
    if (i <= end) {
      Index e = min(end, last);
      if (i == ins.start) {
        out = out + RunSummary::constant(false, 1);
        i += 1;
      }
      Index ones_end = min(e, end - 1);
      if (i <= ones_end) {
        out = out + RunSummary::constant(true, ones_end - i + 1);
        i = ones_end + 1;
      }
      if (i <= e) {
        out = out + RunSummary::constant(false, 1);
        i += 1;
      }
    }
    offset += ins.length();
  }
  if (i <= last) {
    auto part = base_->summary(i - offset, last - i + 1);
    if (!part) return std::nullopt;
    out = out + *part;
  }
  return out;
}

std::string InsertionStream::describe() const {
  return "insertion(" + base_->describe() + ", " + std::to_string(plan_.insertions.size()) + " blocks)";
}

Index offset_accounting(const InsertionPlan& plan, const Index& n) {
  Index out = n;
  for (const auto& ins : plan.insertions) {
    if (ins.checkpoint <= n) out -= ins.length();
  }
  return out;
}

Index offset_accounting(const Schedule& schedule, const Index& n) { return offset_accounting(make_plan(schedule), n); }

CheckpointReport verify_checkpoints(const StructuredStream& s, const std::vector<Index>& checkpoints,
                                    const Speed& phi, std::uint64_t brute_budget) {
  CheckpointReport rep;
  const CheckpointRow* last_odd = nullptr;
  const CheckpointRow* last_even = nullptr;
  rep.rows.reserve(checkpoints.size());
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    CheckpointRow row;
    row.k = static_cast<unsigned>(i + 1);
    row.odd = row.k % 2 == 1;
    row.n = checkpoints[i];
    row.expected = run_for(phi, row.k, row.n);
    try {
      row.r = analytic_run_length(s, row.n);
    } catch (const PrecisionError& e) {
      row.note = e.what();
    }
    if (row.n <= Index(brute_budget)) {
      row.brute_ok = Index(scan_run_length(s, *row.n.to_u64())) == row.expected;
    }
    Interval v = phi.eval(row.n);
    SparseRational r(row.r.value_or(row.expected));
    row.ratio = {r / v.hi, r / v.lo};
    row.pass = row.r && *row.r == row.expected && row.brute_ok.value_or(true);
    rep.rows.push_back(std::move(row));
    const CheckpointRow& cur = rep.rows.back();
    // certified ladders: odd ratios non-increasing, even ratios increasing
    if (cur.odd) {
      if (last_odd && !(cur.ratio.hi <= last_odd->ratio.lo)) rep.odd_ladder_ok = false;
      last_odd = &cur;
    } else {
      if (last_even && !(cur.ratio.lo > last_even->ratio.hi)) rep.even_ladder_ok = false;
      last_even = &cur;
    }
  }
  rep.pass = rep.odd_ladder_ok && rep.even_ladder_ok &&
             std::all_of(rep.rows.begin(), rep.rows.end(), [](const CheckpointRow& r) { return r.pass; });
  return rep;
}

CheckpointReport verify_checkpoints(const StructuredStream& s, const Schedule& schedule, const Speed& phi,
                                    std::uint64_t brute_budget) {
  return verify_checkpoints(s, schedule.checkpoints, phi, brute_budget);
}

std::string CheckpointReport::to_csv() const {
  std::ostringstream os;
  os << "k,parity,n_k,r_exact,expected,ratio_lo,ratio_hi,pass\n";
  for (const auto& r : rows) {
    os << r.k << ',' << (r.odd ? "odd" : "even") << ',' << str(r.n) << ',' << (r.r ? str(*r.r) : "?") << ','
       << str(r.expected) << ',' << r.ratio.lo.to_string() << ',' << r.ratio.hi.to_string() << ','
       << (r.pass ? "true" : "false") << '\n';
  }
  return os.str();
}

nlohmann::json CheckpointReport::to_json() const {
  nlohmann::json rows_j = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json j = {{"k", r.k},
                        {"parity", r.odd ? "odd" : "even"},
                        {"n_k", str(r.n)},
                        {"r_exact", r.r ? nlohmann::json(str(*r.r)) : nlohmann::json(nullptr)},
                        {"expected", str(r.expected)},
                        {"ratio_lo", r.ratio.lo.to_string()},
                        {"ratio_hi", r.ratio.hi.to_string()},
                        {"pass", r.pass}};
    if (r.brute_ok) j["brute_scan"] = *r.brute_ok;
    if (!r.note.empty()) j["note"] = r.note;
    rows_j.push_back(std::move(j));
  }
  return {{"rows", rows_j}, {"odd_ladder_ok", odd_ladder_ok}, {"even_ladder_ok", even_ladder_ok}, {"pass", pass}};
}

std::vector<Index> OmegaElement::checkpoints() const {
  std::vector<Index> out;
  for (const auto& st : stages) out.push_back(st.n);
  return out;
}

Word OmegaElement::word(std::uint64_t budget) const {
  if (length() > Index(budget)) throw BudgetExceeded("Omega word of length " + length().to_string() + " exceeds budget");
  Word w = seed;
  for (const auto& st : stages) {
    w.append_run(false, *st.pad.to_u64());
    w.append_run(true, *st.run.to_u64());
  }
  return w;
}

namespace {

// Pieces of an Omega stream: [begin, end] with a fixed content kind.
struct OmegaPiece {
  enum Kind { seed, zeros, ones, tail } kind;
  Index begin;
  Index end;  // unused for tail
};

std::vector<OmegaPiece> omega_pieces(const OmegaElement& e) {
  std::vector<OmegaPiece> out;
  Index prev(e.seed.size());
  if (!e.seed.empty()) out.push_back({OmegaPiece::seed, 1, prev});
  for (const auto& st : e.stages) {
    out.push_back({OmegaPiece::zeros, prev + 1, prev + st.pad});
    out.push_back({OmegaPiece::ones, prev + st.pad + 1, st.n});
    prev = st.n;
  }
  out.push_back({OmegaPiece::tail, prev + 1, Index(0)});
  return out;
}

// (01)^infinity starting at position origin: digit at origin + t is t odd.
bool tail_digit(const Index& origin, const Index& i) { return (i - origin).is_odd(); }

}  // namespace

bool OmegaStream::digit(const Index& i) const {
  if (i < 1) throw OutOfRange("digit indices start at 1");
  for (const auto& pc : omega_pieces(e_)) {
    if (pc.kind == OmegaPiece::tail) return tail_digit(pc.begin, i);
    if (i > pc.end) continue;
    switch (pc.kind) {
      case OmegaPiece::seed: return e_.seed[*i.to_u64() - 1];
      case OmegaPiece::zeros: return false;
      default: return true;
    }
  }
  return false;
}

Word OmegaStream::materialize(std::uint64_t first, std::uint64_t count) const {
  if (first < 1) throw OutOfRange("digit indices start at 1");
  Word w;
  if (count == 0) return w;
  const std::uint64_t last = first + count - 1;
  std::uint64_t i = first;
  for (const auto& pc : omega_pieces(e_)) {
    if (i > last) break;
    if (pc.kind == OmegaPiece::tail) {
      for (; i <= last; ++i) w.push_back(tail_digit(pc.begin, Index(i)));
      break;
    }
    if (Index(i) > pc.end) continue;
    std::uint64_t e = pc.end <= Index(last) ? *pc.end.to_u64() : last;
    if (pc.kind == OmegaPiece::seed) {
      for (; i <= e; ++i) w.push_back(e_.seed[i - 1]);
    } else {
      w.append_run(pc.kind == OmegaPiece::ones, e - i + 1);
      i = e + 1;
    }
  }
  return w;
}

std::optional<RunSummary> OmegaStream::summary(const Index& first, const Index& count) const {
  if (first < 1 || count < 1) throw OutOfRange("empty or out-of-range segment");
  const Index last = first + count - 1;
  Index i = first;
  RunSummary out;
  for (const auto& pc : omega_pieces(e_)) {
    if (i > last) break;
    if (pc.kind == OmegaPiece::tail) {
      Index len = last - i + 1;
      bool d_first = tail_digit(pc.begin, i);
      if (len == 1) {
        out = out + RunSummary::constant(d_first, 1);
      } else {
        RunSummary t;
        t.length = len;
        t.lead = d_first ? 1 : 0;
        t.trail = tail_digit(pc.begin, last) ? 1 : 0;
        t.max_lo = t.max_hi = 1;
        out = out + t;
      }
      break;
    }
    if (i > pc.end) continue;
    Index e = min(pc.end, last);
    if (pc.kind == OmegaPiece::seed) {
      out = out + RunSummary::of_word(e_.seed, *i.to_u64(), *(e - i + 1).to_u64());
    } else {
      out = out + RunSummary::constant(pc.kind == OmegaPiece::ones, e - i + 1);
    }
    i = e + 1;
  }
  return out;
}

std::string OmegaStream::describe() const {
  return "omega(seed " + e_.seed.to_string() + ", " + std::to_string(e_.stages.size()) + " stages)";
}

std::vector<Index> omega_schedule(std::size_t seed_length, const Speed& phi, unsigned stages, const Index& budget) {
  require_divergence(phi, stages, budget);
  std::vector<Index> cps;
  Index prev(seed_length);
  for (unsigned k = 1; k <= stages; ++k) {
    Index n;
    if (k % 2 == 1) {
      Index need = max(prev, Index(1));
      n = least_ratio_at_least(phi, k, max(prev + 2, phi.least_with_floor_log2(need)), budget);
      while (true) {
        Index run = phi.floor_log2(n);
        Index pad = n - run - prev;
        if (pad.sign() > 0) break;
        n += 1 - pad;
      }
    } else {
      n = least_ratio_at_least(phi, k, prev.shl(1) + 1, budget);
    }
    if (n > budget) throw BudgetExceeded("Omega stage " + std::to_string(k) + " exceeds the budget");
    cps.push_back(n);
    prev = n;
  }
  return cps;
}

std::pair<OmegaElement, Stream> build_omega_element(const Word& seed, const Speed& phi,
                                                    const std::vector<Index>& checkpoints, unsigned stages,
                                                    const Index& budget) {
  std::vector<Index> cps = checkpoints;
  if (cps.empty()) {
    cps = omega_schedule(seed.size(), phi, stages, budget);
  } else if (cps.size() < stages) {
    throw InvalidParameter("schedule has " + std::to_string(cps.size()) + " checkpoints but " +
                           std::to_string(stages) + " stages were requested");
  }
  OmegaElement el;
  el.seed = seed;
  Index prev(seed.size());
  for (unsigned k = 1; k <= stages; ++k) {
    const Index& n = cps[k - 1];
    if (n > budget) throw BudgetExceeded("Omega stage " + std::to_string(k) + " exceeds the budget");
    OmegaStage st;
    st.n = n;
    if (k % 2 == 1) {
      st.run = phi.floor_log2(n);
      if (st.run < prev || st.run < 1) {
        throw InvalidSchedule("stage " + std::to_string(k) + ": run " + st.run.to_string() +
                              " shorter than the previous word length " + prev.to_string());
      }
    } else {
      if (!(n > prev.shl(1))) {
        throw InvalidSchedule("stage " + std::to_string(k) + ": n = " + n.to_string() + " is not above twice " +
                              prev.to_string());
      }
      st.run = n.half_floor();
    }
    st.pad = n - st.run - prev;
    if (st.pad.sign() <= 0) throw InvalidSchedule("stage " + std::to_string(k) + ": zero padding is not positive");
    prev = n;
    el.stages.push_back(std::move(st));
  }
  Stream s = std::make_shared<OmegaStream>(el);
  return {std::move(el), std::move(s)};
}

OmegaElement omega_density_probe(const Word& prefix, const Speed& phi, const Index& budget, unsigned stages) {
  return build_omega_element(prefix, phi, {}, stages, budget).first;
}

Index default_index_budget() {
  static const Index b = Index::parse("2^(2^(2^(2^(2^64))))");
  return b;
}

nlohmann::json to_json(const Schedule& s) {
  nlohmann::json cps = nlohmann::json::array(), runs = nlohmann::json::array(), flags = nlohmann::json::array();
  for (std::size_t i = 0; i < s.checkpoints.size(); ++i) {
    cps.push_back(str(s.checkpoints[i]));
    runs.push_back(str(s.runs[i]));
    const auto& f = s.flags[i];
    flags.push_back({{"growth", f.growth},
                     {"ratio", f.ratio},
                     {"dominance", f.dominance},
                     {"even_growth", f.even_growth},
                     {"spacing", f.spacing}});
  }
  return {{"mode", to_string(s.mode)}, {"p", s.p},           {"speed", s.speed}, {"n0", str(s.n0)},
          {"checkpoints", cps},        {"runs", runs},       {"flags", flags},   {"valid", s.valid()}};
}

nlohmann::json to_json(const InsertionPlan& p) {
  nlohmann::json out = nlohmann::json::array();
  Index cum = 0;
  for (const auto& ins : p.insertions) {
    cum += ins.length();
    out.push_back({{"k", ins.k},
                   {"checkpoint", str(ins.checkpoint)},
                   {"after_index", str(ins.after_index())},
                   {"block", "0 1^" + str(ins.run) + " 0"},
                   {"run", str(ins.run)},
                   {"cumulative_offset", str(cum)}});
  }
  return out;
}

nlohmann::json to_json(const OmegaElement& e) {
  nlohmann::json st = nlohmann::json::array();
  for (const auto& s : e.stages) st.push_back({{"n", str(s.n)}, {"pad", str(s.pad)}, {"run", str(s.run)}});
  return {{"seed", e.seed.to_string()}, {"stages", st}};
}

}  // namespace runlab
