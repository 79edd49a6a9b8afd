#include "runlab/dimension.hpp"

#include "runlab/errors.hpp"

#include <algorithm>
#include <sstream>
#include <thread>

namespace runlab {

EpPredicate::EpPredicate(unsigned p) : p_(p) {
  if (p < 3) throw InvalidParameter("E_p needs p >= 3");
}

Admit EpPredicate::admits(const Word& w) const {
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i < p_) {
      if (!w[i]) return Admit::no;
      continue;
    }
    std::size_t r = i % p_;
    if ((r == 0 || r == p_ - 1) && w[i]) return Admit::no;
  }
  return Admit::yes;
}

std::optional<BigInt> EpPredicate::closed_form(std::size_t level) const {
  if (level <= p_) return BigInt(1);
  std::size_t m = level - p_;
  std::size_t q = m / p_, r = m % p_;
  std::size_t partial = std::min<std::size_t>(r, p_ - 1);
  std::size_t e = (p_ - 2) * q + (partial > 0 ? partial - 1 : 0);
  return BigInt(1) << e;
}

namespace {

std::uint64_t count_from(const CylinderPredicate& pred, Word& w, std::size_t level) {
  Admit a = pred.admits(w);
  if (a == Admit::no) return 0;
  if (a == Admit::unknown) throw BudgetExceeded("predicate " + pred.describe() + " is undecided at this level");
  if (w.size() == level) return 1;
  std::uint64_t total = 0;
  for (bool b : {false, true}) {
    Word next = w;
    next.push_back(b);
    total += count_from(pred, next, level);
  }
  return total;
}

}  // namespace

BigInt enumerate_count(const CylinderPredicate& pred, std::size_t level, unsigned threads) {
  if (level > kEnumerationLevels) {
    throw BudgetExceeded("enumeration at level " + std::to_string(level) + " exceeds the feasible maximum " +
                         std::to_string(kEnumerationLevels));
  }
  if (level > pred.declared_levels()) {
    throw BudgetExceeded("predicate " + pred.describe() + " is exact only up to level " +
                         std::to_string(pred.declared_levels()));
  }
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  // shard on the first few digits
  std::size_t shard_bits = std::min<std::size_t>(level, 6);
  std::size_t shards = std::size_t{1} << shard_bits;
  std::vector<std::uint64_t> partial(shards, 0);
  std::vector<std::exception_ptr> errors(shards);
  auto work = [&](unsigned t) {
    for (std::size_t s = t; s < shards; s += threads) {
      try {
        Word w;
        for (std::size_t b = 0; b < shard_bits; ++b) w.push_back((s >> (shard_bits - 1 - b)) & 1U);
        partial[s] = count_from(pred, w, level);
      } catch (...) {
        errors[s] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < std::min<std::size_t>(threads, shards); ++t) pool.emplace_back(work, t);
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::uint64_t total = 0;
  for (auto c : partial) total += c;
  return BigInt(total);
}

BigInt cylinder_count(const CylinderPredicate& pred, std::size_t level) {
  if (auto c = pred.closed_form(level)) return *c;
  return enumerate_count(pred, level);
}

namespace {

Interval log2_count(const BigInt& c) {
  if (c < 1) throw InvalidParameter("empty level: the set has no cylinder of this length");
  auto [lo, hi] = log2_bounds(c);
  return {SparseRational::from(lo), SparseRational::from(hi)};
}

SlopeValue slope_between(const BigInt& c1, std::size_t l1, const BigInt& c2, std::size_t l2) {
  if (l2 <= l1) throw InvalidParameter("levels must be strictly increasing");
  Interval a = log2_count(c1), b = log2_count(c2);
  Rational d(static_cast<long>(l2 - l1));
  Rational lo = (*b.lo.to_rational() - *a.hi.to_rational()) / d;
  Rational hi = (*b.hi.to_rational() - *a.lo.to_rational()) / d;
  SlopeValue s;
  s.value = {SparseRational::from(lo), SparseRational::from(hi)};
  s.exact = lo == hi;
  return s;
}

}  // namespace

CountProfile count_profile(const CylinderPredicate& pred, const std::vector<std::size_t>& levels) {
  CountProfile prof;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    prof.levels.push_back(levels[i]);
    prof.counts.push_back(cylinder_count(pred, levels[i]));
    if (i > 0) prof.slopes.push_back(slope_between(prof.counts[i - 1], levels[i - 1], prof.counts[i], levels[i]));
  }
  return prof;
}

DimensionEstimate dimension_slope(const CountProfile& profile) {
  if (profile.levels.size() < 2) throw InsufficientData("a slope needs at least two levels");
  DimensionEstimate d;
  for (std::size_t i = 1; i < profile.levels.size(); ++i) {
    d.slopes.push_back(slope_between(profile.counts[i - 1], profile.levels[i - 1], profile.counts[i], profile.levels[i]));
  }
  d.last = d.slopes.back();
  return d;
}

std::string CountProfile::to_csv() const {
  std::ostringstream os;
  os << "level,count,slope_num,slope_den,slope_lo,slope_hi\n";
  for (std::size_t i = 0; i < levels.size(); ++i) {
    os << levels[i] << ',' << counts[i].str() << ',';
    if (i == 0) {
      os << ",,,\n";
      continue;
    }
    const SlopeValue& s = slopes[i - 1];
    Rational lo = *s.value.lo.to_rational(), hi = *s.value.hi.to_rational();
    if (s.exact) {
      os << numerator(lo).str() << ',' << denominator(lo).str() << ',';
    } else {
      os << ",,";
    }
    os << to_string(lo) << ',' << to_string(hi) << '\n';
  }
  return os.str();
}

nlohmann::json CountProfile::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < levels.size(); ++i) {
    nlohmann::json r = {{"level", levels[i]}, {"count", counts[i].str()}};
    if (i > 0) {
      const SlopeValue& s = slopes[i - 1];
      r["slope_lo"] = s.value.lo.to_string();
      r["slope_hi"] = s.value.hi.to_string();
      r["slope_exact"] = s.exact;
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

std::size_t ProbeReport::violation_count() const {
  std::size_t c = 0;
  for (const auto& p : pairs) {
    for (const auto& [lo, hi] : p.violations) c += hi - lo + 1;
  }
  return c;
}

nlohmann::json ProbeReport::to_json() const {
  nlohmann::json ps = nlohmann::json::array();
  for (const auto& p : pairs) {
    nlohmann::json v = nlohmann::json::array();
    for (const auto& [lo, hi] : p.violations) v.push_back({lo, hi});
    ps.push_back({{"x", p.pair.x.describe()},
                  {"y", p.pair.y.describe()},
                  {"k_base", p.k_base ? nlohmann::json(*p.k_base) : nlohmann::json(nullptr)},
                  {"k_image", p.k_image ? nlohmann::json(*p.k_image) : nlohmann::json(nullptr)},
                  {"offset_consistent", p.offset_consistent},
                  {"violations", v}});
  }
  return {{"epsilon", to_string(epsilon)}, {"n0", n0},         {"depth", depth},
          {"min_valid_n0", min_valid_n0},  {"pairs", ps},      {"violations", violation_count()}};
}

ProbeReport nearly_lipschitz_probe(const std::vector<BasePair>& pairs, unsigned p, const Schedule& schedule,
                                   const Speed& phi, const Rational& epsilon, std::uint64_t n0,
                                   std::uint64_t depth) {
  if (epsilon <= 0 || epsilon >= 1) throw InvalidParameter("epsilon must lie in (0, 1)");
  if (depth > kDefaultMaterializeBudget) throw BudgetExceeded("probe depth exceeds the materialization budget");
  ProbeReport rep;
  rep.epsilon = epsilon;
  rep.n0 = n0;
  rep.depth = depth;
  const Rational keep = 1 - epsilon;
  for (const auto& bp : pairs) {
    PairProbe pp;
    pp.pair = bp;
    auto x = make_ep_stream(EpSpec{p, bp.x});
    auto y = make_ep_stream(EpSpec{p, bp.y});
    auto [fx, plan] = apply_insertions(x, schedule, phi);
    auto fy = apply_insertions(y, schedule, phi).first;
    pp.k_base = metric_distance_exponent(*x, *y, depth);
    pp.k_image = metric_distance_exponent(*fx, *fy, depth + 1);
    if (pp.k_base && pp.k_image) {
      pp.offset_consistent = offset_accounting(plan, Index(*pp.k_image)) == Index(*pp.k_base);
    }
    if (pp.k_base) {
      // violated n: n < K_f and n (1 - eps) >= K_b
      Rational t = Rational(*pp.k_base) / keep;
      BigInt c = numerator(t) / denominator(t);
      if (Rational(c) < t) c += 1;
      std::uint64_t lo = std::max<std::uint64_t>(1, c.convert_to<std::uint64_t>());
      std::uint64_t hi = depth;
      if (pp.k_image) hi = *pp.k_image == 0 ? 0 : std::min(depth, *pp.k_image - 1);
      if (lo <= hi) {
        rep.min_valid_n0 = std::max(rep.min_valid_n0, hi);
        std::uint64_t from = std::max(lo, n0 + 1);
        if (from <= hi) pp.violations.emplace_back(from, hi);
      }
    }
    rep.pairs.push_back(std::move(pp));
  }
  return rep;
}

std::vector<BasePair> sample_base_pairs(std::size_t count, std::uint64_t seed, std::uint64_t max_index) {
  if (max_index < 1) throw InvalidParameter("max_index must be >= 1");
  std::vector<BasePair> out;
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t s = mix64(seed ^ mix64(i));
    std::uint64_t alt = mix64(s ^ 0xC2B2AE3D27D4EB4FULL);
    std::uint64_t at = 1 + mix64(s + 1) % max_index;
    out.push_back({Selector::seeded(s), Selector::spliced(s, alt, Index(at))});
  }
  return out;
}

}  // namespace runlab
