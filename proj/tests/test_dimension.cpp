#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "oracles.hpp"
#include "runlab/dimension.hpp"
#include "runlab/errors.hpp"

using namespace runlab;

namespace {

Rational exact_slope(const SlopeValue& s) {
  REQUIRE(s.exact);
  return *s.value.lo.to_rational();
}

}  // namespace

TEST_CASE("E_p cylinder counts") {
  EpPredicate e3(3);
  CHECK(cylinder_count(e3, 3) == 1);
  CHECK(cylinder_count(e3, 6) == 2);
  CHECK(oracle::count_ep(3, 3) == 1);
  CHECK(oracle::count_ep(3, 6) == 2);
  for (unsigned p = 3; p <= 6; ++p) {
    EpPredicate e(p);
    for (unsigned k = 0; k <= 4; ++k) {
      CHECK(cylinder_count(e, (k + 1) * p) == BigInt(1) << ((p - 2) * k));
    }
  }
}

TEST_CASE("enumeration, closed form and brute force agree") {
  for (unsigned p = 3; p <= 6; ++p) {
    EpPredicate e(p);
    for (unsigned level = 1; level <= 20; ++level) {
      BigInt formula = *e.closed_form(level);
      CHECK(enumerate_count(e, level) == formula);
      if (level <= 16) CHECK(formula == oracle::count_ep(p, level));
    }
  }
  for (unsigned k = 1; k <= 4; ++k) {
    NoLongRunPredicate nr(k);
    for (unsigned level = 1; level <= 14; ++level) CHECK(enumerate_count(nr, level) == oracle::count_no_run(level, k));
  }
  CHECK_THROWS_AS(enumerate_count(EpPredicate(3), 25), BudgetExceeded);
}

TEST_CASE("predicates are hereditary") {
  std::mt19937_64 g(10);
  EpPredicate e4(4);
  NoLongRunPredicate nr(3);
  for (int it = 0; it < 10000; ++it) {
    Word w = Word::from_string(oracle::random_word(g, 1 + g() % 30));
    if (it % 2 == 0) {
      // start from an admitted prefix so the extension test has teeth
      w = make_ep_stream({4, Selector::seeded(g())})->materialize(1, 1 + g() % 30);
    }
    for (const CylinderPredicate* pr : {static_cast<const CylinderPredicate*>(&e4), static_cast<const CylinderPredicate*>(&nr)}) {
      Word ext = w;
      ext.push_back(g() & 1);
      if (pr->admits(w) == Admit::no) CHECK(pr->admits(ext) == Admit::no);
      if (pr->admits(ext) == Admit::yes) CHECK(pr->admits(w) == Admit::yes);
    }
  }
}

TEST_CASE("slopes") {
  auto prof = count_profile(EpPredicate(4), {8, 12});
  CHECK(prof.counts[0] == 4);
  CHECK(prof.counts[1] == 16);
  CHECK(exact_slope(prof.slopes[0]) == Rational(1, 2));
  CHECK(exact_slope(count_profile(EpPredicate(5), {10, 15}).slopes[0]) == Rational(3, 5));
  for (unsigned p = 3; p <= 6; ++p) {
    std::vector<std::size_t> levels;
    for (unsigned k = 1; k <= 5; ++k) levels.push_back(k * p);
    auto d = dimension_slope(count_profile(EpPredicate(p), levels));
    for (const auto& s : d.slopes) CHECK(exact_slope(s) == Rational(p - 2, p));
  }
  LambdaPredicate only_zeros(
      [](const Word& w) { return run_length(w) == 0 ? Admit::yes : Admit::no; }, 20, "zeros");
  CHECK(exact_slope(dimension_slope(count_profile(only_zeros, {4, 9})).last) == 0);
  auto odd = count_profile(NoLongRunPredicate(2), {10, 11});
  CHECK_FALSE(odd.slopes[0].exact);
  CHECK(odd.slopes[0].value.lo < odd.slopes[0].value.hi);
  CHECK_THROWS_AS(dimension_slope(count_profile(EpPredicate(3), {6})), InsufficientData);
}

TEST_CASE("profile output") {
  auto prof = count_profile(EpPredicate(4), {8, 12});
  std::string csv = prof.to_csv();
  CHECK(csv.rfind("level,count,slope_num,slope_den,slope_lo,slope_hi\n", 0) == 0);
  CHECK(csv.find("12,16,1,2") != std::string::npos);
  CHECK(prof.to_json().size() == 2);
}

TEST_CASE("probe: identical bases never violate") {
  Speed lg = Speed::log2();
  Schedule s = build_schedule_thm1(lg, 3, 2, ScheduleMode::relaxed, default_index_budget());
  BasePair same{Selector::seeded(4), Selector::seeded(4)};
  auto rep = nearly_lipschitz_probe({same}, 3, s, lg, Rational(1, 5), 0, 5000);
  CHECK(rep.violation_count() == 0);
  CHECK_FALSE(rep.pairs[0].k_base.has_value());
}

TEST_CASE("probe: one block of length 6 shifts the first difference by 6") {
  // constant speed 16 gives runs of 4, so the single block is 0 1111 0
  Speed flat = Speed::table({{1, 16}}, "flat16");
  Schedule s = make_schedule(flat, 3, {8}, ScheduleMode::relaxed);
  // the block at 10..12 has its free digit at 11; pick a splice that flips it
  std::optional<BasePair> pair;
  for (std::uint64_t alt = 1; !pair; ++alt) {
    BasePair bp{Selector::seeded(77), Selector::spliced(77, alt, 10)};
    if (Selector::seeded(77).bit(10, 0) != Selector::spliced(77, alt, 10).bit(10, 0)) pair = bp;
  }
  auto lax = nearly_lipschitz_probe({*pair}, 3, s, flat, Rational(1, 2), 0, 100);
  REQUIRE(lax.pairs[0].k_base == 10u);
  CHECK(lax.pairs[0].k_image == 16u);
  CHECK(lax.pairs[0].offset_consistent);
  CHECK(lax.violation_count() == 0);
  auto tight = nearly_lipschitz_probe({*pair}, 3, s, flat, Rational(1, 4), 0, 100);
  REQUIRE(tight.violation_count() == 2);  // n = 14 and n = 15
  CHECK(tight.pairs[0].violations[0] == std::pair<std::uint64_t, std::uint64_t>(14, 15));
  CHECK(tight.min_valid_n0 == 15);
  // the reported range replays from the two exponents
  for (std::uint64_t n = 14; n <= 15; ++n) {
    CHECK(n < *tight.pairs[0].k_image);
    CHECK(Rational(n) * Rational(3, 4) >= Rational(*tight.pairs[0].k_base));
  }
  CHECK(nearly_lipschitz_probe({*pair}, 3, s, flat, Rational(1, 4), 15, 100).violation_count() == 0);
}

TEST_CASE("sampled pairs differ where requested") {
  auto pairs = sample_base_pairs(50, 3, 1000);
  CHECK(pairs.size() == 50);
  for (const auto& bp : pairs) {
    auto x = make_ep_stream({4, bp.x}), y = make_ep_stream({4, bp.y});
    auto k = metric_distance_exponent(*x, *y, 20000);
    if (k) CHECK(*k + 1 >= *bp.y.splice_at.to_u64());
  }
  CHECK_THROWS_AS(sample_base_pairs(1, 0, 0), InvalidParameter);
}

TEST_CASE("probe: a long even block breaks the estimate just past it") {
  // relaxed log2 schedule 256, 517: the even block carries 258 ones
  Speed lg = Speed::log2();
  Schedule s = build_schedule_thm1(lg, 3, 2, ScheduleMode::relaxed, default_index_budget());
  REQUIRE(s.checkpoints[1] == Index(517));
  std::vector<BasePair> pairs;
  for (std::uint64_t alt = 1; pairs.size() < 5; ++alt) {
    BasePair bp{Selector::seeded(5), Selector::spliced(5, alt, 400)};
    auto k = metric_distance_exponent(*make_ep_stream({3, bp.x}), *make_ep_stream({3, bp.y}), 2000);
    if (k && *k < 500) pairs.push_back(bp);
  }
  auto rep = nearly_lipschitz_probe(pairs, 3, s, lg, Rational(1, 5), 0, 5000);
  for (const auto& p : rep.pairs) {
    REQUIRE(p.k_base.has_value());
    CHECK(*p.k_image == *p.k_base + 5 + 260);
    CHECK(p.offset_consistent);
    CHECK_FALSE(p.violations.empty());
  }
  CHECK(rep.violation_count() > 0);
  auto clean = nearly_lipschitz_probe(pairs, 3, s, lg, Rational(1, 5), rep.min_valid_n0, 5000);
  CHECK(clean.violation_count() == 0);
}
