#include "selfsim/ifs.hpp"

#include <algorithm>
#include <cmath>

namespace selfsim {

IFS IFS::make(Rational ratio, std::vector<Rational> translations) {
  if (!(ratio > Rational(0) && ratio < Rational(1)))
    throw_error(errc::invalid_ratio, "contraction ratio must lie in (0,1)");
  if (translations.size() < 2)
    throw_error(errc::too_few_maps, "an IFS needs at least two maps");
  return IFS{std::move(ratio), std::move(translations)};
}

std::uint64_t CylinderSet::word_count() const {
  std::uint64_t total = 0;
  for (auto m : multiplicities) total += m;
  return total;
}

bool CylinderSet::has_collision() const {
  for (auto m : multiplicities)
    if (m > 1) return true;
  return false;
}

Rational RationalBound::bound(std::uint32_t n) const {
  mpz_class qn;
  mpz_pow_ui(qn.get_mpz_t(), q.get_mpz_t(), n);
  return Rational(mpz_class(1), Q * qn);
}

NormalizationResult validate_and_normalize(const IFS& in) {
  IFS ifs = IFS::make(in.ratio, in.translations);  // re-check invariants
  const auto [lo_it, hi_it] =
      std::minmax_element(ifs.translations.begin(), ifs.translations.end());
  if (*lo_it == *hi_it)
    throw_error(errc::all_maps_share_fixed_point,
                "all maps share one fixed point; the attractor is a single point");
  const Rational one_minus_r = Rational(1) - ifs.ratio;
  const Rational lo = *lo_it / one_minus_r;  // extreme fixed points = hull
  const Rational hi = *hi_it / one_minus_r;
  const Rational len = hi - lo;

  NormalizationResult out;
  out.map = AffineMap{Rational(1) / len, -lo / len};
  std::vector<Rational> conj;
  conj.reserve(ifs.translations.size());
  for (const auto& a : ifs.translations) conj.push_back((a - *lo_it) / len);
  out.changed = !(out.map.scale == Rational(1) && out.map.offset.is_zero());
  out.ifs = IFS{ifs.ratio, std::move(conj)};
  return out;
}

IFS normalized_or_degenerate(const IFS& ifs) {
  try {
    return validate_and_normalize(ifs).ifs;
  } catch (const error& e) {
    if (e.code() == errc::all_maps_share_fixed_point) return ifs;
    throw;
  }
}

Rational apply_word(const IFS& ifs, const Word& word, const Rational& x) {
  for (auto s : word)
    if (s >= ifs.alphabet_size())
      throw_error(errc::symbol_out_of_range, "word symbol exceeds alphabet");
  Rational acc = x;
  for (auto it = word.rbegin(); it != word.rend(); ++it)
    acc = ifs.ratio * acc + ifs.translations[*it];
  return acc;
}

namespace {

void check_word_budget(const IFS& ifs, std::uint32_t n, std::uint64_t budget) {
  mpz_class words;
  mpz_ui_pow_ui(words.get_mpz_t(), ifs.alphabet_size(), n);
  if (words > budget)
    throw budget_error(words.get_str(), budget,
                       "level " + std::to_string(n) + " needs " + words.get_str() +
                           " words, budget is " + std::to_string(budget));
}

}  // namespace

CylinderSet cylinder_points(const IFS& ifs, std::uint32_t n, std::uint64_t budget) {
  if (ifs.alphabet_size() < 2)
    throw_error(errc::too_few_maps, "an IFS needs at least two maps");
  check_word_budget(ifs, n, budget);

  CylinderSet cs;
  cs.level = 0;
  cs.points = {Rational(0)};
  cs.multiplicities = {1};

  // Level-1 points with duplicate translations merged up front.
  std::vector<std::pair<Rational, std::uint64_t>> base;
  {
    std::vector<Rational> sorted = ifs.translations;
    std::sort(sorted.begin(), sorted.end());
    for (const auto& a : sorted) {
      if (!base.empty() && base.back().first == a)
        ++base.back().second;
      else
        base.emplace_back(a, 1);
    }
  }

  Rational rpow(1);  // r^level
  for (std::uint32_t level = 0; level < n; ++level) {
    // X_{level+1} = X_level + r^level * X_1, multiplicities multiply.
    struct Cursor {
      std::size_t shift;
      std::size_t idx;
      Rational value;
    };
    std::vector<Rational> shifts;
    shifts.reserve(base.size());
    for (const auto& [a, m] : base) shifts.push_back(rpow * a);

    std::vector<Cursor> cur;
    cur.reserve(base.size());
    for (std::size_t j = 0; j < base.size(); ++j)
      cur.push_back({j, 0, cs.points[0] + shifts[j]});

    CylinderSet next;
    next.level = level + 1;
    next.points.reserve(cs.points.size() * base.size());
    next.multiplicities.reserve(cs.points.size() * base.size());
    while (!cur.empty()) {
      std::size_t best = 0;
      for (std::size_t j = 1; j < cur.size(); ++j)
        if (cur[j].value < cur[best].value) best = j;
      Cursor& c = cur[best];
      const std::uint64_t mult = cs.multiplicities[c.idx] * base[c.shift].second;
      if (!next.points.empty() && next.points.back() == c.value) {
        next.multiplicities.back() += mult;
      } else {
        next.points.push_back(c.value);
        next.multiplicities.push_back(mult);
      }
      if (++c.idx < cs.points.size()) {
        c.value = cs.points[c.idx] + shifts[c.shift];
      } else {
        cur.erase(cur.begin() + static_cast<std::ptrdiff_t>(best));
      }
    }
    cs = std::move(next);
    rpow *= ifs.ratio;
  }
  return cs;
}

Rational delta_of_cylinders(const CylinderSet& cs) {
  if (cs.has_collision()) return Rational(0);
  auto gap = min_gap(cs.points);
  if (!gap)
    throw_error(errc::invalid_param, "delta is undefined below level 1");
  return *gap;
}

Rational delta_n(const IFS& ifs, std::uint32_t n, std::uint64_t budget) {
  if (n == 0) throw_error(errc::invalid_param, "delta is undefined below level 1");
  return delta_of_cylinders(cylinder_points(ifs, n, budget));
}

SimilarityDimension similarity_dimension(const IFS& ifs) {
  const double s = std::log2(static_cast<double>(ifs.alphabet_size())) /
                   -log2_of(ifs.ratio);
  return SimilarityDimension{s, std::min(1.0, s)};
}

RationalBound rational_separation_bound(const IFS& ifs) {
  RationalBound rb;
  rb.Q = 1;
  for (const auto& a : ifs.translations) rb.Q *= a.denominator();
  rb.q = ifs.ratio.denominator();
  return rb;
}

DeltaReport delta_decay_report(const IFS& ifs, std::uint32_t n_max,
                               std::uint64_t budget) {
  DeltaReport report;
  report.bound = rational_separation_bound(ifs);
  Rational prev;
  for (std::uint32_t n = 1; n <= n_max; ++n) {
    DeltaEntry e;
    e.n = n;
    e.delta = delta_n(ifs, n, budget);
    if (e.delta.is_zero()) {
      if (!report.overlap_level) report.overlap_level = n;
    } else {
      e.normalized_log = -log2_of(e.delta) / n;
      report.decay_exponent_estimate = e.normalized_log;
      if (e.delta * Rational(report.bound.Q, 1) *
              Rational::pow(Rational(report.bound.q, 1), n) < Rational(1))
        report.rational_bound_ok = false;
    }
    if (n > 1 && e.delta > prev) report.monotone = false;
    prev = e.delta;
    report.entries.push_back(std::move(e));
  }
  return report;
}

}  // namespace selfsim
