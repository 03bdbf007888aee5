#include "selfsim/constructions.hpp"

#include <algorithm>
#include <cmath>

#include "selfsim/rng.hpp"

namespace selfsim {

const std::vector<PresetInfo>& preset_catalog() {
  static const std::vector<PresetInfo> catalog = {
      {"cantor3", "middle-third Cantor system, r=1/3, a={0, 2/3}", false},
      {"dyadic", "full dyadic system, r=1/2, a={0, 1/2}", false},
      {"zero-one-three",
       "x -> r x + d for d in {0,1,3}, normalized to hull [0,1] (default r=1/4)",
       true},
      {"overlap-demo", "r=1/2, a={0, 1/4, 1/2}; exact overlap at level 2", false},
      {"duplicate", "two identical maps, r=1/2, a={0, 0}", false},
  };
  return catalog;
}

IFS preset(const std::string& name, const std::optional<Rational>& param) {
  auto no_param = [&] {
    if (param)
      throw_error(errc::invalid_param, "preset '" + name + "' takes no parameter");
  };
  if (name == "cantor3") {
    no_param();
    return IFS::make(Rational(1, 3), {Rational(0), Rational(2, 3)});
  }
  if (name == "dyadic") {
    no_param();
    return IFS::make(Rational(1, 2), {Rational(0), Rational(1, 2)});
  }
  if (name == "overlap-demo") {
    no_param();
    return IFS::make(Rational(1, 2),
                     {Rational(0), Rational(1, 4), Rational(1, 2)});
  }
  if (name == "duplicate") {
    no_param();
    return IFS{Rational(1, 2), {Rational(0), Rational(0)}};
  }
  if (name == "zero-one-three") {
    const Rational r = param.value_or(Rational(1, 4));
    if (!(r > Rational(0) && r < Rational(1)))
      throw_error(errc::invalid_param, "zero-one-three ratio must lie in (0,1)");
    const IFS raw = IFS::make(r, {Rational(0), Rational(1), Rational(3)});
    return validate_and_normalize(raw).ifs;
  }
  throw_error(errc::unknown_preset, "unknown preset '" + name + "'");
}

GapPoints gap_points(const GAP& gap, std::uint64_t budget) {
  if (gap.gaps.size() != gap.lengths.size() || gap.gaps.empty())
    throw_error(errc::invalid_param, "GAP needs aligned, non-empty gaps/lengths");
  mpz_class volume(1);
  for (std::size_t i = 0; i < gap.gaps.size(); ++i) {
    if (gap.gaps[i].is_zero())
      throw_error(errc::invalid_param, "GAP gaps must be nonzero");
    if (gap.lengths[i] == 0)
      throw_error(errc::invalid_param, "GAP lengths must be at least 1");
    volume *= mpz_class(static_cast<unsigned long>(gap.lengths[i]));
  }
  if (volume > budget)
    throw budget_error(volume.get_str(), budget, "GAP volume exceeds budget");

  std::vector<Rational> values{gap.base};
  for (std::size_t i = 0; i < gap.gaps.size(); ++i) {
    std::vector<Rational> next;
    next.reserve(values.size() * gap.lengths[i]);
    Rational step(0);
    for (std::uint64_t j = 0; j < gap.lengths[i]; ++j) {
      for (const auto& v : values) next.push_back(v + step);
      step += gap.gaps[i];
    }
    values = std::move(next);
  }
  const std::uint64_t generated = values.size();
  GapPoints out;
  out.points = make_point_set(std::move(values));
  out.proper = out.points.size() == generated;
  return out;
}

GAP an_gap(std::uint32_t n) {
  GAP gap;
  gap.base = Rational(0);
  for (std::uint32_t i = 1; i <= n; ++i) {
    mpz_class den(1);
    den <<= i * i;  // 2^{i^2}
    gap.gaps.push_back(Rational(mpz_class(1), den));
    gap.lengths.push_back(1ULL << i);
  }
  return gap;
}

PointSet an_construction(std::uint32_t n, std::uint64_t budget) {
  if (n > 5)
    throw budget_error("2^" + std::to_string(n * (n + 1) / 2), budget,
                       "block construction grows past n = 5");
  if (n == 0) return {Rational(0)};
  return gap_points(an_gap(n), budget).points;
}

DoublingStats doubling_stats(const PointSet& a, std::uint64_t budget) {
  if (a.empty()) throw_error(errc::empty_input, "doubling of an empty set");
  DoublingStats out;
  out.size = a.size();
  out.sum_size = sumset(a, a, budget).size();
  out.ratio = static_cast<double>(out.sum_size) / static_cast<double>(out.size);
  if (out.size > 1)
    out.growth_exponent = std::log2(static_cast<double>(out.sum_size)) /
                          std::log2(static_cast<double>(out.size));
  return out;
}

PointSet random_point_set(std::uint64_t n, double p, std::uint64_t seed) {
  if (!(p > 0.0 && p < 1.0))
    throw_error(errc::invalid_probability, "inclusion probability must be in (0,1)");
  SplitMix64 rng(seed);
  PointSet out;
  for (std::uint64_t i = 1; i <= n; ++i)
    if (rng.next_double() < p) out.push_back(Rational(static_cast<long>(i)));
  return out;
}

}  // namespace selfsim
