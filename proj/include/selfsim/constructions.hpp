#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "selfsim/ifs.hpp"
#include "selfsim/pointset.hpp"
#include "selfsim/rational.hpp"

namespace selfsim {

struct PresetInfo {
  std::string name;
  std::string description;
  bool takes_ratio = false;  // accepts a rational parameter
};

const std::vector<PresetInfo>& preset_catalog();

// Named systems; all but "duplicate" come out normalized to hull [0,1].
//   cantor3        r=1/3, a={0, 2/3}
//   dyadic         r=1/2, a={0, 1/2}
//   zero-one-three x -> r x + d for d in {0,1,3}, then normalized (param r)
//   overlap-demo   r=1/2, a={0, 1/4, 1/2}
//   duplicate      r=1/2, a={0, 0}    (exact overlap at level 1)
IFS preset(const std::string& name,
           const std::optional<Rational>& param = std::nullopt);

// Generalized arithmetic progression base + sum_i j_i * gaps[i],
// 0 <= j_i < lengths[i].
struct GAP {
  Rational base;
  std::vector<Rational> gaps;          // all nonzero
  std::vector<std::uint64_t> lengths;  // all >= 1
};

struct GapPoints {
  PointSet points;
  bool proper = false;  // the generating map was injective
};

GapPoints gap_points(const GAP& gap, std::uint64_t budget = kDefaultPointBudget);

// A_n = sum_{i=1..n} 2^{-i^2} {0..2^i - 1}; |A_n| = 2^{n(n+1)/2}.
PointSet an_construction(std::uint32_t n,
                         std::uint64_t budget = kDefaultPointBudget);

// The GAP whose points reproduce A_n (gaps 2^{-i^2}, lengths 2^i).
GAP an_gap(std::uint32_t n);

struct DoublingStats {
  std::uint64_t size = 0;         // |A|
  std::uint64_t sum_size = 0;     // |A + A|
  double ratio = 0.0;             // |A+A| / |A|
  std::optional<double> growth_exponent;  // log|A+A| / log|A|; absent for |A| = 1
};

DoublingStats doubling_stats(const PointSet& a,
                             std::uint64_t budget = kDefaultPointBudget);

// Random subset of {1..n}, each element kept with probability p, driven by
// splitmix64 (one draw per element, in increasing order).
PointSet random_point_set(std::uint64_t n, double p, std::uint64_t seed);

}  // namespace selfsim
