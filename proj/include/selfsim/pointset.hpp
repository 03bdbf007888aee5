#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "selfsim/rational.hpp"

namespace selfsim {

// A finite set of points on the line: sorted, strictly increasing.
using PointSet = std::vector<Rational>;

// Sorts and removes duplicates.
PointSet make_point_set(std::vector<Rational> points);

bool is_point_set(const PointSet& points);

// {a + b : a in A, b in B}, deduplicated.  Throws budget_error when
// |A|*|B| exceeds `budget`.
PointSet sumset(const PointSet& a, const PointSet& b,
                std::uint64_t budget = kDefaultPointBudget);

// {t*x + c : x in A}; t must be nonzero.
PointSet scale_translate(const PointSet& a, const Rational& t, const Rational& c);

// Smallest distance between consecutive points; nullopt for |A| < 2.
std::optional<Rational> min_gap(const PointSet& a);

}  // namespace selfsim
