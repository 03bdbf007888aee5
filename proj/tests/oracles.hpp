#pragma once

// Brute-force oracles used by the tests.  These deliberately avoid the
// incremental/greedy production code paths: words are enumerated one by one
// and covers are minimized by exhaustive search.

#include <algorithm>
#include <cstdint>
#include <vector>

#include "selfsim/ifs.hpp"
#include "selfsim/pointset.hpp"
#include "selfsim/rational.hpp"

namespace oracles {

using selfsim::IFS;
using selfsim::PointSet;
using selfsim::Rational;
using selfsim::Word;

// f_w(0) by direct composition, looping over all |alphabet|^n words.
inline std::vector<Rational> enumerate_cylinder_values(const IFS& ifs,
                                                       std::uint32_t n) {
  std::vector<Rational> values;
  Word w(n, 0);
  const std::size_t k = ifs.alphabet_size();
  while (true) {
    values.push_back(selfsim::apply_word(ifs, w, Rational(0)));
    std::size_t pos = n;
    while (pos > 0 && w[pos - 1] + 1U == k) w[--pos] = 0;
    if (pos == 0) break;
    ++w[pos - 1];
  }
  return values;
}

inline PointSet enumerate_cylinder_points(const IFS& ifs, std::uint32_t n) {
  return selfsim::make_point_set(enumerate_cylinder_values(ifs, n));
}

// Minimal pairwise distance over all distinct word pairs.
inline Rational enumerate_delta(const IFS& ifs, std::uint32_t n) {
  auto values = enumerate_cylinder_values(ifs, n);
  std::sort(values.begin(), values.end());
  Rational best = values.back() - values.front();
  bool any = false;
  for (std::size_t i = 1; i < values.size(); ++i) {
    const Rational gap = values[i] - values[i - 1];
    if (!any || gap < best) best = gap;
    any = true;
  }
  return best;
}

// Minimal number of closed length-eps intervals covering the points, by
// exhaustive recursion on the leftmost uncovered point's interval placement.
// In one dimension an optimal cover may be assumed to start each interval at
// an uncovered point, which the recursion below does.
inline std::uint64_t brute_force_cover(const PointSet& points,
                                       const Rational& eps) {
  if (points.empty()) return 0;
  // Candidate intervals anchored so that some point is the left endpoint.
  std::uint64_t best = points.size();
  struct Frame {
    std::size_t next;
    std::uint64_t used;
  };
  std::vector<Frame> stack{{0, 0}};
  while (!stack.empty()) {
    auto [next, used] = stack.back();
    stack.pop_back();
    if (next >= points.size()) {
      best = std::min(best, used);
      continue;
    }
    if (used + 1 > best) continue;
    // The leftmost uncovered point must be covered by an interval whose left
    // endpoint lies in [p - eps, p]; restricted to point anchors, every
    // placement is dominated by anchoring at some earlier uncovered point,
    // and anchoring at p itself is always admissible.
    for (std::size_t a = next; a < points.size() && points[a] <= points[next];
         ++a) {
      const Rational right = points[a] + eps;
      std::size_t nxt = next;
      while (nxt < points.size() && points[nxt] <= right) ++nxt;
      stack.push_back({nxt, used + 1});
    }
  }
  return best;
}

}  // namespace oracles
