#include "selfsim/pointset.hpp"

#include <algorithm>
#include <queue>

namespace selfsim {

PointSet make_point_set(std::vector<Rational> points) {
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  return points;
}

bool is_point_set(const PointSet& points) {
  for (std::size_t i = 1; i < points.size(); ++i)
    if (!(points[i - 1] < points[i])) return false;
  return true;
}

namespace {

// k-way merge of the shifted copies {A + b : b in B}; memory stays
// proportional to the output instead of |A|*|B|.
PointSet sumset_merge(const PointSet& a, const PointSet& b) {
  struct Cursor {
    std::size_t bi;
    std::size_t ai;
  };
  std::vector<Rational> heads(b.size());
  for (std::size_t j = 0; j < b.size(); ++j) heads[j] = a[0] + b[j];
  auto cmp = [&](const Cursor& l, const Cursor& r) {
    int c = ::cmp(heads[l.bi].raw(), heads[r.bi].raw());
    if (c != 0) return c > 0;
    return l.bi > r.bi;  // stable tie-break, output is deduped anyway
  };
  std::priority_queue<Cursor, std::vector<Cursor>, decltype(cmp)> heap(cmp);
  for (std::size_t j = 0; j < b.size(); ++j) heap.push({j, 0});
  PointSet out;
  while (!heap.empty()) {
    Cursor c = heap.top();
    heap.pop();
    Rational v = heads[c.bi];
    if (out.empty() || out.back() != v) out.push_back(v);
    if (++c.ai < a.size()) {
      heads[c.bi] = a[c.ai] + b[c.bi];
      heap.push(c);
    }
  }
  return out;
}

}  // namespace

PointSet sumset(const PointSet& a, const PointSet& b, std::uint64_t budget) {
  if (a.empty() || b.empty()) return {};
  const std::uint64_t pairs = static_cast<std::uint64_t>(a.size()) * b.size();
  if (a.size() != 0 && pairs / a.size() != b.size())
    throw budget_error("overflow", budget, "sumset size overflows");
  if (pairs > budget)
    throw budget_error(std::to_string(pairs), budget,
                       "sumset of " + std::to_string(a.size()) + " x " +
                           std::to_string(b.size()) + " points exceeds budget");
  if (pairs <= 1'000'000) {
    std::vector<Rational> all;
    all.reserve(pairs);
    for (const auto& x : a)
      for (const auto& y : b) all.push_back(x + y);
    return make_point_set(std::move(all));
  }
  return b.size() <= a.size() ? sumset_merge(a, b) : sumset_merge(b, a);
}

PointSet scale_translate(const PointSet& a, const Rational& t, const Rational& c) {
  if (t.is_zero()) throw_error(errc::zero_scale, "scaling a point set by zero");
  PointSet out;
  out.reserve(a.size());
  if (t.sign() > 0) {
    for (const auto& x : a) out.push_back(t * x + c);
  } else {
    for (auto it = a.rbegin(); it != a.rend(); ++it) out.push_back(t * *it + c);
  }
  return out;
}

std::optional<Rational> min_gap(const PointSet& a) {
  if (a.size() < 2) return std::nullopt;
  Rational best = a[1] - a[0];
  for (std::size_t i = 2; i < a.size(); ++i) {
    Rational g = a[i] - a[i - 1];
    if (g < best) best = g;
  }
  return best;
}

}  // namespace selfsim
