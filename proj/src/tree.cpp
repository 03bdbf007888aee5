#include "selfsim/tree.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

#include "selfsim/parallel.hpp"
#include "selfsim/rng.hpp"

namespace selfsim {

namespace {

void check_height(int height) {
  if (height < 0 || height > 62)
    throw_error(errc::invalid_param, "tree height must lie in [0, 62]");
}

}  // namespace

DyadicTree DyadicTree::make(int height, std::vector<std::uint64_t> leaves) {
  check_height(height);
  if (leaves.empty()) throw_error(errc::empty_input, "a tree needs at least one leaf");
  std::sort(leaves.begin(), leaves.end());
  leaves.erase(std::unique(leaves.begin(), leaves.end()), leaves.end());
  if (leaves.back() >> height)
    throw_error(errc::out_of_range, "leaf code exceeds 2^height");
  return DyadicTree{height, std::move(leaves)};
}

namespace {

// Leaf index range covered by node (level, code) in a sorted code array.
template <typename Vec>
std::pair<std::size_t, std::size_t> node_range(const Vec& codes, int height,
                                               int level, std::uint64_t code) {
  const int shift = height - level;
  const std::uint64_t lo = code << shift;
  const std::uint64_t hi = (code + 1) << shift;
  const auto b = std::lower_bound(codes.begin(), codes.end(), lo);
  const auto e = std::lower_bound(codes.begin(), codes.end(), hi);
  return {static_cast<std::size_t>(b - codes.begin()),
          static_cast<std::size_t>(e - codes.begin())};
}

void check_node(int height, int level, std::uint64_t code) {
  if (level < 0 || level > height)
    throw_error(errc::out_of_range, "node level outside the tree");
  if (level < 64 && (code >> level))
    throw_error(errc::out_of_range, "node code exceeds 2^level");
}

}  // namespace

std::uint64_t DyadicTree::leaves_under(int level, std::uint64_t code) const {
  check_node(height, level, code);
  auto [b, e] = node_range(leaves, height, level, code);
  return e - b;
}

std::uint64_t DyadicTree::descendant_count(int level, std::uint64_t code,
                                           int m) const {
  check_node(height, level, code);
  if (level + m > height)
    throw_error(errc::depth_exceeded, "descendant window exceeds tree height");
  auto [b, e] = node_range(leaves, height, level, code);
  const int dshift = height - level - m;
  std::uint64_t distinct = 0, prev = 0;
  bool first = true;
  for (std::size_t i = b; i < e; ++i) {
    const std::uint64_t d = leaves[i] >> dshift;
    if (first || d != prev) {
      ++distinct;
      prev = d;
      first = false;
    }
  }
  return distinct;
}

bool DyadicTree::full_branching(int level, std::uint64_t code, int m) const {
  return descendant_count(level, code, m) == (1ULL << m);
}

std::vector<std::uint64_t> DyadicTree::nodes_at_level(int level) const {
  check_node(height, level, 0);
  const int shift = height - level;
  std::vector<std::uint64_t> out;
  for (const auto leaf : leaves) {
    const std::uint64_t c = leaf >> shift;
    if (out.empty() || out.back() != c) out.push_back(c);
  }
  return out;
}

TreeMeasure TreeMeasure::make(int height, std::vector<std::uint64_t> codes,
                              std::vector<double> weights) {
  check_height(height);
  if (codes.size() != weights.size())
    throw_error(errc::invalid_param, "codes and weights must align");
  if (codes.empty()) throw_error(errc::empty_input, "a tree measure needs support");
  std::vector<std::size_t> order(codes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return codes[a] < codes[b]; });

  TreeMeasure tm;
  tm.height = height;
  for (const auto i : order) {
    if (codes[i] >> height)
      throw_error(errc::out_of_range, "leaf code exceeds 2^height");
    if (!(weights[i] > 0.0))
      throw_error(errc::invalid_param, "leaf weights must be positive");
    if (!tm.codes.empty() && tm.codes.back() == codes[i]) {
      tm.weights.back() += weights[i];
    } else {
      tm.codes.push_back(codes[i]);
      tm.weights.push_back(weights[i]);
    }
  }
  long double total = 0.0L;
  tm.prefix.resize(tm.codes.size() + 1);
  tm.prefix[0] = 0.0;
  for (std::size_t i = 0; i < tm.weights.size(); ++i) {
    total += tm.weights[i];
    tm.prefix[i + 1] = static_cast<double>(total);
  }
  if (std::fabs(static_cast<double>(total) - 1.0) > 1e-12)
    throw_error(errc::validation_error, "leaf weights must sum to 1");
  return tm;
}

double TreeMeasure::node_mass(int level, std::uint64_t code) const {
  check_node(height, level, code);
  auto [b, e] = node_range(codes, height, level, code);
  return prefix[e] - prefix[b];
}

double TreeMeasure::leaf_entropy_bits() const {
  double h = 0.0;
  for (const auto w : weights) h -= w * std::log2(w);
  return h;
}

DyadicTree TreeMeasure::support_tree() const {
  return DyadicTree::make(height, codes);
}

std::uint64_t lift_code(const Rational& x, int height) {
  check_height(height);
  if (x.sign() < 0 || x > Rational(1))
    throw_error(errc::out_of_range, "point outside [0,1]");
  if (x.is_zero()) return 0;
  // ceil(x * 2^h) - 1: the prefix of the expansion that terminates in 1s.
  mpz_class scaled = x.numerator() << height;
  mpz_class q;
  mpz_cdiv_q(q.get_mpz_t(), scaled.get_mpz_t(), x.denominator().get_mpz_t());
  return mpz_class(q - 1).get_ui();
}

DyadicTree lift_set(const PointSet& points, int height) {
  if (points.empty()) throw_error(errc::empty_input, "lifting an empty set");
  std::vector<std::uint64_t> codes;
  codes.reserve(points.size());
  for (const auto& x : points) codes.push_back(lift_code(x, height));
  return DyadicTree::make(height, std::move(codes));
}

TreeMeasure lift_weighted_points(const std::vector<Rational>& positions,
                                 const std::vector<double>& weights, int height) {
  if (positions.size() != weights.size())
    throw_error(errc::invalid_param, "positions and weights must align");
  std::vector<std::uint64_t> codes;
  codes.reserve(positions.size());
  for (const auto& x : positions) codes.push_back(lift_code(x, height));
  return TreeMeasure::make(height, std::move(codes), weights);
}

TreeMeasure tree_measure_of_tree(const DyadicTree& tree) {
  const double w = 1.0 / static_cast<double>(tree.leaves.size());
  return TreeMeasure::make(tree.height, tree.leaves,
                           std::vector<double>(tree.leaves.size(), w));
}

std::vector<double> subtree_distribution(const TreeMeasure& theta, NodeRef sigma,
                                         int m) {
  check_node(theta.height, sigma.level, sigma.code);
  if (m < 0 || sigma.level + m > theta.height)
    throw_error(errc::depth_exceeded, "descendant window exceeds tree height");
  if (m > 30) throw_error(errc::invalid_param, "descendant window too wide");
  const double mass = theta.node_mass(sigma.level, sigma.code);
  if (!(mass > 0.0)) throw_error(errc::zero_mass_node, "node carries no mass");

  std::vector<double> out(1ULL << m, 0.0);
  auto [b, e] = node_range(theta.codes, theta.height, sigma.level, sigma.code);
  const int dshift = theta.height - sigma.level - m;
  const std::uint64_t base = sigma.code << m;
  for (std::size_t i = b; i < e; ++i)
    out[(theta.codes[i] >> dshift) - base] += theta.weights[i];
  for (auto& v : out) v /= mass;
  return out;
}

namespace {

// One node's descendant masses, gathered in a single pass over a sorted
// range of leaf codes.
struct NodeWindow {
  double mass = 0.0;
  double max_descendant = 0.0;
  double entropy_bits = 0.0;
  std::uint64_t distinct = 0;
};

template <typename Codes, typename Weights>
NodeWindow gather_window(const Codes& codes, const Weights& weights,
                         std::size_t b, std::size_t e, int dshift) {
  NodeWindow w;
  std::vector<double> parts;
  std::size_t i = b;
  while (i < e) {
    const std::uint64_t d = codes[i] >> dshift;
    double wd = 0.0;
    while (i < e && (codes[i] >> dshift) == d) wd += weights[i++];
    parts.push_back(wd);
    w.mass += wd;
  }
  w.distinct = parts.size();
  for (const auto wd : parts) {
    const double p = wd / w.mass;
    if (p > w.max_descendant) w.max_descendant = p;
    if (p > 0.0) w.entropy_bits -= p * std::log2(p);
  }
  if (parts.size() == 1) {
    w.max_descendant = 1.0;  // exact, regardless of rounding
    w.entropy_bits = 0.0;
  }
  return w;
}

}  // namespace

NodeLocalStats node_local_stats(const TreeMeasure& theta, const DyadicTree* tree,
                                NodeRef sigma, int m, double eps) {
  check_node(theta.height, sigma.level, sigma.code);
  if (m < 1 || sigma.level + m > theta.height)
    throw_error(errc::depth_exceeded, "descendant window exceeds tree height");
  auto [b, e] = node_range(theta.codes, theta.height, sigma.level, sigma.code);
  if (b == e) throw_error(errc::zero_mass_node, "node carries no mass");
  const int dshift = theta.height - sigma.level - m;
  const NodeWindow w = gather_window(theta.codes, theta.weights, b, e, dshift);

  NodeLocalStats out;
  out.support_descendants = w.distinct;
  out.max_descendant_ratio = w.max_descendant;
  out.entropy_bits = w.entropy_bits;
  out.normalized_entropy = w.entropy_bits / m;
  out.set_concentrated = w.max_descendant >= 1.0 - eps;
  out.entropy_concentrated = out.normalized_entropy < eps;
  out.entropy_uniform = out.normalized_entropy > 1.0 - eps;
  if (tree) {
    if (tree->height != theta.height)
      throw_error(errc::invalid_param, "tree and measure heights differ");
    out.full_branching =
        tree->descendant_count(sigma.level, sigma.code, m) == (1ULL << m);
  } else {
    out.full_branching = w.distinct == (1ULL << m);
  }
  return out;
}

LevelProfile level_profile(const TreeMeasure& theta, const DyadicTree* tree,
                           int m, double eps, int jobs) {
  if (m < 1 || m > theta.height)
    throw_error(errc::depth_exceeded, "descendant window exceeds tree height");
  if (tree && tree->height != theta.height)
    throw_error(errc::invalid_param, "tree and measure heights differ");

  LevelProfile profile;
  profile.height = theta.height;
  profile.m = m;
  profile.eps = eps;
  profile.rows.resize(static_cast<std::size_t>(theta.height - m + 1));

  const std::uint64_t full = 1ULL << m;
  parallel_for(profile.rows.size(), jobs, [&](std::size_t li) {
    const int level = static_cast<int>(li);
    const int shift = theta.height - level;
    const int dshift = shift - m;
    LevelProfileRow row;
    row.level = level;
    double total = 0.0, w_full = 0.0, w_conc = 0.0, w_hconc = 0.0,
           w_hunif = 0.0, h_sum = 0.0;
    std::size_t i = 0;
    std::size_t tp = 0;
    const std::size_t tn = tree ? tree->leaves.size() : 0;
    while (i < theta.codes.size()) {
      const std::uint64_t sigma = theta.codes[i] >> shift;
      std::size_t e = i;
      while (e < theta.codes.size() && (theta.codes[e] >> shift) == sigma) ++e;
      const NodeWindow w = gather_window(theta.codes, theta.weights, i, e, dshift);
      bool branching;
      if (tree) {
        while (tp < tn && (tree->leaves[tp] >> shift) < sigma) ++tp;
        std::uint64_t distinct = 0, prev = 0;
        bool first = true;
        while (tp < tn && (tree->leaves[tp] >> shift) == sigma) {
          const std::uint64_t d = tree->leaves[tp] >> dshift;
          if (first || d != prev) {
            ++distinct;
            prev = d;
            first = false;
          }
          ++tp;
        }
        branching = distinct == full;
      } else {
        branching = w.distinct == full;
      }
      const double hn = w.entropy_bits / m;
      total += w.mass;
      if (branching) w_full += w.mass;
      if (w.max_descendant >= 1.0 - eps) w_conc += w.mass;
      if (hn < eps) w_hconc += w.mass;
      if (hn > 1.0 - eps) w_hunif += w.mass;
      h_sum += w.mass * hn;
      i = e;
    }
    if (total > 0.0) {
      row.frac_full_branching = w_full / total;
      row.frac_set_concentrated = w_conc / total;
      row.frac_entropy_concentrated = w_hconc / total;
      row.frac_entropy_uniform = w_hunif / total;
      row.mean_normalized_subtree_entropy = h_sum / total;
    }
    profile.rows[li] = row;
  });
  return profile;
}

std::size_t LevelPartition::count(LevelClass c) const {
  std::size_t n = 0;
  for (const auto x : classes)
    if (x == c) ++n;
  return n;
}

LevelPartition classify_levels(const LevelProfile& profile, double eps,
                               ClassifyMode mode) {
  LevelPartition part;
  part.eps = eps;
  part.mode = mode;
  part.classes.reserve(profile.rows.size());
  for (const auto& row : profile.rows) {
    const double uniform_frac = mode == ClassifyMode::set_branching
                                    ? row.frac_full_branching
                                    : row.frac_entropy_uniform;
    const double conc_frac = mode == ClassifyMode::set_branching
                                 ? row.frac_set_concentrated
                                 : row.frac_entropy_concentrated;
    if (uniform_frac > 1.0 - eps)
      part.classes.push_back(LevelClass::U);
    else if (conc_frac > 1.0 - eps)
      part.classes.push_back(LevelClass::V);
    else
      part.classes.push_back(LevelClass::W);
  }
  return part;
}

ChainRuleResult chain_rule_check(const TreeMeasure& theta, int m) {
  const int h = theta.height;
  if (h < 1) throw_error(errc::invalid_param, "chain rule needs height >= 1");
  if (m < 1 || m > h)
    throw_error(errc::depth_exceeded, "window must satisfy 1 <= m <= height");

  ChainRuleResult out;
  out.lhs = theta.leaf_entropy_bits() / h;
  double acc = 0.0;
  for (int level = 0; level + m <= h; ++level) {
    const int shift = h - level;
    const int dshift = shift - m;
    std::size_t i = 0;
    double level_sum = 0.0;
    while (i < theta.codes.size()) {
      const std::uint64_t sigma = theta.codes[i] >> shift;
      std::size_t e = i;
      while (e < theta.codes.size() && (theta.codes[e] >> shift) == sigma) ++e;
      const NodeWindow w = gather_window(theta.codes, theta.weights, i, e, dshift);
      level_sum += w.mass * w.entropy_bits;
      i = e;
    }
    acc += level_sum / m;
  }
  out.rhs = acc / (h - m + 1);
  out.residual = out.lhs - out.rhs;
  return out;
}

ConcentrationCheck concentration_bound_check(const DyadicTree& tree, int m,
                                             double lambda) {
  const int h = tree.height;
  if (h < 1) throw_error(errc::invalid_param, "needs height >= 1");
  if (m < 1 || m > h)
    throw_error(errc::depth_exceeded, "window must satisfy 1 <= m <= height");
  const double total_leaves = static_cast<double>(tree.leaves.size());

  double mass = 0.0;
  for (int level = 0; level + m <= h; ++level) {
    const int shift = h - level;
    const int dshift = shift - m;
    std::size_t i = 0;
    while (i < tree.leaves.size()) {
      const std::uint64_t sigma = tree.leaves[i] >> shift;
      std::uint64_t node_leaves = 0, best = 0, run = 0, prev = 0;
      bool first = true;
      while (i < tree.leaves.size() && (tree.leaves[i] >> shift) == sigma) {
        const std::uint64_t d = tree.leaves[i] >> dshift;
        if (first || d != prev) {
          if (run > best) best = run;
          run = 0;
          prev = d;
          first = false;
        }
        ++run;
        ++node_leaves;
        ++i;
      }
      if (run > best) best = run;
      if (static_cast<double>(best) >=
          (1.0 - lambda) * static_cast<double>(node_leaves))
        mass += static_cast<double>(node_leaves) / total_leaves;
    }
  }
  ConcentrationCheck out;
  out.concentrated_mass = mass / (h - m + 1);
  out.leaf_exponent = std::log2(total_leaves) / h;
  return out;
}

// ---------------------------------------------------------------------------
// Product bound ("many descendants force many leaves") and its counterexample
// search.
// ---------------------------------------------------------------------------

namespace {

// Exact comparison of prod kappa^{h L_kappa} with F^{m (h+1) F}; used when the
// floating comparison lands too close to call.
bool exact_violation(int h, int m, std::uint64_t f,
                     const std::vector<std::pair<std::uint64_t, std::uint64_t>>&
                         class_masses) {
  mpz_class lhs(1), term, rhs;
  for (const auto& [kappa, mass] : class_masses) {
    if (kappa < 2) continue;
    mpz_ui_pow_ui(term.get_mpz_t(), kappa,
                  static_cast<unsigned long>(h) * mass);
    lhs *= term;
  }
  mpz_ui_pow_ui(rhs.get_mpz_t(), f,
                static_cast<unsigned long>(m) * (h + 1) * f);
  return lhs > rhs;
}

bool decide_violation(int h, int m, std::uint64_t f,
                      const std::vector<std::pair<std::uint64_t, std::uint64_t>>&
                          class_masses,
                      double* bound_log2) {
  long double lhs = 0.0L;
  for (const auto& [kappa, mass] : class_masses)
    if (kappa >= 2)
      lhs += static_cast<long double>(mass) *
             std::log2(static_cast<long double>(kappa));
  lhs *= h;
  const long double rhs = static_cast<long double>(m) * (h + 1) * f *
                          std::log2(static_cast<long double>(f));
  *bound_log2 = static_cast<double>(lhs / (static_cast<long double>(m) * (h + 1) * f));
  const long double diff = lhs - rhs;
  if (diff > 1e-6L) return true;
  if (diff < -1e-6L) return false;
  return exact_violation(h, m, f, class_masses);
}

}  // namespace

ProductBoundInstance evaluate_product_bound(const DyadicTree& tree, int m) {
  if (m < 1) throw_error(errc::invalid_param, "window must satisfy m >= 1");
  const int h = tree.height;
  ProductBoundInstance inst;
  inst.tree = tree;
  inst.m = m;
  inst.actual = tree.leaves.size();

  std::map<std::uint64_t, std::uint64_t> classes;  // descendant count -> leaf mass
  for (int level = 0; level + m <= h; ++level) {
    const int shift = h - level;
    const int dshift = shift - m;
    std::size_t i = 0;
    while (i < tree.leaves.size()) {
      const std::uint64_t sigma = tree.leaves[i] >> shift;
      std::uint64_t node_leaves = 0, distinct = 0, prev = 0;
      bool first = true;
      while (i < tree.leaves.size() && (tree.leaves[i] >> shift) == sigma) {
        const std::uint64_t d = tree.leaves[i] >> dshift;
        if (first || d != prev) {
          ++distinct;
          prev = d;
          first = false;
        }
        ++node_leaves;
        ++i;
      }
      classes[distinct] += node_leaves;
    }
  }
  std::vector<std::pair<std::uint64_t, std::uint64_t>> flat(classes.begin(),
                                                            classes.end());
  inst.violation = h >= m && decide_violation(h, m, inst.actual, flat,
                                              &inst.bound_log2);
  if (h < m) inst.bound_log2 = 0.0;
  const double denom = static_cast<double>(h + 1) * static_cast<double>(inst.actual);
  for (const auto& [kappa, mass] : flat) {
    ProductBoundClass c;
    c.descendant_count = kappa;
    c.c = std::log2(static_cast<double>(kappa)) / m;
    c.leaf_mass = mass;
    c.p = static_cast<double>(mass) / denom;
    inst.classes.push_back(c);
  }
  return inst;
}

namespace {

constexpr int kMaxExhaustiveM = 4;
constexpr std::uint64_t kMaxExhaustiveTrees = 1'500'000'000ULL;

// Per-tree aggregate that composes when a tree is hung under a new root.
// Class masses track kappa in [2, 2^m]; kappa = 1 never affects the bound.
struct CanonRec {
  std::uint64_t mask = 0;   // leaves as a bitmask over {0,1}^g
  std::uint32_t leaves = 0;
  std::array<std::uint16, 3> depth_nodes{};   // node counts at depths 1..3
  std::array<std::uint32, 15> class_mass{};   // kappa = 2..16 -> index kappa-2
};

CanonRec compose(int g, int m, const CanonRec& a, const CanonRec* b) {
  CanonRec r;
  r.mask = a.mask;
  r.leaves = a.leaves;
  if (b) {
    r.mask |= b->mask << (1ULL << (g - 1));
    r.leaves += b->leaves;
  }
  r.depth_nodes[0] = b ? 2 : 1;
  r.depth_nodes[1] = static_cast<std::uint16>(a.depth_nodes[0] +
                                              (b ? b->depth_nodes[0] : 0));
  r.depth_nodes[2] = static_cast<std::uint16>(a.depth_nodes[1] +
                                              (b ? b->depth_nodes[1] : 0));
  for (std::size_t i = 0; i < r.class_mass.size(); ++i)
    r.class_mass[i] = a.class_mass[i] + (b ? b->class_mass[i] : 0);
  if (g >= m) {
    std::uint64_t kappa;
    if (m == 1) {
      kappa = b ? 2 : 1;
    } else {
      const std::uint16 av = a.depth_nodes[m - 2];
      kappa = av + (b ? b->depth_nodes[m - 2] : 0);
    }
    if (kappa >= 2) r.class_mass[kappa - 2] += r.leaves;
  }
  return r;
}

bool rec_violates(int g, int m, const CanonRec& r) {
  long double lhs = 0.0L;
  for (std::size_t i = 0; i < r.class_mass.size(); ++i)
    if (r.class_mass[i])
      lhs += static_cast<long double>(r.class_mass[i]) *
             std::log2(static_cast<long double>(i + 2));
  if (lhs == 0.0L) return false;  // bound is 1
  lhs *= g;
  const long double rhs = static_cast<long double>(m) * (g + 1) * r.leaves *
                          std::log2(static_cast<long double>(r.leaves));
  const long double diff = lhs - rhs;
  if (diff > 1e-6L) return true;
  if (diff < -1e-6L) return false;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> flat;
  for (std::size_t i = 0; i < r.class_mass.size(); ++i)
    if (r.class_mass[i]) flat.emplace_back(i + 2, r.class_mass[i]);
  return exact_violation(g, m, r.leaves, flat);
}

DyadicTree tree_from_mask(int g, std::uint64_t mask) {
  std::vector<std::uint64_t> leaves;
  for (std::uint64_t bit = 0; bit < (1ULL << g); ++bit)
    if (mask & (1ULL << bit)) leaves.push_back(bit);
  return DyadicTree::make(g, std::move(leaves));
}

}  // namespace

ProductBoundSearchResult product_bound_search(int h_max, int m, SearchMode mode,
                                              std::uint64_t seed,
                                              std::uint64_t trials,
                                              std::size_t max_reported,
                                              int jobs) {
  if (h_max < 1) throw_error(errc::invalid_param, "h_max must be >= 1");
  if (m < 1) throw_error(errc::invalid_param, "window must satisfy m >= 1");

  ProductBoundSearchResult result;
  result.h_max = h_max;
  result.m = m;
  result.mode = mode;

  if (mode == SearchMode::random) {
    SplitMix64 rng(seed);
    const int h_lo = std::max(1, m);
    for (std::uint64_t t = 0; t < trials; ++t) {
      const int h = h_lo + static_cast<int>(rng.next_below(
                               static_cast<std::uint64_t>(h_max - h_lo + 1)));
      const std::uint64_t span = 1ULL << h;
      const std::uint64_t want = 1 + rng.next_below(span);
      std::vector<std::uint64_t> codes;
      codes.reserve(want);
      for (std::uint64_t i = 0; i < want; ++i) codes.push_back(rng.next_below(span));
      ProductBoundInstance inst =
          evaluate_product_bound(DyadicTree::make(h, std::move(codes)), m);
      ++result.trees_enumerated;
      if (inst.violation) {
        ++result.violation_count;
        if (result.violations.size() < max_reported)
          result.violations.push_back(std::move(inst));
      }
    }
    return result;
  }

  // Exhaustive over canonical trees (sibling order does not change the bound).
  if (h_max > 8)
    throw_error(errc::invalid_param, "exhaustive search is bounded to h <= 8");
  if (m > kMaxExhaustiveM)
    throw_error(errc::invalid_param,
                "exhaustive search supports m <= 4; use random mode");
  {
    mpz_class per_level(1), total(0);
    for (int g = 1; g <= h_max; ++g) {
      per_level = per_level + per_level * (per_level + 1) / 2;
      total += per_level;
    }
    if (total > kMaxExhaustiveTrees)
      throw budget_error(total.get_str(), kMaxExhaustiveTrees,
                         "canonical enumeration of " + total.get_str() +
                             " trees exceeds the iteration budget");
  }

  std::vector<CanonRec> prev{CanonRec{1, 1, {}, {}}};  // the height-0 tree
  auto report = [&](int g, const CanonRec& rec) {
    ++result.violation_count;
    if (result.violations.size() < max_reported) {
      ProductBoundInstance inst = evaluate_product_bound(tree_from_mask(g, rec.mask), m);
      result.violations.push_back(std::move(inst));
    }
  };

  for (int g = 1; g <= h_max; ++g) {
    const bool keep = g < h_max;  // the last level is streamed
    std::vector<CanonRec> next;
    if (keep) next.reserve(prev.size() + prev.size() * (prev.size() + 1) / 2);

    for (const auto& a : prev) {  // single-child roots
      CanonRec r = compose(g, m, a, nullptr);
      ++result.trees_enumerated;
      if (g >= m && rec_violates(g, m, r)) report(g, r);
      if (keep) next.push_back(r);
    }

    if (keep || jobs <= 1) {
      for (std::size_t i = 0; i < prev.size(); ++i)
        for (std::size_t j = i; j < prev.size(); ++j) {
          CanonRec r = compose(g, m, prev[i], &prev[j]);
          ++result.trees_enumerated;
          if (g >= m && rec_violates(g, m, r)) report(g, r);
          if (keep) next.push_back(r);
        }
    } else {
      // Streamed last level: strided ownership of the outer index, merged in
      // (i, j) order so the result is independent of the worker count.
      struct WorkerOut {
        std::uint64_t enumerated = 0;
        std::uint64_t violations = 0;
        std::vector<std::pair<std::pair<std::size_t, std::size_t>, CanonRec>> found;
      };
      const std::size_t workers =
          std::min<std::size_t>(static_cast<std::size_t>(jobs), prev.size());
      std::vector<WorkerOut> outs(workers);
      parallel_for(workers, static_cast<int>(workers), [&](std::size_t w) {
        WorkerOut& wo = outs[w];
        for (std::size_t i = w; i < prev.size(); i += workers)
          for (std::size_t j = i; j < prev.size(); ++j) {
            CanonRec r = compose(g, m, prev[i], &prev[j]);
            ++wo.enumerated;
            if (g >= m && rec_violates(g, m, r)) {
              ++wo.violations;
              if (wo.found.size() < max_reported)
                wo.found.push_back({{i, j}, r});
            }
          }
      });
      std::vector<std::pair<std::pair<std::size_t, std::size_t>, CanonRec>> merged;
      for (auto& wo : outs) {
        result.trees_enumerated += wo.enumerated;
        result.violation_count += wo.violations;
        merged.insert(merged.end(), wo.found.begin(), wo.found.end());
      }
      std::sort(merged.begin(), merged.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      for (const auto& [key, rec] : merged) {
        if (result.violations.size() >= max_reported) break;
        result.violations.push_back(
            evaluate_product_bound(tree_from_mask(g, rec.mask), m));
      }
    }
    prev = std::move(next);
  }
  result.exhausted = true;
  return result;
}

}  // namespace selfsim
