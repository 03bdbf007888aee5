#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "selfsim/pointset.hpp"
#include "selfsim/rational.hpp"

namespace selfsim {

// Height-h binary tree stored as its sorted leaf codes (h-bit integers).
// Every prefix of a leaf is a node, so T1-T3 hold by construction.
struct DyadicTree {
  int height = 0;
  std::vector<std::uint64_t> leaves;  // sorted, distinct, < 2^height

  static DyadicTree make(int height, std::vector<std::uint64_t> leaves);

  std::uint64_t leaf_span() const { return 1ULL << height; }

  // Number of leaves below node (level, code).
  std::uint64_t leaves_under(int level, std::uint64_t code) const;

  // All 2^m descendants m generations below (level, code) present?
  bool full_branching(int level, std::uint64_t code, int m) const;

  // Distinct nodes m generations below (level, code).
  std::uint64_t descendant_count(int level, std::uint64_t code, int m) const;

  std::vector<std::uint64_t> nodes_at_level(int level) const;
};

// Masses on the nodes of the full height-h tree satisfying M1-M2, stored as
// positive leaf weights; node masses are range sums over sorted leaf codes.
struct TreeMeasure {
  int height = 0;
  std::vector<std::uint64_t> codes;  // sorted leaf codes with positive weight
  std::vector<double> weights;       // aligned, sums to 1 (within 1e-12)
  std::vector<double> prefix;        // prefix[i] = sum of weights[0..i)

  static TreeMeasure make(int height, std::vector<std::uint64_t> codes,
                          std::vector<double> weights);

  double node_mass(int level, std::uint64_t code) const;
  double leaf_entropy_bits() const;  // H(boundary distribution), base 2
  DyadicTree support_tree() const;
};

struct NodeRef {
  int level = 0;
  std::uint64_t code = 0;
};

// Lift of a point set in [0,1] to the length-h prefixes of binary expansions;
// dyadic ambiguity resolves toward the expansion that terminates in 1s
// (1/2 -> 0111..., 1 -> 111...).
DyadicTree lift_set(const PointSet& points, int height);

// Leaf code of a single point under the same convention.
std::uint64_t lift_code(const Rational& x, int height);

// Weighted-point lift; weight of a leaf is the total mass arriving there.
TreeMeasure lift_weighted_points(const std::vector<Rational>& positions,
                                 const std::vector<double>& weights, int height);

// Uniform measure on the leaves, extended to node masses.
TreeMeasure tree_measure_of_tree(const DyadicTree& tree);

// theta_{sigma,m}: normalized masses on the 2^m descendants of sigma.
std::vector<double> subtree_distribution(const TreeMeasure& theta, NodeRef sigma,
                                         int m);

struct NodeLocalStats {
  bool full_branching = false;      // on the tree (or support when absent)
  bool set_concentrated = false;    // some descendant holds >= (1-eps) of mass
  double entropy_bits = 0.0;        // H(theta_{sigma,m}), base 2
  double normalized_entropy = 0.0;  // entropy_bits / m
  bool entropy_concentrated = false;  // normalized < eps
  bool entropy_uniform = false;       // normalized > 1 - eps
  std::uint64_t support_descendants = 0;
  double max_descendant_ratio = 0.0;
};

NodeLocalStats node_local_stats(const TreeMeasure& theta, const DyadicTree* tree,
                                NodeRef sigma, int m, double eps);

struct LevelProfileRow {
  int level = 0;
  double frac_full_branching = 0.0;
  double frac_set_concentrated = 0.0;
  double frac_entropy_concentrated = 0.0;
  double frac_entropy_uniform = 0.0;
  double mean_normalized_subtree_entropy = 0.0;
};

// Per-level, tree-measure-weighted fractions; levels 0..h-m only (below that
// no m-generation window exists).
struct LevelProfile {
  int height = 0;
  int m = 0;
  double eps = 0.0;
  std::vector<LevelProfileRow> rows;
};

LevelProfile level_profile(const TreeMeasure& theta, const DyadicTree* tree,
                           int m, double eps, int jobs = 1);

enum class LevelClass { U, V, W };

enum class ClassifyMode {
  set_branching,  // U by full branching, V by set concentration
  entropy,        // U by entropy uniformity, V by entropy concentration
};

struct LevelPartition {
  std::vector<LevelClass> classes;  // indexed by level 0..h-m
  double eps = 0.0;
  ClassifyMode mode = ClassifyMode::set_branching;

  std::size_t count(LevelClass c) const;
};

// U when the uniform-side fraction exceeds 1-eps (ties resolve to U),
// V when the concentration fraction exceeds 1-eps, W otherwise.
LevelPartition classify_levels(const LevelProfile& profile, double eps,
                               ClassifyMode mode = ClassifyMode::set_branching);

struct ChainRuleResult {
  double lhs = 0.0;       // (1/h) H(boundary measure)
  double rhs = 0.0;       // average over levels of E[(1/m) H(theta_{sigma,m})]
  double residual = 0.0;  // lhs - rhs; exactly 0 for m = 1
};

ChainRuleResult chain_rule_check(const TreeMeasure& theta, int m);

struct ConcentrationCheck {
  double concentrated_mass = 0.0;  // P(lambda-concentrated | level <= h-m)
  double leaf_exponent = 0.0;      // (1/h) log2 |leaves|
};

ConcentrationCheck concentration_bound_check(const DyadicTree& tree, int m,
                                             double lambda);

struct ProductBoundClass {
  std::uint64_t descendant_count = 0;  // exact count m generations down
  double c = 0.0;                      // log2(count) / m
  std::uint64_t leaf_mass = 0;         // sum over class of leaves(sigma)
  double p = 0.0;                      // leaf_mass / ((h+1) |leaves|)
};

struct ProductBoundInstance {
  DyadicTree tree;
  int m = 0;
  std::vector<ProductBoundClass> classes;
  double bound_log2 = 0.0;  // log2 of prod 2^{c_i p_i h}
  std::uint64_t actual = 0;  // |leaves|
  bool violation = false;    // bound strictly exceeds actual
};

// Evaluates the (false) product lower bound on one tree.
ProductBoundInstance evaluate_product_bound(const DyadicTree& tree, int m);

enum class SearchMode { exhaustive, random };

struct ProductBoundSearchResult {
  int h_max = 0;
  int m = 0;
  SearchMode mode = SearchMode::exhaustive;
  std::uint64_t trees_enumerated = 0;
  std::uint64_t violation_count = 0;
  bool exhausted = false;  // true when every canonical tree was visited
  // First instances in enumeration order, at most max_reported of them.
  std::vector<ProductBoundInstance> violations;
};

// Enumerates trees (canonical up to sibling exchange) of heights 1..h_max in
// exhaustive mode, or seeded random trees, and reports every tree whose
// product bound exceeds its true leaf count.  Near-tie comparisons are
// settled with exact integer arithmetic.
ProductBoundSearchResult product_bound_search(
    int h_max, int m, SearchMode mode, std::uint64_t seed = 0,
    std::uint64_t trials = 0, std::size_t max_reported = 1000, int jobs = 1);

}  // namespace selfsim
