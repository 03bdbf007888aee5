#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "selfsim/pointset.hpp"
#include "selfsim/rational.hpp"

namespace selfsim {

// Iterated function system x -> ratio*x + translations[i] with one common
// contraction ratio in (0,1).  Duplicate translations are allowed; they model
// an exact overlap already at level 1.
struct IFS {
  Rational ratio;
  std::vector<Rational> translations;

  // Validates ratio in (0,1) and at least two maps.
  static IFS make(Rational ratio, std::vector<Rational> translations);

  std::size_t alphabet_size() const { return translations.size(); }
};

using Word = std::vector<std::uint32_t>;

// Distinct level-n cylinder positions f_w(0), with word multiplicities.
struct CylinderSet {
  std::uint32_t level = 0;
  PointSet points;                          // strictly increasing
  std::vector<std::uint64_t> multiplicities;  // aligned with points

  std::uint64_t word_count() const;  // sum of multiplicities = |alphabet|^level
  bool has_collision() const;        // some multiplicity > 1
};

// The affine change of coordinates g(x) = scale*x + offset that was applied.
struct AffineMap {
  Rational scale;   // nonzero
  Rational offset;

  Rational operator()(const Rational& x) const { return scale * x + offset; }
};

struct NormalizationResult {
  IFS ifs;        // conjugated system, attractor hull exactly [0,1], 0 in X
  AffineMap map;  // the conjugacy that was applied
  bool changed = false;
};

struct SimilarityDimension {
  double sdim;  // log|alphabet| / log(1/ratio)
  double beta;  // min(1, sdim)
};

// Lower bound 1/(Q*q^n) valid for every positive Delta_n of a rational IFS.
struct RationalBound {
  mpz_class Q;  // product of translation denominators
  mpz_class q;  // denominator of the contraction ratio

  Rational bound(std::uint32_t n) const;
};

struct DeltaEntry {
  std::uint32_t n = 0;
  Rational delta;
  // -log2(delta)/n; absent when delta == 0.
  std::optional<double> normalized_log;
};

struct DeltaReport {
  std::vector<DeltaEntry> entries;
  std::optional<std::uint32_t> overlap_level;  // smallest n with Delta_n = 0
  // Empirical k in Delta_n ~ 2^{-kn}, read at the deepest positive level.
  std::optional<double> decay_exponent_estimate;
  bool monotone = true;            // Delta_{n+1} <= Delta_n held throughout
  bool rational_bound_ok = true;   // Delta_n * Q * q^n >= 1 whenever positive
  RationalBound bound;
};

// Conjugates the system so the attractor hull is exactly [0,1] with 0 in X.
// Hull endpoints are the extreme fixed points (min a)/(1-r), (max a)/(1-r).
NormalizationResult validate_and_normalize(const IFS& ifs);

// Normalized system when possible, the input unchanged when all maps share
// one fixed point (the single-point attractor is fine for every report).
IFS normalized_or_degenerate(const IFS& ifs);

// f_w(x) = r^{|w|} x + sum_k a_{w_k} r^{k-1}, exactly.
Rational apply_word(const IFS& ifs, const Word& word, const Rational& x);

// Distinct values of f_w(0) over words of length n, built incrementally via
// X_{m+1} = X_m + r^m X_1 with exact merging.
CylinderSet cylinder_points(const IFS& ifs, std::uint32_t n,
                            std::uint64_t budget = kDefaultPointBudget);

// min |f_w(0) - f_v(0)| over distinct length-n words; zero iff exact overlap.
Rational delta_n(const IFS& ifs, std::uint32_t n,
                 std::uint64_t budget = kDefaultPointBudget);
Rational delta_of_cylinders(const CylinderSet& cs);

SimilarityDimension similarity_dimension(const IFS& ifs);

RationalBound rational_separation_bound(const IFS& ifs);

DeltaReport delta_decay_report(const IFS& ifs, std::uint32_t n_max,
                               std::uint64_t budget = kDefaultPointBudget);

}  // namespace selfsim
