#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "selfsim/cover.hpp"
#include "selfsim/ifs.hpp"
#include "selfsim/rational.hpp"
#include "selfsim/tree.hpp"

namespace selfsim {

// Finitely supported probability measure with exact rational atom positions.
// Weights are stored as exact rationals throughout (a float weight converts
// exactly, every double being dyadic); identity checks can therefore compare
// atom lists bit-for-bit.
struct DiscreteMeasure {
  std::vector<Rational> positions;  // strictly increasing
  std::vector<Rational> weights;    // positive, summing to 1 (within 1e-12)

  static DiscreteMeasure make(std::vector<Rational> positions,
                              std::vector<Rational> weights);
  static DiscreteMeasure dirac(const Rational& x);

  std::size_t size() const { return positions.size(); }
  bool operator==(const DiscreteMeasure& o) const = default;
};

// sum_{i,j} p_i q_j at positions x_i + y_j, merged at equal positions.
DiscreteMeasure convolve(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                         std::uint64_t budget = kDefaultPointBudget);

// Pushforward under x -> t*x + c; t must be nonzero.
DiscreteMeasure affine_push(const DiscreteMeasure& mu, const Rational& t,
                            const Rational& c);

struct GridEntropy {
  double bits = 0.0;        // H(mu, I_eps), base 2
  double normalized = 0.0;  // bits / log2(1/eps)
  std::uint64_t occupied_cells = 0;
};

GridEntropy grid_entropy(const DiscreteMeasure& mu, const GridSpec& grid);

// The level-n self-similar measure: weight |alphabet|^{-n} per word, merged
// at coinciding positions.  Support equals cylinder_points(ifs, n).
DiscreteMeasure mu_n(const IFS& ifs, std::uint32_t n,
                     std::uint64_t budget = kDefaultPointBudget);

// mu^{(m+n)} == mu^{(m)} * S_{r^m} mu^{(n)}, exactly.
bool convolution_identity_check(const IFS& ifs, std::uint32_t m, std::uint32_t n,
                                std::uint64_t budget = kDefaultPointBudget);

// Restriction to [start, start+width), renormalized.
DiscreteMeasure conditional_measure(const DiscreteMeasure& mu,
                                    const Rational& start, const Rational& width);

struct EntropyEntry {
  std::uint32_t n = 0;
  double bits = 0.0;        // H(mu^(n), I_{r^n})
  double normalized = 0.0;  // bits / (n log2(1/r))
};

struct EntropyReport {
  std::vector<EntropyEntry> entries;
  double alpha_hat = 0.0;  // normalized entropy at n_max
  std::vector<SuperadditivityViolation> superadditivity_violations;
  double covering_alpha_hat = 0.0;  // from dimension_report at the same depth
  bool entropy_le_covering = true;  // alpha_hat <= covering + 0.02
};

// s_n = H(mu^(n), I_{r^n}); pairwise checked against the log2(3) slack, and
// compared with the covering estimate.  The system is normalized first.
EntropyReport entropy_dimension_report(const IFS& ifs, std::uint32_t n_max,
                                       std::uint64_t budget = kDefaultPointBudget);

struct FiberEntropyCell {
  Rational cell_start;
  double mass = 0.0;               // mu^(m)(I)
  double fiber_entropy_bits = 0.0; // H(mu^(m)_I, I_{r^{m+n}})
  double conv_entropy_normalized = 0.0;  // of mu^(m)_I * S_{r^m} mu^(n) at r^{m+n},
                                         // divided by n log2(1/r)
};

struct FiberEntropyProfile {
  std::uint32_t m = 0;
  std::uint32_t n = 0;  // n = k*m
  double alpha_hat = 0.0;  // normalized entropy of mu^(m+n) at scale r^{m+n}
  double mass_high_fiber_entropy = 0.0;   // cells with fiber entropy > c*m*log2(1/r)
  double mass_small_conv_entropy = 0.0;   // cells with normalized conv <= alpha + delta
  std::vector<FiberEntropyCell> cells;
};

FiberEntropyProfile fiber_entropy_profile(const IFS& ifs, std::uint32_t m,
                                          std::uint32_t k, double c, double delta,
                                          std::uint64_t budget = kDefaultPointBudget,
                                          int jobs = 1);

struct SmallConvolutionWitness {
  DiscreteMeasure nu;              // conditional fiber, rescaled to [0,1)
  Rational cell_start;
  double nu_entropy_scaled = 0.0;    // (1/m) H_{r^m}(nu), normalized entropy
  double conv_entropy_scaled = 0.0;  // (1/m) H_{r^m}(mu^(m) * nu)
  double mu_entropy_scaled = 0.0;    // (1/m) H_{r^m}(mu^(m))
};

// Searches the r^m-cells of mu^(m) for a fiber whose rescaled conditional
// measure has (1/m)H_{r^m} above tau while barely growing the convolution.
// tau = 0 admits equality so that any non-empty fiber qualifies.
std::optional<SmallConvolutionWitness> small_convolution_witness(
    const IFS& ifs, std::uint32_t m, std::uint32_t k, double tau, double delta,
    std::uint64_t budget = kDefaultPointBudget, int jobs = 1);

struct EntropyUniformityResult {
  double mass = 0.0;      // P((1/m)H(lift_{sigma,m}) > (1-2 eps) alpha_hat),
                          // over levels 0..h-m of the node distribution
  double alpha_hat = 0.0;
  int height = 0;
};

EntropyUniformityResult entropy_uniformity_mass(
    const IFS& ifs, std::uint32_t n, int m, double eps,
    std::uint64_t budget = kDefaultPointBudget);

// Normalized entropy growth H_eps(mu * mu) - H_eps(mu).
double entropy_doubling(const DiscreteMeasure& mu, const GridSpec& grid,
                        std::uint64_t budget = kDefaultPointBudget);

// Lift to the binary tree of height h (leaf weight = mass arriving there).
TreeMeasure lift_measure(const DiscreteMeasure& mu, int height);

}  // namespace selfsim
