#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "selfsim/ifs.hpp"
#include "selfsim/pointset.hpp"
#include "selfsim/rational.hpp"

namespace selfsim {

enum class CoverMode {
  optimal,  // minimal number of closed length-eps intervals (greedy sweep)
  grid,     // occupied cells [k*eps, (k+1)*eps)
};

// Covering number of a finite point set at scale eps.
std::uint64_t cover_count(const PointSet& points, const Rational& eps,
                          CoverMode mode);

struct SValue {
  std::uint32_t n = 0;
  std::uint64_t cover = 0;
  double s = 0.0;           // log2(cover)
  double normalized = 0.0;  // s / (n log2(1/r))
};

struct SuperadditivityViolation {
  std::uint32_t m = 0;
  std::uint32_t n = 0;
  double slack = 0.0;  // s_{m+n} - s_m - s_n (violations have slack < -log2 3)
};

struct DimensionReport {
  std::vector<SValue> s_values;       // grid covers of X_n at scale r^n
  double bdim_estimate = 0.0;         // s_{n_max} / (n_max * log2(1/r))
  double sdim = 0.0;
  double beta = 0.0;                  // min(1, sdim)
  std::vector<SuperadditivityViolation> superadditivity_violations;
};

// s_n = log2 N_{r^n}(X_n) with grid covers, pairwise checked against
// s_{m+n} >= s_m + s_n - log2 3.  The system is normalized first.
DimensionReport dimension_report(const IFS& ifs, std::uint32_t n_max,
                                 std::uint64_t budget = kDefaultPointBudget);

struct SumsetCoverCheck {
  std::uint64_t cover_sum = 0;     // N_gamma(A+B)
  std::uint64_t cover_a = 0;       // N_eps(A)
  std::uint64_t cover_b = 0;       // N_gamma(B)
  double rhs = 0.0;                // cover_a * cover_b / 3
  bool holds = false;              // 3 * cover_sum >= cover_a * cover_b
};

// N_gamma(A+B) >= (1/3) N_eps(A) N_gamma(B) for B inside [0, eps), gamma < eps.
// All three covers are optimal-mode.
SumsetCoverCheck sumset_cover_check(const PointSet& a, const PointSet& b,
                                    const Rational& eps, const Rational& gamma,
                                    std::uint64_t budget = kDefaultPointBudget);

struct FiberWitness {
  Rational cell_start;             // cell is [cell_start, cell_start + r^m)
  Rational cell_width;
  std::uint64_t count = 0;         // |X_m intersect cell|
  double sigma_estimate = 0.0;     // log2(count) / (m log2(1/r))
  std::uint64_t localized_cover = 0;  // N_{r^{m+n}}((X_m cap J) + r^m X_n); 0 if not computed
  bool overlap_present = false;    // advisory: exact overlaps at level m
};

// Densest r^m-grid cell of X_m (Prop.-6-style witness; ties go left).
FiberWitness fiber_witness(const IFS& ifs, std::uint32_t m,
                           std::uint64_t budget = kDefaultPointBudget);

struct LocalSumsetProfile {
  std::vector<FiberWitness> witnesses;  // sorted by localized_cover, then cell
  std::uint32_t m = 0;
  std::uint32_t n = 0;                  // n = k*m
  std::uint64_t cover_full = 0;         // N_{r^{m+n}}(X_{m+n})
  std::uint64_t cover_coarse = 0;       // N_{r^m}(X_m)
  double min_cover_bound = 0.0;         // 3 * cover_full / cover_coarse
  bool min_bound_holds = false;
};

// Localized sumset covers N_{r^{m+n}}((X_m cap J) + r^m X_n) for every
// occupied cell J; the smallest one must respect the factor-3 bound.
LocalSumsetProfile local_sumset_profile(const IFS& ifs, std::uint32_t m,
                                        std::uint32_t k,
                                        std::uint64_t budget = kDefaultPointBudget,
                                        int jobs = 1);

struct SmallSumsetWitness {
  PointSet y;                      // r^{-m}(X_m cap I - left endpoint), in [0,1]
  FiberWitness cell;
  std::uint64_t cover_y = 0;       // N_{r^n}(Y), grid
  std::uint64_t cover_xy = 0;      // N_{r^n}(X_n + Y), grid
};

// Searches for one cell that is simultaneously crowded (count >= count_threshold)
// and additively tame (localized cover <= cover_threshold).  Empty result means
// no cell qualifies, which is a legitimate outcome.
std::optional<SmallSumsetWitness> small_sumset_witness(
    const IFS& ifs, std::uint32_t m, std::uint32_t k, double count_threshold,
    double cover_threshold, std::uint64_t budget = kDefaultPointBudget,
    int jobs = 1);

struct SumGrowthResult {
  std::uint32_t n = 0;       // rho = r^n
  std::uint64_t cover_x = 0;
  std::uint64_t cover_y = 0;
  std::uint64_t cover_xy = 0;
  double delta_hat = 0.0;    // log N_XY / log N_X - 1
};

// Grid covering numbers of X_n, Y and X_n + Y at scale rho = r^n.
SumGrowthResult sum_growth_experiment(const IFS& ifs, const PointSet& y,
                                      const Rational& rho,
                                      std::uint64_t budget = kDefaultPointBudget);

}  // namespace selfsim
