#include "selfsim/cover.hpp"

#include <algorithm>
#include <cmath>

#include "selfsim/parallel.hpp"

namespace selfsim {

std::uint64_t cover_count(const PointSet& points, const Rational& eps,
                          CoverMode mode) {
  if (points.empty()) throw_error(errc::empty_input, "covering an empty point set");
  if (eps.sign() <= 0) throw_error(errc::invalid_param, "cover scale must be positive");
  std::uint64_t count = 0;
  if (mode == CoverMode::optimal) {
    // Greedy left-to-right sweep; optimal for intervals on the line.
    std::size_t i = 0;
    while (i < points.size()) {
      ++count;
      const Rational limit = points[i] + eps;
      while (i < points.size() && points[i] <= limit) ++i;
    }
  } else {
    mpz_class cell, prev;
    bool first = true;
    for (const auto& x : points) {
      cell = x.floor_div(eps);
      if (first || cell != prev) {
        ++count;
        prev = cell;
        first = false;
      }
    }
  }
  return count;
}

namespace {

double slack_tolerance() { return 1e-9; }

std::vector<SuperadditivityViolation> check_superadditivity(
    const std::vector<double>& s) {
  // s[0] corresponds to n = 1.
  std::vector<SuperadditivityViolation> out;
  const double allowance = std::log2(3.0) + slack_tolerance();
  const std::size_t n_max = s.size();
  for (std::size_t m = 1; m <= n_max; ++m)
    for (std::size_t n = m; m + n <= n_max; ++n) {
      const double slack = s[m + n - 1] - s[m - 1] - s[n - 1];
      if (slack < -allowance)
        out.push_back({static_cast<std::uint32_t>(m),
                       static_cast<std::uint32_t>(n), slack});
    }
  return out;
}

}  // namespace

DimensionReport dimension_report(const IFS& in, std::uint32_t n_max,
                                 std::uint64_t budget) {
  const IFS ifs = normalized_or_degenerate(in);
  DimensionReport report;
  const auto sd = similarity_dimension(ifs);
  report.sdim = sd.sdim;
  report.beta = sd.beta;
  const double log_inv_r = -log2_of(ifs.ratio);

  std::vector<double> s;
  Rational scale(1);
  for (std::uint32_t n = 1; n <= n_max; ++n) {
    scale *= ifs.ratio;
    const CylinderSet cs = cylinder_points(ifs, n, budget);
    const std::uint64_t cover = cover_count(cs.points, scale, CoverMode::grid);
    const double sn = std::log2(static_cast<double>(cover));
    report.s_values.push_back(
        {n, cover, sn, sn / (static_cast<double>(n) * log_inv_r)});
    s.push_back(sn);
  }
  if (n_max > 0)
    report.bdim_estimate = s.back() / (static_cast<double>(n_max) * log_inv_r);
  report.superadditivity_violations = check_superadditivity(s);
  return report;
}

SumsetCoverCheck sumset_cover_check(const PointSet& a, const PointSet& b,
                                    const Rational& eps, const Rational& gamma,
                                    std::uint64_t budget) {
  if (a.empty() || b.empty()) throw_error(errc::empty_input, "empty summand");
  if (!(gamma > Rational(0) && gamma < eps))
    throw_error(errc::precondition_violated, "need 0 < gamma < eps");
  if (b.front() < Rational(0) || !(b.back() < eps))
    throw_error(errc::precondition_violated, "B must lie inside [0, eps)");
  SumsetCoverCheck out;
  out.cover_sum = cover_count(sumset(a, b, budget), gamma, CoverMode::optimal);
  out.cover_a = cover_count(a, eps, CoverMode::optimal);
  out.cover_b = cover_count(b, gamma, CoverMode::optimal);
  out.rhs = static_cast<double>(out.cover_a) * static_cast<double>(out.cover_b) / 3.0;
  out.holds = 3 * out.cover_sum >= out.cover_a * out.cover_b;
  return out;
}

namespace {

struct Fiber {
  Rational start;
  PointSet points;
};

// Splits X_m into its occupied r^m-grid cells (points are sorted, so cells
// come out in increasing order).
std::vector<Fiber> split_into_cells(const PointSet& points, const Rational& width) {
  std::vector<Fiber> cells;
  mpz_class prev;
  for (const auto& x : points) {
    mpz_class cell = x.floor_div(width);
    if (cells.empty() || cell != prev) {
      cells.push_back({Rational(cell, mpz_class(1)) * width, {}});
      prev = cell;
    }
    cells.back().points.push_back(x);
  }
  return cells;
}

}  // namespace

FiberWitness fiber_witness(const IFS& in, std::uint32_t m, std::uint64_t budget) {
  if (m == 0) throw_error(errc::invalid_param, "fiber witness needs m >= 1");
  const IFS ifs = normalized_or_degenerate(in);
  const CylinderSet cs = cylinder_points(ifs, m, budget);
  const Rational width = Rational::pow(ifs.ratio, m);
  const auto cells = split_into_cells(cs.points, width);

  FiberWitness best;
  for (const auto& cell : cells) {
    if (cell.points.size() > best.count) {
      best.count = cell.points.size();
      best.cell_start = cell.start;
    }
  }
  best.cell_width = width;
  best.overlap_present = cs.has_collision();
  best.sigma_estimate = std::log2(static_cast<double>(best.count)) /
                        (static_cast<double>(m) * -log2_of(ifs.ratio));
  return best;
}

LocalSumsetProfile local_sumset_profile(const IFS& in, std::uint32_t m,
                                        std::uint32_t k, std::uint64_t budget,
                                        int jobs) {
  const IFS ifs = normalized_or_degenerate(in);
  const std::uint32_t n = m * k;
  LocalSumsetProfile out;
  out.m = m;
  out.n = n;

  const CylinderSet coarse = cylinder_points(ifs, m, budget);
  const CylinderSet fine = cylinder_points(ifs, n, budget);
  const CylinderSet full = cylinder_points(ifs, m + n, budget);
  const Rational width = Rational::pow(ifs.ratio, m);
  const Rational scale = Rational::pow(ifs.ratio, m + n);
  const PointSet scaled_fine = scale_translate(fine.points, width, Rational(0));

  const auto cells = split_into_cells(coarse.points, width);
  const double log_inv_r = -log2_of(ifs.ratio);
  const bool overlap = coarse.has_collision();

  out.witnesses.resize(cells.size());
  parallel_for(cells.size(), jobs, [&](std::size_t i) {
    const Fiber& cell = cells[i];
    FiberWitness w;
    w.cell_start = cell.start;
    w.cell_width = width;
    w.count = cell.points.size();
    w.overlap_present = overlap;
    w.sigma_estimate =
        m == 0 ? 0.0
               : std::log2(static_cast<double>(w.count)) /
                     (static_cast<double>(m) * log_inv_r);
    const PointSet local = sumset(cell.points, scaled_fine, budget);
    w.localized_cover = cover_count(local, scale, CoverMode::grid);
    out.witnesses[i] = std::move(w);
  });

  std::sort(out.witnesses.begin(), out.witnesses.end(),
            [](const FiberWitness& a, const FiberWitness& b) {
              if (a.localized_cover != b.localized_cover)
                return a.localized_cover < b.localized_cover;
              return a.cell_start < b.cell_start;
            });

  out.cover_full = cover_count(full.points, scale, CoverMode::grid);
  out.cover_coarse = cover_count(coarse.points, width, CoverMode::grid);
  out.min_cover_bound = 3.0 * static_cast<double>(out.cover_full) /
                        static_cast<double>(out.cover_coarse);
  out.min_bound_holds =
      !out.witnesses.empty() &&
      static_cast<double>(out.witnesses.front().localized_cover) <=
          out.min_cover_bound + 1e-9;
  return out;
}

std::optional<SmallSumsetWitness> small_sumset_witness(
    const IFS& in, std::uint32_t m, std::uint32_t k, double count_threshold,
    double cover_threshold, std::uint64_t budget, int jobs) {
  const IFS ifs = normalized_or_degenerate(in);
  const LocalSumsetProfile profile = local_sumset_profile(ifs, m, k, budget, jobs);

  // Deterministic pick: the most crowded qualifying cell, leftmost on ties.
  const FiberWitness* chosen = nullptr;
  for (const auto& w : profile.witnesses) {
    if (static_cast<double>(w.count) < count_threshold) continue;
    if (static_cast<double>(w.localized_cover) > cover_threshold) continue;
    if (!chosen || w.count > chosen->count ||
        (w.count == chosen->count && w.cell_start < chosen->cell_start))
      chosen = &w;
  }
  if (!chosen) return std::nullopt;

  const std::uint32_t n = profile.n;
  const Rational width = Rational::pow(ifs.ratio, m);
  const CylinderSet coarse = cylinder_points(ifs, m, budget);
  const CylinderSet fine = cylinder_points(ifs, n, budget);

  SmallSumsetWitness out;
  out.cell = *chosen;
  PointSet inside;
  for (const auto& x : coarse.points)
    if (x >= chosen->cell_start && x < chosen->cell_start + width)
      inside.push_back(x);
  out.y = scale_translate(inside, Rational(1) / width,
                          -chosen->cell_start / width);
  const Rational scale = Rational::pow(ifs.ratio, n);
  out.cover_y = cover_count(out.y, scale, CoverMode::grid);
  out.cover_xy = cover_count(sumset(fine.points, out.y, budget), scale,
                             CoverMode::grid);
  return out;
}

SumGrowthResult sum_growth_experiment(const IFS& in, const PointSet& y,
                                      const Rational& rho, std::uint64_t budget) {
  const IFS ifs = normalized_or_degenerate(in);
  if (y.empty()) throw_error(errc::empty_input, "Y must be non-empty");
  if (!(rho > Rational(0) && rho < Rational(1)))
    throw_error(errc::precondition_violated, "rho must lie in (0,1)");

  // rho must be an exact power of the contraction ratio.
  std::uint32_t n = 0;
  Rational p(1);
  while (p > rho) {
    p *= ifs.ratio;
    ++n;
    if (n > 100000)
      throw_error(errc::precondition_violated, "rho is not a power of the ratio");
  }
  if (p != rho)
    throw_error(errc::precondition_violated, "rho is not a power of the ratio");

  const CylinderSet cs = cylinder_points(ifs, n, budget);
  SumGrowthResult out;
  out.n = n;
  out.cover_x = cover_count(cs.points, rho, CoverMode::grid);
  out.cover_y = cover_count(y, rho, CoverMode::grid);
  out.cover_xy = cover_count(sumset(cs.points, y, budget), rho, CoverMode::grid);
  out.delta_hat = std::log2(static_cast<double>(out.cover_xy)) /
                      std::log2(static_cast<double>(out.cover_x)) -
                  1.0;
  return out;
}

}  // namespace selfsim
