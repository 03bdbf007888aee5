#include "selfsim/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "selfsim/parallel.hpp"

namespace selfsim {

DiscreteMeasure DiscreteMeasure::make(std::vector<Rational> positions,
                                      std::vector<Rational> weights) {
  if (positions.size() != weights.size())
    throw_error(errc::invalid_param, "positions and weights must align");
  if (positions.empty())
    throw_error(errc::empty_input, "a measure needs at least one atom");
  std::vector<std::size_t> order(positions.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return positions[a] < positions[b];
  });
  DiscreteMeasure mu;
  Rational total(0);
  for (const auto i : order) {
    if (weights[i].sign() <= 0)
      throw_error(errc::invalid_param, "atom weights must be positive");
    total += weights[i];
    if (!mu.positions.empty() && mu.positions.back() == positions[i]) {
      mu.weights.back() += weights[i];
    } else {
      mu.positions.push_back(std::move(positions[i]));
      mu.weights.push_back(weights[i]);
    }
  }
  if (std::fabs((total - Rational(1)).to_double()) > 1e-12)
    throw_error(errc::validation_error, "atom weights must sum to 1");
  return mu;
}

DiscreteMeasure DiscreteMeasure::dirac(const Rational& x) {
  DiscreteMeasure mu;
  mu.positions = {x};
  mu.weights = {Rational(1)};
  return mu;
}

DiscreteMeasure convolve(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                         std::uint64_t budget) {
  const std::uint64_t pairs =
      static_cast<std::uint64_t>(mu.size()) * nu.size();
  if (pairs > budget)
    throw budget_error(std::to_string(pairs), budget,
                       "convolution of " + std::to_string(mu.size()) + " x " +
                           std::to_string(nu.size()) + " atoms exceeds budget");
  std::vector<std::pair<Rational, Rational>> atoms;
  atoms.reserve(pairs);
  for (std::size_t i = 0; i < mu.size(); ++i)
    for (std::size_t j = 0; j < nu.size(); ++j)
      atoms.emplace_back(mu.positions[i] + nu.positions[j],
                         mu.weights[i] * nu.weights[j]);
  std::sort(atoms.begin(), atoms.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  DiscreteMeasure out;
  for (auto& [x, w] : atoms) {
    if (!out.positions.empty() && out.positions.back() == x) {
      out.weights.back() += w;
    } else {
      out.positions.push_back(std::move(x));
      out.weights.push_back(std::move(w));
    }
  }
  return out;
}

DiscreteMeasure affine_push(const DiscreteMeasure& mu, const Rational& t,
                            const Rational& c) {
  if (t.is_zero()) throw_error(errc::zero_scale, "pushforward by zero scale");
  DiscreteMeasure out;
  out.positions.reserve(mu.size());
  out.weights.reserve(mu.size());
  if (t.sign() > 0) {
    for (std::size_t i = 0; i < mu.size(); ++i) {
      out.positions.push_back(t * mu.positions[i] + c);
      out.weights.push_back(mu.weights[i]);
    }
  } else {
    for (std::size_t i = mu.size(); i-- > 0;) {
      out.positions.push_back(t * mu.positions[i] + c);
      out.weights.push_back(mu.weights[i]);
    }
  }
  return out;
}

namespace {

// Exact cell masses of mu on the eps-grid, in increasing cell order.
std::vector<std::pair<mpz_class, Rational>> cell_masses(
    const DiscreteMeasure& mu, const Rational& eps) {
  std::vector<std::pair<mpz_class, Rational>> cells;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    mpz_class cell = mu.positions[i].floor_div(eps);
    if (!cells.empty() && cells.back().first == cell)
      cells.back().second += mu.weights[i];
    else
      cells.emplace_back(std::move(cell), mu.weights[i]);
  }
  return cells;
}

double entropy_bits_of_cells(
    const std::vector<std::pair<mpz_class, Rational>>& cells) {
  double h = 0.0;
  for (const auto& [cell, mass] : cells) {
    const double p = mass.to_double();
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h < 0.0 ? 0.0 : h;
}

}  // namespace

GridEntropy grid_entropy(const DiscreteMeasure& mu, const GridSpec& grid) {
  if (grid.epsilon.sign() <= 0)
    throw_error(errc::invalid_param, "grid cell width must be positive");
  const auto cells = cell_masses(mu, grid.epsilon);
  GridEntropy out;
  out.occupied_cells = cells.size();
  out.bits = entropy_bits_of_cells(cells);
  const double log_inv = -log2_of(grid.epsilon);
  out.normalized = out.bits == 0.0 ? 0.0 : out.bits / log_inv;
  return out;
}

DiscreteMeasure mu_n(const IFS& ifs, std::uint32_t n, std::uint64_t budget) {
  const CylinderSet cs = cylinder_points(ifs, n, budget);
  mpz_class words;
  mpz_ui_pow_ui(words.get_mpz_t(), ifs.alphabet_size(), n);
  DiscreteMeasure mu;
  mu.positions = cs.points;
  mu.weights.reserve(cs.points.size());
  for (const auto m : cs.multiplicities)
    mu.weights.push_back(Rational(mpz_class(m), words));
  return mu;
}

bool convolution_identity_check(const IFS& ifs, std::uint32_t m, std::uint32_t n,
                                std::uint64_t budget) {
  const DiscreteMeasure lhs = mu_n(ifs, m + n, budget);
  const DiscreteMeasure mm = mu_n(ifs, m, budget);
  const DiscreteMeasure nn = mu_n(ifs, n, budget);
  const DiscreteMeasure rhs = convolve(
      mm, affine_push(nn, Rational::pow(ifs.ratio, m), Rational(0)), budget);
  return lhs == rhs;
}

DiscreteMeasure conditional_measure(const DiscreteMeasure& mu,
                                    const Rational& start, const Rational& width) {
  if (width.sign() <= 0)
    throw_error(errc::invalid_param, "interval width must be positive");
  const Rational end = start + width;
  DiscreteMeasure out;
  Rational total(0);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (mu.positions[i] >= start && mu.positions[i] < end) {
      out.positions.push_back(mu.positions[i]);
      out.weights.push_back(mu.weights[i]);
      total += mu.weights[i];
    }
  }
  if (out.positions.empty() || total.sign() <= 0)
    throw_error(errc::zero_mass_interval, "interval carries no mass");
  for (auto& w : out.weights) w /= total;
  return out;
}

EntropyReport entropy_dimension_report(const IFS& in, std::uint32_t n_max,
                                       std::uint64_t budget) {
  const IFS ifs = normalized_or_degenerate(in);
  EntropyReport report;
  const double log_inv_r = -log2_of(ifs.ratio);

  std::vector<double> s;
  Rational scale(1);
  for (std::uint32_t n = 1; n <= n_max; ++n) {
    scale *= ifs.ratio;
    const GridEntropy ge = grid_entropy(mu_n(ifs, n, budget), GridSpec{scale});
    EntropyEntry e;
    e.n = n;
    e.bits = ge.bits;
    e.normalized = ge.bits / (static_cast<double>(n) * log_inv_r);
    report.entries.push_back(e);
    s.push_back(ge.bits);
  }
  if (n_max > 0) report.alpha_hat = report.entries.back().normalized;

  const double allowance = std::log2(3.0) + 1e-9;
  for (std::size_t m = 1; m <= s.size(); ++m)
    for (std::size_t n = m; m + n <= s.size(); ++n) {
      const double slack = s[m + n - 1] - s[m - 1] - s[n - 1];
      if (slack < -allowance)
        report.superadditivity_violations.push_back(
            {static_cast<std::uint32_t>(m), static_cast<std::uint32_t>(n), slack});
    }

  report.covering_alpha_hat = dimension_report(ifs, n_max, budget).bdim_estimate;
  report.entropy_le_covering =
      report.alpha_hat <= report.covering_alpha_hat + 0.02;
  return report;
}

namespace {

struct MeasureFiber {
  Rational start;
  DiscreteMeasure conditional;  // renormalized restriction to the cell
  double mass = 0.0;
};

std::vector<MeasureFiber> split_measure_cells(const DiscreteMeasure& mu,
                                              const Rational& width) {
  std::vector<MeasureFiber> fibers;
  std::vector<Rational> totals;
  mpz_class prev;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    mpz_class cell = mu.positions[i].floor_div(width);
    if (fibers.empty() || cell != prev) {
      fibers.push_back({Rational(cell, mpz_class(1)) * width, {}, 0.0});
      totals.push_back(Rational(0));
      prev = cell;
    }
    fibers.back().conditional.positions.push_back(mu.positions[i]);
    fibers.back().conditional.weights.push_back(mu.weights[i]);
    totals.back() += mu.weights[i];
  }
  for (std::size_t f = 0; f < fibers.size(); ++f) {
    fibers[f].mass = totals[f].to_double();
    for (auto& w : fibers[f].conditional.weights) w /= totals[f];
  }
  return fibers;
}

}  // namespace

FiberEntropyProfile fiber_entropy_profile(const IFS& in, std::uint32_t m,
                                          std::uint32_t k, double c, double delta,
                                          std::uint64_t budget, int jobs) {
  const IFS ifs = normalized_or_degenerate(in);
  const std::uint32_t n = m * k;
  FiberEntropyProfile out;
  out.m = m;
  out.n = n;

  const DiscreteMeasure coarse = mu_n(ifs, m, budget);
  const DiscreteMeasure fine =
      affine_push(mu_n(ifs, n, budget), Rational::pow(ifs.ratio, m), Rational(0));
  const Rational width = Rational::pow(ifs.ratio, m);
  const Rational scale = Rational::pow(ifs.ratio, m + n);
  const double log_inv_r = -log2_of(ifs.ratio);

  out.alpha_hat =
      grid_entropy(mu_n(ifs, m + n, budget), GridSpec{scale}).normalized;

  auto fibers = split_measure_cells(coarse, width);
  out.cells.resize(fibers.size());
  parallel_for(fibers.size(), jobs, [&](std::size_t i) {
    FiberEntropyCell cell;
    cell.cell_start = fibers[i].start;
    cell.mass = fibers[i].mass;
    cell.fiber_entropy_bits =
        grid_entropy(fibers[i].conditional, GridSpec{scale}).bits;
    const DiscreteMeasure conv = convolve(fibers[i].conditional, fine, budget);
    cell.conv_entropy_normalized =
        n == 0 ? 0.0
               : grid_entropy(conv, GridSpec{scale}).bits /
                     (static_cast<double>(n) * log_inv_r);
    out.cells[i] = std::move(cell);
  });

  const double fiber_threshold = c * static_cast<double>(m) * log_inv_r;
  for (const auto& cell : out.cells) {
    if (cell.fiber_entropy_bits > fiber_threshold)
      out.mass_high_fiber_entropy += cell.mass;
    if (cell.conv_entropy_normalized <= out.alpha_hat + delta)
      out.mass_small_conv_entropy += cell.mass;
  }
  return out;
}

std::optional<SmallConvolutionWitness> small_convolution_witness(
    const IFS& in, std::uint32_t m, std::uint32_t k, double tau, double delta,
    std::uint64_t budget, int jobs) {
  (void)k;  // the fiber search runs at scale r^m; k is kept for symmetry
  const IFS ifs = normalized_or_degenerate(in);
  if (m == 0) throw_error(errc::invalid_param, "needs m >= 1");
  const DiscreteMeasure coarse = mu_n(ifs, m, budget);
  const Rational width = Rational::pow(ifs.ratio, m);
  const double log_inv_r = -log2_of(ifs.ratio);
  const double mu_norm =
      grid_entropy(coarse, GridSpec{width}).normalized;

  auto fibers = split_measure_cells(coarse, width);
  struct Candidate {
    bool ok = false;
    SmallConvolutionWitness w;
  };
  std::vector<Candidate> cands(fibers.size());
  parallel_for(fibers.size(), jobs, [&](std::size_t i) {
    // nu = fiber conditional, rescaled back to [0,1).
    DiscreteMeasure nu = affine_push(fibers[i].conditional, Rational(1) / width,
                                     -fibers[i].start / width);
    const double nu_norm = grid_entropy(nu, GridSpec{width}).normalized;
    const double nu_scaled = nu_norm / static_cast<double>(m);
    const bool tau_ok = tau > 0.0 ? nu_scaled > tau : nu_scaled >= tau;
    if (!tau_ok) return;
    const DiscreteMeasure conv = convolve(coarse, nu, budget);
    const double conv_scaled =
        grid_entropy(conv, GridSpec{width}).normalized / static_cast<double>(m);
    const double mu_scaled = mu_norm / static_cast<double>(m);
    if (conv_scaled < mu_scaled + delta) {
      Candidate cand;
      cand.ok = true;
      cand.w.nu = std::move(nu);
      cand.w.cell_start = fibers[i].start;
      cand.w.nu_entropy_scaled = nu_scaled;
      cand.w.conv_entropy_scaled = conv_scaled;
      cand.w.mu_entropy_scaled = mu_scaled;
      cands[i] = std::move(cand);
    }
  });

  // Deterministic pick: largest fiber entropy, leftmost on ties.
  const Candidate* best = nullptr;
  for (const auto& cand : cands) {
    if (!cand.ok) continue;
    if (!best || cand.w.nu_entropy_scaled > best->w.nu_entropy_scaled)
      best = &cand;
  }
  if (!best) return std::nullopt;
  return best->w;
}

EntropyUniformityResult entropy_uniformity_mass(const IFS& in, std::uint32_t n,
                                                int m, double eps,
                                                std::uint64_t budget) {
  const IFS ifs = normalized_or_degenerate(in);
  const DiscreteMeasure mu = mu_n(ifs, n, budget);
  const Rational scale = Rational::pow(ifs.ratio, n);

  // height = ceil(n log2(1/r)), computed exactly: least h with 2^h >= (1/r)^n.
  int h = 0;
  {
    const mpz_class num = scale.denominator();  // (1/r)^n = den/num of r^n
    const mpz_class den = scale.numerator();
    mpz_class pw(1);
    while (pw * den < num) {
      pw <<= 1;
      ++h;
    }
  }
  if (h < 1) h = 1;
  if (m < 1 || m > h)
    throw_error(errc::depth_exceeded, "window must satisfy 1 <= m <= height");

  EntropyUniformityResult out;
  out.height = h;
  out.alpha_hat = grid_entropy(mu, GridSpec{scale}).normalized;
  const double threshold = (1.0 - 2.0 * eps) * out.alpha_hat;

  const TreeMeasure theta = lift_measure(mu, h);
  double mass = 0.0;
  for (int level = 0; level + m <= h; ++level) {
    const int shift = h - level;
    const int dshift = shift - m;
    std::size_t i = 0;
    while (i < theta.codes.size()) {
      const std::uint64_t sigma = theta.codes[i] >> shift;
      std::size_t e = i;
      double w_sigma = 0.0, bits = 0.0;
      while (e < theta.codes.size() && (theta.codes[e] >> shift) == sigma) ++e;
      {
        std::size_t j = i;
        std::vector<double> parts;
        while (j < e) {
          const std::uint64_t d = theta.codes[j] >> dshift;
          double wd = 0.0;
          while (j < e && (theta.codes[j] >> dshift) == d) wd += theta.weights[j++];
          parts.push_back(wd);
          w_sigma += wd;
        }
        for (const auto wd : parts) {
          const double p = wd / w_sigma;
          if (p > 0.0 && parts.size() > 1) bits -= p * std::log2(p);
        }
      }
      if (bits / m > threshold) mass += w_sigma;
      i = e;
    }
  }
  out.mass = mass / (h - m + 1);
  return out;
}

double entropy_doubling(const DiscreteMeasure& mu, const GridSpec& grid,
                        std::uint64_t budget) {
  const GridEntropy single = grid_entropy(mu, grid);
  const GridEntropy twice = grid_entropy(convolve(mu, mu, budget), grid);
  return twice.normalized - single.normalized;
}

TreeMeasure lift_measure(const DiscreteMeasure& mu, int height) {
  std::vector<double> w;
  w.reserve(mu.size());
  for (const auto& x : mu.weights) w.push_back(x.to_double());
  return lift_weighted_points(mu.positions, w, height);
}

}  // namespace selfsim
