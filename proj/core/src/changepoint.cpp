#include "enga/changepoint.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "enga/errors.hpp"
#include "enga/rng.hpp"

namespace enga {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Least-squares solve in the hinge basis {1, t, max(0, t - b_j)}.
double hinge_sse(std::span<const double> t, std::span<const double> y,
                 std::span<const double> bps, Eigen::VectorXd* beta_out = nullptr) {
  const auto n = static_cast<Eigen::Index>(t.size());
  const auto k = static_cast<Eigen::Index>(bps.size()) + 2;
  Eigen::MatrixXd x(n, k);
  Eigen::VectorXd y_vec(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double ti = t[static_cast<std::size_t>(i)];
    x(i, 0) = 1.0;
    x(i, 1) = ti;
    for (std::size_t j = 0; j < bps.size(); ++j) {
      x(i, static_cast<Eigen::Index>(j) + 2) = std::max(0.0, ti - bps[j]);
    }
    y_vec(i) = y[static_cast<std::size_t>(i)];
  }
  const Eigen::VectorXd beta = x.colPivHouseholderQr().solve(y_vec);
  if (beta_out) *beta_out = beta;
  return (y_vec - x * beta).squaredNorm();
}

// Every segment delimited by `bps` must contain at least min_points
// observations; breakpoints must be strictly increasing and strictly
// inside the observed span.
bool placement_ok(std::span<const double> t, std::span<const double> bps, int min_points) {
  double prev = -kInf;
  for (const double b : bps) {
    if (!(b > prev)) return false;
    prev = b;
  }
  if (!bps.empty() && (!(bps.front() > t.front()) || !(bps.back() < t.back()))) return false;

  std::size_t i = 0;
  for (const double b : bps) {
    std::size_t in_segment = 0;
    while (i < t.size() && t[i] < b) {
      ++in_segment;
      ++i;
    }
    if (in_segment < static_cast<std::size_t>(min_points)) return false;
  }
  return t.size() - i >= static_cast<std::size_t>(min_points);
}

std::vector<double> grid_candidates(std::span<const double> t, double step, int min_points) {
  std::vector<double> grid;
  for (double b = t.front() + step; b < t.back(); b += step) {
    const double one[] = {b};
    if (placement_ok(t, one, min_points)) grid.push_back(b);
  }
  return grid;
}

struct Candidate {
  std::vector<double> bps;
  double sse = kInf;
};

// One pass of coordinate descent: each breakpoint in turn scans the whole
// grid with the others held fixed. Returns true if anything improved.
bool descend(std::span<const double> t, std::span<const double> y,
             std::span<const double> grid, int min_points, Candidate& cand) {
  bool improved = false;
  for (std::size_t j = 0; j < cand.bps.size(); ++j) {
    double best_b = cand.bps[j];
    double best_sse = cand.sse;
    std::vector<double> trial = cand.bps;
    for (const double g : grid) {
      trial[j] = g;
      std::vector<double> sorted = trial;
      std::sort(sorted.begin(), sorted.end());
      if (!placement_ok(t, sorted, min_points)) continue;
      const double sse = hinge_sse(t, y, sorted);
      if (sse < best_sse - 1e-15 * (1.0 + best_sse)) {
        best_sse = sse;
        best_b = g;
      }
    }
    if (best_b != cand.bps[j]) {
      cand.bps[j] = best_b;
      std::sort(cand.bps.begin(), cand.bps.end());
      cand.sse = best_sse;
      improved = true;
    }
  }
  return improved;
}

// Continuous per-coordinate refinement around the grid solution. Keeps
// the best SSE seen anywhere, so the result can only improve on the grid.
void refine(std::span<const double> t, std::span<const double> y, double step, int min_points,
            Candidate& cand) {
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t j = 0; j < cand.bps.size(); ++j) {
      double lo = cand.bps[j] - step;
      double hi = cand.bps[j] + step;
      auto eval = [&](double b) {
        std::vector<double> trial = cand.bps;
        trial[j] = b;
        std::sort(trial.begin(), trial.end());
        if (!placement_ok(t, trial, min_points)) return kInf;
        return hinge_sse(t, y, trial);
      };
      double best_b = cand.bps[j];
      double best_sse = cand.sse;
      for (int iter = 0; iter < 40 && hi - lo > 1e-10; ++iter) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        const double s1 = eval(m1);
        const double s2 = eval(m2);
        if (s1 < best_sse) {
          best_sse = s1;
          best_b = m1;
        }
        if (s2 < best_sse) {
          best_sse = s2;
          best_b = m2;
        }
        if (s1 <= s2) {
          hi = m2;
        } else {
          lo = m1;
        }
      }
      if (best_sse < cand.sse) {
        cand.bps[j] = best_b;
        std::sort(cand.bps.begin(), cand.bps.end());
        cand.sse = best_sse;
      }
    }
  }
}

// All index combinations for the exhaustive searches.
template <typename Fn>
void for_each_pair(std::size_t n, Fn&& fn) {
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) fn(i, j);
  }
}

double bic_floor(std::span<const double> y) {
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
  double tss = 0.0;
  for (const double v : y) tss += (v - mean) * (v - mean);
  return 1e-12 * tss + 1e-300;
}

SegmentedFit build_fit(std::span<const double> t, std::span<const double> y,
                       const Candidate& cand) {
  Eigen::VectorXd beta;
  const double sse = hinge_sse(t, y, cand.bps, &beta);

  SegmentedFit fit;
  fit.breakpoints = cand.bps;
  fit.sse = sse;
  fit.n_points = t.size();

  const auto n = static_cast<double>(t.size());
  const double p = 2.0 + 2.0 * static_cast<double>(cand.bps.size());
  fit.bic = n * std::log(std::max(sse, bic_floor(y)) / n) + p * std::log(n);

  double slope = beta(1);
  double intercept = beta(0);
  double start = t.front();
  for (std::size_t j = 0; j <= cand.bps.size(); ++j) {
    const double end = j < cand.bps.size() ? cand.bps[j] : t.back();
    fit.segments.push_back(Segment{start, end, slope, intercept});
    if (j < cand.bps.size()) {
      const double g = beta(static_cast<Eigen::Index>(j) + 2);
      slope += g;
      intercept -= g * cand.bps[j];
      start = end;
    }
  }
  return fit;
}

}  // namespace

double SegmentedFit::predict(double t) const {
  std::size_t seg = 0;
  while (seg < breakpoints.size() && t >= breakpoints[seg]) ++seg;
  return segments[seg].intercept + segments[seg].slope * t;
}

SegmentedFit fit_segments(std::span<const double> months, std::span<const double> values,
                          int n_breakpoints, const SegmentedFitOptions& opts) {
  if (n_breakpoints < 0) throw ConfigError("n_breakpoints must be non-negative");
  if (months.size() != values.size()) throw ConfigError("months/values size mismatch");
  const std::size_t required = 2 * static_cast<std::size_t>(n_breakpoints + 1) + 2;
  if (months.size() < required) {
    throw ConfigError("series too short: " + std::to_string(months.size()) + " points, need " +
                      std::to_string(required) + " for " + std::to_string(n_breakpoints) +
                      " breakpoints");
  }
  for (std::size_t i = 1; i < months.size(); ++i) {
    if (!(months[i] > months[i - 1])) throw ConfigError("months must be strictly increasing");
  }

  if (n_breakpoints == 0) {
    return build_fit(months, values, Candidate{{}, 0.0});
  }

  const auto grid = grid_candidates(months, opts.grid_step, opts.min_segment_points);
  Candidate best;

  if (n_breakpoints == 1) {
    for (const double b : grid) {
      const double one[] = {b};
      const double sse = hinge_sse(months, values, one);
      if (sse < best.sse) best = Candidate{{b}, sse};
    }
  } else if (n_breakpoints == 2) {
    for_each_pair(grid.size(), [&](std::size_t i, std::size_t j) {
      const double pair[] = {grid[i], grid[j]};
      if (!placement_ok(months, pair, opts.min_segment_points)) return;
      const double sse = hinge_sse(months, values, pair);
      if (sse < best.sse) best = Candidate{{grid[i], grid[j]}, sse};
    });
  } else {
    // Seed with the best lower-order solution extended by one scanned
    // breakpoint (this also keeps SSE monotone in the model order), plus
    // random restarts.
    std::vector<Candidate> starts;
    SegmentedFitOptions lower = opts;
    const SegmentedFit prev = fit_segments(months, values, n_breakpoints - 1, lower);
    {
      Candidate seeded;
      seeded.bps = prev.breakpoints;
      seeded.bps.push_back(0.0);
      Candidate chosen;
      for (const double g : grid) {
        seeded.bps.back() = g;
        std::vector<double> sorted = seeded.bps;
        std::sort(sorted.begin(), sorted.end());
        if (!placement_ok(months, sorted, opts.min_segment_points)) continue;
        const double sse = hinge_sse(months, values, sorted);
        if (sse < chosen.sse) chosen = Candidate{sorted, sse};
      }
      if (chosen.sse < kInf) starts.push_back(std::move(chosen));
    }

    Rng rng(derive_seed(opts.search_seed, static_cast<std::uint64_t>(n_breakpoints)));
    int found = 0;
    for (int attempt = 0; attempt < 200 * opts.multistarts && found < opts.multistarts;
         ++attempt) {
      std::vector<double> bps;
      for (int j = 0; j < n_breakpoints; ++j) {
        bps.push_back(grid[rng.next_int(0, grid.size() - 1)]);
      }
      std::sort(bps.begin(), bps.end());
      if (!placement_ok(months, bps, opts.min_segment_points)) continue;
      starts.push_back(Candidate{bps, hinge_sse(months, values, bps)});
      ++found;
    }
    if (starts.empty()) {
      throw ConfigError("no valid breakpoint placement for " + std::to_string(n_breakpoints) +
                        " breakpoints");
    }
    for (auto& cand : starts) {
      while (descend(months, values, grid, opts.min_segment_points, cand)) {
      }
      if (cand.sse < best.sse) best = cand;
    }
  }

  if (best.sse == kInf) {
    throw ConfigError("no valid breakpoint placement for " + std::to_string(n_breakpoints) +
                      " breakpoints");
  }
  refine(months, values, opts.grid_step, opts.min_segment_points, best);
  return build_fit(months, values, best);
}

SegmentedFit select_model(std::span<const double> months, std::span<const double> values,
                          int max_breakpoints, const SegmentedFitOptions& opts) {
  if (max_breakpoints < 0) throw ConfigError("max_breakpoints must be non-negative");
  std::optional<SegmentedFit> best;
  for (int n = 0; n <= max_breakpoints; ++n) {
    SegmentedFit fit = fit_segments(months, values, n, opts);
    if (!best || fit.bic < best->bic) best = std::move(fit);
  }
  return *best;
}

std::vector<ChangeRegion> aggregate_regions(std::span<const SegmentedFit> fits,
                                            double window_months, std::size_t min_support) {
  struct Member {
    double bp;
    std::size_t series;
  };
  std::vector<Member> members;
  for (std::size_t s = 0; s < fits.size(); ++s) {
    for (const double b : fits[s].breakpoints) members.push_back(Member{b, s});
  }
  std::sort(members.begin(), members.end(),
            [](const Member& a, const Member& b) { return a.bp < b.bp; });

  std::vector<ChangeRegion> regions;
  std::size_t start = 0;
  while (start < members.size()) {
    std::size_t end = start + 1;
    while (end < members.size() && members[end].bp - members[end - 1].bp <= window_months) ++end;

    std::vector<std::size_t> series;
    ChangeRegion region;
    for (std::size_t i = start; i < end; ++i) {
      region.breakpoints.push_back(members[i].bp);
      series.push_back(members[i].series);
    }
    std::sort(series.begin(), series.end());
    region.support =
        static_cast<std::size_t>(std::unique(series.begin(), series.end()) - series.begin());
    if (region.support >= min_support) {
      region.start_month = static_cast<int>(std::floor(region.breakpoints.front()));
      region.end_month = static_cast<int>(std::ceil(region.breakpoints.back()));
      regions.push_back(std::move(region));
    }
    start = end;
  }
  return regions;
}

}  // namespace enga
