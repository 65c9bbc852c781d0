#pragma once

#include <span>
#include <string>
#include <vector>

namespace enga {

// Continuous piecewise-linear least-squares fit of one time series.
// The fitted function is y = b0 + b1*t + sum_j g_j * max(0, t - bp_j),
// so continuity at every breakpoint holds by construction.
struct Segment {
  double start = 0.0;  // month where the segment begins (series start or a breakpoint)
  double end = 0.0;
  double slope = 0.0;
  double intercept = 0.0;  // value of the fitted line extrapolated to t = 0
};

struct SegmentedFit {
  std::vector<double> breakpoints;  // strictly increasing, inside (first, last)
  std::vector<Segment> segments;    // breakpoints.size() + 1 entries
  double sse = 0.0;
  double bic = 0.0;
  std::size_t n_points = 0;

  double predict(double t) const;
};

struct SegmentedFitOptions {
  double grid_step = 0.25;   // months; candidate breakpoints lie on this grid
  int min_segment_points = 3;
  int multistarts = 8;       // random starts for the 3-breakpoint search
  std::uint64_t search_seed = 0x5eed5eed5eedULL;  // fixed: fits are data-independent reproducible
};

// Least-squares segmented fit with `n_breakpoints` kinks. Breakpoint
// locations come from a global grid search (exhaustive for up to two
// breakpoints, seeded multi-start coordinate descent for three or more)
// followed by local continuous refinement that never accepts a worse SSE
// than the best grid solution.
//
// Requires months strictly increasing and at least
// 2*(n_breakpoints+1) + 2 observations; candidate breakpoints leaving any
// segment with fewer than min_segment_points observations are rejected.
SegmentedFit fit_segments(std::span<const double> months, std::span<const double> values,
                          int n_breakpoints, const SegmentedFitOptions& opts = {});

// Fits 0..max_breakpoints and returns the BIC-minimizing fit, counting
// 2 + 2*n parameters (base slope/intercept plus slope change and location
// per breakpoint). Ties go to the smaller model.
SegmentedFit select_model(std::span<const double> months, std::span<const double> values,
                          int max_breakpoints = 3, const SegmentedFitOptions& opts = {});

// A band of months where breakpoints from several series cluster.
struct ChangeRegion {
  int start_month = 0;  // inclusive, rounded outward to whole months
  int end_month = 0;
  std::size_t support = 0;             // distinct contributing series
  std::vector<double> breakpoints;     // members of the cluster
};

// Single-linkage clustering of all fits' breakpoints: breakpoints at most
// window_months apart chain into one cluster; clusters supported by at
// least min_support distinct series become regions
// [floor(min), ceil(max)]. Output is independent of the order of `fits`.
std::vector<ChangeRegion> aggregate_regions(std::span<const SegmentedFit> fits,
                                            double window_months = 2.0,
                                            std::size_t min_support = 2);

}  // namespace enga
