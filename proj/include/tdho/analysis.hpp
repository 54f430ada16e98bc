#pragma once

// Small post-processing helpers for trajectories: period averages, line fits
// and the scalar series extracted from records.

#include <cstddef>
#include <span>
#include <vector>

#include "tdho/evolution.hpp"

namespace tdho {

struct Series {
    std::vector<double> t;
    std::vector<double> v;
};

[[nodiscard]] Series r_series(const Trajectory& traj);
[[nodiscard]] Series variance_series(const Trajectory& traj);

/// Trailing running mean over `period`: the value at t averages the samples in
/// (t - period, t]. Only points with a full window are returned. A non-positive
/// period returns the input unchanged.
[[nodiscard]] Series period_average(const Series& s, double period);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Least-squares line through the points with t in [t_lo, t_hi].
[[nodiscard]] LineFit fit_line(const Series& s, double t_lo, double t_hi);

/// Population standard deviation of the samples with t >= t_from.
[[nodiscard]] double tail_stddev(const Series& s, double t_from);

}  // namespace tdho
