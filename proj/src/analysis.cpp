#include "tdho/analysis.hpp"

#include <cmath>

namespace tdho {

Series r_series(const Trajectory& traj) {
    Series s;
    s.t.reserve(traj.records.size());
    s.v.reserve(traj.records.size());
    for (const auto& rec : traj.records) {
        s.t.push_back(rec.t);
        s.v.push_back(rec.r);
    }
    return s;
}

Series variance_series(const Trajectory& traj) {
    Series s;
    for (const auto& rec : traj.records) {
        s.t.push_back(rec.t);
        s.v.push_back(rec.variance);
    }
    return s;
}

Series period_average(const Series& s, double period) {
    if (!(period > 0.0) || s.t.size() < 2) return s;
    Series out;
    double sum = 0.0;
    std::size_t lo = 0;
    const double t_start = s.t.front();
    for (std::size_t i = 0; i < s.t.size(); ++i) {
        sum += s.v[i];
        // 1e-9 relative slack so that grid points exactly one period apart count as outside.
        while (s.t[lo] <= s.t[i] - period * (1.0 - 1e-9)) sum -= s.v[lo++];
        if (s.t[i] - t_start >= period * (1.0 - 1e-9)) {
            out.t.push_back(s.t[i]);
            out.v.push_back(sum / static_cast<double>(i - lo + 1));
        }
    }
    return out;
}

LineFit fit_line(const Series& s, double t_lo, double t_hi) {
    double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < s.t.size(); ++i) {
        if (s.t[i] < t_lo || s.t[i] > t_hi) continue;
        n += 1;
        sx += s.t[i];
        sy += s.v[i];
        sxx += s.t[i] * s.t[i];
        sxy += s.t[i] * s.v[i];
    }
    LineFit fit;
    if (n < 2) return fit;
    const double denom = n * sxx - sx * sx;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;

    const double mean = sy / n;
    double ss_res = 0, ss_tot = 0;
    for (std::size_t i = 0; i < s.t.size(); ++i) {
        if (s.t[i] < t_lo || s.t[i] > t_hi) continue;
        const double pred = fit.intercept + fit.slope * s.t[i];
        ss_res += (s.v[i] - pred) * (s.v[i] - pred);
        ss_tot += (s.v[i] - mean) * (s.v[i] - mean);
    }
    fit.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

double tail_stddev(const Series& s, double t_from) {
    double n = 0, sum = 0;
    for (std::size_t i = 0; i < s.t.size(); ++i) {
        if (s.t[i] >= t_from) {
            n += 1;
            sum += s.v[i];
        }
    }
    if (n == 0) return 0.0;
    const double mean = sum / n;
    double acc = 0;
    for (std::size_t i = 0; i < s.t.size(); ++i) {
        if (s.t[i] >= t_from) acc += (s.v[i] - mean) * (s.v[i] - mean);
    }
    return std::sqrt(acc / n);
}

}  // namespace tdho
