#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "drs/common.hpp"

namespace drs {

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rms_residual = 0.0;
};

inline LinearFit ols_fit(std::span<const double> x, std::span<const double> y) {
    require(x.size() == y.size() && x.size() >= 2, "ols_fit: need >= 2 matched points");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) { sx += x[i]; sy += y[i]; }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    require(sxx > 0.0, "ols_fit: degenerate abscissae");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double r2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) r2 += sq(y[i] - f.slope * x[i] - f.intercept);
    f.rms_residual = std::sqrt(r2 / n);
    return f;
}

// Fit y = C x^s in log-log coordinates; all data must be positive.
inline LinearFit loglog_fit(std::span<const double> x, std::span<const double> y) {
    std::vector<double> lx, ly;
    lx.reserve(x.size());
    ly.reserve(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        require(x[i] > 0.0 && y[i] > 0.0, "loglog_fit: data must be positive");
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    return ols_fit(lx, ly);
}

struct EnvelopePoint {
    double x = 0.0, y = 0.0;
};

// Per-octave maxima of (x, y): one representative point per dyadic band in x,
// placed at the abscissa where the band attains its maximum. Oscillatory data
// gets reduced to its upper envelope before any decay-rate fit.
inline std::vector<EnvelopePoint> octave_envelope(std::span<const double> x,
                                                  std::span<const double> y) {
    require(x.size() == y.size() && !x.empty(), "octave_envelope: need matched data");
    double x0 = x[0];
    for (double v : x) {
        require(v > 0.0, "octave_envelope: abscissae must be positive");
        x0 = std::min(x0, v);
    }
    std::vector<EnvelopePoint> out;
    double lo = x0;
    while (true) {
        const double hi = 2.0 * lo;
        EnvelopePoint best{0.0, -1.0};
        bool any = false;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (x[i] >= lo && (x[i] < hi || (hi > x[x.size() - 1] && x[i] <= hi))) {
                if (!any || y[i] > best.y) best = EnvelopePoint{x[i], y[i]};
                any = true;
            }
        }
        if (any) out.push_back(best);
        bool remaining = false;
        for (double v : x) remaining |= (v >= hi);
        if (!remaining) break;
        lo = hi;
    }
    return out;
}

// Decay slope of the upper envelope in log-log coordinates.
inline LinearFit envelope_loglog_fit(std::span<const double> x, std::span<const double> y) {
    auto env = octave_envelope(x, y);
    require(env.size() >= 2, "envelope_loglog_fit: need >= 2 octaves");
    std::vector<double> ex, ey;
    for (const auto& p : env) {
        ex.push_back(p.x);
        ey.push_back(p.y);
    }
    return loglog_fit(ex, ey);
}

struct GrowthFit {
    double exponent = 0.0;
    double rms_residual = 0.0;
};

// Fit norm(t) = C (1+t)^gamma over the sampled times.
inline GrowthFit growth_exponent_fit(std::span<const double> ts, std::span<const double> norms) {
    std::vector<double> x;
    x.reserve(ts.size());
    for (double t : ts) {
        require(t >= 0.0, "growth_exponent_fit: times must be >= 0");
        x.push_back(1.0 + t);
    }
    LinearFit f = loglog_fit(x, norms);
    return GrowthFit{f.slope, f.rms_residual};
}

}  // namespace drs
