#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "drs/common.hpp"
#include "drs/htype.hpp"
#include "drs/rng.hpp"

namespace drs {

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::uint64_t samples = 0;
};

struct WeightedDirection {
    SphereDirection dir;
    double weight = 1.0;  // likelihood ratio against the uniform sphere average
};

// Sphere sampler graded toward the poles b = +-1. Integrands built from the
// a-component of the polar map concentrate all their mass in a band
// 1 -+ b ~ e^{-R} near a pole, where plain uniform sampling has essentially
// zero hit probability. The mixture
//   1/2 uniform + 1/4 log-uniform in (1-b) + 1/4 log-uniform in (1+b)
// keeps the estimator unbiased via importance weights while covering every
// scale between u_min and O(1).
class PoleGradedSphereSampler {
  public:
    PoleGradedSphereSampler(int m_v, int m_z, double R)
        : m_v_(m_v), m_z_(m_z) {
        const int n = m_v + m_z + 1;
        const double th = std::tanh(0.5 * R);
        u_min_ = std::max(1e-14, (1.0 - th) / 100.0);
        log_span_ = std::log(2.0 / u_min_);
        // normalizer of the uniform marginal (1-b^2)^{(n-3)/2} on [-1,1]
        marginal_norm_ = std::sqrt(std::numbers::pi) * std::tgamma(0.5 * (n - 1)) /
                         std::tgamma(0.5 * n);
        half_exp_ = 0.5 * (n - 3);
    }

    WeightedDirection draw(Rng& rng) const {
        const double pick = rng.uniform();
        SphereDirection w;
        w.v_part.resize(static_cast<std::size_t>(m_v_));
        w.z_part.resize(static_cast<std::size_t>(m_z_));
        double one_minus_b2;  // computed cancellation-free in every branch
        if (pick < 0.5) {
            // uniform: normalize an (n)-dim gaussian
            double g2 = 0.0;
            for (auto& c : w.v_part) { c = rng.normal(); g2 += c * c; }
            for (auto& c : w.z_part) { c = rng.normal(); g2 += c * c; }
            const double tangent2 = g2;
            double gb = rng.normal();
            g2 += gb * gb;
            const double inv = 1.0 / std::sqrt(g2);
            for (auto& c : w.v_part) c *= inv;
            for (auto& c : w.z_part) c *= inv;
            w.b = gb * inv;
            one_minus_b2 = tangent2 / g2;
        } else {
            const double u = u_min_ * std::exp(rng.uniform() * log_span_);
            w.b = pick < 0.75 ? 1.0 - u : u - 1.0;
            one_minus_b2 = u * (2.0 - u);
            double g2 = 0.0;
            for (auto& c : w.v_part) { c = rng.normal(); g2 += c * c; }
            for (auto& c : w.z_part) { c = rng.normal(); g2 += c * c; }
            const double scale = std::sqrt(one_minus_b2 / g2);
            for (auto& c : w.v_part) c *= scale;
            for (auto& c : w.z_part) c *= scale;
        }
        const double p = std::pow(one_minus_b2, half_exp_) / marginal_norm_;
        double q = 0.5 * p;
        const double up = 1.0 - w.b;
        const double um = 1.0 + w.b;
        if (up >= u_min_ && up <= 2.0) q += 0.25 / (up * log_span_);
        if (um >= u_min_ && um <= 2.0) q += 0.25 / (um * log_span_);
        return WeightedDirection{std::move(w), p / q};
    }

  private:
    int m_v_, m_z_;
    double u_min_, log_span_, marginal_norm_, half_exp_;
};

// Estimates the sphere average (1/nu_n) \int f(w) dw. Samples are drawn in
// fixed-size chunks with per-chunk RNG streams, so the result is independent
// of thread scheduling for a given seed and sample count.
template <class F>
McEstimate mc_sphere_average(int m_v, int m_z, double R, std::uint64_t samples,
                             std::uint64_t seed, F&& f) {
    require(samples > 0, "mc_sphere_average: need at least one sample");
    const PoleGradedSphereSampler sampler(m_v, m_z, R);
    constexpr std::uint64_t chunk = 1 << 16;
    const std::size_t n_chunks = static_cast<std::size_t>((samples + chunk - 1) / chunk);
    std::vector<double> sums(n_chunks, 0.0), sums2(n_chunks, 0.0);
    parallel_for(n_chunks, [&](std::size_t c) {
        Rng rng(seed, c);
        const std::uint64_t lo = static_cast<std::uint64_t>(c) * chunk;
        const std::uint64_t hi = std::min<std::uint64_t>(lo + chunk, samples);
        double s = 0.0, s2 = 0.0;
        for (std::uint64_t i = lo; i < hi; ++i) {
            WeightedDirection wd = sampler.draw(rng);
            const double y = wd.weight * f(wd.dir);
            s += y;
            s2 += y * y;
        }
        sums[c] = s;
        sums2[c] = s2;
    });
    const double total = pairwise_sum(sums);
    const double total2 = pairwise_sum(sums2);
    const double mean = total / static_cast<double>(samples);
    double var = total2 / static_cast<double>(samples) - mean * mean;
    if (var < 0.0) var = 0.0;
    return McEstimate{mean, std::sqrt(var / static_cast<double>(samples)),
                      samples};
}

// Monte Carlo sphere average of delta(x(R, w))^s = h(R, w)^{-Q s}.
inline McEstimate sphere_average_modular_power_mc(const DamekRicciSpace& sp, double s, double R,
                                                  std::uint64_t samples, std::uint64_t seed) {
    require(R >= 0.0, "sphere_average_modular_power_mc: R must be >= 0");
    const double th = std::tanh(0.5 * R);
    const double e = -sp.Q * s;
    return mc_sphere_average(sp.structure.m_v, sp.structure.m_z, R, samples, seed,
                             [&](const SphereDirection& w) {
                                 const double h = polar_a_component(th, w.b, norm_sq(w.z_part));
                                 return std::pow(h, e);
                             });
}

// Monte Carlo sphere average of |d/dR delta^{-1/2}(x(R, w))|; the radial
// derivative is taken by central differences with Richardson extrapolation,
// h = 1e-5 * max(1, R).
inline McEstimate sphere_average_abs_dR_modular_sqrt(const DamekRicciSpace& sp, double R,
                                                     std::uint64_t samples, std::uint64_t seed) {
    require(R > 0.0, "sphere_average_abs_dR_modular_sqrt: R must be > 0");
    const double hq = 0.5 * sp.Q;
    const double h_fd = 1e-5 * std::max(1.0, R);
    auto mod_sqrt_inv = [&](double Rr, const SphereDirection& w) {
        const double th = std::tanh(0.5 * Rr);
        return std::pow(polar_a_component(th, w.b, norm_sq(w.z_part)), hq);
    };
    return mc_sphere_average(sp.structure.m_v, sp.structure.m_z, R, samples, seed,
                             [&](const SphereDirection& w) {
                                 auto central = [&](double step) {
                                     return (mod_sqrt_inv(R + step, w) - mod_sqrt_inv(R - step, w)) /
                                            (2.0 * step);
                                 };
                                 const double d1 = central(h_fd);
                                 const double d2 = central(0.5 * h_fd);
                                 return std::abs((4.0 * d2 - d1) / 3.0);
                             });
}

}  // namespace drs
