#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "drs/common.hpp"
#include "drs/fit.hpp"
#include "drs/htype.hpp"
#include "drs/special_functions.hpp"

namespace drs {

// Spectral parameter restricted to the real and imaginary axes, where the
// spherical function is real-valued. Points off both axes are rejected.
struct SpectralParam {
    double re = 0.0;
    double im = 0.0;

    static SpectralParam real_axis(double l) { return SpectralParam{l, 0.0}; }
    static SpectralParam imaginary_axis(double s) { return SpectralParam{0.0, s}; }

    double lam_sq() const { return re * re - im * im; }
    bool on_real_axis() const { return im == 0.0; }
};

namespace detail {

constexpr double kPhiMaxR = 30.0;
constexpr double kPhiMaxLambda = 500.0;

inline void check_phi_domain(const SpaceDims& d, SpectralParam lam, double r_max_used) {
    require(lam.re == 0.0 || lam.im == 0.0,
            "spherical_phi: spectral parameter must lie on the real or imaginary axis");
    require(std::abs(lam.re) <= kPhiMaxLambda + 1e-9,
            "spherical_phi: |Re lambda| exceeds the supported range (500)");
    require(std::abs(lam.im) <= 3.0 * d.q() + 1e-9,
            "spherical_phi: |Im lambda| exceeds the supported range (3Q)");
    require(r_max_used >= 0.0 && r_max_used <= kPhiMaxR + 1e-9,
            "spherical_phi: radius exceeds the supported range (30)");
    require(d.m_v >= 2 && d.m_v % 2 == 0 && d.m_z >= 1,
            "spherical_phi: invalid layer dimensions");
}

struct PhiSeriesValue {
    double phi = 1.0;
    double dphi = 0.0;
};

// Pfaff-transformed series in y = tanh^2(r/2) for the spherical function and
// its radial derivative. Safe only where the oscillatory cancellation
// e^{2 |Re lambda| tanh(r/2)} stays small; callers gate on series_radius().
inline PhiSeriesValue phi_series(const SpaceDims& d, SpectralParam lam, double r) {
    if (r == 0.0) return {1.0, 0.0};
    const double Q = d.q();
    const double n = d.n();
    const Cplx a(0.5 * Q + lam.im, -lam.re);               // Q/2 - i lambda
    const Cplx bb(0.25 * d.m_v + 0.5 + lam.im, -lam.re);   // c - b
    const double c = 0.5 * n;
    const double th = std::tanh(0.5 * r);
    const double y = th * th;

    Cplx s0(1.0, 0.0), t0(1.0, 0.0);  // phi series
    Cplx s1(1.0, 0.0), t1(1.0, 0.0);  // derivative companion, params (a+1, bb, c+1)
    bool done0 = false, done1 = false;
    for (int k = 0; k < 20000 && !(done0 && done1); ++k) {
        const double kk = static_cast<double>(k);
        if (!done0) {
            t0 *= (a + kk) * (bb + kk) / ((c + kk) * (kk + 1.0)) * y;
            s0 += t0;
            if (std::abs(t0) < 1e-17 * std::abs(s0)) done0 = true;
        }
        if (!done1) {
            t1 *= (a + 1.0 + kk) * (bb + kk) / ((c + 1.0 + kk) * (kk + 1.0)) * y;
            s1 += t1;
            if (std::abs(t1) < 1e-17 * std::abs(s1)) done1 = true;
        }
    }
    require(done0 && done1, "spherical_phi: series failed to converge inside its gate");

    const double lc = std::log(std::cosh(0.5 * r));
    const Cplx pref0 = std::exp(Cplx(-Q - 2.0 * lam.im, 2.0 * lam.re) * lc);
    const Cplx pref1 = std::exp(Cplx(-Q - 2.0 - 2.0 * lam.im, 2.0 * lam.re) * lc);
    const double dpref = -(Q * Q + 4.0 * lam.lam_sq()) / (4.0 * n) * std::sinh(r);
    return {(pref0 * s0).real(), dpref * (pref1 * s1).real()};
}

// Largest radius where the series keeps ~1e-11 relative accuracy: the partial
// sums reach e^{2 |Re lambda| tanh(r/2)}, so cap that exponent at 11.5
// (amplification ~1e5, five digits lost), and cap tanh(r/2) itself to bound
// the term count.
inline double series_radius(SpectralParam lam) {
    const double th_cap = std::min(0.55, 4.5 / std::max(std::abs(lam.re), 1e-9));
    return 2.0 * std::atanh(th_cap);
}

// log A(r)^{1/2} and its derivative B = (log A^{1/2})'
inline double log_sqrt_density(const SpaceDims& d, double r) {
    const int M = d.m_v + d.m_z;
    return 0.5 * (M * std::log(2.0 * std::sinh(0.5 * r)) +
                  d.m_z * std::log(std::cosh(0.5 * r)));
}

inline double sqrt_density_log_deriv(const SpaceDims& d, double r) {
    const int M = d.m_v + d.m_z;
    return 0.25 * (M / std::tanh(0.5 * r) + d.m_z * std::tanh(0.5 * r));
}

// W = (A^{1/2})'' / A^{1/2} = B' + B^2; u = A^{1/2} phi obeys
// u'' + (lambda^2 + Q^2/4 - W) u = 0.
inline double liouville_potential(const SpaceDims& d, double r) {
    const int M = d.m_v + d.m_z;
    const double sh = std::sinh(0.5 * r);
    const double ch = std::cosh(0.5 * r);
    const double bprime = (d.m_z / (ch * ch) - M / (sh * sh)) / 8.0;
    const double b = sqrt_density_log_deriv(d, r);
    return bprime + b * b;
}

// One fourth-order Magnus step for u' = v, v' = -omega^2(r) u over [r, r+h],
// with the two-point Gauss collocation of omega^2. The exact exponential of
// the averaged generator keeps the step accuracy independent of how fast the
// solution oscillates; only the variation of W across the step matters.
struct MagnusState {
    double u = 0.0;
    double v = 0.0;
};

inline void magnus_step(const SpaceDims& d, double lam_sq, double q2over4, double r, double h,
                        MagnusState& s) {
    static const double half_gap = 0.5 - std::sqrt(3.0) / 6.0;
    const double r1 = r + h * half_gap;
    const double r2 = r + h * (1.0 - half_gap);
    const double w1 = lam_sq + q2over4 - liouville_potential(d, r1);
    const double w2 = lam_sq + q2over4 - liouville_potential(d, r2);
    const double dd = std::sqrt(3.0) * h * h / 12.0 * (w2 - w1);
    const double wbar = 0.5 * (w1 + w2);
    const double mu2 = dd * dd - h * h * wbar;
    double C, S;
    if (mu2 >= 0.0) {
        const double m = std::sqrt(mu2);
        C = std::cosh(m);
        S = m < 1e-6 ? 1.0 + mu2 / 6.0 : std::sinh(m) / m;
    } else {
        const double t = std::sqrt(-mu2);
        C = std::cos(t);
        S = t < 1e-6 ? 1.0 + mu2 / 6.0 : std::sin(t) / t;
    }
    const double u_new = (C + S * dd) * s.u + S * h * s.v;
    const double v_new = -S * h * wbar * s.u + (C - S * dd) * s.v;
    s.u = u_new;
    s.v = v_new;
}

// Step-size rule: the potential behaves like K/r^2 near zero, so the local
// error h^5 W'''' ~ h^5 / r^6 is equidistributed by h ~ r^{5/4}; capped by
// h_max elsewhere. Constants tuned against high-precision reference values.
inline double magnus_step_size(double r, double h_max) {
    return std::min(h_max, std::max(2e-4 * r * std::sqrt(std::sqrt(r)), 1e-6));
}

}  // namespace detail

struct PhiProfile {
    std::vector<double> phi;
    std::vector<double> dphi;
};

// Spherical function phi_lambda and d/dr phi_lambda at an ascending list of
// radii, for one spectral parameter. Series evaluation below the cancellation
// gate; Magnus propagation of the Liouville form beyond it. One sweep costs
// O(r_max / h) regardless of how many radii are requested.
inline PhiProfile spherical_phi_profile(const SpaceDims& d, SpectralParam lam,
                                        std::span<const double> rs, double h_max = 0.012) {
    PhiProfile out;
    out.phi.resize(rs.size());
    out.dphi.resize(rs.size());
    if (rs.empty()) return out;
    for (std::size_t i = 0; i + 1 < rs.size(); ++i)
        require(rs[i] <= rs[i + 1], "spherical_phi_profile: radii must be ascending");
    require(rs[0] >= 0.0, "spherical_phi_profile: radii must be >= 0");
    detail::check_phi_domain(d, lam, rs[rs.size() - 1]);

    const double lam_sq = lam.lam_sq();
    const double q2over4 = 0.25 * d.q() * d.q();
    const double r0 = detail::series_radius(lam);

    // series region
    std::size_t i = 0;
    for (; i < rs.size() && rs[i] <= r0; ++i) {
        auto sv = detail::phi_series(d, lam, rs[i]);
        out.phi[i] = sv.phi;
        out.dphi[i] = sv.dphi;
    }
    if (i == rs.size()) return out;

    // hand off to the Liouville sweep at r0
    auto seed = detail::phi_series(d, lam, r0);
    const double la0 = detail::log_sqrt_density(d, r0);
    const double b0 = detail::sqrt_density_log_deriv(d, r0);
    // Propagate u normalized by A^{1/2}(r0) to keep magnitudes near 1; on the
    // imaginary axis u still grows like e^{|Im lambda| r}, so peel off powers
    // of e as they accumulate and restore them through log_rescale.
    detail::MagnusState st{seed.phi, seed.dphi + b0 * seed.phi};
    double cur = r0;
    double log_rescale = 0.0;
    for (; i < rs.size(); ++i) {
        const double target = rs[i];
        while (cur < target) {
            double h = detail::magnus_step_size(cur, h_max);
            const bool last = cur + h >= target;
            if (last) h = target - cur;
            detail::magnus_step(d, lam_sq, q2over4, cur, h, st);
            cur = last ? target : cur + h;
            const double mag = std::max(std::abs(st.u), std::abs(st.v));
            if (mag > 1e250) {
                const double k = std::floor(std::log(mag));
                const double down = std::exp(-k);
                st.u *= down;
                st.v *= down;
                log_rescale += k;
            }
        }
        const double scale = std::exp(la0 - detail::log_sqrt_density(d, cur) + log_rescale);
        const double phi = st.u * scale;
        out.phi[i] = phi;
        out.dphi[i] = st.v * scale - detail::sqrt_density_log_deriv(d, cur) * phi;
    }
    return out;
}

inline double spherical_phi(const SpaceDims& d, SpectralParam lam, double r) {
    const double rs[1] = {r};
    return spherical_phi_profile(d, lam, rs).phi[0];
}

// d/dr of the spherical function through the contiguous-parameter identity:
// the shifted hypergeometric factor is itself the spherical function of the
// enlarged parameter pair (m_v, m_z + 2), whether or not a group realizes it.
inline double spherical_phi_dr(const SpaceDims& d, SpectralParam lam, double r) {
    require(r >= 0.0, "spherical_phi_dr: r must be >= 0");
    if (r == 0.0) return 0.0;
    const double Q = d.q();
    const SpaceDims enlarged{d.m_v, d.m_z + 2};
    const double pref = -(Q * Q + 4.0 * lam.lam_sq()) / (4.0 * d.n()) * std::sinh(r);
    return pref * spherical_phi(enlarged, lam, r);
}

// Harish-Chandra c-function on the real axis (lambda != 0).
inline Cplx c_function(const SpaceDims& d, double lam) {
    require(lam != 0.0 && std::isfinite(lam), "c_function: pole at lambda = 0");
    require(std::abs(lam) <= detail::kPhiMaxLambda + 1e-9,
            "c_function: |lambda| exceeds the supported range (500)");
    const double Q = d.q();
    const Cplx il(0.0, lam);
    const Cplx lg = (Q - 2.0 * il) * std::log(2.0) + log_gamma_complex(2.0 * il) +
                    std::lgamma(0.5 * d.n()) - log_gamma_complex(0.5 * Q + il) -
                    log_gamma_complex(0.25 * d.m_v + 0.5 + il);
    return std::exp(lg);
}

// |c(lambda)|^{-2} through the sinh product form: smooth and positive through
// lambda = 0 (double zero there), evaluated in log space so nothing overflows.
inline double plancherel_density(const SpaceDims& d, double lam) {
    require(std::isfinite(lam), "plancherel_density: lambda must be finite");
    lam = std::abs(lam);
    require(lam <= detail::kPhiMaxLambda + 1e-9,
            "plancherel_density: |lambda| exceeds the supported range (500)");
    if (lam == 0.0) return 0.0;
    const double Q = d.q();
    const double x = 2.0 * std::numbers::pi * lam;
    const double log_sinh = x - std::log(2.0) + std::log1p(-std::exp(-2.0 * x));
    const double lg1 = 2.0 * log_gamma_complex(Cplx(0.5 * Q, lam)).real();
    const double lg2 = 2.0 * log_gamma_complex(Cplx(0.25 * d.m_v + 0.5, lam)).real();
    const double ld = std::log(2.0 * lam) + log_sinh + lg1 + lg2 - Q * std::log(4.0) -
                      2.0 * std::lgamma(0.5 * d.n()) - std::log(std::numbers::pi);
    return std::exp(ld);
}

// Leading oscillatory term of phi_lambda(t) for large lambda:
// c_n A(t)^{-1/2} lambda^{-(n-1)/2} cos(lambda t - (n-1) pi/4).
inline double hc_leading(const SpaceDims& d, double t, double lam) {
    require(t > 0.0 && lam > 0.0, "hc_leading: needs t > 0 and lambda > 0");
    const int n = d.n();
    const double cn = std::pow(2.0, 0.5 * (n - 1)) / std::sqrt(std::numbers::pi) *
                      std::tgamma(0.5 * n);
    return cn / std::sqrt(volume_density(d, t)) * std::pow(lam, -0.5 * (n - 1)) *
           std::cos(lam * t - (n - 1) * std::numbers::pi / 4.0);
}

// Companion leading term of d/dr phi_lambda(t): one power of lambda stronger,
// with the cosine differentiated.
inline double hc_leading_dr(const SpaceDims& d, double t, double lam) {
    require(t > 0.0 && lam > 0.0, "hc_leading_dr: needs t > 0 and lambda > 0");
    const int n = d.n();
    const double cn = std::pow(2.0, 0.5 * (n - 1)) / std::sqrt(std::numbers::pi) *
                      std::tgamma(0.5 * n);
    return -cn / std::sqrt(volume_density(d, t)) * std::pow(lam, -0.5 * (n - 3)) *
           std::sin(lam * t - (n - 1) * std::numbers::pi / 4.0);
}

// Bessel form of the leading term, natural at small t: reduces to the cosine
// form under the large-argument asymptotics of J_{n/2-1}.
inline double bessel_leading(const SpaceDims& d, double t, double lam) {
    require(t > 0.0 && lam > 0.0, "bessel_leading: needs t > 0 and lambda > 0");
    const int n = d.n();
    return std::pow(2.0, 0.5 * n - 1.0) * std::tgamma(0.5 * n) /
           std::sqrt(volume_density(d, t)) * std::pow(t, 0.5 * (n - 1)) *
           std::pow(lam * t, 1.0 - 0.5 * n) * bessel_j(0.5 * n - 1.0, lam * t);
}

// Sphere average of delta^s along the distance sphere: equals the spherical
// function at the imaginary spectral parameter -i Q (s + 1/2).
inline double sphere_average_modular_power(const SpaceDims& d, double s, double R) {
    require(R >= 0.0, "sphere_average_modular_power: R must be >= 0");
    require(s >= -3.5 && s <= 2.5,
            "sphere_average_modular_power: exponent outside the supported window [-3.5, 2.5]");
    return spherical_phi(d, SpectralParam::imaginary_axis(-d.q() * (s + 0.5)), R);
}

// ---------------------------------------------------------------------------
// Asymptotic-remainder reports: sampled remainders against a leading term,
// reduced to per-octave maxima and fitted in log-log coordinates.
// ---------------------------------------------------------------------------

struct ExpansionReport {
    std::vector<double> x;          // lambda, or lambda*t for the short-time report
    std::vector<double> remainder;  // |phi - leading| (or derivative analogue)
    LinearFit envelope_fit;
    double slope_threshold = 0.0;
    bool pass = false;
};

namespace detail {

inline std::vector<double> geometric_samples(double lo, double hi, int points) {
    require(lo > 0.0 && hi > lo && points >= 4, "geometric_samples: bad range");
    std::vector<double> xs(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i)
        xs[static_cast<std::size_t>(i)] = lo * std::pow(hi / lo, double(i) / (points - 1));
    return xs;
}

}  // namespace detail

// Remainder of the long-time leading term over lambda in [lam_lo, lam_hi];
// the upper envelope must decay at least like lambda^{-(n+1)/2} (+0.3 slack).
inline ExpansionReport long_time_expansion_report(const SpaceDims& d, double t,
                                                  double lam_lo = 5.0, double lam_hi = 100.0,
                                                  int points = 49) {
    ExpansionReport rep;
    rep.x = detail::geometric_samples(lam_lo, lam_hi, points);
    rep.remainder.reserve(rep.x.size());
    for (double l : rep.x)
        rep.remainder.push_back(
            std::abs(spherical_phi(d, SpectralParam::real_axis(l), t) - hc_leading(d, t, l)));
    rep.envelope_fit = envelope_loglog_fit(rep.x, rep.remainder);
    rep.slope_threshold = -0.5 * (d.n() + 1) + 0.3;
    rep.pass = rep.envelope_fit.slope <= rep.slope_threshold;
    return rep;
}

inline ExpansionReport long_time_derivative_report(const SpaceDims& d, double t,
                                                   double lam_lo = 5.0, double lam_hi = 100.0,
                                                   int points = 49) {
    ExpansionReport rep;
    rep.x = detail::geometric_samples(lam_lo, lam_hi, points);
    rep.remainder.reserve(rep.x.size());
    for (double l : rep.x)
        rep.remainder.push_back(std::abs(spherical_phi_dr(d, SpectralParam::real_axis(l), t) -
                                         hc_leading_dr(d, t, l)));
    rep.envelope_fit = envelope_loglog_fit(rep.x, rep.remainder);
    rep.slope_threshold = -0.5 * (d.n() - 1) + 0.3;
    rep.pass = rep.envelope_fit.slope <= rep.slope_threshold;
    return rep;
}

// Short-time remainder, measured against lambda*t: the remainder scale for
// t <= 1 is set by the product, not by lambda alone.
inline ExpansionReport short_time_expansion_report(const SpaceDims& d, double t,
                                                   double lt_lo = 5.0, double lt_hi = 100.0,
                                                   int points = 49) {
    require(t > 0.0 && t <= 1.0, "short_time_expansion_report: t must lie in (0, 1]");
    ExpansionReport rep;
    rep.x = detail::geometric_samples(lt_lo, lt_hi, points);
    rep.remainder.reserve(rep.x.size());
    for (double lt : rep.x) {
        const double l = lt / t;
        rep.remainder.push_back(
            std::abs(spherical_phi(d, SpectralParam::real_axis(l), t) - hc_leading(d, t, l)));
    }
    rep.envelope_fit = envelope_loglog_fit(rep.x, rep.remainder);
    rep.slope_threshold = -0.5 * (d.n() + 1) + 0.3;
    rep.pass = rep.envelope_fit.slope <= rep.slope_threshold;
    return rep;
}

}  // namespace drs
