#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <vector>

#include "drs/common.hpp"
#include "drs/quadrature.hpp"

namespace drs {

using Cplx = std::complex<double>;

namespace detail {

// log(sin(pi z)) stable for large |Im z|: expand around the dominating
// exponential so nothing overflows before the logarithm.
inline Cplx log_sin_pi(Cplx z) {
    const Cplx ipz = Cplx(0.0, std::numbers::pi) * z;
    if (z.imag() > 0.0)
        return -ipz + std::log((std::exp(2.0 * ipz) - 1.0) / Cplx(0.0, 2.0));
    return ipz + std::log((1.0 - std::exp(-2.0 * ipz)) / Cplx(0.0, 2.0));
}

}  // namespace detail

// Principal-branch-compatible log Gamma via the Stirling series after pushing
// Re(z) >= 10 by recursion; reflection handles Re(z) < 0. The real part is
// branch-free; the imaginary part may differ from the canonical continuous
// branch by multiples of 2 pi, which every consumer here removes via exp().
inline Cplx log_gamma_complex(Cplx z) {
    if (z.real() < 0.0) {
        const bool pole = z.imag() == 0.0 && z.real() == std::floor(z.real());
        if (pole) throw std::domain_error("log_gamma_complex: pole at a nonpositive integer");
        return std::log(Cplx(std::numbers::pi)) - detail::log_sin_pi(z) -
               log_gamma_complex(1.0 - z);
    }
    if (z == 0.0) throw std::domain_error("log_gamma_complex: pole at 0");
    Cplx shift(0.0, 0.0);
    while (z.real() < 10.0) {
        shift += std::log(z);
        z += 1.0;
    }
    // Stirling: (z - 1/2) log z - z + log(2 pi)/2 + sum B_{2k} / (2k(2k-1) z^{2k-1})
    static const double coef[] = {
        1.0 / 12.0,      -1.0 / 360.0,       1.0 / 1260.0, -1.0 / 1680.0,
        1.0 / 1188.0,    -691.0 / 360360.0,  1.0 / 156.0,  -3617.0 / 122400.0,
    };
    const Cplx zi = 1.0 / z;
    const Cplx zi2 = zi * zi;
    Cplx series(0.0, 0.0);
    Cplx p = zi;
    for (double c : coef) {
        series += c * p;
        p *= zi2;
    }
    const Cplx stirling =
        (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * std::numbers::pi) + series;
    return stirling - shift;
}

// ---------------------------------------------------------------------------
// Gauss hypergeometric function on the ray x <= 0.
//
// Evaluated through the Pfaff transform 2F1(a,b;c;x) =
// (1-x)^{-a} 2F1(a, c-b; c; y), y = x/(x-1) in [0,1): the transformed series
// has positive argument and converges for every x <= 0. Term-level Kahan
// compensation plus a cancellation gauge (max |term| / |sum|): callers that
// need certified accuracy inspect the gauge, since for strongly oscillatory
// parameter regimes the lost digits are a property of the series, not of the
// summation order.
// ---------------------------------------------------------------------------

struct Hyp2F1Result {
    Cplx value;
    int terms = 0;
    double cancellation = 1.0;  // max partial magnitude over final magnitude
};

inline Hyp2F1Result hyp2f1_detailed(Cplx a, Cplx b, Cplx c, double x,
                                    int max_terms = 1000000) {
    require(x <= 0.0, "hyp2f1: implemented on the ray x <= 0");
    if (c.imag() == 0.0 && c.real() <= 0.0 && c.real() == std::floor(c.real()))
        throw std::domain_error("hyp2f1: c must avoid nonpositive integers");
    if (x == 0.0) return {Cplx(1.0, 0.0), 0, 1.0};

    const double y = x / (x - 1.0);
    const Cplx bb = c - b;
    Cplx sum(1.0, 0.0), comp(0.0, 0.0);
    Cplx term(1.0, 0.0);
    double max_mag = 1.0;
    int k = 0;
    int small_streak = 0;
    while (k < max_terms) {
        term *= (a + static_cast<double>(k)) * (bb + static_cast<double>(k)) /
                ((c + static_cast<double>(k)) * (static_cast<double>(k) + 1.0)) * y;
        ++k;
        if (term == 0.0) break;  // terminating parameter case
        // Kahan step
        const Cplx yk = term - comp;
        const Cplx t = sum + yk;
        comp = (t - sum) - yk;
        sum = t;
        max_mag = std::max(max_mag, std::abs(sum));
        if (std::abs(term) < 1e-17 * std::abs(sum)) {
            if (++small_streak >= 2) break;
        } else {
            small_streak = 0;
        }
    }
    if (k >= max_terms) {
        std::ostringstream msg;
        msg << "hyp2f1: series budget (" << max_terms << " terms) exhausted at x = " << x;
        throw std::runtime_error(msg.str());
    }
    const Cplx pref = std::exp(-a * std::log1p(-x));
    const double denom = std::abs(sum);
    return {pref * sum, k, denom > 0.0 ? max_mag / denom : 1e300};
}

inline Cplx hyp2f1(Cplx a, Cplx b, Cplx c, double x) {
    return hyp2f1_detailed(a, b, c, x).value;
}

// Euler integral representation, valid for 0 < Re(b) < Re(c); an independent
// route used to cross-check the series. Panels are graded toward both
// endpoints to absorb the algebraic singularities.
inline Cplx hyp2f1_euler(Cplx a, Cplx b, Cplx c, double x, int order = 16) {
    require(x <= 0.0, "hyp2f1_euler: implemented on the ray x <= 0");
    require(b.real() > 0.0 && (c - b).real() > 0.0,
            "hyp2f1_euler: requires 0 < Re(b) < Re(c)");
    std::vector<double> left = graded_edges(0.5, 0.1, 1e-12, 2.3);
    std::vector<double> edges;
    for (double e : left) edges.push_back(e);
    for (std::size_t i = left.size() - 1; i > 0; --i) edges.push_back(1.0 - left[i - 1]);
    PanelGrid g = panels_from_edges(edges, order);
    Cplx acc(0.0, 0.0);
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const double t = g.nodes[i];
        const Cplx f = std::exp((b - 1.0) * std::log(t) + (c - b - 1.0) * std::log1p(-t) -
                                a * std::log1p(-x * t));
        acc += g.weights[i] * f;
    }
    const Cplx norm = std::exp(log_gamma_complex(c) - log_gamma_complex(b) -
                               log_gamma_complex(c - b));
    return norm * acc;
}

// ---------------------------------------------------------------------------
// Bessel function of the first kind, real order mu >= 0, x >= 0.
// Power series for small x; Hankel asymptotic expansion for large x; a
// downward (Miller-type) recurrence bridges the intermediate band where the
// series cancels badly, for integer and half-integer orders.
// ---------------------------------------------------------------------------

namespace detail {

inline double bessel_j_series(double mu, double x) {
    const double q = 0.25 * x * x;
    double term = std::exp(mu * std::log(0.5 * x) - std::lgamma(mu + 1.0));
    double sum = term;
    for (int k = 0; k < 200; ++k) {
        term *= -q / ((k + 1.0) * (mu + k + 1.0));
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

inline double bessel_j_hankel(double mu, double x) {
    const double w = x - 0.5 * mu * std::numbers::pi - 0.25 * std::numbers::pi;
    const double mu2 = 4.0 * mu * mu;
    double ak = 1.0;
    double p = 1.0, q = 0.0;
    double prev = 1.0;
    for (int k = 1; k <= 30; ++k) {
        ak *= (mu2 - sq(2.0 * k - 1.0)) / (8.0 * x * k);
        if (std::abs(ak) > std::abs(prev)) break;  // asymptotic tail started growing
        prev = ak;
        const int phase = k % 4;
        if (phase == 1) q += ak;
        else if (phase == 2) p -= ak;
        else if (phase == 3) q -= ak;
        else p += ak;
        if (std::abs(ak) < 1e-17) break;
    }
    return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * std::cos(w) - q * std::sin(w));
}

inline double bessel_j_downward(double mu, double x) {
    const double frac = mu - std::floor(mu);
    const bool integer_order = frac == 0.0;
    const bool half_order = std::abs(frac - 0.5) < 1e-14;
    if (!integer_order && !half_order)
        throw std::domain_error(
            "bessel_j: intermediate-band evaluation needs integer or half-integer order");
    const int steps_to_base = static_cast<int>(std::floor(mu - (half_order ? 0.5 : 0.0)) + 0.5);
    const int top = steps_to_base + 24 + static_cast<int>(std::ceil(1.3 * x));
    const double base = half_order ? 0.5 : 0.0;

    double fp = 0.0, fc = 1e-280;
    double target = 0.0;     // unnormalized value at order mu
    double even_sum = 0.0;   // for the integer normalization identity
    double f_half = 0.0, f_three_half = 0.0;
    for (int k = top; k >= 0; --k) {
        const double nu = base + k;
        double fm = (2.0 * (nu + 1.0) / x) * fc - fp;
        fp = fc;
        fc = fm;
        if (std::abs(fc) > 1e260) {  // rescale everything tracked so far
            fp /= 1e260; fc /= 1e260; target /= 1e260; even_sum /= 1e260;
            f_half /= 1e260; f_three_half /= 1e260;
        }
        if (k == steps_to_base) target = fc;
        if (integer_order) {
            if (k == 0) even_sum += fc;  // J_0
            else if (k % 2 == 0) even_sum += 2.0 * fc;
        } else {
            if (k == 0) f_half = fc;
            if (k == 1) f_three_half = fc;
        }
        (void)nu;
    }
    if (integer_order) return target / even_sum;
    // Normalize against a closed-form half-integer seed; sin(x) and
    // sin(x)/x - cos(x) never vanish together, pick the larger one.
    const double j_half = std::sqrt(2.0 / (std::numbers::pi * x)) * std::sin(x);
    const double j_three_half =
        std::sqrt(2.0 / (std::numbers::pi * x)) * (std::sin(x) / x - std::cos(x));
    if (std::abs(j_half) >= std::abs(j_three_half)) return target * (j_half / f_half);
    return target * (j_three_half / f_three_half);
}

}  // namespace detail

inline double bessel_j(double mu, double x) {
    require(mu >= 0.0, "bessel_j: order must be >= 0");
    require(x >= 0.0 && std::isfinite(x), "bessel_j: argument must be finite and >= 0");
    if (x == 0.0) return mu == 0.0 ? 1.0 : 0.0;
    if (x <= 12.0) return detail::bessel_j_series(mu, x);
    if (x >= std::max(20.0, 1.2 * mu * mu)) return detail::bessel_j_hankel(mu, x);
    return detail::bessel_j_downward(mu, x);
}

}  // namespace drs
