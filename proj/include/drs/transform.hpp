#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "drs/common.hpp"
#include "drs/htype.hpp"
#include "drs/quadrature.hpp"
#include "drs/spherical.hpp"

namespace drs {

struct RadialGridSpec {
    double r_max = 0.0;
    double tail_tol = 0.0;
    std::size_t panel_count = 0;
    int panel_order = 0;
    bool on_plan_nodes = false;  // r_grid is the plan's quadrature grid
};

struct SpectralCutoff {
    double lambda_max = 0.0;
    double taper_start = 0.0;  // raised-cosine taper over [taper_start, lambda_max]
};

struct RadialSamples {
    std::vector<double> r_grid;
    std::vector<Cplx> values;
    RadialGridSpec grid_spec;
};

struct SpectralSamples {
    std::vector<double> lambda_grid;
    std::vector<Cplx> values;
    SpectralCutoff cutoff;
};

// Normalized spherical measure concentrated on the distance sphere r = radius
// (total mass 1 after the 1/(nu_n A) normalization). Kept as a tagged type so
// its transform is exact rather than a narrow-bump approximation.
struct PointMass {
    double radius = 1.0;
};

struct TransformOptions {
    double lambda_max = 200.0;
    double r_max = 20.0;
    double t_max = 0.0;      // largest time used downstream; widens the spectral grid
    double tail_tol = 1e-6;  // bound on e^{-Q r_max/2} (1 + r_max)
    double rad_per_panel = 8.0;  // phase budget per 16-node panel, ~1e-16 quadrature error
    int level = 0;               // each level halves every panel width
};

// Precomputed quadrature pairing between a radial grid and a spectral grid:
// phi holds phi_lambda(r) row-major over (lambda node, r node). Building the
// plan does all ODE sweeps once; every transform afterwards is a weighted
// matrix product.
struct TransformPlan {
    SpaceDims dims;
    TransformOptions opts;
    double nu_n = 0.0;       // surface measure of the unit sphere in n dims
    double inv_const = 0.0;  // 2^{m_z-2} Gamma(n/2) / pi^{n/2+1}
    SpectralCutoff cutoff;

    PanelGrid r_panels;
    std::vector<double> a_density;  // A(r_j)

    PanelGrid lambda_panels;
    std::vector<double> plancherel;  // |c(lambda_i)|^{-2}
    std::vector<double> taper;       // raised-cosine cutoff at lambda_i

    std::vector<double> phi;  // [i_lambda * n_r + j_r]

    std::size_t n_r() const { return r_panels.nodes.size(); }
    std::size_t n_lambda() const { return lambda_panels.nodes.size(); }
};

namespace detail {

inline Cplx pairwise_sum_cplx(std::span<const Cplx> xs) {
    if (xs.size() <= 8) {
        Cplx s{};
        for (const Cplx& x : xs) s += x;
        return s;
    }
    const std::size_t half = xs.size() / 2;
    return pairwise_sum_cplx(xs.first(half)) + pairwise_sum_cplx(xs.subspan(half));
}

inline double raised_cosine_taper(double lam, const SpectralCutoff& cut) {
    if (lam <= cut.taper_start) return 1.0;
    if (lam >= cut.lambda_max) return 0.0;
    const double u = (lam - cut.taper_start) / (cut.lambda_max - cut.taper_start);
    return 0.5 * (1.0 + std::cos(std::numbers::pi * u));
}

inline void require_on_plan_r_grid(const TransformPlan& plan, const RadialSamples& f,
                                   const char* who) {
    require(f.r_grid.size() == plan.n_r() &&
                std::equal(f.r_grid.begin(), f.r_grid.end(), plan.r_panels.nodes.begin()),
            std::string(who) + ": samples must live on the plan's radial grid");
    require(f.values.size() == f.r_grid.size(),
            std::string(who) + ": value/grid size mismatch");
    for (const Cplx& v : f.values)
        require(std::isfinite(v.real()) && std::isfinite(v.imag()),
                std::string(who) + ": values must be finite");
}

inline void require_on_plan_lambda_grid(const TransformPlan& plan, const SpectralSamples& s,
                                        const char* who) {
    require(s.lambda_grid.size() == plan.n_lambda() &&
                std::equal(s.lambda_grid.begin(), s.lambda_grid.end(),
                           plan.lambda_panels.nodes.begin()),
            std::string(who) + ": samples must live on the plan's spectral grid");
    require(s.values.size() == s.lambda_grid.size(),
            std::string(who) + ": value/grid size mismatch");
    for (const Cplx& v : s.values)
        require(std::isfinite(v.real()) && std::isfinite(v.imag()),
                std::string(who) + ": values must be finite");
}

}  // namespace detail

inline TransformPlan build_transform_plan(const SpaceDims& d, TransformOptions opts = {}) {
    require(opts.lambda_max > 0.0 && opts.lambda_max <= 500.0,
            "build_transform_plan: lambda_max must lie in (0, 500]");
    require(opts.r_max > 0.0 && opts.r_max <= 30.0,
            "build_transform_plan: r_max must lie in (0, 30]");
    require(opts.level >= 0 && opts.level <= 6, "build_transform_plan: level out of range");
    require(opts.rad_per_panel > 0.0, "build_transform_plan: rad_per_panel must be > 0");
    const double tail = std::exp(-0.5 * d.q() * opts.r_max) * (1.0 + opts.r_max);
    require(tail < opts.tail_tol,
            "build_transform_plan: r_max too small for the declared tail tolerance");

    TransformPlan plan;
    plan.dims = d;
    plan.opts = opts;
    plan.nu_n = sphere_surface_area(d.n());
    plan.inv_const = std::pow(2.0, d.m_z - 2) * std::tgamma(0.5 * d.n()) /
                     std::pow(std::numbers::pi, 0.5 * d.n() + 1.0);
    plan.cutoff = SpectralCutoff{opts.lambda_max, 0.8 * opts.lambda_max};

    const double refine = std::pow(2.0, opts.level);
    // phase per panel bounded by rad_per_panel against the fastest oscillation
    // on the opposite axis
    const double w_r = std::min(0.25, opts.rad_per_panel / opts.lambda_max) / refine;
    const double w_l =
        opts.rad_per_panel / std::max({opts.r_max, opts.t_max, 1.0}) / refine;
    plan.r_panels = panels_from_edges(graded_edges(opts.r_max, w_r, w_r / 16.0), 16);
    plan.lambda_panels = panels_from_edges(uniform_edges(0.0, opts.lambda_max, w_l), 16);

    plan.a_density.resize(plan.n_r());
    for (std::size_t j = 0; j < plan.n_r(); ++j)
        plan.a_density[j] = volume_density(d, plan.r_panels.nodes[j]);

    plan.plancherel.resize(plan.n_lambda());
    plan.taper.resize(plan.n_lambda());
    for (std::size_t i = 0; i < plan.n_lambda(); ++i) {
        plan.plancherel[i] = plancherel_density(d, plan.lambda_panels.nodes[i]);
        plan.taper[i] = detail::raised_cosine_taper(plan.lambda_panels.nodes[i], plan.cutoff);
    }

    plan.phi.resize(plan.n_lambda() * plan.n_r());
    parallel_for(plan.n_lambda(), [&](std::size_t i) {
        const SpectralParam lam = SpectralParam::real_axis(plan.lambda_panels.nodes[i]);
        PhiProfile prof = spherical_phi_profile(d, lam, plan.r_panels.nodes);
        std::copy(prof.phi.begin(), prof.phi.end(), plan.phi.begin() + i * plan.n_r());
    });
    return plan;
}

template <class F>
RadialSamples radial_samples_from(const TransformPlan& plan, F&& f) {
    RadialSamples out;
    out.r_grid = plan.r_panels.nodes;
    out.values.reserve(out.r_grid.size());
    for (double r : out.r_grid) out.values.emplace_back(f(r));
    out.grid_spec = RadialGridSpec{plan.opts.r_max, plan.opts.tail_tol,
                                   plan.r_panels.edges.size() - 1, plan.r_panels.order, true};
    return out;
}

template <class F>
SpectralSamples spectral_samples_from(const TransformPlan& plan, F&& psi) {
    SpectralSamples out;
    out.lambda_grid = plan.lambda_panels.nodes;
    out.values.reserve(out.lambda_grid.size());
    for (double l : out.lambda_grid) out.values.emplace_back(psi(l));
    out.cutoff = plan.cutoff;
    return out;
}

// Spherical Fourier transform of a radial function sampled on the plan grid:
// F(f)(lambda) = nu_n * integral f(r) phi_lambda(r) A(r) dr.
inline SpectralSamples forward(const TransformPlan& plan, const RadialSamples& f) {
    detail::require_on_plan_r_grid(plan, f, "forward");
    SpectralSamples out;
    out.lambda_grid = plan.lambda_panels.nodes;
    out.values.resize(plan.n_lambda());
    out.cutoff = plan.cutoff;
    std::vector<Cplx> terms(plan.n_r());
    for (std::size_t i = 0; i < plan.n_lambda(); ++i) {
        const double* row = plan.phi.data() + i * plan.n_r();
        for (std::size_t j = 0; j < plan.n_r(); ++j)
            terms[j] = f.values[j] *
                       (row[j] * plan.a_density[j] * plan.r_panels.weights[j]);
        out.values[i] = plan.nu_n * detail::pairwise_sum_cplx(terms);
    }
    return out;
}

// Exact transform of the normalized spherical measure: phi_lambda(radius).
inline SpectralSamples forward(const TransformPlan& plan, PointMass m) {
    require(m.radius >= 0.0 && m.radius <= detail::kPhiMaxR,
            "forward: point mass radius outside the supported range");
    SpectralSamples out;
    out.lambda_grid = plan.lambda_panels.nodes;
    out.values.resize(plan.n_lambda());
    out.cutoff = plan.cutoff;
    parallel_for(plan.n_lambda(), [&](std::size_t i) {
        out.values[i] =
            spherical_phi(plan.dims, SpectralParam::real_axis(out.lambda_grid[i]), m.radius);
    });
    return out;
}

// Forward transform at spectral points off the plan grid (one ODE sweep per
// requested lambda).
inline SpectralSamples forward_at(const TransformPlan& plan, const RadialSamples& f,
                                  std::vector<double> lambdas) {
    detail::require_on_plan_r_grid(plan, f, "forward_at");
    require(!lambdas.empty(), "forward_at: need at least one lambda");
    SpectralSamples out;
    out.lambda_grid = std::move(lambdas);
    out.values.resize(out.lambda_grid.size());
    out.cutoff = plan.cutoff;
    parallel_for(out.lambda_grid.size(), [&](std::size_t i) {
        const SpectralParam lam = SpectralParam::real_axis(out.lambda_grid[i]);
        PhiProfile prof = spherical_phi_profile(plan.dims, lam, plan.r_panels.nodes);
        std::vector<Cplx> terms(plan.n_r());
        for (std::size_t j = 0; j < plan.n_r(); ++j)
            terms[j] = f.values[j] *
                       (prof.phi[j] * plan.a_density[j] * plan.r_panels.weights[j]);
        out.values[i] = plan.nu_n * detail::pairwise_sum_cplx(terms);
    });
    return out;
}

// Inverse transform / kernel integral on the plan's radial grid:
// kappa(r) = inv_const * integral psi(lambda) phi_lambda(r) |c|^{-2} dlambda,
// with the raised-cosine taper applied to psi.
inline RadialSamples inverse(const TransformPlan& plan, const SpectralSamples& psi) {
    detail::require_on_plan_lambda_grid(plan, psi, "inverse");
    RadialSamples out;
    out.r_grid = plan.r_panels.nodes;
    out.values.resize(plan.n_r());
    out.grid_spec = RadialGridSpec{plan.opts.r_max, plan.opts.tail_tol,
                                   plan.r_panels.edges.size() - 1, plan.r_panels.order, true};
    std::vector<Cplx> weighted(plan.n_lambda());
    for (std::size_t i = 0; i < plan.n_lambda(); ++i)
        weighted[i] = psi.values[i] * (plan.taper[i] * plan.plancherel[i] *
                                       plan.lambda_panels.weights[i]);
    std::vector<Cplx> terms(plan.n_lambda());
    for (std::size_t j = 0; j < plan.n_r(); ++j) {
        for (std::size_t i = 0; i < plan.n_lambda(); ++i)
            terms[i] = weighted[i] * plan.phi[i * plan.n_r() + j];
        out.values[j] = plan.inv_const * detail::pairwise_sum_cplx(terms);
    }
    return out;
}

// Inverse transform at radii off the plan grid (one ODE sweep per spectral
// node). Radii may exceed r_max: the spectral integral needs no radial grid.
inline RadialSamples inverse_at(const TransformPlan& plan, const SpectralSamples& psi,
                                std::vector<double> radii) {
    detail::require_on_plan_lambda_grid(plan, psi, "inverse_at");
    require(!radii.empty(), "inverse_at: need at least one radius");
    std::vector<std::size_t> order(radii.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return radii[a] < radii[b]; });
    std::vector<double> sorted;
    sorted.reserve(radii.size());
    for (std::size_t k : order) sorted.push_back(radii[k]);

    std::vector<std::vector<Cplx>> terms(radii.size(),
                                         std::vector<Cplx>(plan.n_lambda()));
    parallel_for(plan.n_lambda(), [&](std::size_t i) {
        const SpectralParam lam = SpectralParam::real_axis(plan.lambda_panels.nodes[i]);
        PhiProfile prof = spherical_phi_profile(plan.dims, lam, sorted);
        const Cplx w = psi.values[i] * (plan.taper[i] * plan.plancherel[i] *
                                        plan.lambda_panels.weights[i]);
        for (std::size_t k = 0; k < sorted.size(); ++k) terms[k][i] = w * prof.phi[k];
    });

    RadialSamples out;
    out.r_grid = std::move(radii);
    out.values.resize(out.r_grid.size());
    out.grid_spec.r_max = sorted.back();
    out.grid_spec.on_plan_nodes = false;
    for (std::size_t k = 0; k < sorted.size(); ++k)
        out.values[order[k]] = plan.inv_const * detail::pairwise_sum_cplx(terms[k]);
    return out;
}

// Radial multiplier calculus: inverse(psi * forward(f)).
template <class F>
RadialSamples multiplier_apply(const TransformPlan& plan, F&& psi, const RadialSamples& f) {
    SpectralSamples hat = forward(plan, f);
    for (std::size_t i = 0; i < hat.values.size(); ++i)
        hat.values[i] *= psi(hat.lambda_grid[i]);
    return inverse(plan, hat);
}

// Norm on the spectral side: (inv_const * integral |psi|^2 |c|^{-2} dlambda)^{1/2}.
inline double spectral_l2_norm(const TransformPlan& plan, const SpectralSamples& psi) {
    detail::require_on_plan_lambda_grid(plan, psi, "spectral_l2_norm");
    std::vector<double> terms(plan.n_lambda());
    for (std::size_t i = 0; i < plan.n_lambda(); ++i)
        terms[i] = std::norm(psi.values[i]) * plan.plancherel[i] *
                   plan.lambda_panels.weights[i];
    return std::sqrt(plan.inv_const * pairwise_sum(terms));
}

// Norm on the radial side: (nu_n * integral |f|^2 A dr)^{1/2}; matches the
// spectral norm of forward(f) for functions resolved by the grid.
inline double radial_l2_norm(const TransformPlan& plan, const RadialSamples& f) {
    detail::require_on_plan_r_grid(plan, f, "radial_l2_norm");
    std::vector<double> terms(plan.n_r());
    for (std::size_t j = 0; j < plan.n_r(); ++j)
        terms[j] = std::norm(f.values[j]) * plan.a_density[j] * plan.r_panels.weights[j];
    return std::sqrt(plan.nu_n * pairwise_sum(terms));
}

// Relative L^2(|c|^{-2} dlambda) error of forward(inverse(psi)) against the
// tapered symbol, the fixed point of the truncated transform pair. Zero
// symbols return zero.
template <class F>
double roundtrip_error(const SpaceDims& d, F&& psi, TransformOptions opts = {}) {
    const TransformPlan plan = build_transform_plan(d, opts);
    SpectralSamples in = spectral_samples_from(plan, psi);
    const SpectralSamples back = forward(plan, inverse(plan, in));
    std::vector<double> num(plan.n_lambda()), den(plan.n_lambda());
    for (std::size_t i = 0; i < plan.n_lambda(); ++i) {
        const Cplx target = in.values[i] * plan.taper[i];
        const double w = plan.plancherel[i] * plan.lambda_panels.weights[i];
        num[i] = std::norm(back.values[i] - target) * w;
        den[i] = std::norm(target) * w;
    }
    const double d2 = pairwise_sum(den);
    if (d2 == 0.0) return 0.0;
    return std::sqrt(pairwise_sum(num) / d2);
}

}  // namespace drs
