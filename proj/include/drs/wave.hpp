#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "drs/common.hpp"
#include "drs/fit.hpp"
#include "drs/htype.hpp"
#include "drs/sampling.hpp"
#include "drs/spherical.hpp"
#include "drs/transform.hpp"

namespace drs {

enum class WaveKind { cosine, sinc };

// Regularized propagator symbols:
//   cosine: (1 + lambda^2)^{-alpha/2} cos(t lambda)
//   sinc:   (1 + lambda^2)^{-alpha/2} sin(t lambda) / lambda   (value t at 0)
// The sinc kind admits alpha down to -1: its free 1/lambda is worth one order.
struct WaveSymbol {
    WaveKind kind = WaveKind::cosine;
    double t = 0.0;
    double alpha = 0.0;

    double operator()(double lam) const {
        const double reg = std::pow(1.0 + lam * lam, -0.5 * alpha);
        if (kind == WaveKind::cosine) return reg * std::cos(t * lam);
        return reg * (lam == 0.0 ? t : std::sin(t * lam) / lam);
    }

    // decay order of the non-oscillatory amplitude
    double order() const { return kind == WaveKind::cosine ? -alpha : -alpha - 1.0; }

    // amplitude with the oscillation stripped; for sinc the 1/lambda tail is
    // folded in as a smooth (1+lambda^2)^{-1/2} factor
    double amplitude(double lam) const {
        return std::pow(1.0 + lam * lam, 0.5 * order());
    }
};

inline WaveSymbol wave_symbol(WaveKind kind, double t, double alpha) {
    require(std::isfinite(t) && std::isfinite(alpha), "wave_symbol: parameters must be finite");
    if (kind == WaveKind::cosine)
        require(alpha >= 0.0, "wave_symbol: cosine kind needs alpha >= 0");
    else
        require(alpha >= -1.0, "wave_symbol: sinc kind needs alpha >= -1");
    return WaveSymbol{kind, t, alpha};
}

// Sampled symbol-class seminorm of order sigma = symbol.order(): the largest
// (1+lambda)^{|sigma|+k} |d^k amplitude| over [0, lambda_max]. The scan runs
// on the amplitude: the oscillatory factor contributes powers of t, not decay,
// so the class membership statement is about the amplitude alone.
inline double symbol_seminorm(const WaveSymbol& sym, int k, double lambda_max,
                              int points = 129) {
    require(k >= 0 && k <= 2, "symbol_seminorm: k must be 0, 1, or 2");
    require(lambda_max > 0.0 && points >= 8, "symbol_seminorm: bad scan range");
    double worst = 0.0;
    for (int i = 0; i < points; ++i) {
        const double lam = lambda_max * i / (points - 1);
        const double h = 1e-3 * (1.0 + lam);
        double dk = 0.0;
        if (k == 0) {
            dk = sym.amplitude(lam);
        } else if (k == 1) {
            dk = (sym.amplitude(lam + h) - sym.amplitude(std::max(0.0, lam - h))) /
                 (h + std::min(lam, h));
        } else {
            const double lo = std::max(0.0, lam - h);
            dk = (sym.amplitude(lam + h) - 2.0 * sym.amplitude(lam) + sym.amplitude(lo)) /
                 (h * h);
        }
        worst = std::max(worst, std::pow(1.0 + lam, -sym.order() + k) * std::abs(dk));
    }
    return worst;
}

struct CriticalRegularity {
    double alpha0 = 0.0;
    double alpha1 = 0.0;
};

inline CriticalRegularity critical_regularity(int n, double p) {
    require(n >= 4, "critical_regularity: n must be >= 4");
    require(p > 1.0 && std::isfinite(p), "critical_regularity: p must lie in (1, inf)");
    const double a0 = (n - 1) * std::abs(1.0 / p - 0.5);
    return CriticalRegularity{a0, a0 - 1.0};
}

// L^1-type norm of the twist delta^{1/2} w(R(.)) against the right-invariant
// measure: nu_n * integral |w| phi_0 A dr.
inline double twisted_l1_norm(const TransformPlan& plan, const RadialSamples& w) {
    detail::require_on_plan_r_grid(plan, w, "twisted_l1_norm");
    PhiProfile phi0 = spherical_phi_profile(plan.dims, SpectralParam::real_axis(0.0),
                                            plan.r_panels.nodes);
    std::vector<double> terms(plan.n_r());
    for (std::size_t j = 0; j < plan.n_r(); ++j)
        terms[j] = std::abs(w.values[j]) * phi0.phi[j] * plan.a_density[j] *
                   plan.r_panels.weights[j];
    return plan.nu_n * pairwise_sum(terms);
}

// L^p(drho) norm of delta^{1/2} w(R(.)) by the sphere-average identity:
// the angular integral of delta^{p/2-1} is the spherical function at the
// imaginary parameter -i Q (p-1)/2, leaving a single radial quadrature.
inline double lp_norm_twisted(const TransformPlan& plan, const RadialSamples& w, double p) {
    detail::require_on_plan_r_grid(plan, w, "lp_norm_twisted");
    require(p >= 1.2 && p <= 6.0,
            "lp_norm_twisted: hypergeometric route supports p in [6/5, 6]");
    const SpectralParam lam = SpectralParam::imaginary_axis(-0.5 * plan.dims.q() * (p - 1.0));
    PhiProfile prof = spherical_phi_profile(plan.dims, lam, plan.r_panels.nodes);
    std::vector<double> terms(plan.n_r());
    for (std::size_t j = 0; j < plan.n_r(); ++j)
        terms[j] = std::pow(std::abs(w.values[j]), p) * prof.phi[j] * plan.a_density[j] *
                   plan.r_panels.weights[j];
    return std::pow(plan.nu_n * pairwise_sum(terms), 1.0 / p);
}

// Monte Carlo route: the sphere average of delta^{(p-2)/2} is estimated per
// radial node; nodes whose radial factor cannot move the total are skipped.
inline McEstimate lp_norm_twisted_mc(const DamekRicciSpace& sp, const TransformPlan& plan,
                                     const RadialSamples& w, double p,
                                     std::uint64_t samples_per_node, std::uint64_t seed) {
    detail::require_on_plan_r_grid(plan, w, "lp_norm_twisted_mc");
    require(p > 1.0 && std::isfinite(p), "lp_norm_twisted_mc: p must lie in (1, inf)");
    require(sp.structure.m_v == plan.dims.m_v && sp.structure.m_z == plan.dims.m_z,
            "lp_norm_twisted_mc: space and plan dimensions disagree");
    const double s = 0.5 * (p - 2.0);
    std::vector<double> base(plan.n_r());
    double scale = 0.0;
    for (std::size_t j = 0; j < plan.n_r(); ++j) {
        base[j] = std::pow(std::abs(w.values[j]), p) * plan.a_density[j] *
                  plan.r_panels.weights[j];
        scale = std::max(scale, std::abs(base[j]));
    }
    std::vector<double> terms(plan.n_r(), 0.0), var_terms(plan.n_r(), 0.0);
    std::uint64_t used = 0;
    for (std::size_t j = 0; j < plan.n_r(); ++j) {
        if (std::abs(base[j]) < 1e-18 * scale) continue;
        const McEstimate avg = sphere_average_modular_power_mc(
            sp, s, plan.r_panels.nodes[j], samples_per_node,
            seed + 0x9E3779B97F4A7C15ull * (j + 1));
        terms[j] = base[j] * avg.value;
        var_terms[j] = sq(base[j] * avg.std_error);
        used += avg.samples;
    }
    const double total = plan.nu_n * pairwise_sum(terms);
    const double se_total = plan.nu_n * std::sqrt(pairwise_sum(var_terms));
    const double value = std::pow(total, 1.0 / p);
    // delta method for the p-th root
    const double se = value / (p * total) * se_total;
    return McEstimate{value, se, used};
}

struct LpNormResult {
    double value = 0.0;
    double std_error = 0.0;  // zero for the quadrature route
    bool used_mc = false;
};

enum class LpMethod { automatic, hypergeometric, monte_carlo };

inline LpNormResult lp_norm_twisted(const DamekRicciSpace& sp, const TransformPlan& plan,
                                    const RadialSamples& w, double p,
                                    LpMethod method = LpMethod::automatic,
                                    std::uint64_t samples_per_node = 4096,
                                    std::uint64_t seed = 1) {
    const bool in_range = p >= 1.2 && p <= 6.0;
    if (method == LpMethod::hypergeometric ||
        (method == LpMethod::automatic && in_range))
        return LpNormResult{lp_norm_twisted(plan, w, p), 0.0, false};
    const McEstimate mc = lp_norm_twisted_mc(sp, plan, w, p, samples_per_node, seed);
    return LpNormResult{mc.value, mc.std_error, true};
}

// Kernel of a radial multiplier with taper-sensitivity reporting. The spectral
// integral is always taken at the plan's finite cutoff; sensitivity measures
// how much a 25% larger cutoff moves the kernel on a probe grid, which for
// critical-order symbols is the honest convergence statement.
struct KernelReport {
    RadialSamples kappa;
    double taper_sensitivity = 0.0;  // sup over probe radii of the cutoff shift
    double weighted_l1 = 0.0;        // integral |kappa| nu_n phi_0 A dr
};

template <class F>
KernelReport kernel_kappa(const SpaceDims& d, F&& psi, TransformOptions opts,
                          double max_sensitivity = std::numeric_limits<double>::infinity()) {
    const TransformPlan plan = build_transform_plan(d, opts);
    TransformOptions wider = opts;
    wider.lambda_max = 1.25 * opts.lambda_max;
    const TransformPlan plan_wide = build_transform_plan(d, wider);

    KernelReport rep;
    rep.kappa = inverse(plan, spectral_samples_from(plan, psi));
    rep.weighted_l1 = twisted_l1_norm(plan, rep.kappa);

    std::vector<double> probes;
    for (int k = 0; k <= 16; ++k)
        probes.push_back(0.02 * std::pow(opts.r_max / 0.02, k / 16.0));
    const RadialSamples a = inverse_at(plan, spectral_samples_from(plan, psi), probes);
    const RadialSamples b =
        inverse_at(plan_wide, spectral_samples_from(plan_wide, psi), probes);
    for (std::size_t k = 0; k < probes.size(); ++k)
        rep.taper_sensitivity =
            std::max(rep.taper_sensitivity, std::abs(a.values[k] - b.values[k]));
    require(rep.taper_sensitivity <= max_sensitivity,
            "kernel_kappa: taper sensitivity exceeds the requested bound");
    return rep;
}

// Twisted-radial wave solution at time t:
//   u_tilde = cos-symbol(alpha0) applied to f_tilde + sinc-symbol(alpha1)
//   applied to g_tilde,
// each through the multiplier calculus; u on the group is delta^{1/2} u_tilde.
// Pass an empty g_tilde for cosine-only data.
inline RadialSamples solve_wave_twisted_radial(const TransformPlan& plan,
                                               const RadialSamples& f_tilde,
                                               const RadialSamples& g_tilde, double t,
                                               double alpha0, double alpha1) {
    RadialSamples out = multiplier_apply(plan, wave_symbol(WaveKind::cosine, t, alpha0),
                                         f_tilde);
    if (!g_tilde.values.empty()) {
        const RadialSamples vel =
            multiplier_apply(plan, wave_symbol(WaveKind::sinc, t, alpha1), g_tilde);
        for (std::size_t j = 0; j < out.values.size(); ++j) out.values[j] += vel.values[j];
    }
    return out;
}

struct WaveSolutionReport {
    std::vector<double> t_values;
    double p = 2.0;
    std::vector<double> norms;  // ||delta^{1/2} u_tilde(t)||_{L^p(drho)}
    double fitted_exponent = 0.0;
    double fit_residual = 0.0;
    double alpha0 = 0.0;
    double alpha1 = 0.0;
};

// Cosine-data L^p growth run: propagate f_tilde to each time, measure the
// twisted L^p norm, fit norm ~ (1+t)^gamma. For alpha0 = 0 the spectral L^2
// norm must contract (|cos| <= 1); that is asserted on every run.
inline WaveSolutionReport wave_lp_growth_report(const TransformPlan& plan,
                                                const RadialSamples& f_tilde, double p,
                                                double alpha0,
                                                std::vector<double> t_values) {
    require(t_values.size() >= 4, "wave_lp_growth_report: need at least 4 times");
    WaveSolutionReport rep;
    rep.t_values = std::move(t_values);
    rep.p = p;
    rep.alpha0 = alpha0;
    rep.alpha1 = alpha0 - 1.0;

    const SpectralSamples hat = forward(plan, f_tilde);
    const double data_norm = spectral_l2_norm(plan, hat);
    rep.norms.reserve(rep.t_values.size());
    for (double t : rep.t_values) {
        const WaveSymbol sym = wave_symbol(WaveKind::cosine, t, alpha0);
        SpectralSamples moved = hat;
        for (std::size_t i = 0; i < moved.values.size(); ++i)
            moved.values[i] *= sym(moved.lambda_grid[i]);
        if (alpha0 == 0.0)
            require(spectral_l2_norm(plan, moved) <= data_norm * (1.0 + 1e-12),
                    "wave_lp_growth_report: cosine propagation failed to contract");
        rep.norms.push_back(lp_norm_twisted(plan, inverse(plan, moved), p));
    }
    const GrowthFit fit = growth_exponent_fit(rep.t_values, rep.norms);
    rep.fitted_exponent = fit.exponent;
    rep.fit_residual = fit.rms_residual;
    return rep;
}

// Two routes to the spherical mean of f = delta^{1/2} w(R(.)) over the
// distance-t sphere centered at z: the radial multiplier phi_lambda(t) on the
// spectral side against a direct Monte Carlo group-translation average.
struct SphericalMeanCheck {
    double lhs = 0.0;  // spectral route
    double rhs = 0.0;  // Monte Carlo route
    double mc_error = 0.0;
};

template <class W>
SphericalMeanCheck spherical_mean_check(const DamekRicciSpace& sp, const TransformPlan& plan,
                                        double t, W&& w, const GroupPoint& z,
                                        std::uint64_t samples, std::uint64_t seed) {
    require(sp.structure.m_v == plan.dims.m_v && sp.structure.m_z == plan.dims.m_z,
            "spherical_mean_check: space and plan dimensions disagree");
    require(t > 0.0, "spherical_mean_check: t must be > 0");

    SpectralSamples hat = forward(plan, radial_samples_from(plan, w));
    const SpectralSamples pm = forward(plan, PointMass{t});
    for (std::size_t i = 0; i < hat.values.size(); ++i)
        hat.values[i] *= pm.values[i].real();
    const double r_z = distance_to_identity(sp, z);
    const double u_at = inverse_at(plan, hat, {r_z}).values[0].real();

    SphericalMeanCheck out;
    out.lhs = std::pow(z.a, -0.5 * sp.Q) * u_at;
    const McEstimate mc = mc_sphere_average(
        sp.structure.m_v, sp.structure.m_z, t, samples, seed,
        [&](const SphereDirection& om) {
            const GroupPoint x = polar_point(sp, t, om);
            const GroupPoint y = group_mul(sp, z, x);
            return std::pow(x.a, 0.5 * sp.Q) * std::pow(y.a, -0.5 * sp.Q) *
                   w(distance_to_identity(sp, y));
        });
    out.rhs = mc.value;
    out.mc_error = mc.std_error;
    return out;
}

// Hardy-space building blocks: a = delta^{1/2} w(R(.)) with w supported in
// [0, radius], normalized to the ball-volume size condition; standard atoms
// additionally carry zero mean against drho.
enum class AtomKind { standard, global };

struct Atom {
    RadialSamples profile;  // the radial factor w on the plan grid
    double ball_radius = 1.0;
    AtomKind kind = AtomKind::standard;
};

// Volume of the distance ball under the right-invariant measure: the angular
// average of delta^{-1} is identically 1, so rho(B_beta) = nu_n int_0^beta A.
inline double ball_volume(const SpaceDims& d, double beta) {
    require(beta > 0.0, "ball_volume: radius must be > 0");
    const PanelGrid g = panels_from_edges(uniform_edges(0.0, beta, beta / 8.0), 16);
    return sphere_surface_area(d.n()) *
           integrate_fn(g, [&](double r) { return volume_density(d, r); });
}

inline Atom make_twisted_atom(const TransformPlan& plan, double radius, AtomKind kind,
                              std::uint64_t shape_seed) {
    require(radius > 0.0 && radius <= 1.0, "make_twisted_atom: radius must lie in (0, 1]");
    Rng rng(shape_seed, 0);
    const double xi1 = 1.2 * rng.uniform() - 0.6;
    const double xi2 = 1.2 * rng.uniform() - 0.6;
    auto bump = [&](double r) {
        const double q = sq(r / radius);
        if (q >= 1.0) return 0.0;
        return std::exp(-q / (1.0 - q));
    };

    Atom atom;
    atom.ball_radius = radius;
    atom.kind = kind;
    atom.profile = radial_samples_from(
        plan, [&](double r) { return bump(r) * (1.0 + (xi1 + xi2 * sq(r / radius)) * sq(r / radius)); });

    if (kind == AtomKind::standard) {
        // cancel the drho-mean by projecting out a same-support companion;
        // both pairings are against the nu_n phi_0 A weight
        PhiProfile phi0 = spherical_phi_profile(plan.dims, SpectralParam::real_axis(0.0),
                                                plan.r_panels.nodes);
        std::vector<double> num(plan.n_r()), den(plan.n_r());
        std::vector<double> companion(plan.n_r());
        for (std::size_t j = 0; j < plan.n_r(); ++j) {
            const double r = plan.r_panels.nodes[j];
            companion[j] = bump(r) * sq(r / radius);
            const double w_j = phi0.phi[j] * plan.a_density[j] * plan.r_panels.weights[j];
            num[j] = atom.profile.values[j].real() * w_j;
            den[j] = companion[j] * w_j;
        }
        const double c = pairwise_sum(num) / pairwise_sum(den);
        for (std::size_t j = 0; j < plan.n_r(); ++j)
            atom.profile.values[j] -= c * companion[j];
    }

    const double target = 1.0 / std::sqrt(ball_volume(plan.dims, radius));
    const double norm = lp_norm_twisted(plan, atom.profile, 2.0);
    require(norm > 0.0, "make_twisted_atom: degenerate profile");
    for (Cplx& v : atom.profile.values) v *= target / norm;
    return atom;
}

// Residual mean of an atom against drho (zero for standard atoms).
inline double atom_cancellation(const TransformPlan& plan, const Atom& atom) {
    PhiProfile phi0 = spherical_phi_profile(plan.dims, SpectralParam::real_axis(0.0),
                                            plan.r_panels.nodes);
    std::vector<double> terms(plan.n_r());
    for (std::size_t j = 0; j < plan.n_r(); ++j)
        terms[j] = atom.profile.values[j].real() * phi0.phi[j] * plan.a_density[j] *
                   plan.r_panels.weights[j];
    return plan.nu_n * pairwise_sum(terms);
}

// Empirical L^1 growth probe: propagate a batch of random standard atoms with
// the alpha-regularized cosine flow and report ||u(t)||_{L^1(drho)} / (1+t)
// per atom and time. The table records data; interpretation thresholds live
// with the caller.
struct AtomProbeTable {
    double alpha = 0.0;
    std::vector<double> t_values;
    std::vector<std::vector<double>> ratios;  // [atom][time]
    std::vector<double> max_ratio;            // over atoms, per time
    double spread = 0.0;                      // max over time / min over time of max_ratio
};

inline AtomProbeTable atom_growth_probe(const TransformPlan& plan, double alpha,
                                        std::vector<double> t_values, int n_atoms,
                                        std::uint64_t seed) {
    require(n_atoms >= 1, "atom_growth_probe: need at least one atom");
    require(!t_values.empty(), "atom_growth_probe: need at least one time");
    AtomProbeTable table;
    table.alpha = alpha;
    table.t_values = std::move(t_values);

    PhiProfile phi0 = spherical_phi_profile(plan.dims, SpectralParam::real_axis(0.0),
                                            plan.r_panels.nodes);
    std::vector<double> weight(plan.n_r());
    for (std::size_t j = 0; j < plan.n_r(); ++j)
        weight[j] = phi0.phi[j] * plan.a_density[j] * plan.r_panels.weights[j];

    table.max_ratio.assign(table.t_values.size(), 0.0);
    for (int k = 0; k < n_atoms; ++k) {
        const double radius = 0.35 + 0.65 * (k + 0.5) / n_atoms;
        const Atom atom = make_twisted_atom(plan, radius, AtomKind::standard, seed + 17 * k);
        const SpectralSamples hat = forward(plan, atom.profile);
        std::vector<double> row;
        row.reserve(table.t_values.size());
        for (std::size_t m = 0; m < table.t_values.size(); ++m) {
            const WaveSymbol sym = wave_symbol(WaveKind::cosine, table.t_values[m], alpha);
            SpectralSamples moved = hat;
            for (std::size_t i = 0; i < moved.values.size(); ++i)
                moved.values[i] *= sym(moved.lambda_grid[i]);
            const RadialSamples u = inverse(plan, moved);
            std::vector<double> terms(plan.n_r());
            for (std::size_t j = 0; j < plan.n_r(); ++j)
                terms[j] = std::abs(u.values[j]) * weight[j];
            const double l1 = plan.nu_n * pairwise_sum(terms);
            const double ratio = l1 / (1.0 + table.t_values[m]);
            row.push_back(ratio);
            table.max_ratio[m] = std::max(table.max_ratio[m], ratio);
        }
        table.ratios.push_back(std::move(row));
    }
    const auto [lo, hi] = std::minmax_element(table.max_ratio.begin(), table.max_ratio.end());
    table.spread = *hi / std::max(*lo, 1e-300);
    return table;
}

}  // namespace drs
