#pragma once

// Validation suites. Each suite bundles the checks for one acceptance
// criterion A1..A11 of this artifact; the same runners back the CLI
// `validate` subcommand and the standalone acceptance binary. Thresholds are
// pinned here, next to the criterion tag they trace to; statuses are derived
// mechanically from value vs threshold, never assigned freehand.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "drs/fit.hpp"
#include "drs/sampling.hpp"
#include "drs/serialize.hpp"
#include "drs/spherical.hpp"

namespace drs {

enum class CheckStatus { pass, fail, info };

inline const char* status_name(CheckStatus s) {
    switch (s) {
        case CheckStatus::pass: return "pass";
        case CheckStatus::fail: return "fail";
        default: return "info";
    }
}

struct CheckResult {
    std::string criterion;  // "A1".."A11"
    std::string name;
    CheckStatus status = CheckStatus::info;
    double value = 0.0;
    double threshold = 0.0;
    std::string cmp = "<=";  // pass iff value cmp threshold
    double runtime_s = 0.0;
};

struct SuiteResult {
    std::string suite;
    std::vector<CheckResult> checks;
    double runtime_s = 0.0;

    CheckStatus aggregate() const {
        CheckStatus agg = CheckStatus::pass;
        for (const CheckResult& c : checks) {
            if (c.status == CheckStatus::fail) return CheckStatus::fail;
            if (c.status == CheckStatus::info) agg = CheckStatus::info;
        }
        return agg;
    }
};

namespace detail {

inline CheckResult check_le(std::string criterion, std::string name, double value,
                            double threshold) {
    CheckResult c;
    c.criterion = std::move(criterion);
    c.name = std::move(name);
    c.value = value;
    c.threshold = threshold;
    c.cmp = "<=";
    c.status = (std::isfinite(value) && value <= threshold) ? CheckStatus::pass
                                                            : CheckStatus::fail;
    return c;
}

// Window check with a documented informational band: pass below `threshold`,
// info up to `info_cap`, fail above.
inline CheckResult check_window(std::string criterion, std::string name, double value,
                                double threshold, double info_cap) {
    CheckResult c = check_le(std::move(criterion), std::move(name), value, threshold);
    if (c.status == CheckStatus::fail && std::isfinite(value) && value <= info_cap)
        c.status = CheckStatus::info;
    return c;
}

class BlockTimer {
  public:
    BlockTimer() : start_(std::chrono::steady_clock::now()) {}
    double lap() {
        const auto now = std::chrono::steady_clock::now();
        const double s = std::chrono::duration<double>(now - start_).count();
        start_ = now;
        return s;
    }

  private:
    std::chrono::steady_clock::time_point start_;
};

inline void stamp(std::vector<CheckResult>& checks, std::size_t from, double seconds) {
    for (std::size_t i = from; i < checks.size(); ++i) checks[i].runtime_s = seconds;
}

inline GroupPoint random_point(const DamekRicciSpace& sp, Rng& rng) {
    GroupPoint x = identity_point(sp);
    for (auto& c : x.v) c = 2.0 * rng.uniform() - 1.0;
    for (auto& c : x.z) c = 2.0 * rng.uniform() - 1.0;
    x.a = std::exp(1.2 * (2.0 * rng.uniform() - 1.0));
    return x;
}

inline SphereDirection random_direction(int m_v, int m_z, Rng& rng) {
    SphereDirection w;
    w.v_part.resize(static_cast<std::size_t>(m_v));
    w.z_part.resize(static_cast<std::size_t>(m_z));
    double n2 = 0.0;
    do {
        for (auto& c : w.v_part) c = rng.normal();
        for (auto& c : w.z_part) c = rng.normal();
        w.b = rng.normal();
        n2 = norm_sq(w.v_part) + norm_sq(w.z_part) + w.b * w.b;
    } while (n2 < 1e-12);
    const double inv = 1.0 / std::sqrt(n2);
    for (auto& c : w.v_part) c *= inv;
    for (auto& c : w.z_part) c *= inv;
    w.b *= inv;
    return w;
}

inline double point_deviation(const GroupPoint& x, const GroupPoint& y) {
    double dev = std::abs(x.a - y.a);
    for (std::size_t i = 0; i < x.v.size(); ++i)
        dev = std::max(dev, std::abs(x.v[i] - y.v[i]));
    for (std::size_t i = 0; i < x.z.size(); ++i)
        dev = std::max(dev, std::abs(x.z[i] - y.z[i]));
    return dev;
}

inline double clifford_residual(const HTypeStructure& s) {
    double worst = 0.0;
    for (int i = 0; i < s.m_z; ++i) {
        for (int j = i; j < s.m_z; ++j) {
            const Mat& Ji = s.j_maps[static_cast<std::size_t>(i)];
            const Mat& Jj = s.j_maps[static_cast<std::size_t>(j)];
            for (int r = 0; r < s.m_v; ++r) {
                for (int c = 0; c < s.m_v; ++c) {
                    double anti = 0.0;
                    for (int k = 0; k < s.m_v; ++k)
                        anti += Ji(r, k) * Jj(k, c) + Jj(r, k) * Ji(k, c);
                    const double target = (i == j && r == c) ? -2.0 : 0.0;
                    worst = std::max(worst, std::abs(anti - target));
                    if (i == j) worst = std::max(worst, std::abs(Ji(r, c) + Ji(c, r)));
                }
            }
        }
    }
    return worst;
}

inline std::vector<double> geometric_grid(double lo, double hi, int count) {
    std::vector<double> xs;
    for (int i = 0; i < count; ++i)
        xs.push_back(lo * std::pow(hi / lo, double(i) / (count - 1)));
    return xs;
}

inline TransformOptions suite_grid(double lambda_max, double r_max, double t_max) {
    TransformOptions o;
    o.lambda_max = lambda_max;
    o.r_max = r_max;
    o.t_max = t_max;
    o.tail_tol = 1e-3;
    return o;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// A1: group axioms, Clifford relations, modular homomorphism, polar roundtrip
// ---------------------------------------------------------------------------

inline SuiteResult run_suite_geometry(const RunConfig& cfg) {
    SuiteResult out;
    out.suite = "geometry";
    detail::BlockTimer total;

    const std::pair<const char*, HTypeStructure> spaces[] = {
        {"heisenberg", heisenberg_structure(1)}, {"quaternionic", quaternionic_structure(1)}};
    for (const auto& [label, structure] : spaces) {
        const DamekRicciSpace sp = make_space(structure);
        Rng rng(cfg.seed, 17);
        detail::BlockTimer block;
        const std::size_t first = out.checks.size();

        double assoc = 0.0, inv = 0.0, hom = 0.0;
        for (int trial = 0; trial < 48; ++trial) {
            const GroupPoint x = detail::random_point(sp, rng);
            const GroupPoint y = detail::random_point(sp, rng);
            const GroupPoint z = detail::random_point(sp, rng);
            assoc = std::max(assoc,
                             detail::point_deviation(group_mul(sp, group_mul(sp, x, y), z),
                                                     group_mul(sp, x, group_mul(sp, y, z))));
            inv = std::max(inv, detail::point_deviation(group_mul(sp, x, group_inv(sp, x)),
                                                        identity_point(sp)));
            hom = std::max(hom, std::abs(modular(sp, group_mul(sp, x, y)) -
                                         modular(sp, x) * modular(sp, y)) /
                                    (modular(sp, x) * modular(sp, y)));
        }
        double polar = 0.0;
        for (double R : {0.1, 1.0, 5.0, 12.0})
            for (int trial = 0; trial < 16; ++trial) {
                const SphereDirection w =
                    detail::random_direction(sp.structure.m_v, sp.structure.m_z, rng);
                polar = std::max(
                    polar, std::abs(distance_to_identity(sp, polar_point(sp, R, w)) - R));
            }

        const std::string p = std::string(label) + ".";
        out.checks.push_back(detail::check_le("A1", p + "associativity", assoc, 1e-12));
        out.checks.push_back(detail::check_le("A1", p + "inverse", inv, 1e-12));
        out.checks.push_back(detail::check_le("A1", p + "clifford-relations",
                                              detail::clifford_residual(sp.structure), 1e-12));
        out.checks.push_back(detail::check_le("A1", p + "modular-homomorphism", hom, 1e-12));
        out.checks.push_back(detail::check_le("A1", p + "polar-roundtrip", polar, 1e-10));
        detail::stamp(out.checks, first, block.lap());
    }

    out.runtime_s = total.lap();
    out.checks.push_back(detail::check_le("A1", "runtime-seconds", out.runtime_s, 30.0));
    return out;
}

// ---------------------------------------------------------------------------
// A2: spherical-function normalization, bound, derivative routes
// ---------------------------------------------------------------------------

inline SuiteResult run_suite_spherical(const RunConfig&) {
    SuiteResult out;
    out.suite = "spherical";
    detail::BlockTimer total;
    const SpaceDims d{2, 1};

    detail::BlockTimer block;
    double at_zero = 0.0;
    for (int i = 0; i < 20; ++i)
        at_zero = std::max(at_zero, std::abs(spherical_phi(d, SpectralParam::real_axis(2.0 * i),
                                                           0.0) - 1.0));
    for (double im : {0.5, 1.5, -2.0})
        at_zero = std::max(at_zero, std::abs(spherical_phi(d, SpectralParam::imaginary_axis(im),
                                                           0.0) - 1.0));
    out.checks.push_back(detail::check_le("A2", "normalization-at-zero", at_zero, 1e-12));
    detail::stamp(out.checks, out.checks.size() - 1, block.lap());

    std::vector<double> rs;
    for (int j = 1; j <= 50; ++j) rs.push_back(0.24 * j);
    const PhiProfile base = spherical_phi_profile(d, SpectralParam::real_axis(0.0), rs);
    double excess = -1.0;
    for (int i = 1; i <= 50; ++i) {
        const PhiProfile prof = spherical_phi_profile(d, SpectralParam::real_axis(0.5 * i), rs);
        for (std::size_t j = 0; j < rs.size(); ++j)
            excess = std::max(excess, std::abs(prof.phi[j]) - base.phi[j]);
    }
    out.checks.push_back(detail::check_le("A2", "bounded-by-phi0", excess, 1e-12));
    detail::stamp(out.checks, out.checks.size() - 1, block.lap());

    double fd_rel = 0.0;
    for (double lam : {0.7, 2.1, 5.3})
        for (double r : {0.4, 1.7, 6.0}) {
            const SpectralParam sl = SpectralParam::real_axis(lam);
            const double h = 1e-5;
            const double fd =
                (spherical_phi(d, sl, r + h) - spherical_phi(d, sl, r - h)) / (2.0 * h);
            const double an = spherical_phi_dr(d, sl, r);
            fd_rel = std::max(fd_rel, std::abs(fd - an) / std::abs(an));
        }
    out.checks.push_back(detail::check_le("A2", "derivative-vs-fd", fd_rel, 1e-6));
    detail::stamp(out.checks, out.checks.size() - 1, block.lap());

    // The profile sweep carries its own derivative state; the standalone
    // derivative goes through the enlarged-parameter identity instead.
    double route_rel = 0.0;
    const std::vector<double> small_r = {0.2, 0.5, 0.9};
    for (double lam : {0.7, 3.0}) {
        const PhiProfile prof =
            spherical_phi_profile(d, SpectralParam::real_axis(lam), small_r);
        for (std::size_t j = 0; j < small_r.size(); ++j) {
            const double an = spherical_phi_dr(d, SpectralParam::real_axis(lam), small_r[j]);
            route_rel = std::max(route_rel, std::abs(prof.dphi[j] - an) / std::abs(an));
        }
    }
    out.checks.push_back(detail::check_le("A2", "derivative-route-consistency", route_rel, 1e-12));
    detail::stamp(out.checks, out.checks.size() - 1, block.lap());

    out.runtime_s = total.lap();
    out.checks.push_back(detail::check_le("A2", "runtime-seconds", out.runtime_s, 120.0));
    return out;
}

// ---------------------------------------------------------------------------
// A3: Plancherel density growth rate and the |c| asymptote
// ---------------------------------------------------------------------------

inline SuiteResult run_suite_cfunction(const RunConfig&) {
    SuiteResult out;
    out.suite = "cfunction";
    detail::BlockTimer total;

    const std::pair<const char*, SpaceDims> spaces[] = {{"heisenberg", SpaceDims{2, 1}},
                                                        {"quaternionic", SpaceDims{4, 3}}};
    for (const auto& [label, d] : spaces) {
        detail::BlockTimer block;
        const std::size_t first = out.checks.size();
        const std::vector<double> lams = detail::geometric_grid(50.0, 500.0, 40);
        std::vector<double> dens;
        for (double l : lams) dens.push_back(plancherel_density(d, l));
        const LinearFit fit = loglog_fit(lams, dens);
        const std::string p = std::string(label) + ".";
        out.checks.push_back(detail::check_le("A3", p + "density-slope-error",
                                              std::abs(fit.slope - (d.n() - 1)), 0.05));

        const double K = std::pow(2.0, d.q() - 1.0) * std::tgamma(0.5 * d.n()) /
                         std::sqrt(std::acos(-1.0));
        const double measured =
            std::abs(c_function(d, 200.0)) * std::pow(200.0, 0.5 * (d.n() - 1));
        out.checks.push_back(detail::check_le("A3", p + "asymptote-rel-error",
                                              std::abs(measured - K) / K, 0.01));
        detail::stamp(out.checks, first, block.lap());
    }

    out.runtime_s = total.lap();
    out.checks.push_back(detail::check_le("A3", "runtime-seconds", out.runtime_s, 10.0));
    return out;
}

// ---------------------------------------------------------------------------
// A4: long-time remainder decay (value and radial derivative)
// ---------------------------------------------------------------------------

inline SuiteResult run_suite_long_time(const RunConfig&) {
    SuiteResult out;
    out.suite = "long-time";
    detail::BlockTimer total;
    const SpaceDims d{2, 1};

    for (double t : {2.0, 4.0}) {
        detail::BlockTimer block;
        const ExpansionReport rep = long_time_expansion_report(d, t);
        out.checks.push_back(detail::check_le("A4",
                                              "envelope-slope-t" + format_double(t),
                                              rep.envelope_fit.slope, -2.2));
        detail::stamp(out.checks, out.checks.size() - 1, block.lap());
    }
    detail::BlockTimer block;
    const ExpansionReport drep = long_time_derivative_report(d, 2.0);
    out.checks.push_back(
        detail::check_le("A4", "derivative-envelope-slope-t2", drep.envelope_fit.slope, -1.2));
    detail::stamp(out.checks, out.checks.size() - 1, block.lap());

    out.runtime_s = total.lap();
    out.checks.push_back(detail::check_le("A4", "runtime-seconds", out.runtime_s, 300.0));
    return out;
}

// ---------------------------------------------------------------------------
// A5: short-time remainder decay and the Bessel leading form
// ---------------------------------------------------------------------------

inline SuiteResult run_suite_short_time(const RunConfig&) {
    SuiteResult out;
    out.suite = "short-time";
    detail::BlockTimer total;
    const SpaceDims d{2, 1};

    const ExpansionReport rep = short_time_expansion_report(d, 0.5);
    out.checks.push_back(
        detail::check_le("A5", "envelope-slope-t0.5", rep.envelope_fit.slope, -2.2));

    // Both leading forms approximate the same oscillation; at a phase
    // extremum with lambda*t near 100 they agree to ~1e-5.
    const double t = 0.5;
    const double lam = (0.75 + 31.0) * std::acos(-1.0) / t;
    const double rel = std::abs(hc_leading(d, t, lam) - bessel_leading(d, t, lam)) /
                       std::abs(hc_leading(d, t, lam));
    out.checks.push_back(detail::check_le("A5", "bessel-crosscheck", rel, 1e-4));

    out.runtime_s = total.lap();
    detail::stamp(out.checks, 0, out.runtime_s);
    out.checks.push_back(detail::check_le("A5", "runtime-seconds", out.runtime_s, 300.0));
    return out;
}

// ---------------------------------------------------------------------------
// A6: transform roundtrip and sphere-measure calibration
// ---------------------------------------------------------------------------

inline SuiteResult run_suite_transform(const RunConfig&) {
    SuiteResult out;
    out.suite = "transform";
    detail::BlockTimer total;
    auto psi = [](double l) { return std::exp(-l * l); };
    const TransformOptions opts = detail::suite_grid(12.0, 12.0, 0.0);

    detail::BlockTimer block;
    out.checks.push_back(detail::check_le(
        "A6", "roundtrip-heisenberg", roundtrip_error(SpaceDims{2, 1}, psi, opts), 1e-6));
    detail::stamp(out.checks, out.checks.size() - 1, block.lap());
    out.checks.push_back(detail::check_le(
        "A6", "roundtrip-quaternionic", roundtrip_error(SpaceDims{4, 3}, psi, opts), 1e-4));
    detail::stamp(out.checks, out.checks.size() - 1, block.lap());

    // Transforming the unit sphere measure of radius t must reproduce the
    // spherical-function column at a grid node.
    const TransformPlan plan = build_transform_plan(SpaceDims{2, 1}, opts);
    const std::size_t j = plan.n_r() / 2;
    const SpectralSamples pm = forward(plan, PointMass{plan.r_panels.nodes[j]});
    double dev = 0.0;
    for (std::size_t i = 0; i < plan.n_lambda(); ++i)
        dev = std::max(dev, std::abs(pm.values[i] - plan.phi[i * plan.n_r() + j]));
    out.checks.push_back(detail::check_le("A6", "sphere-measure-calibration", dev, 1e-8));
    detail::stamp(out.checks, out.checks.size() - 1, block.lap());

    out.runtime_s = total.lap();
    out.checks.push_back(detail::check_le("A6", "runtime-seconds", out.runtime_s, 120.0));
    return out;
}

// ---------------------------------------------------------------------------
// A7: sphere averages of modular powers, two routes + ratio window
// ---------------------------------------------------------------------------

inline SuiteResult run_suite_sphere_average(const RunConfig& cfg) {
    SuiteResult out;
    out.suite = "sphere-average";
    detail::BlockTimer total;
    const DamekRicciSpace sp = make_space(heisenberg_structure(1));
    const SpaceDims d = sp.dims();

    detail::BlockTimer block;
    double worst_sigma = 0.0;
    std::uint64_t stream = 101;
    for (double s : {-0.5, 0.25, 1.0})
        for (double R : {0.5, 3.0, 6.0}) {
            const double hyp = sphere_average_modular_power(d, s, R);
            const McEstimate mc =
                sphere_average_modular_power_mc(sp, s, R, 1000000, cfg.seed + stream++);
            worst_sigma = std::max(worst_sigma, std::abs(hyp - mc.value) / mc.std_error);
        }
    out.checks.push_back(detail::check_le("A7", "identity-max-sigma", worst_sigma, 3.0));
    detail::stamp(out.checks, out.checks.size() - 1, block.lap());

    // normalized averages of |d/dR| of the modular square root: the
    // compensated ratio stays within a fixed window over R in [1, 10]
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    stream = 201;
    for (double R : {1.0, 1.5, 2.0, 3.0, 4.0, 5.0, 6.5, 8.0, 10.0}) {
        const McEstimate est =
            sphere_average_abs_dR_modular_sqrt(sp, R, 200000, cfg.seed + stream++);
        const double w = est.value * std::exp(0.5 * sp.Q * R) / R;
        lo = std::min(lo, w);
        hi = std::max(hi, w);
    }
    out.checks.push_back(detail::check_le("A7", "derivative-ratio-window", hi / lo, 5.0));
    detail::stamp(out.checks, out.checks.size() - 1, block.lap());

    out.runtime_s = total.lap();
    out.checks.push_back(detail::check_le("A7", "runtime-seconds", out.runtime_s, 600.0));
    return out;
}

// ---------------------------------------------------------------------------
// A8: L2 energy conservation of the wave flow
// ---------------------------------------------------------------------------

inline SuiteResult run_suite_wave_energy(const RunConfig& cfg) {
    SuiteResult out;
    out.suite = "wave-energy";
    detail::BlockTimer total;

    const TransformPlan plan =
        build_transform_plan(SpaceDims{2, 1}, detail::suite_grid(16.0, 24.0, 20.0));
    const double w = cfg.data_width;
    const RadialSamples f = radial_samples_from(
        plan, [w](double r) { return std::exp(-r * r / (2.0 * w * w)); });
    const WaveSolutionReport rep =
        wave_lp_growth_report(plan, f, 2.0, 0.0, detail::geometric_grid(2.0, 20.0, 8));
    out.checks.push_back(
        detail::check_le("A8", "exponent-magnitude", std::abs(rep.fitted_exponent), 0.02));

    out.runtime_s = total.lap();
    detail::stamp(out.checks, 0, out.runtime_s);
    out.checks.push_back(detail::check_le("A8", "runtime-seconds", out.runtime_s, 300.0));
    return out;
}

// ---------------------------------------------------------------------------
// A9: Lp growth-rate bound and duality symmetry above critical regularity
// ---------------------------------------------------------------------------

inline SuiteResult run_suite_wave_rate(const RunConfig& cfg) {
    SuiteResult out;
    out.suite = "wave-rate";
    detail::BlockTimer total;

    // Fitted past the bulk-filling transient (see docs/csv_schema.md): the
    // dual pair saturates by t ~ 14, so the window starts at 8.
    const TransformPlan plan =
        build_transform_plan(SpaceDims{2, 1}, detail::suite_grid(16.0, 30.0, 26.0));
    const double w = cfg.data_width;
    const RadialSamples f = radial_samples_from(
        plan, [w](double r) { return std::exp(-r * r / (2.0 * w * w)); });
    const std::vector<double> ts = detail::geometric_grid(8.0, 26.0, 8);
    const double alpha = critical_regularity(4, 4.0).alpha0 + 0.1;
    const WaveSolutionReport r4 = wave_lp_growth_report(plan, f, 4.0, alpha, ts);
    const WaveSolutionReport r43 = wave_lp_growth_report(plan, f, 4.0 / 3.0, alpha, ts);
    const double cap = 2.0 * std::abs(0.25 - 0.5) + 0.15;
    out.checks.push_back(detail::check_le("A9", "rate-p4", r4.fitted_exponent, cap));
    out.checks.push_back(detail::check_le("A9", "rate-p4over3", r43.fitted_exponent, cap));
    out.checks.push_back(detail::check_le(
        "A9", "duality-gap", std::abs(r4.fitted_exponent - r43.fitted_exponent), 0.05));

    out.runtime_s = total.lap();
    detail::stamp(out.checks, 0, out.runtime_s);
    out.checks.push_back(detail::check_le("A9", "runtime-seconds", out.runtime_s, 1200.0));
    return out;
}

// ---------------------------------------------------------------------------
// A10: spherical-mean identity, spectral route vs group-side sampling
// ---------------------------------------------------------------------------

inline SuiteResult run_suite_spherical_mean(const RunConfig& cfg) {
    SuiteResult out;
    out.suite = "spherical-mean";
    detail::BlockTimer total;

    const DamekRicciSpace sp = make_space(heisenberg_structure(1));
    const TransformPlan plan =
        build_transform_plan(SpaceDims{2, 1}, detail::suite_grid(16.0, 24.0, 20.0));
    GroupPoint e = identity_point(sp);
    GroupPoint shifted = identity_point(sp);
    shifted.v[0] = 1.0;

    double worst_sigma = 0.0;
    std::uint64_t stream = 301;
    for (double t : {1.0, 3.0})
        for (const GroupPoint* z : {&e, &shifted}) {
            const SphericalMeanCheck c = spherical_mean_check(
                sp, plan, t, [](double r) { return std::exp(-r * r); }, *z, 1000000,
                cfg.seed + stream++);
            worst_sigma = std::max(worst_sigma, std::abs(c.lhs - c.rhs) / c.mc_error);
        }
    out.checks.push_back(detail::check_le("A10", "two-route-max-sigma", worst_sigma, 3.0));

    out.runtime_s = total.lap();
    detail::stamp(out.checks, 0, out.runtime_s);
    out.checks.push_back(detail::check_le("A10", "runtime-seconds", out.runtime_s, 600.0));
    return out;
}

// ---------------------------------------------------------------------------
// A11: atom conditions and the critical-order growth probe
// ---------------------------------------------------------------------------

inline SuiteResult run_suite_atoms(const RunConfig& cfg) {
    SuiteResult out;
    out.suite = "atoms";
    detail::BlockTimer total;

    const TransformPlan plan =
        build_transform_plan(SpaceDims{2, 1}, detail::suite_grid(16.0, 24.0, 20.0));

    detail::BlockTimer block;
    double size_dev = 0.0, cancel = 0.0, outside = 0.0;
    for (double radius : {1.0, 0.4}) {
        const Atom atom =
            make_twisted_atom(plan, radius, AtomKind::standard, cfg.seed + 900);
        size_dev = std::max(size_dev,
                            std::abs(lp_norm_twisted(plan, atom.profile, 2.0) *
                                         std::sqrt(ball_volume(plan.dims, radius)) -
                                     1.0));
        cancel = std::max(cancel, std::abs(atom_cancellation(plan, atom)));
        for (std::size_t j = 0; j < plan.n_r(); ++j)
            if (plan.r_panels.nodes[j] > radius)
                outside = std::max(outside, std::abs(atom.profile.values[j]));
    }
    out.checks.push_back(detail::check_le("A11", "size-normalization", size_dev, 1e-8));
    out.checks.push_back(detail::check_le("A11", "cancellation", cancel, 1e-8));
    out.checks.push_back(detail::check_le("A11", "support", outside, 0.0));
    detail::stamp(out.checks, 0, block.lap());

    // Critical-order L1 ratio window: 2x is the pass band; up to 4x is
    // reported as informational, consistent with a bounded ratio reached
    // through a slow transient.
    const AtomProbeTable probe =
        atom_growth_probe(plan, 1.5, detail::geometric_grid(2.0, 20.0, 8),
                          cfg.atom_count, cfg.seed + 901);
    out.checks.push_back(
        detail::check_window("A11", "probe-ratio-window", probe.spread, 2.0, 4.0));
    detail::stamp(out.checks, out.checks.size() - 1, block.lap());

    out.runtime_s = total.lap();
    out.checks.push_back(detail::check_le("A11", "runtime-seconds", out.runtime_s, 1800.0));
    return out;
}

// ---------------------------------------------------------------------------
// Registry
// ---------------------------------------------------------------------------

inline const std::vector<std::string>& all_suite_names() {
    static const std::vector<std::string> names = {
        "geometry",    "spherical",      "cfunction", "long-time",
        "short-time",  "transform",      "sphere-average", "wave-energy",
        "wave-rate",   "spherical-mean", "atoms"};
    return names;
}

inline SuiteResult run_suite(const std::string& name, const RunConfig& cfg) {
    if (name == "geometry") return run_suite_geometry(cfg);
    if (name == "spherical") return run_suite_spherical(cfg);
    if (name == "cfunction") return run_suite_cfunction(cfg);
    if (name == "long-time") return run_suite_long_time(cfg);
    if (name == "short-time") return run_suite_short_time(cfg);
    if (name == "transform") return run_suite_transform(cfg);
    if (name == "sphere-average") return run_suite_sphere_average(cfg);
    if (name == "wave-energy") return run_suite_wave_energy(cfg);
    if (name == "wave-rate") return run_suite_wave_rate(cfg);
    if (name == "spherical-mean") return run_suite_spherical_mean(cfg);
    if (name == "atoms") return run_suite_atoms(cfg);
    throw std::invalid_argument("unknown suite '" + name + "'");
}

inline std::vector<SuiteResult> run_suites(const std::vector<std::string>& selection,
                                           const RunConfig& cfg) {
    std::vector<SuiteResult> results;
    for (const std::string& name : selection) {
        SuiteResult r = run_suite(name, cfg);
        std::sort(r.checks.begin(), r.checks.end(),
                  [](const CheckResult& a, const CheckResult& b) { return a.name < b.name; });
        results.push_back(std::move(r));
    }
    return results;
}

inline CsvTable suite_report_to_csv(const std::vector<SuiteResult>& results) {
    CsvTable t;
    t.header = {"criterion", "suite", "check", "status",
                "value",     "threshold", "cmp", "runtime_s"};
    for (const SuiteResult& suite : results)
        for (const CheckResult& c : suite.checks)
            t.rows.push_back({c.criterion, suite.suite, c.name, status_name(c.status),
                              format_double(c.value), format_double(c.threshold), c.cmp,
                              format_double(c.runtime_s)});
    return t;
}

inline json suite_report_to_json(const std::vector<SuiteResult>& results) {
    json arr = json::array();
    for (const SuiteResult& suite : results) {
        json s;
        s["suite"] = suite.suite;
        s["status"] = status_name(suite.aggregate());
        s["runtime_s"] = suite.runtime_s;
        s["checks"] = json::array();
        for (const CheckResult& c : suite.checks)
            s["checks"].push_back({{"criterion", c.criterion},
                                   {"name", c.name},
                                   {"status", status_name(c.status)},
                                   {"value", c.value},
                                   {"threshold", c.threshold},
                                   {"cmp", c.cmp},
                                   {"runtime_s", c.runtime_s}});
        arr.push_back(std::move(s));
    }
    return arr;
}

inline bool any_failure(const std::vector<SuiteResult>& results) {
    for (const SuiteResult& suite : results)
        if (suite.aggregate() == CheckStatus::fail) return true;
    return false;
}

}  // namespace drs
