#include <catch_amalgamated.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "drs/sampling.hpp"
#include "drs/spherical.hpp"

using namespace drs;

namespace {

double rel_diff(double x, double y) {
    return std::abs(x - y) / std::max({std::abs(x), std::abs(y), 1e-300});
}

struct RefRow {
    SpaceDims dims;
    SpectralParam lam;
    double r = 0.0;
    double value = 0.0;
};

std::vector<RefRow> load_reference(const std::string& name) {
    std::ifstream in(std::string(DRS_TEST_DATA_DIR) + "/" + name);
    REQUIRE(in.good());
    std::string line;
    std::getline(in, line);  // header
    std::vector<RefRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string tok;
        RefRow row;
        std::getline(ss, tok, ',');
        row.dims.m_v = std::stoi(tok);
        std::getline(ss, tok, ',');
        row.dims.m_z = std::stoi(tok);
        std::getline(ss, tok, ',');
        row.lam.re = std::stod(tok);
        std::getline(ss, tok, ',');
        row.lam.im = std::stod(tok);
        std::getline(ss, tok, ',');
        row.r = std::stod(tok);
        std::getline(ss, tok, ',');
        row.value = std::stod(tok);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

TEST_CASE("spherical_phi reproduces the high-precision reference table") {
    const auto rows = load_reference("phi_reference.csv");
    REQUIRE(rows.size() == 198);
    for (const auto& row : rows) {
        INFO("m_v=" << row.dims.m_v << " m_z=" << row.dims.m_z << " lam=" << row.lam.re
                    << "+" << row.lam.im << "i r=" << row.r);
        CHECK(rel_diff(spherical_phi(row.dims, row.lam, row.r), row.value) < 5e-9);
    }
}

TEST_CASE("spherical_phi_dr reproduces the high-precision reference table") {
    const auto rows = load_reference("dphi_reference.csv");
    REQUIRE(rows.size() >= 6);
    for (const auto& row : rows) {
        INFO("m_v=" << row.dims.m_v << " m_z=" << row.dims.m_z << " lam=" << row.lam.re
                    << "+" << row.lam.im << "i r=" << row.r);
        CHECK(rel_diff(spherical_phi_dr(row.dims, row.lam, row.r), row.value) < 1e-10);
    }
}

TEST_CASE("spherical_phi basic structure") {
    const SpaceDims h1{2, 1};
    const SpaceDims q1{4, 3};

    // value 1 at the origin
    CHECK(spherical_phi(h1, SpectralParam::real_axis(3.0), 0.0) == 1.0);
    CHECK(spherical_phi(q1, SpectralParam::imaginary_axis(2.0), 0.0) == 1.0);
    CHECK(spherical_phi_dr(h1, SpectralParam::real_axis(3.0), 0.0) == 0.0);

    // even in lambda on both axes
    for (double l : {0.4, 2.0, 35.0}) {
        CHECK(rel_diff(spherical_phi(h1, SpectralParam::real_axis(l), 2.3),
                       spherical_phi(h1, SpectralParam::real_axis(-l), 2.3)) < 1e-14);
    }
    for (double s : {0.7, 2.9}) {
        CHECK(rel_diff(spherical_phi(q1, SpectralParam::imaginary_axis(s), 1.7),
                       spherical_phi(q1, SpectralParam::imaginary_axis(-s), 1.7)) < 1e-11);
    }

    // the ground spherical function dominates the principal series
    std::vector<double> r0s{0.2, 1.0, 4.0, 9.0};
    for (double l : {0.5, 3.0, 17.0}) {
        for (double r : r0s) {
            CHECK(std::abs(spherical_phi(h1, SpectralParam::real_axis(l), r)) <=
                  spherical_phi(h1, SpectralParam::real_axis(0.0), r) * (1.0 + 1e-12));
        }
    }

    // lambda = 0: positive, strictly decreasing, negative derivative
    double prev = 1.0;
    for (double r : {0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
        const double v = spherical_phi(h1, SpectralParam::real_axis(0.0), r);
        CHECK(v > 0.0);
        CHECK(v < prev);
        prev = v;
        CHECK(spherical_phi_dr(h1, SpectralParam::real_axis(0.0), r) < 0.0);
    }
}

TEST_CASE("spherical_phi is constant at the defining imaginary parameter") {
    // At lambda = +- i Q/2 the function degenerates to the constant 1; its
    // derivative prefactor vanishes identically.
    for (const SpaceDims& d : {SpaceDims{2, 1}, SpaceDims{4, 3}, SpaceDims{2, 3}}) {
        const double qh = 0.5 * d.q();
        for (double r : {0.3, 1.7, 5.0, 12.0}) {
            CHECK(std::abs(spherical_phi(d, SpectralParam::imaginary_axis(-qh), r) - 1.0) <
                  1e-10);
            CHECK(std::abs(spherical_phi(d, SpectralParam::imaginary_axis(qh), r) - 1.0) <
                  1e-10);
            CHECK(spherical_phi_dr(d, SpectralParam::imaginary_axis(qh), r) == 0.0);
        }
    }
}

TEST_CASE("series and propagated derivative routes are consistent") {
    const SpaceDims h1{2, 1};
    const SpectralParam lam = SpectralParam::real_axis(3.0);
    // profile-carried derivative vs the contiguous-parameter route, inside
    // the series region and beyond it
    for (double r : {0.4, 0.8, 3.0, 7.0}) {
        PhiProfile prof = spherical_phi_profile(h1, lam, std::vector<double>{r});
        CHECK(rel_diff(prof.dphi[0], spherical_phi_dr(h1, lam, r)) < 1e-9);
    }
    // step halving leaves the propagated value unchanged at the tuned order
    const SpectralParam hard = SpectralParam::real_axis(77.3);
    const std::vector<double> rs{6.0};
    const double full = spherical_phi_profile(SpaceDims{4, 3}, hard, rs, 0.012).phi[0];
    const double half = spherical_phi_profile(SpaceDims{4, 3}, hard, rs, 0.006).phi[0];
    CHECK(rel_diff(full, half) < 1e-9);

    // a profile shares one sweep across ascending radii
    const std::vector<double> grid{0.5, 1.0, 2.0, 5.0, 9.0};
    PhiProfile prof = spherical_phi_profile(h1, lam, grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(rel_diff(prof.phi[i], spherical_phi(h1, lam, grid[i])) < 1e-10);
}

TEST_CASE("spherical_phi domain rejection") {
    const SpaceDims h1{2, 1};
    CHECK_THROWS_AS(spherical_phi(h1, SpectralParam{1.0, 1.0}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(spherical_phi(h1, SpectralParam::real_axis(501.0), 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(spherical_phi(h1, SpectralParam::imaginary_axis(3.0 * h1.q() + 0.1), 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(spherical_phi(h1, SpectralParam::real_axis(1.0), 31.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(spherical_phi(h1, SpectralParam::real_axis(1.0), -0.5),
                    std::invalid_argument);
    CHECK_THROWS_AS(spherical_phi(SpaceDims{3, 1}, SpectralParam::real_axis(1.0), 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(spherical_phi_profile(h1, SpectralParam::real_axis(1.0),
                                          std::vector<double>{2.0, 1.0}),
                    std::invalid_argument);
}

TEST_CASE("c_function matches high-precision references") {
    const Cplx c1 = c_function(SpaceDims{2, 1}, 1.0);
    CHECK(rel_diff(c1.real(), -0.684621054684060035457) < 1e-12);
    CHECK(rel_diff(c1.imag(), -0.8943081215347136925774) < 1e-12);

    const Cplx c2 = c_function(SpaceDims{4, 3}, 2.0);
    CHECK(rel_diff(c2.real(), -1.012917895586242984103) < 1e-12);
    CHECK(rel_diff(c2.imag(), 3.459327507347029049011) < 1e-12);

    // conjugate symmetry across the sign of lambda
    for (double l : {0.3, 1.7, 12.0}) {
        const Cplx cp = c_function(SpaceDims{4, 3}, l);
        const Cplx cm = c_function(SpaceDims{4, 3}, -l);
        CHECK(std::abs(cp - std::conj(cm)) < 1e-12 * std::abs(cp));
    }
    CHECK_THROWS_AS(c_function(SpaceDims{2, 1}, 0.0), std::invalid_argument);
}

TEST_CASE("c_function large-lambda normalization") {
    // |c(lambda)| ~ K lambda^{-(n-1)/2}, K = 2^{Q-1} Gamma(n/2) / sqrt(pi)
    {
        const SpaceDims d{2, 1};
        const double got = std::abs(c_function(d, 200.0)) * std::pow(200.0, 1.5);
        CHECK(rel_diff(got, 2.0 / std::sqrt(std::numbers::pi)) < 2e-4);
    }
    {
        const SpaceDims d{4, 3};
        const double got = std::abs(c_function(d, 200.0)) * std::pow(200.0, 3.5);
        CHECK(rel_diff(got, 54.1622000206) < 2e-4);
    }
}

TEST_CASE("plancherel_density matches |c|^{-2} and its references") {
    CHECK(rel_diff(plancherel_density(SpaceDims{2, 1}, 1.0), 0.788337023734290587067) < 1e-12);
    CHECK(rel_diff(plancherel_density(SpaceDims{4, 3}, 0.5), 9.770097656097511072177e-5) <
          1e-12);

    for (const SpaceDims& d : {SpaceDims{2, 1}, SpaceDims{4, 3}}) {
        for (double l : {0.3, 2.0, 20.0, 150.0}) {
            const double via_c = 1.0 / sq(std::abs(c_function(d, l)));
            CHECK(rel_diff(plancherel_density(d, l), via_c) < 1e-11);
        }
        CHECK(plancherel_density(d, 0.0) == 0.0);
        CHECK(plancherel_density(d, -3.0) == plancherel_density(d, 3.0));
    }
}

TEST_CASE("plancherel_density grows like lambda^{n-1}") {
    for (const SpaceDims& d : {SpaceDims{2, 1}, SpaceDims{4, 3}}) {
        std::vector<double> ls, ys;
        for (int i = 0; i <= 20; ++i) {
            const double l = 50.0 * std::pow(10.0, i / 20.0);
            ls.push_back(l);
            ys.push_back(plancherel_density(d, l));
        }
        const double slope = loglog_fit(ls, ys).slope;
        CHECK(std::abs(slope - (d.n() - 1)) < 0.05);
    }
}

TEST_CASE("leading oscillatory forms agree with each other") {
    const SpaceDims h1{2, 1};
    // frozen spot values of both closed forms at lambda t = 20
    CHECK(rel_diff(bessel_leading(h1, 0.5, 40.0), 0.0064789357) < 1e-7);
    CHECK(rel_diff(hc_leading(h1, 0.5, 40.0), 0.0061744131) < 1e-7);

    // Bessel form reduces to the cosine form as lambda t grows
    CHECK(rel_diff(bessel_leading(h1, 0.5, 40.0), hc_leading(h1, 0.5, 40.0)) < 0.15);
    CHECK(rel_diff(bessel_leading(h1, 0.5, 400.0), hc_leading(h1, 0.5, 400.0)) < 0.03);
    CHECK(rel_diff(bessel_leading(h1, 2.0, 100.0), hc_leading(h1, 2.0, 100.0)) < 0.03);

    // time derivative of the cosine form matches its closed-form companion
    // at a phase where the sine factor is +-1
    const double t = 2.0;
    const double lam = (1.25 * std::numbers::pi + 62.0 * std::numbers::pi) / t;
    const double fd =
        (hc_leading(h1, t + 5e-7, lam) - hc_leading(h1, t - 5e-7, lam)) / 1e-6;
    CHECK(rel_diff(fd, hc_leading_dr(h1, t, lam)) < 0.05);
}

TEST_CASE("long-time remainder decays one full order beyond the leading term") {
    const SpaceDims h1{2, 1};
    const auto rep2 = long_time_expansion_report(h1, 2.0);
    CHECK(rep2.pass);
    CHECK(rep2.slope_threshold == -2.2);
    CHECK(std::abs(rep2.envelope_fit.slope - (-2.492)) < 0.15);

    const auto rep4 = long_time_expansion_report(h1, 4.0);
    CHECK(rep4.pass);
    CHECK(std::abs(rep4.envelope_fit.slope - (-2.508)) < 0.15);
}

TEST_CASE("long-time derivative remainder decays beyond its leading term") {
    const SpaceDims h1{2, 1};
    const auto rep = long_time_derivative_report(h1, 2.0);
    CHECK(rep.pass);
    CHECK(rep.slope_threshold == -1.2);
    CHECK(std::abs(rep.envelope_fit.slope - (-1.498)) < 0.15);
}

TEST_CASE("short-time remainder decays in the product variable") {
    const SpaceDims h1{2, 1};
    const auto rep = short_time_expansion_report(h1, 0.5);
    CHECK(rep.pass);
    CHECK(std::abs(rep.envelope_fit.slope - (-2.335)) < 0.15);
    CHECK_THROWS_AS(short_time_expansion_report(h1, 1.5), std::invalid_argument);
}

TEST_CASE("remainder magnitude drops at the expected rate between octaves") {
    const SpaceDims h1{2, 1};
    const double t = 2.0;
    auto rem = [&](double l) {
        return std::abs(spherical_phi(h1, SpectralParam::real_axis(l), t) -
                        hc_leading(h1, t, l));
    };
    const double ratio = rem(50.0) / rem(10.0);
    CHECK(ratio > 0.00238248);
    CHECK(ratio < 0.00952992);
}

TEST_CASE("sphere average of modular powers reduces to the spherical function") {
    const SpaceDims h1{2, 1};
    CHECK(std::abs(sphere_average_modular_power(h1, 0.0, 2.0) - 1.0) < 1e-12);
    CHECK(std::abs(sphere_average_modular_power(h1, -1.0, 5.0) - 1.0) < 1e-10);
    CHECK(rel_diff(sphere_average_modular_power(h1, -0.5, 3.0),
                   spherical_phi(h1, SpectralParam::real_axis(0.0), 3.0)) < 1e-13);
    // decreasing in R at the symmetric exponent
    double prev = 1.0;
    for (double r : {0.1, 0.5, 1.5, 4.0, 8.0}) {
        const double v = sphere_average_modular_power(h1, -0.5, r);
        CHECK(v < prev);
        prev = v;
    }
    CHECK_THROWS_AS(sphere_average_modular_power(h1, 2.6, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(sphere_average_modular_power(h1, -3.6, 1.0), std::invalid_argument);
}

TEST_CASE("hypergeometric and Monte-Carlo sphere averages agree") {
    const DamekRicciSpace heis = make_space(heisenberg_structure(1));
    const DamekRicciSpace quat = make_space(quaternionic_structure(1));
    struct Probe {
        const DamekRicciSpace* sp;
        double s, R;
    };
    const Probe probes[] = {{&heis, -0.5, 3.0}, {&heis, 1.0, 3.0}, {&quat, 0.25, 2.0},
                            {&heis, -0.5, 6.0}};
    for (const auto& p : probes) {
        const SpaceDims d{p.sp->structure.m_v, p.sp->structure.m_z};
        const double exact = sphere_average_modular_power(d, p.s, p.R);
        const McEstimate mc = sphere_average_modular_power_mc(*p.sp, p.s, p.R, 200000, 777);
        INFO("s=" << p.s << " R=" << p.R << " exact=" << exact << " mc=" << mc.value
                  << " se=" << mc.std_error);
        CHECK(std::abs(mc.value - exact) < 4.0 * mc.std_error);
        CHECK(mc.std_error < 0.02 * std::max(std::abs(exact), 1e-6));
    }
}
