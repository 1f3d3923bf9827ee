#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "drs/common.hpp"

namespace drs {

using Vec = std::vector<double>;

// Small dense row-major matrix, sized for the J maps (m_v x m_v with m_v
// rarely above a few dozen); no linear algebra library needed at this scale.
struct Mat {
    int rows = 0, cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}

    double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }
};

inline Vec mat_vec(const Mat& m, const Vec& x) {
    Vec y(static_cast<std::size_t>(m.rows), 0.0);
    for (int i = 0; i < m.rows; ++i) {
        double s = 0.0;
        for (int j = 0; j < m.cols; ++j) s += m(i, j) * x[static_cast<std::size_t>(j)];
        y[static_cast<std::size_t>(i)] = s;
    }
    return y;
}

inline double dot(const Vec& x, const Vec& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

inline double norm_sq(const Vec& x) { return dot(x, x); }

// Anticommuting skew-orthogonal generators J_1..J_{m_z} acting on the
// horizontal layer: J_i J_j + J_j J_i = -2 delta_ij Id.
struct HTypeStructure {
    int m_v = 0;
    int m_z = 0;
    std::vector<Mat> j_maps;
};

// J_z v = sum_i z_i J_i v
inline Vec apply_j(const HTypeStructure& s, const Vec& z, const Vec& v) {
    Vec out(static_cast<std::size_t>(s.m_v), 0.0);
    for (int i = 0; i < s.m_z; ++i) {
        if (z[static_cast<std::size_t>(i)] == 0.0) continue;
        const Mat& J = s.j_maps[static_cast<std::size_t>(i)];
        for (int r = 0; r < s.m_v; ++r) {
            double acc = 0.0;
            for (int c = 0; c < s.m_v; ++c) acc += J(r, c) * v[static_cast<std::size_t>(c)];
            out[static_cast<std::size_t>(r)] += z[static_cast<std::size_t>(i)] * acc;
        }
    }
    return out;
}

inline HTypeStructure build_htype(int m_v, int m_z, std::vector<Mat> j_maps) {
    require(m_v >= 2 && m_v % 2 == 0, "build_htype: m_v must be a positive even integer >= 2");
    require(m_z >= 1, "build_htype: m_z must be >= 1");
    require(static_cast<int>(j_maps.size()) == m_z, "build_htype: need exactly m_z generator matrices");
    for (const Mat& J : j_maps)
        require(J.rows == m_v && J.cols == m_v, "build_htype: each J map must be m_v x m_v");

    const double tol = 1e-10;
    double worst = 0.0;
    int worst_i = -1, worst_j = -1;
    for (int i = 0; i < m_z; ++i) {
        for (int j = i; j < m_z; ++j) {
            const Mat& Ji = j_maps[static_cast<std::size_t>(i)];
            const Mat& Jj = j_maps[static_cast<std::size_t>(j)];
            double res = 0.0;
            for (int r = 0; r < m_v; ++r) {
                for (int c = 0; c < m_v; ++c) {
                    double anti = 0.0;
                    for (int k = 0; k < m_v; ++k)
                        anti += Ji(r, k) * Jj(k, c) + Jj(r, k) * Ji(k, c);
                    double target = (i == j && r == c) ? -2.0 : 0.0;
                    res = std::max(res, std::abs(anti - target));
                    if (i == j) res = std::max(res, std::abs(Ji(r, c) + Ji(c, r)));
                }
            }
            if (res > worst) {
                worst = res;
                worst_i = i;
                worst_j = j;
            }
        }
    }
    if (worst > tol) {
        std::ostringstream msg;
        msg << "build_htype: generators violate the anticommutation relations; worst pair (J_"
            << worst_i + 1 << ", J_" << worst_j + 1 << ") residual " << worst;
        throw std::invalid_argument(msg.str());
    }
    return HTypeStructure{m_v, m_z, std::move(j_maps)};
}

inline HTypeStructure heisenberg_structure(int k) {
    require(k >= 1, "heisenberg_structure: k must be >= 1");
    Mat J(2 * k, 2 * k);
    for (int b = 0; b < k; ++b) {
        J(2 * b, 2 * b + 1) = 1.0;
        J(2 * b + 1, 2 * b) = -1.0;
    }
    return build_htype(2 * k, 1, {J});
}

inline HTypeStructure quaternionic_structure(int k) {
    require(k >= 1, "quaternionic_structure: k must be >= 1");
    // Left multiplication by i, j, k on H = R^4 in the basis (1, i, j, k).
    const double Li[4][4] = {{0, -1, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, -1}, {0, 0, 1, 0}};
    const double Lj[4][4] = {{0, 0, -1, 0}, {0, 0, 0, 1}, {1, 0, 0, 0}, {0, -1, 0, 0}};
    const double Lk[4][4] = {{0, 0, 0, -1}, {0, 0, -1, 0}, {0, 1, 0, 0}, {1, 0, 0, 0}};
    const double (*blocks[3])[4] = {Li, Lj, Lk};
    std::vector<Mat> maps;
    for (auto block : blocks) {
        Mat J(4 * k, 4 * k);
        for (int b = 0; b < k; ++b)
            for (int r = 0; r < 4; ++r)
                for (int c = 0; c < 4; ++c) J(4 * b + r, 4 * b + c) = block[r][c];
        maps.push_back(std::move(J));
    }
    return build_htype(4 * k, 3, std::move(maps));
}

// Radial analysis only needs the layer dimensions, not the J maps; enlarged
// companion parameters (m_v, m_z + 2) are used even when no group realizes them.
struct SpaceDims {
    int m_v = 0;
    int m_z = 0;

    int n() const { return m_v + m_z + 1; }
    double q() const { return m_z + 0.5 * m_v; }
};

struct DamekRicciSpace {
    HTypeStructure structure;
    int n = 0;
    double Q = 0.0;

    SpaceDims dims() const { return SpaceDims{structure.m_v, structure.m_z}; }
};

inline DamekRicciSpace make_space(HTypeStructure s) {
    DamekRicciSpace sp;
    sp.n = s.m_v + s.m_z + 1;
    sp.Q = s.m_z + 0.5 * s.m_v;
    sp.structure = std::move(s);
    return sp;
}

// Point (v, z, a) in N x R_+ coordinates; a = 1, v = z = 0 is the identity.
struct GroupPoint {
    Vec v, z;
    double a = 1.0;
};

inline GroupPoint identity_point(const DamekRicciSpace& sp) {
    return GroupPoint{Vec(static_cast<std::size_t>(sp.structure.m_v), 0.0),
                      Vec(static_cast<std::size_t>(sp.structure.m_z), 0.0), 1.0};
}

inline void check_point(const DamekRicciSpace& sp, const GroupPoint& x, const char* where) {
    require(x.a > 0.0, std::string(where) + ": point must have a > 0");
    require(static_cast<int>(x.v.size()) == sp.structure.m_v &&
                static_cast<int>(x.z.size()) == sp.structure.m_z,
            std::string(where) + ": point dimensions do not match the space");
}

// z-components of [v, w]: <z, [v,w]> = <J_z v, w>
inline Vec bracket(const HTypeStructure& s, const Vec& v, const Vec& w) {
    require(static_cast<int>(v.size()) == s.m_v && static_cast<int>(w.size()) == s.m_v,
            "bracket: arguments must lie in the horizontal layer");
    Vec out(static_cast<std::size_t>(s.m_z), 0.0);
    for (int i = 0; i < s.m_z; ++i) {
        const Mat& J = s.j_maps[static_cast<std::size_t>(i)];
        double acc = 0.0;
        for (int r = 0; r < s.m_v; ++r) {
            double jv = 0.0;
            for (int c = 0; c < s.m_v; ++c) jv += J(r, c) * v[static_cast<std::size_t>(c)];
            acc += jv * w[static_cast<std::size_t>(r)];
        }
        out[static_cast<std::size_t>(i)] = acc;
    }
    return out;
}

// (v,z,a)(v',z',a') = (v + sqrt(a) v', z + a z' + (sqrt(a)/2) [v, v'], a a')
inline GroupPoint group_mul(const DamekRicciSpace& sp, const GroupPoint& x, const GroupPoint& y) {
    check_point(sp, x, "group_mul");
    check_point(sp, y, "group_mul");
    const double sa = std::sqrt(x.a);
    GroupPoint out;
    out.v.resize(x.v.size());
    for (std::size_t i = 0; i < x.v.size(); ++i) out.v[i] = x.v[i] + sa * y.v[i];
    Vec br = bracket(sp.structure, x.v, y.v);
    out.z.resize(x.z.size());
    for (std::size_t i = 0; i < x.z.size(); ++i)
        out.z[i] = x.z[i] + x.a * y.z[i] + 0.5 * sa * br[i];
    out.a = x.a * y.a;
    return out;
}

inline GroupPoint group_inv(const DamekRicciSpace& sp, const GroupPoint& x) {
    check_point(sp, x, "group_inv");
    GroupPoint out;
    const double isa = 1.0 / std::sqrt(x.a);
    out.v.resize(x.v.size());
    for (std::size_t i = 0; i < x.v.size(); ++i) out.v[i] = -isa * x.v[i];
    out.z.resize(x.z.size());
    for (std::size_t i = 0; i < x.z.size(); ++i) out.z[i] = -x.z[i] / x.a;
    out.a = 1.0 / x.a;
    return out;
}

// delta(v,z,a) = a^{-Q}; right Haar = delta^{-1} * left Haar
inline double modular(const DamekRicciSpace& sp, const GroupPoint& x) {
    check_point(sp, x, "modular");
    return std::pow(x.a, -sp.Q);
}

// cosh^2(d/2) = [(1 + a + |v|^2/4)^2 + |z|^2] / (4a), rearranged through
// sinh^2(d/2) so that no cancellation occurs near the identity:
// sinh^2(d/2) = [(1-a)^2 + q^2 + 2q(1+a) + |z|^2] / (4a),  q = |v|^2/4.
inline double distance_to_identity(const DamekRicciSpace& sp, const GroupPoint& x) {
    check_point(sp, x, "distance_to_identity");
    const double qv = 0.25 * norm_sq(x.v);
    double s2 = (sq(1.0 - x.a) + qv * qv + 2.0 * qv * (1.0 + x.a) + norm_sq(x.z)) / (4.0 * x.a);
    if (s2 < 0.0) s2 = 0.0;
    return 2.0 * std::asinh(std::sqrt(s2));
}

// Unit vector (V, Z, b) with |V|^2 + |Z|^2 + b^2 = 1; b = -1 points at the
// a -> 0 pole (the direction where the geodesic descends in a).
struct SphereDirection {
    Vec v_part, z_part;
    double b = 0.0;
};

// Geodesic polar coordinates: x(R, w) is the point at distance R from the
// identity in direction w, via the inverse Cayley-type map of the unit ball.
inline GroupPoint polar_point(const DamekRicciSpace& sp, double R, const SphereDirection& w) {
    require(R >= 0.0, "polar_point: R must be >= 0");
    require(static_cast<int>(w.v_part.size()) == sp.structure.m_v &&
                static_cast<int>(w.z_part.size()) == sp.structure.m_z,
            "polar_point: direction dimensions do not match the space");
    require(std::abs(norm_sq(w.v_part) + norm_sq(w.z_part) + w.b * w.b - 1.0) < 1e-6,
            "polar_point: direction must be a unit vector");
    const double th = std::tanh(0.5 * R);
    const double d = sq(1.0 - th * w.b) + th * th * norm_sq(w.z_part);
    GroupPoint out;
    Vec jzv = apply_j(sp.structure, w.z_part, w.v_part);
    out.v.resize(w.v_part.size());
    const double c = 2.0 * th / d;
    for (std::size_t i = 0; i < out.v.size(); ++i)
        out.v[i] = c * ((1.0 - th * w.b) * w.v_part[i] + th * jzv[i]);
    out.z.resize(w.z_part.size());
    for (std::size_t i = 0; i < out.z.size(); ++i) out.z[i] = c * w.z_part[i];
    out.a = (1.0 - th * th) / d;
    return out;
}

// a-component of polar_point, cheap form used in sphere-average kernels:
// h = (1 - th^2) / ((1 - b th)^2 + |Z|^2 th^2), and delta^{-1/2} = h^{Q/2}.
inline double polar_a_component(double th, double b, double z_norm_sq) {
    return (1.0 - th * th) / (sq(1.0 - th * b) + z_norm_sq * th * th);
}

// A(r) = 2^{m_v + m_z} sinh^{m_v + m_z}(r/2) cosh^{m_z}(r/2); the left Haar
// measure in polar coordinates is A(r) dr dw.
inline double volume_density(const SpaceDims& d, double r) {
    require(r >= 0.0, "volume_density: r must be >= 0");
    const int M = d.m_v + d.m_z;
    return std::pow(2.0 * std::sinh(0.5 * r), M) * std::pow(std::cosh(0.5 * r), d.m_z);
}

inline double volume_density(const DamekRicciSpace& sp, double r) {
    return volume_density(sp.dims(), r);
}

// Surface measure of the unit sphere S^{n-1}: nu_n = 2 pi^{n/2} / Gamma(n/2).
inline double sphere_surface_area(int n) {
    require(n >= 1, "sphere_surface_area: n must be >= 1");
    return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

}  // namespace drs
