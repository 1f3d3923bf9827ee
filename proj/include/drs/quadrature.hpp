#pragma once

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <span>
#include <vector>

#include "drs/common.hpp"

namespace drs {

struct QuadRule {
    std::vector<double> nodes;    // on (-1, 1)
    std::vector<double> weights;  // sum to 2
};

// Gauss-Legendre rule by Newton iteration on P_n; cached per order.
inline const QuadRule& gauss_legendre(int order) {
    static std::map<int, QuadRule> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(order);
    if (it != cache.end()) return it->second;
    require(order >= 1 && order <= 256, "gauss_legendre: order out of range");

    QuadRule rule;
    rule.nodes.resize(static_cast<std::size_t>(order));
    rule.weights.resize(static_cast<std::size_t>(order));
    for (int i = 0; i < order; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= order; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = order * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[static_cast<std::size_t>(order - 1 - i)] = x;
        rule.weights[static_cast<std::size_t>(order - 1 - i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return cache.emplace(order, std::move(rule)).first->second;
}

// Composite quadrature grid: Gauss-Legendre nodes on each panel [e_i, e_{i+1}].
struct PanelGrid {
    std::vector<double> edges;
    std::vector<double> nodes;
    std::vector<double> weights;
    int order = 0;

    double x_min() const { return edges.front(); }
    double x_max() const { return edges.back(); }
    double max_panel_width() const {
        double w = 0.0;
        for (std::size_t i = 0; i + 1 < edges.size(); ++i)
            w = std::max(w, edges[i + 1] - edges[i]);
        return w;
    }
};

inline PanelGrid panels_from_edges(std::vector<double> edges, int order) {
    require(edges.size() >= 2, "panels_from_edges: need at least one panel");
    for (std::size_t i = 0; i + 1 < edges.size(); ++i)
        require(edges[i] < edges[i + 1], "panels_from_edges: edges must increase");
    const QuadRule& rule = gauss_legendre(order);
    PanelGrid g;
    g.order = order;
    g.edges = std::move(edges);
    const std::size_t m = (g.edges.size() - 1) * static_cast<std::size_t>(order);
    g.nodes.reserve(m);
    g.weights.reserve(m);
    for (std::size_t i = 0; i + 1 < g.edges.size(); ++i) {
        const double mid = 0.5 * (g.edges[i] + g.edges[i + 1]);
        const double half = 0.5 * (g.edges[i + 1] - g.edges[i]);
        for (int k = 0; k < order; ++k) {
            g.nodes.push_back(mid + half * rule.nodes[static_cast<std::size_t>(k)]);
            g.weights.push_back(half * rule.weights[static_cast<std::size_t>(k)]);
        }
    }
    return g;
}

// Edges on [0, x_max]: geometric growth from first_width up to max_width,
// then uniform. Resolves integrands with structure near the origin without
// wasting panels in the tail.
inline std::vector<double> graded_edges(double x_max, double max_width, double first_width,
                                        double growth = 1.6) {
    require(x_max > 0.0 && max_width > 0.0 && first_width > 0.0 && growth > 1.0,
            "graded_edges: parameters must be positive, growth > 1");
    require(first_width <= max_width, "graded_edges: first_width must be <= max_width");
    std::vector<double> edges{0.0};
    double w = first_width;
    while (edges.back() + w < x_max - 1e-12 * x_max) {
        edges.push_back(edges.back() + w);
        w = std::min(w * growth, max_width);
    }
    edges.push_back(x_max);
    // merge a runt last panel into its neighbor
    if (edges.size() >= 3) {
        std::size_t m = edges.size();
        if (edges[m - 1] - edges[m - 2] < 0.2 * (edges[m - 2] - edges[m - 3]))
            edges.erase(edges.begin() + static_cast<std::ptrdiff_t>(m) - 2);
    }
    return edges;
}

inline std::vector<double> uniform_edges(double x_min, double x_max, double max_width) {
    require(x_max > x_min && max_width > 0.0, "uniform_edges: empty range");
    const int k = std::max(1, static_cast<int>(std::ceil((x_max - x_min) / max_width)));
    std::vector<double> edges(static_cast<std::size_t>(k) + 1);
    for (int i = 0; i <= k; ++i)
        edges[static_cast<std::size_t>(i)] = x_min + (x_max - x_min) * i / k;
    return edges;
}

// Integral of sampled values against the grid weights.
inline double integrate(const PanelGrid& g, std::span<const double> values) {
    require(values.size() == g.weights.size(), "integrate: value/grid size mismatch");
    std::vector<double> terms(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) terms[i] = values[i] * g.weights[i];
    return pairwise_sum(terms);
}

template <class F>
double integrate_fn(const PanelGrid& g, F&& f) {
    std::vector<double> vals(g.nodes.size());
    for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = f(g.nodes[i]);
    return integrate(g, vals);
}

}  // namespace drs
