// quadrature.cpp — Gauss–Legendre rule generation and segment planning

#include "colsim/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace colsim {

namespace {

GaussRule make_rule(int n) {
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Chebyshev-based initial guess for the i-th root of P_n.
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
    static std::map<int, GaussRule> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, make_rule(n)).first;
    return it->second;
}

std::vector<Segment> plan_segments(double a, double b,
                                   const std::vector<double>& breakpoints,
                                   int total_panels) {
    if (!(b > a)) return {};
    std::vector<double> edges{a, b};
    const double merge_tol = 1e-12 * std::max(1.0, std::abs(b - a));
    for (double x : breakpoints)
        if (x > a + merge_tol && x < b - merge_tol) edges.push_back(x);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end(),
                            [&](double u, double v) { return v - u <= merge_tol; }),
                edges.end());
    if (edges.back() < b) edges.back() = b;

    const int pieces = static_cast<int>(edges.size()) - 1;
    const double total_len = b - a;
    std::vector<Segment> segments(pieces);
    int assigned = 0;
    for (int i = 0; i < pieces; ++i) {
        segments[i].a = edges[i];
        segments[i].b = edges[i + 1];
        const double frac = (segments[i].b - segments[i].a) / total_len;
        segments[i].panels = std::max(1, static_cast<int>(std::lround(frac * total_panels)));
        assigned += segments[i].panels;
    }
    // Top up the longest segment so the budget is not undershot.
    while (assigned < total_panels) {
        auto longest = std::max_element(
            segments.begin(), segments.end(), [](const Segment& u, const Segment& v) {
                return (u.b - u.a) / u.panels < (v.b - v.a) / v.panels;
            });
        longest->panels += 1;
        assigned += 1;
    }
    return segments;
}

}  // namespace colsim
