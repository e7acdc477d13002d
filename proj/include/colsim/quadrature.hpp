// quadrature.hpp — Composite Gauss–Legendre integration with endpoint regularization

#pragma once

#include <complex>
#include <vector>

namespace colsim {

struct GaussRule {
    std::vector<double> nodes;    // on (-1, 1)
    std::vector<double> weights;
};

// Nodes and weights of the n-point Gauss–Legendre rule (Newton iteration on
// the Legendre recurrence). Cached per order.
const GaussRule& gauss_legendre(int n);

// One smooth piece of an integration domain, integrated as a composite rule
// after pulling it back through a boundary-clustered reparameterization.
struct Segment {
    double a = 0.0;
    double b = 0.0;
    int panels = 1;
};

// Splits [a, b] at the interior breakpoints and distributes `total_panels`
// composite panels across the pieces proportionally to length (one minimum).
// Breakpoints outside (a, b) are ignored; coincident ones are merged.
std::vector<Segment> plan_segments(double a, double b,
                                   const std::vector<double>& breakpoints,
                                   int total_panels);

// Degree-7 boundary-clustered map w: [0,1] → [0,1] with quartic contact at
// both ends (w ~ ξ⁴ near 0, 1 − w ~ (1−ξ)⁴ near 1). Quarter-power endpoint
// behavior of the integrand becomes analytic in ξ, restoring the spectral
// convergence of the panel rule.
inline double clustered_map(double xi) {
    return xi * xi * xi * xi * (35.0 + xi * (-84.0 + xi * (70.0 - 20.0 * xi)));
}
inline double clustered_map_derivative(double xi) {
    const double u = xi * (1.0 - xi);
    return 140.0 * u * u * u;
}

// ∫_a^b f(x) dx over one segment: composite q-point Gauss–Legendre in the
// clustered parameter.
template <typename F>
auto integrate_segment(const Segment& seg, F&& f, int points_per_panel = 16)
    -> decltype(f(0.0)) {
    const GaussRule& rule = gauss_legendre(points_per_panel);
    using Value = decltype(f(0.0));
    Value sum{};
    const double len = seg.b - seg.a;
    const double h = 1.0 / seg.panels;
    for (int p = 0; p < seg.panels; ++p) {
        const double xi0 = p * h;
        for (size_t i = 0; i < rule.nodes.size(); ++i) {
            const double xi = xi0 + 0.5 * h * (rule.nodes[i] + 1.0);
            const double x = seg.a + len * clustered_map(xi);
            const double jac = len * clustered_map_derivative(xi) * 0.5 * h;
            sum += (rule.weights[i] * jac) * f(x);
        }
    }
    return sum;
}

template <typename F>
auto integrate_segments(const std::vector<Segment>& segments, F&& f,
                        int points_per_panel = 16) -> decltype(f(0.0)) {
    using Value = decltype(f(0.0));
    Value sum{};
    for (const Segment& seg : segments) sum += integrate_segment(seg, f, points_per_panel);
    return sum;
}

}  // namespace colsim
