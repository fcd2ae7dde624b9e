#pragma once

#include <map>
#include <vector>

#include "obscost/precision.hpp"

namespace obscost {

// Gauss-Legendre rule on [-1,1]; exact for polynomials of degree <= 2n-1.
struct GaussLegendreRule {
    RVec nodes;    // ascending
    RVec weights;
};

namespace detail {

// P_n(x) and P_n'(x) by the three-term recurrence.
inline void legendre_pd(int n, const Real& x, Real& p, Real& d) {
    Real pkm1 = Real(1.0), pk = x;
    if (n == 0) {
        p = pkm1;
        d = Real(0.0);
        return;
    }
    for (int k = 1; k < n; ++k) {
        Real pkp1 = (Real(2 * k + 1) * x * pk - Real(k) * pkm1) / Real(k + 1);
        pkm1 = std::move(pk);
        pk = std::move(pkp1);
    }
    p = pk;
    // (1-x^2) P_n' = n (P_{n-1} - x P_n)
    d = Real(n) * (pkm1 - x * pk) / (Real(1.0) - x * x);
}

inline const GaussLegendreRule& gl_rule(int n, long bits) {
    thread_local std::map<std::pair<int, long>, GaussLegendreRule> cache;
    auto key = std::make_pair(n, bits);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    PrecisionScope scope{PrecisionContext{bits}};
    GaussLegendreRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    Real pi = Real::pi();
    int newton_steps = 5 + static_cast<int>(bits / 45);  // double seed gains ~2 digits/step... quadratic: generous cap
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Chebyshev-like initial guess, then Newton at full precision.
        Real x = cos(pi * Real(i + 0.75) / Real(n + 0.5));
        Real p, d;
        for (int it2 = 0; it2 < newton_steps; ++it2) {
            legendre_pd(n, x, p, d);
            x -= p / d;
        }
        legendre_pd(n, x, p, d);
        Real w = Real(2.0) / ((Real(1.0) - x * x) * d * d);
        rule.nodes[i] = -x;  // i counts from the right; store ascending
        rule.weights[i] = w;
        rule.nodes[n - 1 - i] = x;
        rule.weights[n - 1 - i] = w;
    }
    auto [pos, _] = cache.emplace(key, std::move(rule));
    return pos->second;
}

template <typename T>
struct quad_zero {
    static T value() { return T(); }
};

}  // namespace detail

// Fixed-order Gauss-Legendre on [a,b]. F: const Real& -> Real or Complex.
template <typename F>
auto gauss_legendre(F&& f, const Real& a, const Real& b, int nodes, PrecisionContext ctx)
    -> decltype(f(a)) {
    if (nodes < 1) throw validation_error("gauss_legendre: nodes must be >= 1");
    if (!(a < b)) throw validation_error("gauss_legendre: requires a < b");
    PrecisionScope scope{ctx};
    const auto& rule = detail::gl_rule(nodes, ctx.bits);
    Real mid = (a + b) * Real(0.5);
    Real rad = (b - a) * Real(0.5);
    using T = decltype(f(a));
    T acc{};
    for (int i = 0; i < nodes; ++i) {
        Real x = mid + rad * rule.nodes[i];
        T fx = f(x);
        fx *= rule.weights[i];
        acc += fx;
    }
    acc *= rad;
    return acc;
}

namespace detail {
inline Real quad_mag(const Real& v) { return abs(v); }
inline Real quad_mag(const Complex& v) { return abs(v); }
}  // namespace detail

// Node-doubling strategy: n, 2n, ... until two successive estimates agree to
// tol (relative to the larger magnitude, floored by tol_abs); cap 4096 nodes.
template <typename F>
auto integrate_auto(F&& f, const Real& a, const Real& b, const Real& tol_rel,
                    PrecisionContext ctx, const Real& tol_abs = Real(0.0)) -> decltype(f(a)) {
    using T = decltype(f(a));
    T prev = gauss_legendre(f, a, b, 16, ctx);
    for (int n = 32; n <= 4096; n *= 2) {
        T cur = gauss_legendre(f, a, b, n, ctx);
        Real diff = detail::quad_mag(cur - prev);
        Real scale = detail::quad_mag(cur);
        if (diff <= tol_rel * scale + tol_abs) return cur;
        prev = std::move(cur);
    }
    throw numeric_error("integrate_auto: no convergence at 4096 nodes");
}

// Adaptive bisection with a GL16/GL32 error estimate per panel. The absolute
// tolerance is distributed over panels proportionally to width.
template <typename F>
auto integrate_panels(F&& f, const Real& a, const Real& b, const Real& tol_abs,
                      PrecisionContext ctx, int max_depth = 40) -> decltype(f(a)) {
    using T = decltype(f(a));
    struct Panel {
        Real a, b;
        int depth;
    };
    std::vector<Panel> stack{{a, b, 0}};
    T total{};
    Real width = b - a;
    while (!stack.empty()) {
        Panel p = std::move(stack.back());
        stack.pop_back();
        T lo = gauss_legendre(f, p.a, p.b, 16, ctx);
        T hi = gauss_legendre(f, p.a, p.b, 32, ctx);
        Real err = detail::quad_mag(hi - lo);
        Real budget = tol_abs * (p.b - p.a) / width;
        if (err <= budget || p.depth >= max_depth) {
            if (p.depth >= max_depth && err > budget * Real(16.0))
                throw numeric_error("integrate_panels: panel not converged at max depth");
            total += hi;
        } else {
            Real mid = (p.a + p.b) * Real(0.5);
            stack.push_back({p.a, mid, p.depth + 1});
            stack.push_back({mid, p.b, p.depth + 1});
        }
    }
    return total;
}

}  // namespace obscost
