// numerics.hpp — Gauss-Legendre panels, oscillatory and principal-value quadrature

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <type_traits>
#include <limits>
#include <vector>

#include "sbl/errors.hpp"

namespace sbl::num {

using Complex = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;

// --------------------------- Gauss-Legendre rules ----------------------------

struct GaussRule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

// Newton iteration on P_n; nodes accurate to machine precision for n <= ~200.
inline GaussRule gauss_legendre(int n) {
    GaussRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        r.nodes[i] = -x;
        r.nodes[n - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        r.weights[i] = w;
        r.weights[n - 1 - i] = w;
    }
    return r;
}

inline const GaussRule& gauss16() {
    static const GaussRule r = gauss_legendre(16);
    return r;
}

// Single-panel GL16 on [a, b].
template <typename F>
auto panel_gl16(F&& f, double a, double b) -> std::decay_t<decltype(f(a))> {
    using T = std::decay_t<decltype(f(a))>;
    const auto& r = gauss16();
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    T acc = f(c + h * r.nodes[0]) * (h * r.weights[0]);
    for (int i = 1; i < 16; ++i) acc += f(c + h * r.nodes[i]) * (h * r.weights[i]);
    return acc;
}

template <typename T>
struct QuadResult {
    T value{};
    double abs_error = 0.0;
    bool converged = false;
};

// magnitude that works for scalars, complex, and Eigen matrices
template <typename T>
double mag_of(const T& x) {
    if constexpr (requires { x.cwiseAbs().maxCoeff(); }) {
        return x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff();
    } else {
        return std::abs(x);
    }
}

// Composite GL16 with panel width <= max_width, doubled until two successive
// refinements agree to rel_tol (relative to `scale`, or |value| when scale==0).
template <typename F>
auto integrate_panels(F&& f, double a, double b, double max_width,
                      double rel_tol = 1e-10, double scale = 0.0, int max_doublings = 12)
    -> QuadResult<std::decay_t<decltype(f(a))>> {
    using T = std::decay_t<decltype(f(a))>;
    QuadResult<T> out;
    if (!(b > a)) {
        out.converged = true;
        return out;
    }
    int n = std::max(1, static_cast<int>(std::ceil((b - a) / max_width)));
    T prev = f(a) * 0.0;
    for (int pass = 0; pass <= max_doublings; ++pass) {
        T sum = f(a) * 0.0;
        const double h = (b - a) / n;
        for (int i = 0; i < n; ++i) sum += panel_gl16(f, a + i * h, a + (i + 1) * h);
        if (pass > 0) {
            const double ref = scale > 0 ? scale : std::max(mag_of(sum), 1e-300);
            out.abs_error = mag_of(T(sum - prev));
            if (out.abs_error <= rel_tol * ref) {
                out.value = sum;
                out.converged = true;
                return out;
            }
        }
        prev = sum;
        n *= 2;
    }
    out.value = prev;
    return out;
}

// Integrate f over (0, b] with geometric panels toward 0; detects a
// non-integrable endpoint by octave contributions failing to decay.
template <typename F>
auto integrate_to_zero(F&& f, double b, double rel_tol = 1e-10)
    -> QuadResult<std::decay_t<decltype(f(b))>> {
    using T = std::decay_t<decltype(f(b))>;
    QuadResult<T> out;
    T sum = f(b) * 0.0;
    double hi = b, scale = 0.0, prev_mag = std::numeric_limits<double>::infinity();
    int stall = 0;
    for (int k = 0; k < 220; ++k) {
        const double lo = hi * 0.5;
        auto part = integrate_panels(f, lo, hi, (hi - lo) * 0.5, 1e-12);
        const double mag = mag_of(part.value);
        sum += part.value;
        scale = std::max(scale, mag_of(sum));
        if (mag <= rel_tol * std::max(scale, 1e-300)) {
            out.value = sum;
            out.converged = true;
            return out;
        }
        if (k > 30) {
            stall = (mag > 0.95 * prev_mag) ? stall + 1 : 0;
            if (stall > 12)
                throw DivergentIntegral("integrate_to_zero: endpoint contribution does not decay");
        }
        prev_mag = mag;
        hi = lo;
    }
    throw DivergentIntegral("integrate_to_zero: no convergence after 220 octaves");
}

// Principal value of \int_a^b g(w) / (pole - w) dw with g smooth, a < pole < b.
// Singularity subtracted: g(pole) * log((pole-a)/(b-pole)) carries the PV part.
inline double principal_value(const std::function<double(double)>& g, double pole,
                              double a, double b, double rel_tol = 1e-10) {
    if (!(pole > a && pole < b)) {
        auto r = integrate_panels([&](double w) { return g(w) / (pole - w); }, a, b,
                                  (b - a) / 64.0, rel_tol);
        return r.value;
    }
    const double gp = g(pole);
    const double h = std::max(1e-7, 1e-7 * std::abs(pole));
    const double dg = (g(pole + h) - g(pole - h)) / (2 * h);
    auto reg = [&](double w) {
        const double d = pole - w;
        if (std::abs(d) < 1e-9 * std::max(1.0, std::abs(pole))) return -dg;
        return (g(w) - gp) / d;
    };
    // split at the pole so no panel straddles it
    auto r1 = integrate_panels(reg, a, pole, (pole - a) / 64.0, rel_tol);
    auto r2 = integrate_panels(reg, pole, b, (b - pole) / 64.0, rel_tol);
    return r1.value + r2.value + gp * std::log((pole - a) / (b - pole));
}

// Simple bisection on a monotone predicate: returns the sup of {x : pred(x)}
// within [lo, hi] to absolute tolerance tol. pred(lo) is assumed true.
inline double bisect_sup(const std::function<bool(double)>& pred, double lo, double hi,
                         double tol) {
    if (pred(hi)) return hi;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (pred(mid) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace sbl::num
