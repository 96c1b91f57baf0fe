// vanhove.hpp — closed forms for the quadratic (single-level) Hamiltonian:
// ground-state data, Weyl-observable dynamics, photon-number generating function

#pragma once

#include <cmath>
#include <complex>
#include <limits>

#include "sbl/correlations.hpp"
#include "sbl/density.hpp"
#include "sbl/errors.hpp"
#include "sbl/numerics.hpp"

namespace sbl {

// Vacuum overlap |<Omega, W(psi) Omega>| = exp(-c ||psi||^2). The printed
// asymptotic formula and the quadrature convention disagree on c (1 vs 1/2);
// the truncated-Fock expansion of exp(i Phi(psi)) decides for 1/2, and the
// comparison is kept as a test. Exported so outputs can carry the value used.
inline constexpr double weyl_vacuum_overlap_exponent = 0.5;

struct VanHoveModel {
    SpectralDensity density;
    double profile_phi_over_omega_sq_norm = 0.0; // \int J/w^2, +inf when divergent
    double E_gs = 0.0;                           // -\int J/w, NaN when divergent
    bool has_ground_state = false;
};

inline VanHoveModel build_vanhove(SpectralDensity density) {
    VanHoveModel m{std::move(density)};
    try {
        auto r = num::integrate_to_zero(
            [&](double w) { return m.density(w) / (w * w); }, m.density.omega_max());
        m.profile_phi_over_omega_sq_norm = r.value;
        m.has_ground_state = true;
    } catch (const DivergentIntegral&) {
        m.profile_phi_over_omega_sq_norm = std::numeric_limits<double>::infinity();
        m.has_ground_state = false;
    }
    try {
        auto r = num::integrate_to_zero(
            [&](double w) { return m.density(w) / w; }, m.density.omega_max());
        m.E_gs = -r.value;
    } catch (const DivergentIntegral&) {
        m.E_gs = std::numeric_limits<double>::quiet_NaN();
    }
    return m;
}

// E_gs = -\int_0^{omega_max} J(w)/w dw
inline double ground_state_energy(const VanHoveModel& m) {
    if (std::isnan(m.E_gs))
        throw DivergentIntegral("ground_state_energy: J(w)/w not integrable at 0");
    return m.E_gs;
}

// ||phi_t||^2 = 2 \int J(w) (1 - cos(w t)) / w^2 dw  (finite for finite t even
// without a ground state, since (1-cos)/w^2 is bounded by t^2/2)
inline double phi_t_norm_sq(const VanHoveModel& m, double t) {
    const double wmax = m.density.omega_max();
    auto f = [&](double w) {
        const double x = w * t;
        // stable 1 - cos for small arguments
        const double one_minus_cos = (std::abs(x) < 1e-4)
                                         ? 0.5 * x * x * (1.0 - x * x / 12.0)
                                         : 1.0 - std::cos(x);
        return 2.0 * m.density(w) * one_minus_cos / (w * w);
    };
    // oscillatory in w for large t: cap panel width at pi/|t| away from 0
    const double width = std::min(wmax / 8.0, num::pi / std::max(std::abs(t), 1.0));
    double acc = 0.0;
    // (0, w0] with geometric refinement, [w0, wmax] with capped panels
    const double w0 = std::min(1.0, wmax);
    acc += num::integrate_to_zero(f, w0).value;
    if (wmax > w0) acc += num::integrate_panels(f, w0, wmax, width, 1e-10).value;
    return acc;
}

// <e^{kappa N}>_t = exp((e^kappa - 1) ||phi_t||^2); the derivative at kappa = 0
// is the mean photon number ||phi_t||^2.
inline Complex photon_generating_function(const VanHoveModel& m, Complex kappa, double t) {
    if (kappa == Complex(0.0, 0.0)) return 1.0;
    const double n = phi_t_norm_sq(m, t);
    return std::exp((std::exp(kappa) - 1.0) * n);
}

inline double mean_photon_number(const VanHoveModel& m, double t) {
    return phi_t_norm_sq(m, t);
}

// Vacuum expectation of the Heisenberg-evolved Weyl observable W(psi_right):
//   modulus exp(-c ||psi_right||^2), c = weyl_vacuum_overlap_exponent,
//   phase   exp(2i Re <psi_right, (e^{iwt} - 1) phi / w>).
inline Complex weyl_expectation(const VanHoveModel& m, const BoundaryProfiles& profiles,
                                double t) {
    const double wmax = m.density.omega_max();
    const auto& pr = profiles.psi_right.value;
    const double nrm = profiles.psi_right.norm_sq(wmax);
    // inner = \int conj(J_right(w)) (e^{iwt} - 1)/w dw, J_right = sqrt(J) psi_right
    auto f = [&](double w) -> Complex {
        const Complex cross = std::conj(std::sqrt(m.density(w)) * pr(w));
        const Complex phase = std::exp(Complex(0.0, w * t)) - 1.0;
        return cross * phase / w;
    };
    Complex inner = 0.0;
    const double w0 = std::min(1.0, wmax);
    try {
        inner += num::integrate_to_zero(f, w0).value;
    } catch (const DivergentIntegral&) {
        throw DivergentIntegral("weyl_expectation: cross density / w not integrable");
    }
    if (wmax > w0) {
        const double width = std::min(wmax / 8.0, num::pi / std::max(std::abs(t), 1.0));
        inner += num::integrate_panels(f, w0, wmax, width, 1e-10).value;
    }
    const double modulus = std::exp(-weyl_vacuum_overlap_exponent * nrm);
    return modulus * std::exp(Complex(0.0, 2.0 * inner.real()));
}

} // namespace sbl
