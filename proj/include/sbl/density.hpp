// density.hpp — radial spectral density J(w) of the field coupling

#pragma once

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "sbl/errors.hpp"
#include "sbl/numerics.hpp"

namespace sbl {

// J(w) on (0, omega_max]. All field couplings enter only through J: the
// correlation function is h(t) = \int_0^{omega_max} J(w) e^{-iwt} dw.
class SpectralDensity {
public:
    enum class Kind { analytic_family, tabulated, callback };

    // J(w) = amplitude * w^gamma * exp(-w/omega_c), hard cutoff at omega_max
    // (default 40*omega_c).
    static SpectralDensity analytic(double gamma, double omega_c, double amplitude,
                                    double omega_max = 0.0) {
        if (!(gamma > 0) || !(omega_c > 0) || !(amplitude > 0))
            throw NegativeDensity("analytic family needs gamma, omega_c, amplitude > 0");
        SpectralDensity d;
        d.kind_ = Kind::analytic_family;
        d.gamma_ = gamma;
        d.omega_c_ = omega_c;
        d.amplitude_ = amplitude;
        d.omega_max_ = omega_max > 0 ? omega_max : 40.0 * omega_c;
        return d;
    }

    static SpectralDensity zero(double omega_max = 1.0) {
        SpectralDensity d;
        d.kind_ = Kind::callback;
        d.fn_ = [](double) { return 0.0; };
        d.omega_max_ = omega_max;
        return d;
    }

    // piecewise-linear table on an increasing grid; omega_max = grid maximum
    static SpectralDensity tabulated(std::vector<double> grid, std::vector<double> values) {
        if (grid.size() != values.size() || grid.size() < 2)
            throw ConfigError("tabulated density needs matching grid/values, size >= 2");
        for (std::size_t i = 0; i + 1 < grid.size(); ++i)
            if (!(grid[i] < grid[i + 1]))
                throw ConfigError("tabulated density grid must be strictly increasing");
        for (double v : values)
            if (v < 0) throw NegativeDensity("tabulated density has negative value");
        SpectralDensity d;
        d.kind_ = Kind::tabulated;
        d.omega_max_ = grid.back();
        d.grid_ = std::move(grid);
        d.values_ = std::move(values);
        return d;
    }

    static SpectralDensity from_callback(std::function<double(double)> fn, double omega_max) {
        if (!(omega_max > 0)) throw ConfigError("callback density needs omega_max > 0");
        SpectralDensity d;
        d.kind_ = Kind::callback;
        d.fn_ = std::move(fn);
        d.omega_max_ = omega_max;
        // spot check nonnegativity
        for (int i = 1; i <= 512; ++i) {
            const double w = omega_max * i / 512.0;
            if (d.fn_(w) < 0) throw NegativeDensity("callback density negative at sampled w");
        }
        return d;
    }

    double operator()(double w) const {
        if (w <= 0 || w > omega_max_) return 0.0;
        switch (kind_) {
            case Kind::analytic_family:
                return amplitude_ * std::pow(w, gamma_) * std::exp(-w / omega_c_);
            case Kind::tabulated: {
                auto it = std::upper_bound(grid_.begin(), grid_.end(), w);
                if (it == grid_.begin()) {
                    // extend linearly from the first segment down to 0
                    const double w0 = grid_[0], w1 = grid_[1];
                    const double s = (values_[1] - values_[0]) / (w1 - w0);
                    return std::max(0.0, values_[0] + s * (w - w0));
                }
                if (it == grid_.end()) return values_.back();
                const std::size_t j = static_cast<std::size_t>(it - grid_.begin());
                const double f = (w - grid_[j - 1]) / (grid_[j] - grid_[j - 1]);
                return values_[j - 1] + f * (values_[j] - values_[j - 1]);
            }
            case Kind::callback:
                return fn_(w);
        }
        return 0.0;
    }

    Kind kind() const { return kind_; }
    double omega_max() const { return omega_max_; }
    bool is_analytic() const { return kind_ == Kind::analytic_family; }
    double gamma() const { return gamma_; }
    double omega_c() const { return omega_c_; }
    double amplitude() const { return amplitude_; }

    // \int_0^{omega_max} J dw
    double total_weight() const {
        auto r = num::integrate_to_zero([this](double w) { return (*this)(w); }, omega_max_);
        return r.value;
    }

private:
    Kind kind_ = Kind::callback;
    double gamma_ = 0, omega_c_ = 0, amplitude_ = 0;
    double omega_max_ = 0;
    std::vector<double> grid_, values_;
    std::function<double(double)> fn_;
};

} // namespace sbl
