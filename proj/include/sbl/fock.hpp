// fock.hpp — truncated multimode Fock space: mode grids, occupation basis,
// sparse Hamiltonian, Lanczos propagation, reduced states, photon statistics

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <vector>

#include "sbl/correlations.hpp"
#include "sbl/density.hpp"
#include "sbl/errors.hpp"
#include "sbl/model.hpp"
#include "sbl/numerics.hpp"

namespace sbl {

using SparseMat = Eigen::SparseMatrix<Complex>;

// ------------------------------- mode grid -----------------------------------

enum class GridScheme { midpoint, gauss_legendre };

struct ModeGrid {
    std::vector<double> frequencies;  // increasing, positive
    std::vector<Complex> couplings;   // |c_k|^2 = J(w_k) dw_k
    std::vector<double> weights;      // quadrature weights dw_k

    int modes() const { return static_cast<int>(frequencies.size()); }

    // discrete correlation h_K(t) = sum_k |c_k|^2 e^{-i w_k t}
    Complex discrete_correlation(double t) const {
        Complex acc = 0.0;
        for (int k = 0; k < modes(); ++k)
            acc += std::norm(couplings[static_cast<std::size_t>(k)]) *
                   std::exp(Complex(0.0, -frequencies[static_cast<std::size_t>(k)] * t));
        return acc;
    }

    double coupling_weight() const {
        double s = 0.0;
        for (const auto& c : couplings) s += std::norm(c);
        return s;
    }
};

inline ModeGrid build_mode_grid(const SpectralDensity& density, int K, GridScheme scheme) {
    if (K < 1) throw ConfigError("build_mode_grid: K >= 1 required");
    const double wmax = density.omega_max();
    ModeGrid g;
    g.frequencies.resize(static_cast<std::size_t>(K));
    g.weights.resize(static_cast<std::size_t>(K));
    if (scheme == GridScheme::midpoint) {
        const double dw = wmax / K;
        for (int k = 0; k < K; ++k) {
            g.frequencies[static_cast<std::size_t>(k)] = (k + 0.5) * dw;
            g.weights[static_cast<std::size_t>(k)] = dw;
        }
    } else {
        const auto rule = num::gauss_legendre(K);
        for (int k = 0; k < K; ++k) {
            g.frequencies[static_cast<std::size_t>(k)] = 0.5 * wmax * (rule.nodes[static_cast<std::size_t>(k)] + 1.0);
            g.weights[static_cast<std::size_t>(k)] = 0.5 * wmax * rule.weights[static_cast<std::size_t>(k)];
        }
    }
    g.couplings.resize(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k)
        g.couplings[static_cast<std::size_t>(k)] =
            std::sqrt(density(g.frequencies[static_cast<std::size_t>(k)]) *
                      g.weights[static_cast<std::size_t>(k)]);
    return g;
}

// ---------------------------- occupation basis --------------------------------

// Multi-indices (n_1, ..., n_K) with sum <= N_max, lexicographic order; rank
// arithmetic through binomial tables.
class OccupationBasis {
public:
    OccupationBasis(int K, int N_max) : K_(K), N_(N_max) {
        choose_.assign(static_cast<std::size_t>(K_ + N_ + 1),
                       std::vector<double>(static_cast<std::size_t>(N_ + 1), 0.0));
        for (int a = 0; a <= K_ + N_; ++a)
            for (int b = 0; b <= std::min(a, N_); ++b)
                choose_[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
                    (b == 0 || b == a)
                        ? 1.0
                        : choose_[static_cast<std::size_t>(a - 1)][static_cast<std::size_t>(b - 1)] +
                              choose_[static_cast<std::size_t>(a - 1)][static_cast<std::size_t>(b)];
        dim_ = static_cast<std::int64_t>(states_with_budget(K_, N_));
        occupations_.resize(static_cast<std::size_t>(dim_) * static_cast<std::size_t>(K_));
        totals_.resize(static_cast<std::size_t>(dim_));
        std::vector<std::uint8_t> cur(static_cast<std::size_t>(K_), 0);
        std::int64_t idx = 0;
        enumerate(cur, 0, 0, idx);
    }

    int modes() const { return K_; }
    int n_max() const { return N_; }
    std::int64_t dim() const { return dim_; }

    const std::uint8_t* occupation(std::int64_t i) const {
        return &occupations_[static_cast<std::size_t>(i) * static_cast<std::size_t>(K_)];
    }
    int total(std::int64_t i) const { return totals_[static_cast<std::size_t>(i)]; }

    // rank of the state reached from state i by raising mode k (caller checks budget)
    std::int64_t raised_index(std::int64_t i, int k) const {
        const std::uint8_t* n = occupation(i);
        std::int64_t r = 0;
        int used = 0;
        for (int pos = 0; pos < K_; ++pos) {
            const int np = n[pos] + (pos == k ? 1 : 0);
            for (int v = 0; v < np; ++v)
                r += static_cast<std::int64_t>(states_with_budget(K_ - pos - 1, N_ - used - v));
            used += np;
        }
        return r;
    }

private:
    // number of occupation vectors over `slots` modes with total <= budget
    double states_with_budget(int slots, int budget) const {
        if (budget < 0) return 0.0;
        if (slots == 0) return 1.0;
        return choose_[static_cast<std::size_t>(slots + budget)][static_cast<std::size_t>(budget)];
    }

    void enumerate(std::vector<std::uint8_t>& cur, int pos, int used, std::int64_t& idx) {
        if (pos == K_) {
            std::copy(cur.begin(), cur.end(),
                      occupations_.begin() + static_cast<std::ptrdiff_t>(idx) * K_);
            totals_[static_cast<std::size_t>(idx)] = static_cast<std::uint8_t>(used);
            ++idx;
            return;
        }
        for (int v = 0; v + used <= N_; ++v) {
            cur[static_cast<std::size_t>(pos)] = static_cast<std::uint8_t>(v);
            enumerate(cur, pos + 1, used + v, idx);
        }
        cur[static_cast<std::size_t>(pos)] = 0;
    }

    int K_, N_;
    std::int64_t dim_ = 0;
    std::vector<std::vector<double>> choose_;
    std::vector<std::uint8_t> occupations_;
    std::vector<std::uint8_t> totals_;
};

// ------------------------------- Fock states ----------------------------------

struct FockState {
    Eigen::VectorXcd amplitudes; // layout: system level s major, idx = s*dimF + f
    int d_system = 1;
    std::shared_ptr<const OccupationBasis> basis;
    double norm_deficit = 0.0; // mass lost to truncation at construction

    std::int64_t fock_dim() const { return basis->dim(); }

    double norm() const { return amplitudes.norm(); }

    // probability mass sitting on the top occupation shell (sum n = N_max)
    double norm_at_cutoff() const {
        const std::int64_t df = basis->dim();
        double acc = 0.0;
        for (int s = 0; s < d_system; ++s)
            for (std::int64_t f = 0; f < df; ++f)
                if (basis->total(f) == basis->n_max())
                    acc += std::norm(amplitudes[s * df + f]);
        return acc;
    }
};

inline FockState vacuum_state(std::shared_ptr<const OccupationBasis> basis, int d_system,
                              int level) {
    FockState st;
    st.basis = std::move(basis);
    st.d_system = d_system;
    st.amplitudes = Eigen::VectorXcd::Zero(d_system * st.basis->dim());
    st.amplitudes[level * st.basis->dim() + 0] = 1.0; // index 0 is the vacuum
    return st;
}

inline FockState system_state_times_vacuum(std::shared_ptr<const OccupationBasis> basis,
                                           const Eigen::VectorXcd& sys_vec) {
    FockState st;
    st.basis = std::move(basis);
    st.d_system = static_cast<int>(sys_vec.size());
    st.amplitudes = Eigen::VectorXcd::Zero(st.d_system * st.basis->dim());
    for (int s = 0; s < st.d_system; ++s) st.amplitudes[s * st.basis->dim() + 0] = sys_vec[s];
    return st;
}

// --------------------------- truncated Hamiltonian ----------------------------

struct TruncatedHamiltonian {
    SparseMat matrix;
    int d_system = 1;
    std::shared_ptr<const OccupationBasis> basis;
    double norm_estimate = 0.0; // Gershgorin bound, used by the propagator
};

// H = H_S (x) 1 + 1 (x) sum_k w_k n_k + lambda D (x) sum_k (c_k a_k^+ + conj(c_k) a_k)
inline TruncatedHamiltonian build_hamiltonian(const SpinBosonModel& model,
                                              const ModeGrid& grid, int N_max,
                                              std::int64_t max_dim = 2'000'000) {
    const int dS = model.dim();
    const int K = grid.modes();
    auto basis = std::make_shared<OccupationBasis>(K, N_max);
    const std::int64_t dF = basis->dim();
    if (dS * dF > max_dim)
        throw DimensionBudgetExceeded("build_hamiltonian: " + std::to_string(dS * dF) +
                                      " states exceed budget " + std::to_string(max_dim));

    std::vector<Eigen::Triplet<Complex>> trips;
    trips.reserve(static_cast<std::size_t>(dS * dF) * (1 + 2 * K));
    const Eigen::MatrixXcd& d = model.coupling_eig;
    for (std::int64_t f = 0; f < dF; ++f) {
        const std::uint8_t* occ = basis->occupation(f);
        double efield = 0.0;
        for (int k = 0; k < K; ++k) efield += occ[k] * grid.frequencies[static_cast<std::size_t>(k)];
        for (int s = 0; s < dS; ++s)
            trips.emplace_back(s * dF + f, s * dF + f,
                               Complex(model.system.eigenvalues[s] + efield, 0.0));
        if (model.lambda != 0.0) {
            for (int k = 0; k < K; ++k) {
                if (basis->total(f) + 1 > N_max) break;
                const std::int64_t g = basis->raised_index(f, k);
                const double boost = std::sqrt(static_cast<double>(occ[k] + 1));
                const Complex amp = model.lambda * grid.couplings[static_cast<std::size_t>(k)] * boost;
                for (int s = 0; s < dS; ++s)
                    for (int sp = 0; sp < dS; ++sp) {
                        if (d(s, sp) == Complex(0.0, 0.0)) continue;
                        // creation: |sp, f> -> |s, f + e_k>
                        trips.emplace_back(s * dF + g, sp * dF + f, d(s, sp) * amp);
                        // annihilation: Hermitian mirror
                        trips.emplace_back(sp * dF + f, s * dF + g, std::conj(d(s, sp) * amp));
                    }
            }
        }
    }
    TruncatedHamiltonian H;
    H.d_system = dS;
    H.basis = basis;
    H.matrix.resize(dS * dF, dS * dF);
    H.matrix.setFromTriplets(trips.begin(), trips.end());
    // Gershgorin estimate of the spectral radius
    Eigen::VectorXd row_abs = Eigen::VectorXd::Zero(dS * dF);
    for (int col = 0; col < H.matrix.outerSize(); ++col)
        for (SparseMat::InnerIterator it(H.matrix, col); it; ++it)
            row_abs[it.row()] += std::abs(it.value());
    H.norm_estimate = row_abs.maxCoeff();
    return H;
}

inline Complex energy_expectation(const TruncatedHamiltonian& H, const FockState& psi) {
    return psi.amplitudes.dot(H.matrix * psi.amplitudes);
}

// ------------------------------- propagation ----------------------------------

// e^{-iHt} psi by Lanczos with subspace dimension <= 30 and adaptive
// substepping; local error target 1e-10 per substep, estimated from the
// difference with the depth-(m-2) approximation.
inline FockState propagate(const TruncatedHamiltonian& H, const FockState& psi0, double t,
                           double local_tol = 1e-10, int subspace = 30) {
    FockState out = psi0;
    if (t == 0.0 || psi0.amplitudes.size() == 0) return out;
    const double direction = t >= 0 ? 1.0 : -1.0;
    double remaining = std::abs(t);
    const std::int64_t n = out.amplitudes.size();
    const int m_cap = static_cast<int>(std::min<std::int64_t>(subspace, n));

    double dt = std::min(remaining, 2.0 * m_cap / std::max(H.norm_estimate, 1e-12));
    Eigen::MatrixXcd v(n, m_cap + 1);
    Eigen::VectorXd alpha(m_cap), beta(m_cap);

    const double norm0 = out.amplitudes.norm();
    int guard = 0;
    while (remaining > 1e-14 * std::abs(t)) {
        if (++guard > 2'000'000)
            throw PropagationToleranceFailure("propagate: step count blew up");
        const double beta0 = out.amplitudes.norm();
        if (beta0 < 1e-300) break; // the zero vector is stationary
        v.col(0) = out.amplitudes / beta0;
        int m = 0;
        bool breakdown = false;
        for (; m < m_cap; ++m) {
            Eigen::VectorXcd w = H.matrix * v.col(m);
            if (m > 0) w -= beta[m - 1] * v.col(m - 1);
            const Complex a = v.col(m).dot(w);
            w -= a * v.col(m);
            // full reorthogonalization, twice
            for (int pass = 0; pass < 2; ++pass)
                for (int j = 0; j <= m; ++j) w -= v.col(j).dot(w) * v.col(j);
            alpha[m] = a.real();
            beta[m] = w.norm();
            if (beta[m] < 1e-13 * H.norm_estimate) {
                breakdown = true;
                ++m;
                break;
            }
            v.col(m + 1) = w / beta[m];
        }
        const int mm = m;
        Eigen::MatrixXd tmat = Eigen::MatrixXd::Zero(mm, mm);
        for (int i = 0; i < mm; ++i) {
            tmat(i, i) = alpha[i];
            if (i + 1 < mm) tmat(i, i + 1) = tmat(i + 1, i) = beta[i];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(tmat);

        double step = std::min(dt, remaining);
        for (;;) {
            auto krylov_coeffs = [&](int depth) -> Eigen::VectorXcd {
                Eigen::VectorXcd e1 = Eigen::VectorXcd::Zero(mm);
                if (depth == mm) {
                    Eigen::VectorXcd ph(mm);
                    for (int i = 0; i < mm; ++i)
                        ph[i] = std::exp(Complex(0.0, -direction * step * eig.eigenvalues()[i]));
                    const Eigen::VectorXd q0 = eig.eigenvectors().row(0).transpose();
                    Eigen::VectorXcd y =
                        eig.eigenvectors().cast<Complex>() * (ph.array() * q0.array().cast<Complex>()).matrix();
                    return beta0 * y;
                }
                // reduced-depth comparison solve
                Eigen::MatrixXd tm = tmat.topLeftCorner(depth, depth);
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tm);
                Eigen::VectorXcd ph(depth);
                for (int i = 0; i < depth; ++i)
                    ph[i] = std::exp(Complex(0.0, -direction * step * es.eigenvalues()[i]));
                const Eigen::VectorXd q0 = es.eigenvectors().row(0).transpose();
                Eigen::VectorXcd y =
                    es.eigenvectors().cast<Complex>() * (ph.array() * q0.array().cast<Complex>()).matrix();
                Eigen::VectorXcd padded = Eigen::VectorXcd::Zero(mm);
                padded.head(depth) = beta0 * y;
                return padded;
            };
            const Eigen::VectorXcd y_full = krylov_coeffs(mm);
            double err = 0.0;
            if (!breakdown && mm >= 4) {
                err = (y_full - krylov_coeffs(mm - 2)).norm();
            }
            if (breakdown || err <= local_tol * std::max(1.0, step) || step <= 1e-13) {
                out.amplitudes.noalias() = v.leftCols(mm) * y_full;
                remaining -= step;
                if (!breakdown && err < 0.1 * local_tol) dt = step * 1.4;
                else dt = step;
                break;
            }
            step *= 0.5;
        }
    }
    const double drift = std::abs(out.amplitudes.norm() - norm0);
    if (drift > 1e-9 * std::max(1.0, std::abs(t)))
        throw PropagationToleranceFailure("propagate: norm drift " + std::to_string(drift));
    return out;
}

// ------------------------------ reduced objects --------------------------------

// Tr_F |psiA><psiB| — equal arguments give the reduced density matrix.
inline Eigen::MatrixXcd reduced_cross(const FockState& a, const FockState& b) {
    const std::int64_t dF = a.fock_dim();
    const int dS = a.d_system;
    Eigen::Map<const Eigen::MatrixXcd> ma(a.amplitudes.data(), dF, dS);
    Eigen::Map<const Eigen::MatrixXcd> mb(b.amplitudes.data(), dF, dS);
    return ma.transpose() * mb.conjugate();
}

inline Eigen::MatrixXcd reduced_density(const FockState& psi) {
    return reduced_cross(psi, psi);
}

// <psi, e^{kappa N} psi>, exact on the truncated space
inline Complex photon_moment(const FockState& psi, Complex kappa) {
    const std::int64_t dF = psi.fock_dim();
    Complex acc = 0.0;
    for (int s = 0; s < psi.d_system; ++s)
        for (std::int64_t f = 0; f < dF; ++f) {
            const double p = std::norm(psi.amplitudes[s * dF + f]);
            if (p > 0.0) acc += p * std::exp(kappa * static_cast<double>(psi.basis->total(f)));
        }
    return acc;
}

inline double mean_photon_number(const FockState& psi) {
    const std::int64_t dF = psi.fock_dim();
    double acc = 0.0;
    for (int s = 0; s < psi.d_system; ++s)
        for (std::int64_t f = 0; f < dF; ++f)
            acc += std::norm(psi.amplitudes[s * dF + f]) * psi.basis->total(f);
    return acc;
}

// ------------------------------ coherent states --------------------------------

// W(psi) Omega on the truncated space: per-mode coherent amplitudes
// alpha_k = i psi(w_k) sqrt(dw_k). Throws TailTooHeavy when more than 1% of the
// coherent mass lies above the truncation shell.
inline FockState weyl_vacuum_state(const ModeGrid& grid, const RadialProfile& profile,
                                   int N_max, double tail_threshold = 0.01) {
    const int K = grid.modes();
    auto basis = std::make_shared<OccupationBasis>(K, N_max);
    std::vector<Complex> alpha(static_cast<std::size_t>(K));
    double mu = 0.0;
    for (int k = 0; k < K; ++k) {
        alpha[static_cast<std::size_t>(k)] =
            Complex(0.0, 1.0) * profile.value(grid.frequencies[static_cast<std::size_t>(k)]) *
            std::sqrt(grid.weights[static_cast<std::size_t>(k)]);
        mu += std::norm(alpha[static_cast<std::size_t>(k)]);
    }
    // total-count distribution is Poisson(mu); mass above N_max
    double cdf = 0.0, term = std::exp(-mu);
    for (int n = 0; n <= N_max; ++n) {
        cdf += term;
        term *= mu / (n + 1);
    }
    const double deficit = std::max(0.0, 1.0 - cdf);
    if (deficit > tail_threshold)
        throw TailTooHeavy("weyl_vacuum_state: " + std::to_string(100 * deficit) +
                           "% coherent mass above the truncation shell");

    FockState st;
    st.basis = basis;
    st.d_system = 1;
    st.norm_deficit = deficit;
    st.amplitudes.resize(basis->dim());
    for (std::int64_t f = 0; f < basis->dim(); ++f) {
        const std::uint8_t* occ = basis->occupation(f);
        Complex amp = std::exp(-0.5 * mu);
        for (int k = 0; k < K; ++k) {
            for (int v = 1; v <= occ[k]; ++v)
                amp *= alpha[static_cast<std::size_t>(k)] / std::sqrt(static_cast<double>(v));
        }
        st.amplitudes[f] = amp;
    }
    st.amplitudes /= st.amplitudes.norm();
    return st;
}

inline FockState weyl_vacuum_state(const ModeGrid& grid, const BoundaryProfiles& profiles,
                                   int N_max, double tail_threshold = 0.01) {
    return weyl_vacuum_state(grid, profiles.psi_left, N_max, tail_threshold);
}

} // namespace sbl
