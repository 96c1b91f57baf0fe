// model.hpp — system spec, coupling operator, Bohr frequencies, model assembly

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <vector>

#include "sbl/density.hpp"
#include "sbl/errors.hpp"

namespace sbl {

using Complex = std::complex<double>;

struct SystemSpec {
    Eigen::VectorXd eigenvalues;   // strictly increasing
    Eigen::MatrixXcd eigenbasis;   // unitary, columns = eigenvectors
    double degeneracy_tol = 1e-9;

    int dim() const { return static_cast<int>(eigenvalues.size()); }

    static SystemSpec from_levels(std::vector<double> levels, double tol = 1e-9) {
        SystemSpec s;
        s.eigenvalues = Eigen::Map<Eigen::VectorXd>(levels.data(),
                                                    static_cast<Eigen::Index>(levels.size()));
        s.eigenbasis = Eigen::MatrixXcd::Identity(s.dim(), s.dim());
        s.degeneracy_tol = tol;
        s.validate();
        return s;
    }

    void validate() const {
        const int d = dim();
        if (d < 1) throw ConfigError("SystemSpec: empty spectrum");
        for (int i = 0; i + 1 < d; ++i)
            if (!(eigenvalues[i + 1] - eigenvalues[i] > degeneracy_tol))
                throw DegenerateSpectrum("system eigenvalues closer than degeneracy_tol");
        if (eigenbasis.rows() != d || eigenbasis.cols() != d)
            throw ConfigError("SystemSpec: eigenbasis dimension mismatch");
        const Eigen::MatrixXcd dev =
            eigenbasis.adjoint() * eigenbasis - Eigen::MatrixXcd::Identity(d, d);
        if (dev.cwiseAbs().maxCoeff() > 1e-12)
            throw ConfigError("SystemSpec: eigenbasis is not unitary to 1e-12");
    }
};

struct CouplingMatrix {
    Eigen::MatrixXcd entries;

    void validate() const {
        if (entries.rows() != entries.cols())
            throw NonHermitianCoupling("coupling matrix is not square");
        const Eigen::MatrixXcd dev = entries - entries.adjoint();
        if (dev.size() > 0 && dev.cwiseAbs().maxCoeff() > 1e-12)
            throw NonHermitianCoupling("coupling matrix is not Hermitian to 1e-12");
    }
};

// Set of Bohr frequencies eps = e - e', clustered to degeneracy_tol; always
// contains 0 and is closed under negation. pair_lists[k] holds the (i, j)
// level pairs realizing frequencies[k].
struct BohrFrequencySet {
    std::vector<double> frequencies;                     // sorted ascending
    std::vector<std::vector<std::pair<int, int>>> pair_lists;

    int index_of(double eps, double tol) const {
        for (std::size_t k = 0; k < frequencies.size(); ++k)
            if (std::abs(frequencies[k] - eps) <= tol) return static_cast<int>(k);
        return -1;
    }

    static BohrFrequencySet build(const Eigen::VectorXd& energies, double tol) {
        const int d = static_cast<int>(energies.size());
        struct Entry { double eps; int i, j; };
        std::vector<Entry> all;
        all.reserve(static_cast<std::size_t>(d) * d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) all.push_back({energies[i] - energies[j], i, j});
        std::sort(all.begin(), all.end(),
                  [](const Entry& a, const Entry& b) { return a.eps < b.eps; });
        BohrFrequencySet out;
        for (const auto& e : all) {
            if (!out.frequencies.empty() && e.eps - out.frequencies.back() <= tol) {
                out.pair_lists.back().emplace_back(e.i, e.j);
            } else {
                out.frequencies.push_back(e.eps);
                out.pair_lists.push_back({{e.i, e.j}});
            }
        }
        return out;
    }
};

struct SpinBosonModel {
    SystemSpec system;
    CouplingMatrix coupling;       // in the basis the system was specified in
    Eigen::MatrixXcd coupling_eig; // D conjugated into the energy eigenbasis
    SpectralDensity density;
    double lambda = 0.0;
    Complex kappa{0.0, 0.0};
    double alpha = 1.0;
    BohrFrequencySet bohr;

    int dim() const { return system.dim(); }

    // renormalized couplings, always derived
    double eps_renorm() const { return std::pow(std::abs(lambda), 2.0 * std::min(alpha, 1.0)); }
    double eps_breve() const { return std::max(std::abs(lambda), eps_renorm()); }

    // D_eps = sum of P_i D P_j over pairs realizing the k-th Bohr frequency
    Eigen::MatrixXcd bohr_block(int k) const {
        Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(dim(), dim());
        for (auto [i, j] : bohr.pair_lists[static_cast<std::size_t>(k)])
            b(i, j) = coupling_eig(i, j);
        return b;
    }
};

inline SpinBosonModel build_model(SystemSpec system, CouplingMatrix coupling,
                                  SpectralDensity density, double lambda,
                                  Complex kappa = {0.0, 0.0}, double alpha = 1.0) {
    system.validate();
    coupling.validate();
    if (coupling.entries.rows() != system.dim())
        throw ConfigError("coupling dimension does not match system");
    if (!(alpha > 0)) throw ConfigError("alpha must be > 0");
    SpinBosonModel m;
    m.system = std::move(system);
    m.coupling = std::move(coupling);
    m.coupling_eig =
        m.system.eigenbasis.adjoint() * m.coupling.entries * m.system.eigenbasis;
    m.density = std::move(density);
    m.lambda = lambda;
    m.kappa = kappa;
    m.alpha = alpha;
    m.bohr = BohrFrequencySet::build(m.system.eigenvalues, m.system.degeneracy_tol);
    return m;
}

// --------------------------- FGR connectivity check --------------------------

struct FgrReport {
    bool connected = false;
    // chains[i] = strictly descending level path i -> ... -> 0; empty when i is
    // the ground level or unreachable
    std::vector<std::vector<int>> chains;
};

// rates(i, j) = jump rate from level i to level j (nonzero only for j < i).
// Connectivity per the golden-rule assumption: every level reaches the ground
// level through strictly decreasing steps with rate > rate_floor.
inline FgrReport check_fgr_connectivity(const SpinBosonModel& model,
                                        const Eigen::MatrixXd& rates,
                                        double rate_floor = 1e-12) {
    const int d = model.dim();
    FgrReport rep;
    rep.chains.assign(static_cast<std::size_t>(d), {});
    std::vector<bool> reach(static_cast<std::size_t>(d), false);
    std::vector<int> next(static_cast<std::size_t>(d), -1);
    reach[0] = true;
    for (int i = 1; i < d; ++i)
        for (int j = 0; j < i; ++j)
            if (reach[static_cast<std::size_t>(j)] && rates(i, j) > rate_floor) {
                reach[static_cast<std::size_t>(i)] = true;
                next[static_cast<std::size_t>(i)] = j;
                break;
            }
    rep.connected = true;
    for (int i = 1; i < d; ++i) {
        if (!reach[static_cast<std::size_t>(i)]) {
            rep.connected = false;
            continue;
        }
        std::vector<int> chain{i};
        for (int v = i; v != 0; v = next[static_cast<std::size_t>(v)])
            chain.push_back(next[static_cast<std::size_t>(v)]);
        rep.chains[static_cast<std::size_t>(i)] = std::move(chain);
    }
    return rep;
}

} // namespace sbl
