// superop.hpp — dense superoperators on vectorized density matrices
// Column-major vectorization: vec(rho)[i + d*j] = rho(i, j), so
// vec(A rho B) = (B^T (x) A) vec(rho).

#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <complex>

namespace sbl {

using SuperOp = Eigen::MatrixXcd;

inline Eigen::VectorXcd vec(const Eigen::MatrixXcd& rho) {
    return Eigen::Map<const Eigen::VectorXcd>(rho.data(), rho.size());
}

inline Eigen::MatrixXcd unvec(const Eigen::VectorXcd& v, int d) {
    return Eigen::Map<const Eigen::MatrixXcd>(v.data(), d, d);
}

inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// rho -> A rho
inline SuperOp left_mult(const Eigen::MatrixXcd& a) {
    return kron(Eigen::MatrixXcd::Identity(a.rows(), a.cols()), a);
}

// rho -> rho A
inline SuperOp right_mult(const Eigen::MatrixXcd& a) {
    return kron(a.transpose(), Eigen::MatrixXcd::Identity(a.rows(), a.cols()));
}

// rho -> [H, rho]
inline SuperOp commutator_superop(const Eigen::MatrixXcd& h) {
    return left_mult(h) - right_mult(h);
}

// e^{-i s ad(H)} for diagonal H given by its energies: diagonal superoperator
// with entries e^{-i s (E_i - E_j)}.
inline Eigen::VectorXcd free_phase_diag(const Eigen::VectorXd& energies, double s) {
    const int d = static_cast<int>(energies.size());
    Eigen::VectorXcd ph(d * d);
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < d; ++i)
            ph[i + d * j] = std::exp(std::complex<double>(0.0, -s * (energies[i] - energies[j])));
    return ph;
}

inline SuperOp superop_exp(const SuperOp& g, double t) {
    return (g * t).exp();
}

} // namespace sbl
