#include "loccsim/states.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace loccsim {

DensityState DensityState::make(OperatorMatrix op, Tolerances tol) {
    const Matrix& m = op.mat;
    const double herm = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (herm > tol.hermiticity) {
        std::ostringstream msg;
        msg << "DensityState: Hermiticity violated by " << herm;
        throw DomainError(msg.str());
    }
    const double tr_err = std::abs(m.trace() - Complex(1.0, 0.0));
    if (tr_err > tol.trace) {
        std::ostringstream msg;
        msg << "DensityState: trace deviates from 1 by " << tr_err;
        throw DomainError(msg.str());
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()),
                                             Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < -tol.positivity) {
        std::ostringstream msg;
        msg << "DensityState: minimum eigenvalue " << min_eig
            << " below -" << tol.positivity;
        throw DomainError(msg.str());
    }
    return DensityState(std::move(op), tol);
}

DensityState state_from_ket(const Vector& ket, std::vector<Index> dims) {
    const double norm = ket.norm();
    if (norm <= 0.0)
        throw DomainError("state_from_ket: zero vector");
    Vector psi = ket / norm;
    return DensityState::make(OperatorMatrix(psi * psi.adjoint(), std::move(dims)));
}

Vector coherent_ket(Index dim, Complex amp) {
    Vector vac = Vector::Zero(dim);
    vac(0) = 1.0;
    return displacement(dim, amp).mat * vac;
}

namespace {

// Probability kept by the truncated basis for the exact coherent state.
double coherent_norm_deficit(Index dim, Complex amp) {
    const double x = std::norm(amp);
    double term = std::exp(-x);
    double sum = term;
    for (Index n = 1; n < dim; ++n) {
        term *= x / static_cast<double>(n);
        sum += term;
    }
    return 1.0 - sum;
}

} // namespace

DensityState coherent_state(Index dim, Complex amp, double max_norm_deficit) {
    const double deficit = coherent_norm_deficit(dim, amp);
    if (deficit > max_norm_deficit) {
        std::ostringstream msg;
        msg << "coherent_state: truncation keeps norm deficit " << deficit
            << " > " << max_norm_deficit << " at dim " << dim;
        throw TruncationError(msg.str());
    }
    return state_from_ket(coherent_ket(dim, amp), {dim});
}

DensityState thermal_state(Index dim, double nbar, double max_norm_deficit) {
    if (nbar < 0.0)
        throw DomainError("thermal_state: nbar must be >= 0");
    if (dim < 2)
        throw DimensionError("thermal_state: dim must be >= 2");
    Matrix rho = Matrix::Zero(dim, dim);
    if (nbar == 0.0) {
        rho(0, 0) = 1.0;
        return DensityState::make(OperatorMatrix(std::move(rho), {dim}));
    }
    const double ratio = nbar / (nbar + 1.0);
    const double deficit = std::pow(ratio, static_cast<double>(dim));
    if (deficit > max_norm_deficit) {
        std::ostringstream msg;
        msg << "thermal_state: truncation keeps norm deficit " << deficit
            << " > " << max_norm_deficit << " at dim " << dim
            << " for nbar " << nbar;
        throw TruncationError(msg.str());
    }
    double w = 1.0 / (nbar + 1.0);
    double sum = 0.0;
    for (Index n = 0; n < dim; ++n) {
        rho(n, n) = w;
        sum += w;
        w *= ratio;
    }
    rho /= sum;
    return DensityState::make(OperatorMatrix(std::move(rho), {dim}));
}

DensityState vacuum_state(Index dim) {
    return thermal_state(dim, 0.0);
}

namespace {

DensityState qubit_basis_state(Index which) {
    Vector ket = Vector::Zero(2);
    ket(which) = 1.0;
    return state_from_ket(ket, {2});
}

} // namespace

DensityState qubit_L() { return qubit_basis_state(0); }
DensityState qubit_R() { return qubit_basis_state(1); }

DensityState qubit_plus() {
    Vector ket(2);
    ket << 1.0, 1.0;
    return state_from_ket(ket, {2});
}

DensityState product(const DensityState& a, const DensityState& b) {
    return DensityState::make(tensor(a.op(), b.op()));
}

DensityState partial_trace(const DensityState& rho, int keep) {
    return DensityState::make(partial_trace(rho.op(), keep), rho.tolerances());
}

EntanglementReport negativity(const DensityState& rho, int part) {
    if (rho.op().num_subsystems() != 2)
        throw DimensionError("negativity: only two-subsystem bipartitions are supported");
    if (part != 0 && part != 1)
        throw DimensionError("negativity: part must be 0 or 1");
    OperatorMatrix pt = partial_transpose(rho.op(), part);
    Eigen::SelfAdjointEigenSolver<Matrix> es(pt.mat, Eigen::EigenvaluesOnly);
    const auto& w = es.eigenvalues();
    double neg = 0.0;
    for (Index k = 0; k < w.size(); ++k)
        if (w(k) < 0.0) neg -= w(k);
    return {neg, w.minCoeff(), {0, 1}};
}

double purity(const DensityState& rho) {
    return (rho.matrix() * rho.matrix()).trace().real();
}

Complex expectation(const OperatorMatrix& a, const DensityState& rho) {
    if (a.size() != rho.size())
        throw DimensionError("expectation: operator/state dimension mismatch");
    return (a.mat * rho.matrix()).trace();
}

} // namespace loccsim
