#include "loccsim/coherent.hpp"

#include <cmath>
#include <sstream>

namespace loccsim {

namespace {

void check_params(const CoherentParams& p) {
    if (p.omega <= 0.0)
        throw DomainError("CoherentParams: omega must be > 0");
}

// Displacements of magnitude up to 2 lambda must fit in the truncation.
void check_truncation(double lambda, Index dim) {
    const double x = 4.0 * lambda * lambda; // |2 lambda|^2
    double term = std::exp(-x);
    double sum = term;
    for (Index n = 1; n < dim; ++n) {
        term *= x / static_cast<double>(n);
        sum += term;
    }
    if (1.0 - sum > 1e-8) {
        std::ostringstream msg;
        msg << "propagator: dim " << dim << " does not support displacement "
            << 2.0 * lambda << " (norm deficit " << 1.0 - sum << ")";
        throw TruncationError(msg.str());
    }
}

Matrix free_rotation(Index dim, double omega, double t) {
    Matrix e = Matrix::Zero(dim, dim);
    for (Index n = 0; n < dim; ++n)
        e(n, n) = std::exp(Complex(0, -omega * static_cast<double>(n) * t));
    return e;
}

// Readout pi/2 pulse: inverse of the preparation rotation
// exp(-i pi/4 sigma_y), i.e. (1/sqrt2) [[1, 1], [-1, 1]] in the (L, R)
// basis. With it the bright port sits on |L>.
Matrix readout_pulse() {
    Matrix r(2, 2);
    const double s = 1.0 / std::sqrt(2.0);
    r << s, s, -s, s;
    return r;
}

} // namespace

OperatorMatrix propagator(const CoherentParams& p, double t, Index dim) {
    check_params(p);
    const double lambda = p.lambda();
    check_truncation(lambda, dim);

    // Block-diagonal in the qubit basis: the L branch sees D(lambda), the
    // R branch D(-lambda).
    const Matrix dp = displacement(dim, lambda).mat;
    const Matrix dm = displacement(dim, -lambda).mat;
    const Matrix e = free_rotation(dim, p.omega, t);
    const Matrix ul = dm * e * dp;
    const Matrix ur = dp * e * dm;

    Matrix u = Matrix::Zero(2 * dim, 2 * dim);
    for (Index i = 0; i < dim; ++i)
        for (Index j = 0; j < dim; ++j) {
            u(2 * i, 2 * j) = ul(i, j);
            u(2 * i + 1, 2 * j + 1) = ur(i, j);
        }
    return OperatorMatrix(std::move(u), {dim, 2});
}

double readout_L_population(const DensityState& joint) {
    if (joint.op().num_subsystems() != 2 || joint.dims().back() != 2)
        throw DimensionError("readout_L_population: expected (oscillator, qubit) state");
    const Index dim = joint.dims().front();
    const Matrix r = readout_pulse();
    // P(L) = sum_n <n,L| (1 x R) rho (1 x R)^dag |n,L>
    double p = 0.0;
    for (Index n = 0; n < dim; ++n) {
        Complex acc = 0.0;
        for (Index a = 0; a < 2; ++a)
            for (Index b = 0; b < 2; ++b)
                acc += r(0, a) * joint.matrix()(2 * n + a, 2 * n + b) * std::conj(r(0, b));
        p += acc.real();
    }
    return p;
}

double protocol_signal_numeric(const CoherentParams& p,
                               const DensityState& oscillator_state, double t) {
    if (oscillator_state.op().num_subsystems() != 1)
        throw DomainError("protocol_signal_numeric: oscillator state must live on the oscillator factor only");
    const Index dim = oscillator_state.size();
    const OperatorMatrix u = propagator(p, t, dim);
    const Matrix joint0 = tensor(oscillator_state.op(), qubit_plus().op()).mat;
    Matrix evolved = u.mat * joint0 * u.mat.adjoint();
    auto state = DensityState::make(OperatorMatrix(std::move(evolved), {dim, 2}));
    return readout_L_population(state);
}

double signal_ground(const CoherentParams& p, double t) {
    return signal_thermal(p, 0.0, t);
}

double signal_thermal(const CoherentParams& p, double nbar, double t) {
    check_params(p);
    if (nbar < 0.0)
        throw DomainError("signal_thermal: nbar must be >= 0");
    const double lambda = p.lambda();
    const double s = std::sin(0.5 * p.omega * t);
    return 0.5 * (1.0 + std::exp(-8.0 * lambda * lambda * (2.0 * nbar + 1.0) * s * s));
}

DensityState entangled_midpoint_state(const CoherentParams& p, double t, Index dim) {
    check_params(p);
    const double lambda = p.lambda();
    check_truncation(lambda, dim);
    const Complex delta = lambda * (std::exp(Complex(0, -p.omega * t)) - 1.0);

    const Vector kl = coherent_ket(dim, delta);
    const Vector kr = coherent_ket(dim, -delta);
    Vector psi = Vector::Zero(2 * dim);
    for (Index n = 0; n < dim; ++n) {
        psi(2 * n) = kl(n);
        psi(2 * n + 1) = kr(n);
    }
    return state_from_ket(psi, {dim, 2});
}

} // namespace loccsim
