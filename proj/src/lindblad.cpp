#include "loccsim/lindblad.hpp"

#include <cmath>
#include <sstream>

namespace loccsim {

LindbladGenerator LindbladGenerator::make(
    OperatorMatrix hamiltonian,
    std::vector<std::pair<OperatorMatrix, double>> jumps,
    double hermiticity_tol) {
    if (!hamiltonian.is_hermitian(hermiticity_tol))
        throw DomainError("LindbladGenerator: Hamiltonian must be Hermitian");
    for (const auto& [op, rate] : jumps) {
        if (rate < 0.0)
            throw DomainError("LindbladGenerator: rates must be >= 0");
        if (op.size() != hamiltonian.size())
            throw DimensionError("LindbladGenerator: jump operator dimension mismatch");
    }
    return {std::move(hamiltonian), std::move(jumps)};
}

LoccParams LoccParams::symmetric(double rate, double omega) {
    if (rate < 0.0)
        throw DomainError("LoccParams::symmetric: rate must be >= 0");
    return {std::sqrt(0.5 * rate), std::sqrt(2.0 * rate), omega};
}

LindbladGenerator build_locc_generator(const LoccParams& p, Index dim,
                                       const LoccGeneratorOptions& options) {
    if (p.alpha < 0.0 || p.beta < 0.0)
        throw DomainError("build_locc_generator: alpha, beta must be >= 0");
    const auto ops = fock_operators(dim);
    const OperatorMatrix id_q = identity({2});
    const OperatorMatrix id_o = identity({dim});
    const OperatorMatrix x_full = tensor(ops.x, id_q);
    const OperatorMatrix sz_full = tensor(id_o, pauli_z());

    const double ab = p.alpha * p.beta;
    double drift_x = 0.0, drift_xsz = 0.0;
    switch (options.convention) {
        case DriftConvention::main_text:
            drift_x = ab;
            drift_xsz = 2.0 * ab;
            break;
        case DriftConvention::appendix:
            drift_x = -ab;
            drift_xsz = ab;
            break;
        case DriftConvention::feedback_average:
            drift_x = ab;
            drift_xsz = ab;
            break;
    }
    if (!options.include_local_drift) drift_x = 0.0;

    Matrix h = Matrix::Zero(2 * dim, 2 * dim);
    if (options.include_free_hamiltonian)
        h += p.omega * tensor(number_operator(dim), id_q).mat;
    h += drift_x * x_full.mat;
    h += drift_xsz * (x_full.mat * sz_full.mat);

    std::vector<std::pair<OperatorMatrix, double>> jumps;
    if (!options.zero_dissipators) {
        if (p.alpha > 0.0) jumps.emplace_back(x_full, 2.0 * p.alpha * p.alpha);
        if (p.beta > 0.0) jumps.emplace_back(sz_full, 0.5 * p.beta * p.beta);
    }

    return LindbladGenerator::make(OperatorMatrix(std::move(h), {dim, 2}),
                                   std::move(jumps));
}

LindbladGenerator coherent_generator(const CoherentParams& p, Index dim) {
    if (p.omega <= 0.0)
        throw DomainError("coherent_generator: omega must be > 0");
    const auto ops = fock_operators(dim);
    Matrix h = p.omega * tensor(number_operator(dim), identity({2})).mat +
               p.g * tensor(ops.x, pauli_z()).mat;
    return LindbladGenerator::make(OperatorMatrix(std::move(h), {dim, 2}), {});
}

namespace {

// Precomputed RK4 right-hand side: L(rho) = K rho + rho K^dag + sum A rho B
// with K = -iH - (1/2) sum rate A^dag A and (A, B) = (sqrt(rate) A, ...).
struct Rhs {
    Matrix k;
    std::vector<Matrix> jump_ops; // rate already absorbed

    explicit Rhs(const LindbladGenerator& gen) {
        const Index n = gen.hamiltonian.size();
        k = Complex(0, -1) * gen.hamiltonian.mat;
        for (const auto& [op, rate] : gen.jumps) {
            if (rate == 0.0) continue;
            Matrix a = std::sqrt(rate) * op.mat;
            k -= 0.5 * (a.adjoint() * a);
            jump_ops.push_back(std::move(a));
        }
        scratch.resize(n, n);
    }

    Matrix operator()(const Matrix& rho) const {
        Matrix out = k * rho;
        out += rho * k.adjoint();
        for (const auto& a : jump_ops) {
            scratch.noalias() = a * rho;
            out.noalias() += scratch * a.adjoint();
        }
        return out;
    }

    mutable Matrix scratch;
};

void rk4_advance(const Rhs& rhs, Matrix& rho, double span, double dt) {
    double t = 0.0;
    while (t < span - 1e-15 * std::max(1.0, span)) {
        const double h = std::min(dt, span - t);
        const Matrix k1 = rhs(rho);
        const Matrix k2 = rhs(rho + (0.5 * h) * k1);
        const Matrix k3 = rhs(rho + (0.5 * h) * k2);
        const Matrix k4 = rhs(rho + h * k3);
        rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += h;
    }
}

DensityState validate_step(Matrix rho, const std::vector<Index>& dims,
                           const IntegrateOptions& options, double dt) {
    try {
        return DensityState::make(
            OperatorMatrix(std::move(rho), dims),
            {options.trace_tol, options.hermiticity_tol, options.positivity_tol});
    } catch (const DomainError& e) {
        std::ostringstream msg;
        msg << "integrate: state left the physical space (" << e.what()
            << "); retry with a smaller dt than " << dt;
        throw IntegrationError(msg.str());
    }
}

} // namespace

DensityState integrate(const LindbladGenerator& gen, const DensityState& rho0,
                       double t_final, double dt, const IntegrateOptions& options) {
    if (dt <= 0.0)
        throw DomainError("integrate: dt must be > 0");
    if (t_final < 0.0)
        throw DomainError("integrate: t_final must be >= 0");
    if (gen.hamiltonian.size() != rho0.size())
        throw DimensionError("integrate: generator/state dimension mismatch");
    Rhs rhs(gen);
    Matrix rho = rho0.matrix();
    rk4_advance(rhs, rho, t_final, dt);
    return validate_step(std::move(rho), rho0.dims(), options, dt);
}

std::vector<DensityState> integrate_path(const LindbladGenerator& gen,
                                         const DensityState& rho0,
                                         const std::vector<double>& times, double dt,
                                         const IntegrateOptions& options) {
    if (dt <= 0.0)
        throw DomainError("integrate_path: dt must be > 0");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < 0.0)
            throw DomainError("integrate_path: times must be nonnegative");
        if (i > 0 && times[i] < times[i - 1])
            throw DomainError("integrate_path: times must be ascending");
    }
    Rhs rhs(gen);
    Matrix rho = rho0.matrix();
    std::vector<DensityState> out;
    out.reserve(times.size());
    double t = 0.0;
    for (double target : times) {
        rk4_advance(rhs, rho, target - t, dt);
        t = target;
        out.push_back(validate_step(rho, rho0.dims(), options, dt));
    }
    return out;
}

std::vector<double> revival_curve(const LoccParams& p, double nbar,
                                  const std::vector<double>& times,
                                  const RevivalOptions& options) {
    const DensityState rho0 = product(
        thermal_state(options.dim, nbar, options.thermal_norm_deficit),
        qubit_plus());
    const LindbladGenerator gen = build_locc_generator(p, options.dim, options.generator);
    const double dt = options.dt_factor * 2.0 * M_PI / p.omega;
    const auto states = integrate_path(gen, rho0, times, dt);
    std::vector<double> curve;
    curve.reserve(states.size());
    for (const auto& s : states)
        curve.push_back(readout_L_population(s));
    return curve;
}

} // namespace loccsim
