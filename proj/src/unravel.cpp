#include "loccsim/unravel.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <thread>

#include <Eigen/Eigenvalues>

#include "loccsim/rng.hpp"

namespace loccsim {

namespace {

// The conditional dynamics factorizes over the qubit: every operator in
// play is x (tridiagonal), a^dag a (diagonal) or sigma_z (diagonal), so the
// joint state is held as four oscillator-sized blocks rho[a][b] with
// a, b in {L, R} and all updates stay O(dim^2) except the feedback
// conjugation.
struct BlockState {
    Matrix b[2][2];
};

struct SmeWorkspace {
    Index dim;
    LoccParams p;
    Eigen::VectorXd sqrt_n;   // sqrt(1..dim-1), the x off-diagonal
    Eigen::VectorXd x_eigs;
    Matrix x_vecs;            // x = V diag(x_eigs) V^dag

    SmeWorkspace(const LoccParams& params, Index d) : dim(d), p(params) {
        if (d < 2)
            throw DimensionError("sme: oscillator dimension must be >= 2");
        sqrt_n.resize(d - 1);
        for (Index n = 1; n < d; ++n)
            sqrt_n(n - 1) = std::sqrt(static_cast<double>(n));
        Eigen::SelfAdjointEigenSolver<Matrix> es(fock_operators(d).x.mat);
        x_eigs = es.eigenvalues();
        x_vecs = es.eigenvectors();
    }

    // Elementwise phases of the exact free rotation over one step:
    // rho_ij -> e^{-i omega (i-j) dt} rho_ij. The Hamiltonian part is the
    // stiff piece of the dynamics, so it is applied exactly rather than to
    // first order; the measurement and feedback terms stay Euler-Maruyama.
    Matrix free_rotation_phases(double dt) const {
        Matrix rot(dim, dim);
        for (Index i = 0; i < dim; ++i)
            for (Index j = 0; j < dim; ++j)
                rot(i, j) = std::exp(
                    Complex(0, -p.omega * dt * static_cast<double>(i - j)));
        return rot;
    }
};

// out = x m (x tridiagonal with off-diagonal sqrt_n).
void x_left(const SmeWorkspace& ws, const Matrix& m, Matrix& out) {
    const Index d = ws.dim;
    out.setZero(d, d);
    for (Index i = 0; i < d; ++i) {
        if (i > 0) out.row(i) += ws.sqrt_n(i - 1) * m.row(i - 1);
        if (i + 1 < d) out.row(i) += ws.sqrt_n(i) * m.row(i + 1);
    }
}

// out = m x.
void x_right(const SmeWorkspace& ws, const Matrix& m, Matrix& out) {
    const Index d = ws.dim;
    out.setZero(d, d);
    for (Index j = 0; j < d; ++j) {
        if (j > 0) out.col(j) += ws.sqrt_n(j - 1) * m.col(j - 1);
        if (j + 1 < d) out.col(j) += ws.sqrt_n(j) * m.col(j + 1);
    }
}

double block_trace_real(const Matrix& m) {
    return m.trace().real();
}

// <x (x) 1> of the block state.
double expectation_x(const SmeWorkspace& ws, const BlockState& rho) {
    Complex acc = 0.0;
    for (int a = 0; a < 2; ++a) {
        const Matrix& m = rho.b[a][a];
        for (Index i = 0; i + 1 < ws.dim; ++i)
            acc += ws.sqrt_n(i) * (m(i + 1, i) + m(i, i + 1));
    }
    return acc.real();
}

BlockState to_blocks(const Matrix& joint, Index dim) {
    BlockState s;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            s.b[a][b].resize(dim, dim);
            for (Index i = 0; i < dim; ++i)
                for (Index j = 0; j < dim; ++j)
                    s.b[a][b](i, j) = joint(2 * i + a, 2 * j + b);
        }
    return s;
}

Matrix from_blocks(const BlockState& s, Index dim) {
    Matrix joint(2 * dim, 2 * dim);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (Index i = 0; i < dim; ++i)
                for (Index j = 0; j < dim; ++j)
                    joint(2 * i + a, 2 * j + b) = s.b[a][b](i, j);
    return joint;
}

// In-place step: exact free rotation, Euler-Maruyama measurement update,
// feedback unitaries, renormalization. Returns the step's homodyne
// currents.
std::pair<double, double> raw_sme_step(const SmeWorkspace& ws, const Matrix& rot,
                                       BlockState& rho, const NoiseIncrement& noise) {
    const double dt = noise.dt;
    if (dt <= 0.0)
        throw DomainError("sme_step: dt must be > 0");
    const double alpha = ws.p.alpha, beta = ws.p.beta;
    const Index d = ws.dim;
    const double sz_of[2] = {1.0, -1.0};

    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            rho.b[a][b].array() *= rot.array();

    const double ex = expectation_x(ws, rho);
    const double es = block_trace_real(rho.b[0][0]) - block_trace_real(rho.b[1][1]);
    const double j_a = 2.0 * alpha * ex + noise.dW_A / dt;
    const double j_b = beta * (es + 1.0) + noise.dW_B / dt;

    // Measurement update: a^2 D[x] dt + a dW_A H[x]
    //                      + (b^2/4) D[sz] dt + (b/2) dW_B H[sz].
    Matrix xr(d, d), rx(d, d), t1(d, d), t2(d, d);
    BlockState drho;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            const Matrix& m = rho.b[a][b];
            Matrix& out = drho.b[a][b];
            out.setZero(d, d);
            if (alpha > 0.0) {
                x_left(ws, m, xr);
                x_right(ws, m, rx);
                x_right(ws, xr, t1);        // x m x
                x_left(ws, xr, t2);         // x x m
                const double a2dt = alpha * alpha * dt;
                out += a2dt * t1;
                x_right(ws, rx, t1);        // m x x
                out -= (0.5 * a2dt) * (t2 + t1);
                out += (alpha * noise.dW_A) * (xr + rx - (2.0 * ex) * m);
            }
            const double sab = sz_of[a] * sz_of[b];
            if (beta > 0.0) {
                out += (0.25 * beta * beta * dt) * (sab - 1.0) * m;
                out += (0.5 * beta * noise.dW_B) * (sz_of[a] + sz_of[b] - 2.0 * es) * m;
            }
        }
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            rho.b[a][b] += drho.b[a][b];

    // Feedback: exp(-i J_B F_A dt) exp(-i J_A F_B dt), F_A = alpha x,
    // F_B = beta sigma_z/2. A line is driven only when its source channel
    // is measured; no measurement, no record to broadcast.
    const double s_a = j_a * dt;
    const double s_b = j_b * dt;
    const double theta_x = (beta > 0.0) ? alpha * s_b : 0.0;
    const double theta_z = (alpha > 0.0) ? 0.5 * beta * s_a : 0.0;
    if (theta_x != 0.0) {
        Vector phase(d);
        for (Index k = 0; k < d; ++k)
            phase(k) = std::exp(Complex(0, -theta_x * ws.x_eigs(k)));
        const Matrix e_osc = ws.x_vecs * phase.asDiagonal() * ws.x_vecs.adjoint();
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                rho.b[a][b] = e_osc * rho.b[a][b] * e_osc.adjoint();
    }
    if (theta_z != 0.0) {
        // exp(-i theta_z sz) phases: L picks e^{-i theta}, R picks e^{+i theta};
        // diagonal blocks are untouched.
        const Complex zlr = std::exp(Complex(0, -2.0 * theta_z));
        rho.b[0][1] *= zlr;
        rho.b[1][0] *= std::conj(zlr);
    }

    const double tr = block_trace_real(rho.b[0][0]) + block_trace_real(rho.b[1][1]);
    if (tr < 0.5) {
        std::ostringstream msg;
        msg << "sme_step: state norm collapsed to " << tr << "; dt too large";
        throw IntegrationError(msg.str());
    }
    const double inv = 1.0 / tr;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            rho.b[a][b] *= inv;
    return {j_a, j_b};
}

void check_joint_state(const DensityState& rho) {
    if (rho.op().num_subsystems() != 2 || rho.dims().back() != 2)
        throw DimensionError("sme: expected an (oscillator, qubit) state");
}

DensityState::Tolerances trajectory_tolerances(double positivity_tol) {
    return {1e-9, 1e-9, positivity_tol};
}

} // namespace

DensityState sme_step(const DensityState& rho, const LoccParams& p,
                      const NoiseIncrement& noise) {
    check_joint_state(rho);
    const Index dim = rho.dims().front();
    SmeWorkspace ws(p, dim);
    BlockState blocks = to_blocks(rho.matrix(), dim);
    raw_sme_step(ws, ws.free_rotation_phases(noise.dt), blocks, noise);
    return DensityState::make(OperatorMatrix(from_blocks(blocks, dim), rho.dims()),
                              trajectory_tolerances(1e-4));
}

TrajectoryRecord simulate_trajectory(const DensityState& rho0, const LoccParams& p,
                                     double t_final, double dt, std::uint64_t seed,
                                     const TrajectoryOptions& options) {
    check_joint_state(rho0);
    if (dt <= 0.0 || t_final < 0.0)
        throw DomainError("simulate_trajectory: need dt > 0 and t_final >= 0");
    const auto n_steps =
        static_cast<std::size_t>(std::llround(std::ceil(t_final / dt - 1e-12)));
    const Index dim = rho0.dims().front();

    SmeWorkspace ws(p, dim);
    const Matrix rot = ws.free_rotation_phases(dt);
    GaussianStream gauss(seed);
    BlockState rho = to_blocks(rho0.matrix(), dim);

    TrajectoryRecord rec;
    rec.seed = seed;
    rec.state_stride = options.record_states_every;
    rec.times.reserve(n_steps);
    rec.current_A.reserve(n_steps);
    rec.current_B.reserve(n_steps);

    const auto tol = trajectory_tolerances(options.state_positivity_tol);
    const double sqrt_dt = std::sqrt(dt);
    for (std::size_t k = 0; k < n_steps; ++k) {
        NoiseIncrement noise{gauss.next() * sqrt_dt, gauss.next() * sqrt_dt, dt};
        const auto [j_a, j_b] = raw_sme_step(ws, rot, rho, noise);
        rec.times.push_back(static_cast<double>(k) * dt);
        rec.current_A.push_back(j_a);
        rec.current_B.push_back(j_b);
        const bool at_end = k + 1 == n_steps;
        const bool sampled =
            options.record_states_every > 0 &&
            (k + 1) % static_cast<std::size_t>(options.record_states_every) == 0;
        if (sampled || at_end)
            rec.states.push_back(DensityState::make(
                OperatorMatrix(from_blocks(rho, dim), rho0.dims()), tol));
    }
    if (n_steps == 0)
        rec.states.push_back(rho0);
    return rec;
}

int default_worker_count() {
    int n = static_cast<int>(std::thread::hardware_concurrency());
    if (n <= 0) n = 1;
    if (const char* cap = std::getenv("LOCCSIM_MAX_WORKERS")) {
        const int c = std::atoi(cap);
        if (c >= 1 && c < n) n = c;
    }
    return n;
}

EnsembleResult ensemble_average(const DensityState& rho0, const LoccParams& p,
                                double t_final, double dt, int n_traj,
                                std::uint64_t seed0, const EnsembleOptions& options) {
    check_joint_state(rho0);
    if (n_traj < 1)
        throw DomainError("ensemble_average: n_traj must be >= 1");
    if (dt <= 0.0 || t_final <= 0.0)
        throw DomainError("ensemble_average: need dt > 0 and t_final > 0");

    const auto n_steps =
        static_cast<std::size_t>(std::llround(std::ceil(t_final / dt - 1e-12)));
    int stride = options.sample_stride;
    if (stride <= 0)
        stride = std::max<int>(1, static_cast<int>(n_steps / 200));

    std::vector<std::size_t> sample_steps;
    for (std::size_t s = static_cast<std::size_t>(stride); s < n_steps;
         s += static_cast<std::size_t>(stride))
        sample_steps.push_back(s);
    sample_steps.push_back(n_steps);

    const Index n = rho0.size();
    const Index dim = rho0.dims().front();
    const std::size_t n_samples = sample_steps.size();

    // Trajectories are summed in fixed-size chunks into per-chunk slots and
    // merged in chunk order, so the result depends only on (inputs, seed0),
    // not on scheduling or worker count. Chunk size scales with n_traj to
    // bound slot memory.
    const int chunk_size = std::max(16, (n_traj + 63) / 64);
    const int n_chunks = (n_traj + chunk_size - 1) / chunk_size;
    std::vector<std::vector<Matrix>> chunk_sums(
        static_cast<std::size_t>(n_chunks),
        std::vector<Matrix>(n_samples, Matrix::Zero(n, n)));

    SmeWorkspace ws(p, dim);
    const Matrix rot = ws.free_rotation_phases(dt);
    const double sqrt_dt = std::sqrt(dt);
    const BlockState rho_init = to_blocks(rho0.matrix(), dim);

    auto run_chunk = [&](int chunk) {
        auto& sums = chunk_sums[static_cast<std::size_t>(chunk)];
        const int lo = chunk * chunk_size;
        const int hi = std::min(n_traj, lo + chunk_size);
        for (int traj = lo; traj < hi; ++traj) {
            GaussianStream gauss(
                derive_stream_seed(seed0, static_cast<std::uint64_t>(traj)));
            BlockState rho = rho_init;
            std::size_t next = 0;
            for (std::size_t k = 0; k < n_steps; ++k) {
                NoiseIncrement noise{gauss.next() * sqrt_dt, gauss.next() * sqrt_dt, dt};
                raw_sme_step(ws, rot, rho, noise);
                if (next < n_samples && k + 1 == sample_steps[next]) {
                    sums[next] += from_blocks(rho, dim);
                    ++next;
                }
            }
        }
    };

    const int workers = std::min(options.n_workers > 0 ? options.n_workers
                                                       : default_worker_count(),
                                 n_chunks);
    if (workers <= 1) {
        for (int c = 0; c < n_chunks; ++c) run_chunk(c);
    } else {
        std::atomic<int> next_chunk{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int wk = 0; wk < workers; ++wk)
            pool.emplace_back([&] {
                for (int c = next_chunk.fetch_add(1); c < n_chunks;
                     c = next_chunk.fetch_add(1))
                    run_chunk(c);
            });
        for (auto& th : pool) th.join();
    }

    EnsembleResult result;
    result.n_traj = n_traj;
    result.times.reserve(n_samples);
    result.mean_states.reserve(n_samples);
    const auto tol = trajectory_tolerances(options.state_positivity_tol);
    for (std::size_t s = 0; s < n_samples; ++s) {
        Matrix mean = Matrix::Zero(n, n);
        for (int c = 0; c < n_chunks; ++c)
            mean += chunk_sums[static_cast<std::size_t>(c)][s];
        mean /= static_cast<double>(n_traj);
        result.times.push_back(static_cast<double>(sample_steps[s]) * dt);
        result.mean_states.push_back(
            DensityState::make(OperatorMatrix(std::move(mean), rho0.dims()), tol));
    }
    return result;
}

std::pair<DensityState, double> tltm_kraus_step(const DensityState& rho_qubit,
                                                double beta, double dt, int outcome) {
    if (rho_qubit.size() != 2)
        throw DimensionError("tltm_kraus_step: expected a qubit state");
    if (outcome != 1 && outcome != -1)
        throw DomainError("tltm_kraus_step: outcome must be +1 or -1");
    if (beta < 0.0 || dt <= 0.0)
        throw DomainError("tltm_kraus_step: need beta >= 0 and dt > 0");
    const double q = beta * std::sqrt(dt);
    if (2.0 * q > 1.0)
        throw DomainError("tltm_kraus_step: beta^2 dt too large for a valid POVM");

    const double sgn = static_cast<double>(outcome);
    Matrix s = Matrix::Zero(2, 2); // sigma_z + 1
    s(0, 0) = 2.0;
    // K_pm = (1 pm (beta/2)(sz+1) sqrt(dt) - (beta^2/4)(sz+1) dt)/sqrt(2):
    // the Hadamard-type combinations (K0 pm K1)/sqrt(2) of the z-basis pair
    // K1 = (beta/2)(sz+1) sqrt(dt), K0 = 1 - (beta^2/4)(sz+1) dt. They
    // generate the POVM E_pm = (1 pm beta (sz+1) sqrt(dt))/2 to O(dt^{3/2}),
    // which is complete exactly.
    Matrix k = (Matrix::Identity(2, 2) + (sgn * 0.5 * q) * s -
                (0.25 * beta * beta * dt) * s) /
               std::sqrt(2.0);
    const double ex_s = 2.0 * rho_qubit.matrix()(0, 0).real(); // <sigma_z + 1>
    const double prob = 0.5 * (1.0 + sgn * q * ex_s);          // tr(E_pm rho)
    Matrix post = k * rho_qubit.matrix() * k.adjoint();
    const double tr = post.trace().real();
    if (tr <= 0.0)
        throw IntegrationError("tltm_kraus_step: zero-probability branch");
    post /= tr;
    return {DensityState::make(OperatorMatrix(std::move(post), {2})), prob};
}

} // namespace loccsim
