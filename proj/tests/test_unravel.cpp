#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "loccsim/coherent.hpp"
#include "loccsim/rng.hpp"
#include "loccsim/unravel.hpp"

using namespace loccsim;

namespace {

const LoccParams kFigureParams = LoccParams::symmetric(0.05, 1.0);

DensityState plus_joint(Index dim) {
    return product(vacuum_state(dim), qubit_plus());
}

} // namespace

TEST_CASE("sme step: free evolution when nothing is measured") {
    const Index dim = 8;
    const LoccParams p{0.0, 0.0, 1.0};
    const auto rho0 = product(coherent_state(dim, Complex(0.4, 0.0)), qubit_plus());
    const double dt = 1e-4;
    const auto stepped = sme_step(rho0, p, {0.37, -0.81, dt}); // dW arbitrary

    // reference: exact free rotation e^{-iH0 dt} rho e^{+iH0 dt}; the
    // Hamiltonian part of the step is not Euler-truncated
    const Matrix h0 = tensor(number_operator(dim), identity({2})).mat;
    const Matrix u = exp_i_hermitian(h0, dt);
    const Matrix expected = u * rho0.matrix() * u.adjoint();
    CHECK((stepped.matrix() - expected).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("sme step: deterministic drift matches the first-order expansion") {
    // dW_A = dW_B = 0 from vacuum (x) plus: remaining terms are the
    // measurement drifts and the current-mean feedback rotation
    // exp(-i ab x dt) (since <x> = 0 and <sigma_z> = 0, J_B dt = beta dt).
    const Index dim = 10;
    const LoccParams p = kFigureParams;
    const auto rho0 = plus_joint(dim);
    const Matrix rho = rho0.matrix();

    const Matrix x_full = tensor(fock_operators(dim).x, identity({2})).mat;
    const Matrix sz_full = tensor(identity({dim}), pauli_z()).mat;
    const Matrix h0 = tensor(number_operator(dim), identity({2})).mat;

    auto dissip = [](const Matrix& a, const Matrix& m) {
        return a * m * a - 0.5 * (a * a * m + m * a * a);
    };

    auto oracle_for = [&](double dt) {
        Matrix d = Complex(0, -dt) * (h0 * rho - rho * h0);
        d += (p.alpha * p.alpha * dt) * dissip(x_full, rho);
        d += (0.25 * p.beta * p.beta * dt) * dissip(sz_full, rho);
        // feedback on the oscillator from the qubit record mean
        d += Complex(0, -p.alpha * p.beta * dt) * (x_full * rho - rho * x_full);
        return (rho + d).eval();
    };

    // first-order agreement with quadratic remainder: halving dt shrinks
    // the defect by ~4
    const double d1 = (sme_step(rho0, p, {0.0, 0.0, 1e-3}).matrix() -
                       oracle_for(1e-3))
                          .cwiseAbs()
                          .maxCoeff();
    const double d2 = (sme_step(rho0, p, {0.0, 0.0, 5e-4}).matrix() -
                       oracle_for(5e-4))
                          .cwiseAbs()
                          .maxCoeff();
    CHECK(d1 < 1e-6);
    CHECK(d1 / d2 > 3.0);
    CHECK(d1 / d2 < 5.0);
}

TEST_CASE("sme step: innovation term reduces to x rho + rho x at zero mean") {
    // With <x> = 0 the H[x] superoperator is x rho + rho x; probe it via
    // the dW_A-linear response of the step.
    const Index dim = 8;
    const LoccParams p{0.3, 0.0, 1.0}; // only the oscillator channel
    const auto rho0 = plus_joint(dim);
    const double dt = 1e-6, dw = 1e-5;
    const Matrix plusw = sme_step(rho0, p, {dw, 0.0, dt}).matrix();
    const Matrix minusw = sme_step(rho0, p, {-dw, 0.0, dt}).matrix();
    const Matrix linear = (plusw - minusw) / (2.0 * dw);

    const Matrix x_full = tensor(fock_operators(dim).x, identity({2})).mat;
    const Matrix expected = p.alpha * (x_full * rho0.matrix() + rho0.matrix() * x_full);
    CHECK((linear - expected).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("trajectory: identical seeds give bit-identical records") {
    const Index dim = 6;
    const auto rho0 = plus_joint(dim);
    TrajectoryOptions options;
    options.record_states_every = 50;
    const auto a = simulate_trajectory(rho0, kFigureParams, 1.0, 1e-3, 42, options);
    const auto b = simulate_trajectory(rho0, kFigureParams, 1.0, 1e-3, 42, options);
    REQUIRE(a.times.size() == b.times.size());
    REQUIRE(a.states.size() == b.states.size());
    CHECK(a.current_A == b.current_A);
    CHECK(a.current_B == b.current_B);
    for (std::size_t i = 0; i < a.states.size(); ++i)
        CHECK((a.states[i].matrix() - b.states[i].matrix()).cwiseAbs().maxCoeff() ==
              0.0);

    const auto c = simulate_trajectory(rho0, kFigureParams, 1.0, 1e-3, 43, options);
    CHECK(a.current_A != c.current_A);
}

TEST_CASE("trajectory: record sizes and state thinning") {
    const auto rho0 = plus_joint(6);
    TrajectoryOptions options;
    options.record_states_every = 100;
    const auto rec = simulate_trajectory(rho0, kFigureParams, 0.5, 1e-3, 7, options);
    CHECK(rec.times.size() == 500);
    CHECK(rec.current_A.size() == rec.times.size());
    CHECK(rec.current_B.size() == rec.times.size());
    CHECK(rec.states.size() == 5);
}

TEST_CASE("trajectory: noise increments have the contracted statistics") {
    // Recover dW_A/sqrt(dt) from the recorded current of an unmeasured
    // oscillator channel... alpha > 0 so the current exists; subtract the
    // deterministic part using the recorded mean.
    const Index dim = 6;
    const double dt = 1e-3;
    const auto rho0 = plus_joint(dim);
    const LoccParams p{0.4, 0.0, 1.0}; // pure x measurement, no feedback
    const auto rec = simulate_trajectory(rho0, p, 40.0, dt, 11);

    // E[J] = 2 alpha <x>; <x>(t) stays 0 for the measured vacuum on average,
    // so the standardized mean of J sqrt(dt)/... tests E[dW] = 0 within
    // 4/sqrt(N).
    double mean = 0.0;
    for (double j : rec.current_A) mean += j * dt / std::sqrt(dt);
    mean /= static_cast<double>(rec.current_A.size());
    CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(rec.times.size())));

    // E[(dW)^2] = dt: the standardized second moment is 1 +- O(1/sqrt(N)).
    // The 2 alpha <x> drift contributes O(alpha^2 <x>^2 dt) << 1.
    double second = 0.0;
    for (double j : rec.current_A) second += j * j * dt * dt / dt;
    second /= static_cast<double>(rec.current_A.size());
    CHECK(second == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("trajectory: qubit current tracks beta <sigma_z + 1>") {
    // sigma_z eigenstate |L>: the conditional dynamics never leaves it, so
    // J_B averages to 2 beta over the run.
    const Index dim = 6;
    const double beta = 1.0, dt = 1e-3, t_final = 10.0;
    const LoccParams p{0.0, beta, 1.0};
    const auto rho0 = product(vacuum_state(dim), qubit_L());
    const auto rec = simulate_trajectory(rho0, p, t_final, dt, 3);
    double mean = 0.0;
    for (double j : rec.current_B) mean += j;
    mean /= static_cast<double>(rec.current_B.size());
    const double sigma = 1.0 / std::sqrt(t_final);
    CHECK(std::abs(mean - 2.0 * beta) < 4.0 * sigma);
}

TEST_CASE("ensemble: single trajectory equals the trajectory itself") {
    const auto rho0 = plus_joint(6);
    EnsembleOptions options;
    options.sample_stride = 100;
    const auto ens = ensemble_average(rho0, kFigureParams, 0.5, 1e-3, 1, 9, options);

    TrajectoryOptions topt;
    topt.record_states_every = 100;
    const auto rec = simulate_trajectory(rho0, kFigureParams, 0.5, 1e-3,
                                         derive_stream_seed(9, 0), topt);
    REQUIRE(ens.mean_states.size() == rec.states.size());
    for (std::size_t i = 0; i < rec.states.size(); ++i)
        CHECK((ens.mean_states[i].matrix() - rec.states[i].matrix())
                  .cwiseAbs()
                  .maxCoeff() == 0.0);
}

TEST_CASE("ensemble: unmeasured dynamics is exactly deterministic") {
    const Index dim = 8;
    const LoccParams p{0.0, 0.0, 1.0};
    const auto rho0 = product(coherent_state(dim, Complex(0.5, 0.1)), qubit_plus());
    EnsembleOptions options;
    options.sample_stride = 250;
    const auto e1 = ensemble_average(rho0, p, 0.5, 1e-3, 4, 1, options);
    const auto e2 = ensemble_average(rho0, p, 0.5, 1e-3, 4, 77, options);
    for (std::size_t i = 0; i < e1.mean_states.size(); ++i)
        CHECK((e1.mean_states[i].matrix() - e2.mean_states[i].matrix())
                  .cwiseAbs()
                  .maxCoeff() == 0.0);
}

TEST_CASE("ensemble: reduction is independent of the worker count") {
    const auto rho0 = plus_joint(6);
    EnsembleOptions serial;
    serial.sample_stride = 200;
    serial.n_workers = 1;
    EnsembleOptions parallel = serial;
    parallel.n_workers = 4;
    const auto a = ensemble_average(rho0, kFigureParams, 0.4, 1e-3, 40, 5, serial);
    const auto b = ensemble_average(rho0, kFigureParams, 0.4, 1e-3, 40, 5, parallel);
    for (std::size_t i = 0; i < a.mean_states.size(); ++i)
        CHECK((a.mean_states[i].matrix() - b.mean_states[i].matrix())
                  .cwiseAbs()
                  .maxCoeff() == 0.0);
}

TEST_CASE("ensemble: mean converges to the feedback-average master equation") {
    // Small-scale version of the unraveling-consistency acceptance test:
    // 200 trajectories at dim 8 against the deterministic solution of the
    // generator the feedback construction provably averages to.
    const Index dim = 8;
    const auto rho0 = plus_joint(dim);
    const double dt = 2.0 * M_PI * 2.5e-4;
    EnsembleOptions options;
    options.sample_stride = 2000; // samples at pi and 2 pi
    const int n_traj = 200;
    const auto ens =
        ensemble_average(rho0, kFigureParams, 2.0 * M_PI, dt, n_traj, 2024, options);

    LoccGeneratorOptions gopt;
    gopt.convention = DriftConvention::feedback_average;
    const auto gen = build_locc_generator(kFigureParams, dim, gopt);
    const auto reference = integrate_path(gen, rho0, ens.times, dt);

    REQUIRE(ens.mean_states.size() == reference.size());
    for (std::size_t i = 0; i < reference.size(); ++i) {
        const double dist =
            trace_distance(ens.mean_states[i].matrix(), reference[i].matrix());
        CHECK(dist < 3.0 / std::sqrt(static_cast<double>(n_traj)));
    }
}

TEST_CASE("ensemble: conditional purity dominates the purity of the mean") {
    const Index dim = 8;
    const auto rho0 = plus_joint(dim);
    const double dt = 1e-3;
    EnsembleOptions options;
    options.sample_stride = 500;
    const int n_traj = 32;
    const auto ens = ensemble_average(rho0, kFigureParams, 1.5, dt, n_traj, 88, options);

    TrajectoryOptions topt;
    topt.record_states_every = 500;
    std::vector<double> mean_purity(ens.mean_states.size(), 0.0);
    for (int k = 0; k < n_traj; ++k) {
        const auto rec = simulate_trajectory(rho0, kFigureParams, 1.5, dt,
                                             derive_stream_seed(88, static_cast<std::uint64_t>(k)),
                                             topt);
        for (std::size_t i = 0; i < mean_purity.size(); ++i)
            mean_purity[i] += purity(rec.states[i]);
    }
    for (std::size_t i = 0; i < mean_purity.size(); ++i) {
        mean_purity[i] /= n_traj;
        CHECK(mean_purity[i] >= purity(ens.mean_states[i]) - 1e-9);
    }
}

TEST_CASE("ensemble: homodyne current mean tracks the deterministic <x>") {
    const Index dim = 8;
    const auto rho0 = product(coherent_state(dim, Complex(0.7, 0.0)), qubit_plus());
    const double dt = 1e-3, t_final = 2.0;
    const int n_traj = 64;

    LoccGeneratorOptions gopt;
    gopt.convention = DriftConvention::feedback_average;
    const auto gen = build_locc_generator(kFigureParams, dim, gopt);
    const OperatorMatrix x_full = tensor(fock_operators(dim).x, identity({2}));

    // bin currents over quarters of the run
    const std::size_t n_steps = 2000;
    const std::size_t bin = n_steps / 4;
    std::vector<double> current_mean(4, 0.0);
    for (int k = 0; k < n_traj; ++k) {
        const auto rec = simulate_trajectory(
            rho0, kFigureParams, t_final, dt,
            derive_stream_seed(3000, static_cast<std::uint64_t>(k)));
        for (std::size_t i = 0; i < n_steps; ++i)
            current_mean[i / bin] += rec.current_A[i];
    }
    for (std::size_t q = 0; q < 4; ++q)
        current_mean[q] /= static_cast<double>(n_traj * bin);

    // deterministic reference, time-averaged over the same bins
    const auto times = [&] {
        std::vector<double> v;
        for (std::size_t i = 0; i < n_steps; ++i)
            v.push_back((static_cast<double>(i) + 0.5) * dt);
        return v;
    }();
    const auto path = integrate_path(gen, rho0, times, dt);
    std::vector<double> x_mean(4, 0.0);
    for (std::size_t i = 0; i < n_steps; ++i)
        x_mean[i / bin] += 2.0 * kFigureParams.alpha *
                           expectation(x_full, path[i]).real();
    for (std::size_t q = 0; q < 4; ++q) {
        x_mean[q] /= static_cast<double>(bin);
        // noise floor: sd of the binned mean is 1/sqrt(n_traj bin dt)
        const double sigma =
            1.0 / std::sqrt(static_cast<double>(n_traj) *
                            static_cast<double>(bin) * dt);
        CHECK(std::abs(current_mean[q] - x_mean[q]) < 4.0 * sigma);
    }
}

TEST_CASE("tltm kraus step: POVM is complete and statistics are Gaussian") {
    const double beta = 0.8, dt = 1e-3;
    const double q = beta * std::sqrt(dt);

    // E_+ + E_- = 1 exactly
    Matrix s = Matrix::Zero(2, 2);
    s(0, 0) = 2.0;
    const Matrix e_plus = 0.5 * (Matrix::Identity(2, 2) + q * s);
    const Matrix e_minus = 0.5 * (Matrix::Identity(2, 2) - q * s);
    CHECK(((e_plus + e_minus) - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() ==
          0.0);

    // probabilities reported by the step match tr(E_pm rho)
    const auto rho = qubit_plus();
    const auto [up, p_plus] = tltm_kraus_step(rho, beta, dt, +1);
    const auto [down, p_minus] = tltm_kraus_step(rho, beta, dt, -1);
    CHECK(p_plus == doctest::Approx((e_plus * rho.matrix()).trace().real())
                        .epsilon(1e-14));
    CHECK(p_plus + p_minus == doctest::Approx(1.0).epsilon(1e-14));

    // dM = pm sqrt(dt): E[dM] = beta <sigma_z+1> dt and E[dM^2] = dt, exactly
    const double ex_s = 1.0; // <sigma_z + 1> on |+>
    const double e_dm = std::sqrt(dt) * (p_plus - p_minus);
    CHECK(e_dm == doctest::Approx(beta * ex_s * dt).epsilon(1e-12));
    CHECK(dt * (p_plus + p_minus) == doctest::Approx(dt).epsilon(1e-14));
}

TEST_CASE("tltm kraus step: sigma_z = -1 eigenstate is invariant with even odds") {
    const auto rho = qubit_R(); // sigma_z eigenvalue -1, annihilated by sz+1
    const auto [stepped, prob] = tltm_kraus_step(rho, 0.5, 1e-3, +1);
    CHECK(prob == doctest::Approx(0.5).epsilon(1e-14));
    CHECK((stepped.matrix() - rho.matrix()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK_THROWS_AS(tltm_kraus_step(rho, 40.0, 1e-3, +1), DomainError);
    CHECK_THROWS_AS(tltm_kraus_step(rho, 0.5, 1e-3, 2), DomainError);
}

TEST_CASE("discrete and diffusive unravelings share the dephasing ensemble mean") {
    // Both must average to (beta^2/4) D[sigma_z]: coherence decay
    // exp(-beta^2 t / 2).
    const double beta = 1.0, dt = 1e-3, t_final = 1.0;
    const auto n_steps = static_cast<std::size_t>(t_final / dt);
    const int n_traj = 400;

    // discrete outcomes on the bare qubit
    Matrix mean_discrete = Matrix::Zero(2, 2);
    for (int k = 0; k < n_traj; ++k) {
        GaussianStream stream(derive_stream_seed(505, static_cast<std::uint64_t>(k)));
        DensityState rho = qubit_plus();
        for (std::size_t i = 0; i < n_steps; ++i) {
            const auto probe = tltm_kraus_step(rho, beta, dt, +1);
            const int outcome = stream.uniform() < probe.second ? +1 : -1;
            rho = tltm_kraus_step(rho, beta, dt, outcome).first;
        }
        mean_discrete += rho.matrix();
    }
    mean_discrete /= static_cast<double>(n_traj);

    // diffusive qubit channel: alpha = 0 disables the oscillator line and
    // the feedback, leaving (beta^2/4) D[sz] dt + (beta/2) dW H[sz]
    const Index dim = 2; // oscillator spectator at the smallest size
    const LoccParams p{0.0, beta, 1.0};
    const auto rho0 = product(vacuum_state(dim), qubit_plus());
    EnsembleOptions options;
    options.sample_stride = static_cast<int>(n_steps);
    const auto ens = ensemble_average(rho0, p, t_final, dt, n_traj, 606, options);
    const auto qubit_mean = partial_trace(ens.mean_states.back(), 1);

    const double expected = 0.5 * std::exp(-0.5 * beta * beta * t_final);
    const double sigma = 0.5 / std::sqrt(static_cast<double>(n_traj));
    CHECK(std::abs(mean_discrete(0, 1).real() - expected) < 4.0 * sigma);
    CHECK(std::abs(qubit_mean.matrix()(0, 1).real() - expected) < 4.0 * sigma);
    // and the two unravelings agree with each other
    CHECK(std::abs(mean_discrete(0, 1).real() -
                   qubit_mean.matrix()(0, 1).real()) < 6.0 * sigma);
}

TEST_CASE("sme step: norm collapse raises a step failure") {
    const auto rho0 = plus_joint(4);
    const LoccParams p{6.0, 6.0, 1.0};
    CHECK_THROWS_AS(sme_step(rho0, p, {2.0, -3.0, 1.0}), Error);
}
