#ifndef LOCCSIM_UNRAVEL_HPP
#define LOCCSIM_UNRAVEL_HPP

#include <cstdint>
#include <vector>

#include "loccsim/lindblad.hpp"
#include "loccsim/states.hpp"

namespace loccsim {

// One Ito increment pair for the two homodyne channels; dW have mean 0 and
// variance dt.
struct NoiseIncrement {
    double dW_A;
    double dW_B;
    double dt;
};

// One conditional trajectory. Currents are recorded per step and aligned
// with `times` (the step start times):
//   J_A = 2 alpha <x> + dW_A/dt,  J_B = beta <sigma_z + 1> + dW_B/dt.
// States are thinned to every `state_stride` steps; the post-final-step
// state is always the last entry.
struct TrajectoryRecord {
    std::uint64_t seed = 0;
    std::vector<double> times;
    std::vector<DensityState> states;
    int state_stride = 0; // 0 when only the final state is kept
    std::vector<double> current_A;
    std::vector<double> current_B;
};

struct TrajectoryOptions {
    int record_states_every = 0; // 0: keep only the final state
    // Euler-Maruyama conditional states carry fluctuating negative
    // eigenvalue transients of scale ~ rate * dt per step that random-walk
    // over a run; the default budgets desk-scale runs at the default dt.
    // Tighten it when stepping finer.
    double state_positivity_tol = 5e-2;
};

// One Euler-Maruyama step of the joint conditional dynamics: both homodyne
// measurement updates, then the mutual feedback unitaries
// exp(-i J_B F_A dt) exp(-i J_A F_B dt) with F_A = alpha x,
// F_B = beta sigma_z / 2, then trace renormalization. A feedback line is
// only driven when its source channel is measured (its strength > 0).
DensityState sme_step(const DensityState& rho, const LoccParams& p,
                      const NoiseIncrement& noise);

TrajectoryRecord simulate_trajectory(const DensityState& rho0, const LoccParams& p,
                                     double t_final, double dt, std::uint64_t seed,
                                     const TrajectoryOptions& options = {});

struct EnsembleOptions {
    int sample_stride = 0;  // 0: pick ~200 samples automatically
    int n_workers = 0;      // 0: hardware/env default (LOCCSIM_MAX_WORKERS)
    double state_positivity_tol = 5e-2; // see TrajectoryOptions
};

struct EnsembleResult {
    std::vector<double> times;
    std::vector<DensityState> mean_states;
    int n_traj = 0;
};

// Pointwise mean over independently seeded trajectories. Deterministic in
// (inputs, seed0): trajectory k uses the derived stream seed k and the
// reduction order is fixed regardless of scheduling or worker count.
EnsembleResult ensemble_average(const DensityState& rho0, const LoccParams& p,
                                double t_final, double dt, int n_traj,
                                std::uint64_t seed0,
                                const EnsembleOptions& options = {});

// Discrete-outcome unraveling of the TLTM phase measurement. outcome is +1
// or -1; returns the renormalized post-measurement state and the outcome
// probability tr(E_pm rho) with E_pm = (1 pm beta (sigma_z+1) sqrt(dt))/2.
std::pair<DensityState, double> tltm_kraus_step(const DensityState& rho_qubit,
                                                double beta, double dt, int outcome);

int default_worker_count();

} // namespace loccsim

#endif
