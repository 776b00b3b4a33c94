#ifndef LOCCSIM_COHERENT_HPP
#define LOCCSIM_COHERENT_HPP

#include "loccsim/states.hpp"

namespace loccsim {

// Unitary oscillator-qubit coupling H = omega a^dag a + g (a + a^dag) sigma_z
// (hbar = 1; the qubit splitting is dropped, i.e. rotating frame).
struct CoherentParams {
    double omega; // rad/s, > 0
    double g;     // rad/s

    double lambda() const { return g / omega; }
};

// Exact propagator U(t) = D^dag(sigma_z lambda) exp(-i omega a^dag a t)
// D(sigma_z lambda) on the (dim x 2) space, up to a global phase.
OperatorMatrix propagator(const CoherentParams& p, double t, Index dim);

// Interferometric protocol: prepare (|L>+|R>)/sqrt(2), evolve for t, apply
// the readout pi/2 pulse, return the |L> population. The readout rotation
// is the inverse of the preparation rotation exp(-i pi/4 sigma_y), which
// places the bright port on |L> (P = 1 at t = 0).
double protocol_signal_numeric(const CoherentParams& p,
                               const DensityState& oscillator_state, double t);

// Closed forms for the |L> population.
double signal_ground(const CoherentParams& p, double t);
// Thermal oscillator with mean occupation nbar. The decay exponent carries
// the thermal weight (2 nbar + 1): it follows from the displacement
// characteristic function tr[D(nu) rho_th] = exp(-|nu|^2 (2 nbar + 1)/2)
// and reduces to signal_ground at nbar = 0.
double signal_thermal(const CoherentParams& p, double nbar, double t);

// (|delta>|L> + |-delta>|R>)/sqrt(2) with delta = lambda (e^{-i omega t} - 1):
// the joint state halfway through the protocol.
DensityState entangled_midpoint_state(const CoherentParams& p, double t, Index dim);

// Readout helper shared by the coherent protocol and the LOCC revival
// curves: pi/2 pulse on the qubit followed by the |L> population.
double readout_L_population(const DensityState& joint);

} // namespace loccsim

#endif
