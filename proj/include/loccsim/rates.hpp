#ifndef LOCCSIM_RATES_HPP
#define LOCCSIM_RATES_HPP

#include <map>
#include <string>

namespace loccsim {

// Single source for physical constants (SI).
namespace constants {
inline constexpr double G = 6.674e-11;        // m^3 kg^-1 s^-2
inline constexpr double hbar = 1.0546e-34;    // J s
inline constexpr double c = 2.9979e8;         // m/s
inline constexpr double amu_kg = 1.6605e-27;  // kg
inline constexpr double solar_mass_kg = 1.989e30;
} // namespace constants

// Physical parameters of an oscillator (a) gravitationally coupled to a
// two-level test mass (b) in a double well.
struct Scenario {
    double m_a;    // kg, oscillator mass
    double m_b;    // kg, test mass
    double d;      // m, separation
    double l;      // m, double-well separation
    double omega;  // rad/s, oscillator frequency
    std::string label;
};

struct RateReport {
    double g;                 // rad/s, coupling 2 alpha beta
    double gamma_symmetric;   // rad/s
    double gamma_asymmetric;  // rad/s
    std::string notes;
};

// Ground-state wavefunction size sqrt(hbar / (2 omega m)).
double ground_state_size(double omega, double mass);

// Newtonian constraint on the coupling: g = G m_a m_b l x0 / (hbar d^3).
double coupling_g(const Scenario& s);

// Symmetric noise splitting gamma_s = 2 alpha^2 = beta^2/2 = g/2; the
// asymmetric rate of the oscillator is filled in for reference.
RateReport symmetric_split(const Scenario& s);

// Self-sourced splitting gamma_a = G M^2 x0^2 / (2 hbar d^3) with
// x0 = sqrt(hbar/(2 omega M)).
double asymmetric_rate(double mass, double d, double omega);

// h/(mc), or hbar/(mc) when reduced. The non-reduced convention is the
// default; it reproduces the kHz-scale neutron estimate.
double compton_wavelength(double mass, bool reduced = false);

struct BlackHoleComparison {
    double locc_heating_W;   // hbar c^6 / (8 M^2 G^2)
    double hawking_power_W;  // hbar c^6 / (15360 pi M^2 G^2)
    double ratio;            // = 1920 pi, independent of M
};

// Heating of a black hole when the noise length scale is pushed to the
// Schwarzschild radius, against the blackbody power attributed to the hole.
BlackHoleComparison blackhole_comparison(double mass);

// Shipped presets: mg_atom, silica_pair, neutron, solar_mass_bh.
const std::map<std::string, Scenario>& scenario_presets();

} // namespace loccsim

#endif
