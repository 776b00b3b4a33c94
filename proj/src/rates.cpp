#include "loccsim/rates.hpp"

#include <cmath>

#include "loccsim/errors.hpp"

namespace loccsim {

using namespace constants;

double ground_state_size(double omega, double mass) {
    if (omega <= 0.0 || mass <= 0.0)
        throw DomainError("ground_state_size: omega and mass must be > 0");
    return std::sqrt(hbar / (2.0 * omega * mass));
}

namespace {

void check_scenario(const Scenario& s) {
    if (s.m_a <= 0.0 || s.m_b <= 0.0 || s.d <= 0.0 || s.l <= 0.0 || s.omega <= 0.0)
        throw DomainError("Scenario: all physical parameters must be > 0");
}

} // namespace

double coupling_g(const Scenario& s) {
    check_scenario(s);
    const double x0 = ground_state_size(s.omega, s.m_a);
    return G * s.m_a * s.m_b * s.l * x0 / (hbar * s.d * s.d * s.d);
}

RateReport symmetric_split(const Scenario& s) {
    const double g = coupling_g(s);
    RateReport report;
    report.g = g;
    report.gamma_symmetric = 0.5 * g;
    report.gamma_asymmetric = asymmetric_rate(s.m_a, s.d, s.omega);
    report.notes = "gamma_symmetric = g/2; gamma_asymmetric uses the oscillator mass";
    return report;
}

double asymmetric_rate(double mass, double d, double omega) {
    if (mass <= 0.0 || d <= 0.0 || omega <= 0.0)
        throw DomainError("asymmetric_rate: all inputs must be > 0");
    const double x0 = ground_state_size(omega, mass);
    return G * mass * mass * x0 * x0 / (2.0 * hbar * d * d * d);
}

double compton_wavelength(double mass, bool reduced) {
    if (mass <= 0.0)
        throw DomainError("compton_wavelength: mass must be > 0");
    const double lam = hbar / (mass * c);
    return reduced ? lam : 2.0 * M_PI * lam;
}

BlackHoleComparison blackhole_comparison(double mass) {
    if (mass <= 0.0)
        throw DomainError("blackhole_comparison: mass must be > 0");
    const double mg = mass * G;
    const double c6 = std::pow(c, 6);
    BlackHoleComparison out;
    out.locc_heating_W = hbar * c6 / (8.0 * mg * mg);
    out.hawking_power_W = hbar * c6 / (15360.0 * M_PI * mg * mg);
    out.ratio = out.locc_heating_W / out.hawking_power_W;
    return out;
}

const std::map<std::string, Scenario>& scenario_presets() {
    static const std::map<std::string, Scenario> presets = [] {
        std::map<std::string, Scenario> table;

        // 1 mg oscillator against a cesium atom, wells 1 mm apart. The
        // trap frequency is not part of the published estimate; 2 pi mHz
        // reproduces its order of magnitude.
        table["mg_atom"] = Scenario{1e-6, 133.0 * amu_kg, 1e-3, 1e-3,
                                    2.0 * M_PI * 1e-3, "mg_atom"};

        // Levitated silica spheres (density 2.65 g/cm^3), radii 1 um and
        // 100 nm, at d = 2R, wells 1 um apart, omega = 2 pi x 100 Hz.
        const double density = 2650.0; // kg/m^3
        const double r_big = 1e-6, r_small = 1e-7;
        const double vol_factor = 4.0 / 3.0 * M_PI;
        table["silica_pair"] =
            Scenario{density * vol_factor * r_big * r_big * r_big,
                     density * vol_factor * r_small * r_small * r_small,
                     2.0 * r_big, 1e-6, 2.0 * M_PI * 100.0, "silica_pair"};

        // Trapped neutron with d at its (non-reduced) Compton wavelength.
        const double m_n = 1.675e-27;
        const double lam_c = compton_wavelength(m_n);
        table["neutron"] = Scenario{m_n, m_n, lam_c, lam_c,
                                    2.0 * M_PI * 220.0, "neutron"};

        // Solar-mass black hole; d is the Schwarzschild radius and omega
        // the light-crossing rate c/r_s (only m_a enters the comparison).
        const double m_bh = solar_mass_kg;
        const double r_s = 2.0 * G * m_bh / (c * c);
        table["solar_mass_bh"] = Scenario{m_bh, m_bh, r_s, r_s, c / r_s,
                                          "solar_mass_bh"};
        return table;
    }();
    return presets;
}

} // namespace loccsim
