#pragma once

#include <complex>
#include <vector>

namespace qcavity {

using Complex = std::complex<double>;

// Physical parameters of the modulated cavity + two-level atom.
// Units: hbar = 1 and omega0 sets the frequency unit (times in 1/omega0).
struct ModelParams {
    double omega0 = 1.0;   // base cavity frequency
    double Omega = 1.0;    // atomic transition frequency
    double epsilon = 0.0;  // modulation amplitude, |epsilon| < 1
    double eta = 0.0;      // modulation frequency
    double g = 0.0;        // atom-field coupling
};

// One excitation ladder span{|e,n>, |g,n+1>} with conserved M = n+1.
struct InitialLadderState {
    Complex alpha{1.0, 0.0};     // amplitude of |e,n>
    Complex beta_amp{0.0, 0.0};  // amplitude of |g,n+1>
    int n = 0;                   // base photon number

    int excitations() const { return n + 1; }
};

struct NumericsConfig {
    double rtol = 1e-9;
    double atol = 1e-12;
    int nmax = 128;               // Fock truncation for the exact solver
    double tail_threshold = 1e-6; // max admissible population in the top Fock levels
    double t_max = 200.0;
    double dt_out = 0.05;
};

// omega(t) = omega0 * (1 + epsilon * sin(eta t)); strictly positive for |epsilon| < 1.
double omega_at(const ModelParams& params, double t);

// chi(t) = (d/dt log omega(t)) / 4 = epsilon*eta*cos(eta t) / (4*(1 + epsilon*sin(eta t)))
double chi_at(const ModelParams& params, double t);

// Each throws ConfigError with a field-naming message on the first violated invariant.
void validate(const ModelParams& params);
void validate(const InitialLadderState& initial);
void validate(const NumericsConfig& numerics);
void validate(const ModelParams& params, const NumericsConfig& numerics);

// Uniform output grid 0, dt, 2dt, ..., t_max (t_max appended if not hit exactly).
std::vector<double> sample_grid(double t_max, double dt);

} // namespace qcavity
