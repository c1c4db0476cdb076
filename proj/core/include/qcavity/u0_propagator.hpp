#pragma once

#include <span>
#include <vector>

#include "qcavity/model.hpp"
#include "qcavity/ode.hpp"

namespace qcavity {

// Wei-Norman functions of the field propagator
// U0 = exp(-i Omega t sigma_z / 2) exp(g1 n) exp(g2 a†²) exp(g3 a²) exp(g4).
// All four vanish at t = 0.
struct GammaState {
    Complex g1{}, g2{}, g3{}, g4{};
};

// Coefficients of the Bogoliubov transformation U0† a U0 = t1 a + t2 a†,
// U0† a† U0 = t3 a + t4 a†. Satisfy t1 t4 - t2 t3 = 1 exactly, and
// t4 = conj(t1), t3 = conj(t2) up to integration error.
struct BogoliubovCoeffs {
    Complex t1, t2, t3, t4;
};

// Coefficients of the interaction-picture number operator
// U0† n U0 = g11 n + g20 a†² + g02 a² + g00, with g00 = (g11 - 1)/2 exactly.
struct NumberCoeffs {
    Complex g11, g20, g02, g00;
};

struct SolveOptions {
    // Abort threshold on Re(2 g1): exp(2 g1) enters every right-hand side and a
    // silent overflow would corrupt downstream invariant checks.
    double exp_guard = 300.0;
    // Controller headroom; see IntegrateOptions::tolerance_scale.
    double tolerance_scale = 0.05;
};

// Right-hand side of the gamma system; chi is evaluated internally at t.
GammaState gamma_rhs(double t, const GammaState& gamma, const ModelParams& params);

// t1 = e^{g1}(1 - 4 g2 g3), t2 = 2 e^{g1} g2, t3 = -2 e^{-g1} g3, t4 = e^{-g1}.
BogoliubovCoeffs bogoliubov_coeffs(const GammaState& gamma);

// g11 = 1 - 8 g2 g3, g20 = 2 g2, g02 = 2 g3 (4 g2 g3 - 1), g00 = -4 g2 g3.
NumberCoeffs number_coeffs(const GammaState& gamma);

// Drift of the algebraic constraints along a trajectory, all zero for the
// exact flow: |t4 - conj(t1)| + |t3 - conj(t2)|, | |t1|² - |t2|² - 1 |, |Im g11|.
struct U0Residuals {
    double conjugacy = 0.0;
    double symplectic = 0.0;
    double im_g11 = 0.0;
};
U0Residuals u0_residuals(const GammaState& gamma);

struct GammaTrajectory {
    std::vector<double> times;
    std::vector<GammaState> gammas;
    StepStats stats;
};

// Integrate the gamma system from gamma(0) = 0 over the sample grid
// (grid[0] must be 0).
GammaTrajectory solve_gammas(const ModelParams& params, const NumericsConfig& numerics,
                             std::span<const double> grid, const SolveOptions& opts = {});

namespace detail {
// Throws IntegrationError when Re(2 g1) exceeds the exponent guard.
void guard_gamma(double t, const Complex& g1, double bound);
} // namespace detail

} // namespace qcavity
