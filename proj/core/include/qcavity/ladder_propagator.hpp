#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qcavity/model.hpp"
#include "qcavity/ode.hpp"
#include "qcavity/u0_propagator.hpp"

namespace qcavity {

// Wei-Norman functions of the interaction-picture propagator
// U_I = exp(beta_z sigma_z) exp(beta_+ b†) exp(beta_- b) on one excitation
// ladder span{|e,n>, |g,n+1>} with conserved M = n+1.
struct BetaState {
    Complex z{}, plus{}, minus{};
    int m_excitations = 1;
};

// Evolved amplitudes of |e,n> and |g,n+1>; |c_en|² + |c_gn1|² = 1 up to
// integration error (never renormalized: the drift is an accuracy diagnostic).
struct LadderAmplitudes {
    Complex c_en, c_gn1;
};

// Right-hand side of the beta system; the Bogoliubov coefficients must be
// evaluated at the same time t (joint integration contract).
BetaState beta_rhs(double t, const BetaState& beta, const BogoliubovCoeffs& coeffs,
                   const ModelParams& params);

// U_I restricted to the ladder, in the basis (|e,n>, |g,n+1>):
//   [ e^{bz}        e^{bz} b-          ]
//   [ e^{-bz} b+    e^{-bz}(1 + b+ b-) ]
Eigen::Matrix2cd ui_matrix(const BetaState& beta);

// max-norm residual of U†U - 1.
double unitarity_residual(const BetaState& beta);

// c_en = e^{bz}(alpha + beta b-), c_gn1 = e^{-bz}(alpha b+ + beta(1 + b+ b-)).
LadderAmplitudes ladder_amplitudes(const BetaState& beta, const InitialLadderState& initial);

// Joint trajectory of the gamma and beta systems on a shared grid. The two are
// integrated as one 7-component system so the beta right-hand side sees
// Bogoliubov coefficients at the integrator's internal stage times; with g = 0
// the beta components are identically zero and the gamma components match
// solve_gammas bit for bit.
struct JointTrajectory {
    std::vector<double> times;
    std::vector<GammaState> gammas;
    std::vector<BetaState> betas;
    StepStats stats;
};

JointTrajectory solve_joint(const ModelParams& params, int m_excitations,
                            const NumericsConfig& numerics, std::span<const double> grid,
                            const SolveOptions& opts = {});

} // namespace qcavity
