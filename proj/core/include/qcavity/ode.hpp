#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qcavity/errors.hpp"

namespace qcavity {

using StateVec = Eigen::VectorXcd;

// First-order system of complex ODEs dy/dt = rhs(t, y) on [t_begin, t_end].
struct OdeProblem {
    int dimension = 0;
    std::function<void(double t, const StateVec& y, StateVec& dydt)> rhs;
    StateVec y0;
    double t_begin = 0.0;
    double t_end = 0.0;
};

enum class OdeScheme {
    dopri54,     // embedded Dormand-Prince 5(4), adaptive, dense output
    rk4_fixed,   // classical fixed-step RK4 cross-check mode
    euler_fixed, // first-order reference, for order measurements only
};

struct IntegrateOptions {
    double rtol = 1e-9;
    double atol = 1e-12;
    OdeScheme scheme = OdeScheme::dopri54;
    double fixed_step = 1e-3;     // used by the fixed-step schemes
    double initial_step = 0.0;    // 0: selected automatically
    double max_step = 0.0;        // 0: no cap beyond the span
    double safety = 0.9;
    // Extra accuracy headroom: the controller targets tolerance_scale * (atol, rtol).
    // Keeps reported tolerances meaningful while leaving margin for invariant checks.
    double tolerance_scale = 1.0;
    std::uint64_t max_steps = 200'000'000;
};

struct StepStats {
    std::uint64_t accepted = 0;
    std::uint64_t rejected = 0;
    std::uint64_t rhs_calls = 0;
};

// Sampled solution; times equal the requested sample grid, states[0] == y0.
struct Trajectory {
    std::vector<double> times;
    std::vector<StateVec> states;
};

// Integrate with local error controlled to (rtol, atol) per step; states are
// produced exactly at the requested sample times via the scheme's dense output
// (adaptive mode) or step alignment (fixed modes). The sample grid must be
// strictly increasing, start at t_begin and end at t_end.
//
// Throws IntegrationError on step-size underflow or a non-finite right-hand side.
// Identical inputs produce bit-identical trajectories.
Trajectory integrate(const OdeProblem& problem, const IntegrateOptions& options,
                     std::span<const double> sample_grid, StepStats* stats = nullptr);

// Empirical convergence order from errors at fixed steps h and h/2 against an
// analytic solution. Returns nullopt when both errors sit at round-off level.
std::optional<double> convergence_order(const OdeProblem& problem,
                                        const std::function<StateVec(double)>& exact,
                                        OdeScheme scheme, double coarse_step);

} // namespace qcavity
