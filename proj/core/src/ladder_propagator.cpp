#include "qcavity/ladder_propagator.hpp"

#include <cmath>

namespace qcavity {

namespace {
constexpr Complex I{0.0, 1.0};
}

BetaState beta_rhs(double t, const BetaState& beta, const BogoliubovCoeffs& coeffs,
                   const ModelParams& params) {
    const double gm = params.g * std::sqrt(static_cast<double>(beta.m_excitations));
    const Complex s13 = coeffs.t1 + coeffs.t3;
    const Complex s24 = coeffs.t2 + coeffs.t4;
    const Complex fwd = std::exp(I * params.Omega * t - 2.0 * beta.z);  // e^{+i Omega t - 2 bz}
    const Complex bwd = std::exp(-I * params.Omega * t + 2.0 * beta.z); // e^{-i Omega t + 2 bz}

    BetaState d;
    d.m_excitations = beta.m_excitations;
    d.z = -I * gm * s13 * fwd * beta.plus;
    d.plus = -I * gm * (s24 * bwd + s13 * fwd * beta.plus * beta.plus);
    d.minus = -I * gm * s13 * fwd;
    return d;
}

Eigen::Matrix2cd ui_matrix(const BetaState& beta) {
    const Complex ez = std::exp(beta.z);
    const Complex emz = std::exp(-beta.z);
    Eigen::Matrix2cd u;
    u(0, 0) = ez;
    u(1, 0) = emz * beta.plus;
    u(0, 1) = ez * beta.minus;
    u(1, 1) = emz * (1.0 + beta.plus * beta.minus);
    return u;
}

double unitarity_residual(const BetaState& beta) {
    const Eigen::Matrix2cd u = ui_matrix(beta);
    const Eigen::Matrix2cd r = u.adjoint() * u - Eigen::Matrix2cd::Identity();
    return r.cwiseAbs().maxCoeff();
}

LadderAmplitudes ladder_amplitudes(const BetaState& beta, const InitialLadderState& initial) {
    LadderAmplitudes amps;
    amps.c_en = std::exp(beta.z) * (initial.alpha + initial.beta_amp * beta.minus);
    amps.c_gn1 = std::exp(-beta.z)
                 * (initial.alpha * beta.plus
                    + initial.beta_amp * (1.0 + beta.plus * beta.minus));
    return amps;
}

JointTrajectory solve_joint(const ModelParams& params, int m_excitations,
                            const NumericsConfig& numerics, std::span<const double> grid,
                            const SolveOptions& opts) {
    validate(params);
    if (m_excitations < 1)
        throw ConfigError("ladder: excitation number M must be >= 1");

    JointTrajectory out;

    if (params.g == 0.0) {
        // Decoupled atom: fall back to the pure gamma solve so the gamma
        // trajectory is identical to solve_gammas at equal tolerances.
        GammaTrajectory gt = solve_gammas(params, numerics, grid, opts);
        out.times = std::move(gt.times);
        out.gammas = std::move(gt.gammas);
        out.stats = gt.stats;
        out.betas.assign(out.gammas.size(), BetaState{{}, {}, {}, m_excitations});
        return out;
    }

    OdeProblem problem;
    problem.dimension = 7;
    problem.y0 = StateVec::Zero(7);
    problem.t_begin = grid.empty() ? 0.0 : grid.front();
    problem.t_end = grid.empty() ? 0.0 : grid.back();
    problem.rhs = [&params, m_excitations, guard = opts.exp_guard](double t, const StateVec& y,
                                                                   StateVec& dy) {
        detail::guard_gamma(t, y[0], guard);
        if (std::abs(2.0 * y[4].real()) > guard)
            throw IntegrationError("ladder: exp(2*beta_z) exponent guard tripped", t);
        const GammaState g{y[0], y[1], y[2], y[3]};
        const BetaState b{y[4], y[5], y[6], m_excitations};
        const GammaState dg = gamma_rhs(t, g, params);
        const BetaState db = beta_rhs(t, b, bogoliubov_coeffs(g), params);
        dy[0] = dg.g1;
        dy[1] = dg.g2;
        dy[2] = dg.g3;
        dy[3] = dg.g4;
        dy[4] = db.z;
        dy[5] = db.plus;
        dy[6] = db.minus;
    };

    IntegrateOptions iopt;
    iopt.rtol = numerics.rtol;
    iopt.atol = numerics.atol;
    iopt.tolerance_scale = opts.tolerance_scale;

    const Trajectory traj = integrate(problem, iopt, grid, &out.stats);
    out.times = traj.times;
    out.gammas.reserve(traj.states.size());
    out.betas.reserve(traj.states.size());
    for (const StateVec& y : traj.states) {
        out.gammas.push_back(GammaState{y[0], y[1], y[2], y[3]});
        out.betas.push_back(BetaState{y[4], y[5], y[6], m_excitations});
    }
    return out;
}

} // namespace qcavity
