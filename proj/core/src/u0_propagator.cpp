#include "qcavity/u0_propagator.hpp"

#include <cmath>

namespace qcavity {

namespace {
constexpr Complex I{0.0, 1.0};
}

GammaState gamma_rhs(double t, const GammaState& gamma, const ModelParams& params) {
    const double chi = chi_at(params, t);
    const Complex e2g1 = std::exp(2.0 * gamma.g1);
    GammaState d;
    d.g1 = -I * params.omega0 - 4.0 * I * e2g1 * chi * gamma.g2;
    d.g2 = (-I / e2g1 + 4.0 * I * e2g1 * gamma.g2 * gamma.g2) * chi;
    d.g3 = -I * e2g1 * chi;
    d.g4 = -2.0 * I * e2g1 * chi * gamma.g2;
    return d;
}

BogoliubovCoeffs bogoliubov_coeffs(const GammaState& gamma) {
    const Complex eg1 = std::exp(gamma.g1);
    const Complex emg1 = std::exp(-gamma.g1);
    BogoliubovCoeffs c;
    c.t1 = eg1 * (1.0 - 4.0 * gamma.g2 * gamma.g3);
    c.t2 = 2.0 * eg1 * gamma.g2;
    c.t3 = -2.0 * emg1 * gamma.g3;
    c.t4 = emg1;
    return c;
}

NumberCoeffs number_coeffs(const GammaState& gamma) {
    const Complex g2g3 = gamma.g2 * gamma.g3;
    NumberCoeffs n;
    n.g11 = 1.0 - 8.0 * g2g3;
    n.g20 = 2.0 * gamma.g2;
    n.g02 = 2.0 * gamma.g3 * (4.0 * g2g3 - 1.0);
    n.g00 = -4.0 * g2g3;
    return n;
}

U0Residuals u0_residuals(const GammaState& gamma) {
    const BogoliubovCoeffs c = bogoliubov_coeffs(gamma);
    U0Residuals r;
    r.conjugacy = std::abs(c.t4 - std::conj(c.t1)) + std::abs(c.t3 - std::conj(c.t2));
    r.symplectic = std::abs(std::norm(c.t1) - std::norm(c.t2) - 1.0);
    r.im_g11 = std::abs(number_coeffs(gamma).g11.imag());
    return r;
}

namespace detail {

void guard_gamma(double t, const Complex& g1, double bound) {
    if (std::abs(2.0 * g1.real()) > bound)
        throw IntegrationError("u0: exp(2*gamma1) exponent guard tripped", t);
}

} // namespace detail

GammaTrajectory solve_gammas(const ModelParams& params, const NumericsConfig& numerics,
                             std::span<const double> grid, const SolveOptions& opts) {
    validate(params);

    OdeProblem problem;
    problem.dimension = 4;
    problem.y0 = StateVec::Zero(4);
    problem.t_begin = grid.empty() ? 0.0 : grid.front();
    problem.t_end = grid.empty() ? 0.0 : grid.back();
    problem.rhs = [&params, guard = opts.exp_guard](double t, const StateVec& y, StateVec& dy) {
        detail::guard_gamma(t, y[0], guard);
        const GammaState g{y[0], y[1], y[2], y[3]};
        const GammaState d = gamma_rhs(t, g, params);
        dy[0] = d.g1;
        dy[1] = d.g2;
        dy[2] = d.g3;
        dy[3] = d.g4;
    };

    IntegrateOptions iopt;
    iopt.rtol = numerics.rtol;
    iopt.atol = numerics.atol;
    iopt.tolerance_scale = opts.tolerance_scale;

    GammaTrajectory out;
    const Trajectory traj = integrate(problem, iopt, grid, &out.stats);
    out.times = traj.times;
    out.gammas.reserve(traj.states.size());
    for (const StateVec& y : traj.states)
        out.gammas.push_back(GammaState{y[0], y[1], y[2], y[3]});
    return out;
}

} // namespace qcavity
