#include "qcavity/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qcavity {

namespace {

// Dormand-Prince 5(4) tableau (FSAL).
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;

constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                 a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                 b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;

// b - bhat, for the embedded 4th-order error estimate.
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

// Dense-output weights (Hairer's rcont5 coefficients).
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

void check_grid(const OdeProblem& problem, std::span<const double> grid) {
    if (problem.dimension < 1) throw ConfigError("ode: dimension must be >= 1");
    if (!(problem.t_end > problem.t_begin))
        throw ConfigError("ode: t_end must exceed t_begin");
    if (problem.y0.size() != problem.dimension)
        throw ConfigError("ode: y0 size does not match dimension");
    if (grid.empty()) throw ConfigError("ode: empty sample grid");
    if (grid.front() != problem.t_begin || grid.back() != problem.t_end)
        throw ConfigError("ode: sample grid must span [t_begin, t_end]");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw ConfigError("ode: sample grid must be strictly increasing");
}

double error_norm(const StateVec& err, const StateVec& y, const StateVec& ynew,
                  double atol, double rtol) {
    double sum = 0.0;
    const auto n = err.size();
    for (Eigen::Index i = 0; i < n; ++i) {
        const double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
        const double r = std::abs(err[i]) / sc;
        sum += r * r;
    }
    return std::sqrt(sum / static_cast<double>(n));
}

// Hairer's starting-step heuristic, trimmed to the deterministic essentials.
double initial_step(const OdeProblem& problem, const StateVec& f0, double atol,
                    double rtol, double max_step) {
    double dnf = 0.0, dny = 0.0;
    for (Eigen::Index i = 0; i < problem.y0.size(); ++i) {
        const double sc = atol + rtol * std::abs(problem.y0[i]);
        dnf += std::norm(f0[i] / sc);
        dny += std::norm(problem.y0[i] / sc);
    }
    double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * std::sqrt(dny / dnf);
    h = std::min(h, max_step);
    return h;
}

Trajectory run_fixed(const OdeProblem& problem, const IntegrateOptions& options,
                     std::span<const double> grid, StepStats* stats) {
    const bool rk4 = options.scheme == OdeScheme::rk4_fixed;
    if (!(options.fixed_step > 0.0))
        throw ConfigError("ode: fixed_step must be positive");

    Trajectory out;
    out.times.assign(grid.begin(), grid.end());
    out.states.reserve(grid.size());
    out.states.push_back(problem.y0);

    StateVec y = problem.y0;
    StateVec k1(problem.dimension), k2(problem.dimension), k3(problem.dimension),
        k4(problem.dimension), ytmp(problem.dimension);
    StepStats st;

    double t = problem.t_begin;
    // Steps are aligned to land exactly on every sample time.
    for (std::size_t is = 1; is < grid.size(); ++is) {
        const double target = grid[is];
        while (t < target) {
            double h = std::min(options.fixed_step, target - t);
            problem.rhs(t, y, k1);
            if (rk4) {
                ytmp = y + (0.5 * h) * k1;
                problem.rhs(t + 0.5 * h, ytmp, k2);
                ytmp = y + (0.5 * h) * k2;
                problem.rhs(t + 0.5 * h, ytmp, k3);
                ytmp = y + h * k3;
                problem.rhs(t + h, ytmp, k4);
                y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                st.rhs_calls += 4;
            } else {
                y += h * k1;
                st.rhs_calls += 1;
            }
            if (!y.allFinite())
                throw IntegrationError("ode: non-finite state in fixed-step integration", t);
            t += h;
            ++st.accepted;
            if (st.accepted > options.max_steps)
                throw IntegrationError("ode: step budget exhausted", t);
        }
        t = target;
        out.states.push_back(y);
    }
    if (stats) *stats = st;
    return out;
}

} // namespace

Trajectory integrate(const OdeProblem& problem, const IntegrateOptions& options,
                     std::span<const double> grid, StepStats* stats) {
    check_grid(problem, grid);
    if (options.scheme != OdeScheme::dopri54) return run_fixed(problem, options, grid, stats);

    const double atol = options.atol * options.tolerance_scale;
    const double rtol = options.rtol * options.tolerance_scale;
    const double span = problem.t_end - problem.t_begin;
    const double hmax = options.max_step > 0.0 ? options.max_step : span;

    const int n = problem.dimension;
    StateVec y = problem.y0;
    StateVec k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), err(n);
    StateVec rc1(n), rc2(n), rc3(n), rc4(n), rc5(n); // dense-output coefficients

    Trajectory out;
    out.times.assign(grid.begin(), grid.end());
    out.states.reserve(grid.size());
    out.states.push_back(y);
    std::size_t next_sample = 1;

    StepStats st;
    double t = problem.t_begin;

    problem.rhs(t, y, k1);
    ++st.rhs_calls;
    if (!k1.allFinite()) throw IntegrationError("ode: non-finite rhs at initial state", t);

    double h = options.initial_step > 0.0 ? options.initial_step
                                          : initial_step(problem, k1, atol, rtol, hmax);
    bool last_rejected = false;

    while (t < problem.t_end) {
        if (st.accepted + st.rejected > options.max_steps)
            throw IntegrationError("ode: step budget exhausted", t);
        h = std::min(h, problem.t_end - t);
        if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), 1.0))
            throw IntegrationError("ode: step size underflow", t);

        ytmp = y + h * (a21 * k1);
        problem.rhs(t + c2 * h, ytmp, k2);
        ytmp = y + h * (a31 * k1 + a32 * k2);
        problem.rhs(t + c3 * h, ytmp, k3);
        ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
        problem.rhs(t + c4 * h, ytmp, k4);
        ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        problem.rhs(t + c5 * h, ytmp, k5);
        ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        problem.rhs(t + h, ytmp, k6);
        ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        problem.rhs(t + h, ynew, k7);
        st.rhs_calls += 6;

        err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        const double enorm = error_norm(err, y, ynew, atol, rtol);

        if (!(enorm <= 1.0) || !ynew.allFinite()) { // NaN-safe: non-finite rejects
            if (!std::isfinite(enorm) && h <= 1e3 * std::numeric_limits<double>::epsilon())
                throw IntegrationError("ode: non-finite rhs value", t);
            ++st.rejected;
            const double shrink = std::isfinite(enorm)
                                      ? std::max(0.2, options.safety * std::pow(enorm, -0.2))
                                      : 0.2;
            h *= std::min(shrink, 0.9);
            last_rejected = true;
            continue;
        }

        // Serve every sample that falls inside (t, t+h] from the dense interpolant.
        if (next_sample < out.times.size() && out.times[next_sample] <= t + h) {
            rc1 = y;
            rc2 = ynew - y;
            rc3 = h * k1 - rc2;
            rc4 = rc2 - h * k7 - rc3;
            rc5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
            while (next_sample < out.times.size() && out.times[next_sample] <= t + h) {
                const double theta = (out.times[next_sample] - t) / h;
                const double th1 = 1.0 - theta;
                out.states.push_back(
                    rc1 + theta * (rc2 + th1 * (rc3 + theta * (rc4 + th1 * rc5))));
                ++next_sample;
            }
            // The step endpoint is exact; avoid interpolation error there.
            if (out.times[next_sample - 1] == t + h) out.states.back() = ynew;
        }

        t += h;
        y.swap(ynew);
        k1.swap(k7); // FSAL
        ++st.accepted;

        double grow = options.safety * std::pow(std::max(enorm, 1e-10), -0.2);
        grow = std::min(grow, last_rejected ? 1.0 : 5.0);
        grow = std::max(grow, 0.2);
        h = std::min(h * grow, hmax);
        last_rejected = false;
    }

    if (out.states.size() != out.times.size())
        throw IntegrationError("ode: internal sampling mismatch", t);
    if (stats) *stats = st;
    return out;
}

std::optional<double> convergence_order(const OdeProblem& problem,
                                        const std::function<StateVec(double)>& exact,
                                        OdeScheme scheme, double coarse_step) {
    const std::vector<double> grid{problem.t_begin, problem.t_end};
    IntegrateOptions opt;
    opt.scheme = scheme;

    const StateVec ref = exact(problem.t_end);
    double errs[2];
    double h = coarse_step;
    for (int i = 0; i < 2; ++i, h *= 0.5) {
        opt.fixed_step = h;
        const Trajectory traj = integrate(problem, opt, grid);
        errs[i] = (traj.states.back() - ref).norm();
    }
    if (errs[0] < 1e-14 || errs[1] < 1e-14) return std::nullopt;
    return std::log2(errs[0] / errs[1]);
}

} // namespace qcavity
