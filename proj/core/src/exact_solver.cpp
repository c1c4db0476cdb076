#include "qcavity/exact_solver.hpp"

#include <cmath>
#include <numbers>

#include "qcavity/errors.hpp"

namespace qcavity {

FockQubitState FockQubitState::from_ladder(const InitialLadderState& initial, int nmax) {
    if (initial.n + 1 > nmax)
        throw ConfigError("exact: initial ladder does not fit the Fock truncation");
    FockQubitState psi;
    psi.nmax = nmax;
    psi.amplitudes = Eigen::VectorXcd::Zero(2 * (nmax + 1));
    psi.amplitudes[initial.n] = initial.alpha;                  // |e,n>
    psi.amplitudes[(nmax + 1) + initial.n + 1] = initial.beta_amp;  // |g,n+1>
    return psi;
}

double FockQubitState::tail_population() const {
    const int levels = nmax + 1;
    const int tail_start = nmax + 1 - (levels + 9) / 10; // top 10%, at least one level
    double pop = 0.0;
    for (int atom = 0; atom < 2; ++atom)
        for (int n = tail_start; n <= nmax; ++n) pop += std::norm(amp(atom, n));
    return pop;
}

OperatorSet build_operators(int nmax) {
    if (nmax < 4) throw ConfigError("exact: nmax must be >= 4");
    OperatorSet ops;
    ops.nmax = nmax;
    const int d = nmax + 1;
    ops.lowering = Eigen::MatrixXcd::Zero(d, d);
    ops.number = Eigen::MatrixXcd::Zero(d, d);
    for (int n = 1; n <= nmax; ++n) ops.lowering(n - 1, n) = std::sqrt(static_cast<double>(n));
    for (int n = 0; n <= nmax; ++n) ops.number(n, n) = static_cast<double>(n);
    ops.raising = ops.lowering.adjoint();
    ops.sigma_z << 1, 0, 0, -1;
    ops.sigma_plus << 0, 1, 0, 0;   // |e><g|
    ops.sigma_minus << 0, 0, 1, 0;  // |g><e|
    return ops;
}

Eigen::MatrixXcd embed(const Eigen::Matrix2cd& atom_op, const Eigen::MatrixXcd& field_op) {
    const auto d = field_op.rows();
    Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(2 * d, 2 * d);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            if (atom_op(i, j) != Complex{0.0, 0.0})
                full.block(i * d, j * d, d, d) = atom_op(i, j) * field_op;
    return full;
}

Eigen::MatrixXcd hamiltonian_at(double t, const ModelParams& params, const OperatorSet& ops) {
    const int d = ops.nmax + 1;
    const Eigen::Matrix2cd id2 = Eigen::Matrix2cd::Identity();
    const Eigen::MatrixXcd idf = Eigen::MatrixXcd::Identity(d, d);
    const Eigen::MatrixXcd squeeze =
        ops.lowering * ops.lowering + ops.raising * ops.raising;
    const Eigen::Matrix2cd sigma_x = ops.sigma_plus + ops.sigma_minus;

    return omega_at(params, t) * embed(id2, ops.number)
           + chi_at(params, t) * embed(id2, squeeze)
           + 0.5 * params.Omega * embed(ops.sigma_z, idf)
           + params.g * embed(sigma_x, ops.lowering + ops.raising);
}

ExactPropagator::ExactPropagator(const ModelParams& params, int nmax)
    : params_(params), nmax_(nmax) {
    validate(params);
    if (nmax < 4) throw ConfigError("exact: nmax must be >= 4");
    sqrt1_.resize(nmax);
    sqrt2_.resize(nmax > 1 ? nmax - 1 : 0);
    for (int n = 0; n < nmax; ++n) sqrt1_[n] = std::sqrt(static_cast<double>(n + 1));
    for (int n = 0; n + 2 <= nmax; ++n)
        sqrt2_[n] = std::sqrt(static_cast<double>((n + 1) * (n + 2)));
}

void ExactPropagator::apply_rhs(double t, const StateVec& psi, StateVec& out) const {
    const double omega = omega_at(params_, t);
    const double chi = chi_at(params_, t);
    const double g = params_.g;
    const double half_Omega = 0.5 * params_.Omega;
    const int d = nmax_ + 1;
    const Complex* p = psi.data();
    Complex* o = out.data();

    for (int atom = 0; atom < 2; ++atom) {
        const double sz = atom == 0 ? 1.0 : -1.0;
        const int off = atom * d;
        const int offo = (1 - atom) * d;
        for (int n = 0; n <= nmax_; ++n) {
            Complex acc = (omega * n + half_Omega * sz) * p[off + n];
            if (n >= 2) acc += chi * sqrt2_[n - 2] * p[off + n - 2];
            if (n + 2 <= nmax_) acc += chi * sqrt2_[n] * p[off + n + 2];
            if (g != 0.0) {
                if (n >= 1) acc += g * sqrt1_[n - 1] * p[offo + n - 1];
                if (n + 1 <= nmax_) acc += g * sqrt1_[n] * p[offo + n + 1];
            }
            o[off + n] = Complex{acc.imag(), -acc.real()}; // -i * acc
        }
    }
}

EvolveResult evolve(const FockQubitState& psi0, const ModelParams& params,
                    const NumericsConfig& numerics, std::span<const double> grid) {
    validate(params, numerics);
    if (psi0.nmax < 4) throw ConfigError("exact: nmax must be >= 4");
    if (std::abs(psi0.norm() - 1.0) > 1e-8)
        throw ConfigError("exact: initial state must be normalized");

    const ExactPropagator prop(params, psi0.nmax);

    OdeProblem problem;
    problem.dimension = psi0.dim();
    problem.y0 = psi0.amplitudes;
    problem.t_begin = grid.empty() ? 0.0 : grid.front();
    problem.t_end = grid.empty() ? 0.0 : grid.back();
    problem.rhs = [&prop](double t, const StateVec& y, StateVec& dy) {
        prop.apply_rhs(t, y, dy);
    };

    IntegrateOptions iopt;
    iopt.rtol = numerics.rtol;
    iopt.atol = numerics.atol;

    EvolveResult out;
    const Trajectory traj = integrate(problem, iopt, grid, &out.stats);
    out.times = traj.times;
    out.states.reserve(traj.states.size());
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        FockQubitState s;
        s.nmax = psi0.nmax;
        s.amplitudes = traj.states[i];
        const double tail = s.tail_population();
        out.max_tail = std::max(out.max_tail, tail);
        if (tail > numerics.tail_threshold)
            throw TruncationError(traj.times[i], tail, psi0.nmax);
        out.max_norm_drift = std::max(out.max_norm_drift, std::abs(s.norm() - 1.0));
        out.states.push_back(std::move(s));
    }
    return out;
}

ObservableRecord exact_record(const FockQubitState& psi, double t) {
    const int d = psi.nmax + 1;
    const Complex* p = psi.amplitudes.data();

    double n_mean = 0.0, p_e = 0.0;
    Complex mean_a{}, mean_a2{};
    for (int atom = 0; atom < 2; ++atom) {
        const int off = atom * d;
        for (int n = 0; n < d; ++n) {
            const double pop = std::norm(p[off + n]);
            n_mean += n * pop;
            if (atom == 0) p_e += pop;
            if (n + 1 < d)
                mean_a += std::conj(p[off + n]) * std::sqrt(n + 1.0) * p[off + n + 1];
            if (n + 2 < d)
                mean_a2 += std::conj(p[off + n]) * std::sqrt((n + 1.0) * (n + 2.0))
                           * p[off + n + 2];
        }
    }

    const double nn = psi.amplitudes.squaredNorm();
    // Expectations are taken in the evolved (unrenormalized) state; normalize
    // so a reported observable never inherits the norm drift.
    n_mean /= nn;
    p_e /= nn;
    mean_a /= nn;
    mean_a2 /= nn;

    ObservableRecord rec;
    rec.t = t;
    rec.n_mean = n_mean;
    rec.p_excited = std::min(p_e, 1.0 + 1e-9);
    rec.x_mean = std::numbers::sqrt2 * mean_a.real();
    rec.p_mean = std::numbers::sqrt2 * mean_a.imag();
    const auto [vx, vp] = quadrature_variances(FieldMoments{mean_a, mean_a2}, n_mean);
    rec.var_x = vx;
    rec.var_p = vp;
    return rec;
}

Eigen::MatrixXcd reduced_field_density(const FockQubitState& psi) {
    const int d = psi.nmax + 1;
    const auto phi_e = psi.amplitudes.segment(0, d);
    const auto phi_g = psi.amplitudes.segment(d, d);
    Eigen::MatrixXcd rho = phi_e * phi_e.adjoint();
    rho.noalias() += phi_g * phi_g.adjoint();
    return rho;
}

QGrid husimi_q_numeric(const Eigen::MatrixXcd& rho_field, const QGridSpec& spec) {
    if (spec.points < 2 || !(spec.hi > spec.lo))
        throw ConfigError("qgrid: need points >= 2 and hi > lo");
    const int d = static_cast<int>(rho_field.rows());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(rho_field);
    if (eig.info() != Eigen::Success)
        throw NumericsError("husimi_q_numeric: eigendecomposition failed");
    const Eigen::VectorXd evals = eig.eigenvalues();
    if (evals.minCoeff() < -1e-10)
        throw NumericsError("husimi_q_numeric: field density operator not positive "
                            "semidefinite (min eigenvalue " + std::to_string(evals.minCoeff())
                            + ")");

    std::vector<int> keep;
    for (int i = 0; i < d; ++i)
        if (evals[i] > 1e-15) keep.push_back(i);

    QGrid grid;
    grid.x_axis.resize(spec.points);
    const double step = (spec.hi - spec.lo) / static_cast<double>(spec.points - 1);
    for (int i = 0; i < spec.points; ++i) grid.x_axis[i] = spec.lo + step * i;
    grid.x_axis.back() = spec.hi;
    grid.y_axis = grid.x_axis;
    grid.values.assign(static_cast<std::size_t>(spec.points) * spec.points, 0.0);

    Eigen::VectorXcd coh(d);
    for (int ix = 0; ix < spec.points; ++ix) {
        for (int iy = 0; iy < spec.points; ++iy) {
            const Complex z{grid.x_axis[ix], grid.y_axis[iy]};
            // <k|z> = e^{-|z|²/2} z^k / sqrt(k!); coh.dot(v) then yields <z|v>.
            Complex term = std::exp(-0.5 * std::norm(z));
            coh[0] = term;
            for (int k = 1; k < d; ++k) {
                term *= z / std::sqrt(static_cast<double>(k));
                coh[k] = term;
            }
            double q = 0.0;
            for (int idx : keep) {
                const Complex overlap = coh.dot(eig.eigenvectors().col(idx));
                q += evals[idx] * std::norm(overlap);
            }
            grid.values[static_cast<std::size_t>(ix) * spec.points + iy] =
                q / std::numbers::pi;
        }
    }
    return grid;
}

} // namespace qcavity
