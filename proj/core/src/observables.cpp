#include "qcavity/observables.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "qcavity/errors.hpp"

namespace qcavity {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

bool is_e0_state(const InitialLadderState& s) {
    return s.n == 0 && std::abs(s.beta_amp) < 1e-12;
}

std::vector<double> linspace(double lo, double hi, int points) {
    std::vector<double> v(points);
    const double step = (hi - lo) / static_cast<double>(points - 1);
    for (int i = 0; i < points; ++i) v[i] = lo + step * i;
    v.back() = hi;
    return v;
}

} // namespace

double QGrid::cell_area() const {
    const double dx = x_axis.size() > 1 ? x_axis[1] - x_axis[0] : 0.0;
    const double dy = y_axis.size() > 1 ? y_axis[1] - y_axis[0] : 0.0;
    return dx * dy;
}

double QGrid::normalization() const {
    double sum = 0.0;
    for (double q : values) sum += q;
    return sum * cell_area();
}

double real_checked(Complex z, double tol, const char* what) {
    if (std::abs(z.imag()) > std::max(tol, tol * std::abs(z.real())))
        throw NumericsError(std::string(what) + ": imaginary residual "
                            + std::to_string(z.imag()) + " above tolerance");
    return z.real();
}

double mean_photons(const GammaState& gamma, const BetaState& beta,
                    const InitialLadderState& initial) {
    const NumberCoeffs nc = number_coeffs(gamma);
    const LadderAmplitudes amps = ladder_amplitudes(beta, initial);
    const double pop = static_cast<double>(initial.n) * std::norm(amps.c_en)
                       + static_cast<double>(initial.n + 1) * std::norm(amps.c_gn1);
    return real_checked(nc.g11 * pop + nc.g00, 1e-8, "mean_photons");
}

double mean_photons_n0(const GammaState& gamma, const BetaState& beta, Complex alpha) {
    const NumberCoeffs nc = number_coeffs(gamma);
    const double pop = std::norm(alpha * beta.plus) * std::exp(-2.0 * beta.z.real());
    return real_checked(nc.g11 * pop + nc.g00, 1e-8, "mean_photons_n0");
}

double excited_prob(const GammaState& gamma, const BetaState& beta) {
    const double arg =
        1.0 - 4.0 * std::norm(gamma.g2) * std::exp(4.0 * gamma.g1.real());
    if (!(arg > 0.0))
        throw NumericsError("excited_prob: denominator argument <= 0 "
                            "(outside the formula's range of validity)");
    double p = std::exp(2.0 * (gamma.g4.real() + beta.z.real())) / std::sqrt(arg);
    if (p > 1.0) {
        if (p > 1.0 + 1e-9)
            throw NumericsError("excited_prob: value " + std::to_string(p)
                                + " exceeds 1 beyond round-off");
        p = 1.0;
    }
    return p;
}

FieldMoments field_moments(const GammaState& gamma, const BetaState& beta,
                           const InitialLadderState& initial) {
    const Complex alpha = initial.alpha;
    const Complex b = initial.beta_amp;
    const double e2rbz = std::exp(-2.0 * beta.z.real());

    const Complex a_dag = (b * std::conj(beta.plus) * std::conj(alpha)
                           - 2.0 * std::conj(b) * beta.plus * alpha * gamma.g3)
                          * e2rbz * std::exp(-gamma.g1);
    const Complex a2_dag = -2.0 * gamma.g3 * std::exp(-2.0 * gamma.g1)
                           * (2.0 * std::norm(alpha * beta.plus) * e2rbz + 1.0);

    FieldMoments m;
    m.mean_a = std::conj(a_dag);
    m.mean_a2 = std::conj(a2_dag);
    return m;
}

std::pair<double, double> quadrature_variances(const FieldMoments& moments, double n_mean) {
    const double re_a2 = moments.mean_a2.real();
    const double xm = std::numbers::sqrt2 * moments.mean_a.real();
    const double pm = std::numbers::sqrt2 * moments.mean_a.imag();
    double var_x = n_mean + 0.5 + re_a2 - xm * xm;
    double var_p = n_mean + 0.5 - re_a2 - pm * pm;
    if (var_x < -1e-9 || var_p < -1e-9)
        throw NumericsError("quadrature_variances: negative variance beyond round-off");
    return {var_x, var_p};
}

double husimi_q(const GammaState& gamma, const BetaState& beta, Complex z) {
    const Complex zc = std::conj(z);
    const double expo = -std::norm(z)
                        + 2.0 * (gamma.g4 + zc * zc * gamma.g2 * std::exp(2.0 * gamma.g1)).real();
    const double bracket = std::exp(2.0 * beta.z.real())
                           + std::norm(z * beta.plus)
                                 * std::exp(2.0 * (gamma.g1.real() - beta.z.real()));
    return std::exp(expo) * bracket / std::numbers::pi;
}

QGrid husimi_q_grid(const GammaState& gamma, const BetaState& beta, const QGridSpec& spec) {
    if (spec.points < 2 || !(spec.hi > spec.lo))
        throw ConfigError("qgrid: need points >= 2 and hi > lo");
    QGrid grid;
    grid.x_axis = linspace(spec.lo, spec.hi, spec.points);
    grid.y_axis = grid.x_axis;
    grid.values.resize(static_cast<std::size_t>(spec.points) * spec.points);
    for (int ix = 0; ix < spec.points; ++ix)
        for (int iy = 0; iy < spec.points; ++iy)
            grid.values[static_cast<std::size_t>(ix) * spec.points + iy] =
                husimi_q(gamma, beta, Complex{grid.x_axis[ix], grid.y_axis[iy]});
    return grid;
}

ObservableRecord semianalytic_record(double t, const GammaState& gamma, const BetaState& beta,
                                     const InitialLadderState& initial) {
    ObservableRecord rec;
    rec.t = t;
    rec.n_mean = mean_photons(gamma, beta, initial);
    rec.p_excited = is_e0_state(initial) ? excited_prob(gamma, beta) : kNan;
    if (initial.n == 0) {
        const FieldMoments m = field_moments(gamma, beta, initial);
        rec.x_mean = std::numbers::sqrt2 * m.mean_a.real();
        rec.p_mean = std::numbers::sqrt2 * m.mean_a.imag();
        const auto [vx, vp] = quadrature_variances(m, rec.n_mean);
        rec.var_x = vx;
        rec.var_p = vp;
    } else {
        rec.x_mean = rec.p_mean = rec.var_x = rec.var_p = kNan;
    }
    return rec;
}

} // namespace qcavity
