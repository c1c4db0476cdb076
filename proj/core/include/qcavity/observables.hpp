#pragma once

#include <utility>
#include <vector>

#include "qcavity/ladder_propagator.hpp"
#include "qcavity/model.hpp"
#include "qcavity/u0_propagator.hpp"

namespace qcavity {

// Time-stamped observables of one track. x_mean/p_mean/var_x/var_p are NaN
// when the closed-form route does not apply to the initial state (they require
// a ladder based at n = 0; p_excited additionally requires |e,0>).
struct ObservableRecord {
    double t = 0.0;
    double n_mean = 0.0;
    double p_excited = 0.0;
    double x_mean = 0.0;
    double p_mean = 0.0;
    double var_x = 0.0;
    double var_p = 0.0;
};

struct FieldMoments {
    Complex mean_a{};   // <a>
    Complex mean_a2{};  // <a²>
};

// Square uniform grid in the coherent-state plane, shared by both axes.
struct QGridSpec {
    double lo = -6.0;
    double hi = 6.0;
    int points = 201;
};

struct QGrid {
    std::vector<double> x_axis;  // Re z
    std::vector<double> y_axis;  // Im z
    std::vector<double> values;  // row-major: x outer, y inner
    double cell_area() const;
    double normalization() const;  // Riemann sum * cell area
};

// Extracts the real part after checking the imaginary residual; a residual
// above max(tol, tol*|Re|) signals conjugacy drift and raises NumericsError.
double real_checked(Complex z, double tol = 1e-8, const char* what = "expectation");

// Mean photon number of the evolved ladder state:
// Re{ g11 [ n |c_en|² + (n+1) |c_gn1|² ] + g00 }.
double mean_photons(const GammaState& gamma, const BetaState& beta,
                    const InitialLadderState& initial);

// Reduced closed form for a ladder based at n = 0:
// Re{ g11 |alpha b+|² e^{-2 Re bz} + g00 }. Agrees with mean_photons whenever
// beta_amp = 0; kept as an independent consistency route.
double mean_photons_n0(const GammaState& gamma, const BetaState& beta, Complex alpha);

// Excited-state probability for the initial state |e,0>:
// e^{2 Re(g4 + bz)} / sqrt(1 - 4 |g2|² e^{4 Re g1}).
// Values in (1, 1 + 1e-9] are clamped to 1; larger excursions or a
// non-positive square-root argument raise NumericsError.
double excited_prob(const GammaState& gamma, const BetaState& beta);

// Closed-form field moments for a ladder based at n = 0:
// <a†>  = (beta b+* alpha* - 2 beta* b+ alpha g3) e^{-2 Re bz - g1}
// <a†²> = -2 g3 e^{-2 g1} (2 |alpha b+|² e^{-2 Re bz} + 1)
// returned conjugated as <a>, <a²>.
FieldMoments field_moments(const GammaState& gamma, const BetaState& beta,
                           const InitialLadderState& initial);

// var_x = n + 1/2 + Re<a²> - (sqrt(2) Re<a>)²,
// var_p = n + 1/2 - Re<a²> - (sqrt(2) Im<a>)².
// The single authoritative assembly used by both tracks.
std::pair<double, double> quadrature_variances(const FieldMoments& moments, double n_mean);

// Husimi Q of the reduced field state for the initial state |e,0>:
// Q(z) = (1/pi) e^{-|z|² + 2 Re(g4 + z*² g2 e^{2 g1})}
//        * ( e^{2 Re bz} + |z b+|² e^{2 Re(g1 - bz)} ).
double husimi_q(const GammaState& gamma, const BetaState& beta, Complex z);

QGrid husimi_q_grid(const GammaState& gamma, const BetaState& beta, const QGridSpec& spec);

// Assemble the full record at one sample; fields that require an inapplicable
// closed form are NaN (see ObservableRecord).
ObservableRecord semianalytic_record(double t, const GammaState& gamma, const BetaState& beta,
                                     const InitialLadderState& initial);

} // namespace qcavity
