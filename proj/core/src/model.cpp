#include "qcavity/model.hpp"

#include <cmath>

#include "qcavity/errors.hpp"

namespace qcavity {

double omega_at(const ModelParams& params, double t) {
    return params.omega0 * (1.0 + params.epsilon * std::sin(params.eta * t));
}

double chi_at(const ModelParams& params, double t) {
    const double phase = params.eta * t;
    return params.epsilon * params.eta * std::cos(phase)
           / (4.0 * (1.0 + params.epsilon * std::sin(phase)));
}

void validate(const ModelParams& params) {
    if (!(params.omega0 > 0.0))
        throw ConfigError("model.omega0: base frequency must be positive");
    if (!(std::abs(params.epsilon) < 1.0))
        throw ConfigError("model.epsilon: modulation amplitude must satisfy |epsilon| < 1");
    if (!(params.eta >= 0.0))
        throw ConfigError("model.eta: modulation frequency must be >= 0");
    if (!(params.Omega >= 0.0))
        throw ConfigError("model.Omega: atomic frequency must be >= 0");
    if (!(params.g >= 0.0))
        throw ConfigError("model.g: coupling must be >= 0");
}

void validate(const InitialLadderState& initial) {
    if (initial.n < 0)
        throw ConfigError("initial.n: base photon number must be >= 0");
    const double norm = std::norm(initial.alpha) + std::norm(initial.beta_amp);
    if (std::abs(norm - 1.0) > 1e-12)
        throw ConfigError("initial: |alpha|^2 + |beta|^2 must equal 1 within 1e-12");
}

void validate(const NumericsConfig& numerics) {
    if (!(numerics.rtol > 0.0))
        throw ConfigError("numerics.rtol: relative tolerance must be positive");
    if (!(numerics.atol > 0.0))
        throw ConfigError("numerics.atol: absolute tolerance must be positive");
    if (numerics.nmax < 4)
        throw ConfigError("numerics.nmax: Fock truncation must be >= 4");
    if (!(numerics.tail_threshold > 0.0 && numerics.tail_threshold < 1.0))
        throw ConfigError("numerics.tail_threshold: must lie in (0, 1)");
    if (!(numerics.t_max > 0.0))
        throw ConfigError("numerics.t_max: final time must be positive");
    if (!(numerics.dt_out > 0.0))
        throw ConfigError("numerics.dt_out: output interval must be positive");
}

void validate(const ModelParams& params, const NumericsConfig& numerics) {
    validate(params);
    validate(numerics);
}

std::vector<double> sample_grid(double t_max, double dt) {
    if (!(t_max > 0.0) || !(dt > 0.0))
        throw ConfigError("sample_grid: t_max and dt must be positive");
    std::vector<double> grid;
    const auto count = static_cast<std::size_t>(t_max / dt + 1e-9);
    grid.reserve(count + 2);
    for (std::size_t i = 0; i <= count; ++i) grid.push_back(static_cast<double>(i) * dt);
    if (grid.back() < t_max - 1e-9 * t_max) grid.push_back(t_max);
    else grid.back() = t_max;
    return grid;
}

} // namespace qcavity
