#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qcavity/exact_solver.hpp"
#include "qcavity/ladder_propagator.hpp"
#include "qcavity/model.hpp"
#include "qcavity/observables.hpp"

namespace qcavity {

// Relative deviation with a guarded denominator: |a - b| / max(|b|, floor).
// The floor keeps early-time ratios finite where <n> starts at zero.
double relative_deviation(double a, double b, double floor = 0.01);

struct DeviationStats {
    double window_lo = 0.0, window_hi = 0.0;
    double max_abs = 0.0;
    double max_rel = 0.0;
    double mean_rel = 0.0;
};

struct TrackDiagnostics {
    StepStats steps;
    // Track A: worst constraint drifts along the trajectory.
    double max_conjugacy = 0.0;
    double max_symplectic = 0.0;
    double max_unitarity = 0.0;   // ui_matrix residual
    double max_amp_norm_dev = 0.0;  // | |c_en|² + |c_gn1|² - 1 |
    // Track B.
    double max_norm_drift = 0.0;
    double max_tail = 0.0;
    int nmax_used = 0;
};

struct ComparisonOptions {
    std::optional<std::pair<double, double>> deviation_window;  // default: full span
    bool track_a = true;
    bool track_b = true;
    bool escalate_nmax = true;  // double the Fock truncation on a tail breach
    int max_nmax = 4096;
};

// Red-vs-black comparison: both tracks on one grid plus per-time deviations.
struct ComparisonSeries {
    std::vector<double> times;
    std::vector<ObservableRecord> track_a;  // empty if not requested
    std::vector<ObservableRecord> track_b;
    std::vector<double> abs_dev_n;  // empty unless both tracks present
    std::vector<double> rel_dev_n;
    DeviationStats stats;
    TrackDiagnostics diag_a, diag_b;
};

ComparisonSeries run_comparison(const ModelParams& params, const InitialLadderState& initial,
                                const NumericsConfig& numerics, std::span<const double> grid,
                                const ComparisonOptions& opts = {});

// Photon yield versus coupling ratio, one independent exact evolution per
// (ratio, time) point; points run concurrently.
struct SweepRequest {
    std::vector<double> ratios;      // g/epsilon values, ascending
    std::vector<double> eval_times;  // evaluation instants
    int threads = 1;                 // 0: hardware concurrency
};

struct SweepTable {
    std::vector<double> ratios;
    std::vector<double> times;
    std::vector<std::vector<double>> n_mean;  // [time][ratio]
    std::vector<std::vector<int>> nmax_used;  // [time][ratio]
    std::vector<double> peak_ratio;           // refined argmax per time
    std::vector<double> peak_value;           // interpolated <n> at the peak
    double ratio_resolution = 0.0;            // grid step, the peak uncertainty
};

SweepTable sweep_g_over_eps(const ModelParams& base, const SweepRequest& request,
                            const NumericsConfig& numerics);

// Parabola through the three samples around the grid argmax; falls back to the
// grid point at the boundary or on a degenerate stencil. Clamped to the grid.
std::pair<double, double> refine_peak(std::span<const double> x, std::span<const double> y);

// Paired phase-space snapshots (closed-form track and numeric track).
struct QSnapshotPair {
    double t = 0.0;
    QGrid semi, exact;          // whichever tracks were requested
    double norm_semi = 0.0, norm_exact = 0.0;
    double l1_distance = 0.0;   // sum |Qa - Qb| * cell area, when both present
};

struct QSnapshotRun {
    std::vector<QSnapshotPair> snapshots;
    TrackDiagnostics diag_a, diag_b;
};

QSnapshotRun qfunction_snapshots(const ModelParams& params,
                                 const InitialLadderState& initial,
                                 std::span<const double> snapshot_times,
                                 const QGridSpec& grid_spec,
                                 const NumericsConfig& numerics,
                                 bool track_a = true, bool track_b = true);

// Detects two phase components: the two highest local maxima and the exact
// saddle level between them (threshold percolation on the grid graph).
struct BimodalityReport {
    int n_peaks = 0;        // local maxima above the floor
    double peak1 = 0.0;     // highest
    double peak2 = 0.0;     // second highest
    double saddle = 0.0;    // merge level between the top two peaks
    double depth = 0.0;     // min(peak1, peak2) - saddle
    double separation = 0.0;  // |z1 - z2|
};

BimodalityReport analyze_bimodality(const QGrid& grid, double floor);

// Sign alternations of (a - b) along a window, ignoring |a - b| <= hysteresis.
int count_sign_alternations(std::span<const double> times, std::span<const double> a,
                            std::span<const double> b, double t_lo, double t_hi,
                            double hysteresis);

} // namespace qcavity
