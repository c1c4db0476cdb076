#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qcavity/experiments.hpp"
#include "qcavity/model.hpp"

namespace qcavity {

const char* version();

struct ComparisonConfig {
    std::optional<std::pair<double, double>> deviation_window;
};

struct SweepConfig {
    std::vector<double> ratios;
    std::vector<double> eval_times;
};

struct QfuncConfig {
    std::vector<double> snapshot_times;
    QGridSpec grid;
};

// Parsed run configuration. Parsing is strict: unknown keys, missing required
// fields and invariant violations are errors naming the offending field.
struct RunConfig {
    ModelParams model;
    InitialLadderState initial;
    NumericsConfig numerics;
    std::optional<ComparisonConfig> comparison;
    std::optional<SweepConfig> sweep;
    std::optional<QfuncConfig> qfunc;
};

RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config_text(std::string_view text, std::string_view origin = "<inline>");

// Canonical JSON echo of a configuration (the form embedded in manifests).
std::string config_to_json(const RunConfig& config);

// Shortest round-trip decimal representation, locale-independent.
std::string format_double(double value);

// Header: t,n_semi,n_exact,pe_semi,pe_exact,x_var_semi,x_var_exact,
//         p_var_semi,p_var_exact,abs_dev_n,rel_dev_n
void write_series_csv(const ComparisonSeries& series, const std::filesystem::path& path);

// Single-track variant: t,n_mean,p_excited,x_mean,p_mean,var_x,var_p
void write_track_csv(const std::vector<ObservableRecord>& records,
                     const std::filesystem::path& path);

// Columns re_z,im_z,q; row-major over the grid.
void write_qgrid(const QGrid& grid, const std::filesystem::path& path);

// Long-format sweep table: t_eval,ratio,n_mean,nmax_used
void write_sweep_csv(const SweepTable& table, const std::filesystem::path& path);

// Debug exports of the Wei-Norman functions.
void write_gamma_csv(const std::vector<double>& times, const std::vector<GammaState>& gammas,
                     const std::filesystem::path& path);
void write_beta_csv(const std::vector<double>& times, const std::vector<BetaState>& betas,
                    const std::filesystem::path& path);

struct ManifestQSnapshot {
    double t = 0.0;
    double norm_semi = 0.0, norm_exact = 0.0;
    double l1_distance = 0.0;
};

struct ManifestSweepPeak {
    double t_eval = 0.0;
    double peak_ratio = 0.0;
    double peak_value = 0.0;
    double ratio_resolution = 0.0;
};

// Everything needed to reproduce and audit a run. Volatile fields (timestamp,
// wall time) live under a single "timing" key so reproducibility comparisons
// can drop exactly that subtree.
struct RunManifest {
    std::string command;
    RunConfig config;
    std::string status = "ok";  // "ok" | "failed"
    std::string error;          // failure message when status == "failed"

    std::optional<TrackDiagnostics> diag_a, diag_b;
    std::optional<DeviationStats> deviation;
    std::vector<ManifestSweepPeak> peaks;
    std::vector<ManifestQSnapshot> snapshots;
    std::optional<QGridSpec> grid_spec;
    std::vector<std::pair<std::string, std::string>> outputs;  // label -> filename
    std::vector<std::string> warnings;

    double wall_seconds = 0.0;
    std::string timestamp;  // ISO-8601 UTC
};

void write_manifest(const RunManifest& manifest, const std::filesystem::path& path);
std::string manifest_to_json(const RunManifest& manifest);

} // namespace qcavity
