#include "qcavity/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "qcavity/errors.hpp"

namespace qcavity {

double relative_deviation(double a, double b, double floor) {
    return std::abs(a - b) / std::max(std::abs(b), floor);
}

namespace {

// Exact evolution with the doubling escalation policy on truncation breaches.
EvolveResult evolve_escalating(const InitialLadderState& initial, const ModelParams& params,
                               const NumericsConfig& numerics, std::span<const double> grid,
                               bool escalate, int max_nmax, int* nmax_used) {
    NumericsConfig num = numerics;
    for (;;) {
        try {
            EvolveResult res =
                evolve(FockQubitState::from_ladder(initial, num.nmax), params, num, grid);
            if (nmax_used) *nmax_used = num.nmax;
            return res;
        } catch (const TruncationError&) {
            if (!escalate || 2 * num.nmax > max_nmax) throw;
            num.nmax *= 2;
        }
    }
}

} // namespace

ComparisonSeries run_comparison(const ModelParams& params, const InitialLadderState& initial,
                                const NumericsConfig& numerics, std::span<const double> grid,
                                const ComparisonOptions& opts) {
    validate(params, numerics);
    validate(initial);
    if (grid.empty()) throw ConfigError("comparison: empty time grid");

    ComparisonSeries series;
    series.times.assign(grid.begin(), grid.end());

    if (opts.track_a) {
        const JointTrajectory joint =
            solve_joint(params, initial.excitations(), numerics, grid);
        series.diag_a.steps = joint.stats;
        series.track_a.reserve(grid.size());
        for (std::size_t i = 0; i < joint.times.size(); ++i) {
            const GammaState& g = joint.gammas[i];
            const BetaState& b = joint.betas[i];
            series.track_a.push_back(semianalytic_record(joint.times[i], g, b, initial));
            const U0Residuals res = u0_residuals(g);
            series.diag_a.max_conjugacy = std::max(series.diag_a.max_conjugacy, res.conjugacy);
            series.diag_a.max_symplectic =
                std::max(series.diag_a.max_symplectic, res.symplectic);
            series.diag_a.max_unitarity =
                std::max(series.diag_a.max_unitarity, unitarity_residual(b));
            const LadderAmplitudes amps = ladder_amplitudes(b, initial);
            series.diag_a.max_amp_norm_dev =
                std::max(series.diag_a.max_amp_norm_dev,
                         std::abs(std::norm(amps.c_en) + std::norm(amps.c_gn1) - 1.0));
        }
    }

    if (opts.track_b) {
        const EvolveResult res = evolve_escalating(initial, params, numerics, grid,
                                                   opts.escalate_nmax, opts.max_nmax,
                                                   &series.diag_b.nmax_used);
        series.diag_b.steps = res.stats;
        series.diag_b.max_norm_drift = res.max_norm_drift;
        series.diag_b.max_tail = res.max_tail;
        series.track_b.reserve(res.states.size());
        for (std::size_t i = 0; i < res.states.size(); ++i)
            series.track_b.push_back(exact_record(res.states[i], res.times[i]));
    }

    if (opts.track_a && opts.track_b) {
        const double lo = opts.deviation_window ? opts.deviation_window->first
                                                : series.times.front();
        const double hi = opts.deviation_window ? opts.deviation_window->second
                                                : series.times.back();
        series.stats.window_lo = lo;
        series.stats.window_hi = hi;
        series.abs_dev_n.resize(series.times.size());
        series.rel_dev_n.resize(series.times.size());
        double rel_sum = 0.0;
        std::size_t in_window = 0;
        for (std::size_t i = 0; i < series.times.size(); ++i) {
            const double na = series.track_a[i].n_mean;
            const double nb = series.track_b[i].n_mean;
            series.abs_dev_n[i] = std::abs(na - nb);
            series.rel_dev_n[i] = relative_deviation(na, nb);
            if (series.times[i] >= lo && series.times[i] <= hi) {
                series.stats.max_abs = std::max(series.stats.max_abs, series.abs_dev_n[i]);
                series.stats.max_rel = std::max(series.stats.max_rel, series.rel_dev_n[i]);
                rel_sum += series.rel_dev_n[i];
                ++in_window;
            }
        }
        series.stats.mean_rel = in_window > 0 ? rel_sum / static_cast<double>(in_window) : 0.0;
    }
    return series;
}

std::pair<double, double> refine_peak(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.empty())
        throw ConfigError("refine_peak: mismatched or empty samples");
    const std::size_t k = static_cast<std::size_t>(
        std::distance(y.begin(), std::max_element(y.begin(), y.end())));
    if (k == 0 || k + 1 == x.size()) return {x[k], y[k]};

    const double denom = y[k - 1] - 2.0 * y[k] + y[k + 1];
    if (!(denom < 0.0)) return {x[k], y[k]};  // flat or non-concave stencil
    const double h = 0.5 * (x[k + 1] - x[k - 1]);
    double shift = 0.5 * h * (y[k - 1] - y[k + 1]) / denom;
    shift = std::clamp(shift, -h, h);
    const double px = x[k] + shift;
    const double py = y[k] - 0.25 * shift * (y[k - 1] - y[k + 1]) / h;
    return {px, py};
}

SweepTable sweep_g_over_eps(const ModelParams& base, const SweepRequest& request,
                            const NumericsConfig& numerics) {
    validate(base, numerics);
    if (request.ratios.empty()) throw ConfigError("sweep: empty ratio grid");
    if (!std::is_sorted(request.ratios.begin(), request.ratios.end()))
        throw ConfigError("sweep: ratios must be ascending");
    if (request.eval_times.empty()) throw ConfigError("sweep: no evaluation times");
    for (double t : request.eval_times)
        if (!(t > 0.0)) throw ConfigError("sweep: evaluation times must be positive");

    SweepTable table;
    table.ratios = request.ratios;
    table.times = request.eval_times;
    const std::size_t nr = request.ratios.size();
    const std::size_t nt = request.eval_times.size();
    table.n_mean.assign(nt, std::vector<double>(nr, 0.0));
    table.nmax_used.assign(nt, std::vector<int>(nr, 0));
    if (nr > 1) table.ratio_resolution = request.ratios[1] - request.ratios[0];

    const InitialLadderState initial{};  // |e,0>

    std::atomic<std::size_t> next{0};
    std::mutex fail_mutex;
    std::exception_ptr failure;

    auto worker = [&] {
        for (;;) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= nr * nt) return;
            {
                std::lock_guard lock(fail_mutex);
                if (failure) return;
            }
            const std::size_t it = idx / nr;
            const std::size_t ir = idx % nr;
            try {
                ModelParams params = base;
                params.g = request.ratios[ir] * std::abs(base.epsilon);
                const double t_eval = request.eval_times[it];
                // A few interior samples so truncation breaches surface mid-run.
                const std::vector<double> grid{0.0, 0.25 * t_eval, 0.5 * t_eval,
                                               0.75 * t_eval, t_eval};
                int nmax_used = numerics.nmax;
                const EvolveResult res = evolve_escalating(
                    initial, params, numerics, grid, /*escalate=*/true, 4096, &nmax_used);
                table.n_mean[it][ir] = exact_record(res.states.back(), t_eval).n_mean;
                table.nmax_used[it][ir] = nmax_used;
            } catch (...) {
                std::lock_guard lock(fail_mutex);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };

    int threads = request.threads > 0
                      ? request.threads
                      : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min<int>(threads, static_cast<int>(nr * nt)));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    table.peak_ratio.resize(nt);
    table.peak_value.resize(nt);
    for (std::size_t it = 0; it < nt; ++it) {
        const auto [pr, pv] = refine_peak(table.ratios, table.n_mean[it]);
        table.peak_ratio[it] = pr;
        table.peak_value[it] = pv;
    }
    return table;
}

QSnapshotRun qfunction_snapshots(const ModelParams& params,
                                 const InitialLadderState& initial,
                                 std::span<const double> snapshot_times,
                                 const QGridSpec& grid_spec,
                                 const NumericsConfig& numerics,
                                 bool track_a, bool track_b) {
    validate(params, numerics);
    validate(initial);
    if (snapshot_times.empty()) throw ConfigError("qfunc: no snapshot times");
    for (std::size_t i = 1; i < snapshot_times.size(); ++i)
        if (!(snapshot_times[i] > snapshot_times[i - 1]))
            throw ConfigError("qfunc: snapshot times must be ascending and distinct");
    if (snapshot_times.front() < 0.0) throw ConfigError("qfunc: snapshot times must be >= 0");
    if (track_a && !(initial.n == 0 && std::abs(initial.beta_amp) < 1e-12))
        throw ConfigError("qfunc: the closed-form track requires the initial state |e,0>");

    // Evolution grid: t = 0 plus the requested snapshots.
    std::vector<double> grid{0.0};
    for (double t : snapshot_times)
        if (t > 0.0) grid.push_back(t);

    QSnapshotRun run;

    std::optional<JointTrajectory> joint;
    if (track_a) {
        if (grid.size() > 1) {
            joint = solve_joint(params, initial.excitations(), numerics, grid);
        } else {
            joint = JointTrajectory{};
            joint->times = grid;
            joint->gammas.assign(1, GammaState{});
            joint->betas.assign(1, BetaState{{}, {}, {}, initial.excitations()});
        }
        run.diag_a.steps = joint->stats;
    }

    std::optional<EvolveResult> exact;
    if (track_b) {
        const FockQubitState psi0 = FockQubitState::from_ladder(initial, numerics.nmax);
        if (grid.size() > 1) {
            exact = evolve_escalating(initial, params, numerics, grid, /*escalate=*/true,
                                      4096, &run.diag_b.nmax_used);
        } else {
            exact = EvolveResult{};
            exact->times = grid;
            exact->states.assign(1, psi0);
            run.diag_b.nmax_used = numerics.nmax;
        }
        run.diag_b.steps = exact->stats;
        run.diag_b.max_norm_drift = exact->max_norm_drift;
        run.diag_b.max_tail = exact->max_tail;
    }

    run.snapshots.reserve(snapshot_times.size());
    for (double t : snapshot_times) {
        const auto pos = std::find(grid.begin(), grid.end(), t);
        const std::size_t i = static_cast<std::size_t>(std::distance(grid.begin(), pos));

        QSnapshotPair pair;
        pair.t = t;
        if (track_a) {
            pair.semi = husimi_q_grid(joint->gammas[i], joint->betas[i], grid_spec);
            pair.norm_semi = pair.semi.normalization();
        }
        if (track_b) {
            pair.exact = husimi_q_numeric(reduced_field_density(exact->states[i]), grid_spec);
            pair.norm_exact = pair.exact.normalization();
        }
        if (track_a && track_b) {
            double l1 = 0.0;
            for (std::size_t k = 0; k < pair.semi.values.size(); ++k)
                l1 += std::abs(pair.semi.values[k] - pair.exact.values[k]);
            pair.l1_distance = l1 * pair.semi.cell_area();
        }
        run.snapshots.push_back(std::move(pair));
    }
    return run;
}

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

} // namespace

BimodalityReport analyze_bimodality(const QGrid& grid, double floor) {
    const int nx = static_cast<int>(grid.x_axis.size());
    const int ny = static_cast<int>(grid.y_axis.size());
    const auto at = [&](int ix, int iy) { return grid.values[ix * ny + iy]; };

    // Local maxima over the 8-neighborhood (ties resolved towards lower index).
    struct Peak {
        double value;
        int ix, iy;
    };
    std::vector<Peak> peaks;
    for (int ix = 0; ix < nx; ++ix) {
        for (int iy = 0; iy < ny; ++iy) {
            const double v = at(ix, iy);
            if (v <= floor) continue;
            bool is_max = true;
            for (int dx = -1; dx <= 1 && is_max; ++dx) {
                for (int dy = -1; dy <= 1; ++dy) {
                    if (dx == 0 && dy == 0) continue;
                    const int jx = ix + dx, jy = iy + dy;
                    if (jx < 0 || jx >= nx || jy < 0 || jy >= ny) continue;
                    const double w = at(jx, jy);
                    if (w > v || (w == v && (jx < ix || (jx == ix && jy < iy)))) {
                        is_max = false;
                        break;
                    }
                }
            }
            if (is_max) peaks.push_back({v, ix, iy});
        }
    }

    BimodalityReport report;
    report.n_peaks = static_cast<int>(peaks.size());
    if (peaks.empty()) return report;
    std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) {
        if (a.value != b.value) return a.value > b.value;
        return a.ix != b.ix ? a.ix < b.ix : a.iy < b.iy;
    });
    report.peak1 = peaks[0].value;
    if (peaks.size() < 2) return report;
    report.peak2 = peaks[1].value;
    {
        const double dx = grid.x_axis[peaks[0].ix] - grid.x_axis[peaks[1].ix];
        const double dy = grid.y_axis[peaks[0].iy] - grid.y_axis[peaks[1].iy];
        report.separation = std::hypot(dx, dy);
    }

    // Descending threshold percolation: activate cells from the top; the level
    // at which the two peak cells first join is the exact saddle between them.
    std::vector<int> order(grid.values.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return grid.values[a] != grid.values[b] ? grid.values[a] > grid.values[b] : a < b;
    });
    UnionFind uf(static_cast<int>(grid.values.size()));
    std::vector<char> active(grid.values.size(), 0);
    const int cell1 = peaks[0].ix * ny + peaks[0].iy;
    const int cell2 = peaks[1].ix * ny + peaks[1].iy;
    for (int cell : order) {
        active[cell] = 1;
        const int ix = cell / ny, iy = cell % ny;
        for (int dx = -1; dx <= 1; ++dx) {
            for (int dy = -1; dy <= 1; ++dy) {
                if (dx == 0 && dy == 0) continue;
                const int jx = ix + dx, jy = iy + dy;
                if (jx < 0 || jx >= nx || jy < 0 || jy >= ny) continue;
                const int other = jx * ny + jy;
                if (active[other]) uf.unite(cell, other);
            }
        }
        if (uf.find(cell1) == uf.find(cell2)) {
            report.saddle = grid.values[cell];
            report.depth = std::min(report.peak1, report.peak2) - report.saddle;
            return report;
        }
    }
    return report;  // disconnected grid, should not happen
}

int count_sign_alternations(std::span<const double> times, std::span<const double> a,
                            std::span<const double> b, double t_lo, double t_hi,
                            double hysteresis) {
    int alternations = 0;
    int last_sign = 0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < t_lo || times[i] > t_hi) continue;
        const double d = a[i] - b[i];
        if (std::abs(d) <= hysteresis) continue;
        const int sign = d > 0.0 ? 1 : -1;
        if (last_sign != 0 && sign != last_sign) ++alternations;
        last_sign = sign;
    }
    return alternations;
}

} // namespace qcavity
