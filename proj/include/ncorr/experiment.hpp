#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "ncorr/corrector.hpp"
#include "ncorr/csv.hpp"
#include "ncorr/duffing.hpp"
#include "ncorr/errors.hpp"
#include "ncorr/integrator.hpp"
#include "ncorr/metrics.hpp"
#include "ncorr/trajectory.hpp"
#include "ncorr/version.hpp"
#include "ncorr/vessel.hpp"
#include "ncorr/wave.hpp"

namespace ncorr {

// --- shared machinery -------------------------------------------------------

/// Run fn(0..n-1) on a small worker pool. Cells must be independent; the
/// first exception is rethrown on the calling thread after the pool joins.
inline void parallel_for(std::size_t n, int threads,
                         const std::function<void(std::size_t)>& fn) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const auto workers = static_cast<std::size_t>(
        std::min<long>(threads, static_cast<long>(n)));
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                {
                    std::scoped_lock lock(error_mutex);
                    if (error) return;
                }
                try {
                    fn(i);
                } catch (...) {
                    std::scoped_lock lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

inline std::string fnv1a_hex(const std::string& data) {
    std::uint64_t h = 14695981039346656037ull;
    for (const char c : data) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

/// Hash of the functional model content (weights, norms, stencil); training
/// metadata is excluded so the hash survives a save/load round trip.
inline std::string model_hash(const CorrectorNet& net) {
    nlohmann::json j = to_json(net);
    j.erase("train_metadata");
    return fnv1a_hex(j.dump());
}

/// Windowed prediction/reference metrics for one state quantity of one DOF.
/// Both trajectories must share the sampling grid.
inline MetricsReport trajectory_metrics(const StateTrajectory& pred,
                                        const StateTrajectory& ref,
                                        ChannelKind quantity, int dof,
                                        double transient_cutoff) {
    if (pred.n_samples() != ref.n_samples() || pred.dt != ref.dt)
        throw DataError("trajectory_metrics: sampling grids differ");
    auto window = [&](const StateTrajectory& t) {
        const Eigen::MatrixXd* m = nullptr;
        switch (quantity) {
        case ChannelKind::Position: m = &t.pos; break;
        case ChannelKind::Velocity: m = &t.vel; break;
        case ChannelKind::Acceleration: m = &t.acc; break;
        case ChannelKind::Elevation:
            throw ConfigError("trajectory_metrics: elevation is not a response");
        }
        StateTrajectory probe = t;
        probe.transient_cutoff = transient_cutoff;
        const Eigen::VectorXd col = retained(probe, *m, dof);
        return std::vector<double>(col.data(), col.data() + col.size());
    };
    return compute_metrics(window(pred), window(ref), transient_cutoff);
}

/// One row of a study's results.csv. `sweep` is the study's independent
/// variable (N_ZUC budget or stencil length); `sweep_actual` the realized
/// value (actual crossing count, k dt / Tp).
struct StudyRow {
    std::string study;
    std::string model_id; // "A".."E", "benchmark", "hybrid", "oracle"
    double hs = 0.0;
    double tp_or_wp = 0.0;
    double sweep = 0.0;
    double sweep_actual = 0.0;
    std::uint64_t rep_seed = 0;
    std::string dof;      // "z", "heave", "pitch"
    std::string quantity; // "position", "velocity", "acceleration"
    MetricsReport report;
};

inline void write_study_rows(const std::filesystem::path& path,
                             const std::vector<StudyRow>& rows) {
    CsvWriter csv(path, {"study", "model_id", "Hs", "Tp_or_wp", "sweep",
                         "sweep_actual", "rep_seed", "dof", "quantity", "l2",
                         "linf", "jsd", "n_samples"});
    for (const auto& r : rows) {
        csv.row(std::vector<std::string>{
            r.study, r.model_id, format_double(r.hs), format_double(r.tp_or_wp),
            format_double(r.sweep), format_double(r.sweep_actual),
            std::to_string(r.rep_seed), r.dof, r.quantity,
            format_double(r.report.l2), format_double(r.report.linf),
            format_double(r.report.jsd), std::to_string(r.report.sample_count)});
    }
}

/// Check that no test realization shares a phase seed with a training
/// realization.
inline void assert_seed_disjoint(const std::set<std::uint64_t>& train_seeds,
                                 const std::set<std::uint64_t>& test_seeds) {
    for (const auto s : test_seeds)
        if (train_seeds.count(s))
            throw ConfigError("experiment plan: train/test wave seeds overlap");
}

struct StudyOutput {
    std::filesystem::path root;
    std::filesystem::path models;
    std::filesystem::path trajectories;
    bool export_trajectories = false;
};

inline StudyOutput make_study_output(const std::filesystem::path& root,
                                     bool export_trajectories) {
    StudyOutput out;
    out.root = root;
    out.models = root / "models";
    out.trajectories = root / "trajectories";
    out.export_trajectories = export_trajectories;
    std::filesystem::create_directories(out.models);
    if (export_trajectories) std::filesystem::create_directories(out.trajectories);
    return out;
}

// --- Duffing studies --------------------------------------------------------

inline nlohmann::json train_config_to_json(const TrainConfig& cfg) {
    return {{"epochs", cfg.epochs},
            {"batch_size", cfg.batch_size},
            {"learning_rate", cfg.learning_rate},
            {"validation_fraction", cfg.validation_fraction},
            {"patience", cfg.patience},
            {"lr_decay", cfg.lr_decay},
            {"lr_patience", cfg.lr_patience},
            {"lr_min", cfg.lr_min}};
}

inline void train_config_from_json(const nlohmann::json& j, TrainConfig& cfg) {
    cfg.epochs = j.value("epochs", cfg.epochs);
    cfg.batch_size = j.value("batch_size", cfg.batch_size);
    cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
    cfg.validation_fraction = j.value("validation_fraction", cfg.validation_fraction);
    cfg.patience = j.value("patience", cfg.patience);
    cfg.lr_decay = j.value("lr_decay", cfg.lr_decay);
    cfg.lr_patience = j.value("lr_patience", cfg.lr_patience);
    cfg.lr_min = j.value("lr_min", cfg.lr_min);
}

/// Hybrid one-DOF prediction: the forcing model's retained physics plus the
/// trained corrector, stepped over the test realization.
inline StateTrajectory predict_duffing_hybrid(
    ForcingModel model, const DuffingParams& params, const CorrectorNet& net,
    const WaveRealization& waves, double duration, const IntegratorConfig& cfg,
    double transient_cutoff, std::shared_ptr<long> invocations = nullptr) {
    const auto n_steps = static_cast<Eigen::Index>(std::llround(duration / cfg.dt));
    const auto n_samples = static_cast<std::size_t>(n_steps + 1);
    const auto sys =
        make_forcing_system(model, params, waves, 0.0, cfg.dt, n_samples);
    const Eigen::VectorXd eta = Eigen::Map<const Eigen::VectorXd>(
        elevation_series(waves, 0.0, cfg.dt, n_samples).data(),
        static_cast<Eigen::Index>(n_samples));
    SimulateOptions opts;
    opts.transient_cutoff = transient_cutoff;
    const auto provider =
        make_delta_provider({{&net, {0}}}, 1, std::move(invocations));
    return simulate(sys, Eigen::VectorXd::Zero(2), eta, cfg, opts, provider);
}

/// Pure-physics benchmark: the forcing model with delta* = 0.
inline StateTrajectory duffing_benchmark(ForcingModel model,
                                         const DuffingParams& params,
                                         const WaveRealization& waves,
                                         double duration,
                                         const IntegratorConfig& cfg,
                                         double transient_cutoff) {
    const auto n_steps = static_cast<Eigen::Index>(std::llround(duration / cfg.dt));
    const auto n_samples = static_cast<std::size_t>(n_steps + 1);
    const auto sys =
        make_forcing_system(model, params, waves, 0.0, cfg.dt, n_samples);
    const Eigen::VectorXd eta = Eigen::Map<const Eigen::VectorXd>(
        elevation_series(waves, 0.0, cfg.dt, n_samples).data(),
        static_cast<Eigen::Index>(n_samples));
    SimulateOptions opts;
    opts.transient_cutoff = transient_cutoff;
    return simulate(sys, Eigen::VectorXd::Zero(2), eta, cfg, opts);
}

struct DuffingStudyBase {
    DuffingParams params;         // paper coefficients by default
    double omega_p = 1.0;
    double dt = 0.1;
    int stencil_k = 5;
    std::vector<int> hidden{30, 30};
    TrainConfig train_config;      // Adam 1e-3, batch 32, <= 2000 epochs
    double test_duration = 1000.0;
    double metrics_cutoff = 100.0; // first 100 s are transient
    // Training records carry this much start-up transient ahead of the
    // budgeted crossings; those samples never enter the dataset.
    double train_transient_cutoff = 100.0;
    std::uint64_t seed = 0;
    int threads = 1;
};

struct DuffingTrainSizeConfig : DuffingStudyBase {
    double hs = 1.0;
    std::vector<int> zuc_budgets{10, 25, 50, 100, 200};
    std::vector<ForcingModel> models{all_forcing_models.begin(),
                                     all_forcing_models.end()};
    bool oracle_baseline = true;
    int replicates = 3; // independent (training wave, net init, test wave) repeats
};

namespace detail {

inline const char* quantity_name(ChannelKind k) {
    switch (k) {
    case ChannelKind::Position: return "position";
    case ChannelKind::Velocity: return "velocity";
    case ChannelKind::Acceleration: return "acceleration";
    default: return "?";
    }
}

constexpr std::array<ChannelKind, 3> kResponseQuantities{
    ChannelKind::Position, ChannelKind::Velocity, ChannelKind::Acceleration};

} // namespace detail

/// Prediction error vs training-set size (in wave zero-up-crossings) for each
/// low-fidelity forcing model, tested on an unseen-phase realization. Each
/// replicate redraws the training waves, the net initialization, and the
/// test phases; medians over replicates are the reported curve.
inline std::vector<StudyRow> run_duffing_trainsize(
    const DuffingTrainSizeConfig& cfg, const std::filesystem::path& out_dir,
    bool export_trajectories = false) {
    const auto out = make_study_output(out_dir, export_trajectories);
    const auto spec = bretschneider_form(cfg.hs, cfg.omega_p);
    const double tz = mean_upcrossing_period(spec);
    IntegratorConfig icfg;
    icfg.dt = cfg.dt;

    std::set<std::uint64_t> train_seeds, test_seeds;

    // Per-replicate test realization, shared across budgets and models.
    struct Replicate {
        WaveRealization test_waves;
        StateTrajectory reference;
    };
    std::vector<Replicate> reps(static_cast<std::size_t>(cfg.replicates));
    for (int r = 0; r < cfg.replicates; ++r) {
        const auto test_seed = derive_seed(
            cfg.seed, "duffing-trainsize/rep" + std::to_string(r) + "/test");
        test_seeds.insert(test_seed);
        reps[r].test_waves = sample_realization(spec, cfg.test_duration, test_seed);
    }
    parallel_for(reps.size(), cfg.threads, [&](std::size_t r) {
        reps[r].reference =
            solve_high_fidelity(cfg.params, reps[r].test_waves,
                                cfg.test_duration, icfg, cfg.metrics_cutoff);
    });

    // Training trajectories per (replicate, budget), shared across models.
    struct BudgetData {
        WaveRealization waves;
        StateTrajectory traj;
        int actual_zuc = 0;
    };
    std::vector<std::vector<BudgetData>> budgets(
        static_cast<std::size_t>(cfg.replicates));
    for (int r = 0; r < cfg.replicates; ++r) {
        budgets[r].resize(cfg.zuc_budgets.size());
        for (std::size_t b = 0; b < cfg.zuc_budgets.size(); ++b) {
            const auto train_seed = derive_seed(
                cfg.seed, "duffing-trainsize/rep" + std::to_string(r) +
                              "/train/budget=" +
                              std::to_string(cfg.zuc_budgets[b]));
            train_seeds.insert(train_seed);
            const double duration =
                std::max(10.0 * cfg.dt,
                         cfg.train_transient_cutoff + cfg.zuc_budgets[b] * tz);
            budgets[r][b].waves = sample_realization(spec, duration, train_seed);
        }
    }
    assert_seed_disjoint(train_seeds, test_seeds);
    {
        std::vector<std::pair<std::size_t, std::size_t>> jobs;
        for (std::size_t r = 0; r < budgets.size(); ++r)
            for (std::size_t b = 0; b < budgets[r].size(); ++b)
                jobs.emplace_back(r, b);
        parallel_for(jobs.size(), cfg.threads, [&](std::size_t i) {
            const auto [r, b] = jobs[i];
            auto& data = budgets[r][b];
            data.traj = solve_high_fidelity(cfg.params, data.waves,
                                            data.waves.duration, icfg,
                                            cfg.train_transient_cutoff);
            // budget accounting: crossings in the usable (post-transient) record
            const auto n0 = data.traj.first_retained();
            const auto& eta = data.traj.eta;
            data.actual_zuc = static_cast<int>(count_zero_upcrossings(
                std::span<const double>(eta.data() + n0,
                                        static_cast<std::size_t>(eta.size() - n0))));
        });
    }

    struct Cell {
        int replicate;
        std::size_t budget_index;
        ForcingModel model;
        std::vector<StudyRow> rows;
        nlohmann::json model_entry;
    };
    std::vector<Cell> cells;
    for (int r = 0; r < cfg.replicates; ++r)
        for (std::size_t b = 0; b < cfg.zuc_budgets.size(); ++b)
            for (const auto m : cfg.models) cells.push_back({r, b, m, {}, {}});

    const auto stencil = single_dof_stencil(cfg.stencil_k, cfg.dt);
    parallel_for(cells.size(), cfg.threads, [&](std::size_t i) {
        auto& cell = cells[i];
        const auto& data = budgets[cell.replicate][cell.budget_index];
        const auto& rep = reps[cell.replicate];
        const int budget = cfg.zuc_budgets[cell.budget_index];
        const auto tag = "rep" + std::to_string(cell.replicate) + "_" +
                         to_string(cell.model) + "_zuc" + std::to_string(budget);
        const Eigen::VectorXd delta =
            extract_delta(cell.model, cfg.params, data.traj);
        const auto dataset = build_dataset(data.traj, delta, stencil);
        TrainConfig tc = cfg.train_config;
        tc.seed = derive_seed(cfg.seed, "duffing-trainsize/rep" +
                                            std::to_string(cell.replicate) +
                                            "/net/" + to_string(cell.model) +
                                            "/budget=" + std::to_string(budget));
        const auto net = train(dataset, cfg.hidden, tc);
        const auto model_name = "trainsize_" + tag + ".json";
        save_model(out.models / model_name, net);
        cell.model_entry = {{"file", model_name}, {"hash", model_hash(net)}};

        const auto pred = predict_duffing_hybrid(cell.model, cfg.params, net,
                                                 rep.test_waves,
                                                 cfg.test_duration, icfg,
                                                 cfg.metrics_cutoff);
        if (out.export_trajectories)
            write_trajectory_csv(out.trajectories / ("trainsize_" + tag + ".csv"),
                                 pred);
        for (const auto q : detail::kResponseQuantities) {
            StudyRow row;
            row.study = "duffing-trainsize";
            row.model_id = to_string(cell.model);
            row.hs = cfg.hs;
            row.tp_or_wp = cfg.omega_p;
            row.sweep = budget;
            row.sweep_actual = data.actual_zuc;
            row.rep_seed = derive_seed(
                cfg.seed, "duffing-trainsize/rep" + std::to_string(cell.replicate));
            row.dof = "z";
            row.quantity = detail::quantity_name(q);
            row.report =
                trajectory_metrics(pred, rep.reference, q, 0, cfg.metrics_cutoff);
            cell.rows.push_back(row);
        }
    });

    std::vector<StudyRow> rows;
    nlohmann::json models_manifest = nlohmann::json::object();
    for (auto& cell : cells) {
        rows.insert(rows.end(), cell.rows.begin(), cell.rows.end());
        if (!cell.model_entry.empty())
            models_manifest[cell.model_entry["file"].get<std::string>()] =
                cell.model_entry;
    }

    // Exact-correction baseline: table-lookup delta on the test realization,
    // error rests at the solver floor independent of the training budget.
    if (cfg.oracle_baseline) {
        const auto& rep = reps.front();
        for (const auto m : cfg.models) {
            const Eigen::VectorXd delta =
                extract_delta(m, cfg.params, rep.reference);
            const auto sys = make_forcing_system(
                m, cfg.params, rep.test_waves, 0.0, cfg.dt,
                static_cast<std::size_t>(rep.reference.n_samples()));
            const DeltaFn exact = [&delta](const StateTrajectory&, Eigen::Index n) {
                return Eigen::VectorXd(Eigen::VectorXd::Constant(1, delta(n + 1)));
            };
            SimulateOptions opts;
            opts.transient_cutoff = cfg.metrics_cutoff;
            const auto pred = simulate(sys, Eigen::VectorXd::Zero(2),
                                       rep.reference.eta, icfg, opts, exact);
            for (const auto q : detail::kResponseQuantities) {
                StudyRow row;
                row.study = "duffing-trainsize";
                row.model_id = "oracle-" + to_string(m);
                row.hs = cfg.hs;
                row.tp_or_wp = cfg.omega_p;
                row.dof = "z";
                row.quantity = detail::quantity_name(q);
                row.report = trajectory_metrics(pred, rep.reference, q, 0,
                                                cfg.metrics_cutoff);
                rows.push_back(row);
            }
        }
    }

    write_study_rows(out.root / "results.csv", rows);
    nlohmann::json manifest{
        {"study", "duffing-trainsize"},
        {"version", kVersion},
        {"seed", cfg.seed},
        {"mean_upcrossing_period", tz},
        {"train_seeds", std::vector<std::uint64_t>(train_seeds.begin(),
                                                   train_seeds.end())},
        {"test_seeds", std::vector<std::uint64_t>(test_seeds.begin(),
                                                  test_seeds.end())},
        {"train_config", train_config_to_json(cfg.train_config)},
        {"models", models_manifest}};
    std::ofstream(out.root / "manifest.json") << manifest.dump(2) << "\n";
    return rows;
}

struct DuffingHsSweepConfig : DuffingStudyBase {
    double train_hs = 1.0;
    int train_zuc = 100;
    std::vector<double> test_hs{0.01, 0.25, 0.5, 1.0, 1.5};
    std::vector<ForcingModel> models{all_forcing_models.begin(),
                                     all_forcing_models.end()};
    bool include_benchmark = true;
    int replicates = 3;
};

/// Generalizability sweep: models trained at one significant wave height
/// predict responses across a range of heights; the linear physics benchmark
/// is model A with no correction.
inline std::vector<StudyRow> run_duffing_hs_sweep(
    const DuffingHsSweepConfig& cfg, const std::filesystem::path& out_dir,
    bool export_trajectories = false) {
    const auto out = make_study_output(out_dir, export_trajectories);
    IntegratorConfig icfg;
    icfg.dt = cfg.dt;
    const auto stencil = single_dof_stencil(cfg.stencil_k, cfg.dt);

    struct Replicate {
        WaveRealization train_waves;
        StateTrajectory train_traj;
        std::vector<WaveRealization> test_waves;
        std::vector<StateTrajectory> references; // per test Hs
    };
    std::vector<Replicate> reps(static_cast<std::size_t>(cfg.replicates));
    std::set<std::uint64_t> train_seeds, test_seeds;

    const auto train_spec = bretschneider_form(cfg.train_hs, cfg.omega_p);
    const double train_duration = cfg.train_transient_cutoff +
                                  cfg.train_zuc * mean_upcrossing_period(train_spec);
    for (int r = 0; r < cfg.replicates; ++r) {
        const auto tag = "duffing-hs/rep" + std::to_string(r);
        const auto train_seed = derive_seed(cfg.seed, tag + "/train");
        train_seeds.insert(train_seed);
        reps[r].train_waves =
            sample_realization(train_spec, train_duration, train_seed);
        for (std::size_t h = 0; h < cfg.test_hs.size(); ++h) {
            const auto test_seed =
                derive_seed(cfg.seed, tag + "/test/hs" + std::to_string(h));
            test_seeds.insert(test_seed);
            reps[r].test_waves.push_back(sample_realization(
                bretschneider_form(cfg.test_hs[h], cfg.omega_p),
                cfg.test_duration, test_seed));
        }
    }
    assert_seed_disjoint(train_seeds, test_seeds);

    // Reference solves in parallel over (replicate, test Hs).
    {
        std::vector<std::pair<int, std::size_t>> jobs;
        for (int r = 0; r < cfg.replicates; ++r) {
            reps[r].references.resize(cfg.test_hs.size());
            for (std::size_t h = 0; h < cfg.test_hs.size(); ++h)
                jobs.emplace_back(r, h);
        }
        parallel_for(jobs.size(), cfg.threads, [&](std::size_t i) {
            const auto [r, h] = jobs[i];
            reps[r].references[h] =
                solve_high_fidelity(cfg.params, reps[r].test_waves[h],
                                    cfg.test_duration, icfg, cfg.metrics_cutoff);
        });
        parallel_for(static_cast<std::size_t>(cfg.replicates), cfg.threads,
                     [&](std::size_t r) {
                         reps[r].train_traj = solve_high_fidelity(
                             cfg.params, reps[r].train_waves, train_duration, icfg,
                             cfg.train_transient_cutoff);
                     });
    }

    struct Cell {
        int replicate;
        std::string model_id;
        ForcingModel model;
        bool hybrid;
        std::vector<StudyRow> rows;
        nlohmann::json model_entry;
    };
    std::vector<Cell> cells;
    for (int r = 0; r < cfg.replicates; ++r) {
        for (const auto m : cfg.models)
            cells.push_back({r, to_string(m), m, true, {}, {}});
        if (cfg.include_benchmark)
            cells.push_back({r, "benchmark", ForcingModel::A, false, {}, {}});
    }

    parallel_for(cells.size(), cfg.threads, [&](std::size_t i) {
        auto& cell = cells[i];
        auto& rep = reps[cell.replicate];
        const auto rep_seed =
            derive_seed(cfg.seed, "duffing-hs/rep" + std::to_string(cell.replicate));
        CorrectorNet net;
        if (cell.hybrid) {
            const Eigen::VectorXd delta =
                extract_delta(cell.model, cfg.params, rep.train_traj);
            const auto dataset = build_dataset(rep.train_traj, delta, stencil);
            TrainConfig tc = cfg.train_config;
            tc.seed = derive_seed(cfg.seed, "duffing-hs/rep" +
                                                std::to_string(cell.replicate) +
                                                "/net/" + cell.model_id);
            net = train(dataset, cfg.hidden, tc);
            const auto name = "hs_" + cell.model_id + "_rep" +
                              std::to_string(cell.replicate) + ".json";
            save_model(out.models / name, net);
            cell.model_entry = {{"file", name}, {"hash", model_hash(net)}};
        }
        for (std::size_t h = 0; h < cfg.test_hs.size(); ++h) {
            const auto pred =
                cell.hybrid
                    ? predict_duffing_hybrid(cell.model, cfg.params, net,
                                             rep.test_waves[h], cfg.test_duration,
                                             icfg, cfg.metrics_cutoff)
                    : duffing_benchmark(cell.model, cfg.params, rep.test_waves[h],
                                        cfg.test_duration, icfg,
                                        cfg.metrics_cutoff);
            if (out.export_trajectories)
                write_trajectory_csv(
                    out.trajectories /
                        ("hs_" + cell.model_id + "_rep" +
                         std::to_string(cell.replicate) + "_hs" +
                         std::to_string(h) + ".csv"),
                    pred);
            for (const auto q : detail::kResponseQuantities) {
                StudyRow row;
                row.study = "duffing-hs-sweep";
                row.model_id = cell.model_id;
                row.hs = cfg.test_hs[h];
                row.tp_or_wp = cfg.omega_p;
                row.rep_seed = rep_seed;
                row.dof = "z";
                row.quantity = detail::quantity_name(q);
                row.report = trajectory_metrics(pred, rep.references[h], q, 0,
                                                cfg.metrics_cutoff);
                cell.rows.push_back(row);
            }
        }
    });

    std::vector<StudyRow> rows;
    nlohmann::json models_manifest = nlohmann::json::object();
    for (auto& cell : cells) {
        rows.insert(rows.end(), cell.rows.begin(), cell.rows.end());
        if (!cell.model_entry.empty())
            models_manifest[cell.model_entry["file"].get<std::string>()] =
                cell.model_entry;
    }
    write_study_rows(out.root / "results.csv", rows);
    nlohmann::json manifest{
        {"study", "duffing-hs-sweep"},
        {"version", kVersion},
        {"seed", cfg.seed},
        {"train_seeds", std::vector<std::uint64_t>(train_seeds.begin(),
                                                   train_seeds.end())},
        {"test_seeds", std::vector<std::uint64_t>(test_seeds.begin(),
                                                  test_seeds.end())},
        {"train_config", train_config_to_json(cfg.train_config)},
        {"models", models_manifest}};
    std::ofstream(out.root / "manifest.json") << manifest.dump(2) << "\n";
    return rows;
}

// --- 6-DOF studies ----------------------------------------------------------

/// Feature channels for the vessel correctors: heave and pitch state plus
/// the encountered wave elevation.
inline StencilSpec vessel_stencil(int k, double dt) {
    return StencilSpec{k,
                       {{ChannelKind::Position, kHeave},
                        {ChannelKind::Velocity, kHeave},
                        {ChannelKind::Acceleration, kHeave},
                        {ChannelKind::Position, kPitch},
                        {ChannelKind::Velocity, kPitch},
                        {ChannelKind::Acceleration, kPitch},
                        {ChannelKind::Elevation, 0}},
                       dt};
}

struct VesselNets {
    CorrectorNet heave; // force correction on the heave equation
    CorrectorNet pitch; // moment correction on the pitch equation
};

inline VesselNets train_vessel_nets(const StateTrajectory& oracle_traj,
                                    const Eigen::MatrixXd& delta,
                                    const StencilSpec& stencil,
                                    const std::vector<int>& hidden,
                                    TrainConfig tc, std::uint64_t seed,
                                    const std::string& tag) {
    VesselNets nets;
    tc.seed = derive_seed(seed, tag + "/net/heave");
    nets.heave = train(build_dataset(oracle_traj,
                                     Eigen::MatrixXd(delta.col(kHeave)), stencil),
                       hidden, tc);
    tc.seed = derive_seed(seed, tag + "/net/pitch");
    nets.pitch = train(build_dataset(oracle_traj,
                                     Eigen::MatrixXd(delta.col(kPitch)), stencil),
                       hidden, tc);
    return nets;
}

inline StateTrajectory predict_vessel_hybrid(
    const VesselModel& vessel, const ExcitationModel& excitation,
    const VesselNets& nets, double duration, const IntegratorConfig& cfg,
    double transient_cutoff, std::shared_ptr<long> invocations = nullptr) {
    const auto provider = make_delta_provider(
        {{&nets.heave, {kHeave}}, {&nets.pitch, {kPitch}}}, 6,
        std::move(invocations));
    return simulate_vessel(vessel, excitation, duration, cfg, transient_cutoff,
                           {}, provider);
}

struct VesselStudyBase {
    VesselParticulars particulars;
    double damping_fraction = 0.1;
    OracleNonlinearity nonlinearity; // zero-initialized: use defaults
    bool default_nonlinearity = true;
    double jonswap_gamma = 1.0;
    double dt = 0.1;
    std::vector<int> hidden{30, 30, 30};
    TrainConfig train_config;
    double train_cutoff = 50.0;   // transient omitted from training data
    double metrics_cutoff = 50.0; // transient omitted from metrics
    std::uint64_t seed = 0;
    int threads = 1;

    VesselModel vessel() const {
        return assemble_vessel(particulars, damping_fraction);
    }
    OracleNonlinearity oracle(const VesselModel& v) const {
        return default_nonlinearity ? default_oracle_nonlinearity(v) : nonlinearity;
    }
};

struct StencilSweepConfig : VesselStudyBase {
    double hs = 4.0;
    double tp = 7.5;
    double train_duration = 600.0;
    double test_duration = 600.0;
    std::vector<int> ks{1, 2, 5, 10, 20, 50, 100};
};

/// Stencil-length sweep in a single seaway: one oracle training set, one
/// unseen-phase test realization, one model pair per k.
inline std::vector<StudyRow> run_stencil_sweep(
    const StencilSweepConfig& cfg, const std::filesystem::path& out_dir,
    bool export_trajectories = false) {
    const auto out = make_study_output(out_dir, export_trajectories);
    const auto vessel = cfg.vessel();
    const auto nl = cfg.oracle(vessel);
    IntegratorConfig icfg;
    icfg.dt = cfg.dt;
    const auto spec = jonswap(cfg.hs, cfg.tp, cfg.jonswap_gamma);

    const auto train_seed = derive_seed(cfg.seed, "stencil/train");
    const auto test_seed = derive_seed(cfg.seed, "stencil/test");
    assert_seed_disjoint({train_seed}, {test_seed});
    const auto train_waves =
        sample_realization(spec, cfg.train_duration, train_seed);
    const auto test_waves = sample_realization(spec, cfg.test_duration, test_seed);
    const auto train_exc = make_head_seas_excitation(train_waves, vessel);
    const auto test_exc = make_head_seas_excitation(test_waves, vessel);

    auto train_traj = synthetic_high_fidelity(vessel, train_exc, nl,
                                              cfg.train_duration, icfg,
                                              cfg.train_cutoff);
    const auto reference = synthetic_high_fidelity(
        vessel, test_exc, nl, cfg.test_duration, icfg, cfg.metrics_cutoff);
    const Eigen::MatrixXd delta = extract_delta(vessel, train_exc, train_traj);

    struct Cell {
        int k;
        std::vector<StudyRow> rows;
        nlohmann::json model_entries;
    };
    std::vector<Cell> cells;
    for (const int k : cfg.ks) cells.push_back({k, {}, nlohmann::json::object()});

    parallel_for(cells.size(), cfg.threads, [&](std::size_t i) {
        auto& cell = cells[i];
        const auto stencil = vessel_stencil(cell.k, cfg.dt);
        const auto nets =
            train_vessel_nets(train_traj, delta, stencil, cfg.hidden,
                              cfg.train_config, cfg.seed,
                              "stencil/k" + std::to_string(cell.k));
        const auto heave_name = "stencil_k" + std::to_string(cell.k) + "_heave.json";
        const auto pitch_name = "stencil_k" + std::to_string(cell.k) + "_pitch.json";
        save_model(out.models / heave_name, nets.heave);
        save_model(out.models / pitch_name, nets.pitch);
        cell.model_entries[heave_name] = {{"hash", model_hash(nets.heave)}};
        cell.model_entries[pitch_name] = {{"hash", model_hash(nets.pitch)}};

        const auto pred = predict_vessel_hybrid(vessel, test_exc, nets,
                                                cfg.test_duration, icfg,
                                                cfg.metrics_cutoff);
        for (const auto q : detail::kResponseQuantities) {
            for (const auto& [dof, name] :
                 {std::pair{kHeave, "heave"}, std::pair{kPitch, "pitch"}}) {
                StudyRow row;
                row.study = "stencil-sweep";
                row.model_id = "hybrid";
                row.hs = cfg.hs;
                row.tp_or_wp = cfg.tp;
                row.sweep = cell.k;
                row.sweep_actual = cell.k * cfg.dt / cfg.tp;
                row.dof = name;
                row.quantity = detail::quantity_name(q);
                row.report = trajectory_metrics(pred, reference, q, dof,
                                                cfg.metrics_cutoff);
                cell.rows.push_back(row);
            }
        }
    });

    std::vector<StudyRow> rows;
    nlohmann::json models_manifest = nlohmann::json::object();
    for (auto& cell : cells) {
        rows.insert(rows.end(), cell.rows.begin(), cell.rows.end());
        for (auto& [key, value] : cell.model_entries.items())
            models_manifest[key] = value;
    }
    write_study_rows(out.root / "results.csv", rows);
    nlohmann::json manifest{{"study", "stencil-sweep"},
                            {"version", kVersion},
                            {"seed", cfg.seed},
                            {"train_seeds", {train_seed}},
                            {"test_seeds", {test_seed}},
                            {"train_config", train_config_to_json(cfg.train_config)},
                            {"models", models_manifest}};
    std::ofstream(out.root / "manifest.json") << manifest.dump(2) << "\n";
    return rows;
}

struct TrainSize6DofConfig : VesselStudyBase {
    double hs = 4.0;
    double tp = 7.5;
    double max_train_duration = 600.0;
    double test_duration = 600.0;
    std::vector<int> zuc_budgets{5, 10, 25, 50, 80, 120, 200};
    std::vector<int> ks{10, 50};
};

/// Training-set-size sweep for the vessel: increasing prefixes of one oracle
/// realization train the correctors, tested on an unseen-phase realization.
inline std::vector<StudyRow> run_trainsize_6dof(
    const TrainSize6DofConfig& cfg, const std::filesystem::path& out_dir,
    bool export_trajectories = false) {
    const auto out = make_study_output(out_dir, export_trajectories);
    const auto vessel = cfg.vessel();
    const auto nl = cfg.oracle(vessel);
    IntegratorConfig icfg;
    icfg.dt = cfg.dt;
    const auto spec = jonswap(cfg.hs, cfg.tp, cfg.jonswap_gamma);
    const double tz = mean_upcrossing_period(spec);

    const auto train_seed = derive_seed(cfg.seed, "trainsize6/train");
    const auto test_seed = derive_seed(cfg.seed, "trainsize6/test");
    assert_seed_disjoint({train_seed}, {test_seed});
    const auto train_waves =
        sample_realization(spec, cfg.max_train_duration, train_seed);
    const auto test_waves = sample_realization(spec, cfg.test_duration, test_seed);
    const auto train_exc = make_head_seas_excitation(train_waves, vessel);
    const auto test_exc = make_head_seas_excitation(test_waves, vessel);

    const auto full_traj = synthetic_high_fidelity(vessel, train_exc, nl,
                                                   cfg.max_train_duration, icfg,
                                                   cfg.train_cutoff);
    const auto reference = synthetic_high_fidelity(
        vessel, test_exc, nl, cfg.test_duration, icfg, cfg.metrics_cutoff);
    const Eigen::MatrixXd full_delta = extract_delta(vessel, train_exc, full_traj);

    struct Cell {
        int budget;
        int k;
        std::vector<StudyRow> rows;
    };
    std::vector<Cell> cells;
    for (const int budget : cfg.zuc_budgets)
        for (const int k : cfg.ks) cells.push_back({budget, k, {}});

    parallel_for(cells.size(), cfg.threads, [&](std::size_t i) {
        auto& cell = cells[i];
        // truncate the shared realization to the budgeted crossing count
        const double duration =
            std::min(cfg.max_train_duration, cell.budget * tz + cfg.train_cutoff);
        const auto n_keep =
            static_cast<Eigen::Index>(std::llround(duration / cfg.dt)) + 1;
        StateTrajectory truncated = full_traj;
        truncated.pos = full_traj.pos.topRows(n_keep);
        truncated.vel = full_traj.vel.topRows(n_keep);
        truncated.acc = full_traj.acc.topRows(n_keep);
        truncated.eta = full_traj.eta.head(n_keep);
        truncated.delta_applied = full_traj.delta_applied.topRows(n_keep);
        const Eigen::MatrixXd delta = full_delta.topRows(n_keep);

        const auto stencil = vessel_stencil(cell.k, cfg.dt);
        const auto nets = train_vessel_nets(
            truncated, delta, stencil, cfg.hidden, cfg.train_config, cfg.seed,
            "trainsize6/zuc" + std::to_string(cell.budget) + "/k" +
                std::to_string(cell.k));
        const auto pred = predict_vessel_hybrid(vessel, test_exc, nets,
                                                cfg.test_duration, icfg,
                                                cfg.metrics_cutoff);
        const auto zuc_span = std::span<const double>(
            truncated.eta.data(), static_cast<std::size_t>(truncated.eta.size()));
        const auto actual = static_cast<double>(count_zero_upcrossings(zuc_span));
        for (const auto q : detail::kResponseQuantities) {
            for (const auto& [dof, name] :
                 {std::pair{kHeave, "heave"}, std::pair{kPitch, "pitch"}}) {
                StudyRow row;
                row.study = "trainsize-6dof";
                row.model_id = "hybrid-k" + std::to_string(cell.k);
                row.hs = cfg.hs;
                row.tp_or_wp = cfg.tp;
                row.sweep = cell.budget;
                row.sweep_actual = actual;
                row.dof = name;
                row.quantity = detail::quantity_name(q);
                row.report = trajectory_metrics(pred, reference, q, dof,
                                                cfg.metrics_cutoff);
                cell.rows.push_back(row);
            }
        }
    });

    std::vector<StudyRow> rows;
    for (auto& cell : cells)
        rows.insert(rows.end(), cell.rows.begin(), cell.rows.end());
    write_study_rows(out.root / "results.csv", rows);
    nlohmann::json manifest{{"study", "trainsize-6dof"},
                            {"version", kVersion},
                            {"seed", cfg.seed},
                            {"train_seeds", {train_seed}},
                            {"test_seeds", {test_seed}},
                            {"train_config", train_config_to_json(cfg.train_config)}};
    std::ofstream(out.root / "manifest.json") << manifest.dump(2) << "\n";
    return rows;
}

struct SeawayGridConfig : VesselStudyBase {
    double train_hs = 4.0;
    double train_tp = 8.5;
    double train_duration = 150.0;
    std::vector<double> grid_hs{2.0, 4.0, 6.0};
    std::vector<double> grid_tp{7.5, 8.5, 9.5};
    double test_duration = 600.0;
    int stencil_k = 10;
};

/// Nine-seaway generalizability study: correctors trained in one moderate
/// condition predict all (Hs, Tp) combinations against the synthetic oracle,
/// with the linear model as benchmark.
inline std::vector<StudyRow> run_seaway_grid(
    const SeawayGridConfig& cfg, const std::filesystem::path& out_dir,
    bool export_trajectories = false) {
    const auto out = make_study_output(out_dir, export_trajectories);
    const auto vessel = cfg.vessel();
    const auto nl = cfg.oracle(vessel);
    IntegratorConfig icfg;
    icfg.dt = cfg.dt;

    const auto train_seed = derive_seed(cfg.seed, "seaway/train");
    const auto train_spec = jonswap(cfg.train_hs, cfg.train_tp, cfg.jonswap_gamma);
    const auto train_waves =
        sample_realization(train_spec, cfg.train_duration, train_seed);
    const auto train_exc = make_head_seas_excitation(train_waves, vessel);
    const auto train_traj = synthetic_high_fidelity(
        vessel, train_exc, nl, cfg.train_duration, icfg, cfg.train_cutoff);
    const Eigen::MatrixXd delta = extract_delta(vessel, train_exc, train_traj);

    const auto stencil = vessel_stencil(cfg.stencil_k, cfg.dt);
    const auto nets = train_vessel_nets(train_traj, delta, stencil, cfg.hidden,
                                        cfg.train_config, cfg.seed, "seaway");
    save_model(out.models / "seaway_heave.json", nets.heave);
    save_model(out.models / "seaway_pitch.json", nets.pitch);

    struct Condition {
        double hs, tp;
        std::uint64_t seed;
    };
    std::vector<Condition> conditions;
    std::set<std::uint64_t> test_seeds;
    for (const double hs : cfg.grid_hs)
        for (const double tp : cfg.grid_tp) {
            const auto s = derive_seed(
                cfg.seed, "seaway/test/hs" + format_double(hs) + "/tp" +
                              format_double(tp));
            conditions.push_back({hs, tp, s});
            test_seeds.insert(s);
        }
    assert_seed_disjoint({train_seed}, test_seeds);

    struct Cell {
        Condition condition;
        std::vector<StudyRow> rows;
    };
    std::vector<Cell> cells;
    for (const auto& c : conditions) cells.push_back({c, {}});

    parallel_for(cells.size(), cfg.threads, [&](std::size_t i) {
        auto& cell = cells[i];
        const auto spec =
            jonswap(cell.condition.hs, cell.condition.tp, cfg.jonswap_gamma);
        const auto waves =
            sample_realization(spec, cfg.test_duration, cell.condition.seed);
        const auto exc = make_head_seas_excitation(waves, vessel);
        const auto reference = synthetic_high_fidelity(
            vessel, exc, nl, cfg.test_duration, icfg, cfg.metrics_cutoff);
        const auto benchmark = simulate_vessel(vessel, exc, cfg.test_duration,
                                               icfg, cfg.metrics_cutoff);
        const auto hybrid = predict_vessel_hybrid(vessel, exc, nets,
                                                  cfg.test_duration, icfg,
                                                  cfg.metrics_cutoff);
        if (out.export_trajectories) {
            const auto tag = "hs" + format_double(cell.condition.hs) + "_tp" +
                             format_double(cell.condition.tp);
            write_trajectory_csv(out.trajectories / ("oracle_" + tag + ".csv"),
                                 reference);
            write_trajectory_csv(out.trajectories / ("benchmark_" + tag + ".csv"),
                                 benchmark);
            write_trajectory_csv(out.trajectories / ("hybrid_" + tag + ".csv"),
                                 hybrid);
        }
        auto emit = [&](const StateTrajectory& pred, const char* model_id) {
            for (const auto q : detail::kResponseQuantities) {
                for (const auto& [dof, name] :
                     {std::pair{kHeave, "heave"}, std::pair{kPitch, "pitch"}}) {
                    StudyRow row;
                    row.study = "seaway-grid";
                    row.model_id = model_id;
                    row.hs = cell.condition.hs;
                    row.tp_or_wp = cell.condition.tp;
                    row.rep_seed = cell.condition.seed;
                    row.dof = name;
                    row.quantity = detail::quantity_name(q);
                    row.report = trajectory_metrics(pred, reference, q, dof,
                                                    cfg.metrics_cutoff);
                    cell.rows.push_back(row);
                }
            }
        };
        emit(benchmark, "benchmark");
        emit(hybrid, "hybrid");
    });

    std::vector<StudyRow> rows;
    for (auto& cell : cells)
        rows.insert(rows.end(), cell.rows.begin(), cell.rows.end());
    write_study_rows(out.root / "results.csv", rows);
    const auto train_eta_span = std::span<const double>(
        train_traj.eta.data(), static_cast<std::size_t>(train_traj.eta.size()));
    nlohmann::json manifest{
        {"study", "seaway-grid"},
        {"version", kVersion},
        {"seed", cfg.seed},
        {"train_seeds", {train_seed}},
        {"test_seeds", std::vector<std::uint64_t>(test_seeds.begin(),
                                                  test_seeds.end())},
        {"train_zuc", count_zero_upcrossings(train_eta_span)},
        {"train_config", train_config_to_json(cfg.train_config)},
        {"models",
         {{"seaway_heave.json", {{"hash", model_hash(nets.heave)}}},
          {"seaway_pitch.json", {{"hash", model_hash(nets.pitch)}}}}}};
    std::ofstream(out.root / "manifest.json") << manifest.dump(2) << "\n";
    return rows;
}

} // namespace ncorr
