// Experiment CLI: wave synthesis, simulation, force-correction extraction,
// corrector training/prediction, metrics, and the built-in studies.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ncorr/ncorr.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json read_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ncorr::ConfigError("cannot open config: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ncorr::ConfigError("invalid json in " + path.string() + ": " +
                                 e.what());
    }
    return j;
}

void write_json_file(const fs::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw ncorr::DataError("cannot open for writing: " + path.string());
    out << j.dump(2) << "\n";
}

fs::path default_out_root() {
    if (const char* env = std::getenv("NCORR_OUT_ROOT")) return fs::path(env);
    return fs::current_path();
}

// --- waves -------------------------------------------------------------------

struct WavesArgs {
    std::string config;
    double hs = 1.0;
    double omega_p = 0.0;
    double tp = 0.0;
    double gamma = 1.0;
    double duration = 500.0;
    std::uint64_t seed = 0;
    std::string out = "waves.json";
    std::string csv;
    double dt = 0.1;
};

int cmd_waves(const WavesArgs& args) {
    ncorr::SpectrumSpec spec;
    double duration = args.duration;
    std::uint64_t seed = args.seed;
    if (!args.config.empty()) {
        const json j = read_json_file(args.config);
        spec = ncorr::spectrum_from_json(j);
        duration = j.value("duration", duration);
        seed = j.value("seed", seed);
    } else if (args.tp > 0.0) {
        spec = ncorr::jonswap(args.hs, args.tp, args.gamma);
    } else {
        spec = ncorr::bretschneider_form(args.hs,
                                         args.omega_p > 0.0 ? args.omega_p : 1.0);
    }
    const auto real = ncorr::sample_realization(spec, duration, seed);
    write_json_file(args.out, ncorr::to_json(real));
    const auto eta = ncorr::elevation_series(
        real, 0.0, args.dt,
        static_cast<std::size_t>(std::llround(duration / args.dt)) + 1);
    const auto zuc = ncorr::count_zero_upcrossings(eta);
    std::cout << "wrote " << args.out << " (" << real.components.size()
              << " components, N_ZUC = " << zuc << ")\n";
    if (!args.csv.empty()) {
        ncorr::write_elevation_csv(args.csv, real, args.dt, eta.size());
        std::cout << "wrote " << args.csv << "\n";
    }
    return 0;
}

// --- simulate / predict -------------------------------------------------------

struct SimArgs {
    std::string config;
    std::string waves_file;
    std::string model_file;       // heave / 1-DOF corrector
    std::string pitch_model_file; // 6-DOF pitch corrector
    std::string out = "trajectory.csv";
};

ncorr::WaveRealization waves_from_config(const json& cfg,
                                         const std::string& waves_file) {
    if (!waves_file.empty())
        return ncorr::realization_from_json(read_json_file(waves_file));
    if (!cfg.contains("waves"))
        throw ncorr::ConfigError("simulate: no waves given (config key 'waves' "
                                 "or --waves file)");
    const json& w = cfg.at("waves");
    if (w.contains("components")) return ncorr::realization_from_json(w);
    return ncorr::sample_realization(ncorr::spectrum_from_json(w),
                                     w.value("duration", 500.0),
                                     w.value("seed", std::uint64_t{0}));
}

int cmd_simulate(const SimArgs& args, bool predict_mode) {
    if (args.config.empty()) throw ncorr::ConfigError("--config is required");
    const json cfg = read_json_file(args.config);
    const std::string system = cfg.value("system", "duffing-high-fidelity");
    ncorr::IntegratorConfig icfg;
    icfg.dt = cfg.value("dt", 0.1);
    const double duration = cfg.value("duration", 500.0);
    const double cutoff = cfg.value("transient_cutoff", 0.0);
    const auto waves = waves_from_config(cfg, args.waves_file);

    std::optional<ncorr::CorrectorNet> net, pitch_net;
    if (!args.model_file.empty()) net = ncorr::load_model(args.model_file);
    if (!args.pitch_model_file.empty())
        pitch_net = ncorr::load_model(args.pitch_model_file);
    if (predict_mode && !net)
        throw ncorr::ConfigError("predict: --model is required");

    ncorr::StateTrajectory traj;
    json sidecar{{"system", system},
                 {"dt", icfg.dt},
                 {"duration", duration},
                 {"transient_cutoff", cutoff},
                 {"waves", ncorr::to_json(waves)},
                 {"version", ncorr::kVersion}};

    if (system == "duffing-high-fidelity") {
        const auto params =
            ncorr::duffing_params_from_json(cfg.value("duffing", json::object()));
        traj = ncorr::solve_high_fidelity(params, waves, duration, icfg, cutoff);
        sidecar["duffing"] = ncorr::to_json(params);
    } else if (system == "duffing-model") {
        const auto params =
            ncorr::duffing_params_from_json(cfg.value("duffing", json::object()));
        const auto model =
            ncorr::forcing_model_from_string(cfg.value("forcing_model", "A"));
        sidecar["duffing"] = ncorr::to_json(params);
        sidecar["forcing_model"] = ncorr::to_string(model);
        if (net) {
            traj = ncorr::predict_duffing_hybrid(model, params, *net, waves,
                                                 duration, icfg, cutoff);
            sidecar["model_file"] = args.model_file;
        } else {
            traj = ncorr::duffing_benchmark(model, params, waves, duration, icfg,
                                            cutoff);
        }
    } else if (system == "vessel-linear" || system == "vessel-oracle") {
        const auto particulars = cfg.contains("particulars")
                                     ? ncorr::particulars_from_json(cfg.at("particulars"))
                                     : ncorr::fds_particulars();
        const auto vessel = cfg.contains("vessel")
                                ? ncorr::vessel_from_json(cfg.at("vessel"))
                                : ncorr::assemble_vessel(
                                      particulars, cfg.value("alpha", 0.1));
        const auto excitation = ncorr::make_head_seas_excitation(waves, vessel);
        sidecar["vessel"] = ncorr::to_json(vessel);
        ncorr::OracleNonlinearity nl;
        if (system == "vessel-oracle") {
            nl = cfg.contains("nonlinearity")
                     ? ncorr::nonlinearity_from_json(cfg.at("nonlinearity"))
                     : ncorr::default_oracle_nonlinearity(vessel);
            sidecar["nonlinearity"] = ncorr::to_json(nl);
        }
        ncorr::DeltaFn provider = nullptr;
        if (net && pitch_net) {
            provider = ncorr::make_delta_provider(
                {{&*net, {ncorr::kHeave}}, {&*pitch_net, {ncorr::kPitch}}}, 6);
            sidecar["model_file"] = args.model_file;
            sidecar["pitch_model_file"] = args.pitch_model_file;
        } else if (net || pitch_net) {
            throw ncorr::ConfigError(
                "vessel prediction needs both --model (heave) and --model-pitch");
        }
        traj = ncorr::simulate_vessel(vessel, excitation, duration, icfg, cutoff,
                                      nl, provider);
    } else {
        throw ncorr::ConfigError("unknown system '" + system + "'");
    }

    ncorr::write_trajectory_csv(args.out, traj);
    fs::path sidecar_path = fs::path(args.out);
    sidecar_path.replace_extension(".json");
    write_json_file(sidecar_path, sidecar);
    std::cout << "wrote " << args.out << " (" << traj.n_samples()
              << " samples) and " << sidecar_path.string() << "\n";
    return 0;
}

// --- extract-delta -------------------------------------------------------------

struct ExtractArgs {
    std::string traj = "trajectory.csv";
    std::string model_id = "A";
    std::string out = "delta.csv";
};

int cmd_extract_delta(const ExtractArgs& args) {
    auto traj = ncorr::read_trajectory_csv(args.traj);
    fs::path sidecar_path = fs::path(args.traj);
    sidecar_path.replace_extension(".json");
    const json sidecar = read_json_file(sidecar_path);
    traj.dt = sidecar.value("dt", traj.dt);
    traj.transient_cutoff = sidecar.value("transient_cutoff", 0.0);

    if (traj.n_dof() == 1) {
        const auto params = ncorr::duffing_params_from_json(
            sidecar.value("duffing", json::object()));
        const auto model = ncorr::forcing_model_from_string(args.model_id);
        const Eigen::VectorXd delta = ncorr::extract_delta(model, params, traj);
        ncorr::CsvWriter csv(args.out, {"t", "delta"});
        for (Eigen::Index n = 0; n < delta.size(); ++n)
            csv.row(std::vector<double>{traj.time(n), delta(n)});
    } else {
        const auto vessel = ncorr::vessel_from_json(sidecar.at("vessel"));
        const auto waves =
            ncorr::realization_from_json(sidecar.at("waves"));
        const auto excitation = ncorr::make_head_seas_excitation(waves, vessel);
        const Eigen::MatrixXd delta = ncorr::extract_delta(vessel, excitation, traj);
        std::vector<std::string> header{"t"};
        for (int d = 0; d < 6; ++d) header.push_back("delta" + std::to_string(d));
        ncorr::CsvWriter csv(args.out, header);
        std::vector<double> row(7);
        for (Eigen::Index n = 0; n < delta.rows(); ++n) {
            row[0] = traj.time(n);
            for (int d = 0; d < 6; ++d) row[1 + d] = delta(n, d);
            csv.row(row);
        }
    }
    std::cout << "wrote " << args.out << "\n";
    return 0;
}

// --- train ----------------------------------------------------------------------

struct TrainArgs {
    std::string traj = "trajectory.csv";
    std::string delta = "delta.csv";
    std::string dof = "heave";
    int k = 5;
    std::vector<int> hidden{30, 30};
    int epochs = 2000;
    int batch_size = 32;
    double learning_rate = 1e-3;
    double validation_fraction = 0.1;
    int patience = 100;
    std::uint64_t seed = 0;
    std::string out = "model.json";
};

int cmd_train(const TrainArgs& args) {
    auto traj = ncorr::read_trajectory_csv(args.traj);
    fs::path sidecar_path = fs::path(args.traj);
    sidecar_path.replace_extension(".json");
    if (fs::exists(sidecar_path)) {
        const json sidecar = read_json_file(sidecar_path);
        traj.transient_cutoff = sidecar.value("transient_cutoff", 0.0);
    }
    const auto table = ncorr::read_csv(args.delta);
    if (static_cast<Eigen::Index>(table.rows.size()) != traj.n_samples())
        throw ncorr::DataError("train: delta/trajectory length mismatch");

    int column;
    ncorr::StencilSpec stencil;
    if (traj.n_dof() == 1) {
        column = table.column("delta");
        stencil = ncorr::single_dof_stencil(args.k, traj.dt);
    } else {
        const int dof = args.dof == "pitch" ? ncorr::kPitch : ncorr::kHeave;
        column = table.column("delta" + std::to_string(dof));
        stencil = ncorr::vessel_stencil(args.k, traj.dt);
    }
    Eigen::VectorXd delta(traj.n_samples());
    for (Eigen::Index n = 0; n < delta.size(); ++n)
        delta(n) = std::stod(table.rows[static_cast<std::size_t>(n)]
                                       [static_cast<std::size_t>(column)]);

    const auto dataset = ncorr::build_dataset(traj, delta, stencil);
    ncorr::TrainConfig cfg;
    cfg.epochs = args.epochs;
    cfg.batch_size = args.batch_size;
    cfg.learning_rate = args.learning_rate;
    cfg.validation_fraction = args.validation_fraction;
    cfg.patience = args.patience;
    cfg.seed = args.seed;
    const auto net = ncorr::train(dataset, args.hidden, cfg);
    ncorr::save_model(args.out, net);
    std::cout << "wrote " << args.out << " (best epoch "
              << net.info.best_epoch << ", val mse " << net.info.final_val_mse
              << ")\n";
    return 0;
}

// --- metrics ----------------------------------------------------------------------

struct MetricsArgs {
    std::string pred;
    std::string ref;
    std::string quantity = "position";
    int dof = 0;
    double cutoff = 0.0;
    double hs = 0.0;
    double tp_or_wp = 0.0;
    std::string model_id = "prediction";
    std::string out = "metrics.csv";
};

int cmd_metrics(const MetricsArgs& args) {
    const auto pred = ncorr::read_trajectory_csv(args.pred);
    const auto ref = ncorr::read_trajectory_csv(args.ref);
    ncorr::ChannelKind kind;
    if (args.quantity == "position") kind = ncorr::ChannelKind::Position;
    else if (args.quantity == "velocity") kind = ncorr::ChannelKind::Velocity;
    else if (args.quantity == "acceleration") kind = ncorr::ChannelKind::Acceleration;
    else throw ncorr::ConfigError("metrics: unknown quantity '" + args.quantity + "'");

    const auto report =
        ncorr::trajectory_metrics(pred, ref, kind, args.dof, args.cutoff);
    const bool existed = fs::exists(args.out);
    std::ofstream out(args.out, std::ios::app);
    if (!out) throw ncorr::DataError("cannot open for writing: " + args.out);
    if (!existed) {
        const auto& header = ncorr::metrics_csv_header();
        for (std::size_t i = 0; i < header.size(); ++i)
            out << (i ? "," : "") << header[i];
        out << "\n";
    }
    out << ncorr::format_double(args.hs) << ","
        << ncorr::format_double(args.tp_or_wp) << "," << args.model_id << ","
        << args.dof << "," << args.quantity << ","
        << ncorr::format_double(report.l2) << ","
        << ncorr::format_double(report.linf) << ","
        << ncorr::format_double(report.jsd) << "," << report.sample_count << "\n";
    std::cout << "l2 = " << report.l2 << "  linf = " << report.linf
              << "  jsd = " << report.jsd << "\n";
    return 0;
}

// --- studies ----------------------------------------------------------------------

struct StudyArgs {
    std::string name;
    std::string config;
    std::string out_dir;
    std::uint64_t seed = 0;
    int threads = 1;
    bool export_trajectories = false;
};

template <typename Config>
void apply_common_overrides(Config& cfg, const json& j) {
    cfg.dt = j.value("dt", cfg.dt);
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("hidden")) cfg.hidden = j.at("hidden").get<std::vector<int>>();
    if (j.contains("train_config"))
        ncorr::train_config_from_json(j.at("train_config"), cfg.train_config);
}

int cmd_study(const StudyArgs& args) {
    const json j = args.config.empty() ? json::object() : read_json_file(args.config);
    fs::path out_dir = args.out_dir.empty()
                           ? default_out_root() / ("study-" + args.name)
                           : fs::path(args.out_dir);

    std::vector<ncorr::StudyRow> rows;
    if (args.name == "duffing-trainsize") {
        ncorr::DuffingTrainSizeConfig cfg;
        cfg.seed = args.seed;
        cfg.threads = args.threads;
        apply_common_overrides(cfg, j);
        cfg.hs = j.value("hs", cfg.hs);
        cfg.stencil_k = j.value("k", cfg.stencil_k);
        cfg.replicates = j.value("replicates", cfg.replicates);
        cfg.test_duration = j.value("test_duration", cfg.test_duration);
        cfg.metrics_cutoff = j.value("metrics_cutoff", cfg.metrics_cutoff);
        if (j.contains("zuc_budgets"))
            cfg.zuc_budgets = j.at("zuc_budgets").get<std::vector<int>>();
        if (j.contains("models")) {
            cfg.models.clear();
            for (const auto& m : j.at("models"))
                cfg.models.push_back(
                    ncorr::forcing_model_from_string(m.get<std::string>()));
        }
        rows = run_duffing_trainsize(cfg, out_dir, args.export_trajectories);
    } else if (args.name == "duffing-hs-sweep") {
        ncorr::DuffingHsSweepConfig cfg;
        cfg.seed = args.seed;
        cfg.threads = args.threads;
        apply_common_overrides(cfg, j);
        cfg.train_zuc = j.value("train_zuc", cfg.train_zuc);
        cfg.stencil_k = j.value("k", cfg.stencil_k);
        cfg.replicates = j.value("replicates", cfg.replicates);
        cfg.test_duration = j.value("test_duration", cfg.test_duration);
        cfg.metrics_cutoff = j.value("metrics_cutoff", cfg.metrics_cutoff);
        if (j.contains("test_hs"))
            cfg.test_hs = j.at("test_hs").get<std::vector<double>>();
        if (j.contains("models")) {
            cfg.models.clear();
            for (const auto& m : j.at("models"))
                cfg.models.push_back(
                    ncorr::forcing_model_from_string(m.get<std::string>()));
        }
        rows = run_duffing_hs_sweep(cfg, out_dir, args.export_trajectories);
    } else if (args.name == "stencil-sweep") {
        ncorr::StencilSweepConfig cfg;
        cfg.seed = args.seed;
        cfg.threads = args.threads;
        apply_common_overrides(cfg, j);
        cfg.hs = j.value("hs", cfg.hs);
        cfg.tp = j.value("tp", cfg.tp);
        if (j.contains("ks")) cfg.ks = j.at("ks").get<std::vector<int>>();
        cfg.train_duration = j.value("train_duration", cfg.train_duration);
        cfg.test_duration = j.value("test_duration", cfg.test_duration);
        rows = run_stencil_sweep(cfg, out_dir, args.export_trajectories);
    } else if (args.name == "trainsize-6dof") {
        ncorr::TrainSize6DofConfig cfg;
        cfg.seed = args.seed;
        cfg.threads = args.threads;
        apply_common_overrides(cfg, j);
        cfg.hs = j.value("hs", cfg.hs);
        cfg.tp = j.value("tp", cfg.tp);
        if (j.contains("zuc_budgets"))
            cfg.zuc_budgets = j.at("zuc_budgets").get<std::vector<int>>();
        if (j.contains("ks")) cfg.ks = j.at("ks").get<std::vector<int>>();
        rows = run_trainsize_6dof(cfg, out_dir, args.export_trajectories);
    } else if (args.name == "seaway-grid") {
        ncorr::SeawayGridConfig cfg;
        cfg.seed = args.seed;
        cfg.threads = args.threads;
        apply_common_overrides(cfg, j);
        cfg.train_hs = j.value("train_hs", cfg.train_hs);
        cfg.train_tp = j.value("train_tp", cfg.train_tp);
        cfg.train_duration = j.value("train_duration", cfg.train_duration);
        cfg.test_duration = j.value("test_duration", cfg.test_duration);
        cfg.stencil_k = j.value("k", cfg.stencil_k);
        if (j.contains("grid_hs"))
            cfg.grid_hs = j.at("grid_hs").get<std::vector<double>>();
        if (j.contains("grid_tp"))
            cfg.grid_tp = j.at("grid_tp").get<std::vector<double>>();
        rows = run_seaway_grid(cfg, out_dir, args.export_trajectories);
    } else {
        throw ncorr::ConfigError(
            "unknown study '" + args.name +
            "' (expected duffing-trainsize, duffing-hs-sweep, stencil-sweep, "
            "trainsize-6dof, or seaway-grid)");
    }
    std::cout << "study " << args.name << ": " << rows.size() << " rows -> "
              << (out_dir / "results.csv").string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hybrid neural-corrector seakeeping simulations"};
    app.require_subcommand(1);

    WavesArgs waves;
    auto* waves_cmd = app.add_subcommand("waves", "Sample a wave realization");
    waves_cmd->add_option("--config", waves.config, "Spectrum config JSON");
    waves_cmd->add_option("--hs", waves.hs, "Significant wave height [m]");
    waves_cmd->add_option("--omega-p", waves.omega_p, "Peak frequency [rad/s]");
    waves_cmd->add_option("--tp", waves.tp, "Peak period [s] (JONSWAP)");
    waves_cmd->add_option("--gamma", waves.gamma, "JONSWAP peak-shape factor");
    waves_cmd->add_option("--duration", waves.duration, "Repeat period [s]");
    waves_cmd->add_option("--seed", waves.seed, "Phase seed");
    waves_cmd->add_option("--out", waves.out, "Output realization JSON");
    waves_cmd->add_option("--csv", waves.csv, "Optional elevation CSV");
    waves_cmd->add_option("--dt", waves.dt, "Elevation CSV time step [s]");

    SimArgs sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Integrate a configured system");
    sim_cmd->add_option("--config", sim.config, "Simulation config JSON")->required();
    sim_cmd->add_option("--waves", sim.waves_file, "Wave realization JSON");
    sim_cmd->add_option("--model", sim.model_file, "Corrector model (hybrid run)");
    sim_cmd->add_option("--model-pitch", sim.pitch_model_file,
                        "Pitch corrector (6-DOF hybrid)");
    sim_cmd->add_option("--out", sim.out, "Trajectory CSV (sidecar JSON alongside)");

    SimArgs pred = sim;
    auto* pred_cmd =
        app.add_subcommand("predict", "Hybrid prediction with a trained corrector");
    pred_cmd->add_option("--config", pred.config, "Simulation config JSON")->required();
    pred_cmd->add_option("--waves", pred.waves_file, "Wave realization JSON");
    pred_cmd->add_option("--model", pred.model_file, "Corrector model JSON")->required();
    pred_cmd->add_option("--model-pitch", pred.pitch_model_file,
                         "Pitch corrector (6-DOF hybrid)");
    pred_cmd->add_option("--out", pred.out, "Trajectory CSV");

    ExtractArgs extract;
    auto* extract_cmd = app.add_subcommand(
        "extract-delta", "Force correction from a trajectory and its sidecar");
    extract_cmd->add_option("--traj", extract.traj, "Trajectory CSV")->required();
    extract_cmd->add_option("--model-id", extract.model_id,
                            "Forcing model A..E (1-DOF only)");
    extract_cmd->add_option("--out", extract.out, "Delta CSV");

    TrainArgs train;
    auto* train_cmd = app.add_subcommand("train", "Fit a corrector network");
    train_cmd->add_option("--traj", train.traj, "Trajectory CSV")->required();
    train_cmd->add_option("--delta", train.delta, "Delta CSV")->required();
    train_cmd->add_option("--dof", train.dof, "Target DOF for 6-DOF (heave|pitch)");
    train_cmd->add_option("--k", train.k, "Stencil length");
    train_cmd->add_option("--hidden", train.hidden, "Hidden layer sizes");
    train_cmd->add_option("--epochs", train.epochs, "Max epochs");
    train_cmd->add_option("--batch-size", train.batch_size, "Minibatch size");
    train_cmd->add_option("--learning-rate", train.learning_rate, "Adam step size");
    train_cmd->add_option("--validation-fraction", train.validation_fraction,
                          "Validation split");
    train_cmd->add_option("--patience", train.patience, "Early-stop patience");
    train_cmd->add_option("--seed", train.seed, "Init/shuffle seed");
    train_cmd->add_option("--out", train.out, "Model JSON");

    MetricsArgs metrics;
    auto* metrics_cmd =
        app.add_subcommand("metrics", "Prediction metrics against a reference");
    metrics_cmd->add_option("--pred", metrics.pred, "Prediction CSV")->required();
    metrics_cmd->add_option("--ref", metrics.ref, "Reference CSV")->required();
    metrics_cmd->add_option("--quantity", metrics.quantity,
                            "position|velocity|acceleration");
    metrics_cmd->add_option("--dof", metrics.dof, "DOF column index");
    metrics_cmd->add_option("--cutoff", metrics.cutoff, "Transient cutoff [s]");
    metrics_cmd->add_option("--hs", metrics.hs, "Condition label Hs");
    metrics_cmd->add_option("--tp-or-wp", metrics.tp_or_wp, "Condition label Tp/wp");
    metrics_cmd->add_option("--model-id", metrics.model_id, "Row label");
    metrics_cmd->add_option("--out", metrics.out, "Metrics CSV (appended)");

    StudyArgs study;
    auto* study_cmd = app.add_subcommand("study", "Run a built-in study");
    study_cmd->add_option("name", study.name, "Study name")->required();
    study_cmd->add_option("--config", study.config, "Override config JSON");
    study_cmd->add_option("--out-dir", study.out_dir,
                          "Output directory (default $NCORR_OUT_ROOT/study-<name>)");
    study_cmd->add_option("--seed", study.seed, "Base seed");
    study_cmd->add_option("--threads", study.threads, "Worker pool size");
    study_cmd->add_flag("--export-trajectories", study.export_trajectories,
                        "Also write trajectory CSVs");

    CLI11_PARSE(app, argc, argv);

    try {
        if (waves_cmd->parsed()) return cmd_waves(waves);
        if (sim_cmd->parsed()) return cmd_simulate(sim, false);
        if (pred_cmd->parsed()) return cmd_simulate(pred, true);
        if (extract_cmd->parsed()) return cmd_extract_delta(extract);
        if (train_cmd->parsed()) return cmd_train(train);
        if (metrics_cmd->parsed()) return cmd_metrics(metrics);
        if (study_cmd->parsed()) return cmd_study(study);
    } catch (const ncorr::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return static_cast<int>(ncorr::ExitCode::Config);
    } catch (const ncorr::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return static_cast<int>(ncorr::ExitCode::Data);
    } catch (const ncorr::TrainingError& e) {
        std::cerr << "training error: " << e.what() << "\n";
        return static_cast<int>(ncorr::ExitCode::Training);
    } catch (const ncorr::SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return static_cast<int>(ncorr::ExitCode::Solver);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(ncorr::ExitCode::Unknown);
    }
    return 0;
}
