// piranha: policy-iteration-style training of recurrent networks for
// multi-step sequence replay. Subcommands: gen-data, train, replay,
// gradcheck, bound, compare.
//
// Exit codes: 0 success, 1 check failed, 2 usage error, 3 data error,
// 4 numeric failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include "piranha/io.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

struct TrainFlags {
    std::string data;
    std::string out_dir = "run";
    int m = 1;
    int n = 8;
    double gamma = 0.7;
    int K = 0;        // 0: derive from eps0
    double eps0 = 0.0;
    int T = 50;
    double alpha = 1.0;
    int max_iter = 500;
    std::uint64_t seed = 1;
    bool fixed_step = false;
    bool backtrack = false;
    bool no_clip = false;
    std::string state_update = "rollout";
    std::string pad = "none";
    double stop_tol = 1e-8;
    double rho = 0.5;
    int max_halvings = 40;
};

void add_train_flags(CLI::App* cmd, TrainFlags& f) {
    cmd->add_option("--data", f.data, "series file (CSV, one time step per line)")->required();
    cmd->add_option("--m", f.m, "visible channels");
    cmd->add_option("--n", f.n, "hidden units (must exceed m)");
    cmd->add_option("--gamma", f.gamma, "discount factor in (0,1)");
    cmd->add_option("--K", f.K, "truncation horizon");
    cmd->add_option("--eps0", f.eps0, "derive K from this gradient accuracy");
    cmd->add_option("--T", f.T, "sequence length (transitions)");
    cmd->add_option("--alpha", f.alpha, "step size (initial step under --backtrack)");
    cmd->add_option("--max-iter", f.max_iter, "iteration budget");
    cmd->add_option("--seed", f.seed, "RNG seed for the weight initialization");
    cmd->add_flag("--fixed-step", f.fixed_step, "take alpha unconditionally");
    cmd->add_flag("--backtrack", f.backtrack, "backtracking line search (default)");
    cmd->add_flag("--no-clip", f.no_clip, "disable recurrent-weight clipping");
    cmd->add_option("--state-update", f.state_update, "rollout | smooth:J");
    cmd->add_option("--pad", f.pad, "none | hold (extend short series by holding the last sample)");
    cmd->add_option("--stop-tol", f.stop_tol, "terminate when the gradient norm drops below this");
    cmd->add_option("--rho", f.rho, "backtracking shrink factor");
    cmd->add_option("--max-halvings", f.max_halvings, "backtracking attempts per iteration");
    cmd->add_option("--out", f.out_dir, "output directory");
}

piranha::PadMode parse_pad(const std::string& pad) {
    if (pad == "none") return piranha::PadMode::none;
    if (pad == "hold") return piranha::PadMode::hold;
    throw CLI::ValidationError("--pad must be none or hold");
}

// Returns config; prints derivation notes to stderr.
piranha::TrainConfig resolve_config(const TrainFlags& f) {
    if (f.gamma <= 0.0 || f.gamma >= 1.0) {
        if (f.gamma == 0.0)
            throw CLI::ValidationError(
                "--gamma 0 degenerates training: the improvement objective's candidate terms "
                "all carry gamma^k (k>=1), so the gradient vanishes identically");
        throw CLI::ValidationError("--gamma must lie in (0,1)");
    }
    if (f.fixed_step && f.backtrack)
        throw CLI::ValidationError("--fixed-step and --backtrack are mutually exclusive");

    piranha::TrainConfig cfg;
    cfg.hp.gamma = f.gamma;
    cfg.hp.T = f.T;
    if (f.K > 0) {
        cfg.hp.K = f.K;
        if (f.eps0 > 0.0)
            std::cerr << "warning: both --K and --eps0 given; explicit K=" << f.K << " wins\n";
    } else if (f.eps0 > 0.0) {
        piranha::Hyperparams hp_for_bound;
        hp_for_bound.gamma = f.gamma;
        hp_for_bound.T = f.T;
        auto rep = piranha::truncation_horizon(f.eps0, hp_for_bound, piranha::Shape(f.m, f.n));
        cfg.hp.K = rep.K;
        std::cerr << "derived K=" << rep.K << " from eps0=" << f.eps0
                  << " (bound=" << rep.bound << ")\n";
    } else {
        throw CLI::ValidationError("provide --K or --eps0");
    }
    cfg.max_iter = f.max_iter;
    cfg.use_backtracking = !f.fixed_step;
    cfg.fixed.alpha = f.alpha;
    cfg.backtrack.alpha_init = f.alpha;
    cfg.backtrack.rho = f.rho;
    cfg.backtrack.max_halvings = f.max_halvings;
    cfg.clip_enabled = !f.no_clip;
    cfg.seed = f.seed;
    cfg.stop_tol = f.stop_tol;
    if (f.state_update == "rollout") {
        cfg.smooth_steps = 0;
    } else if (f.state_update.rfind("smooth:", 0) == 0) {
        cfg.smooth_steps = std::stoi(f.state_update.substr(7));
        if (cfg.smooth_steps < 1)
            throw CLI::ValidationError("--state-update smooth:J needs J >= 1");
    } else {
        throw CLI::ValidationError("--state-update must be rollout or smooth:J");
    }
    return cfg;
}

json config_json(const TrainFlags& f, const piranha::TrainConfig& cfg) {
    return json{{"data", f.data},
                {"m", f.m},
                {"n", f.n},
                {"gamma", cfg.hp.gamma},
                {"K", cfg.hp.K},
                {"T", cfg.hp.T},
                {"alpha", f.alpha},
                {"max_iter", cfg.max_iter},
                {"seed", cfg.seed},
                {"step_policy", cfg.use_backtracking ? "backtracking" : "fixed"},
                {"rho", cfg.backtrack.rho},
                {"max_halvings", cfg.backtrack.max_halvings},
                {"clip", cfg.clip_enabled},
                {"state_update",
                 cfg.smooth_steps > 0 ? "smooth:" + std::to_string(cfg.smooth_steps) : "rollout"},
                {"pad", f.pad},
                {"stop_tol", cfg.stop_tol}};
}

int cmd_train(const TrainFlags& f) {
    piranha::TrainConfig cfg = resolve_config(f);
    piranha::Shape shape(f.m, f.n);
    piranha::Series x = piranha::load_series(f.data, f.m, parse_pad(f.pad));

    auto [result, trace] = piranha::piranha_train(x, shape, cfg);

    fs::create_directories(f.out_dir);
    piranha::save_weights(result.weights, (fs::path(f.out_dir) / "weights.txt").string());
    piranha::write_trace(trace, (fs::path(f.out_dir) / "trace.csv").string());
    std::ofstream cfg_out(fs::path(f.out_dir) / "config.json");
    cfg_out << config_json(f, cfg).dump(2) << '\n';

    std::cout << "final_objective=" << trace.back().objective << '\n'
              << "termination=" << piranha::to_string(result.reason) << '\n'
              << "iterations=" << trace.size() << '\n';
    return kExitOk;
}

int cmd_replay(const std::string& weights_path, const std::string& data_path, int t_switch,
               int T, const std::string& pad, const std::string& out_path) {
    piranha::Weights w = piranha::load_weights(weights_path);
    piranha::Series x = piranha::load_series(data_path, w.m(), parse_pad(pad));
    if (T <= 0) T = static_cast<int>(x.size()) - 1;
    if (t_switch < 1 || t_switch >= T)
        throw CLI::ValidationError("--t-switch must satisfy 1 <= t-switch < T");

    const double err = piranha::replay_error(w, x, t_switch, T);
    const auto preds = piranha::replay_predictions(w, x, t_switch, T);
    if (!out_path.empty()) piranha::write_replay(x, preds, t_switch, out_path);

    std::cout << "replay_error=" << std::setprecision(17) << err << '\n'
              << "t_switch=" << t_switch << '\n'
              << "T=" << T << '\n';
    return kExitOk;
}

int cmd_gradcheck(int n, int m, int T, int K, double gamma, std::uint64_t seed, double h) {
    piranha::Shape shape(m, n);
    piranha::Hyperparams hp;
    hp.gamma = gamma;
    hp.K = K;
    hp.T = T;
    hp.validate();

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> wdist(-0.35, 0.35);
    std::uniform_real_distribution<double> xdist(-0.9, 0.9);
    piranha::Weights w = piranha::Weights::zero(shape);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) w.F(i, j) = wdist(rng);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m + 1; ++j) w.G(i, j) = wdist(rng);

    const double limit = 1.0 / std::sqrt(gamma);
    if (piranha::inf_norm(w.F) > limit)
        std::cerr << "warning: ||F||_inf = " << piranha::inf_norm(w.F) << " exceeds 1/sqrt(gamma) = "
                  << limit << "; the truncation bound does not apply, running the check anyway\n";

    std::vector<Eigen::VectorXd> rows(static_cast<std::size_t>(T + K));
    for (auto& row : rows) {
        row.resize(m);
        for (int c = 0; c < m; ++c) row[c] = xdist(rng);
    }
    piranha::Series x = piranha::Series::preNormalized(std::move(rows));
    piranha::StateSeq U = piranha::rollout(w, x, T);

    piranha::Gradient g = piranha::grad(w, U, x, hp);
    piranha::Gradient fd = piranha::fd_grad(w, U, x, hp, h);

    double max_rel = 0.0;
    auto record = [&](double a, double b) {
        const double diff = std::abs(a - b);
        if (diff <= 1e-10) return;  // absolute floor for near-zero components
        max_rel = std::max(max_rel, diff / std::max(std::abs(a), std::abs(b)));
    };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) record(g.dF(i, j), fd.dF(i, j));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m + 1; ++j) record(g.dG(i, j), fd.dG(i, j));

    std::cout << "max_rel_err=" << std::setprecision(17) << max_rel << '\n'
              << "grad_norm=" << g.norm() << '\n';
    return max_rel <= 1e-5 ? kExitOk : kExitCheckFailed;
}

int cmd_bound(double eps0, double gamma, int T, int n, int m) {
    piranha::Hyperparams hp;
    hp.gamma = gamma;
    hp.T = T;
    auto rep = piranha::truncation_horizon(eps0, hp, piranha::Shape(m, n));
    std::cout << "K=" << rep.K << '\n'
              << "bound=" << std::setprecision(17) << rep.bound << '\n'
              << "C0=" << rep.C0 << '\n'
              << "C1=" << rep.C1 << '\n';
    return kExitOk;
}

int cmd_compare(const TrainFlags& f) {
    piranha::TrainConfig cfg = resolve_config(f);
    piranha::Shape shape(f.m, f.n);
    piranha::Series x = piranha::load_series(f.data, f.m, parse_pad(f.pad));

    auto [res_p, trace_p] = piranha::piranha_train(x, shape, cfg);
    auto [res_b, trace_b] = piranha::baseline_onestep_train(x, shape, cfg);

    const int t_switch = std::max(1, cfg.hp.T / 2);
    const double replay_p = piranha::replay_error(res_p.weights, x, t_switch, cfg.hp.T);
    const double replay_b = piranha::replay_error(res_b.weights, x, t_switch, cfg.hp.T);

    fs::create_directories(f.out_dir);
    piranha::save_weights(res_p.weights, (fs::path(f.out_dir) / "weights_piranha.txt").string());
    piranha::save_weights(res_b.weights, (fs::path(f.out_dir) / "weights_baseline.txt").string());
    piranha::write_trace(trace_p, (fs::path(f.out_dir) / "trace_piranha.csv").string());
    piranha::write_trace(trace_b, (fs::path(f.out_dir) / "trace_baseline.csv").string());
    std::ofstream cfg_out(fs::path(f.out_dir) / "config.json");
    cfg_out << config_json(f, cfg).dump(2) << '\n';

    std::ofstream summary(fs::path(f.out_dir) / "summary.txt");
    summary << std::setprecision(17)
            << "t_switch=" << t_switch << '\n'
            << "replay_error_piranha=" << replay_p << '\n'
            << "replay_error_baseline=" << replay_b << '\n'
            << "final_objective_piranha=" << trace_p.back().objective << '\n'
            << "final_objective_baseline=" << trace_b.back().objective << '\n'
            << "termination_piranha=" << piranha::to_string(res_p.reason) << '\n'
            << "termination_baseline=" << piranha::to_string(res_b.reason) << '\n';

    std::cout << std::setprecision(17)
              << "replay_error_piranha=" << replay_p << '\n'
              << "replay_error_baseline=" << replay_b << '\n';
    return kExitOk;
}

int cmd_gen_data(const std::string& kind, double freq, double phase,
                 const std::string& components, long L, int m, std::uint64_t seed,
                 const std::string& out) {
    std::vector<piranha::SineSpec> comps;
    piranha::SeriesKind k;
    if (kind == "sine") {
        k = piranha::SeriesKind::sine;
        comps.push_back({freq, phase, 1.0});
    } else if (kind == "square") {
        k = piranha::SeriesKind::square;
        comps.push_back({freq, phase, 1.0});
    } else if (kind == "sum-of-sines") {
        k = piranha::SeriesKind::sum_of_sines;
        std::stringstream ss(components);
        std::string item;
        while (std::getline(ss, item, ',')) {
            piranha::SineSpec sp;
            if (std::sscanf(item.c_str(), "%lf:%lf:%lf", &sp.freq, &sp.phase, &sp.amp) != 3)
                throw CLI::ValidationError("--components entries must look like freq:phase:amp");
            comps.push_back(sp);
        }
        if (comps.empty()) throw CLI::ValidationError("--components required for sum-of-sines");
    } else {
        throw CLI::ValidationError("--kind must be sine, sum-of-sines or square");
    }
    piranha::Series s = piranha::gen_series(k, comps, L, m, seed);
    piranha::write_series(s, out);
    std::cout << "wrote=" << out << '\n' << "rows=" << s.size() << '\n';
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"piranha: multi-step replay training for recurrent networks"};
    app.require_subcommand(1);

    TrainFlags tf;
    auto* train = app.add_subcommand("train", "train weights on a series");
    add_train_flags(train, tf);

    std::string rp_weights, rp_data, rp_out = "replay_out.csv", rp_pad = "none";
    int rp_tswitch = 0, rp_T = 0;
    auto* replay = app.add_subcommand("replay", "replay a series from a teacher-forced prefix");
    replay->add_option("--weights", rp_weights)->required();
    replay->add_option("--data", rp_data)->required();
    replay->add_option("--t-switch", rp_tswitch, "last teacher-forced input index")->required();
    replay->add_option("--T", rp_T, "evaluation end (default: series length - 1)");
    replay->add_option("--pad", rp_pad, "none | hold");
    replay->add_option("--out", rp_out, "prediction CSV (empty to skip)");

    int gc_n = 4, gc_m = 1, gc_T = 10, gc_K = 6;
    double gc_gamma = 0.5, gc_h = 1e-5;
    std::uint64_t gc_seed = 1;
    auto* gradcheck = app.add_subcommand("gradcheck", "compare the gradient with finite differences");
    gradcheck->set_help_flag("--help", "print help");  // frees -h / --h for the FD step
    gradcheck->add_option("--n", gc_n);
    gradcheck->add_option("--m", gc_m);
    gradcheck->add_option("--T", gc_T);
    gradcheck->add_option("--K", gc_K);
    gradcheck->add_option("--gamma", gc_gamma);
    gradcheck->add_option("--seed", gc_seed);
    gradcheck->add_option("--h", gc_h, "finite-difference step");

    double bd_eps0 = 0.1, bd_gamma = 0.5;
    int bd_T = 10, bd_n = 4, bd_m = 1;
    auto* bound = app.add_subcommand("bound", "truncation horizon for a gradient accuracy");
    bound->add_option("--eps0", bd_eps0)->required();
    bound->add_option("--gamma", bd_gamma)->required();
    bound->add_option("--T", bd_T);
    bound->add_option("--n", bd_n);
    bound->add_option("--m", bd_m);

    TrainFlags cf;
    auto* compare = app.add_subcommand("compare", "train piranha and the one-step baseline side by side");
    add_train_flags(compare, cf);

    std::string gd_kind = "sine", gd_components, gd_out = "series.csv";
    double gd_freq = 0.02, gd_phase = 0.0;
    long gd_L = 100;
    int gd_m = 1;
    std::uint64_t gd_seed = 1;
    auto* gen = app.add_subcommand("gen-data", "write a synthetic benchmark series");
    gen->add_option("--kind", gd_kind, "sine | sum-of-sines | square");
    gen->add_option("--freq", gd_freq, "cycles per step");
    gen->add_option("--phase", gd_phase);
    gen->add_option("--components", gd_components, "freq:phase:amp,... for sum-of-sines");
    gen->add_option("--L", gd_L, "number of samples");
    gen->add_option("--m", gd_m, "channels");
    gen->add_option("--seed", gd_seed);
    gen->add_option("--out", gd_out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // CLI11 prints help itself for --help; everything else is a usage error.
        if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp")
            return app.exit(e);
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*train) return cmd_train(tf);
        if (*replay) return cmd_replay(rp_weights, rp_data, rp_tswitch, rp_T, rp_pad, rp_out);
        if (*gradcheck) return cmd_gradcheck(gc_n, gc_m, gc_T, gc_K, gc_gamma, gc_seed, gc_h);
        if (*bound) return cmd_bound(bd_eps0, bd_gamma, bd_T, bd_n, bd_m);
        if (*compare) return cmd_compare(cf);
        if (*gen) return cmd_gen_data(gd_kind, gd_freq, gd_phase, gd_components, gd_L, gd_m,
                                      gd_seed, gd_out);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const piranha::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const piranha::RangeError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const piranha::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
