#include "coral/config.hpp"

#include "coral/experiments.hpp"
#include "coral/oracles.hpp"
#include "coral/rng.hpp"
#include "coral/selftest.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <ostream>

namespace coral {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& why) {
    throw ConfigError("config error at " + path + ": " + why);
}

template <typename T>
T require(const json& j, const std::string& path, const std::string& key) {
    if (!j.contains(key)) fail(path + key, "missing field");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        fail(path + key, "wrong type");
    }
}

template <typename T>
T optional_field(const json& j, const std::string& path, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        fail(path + key, "wrong type");
    }
}

const std::vector<std::string> kKnownInstances = {
    "prop1", "prop3_large", "prop3_small", "figure1",
    "rate_mab5", "rate_cb33", "rate_mdp42"};
const std::vector<std::string> kKnownExperiments = {
    "prop1", "prop2", "prop3_small", "prop3_large", "figure1", "rate"};

}  // namespace

RunConfig parse_config(const std::string& json_text) {
    json j = json::parse(json_text, nullptr, false);
    if (j.is_discarded()) throw ConfigError("config error at <root>: not valid json");
    if (!j.is_object()) throw ConfigError("config error at <root>: expected an object");
    RunConfig cfg;

    if (j.contains("instance")) {
        const auto& inst = j.at("instance");
        if (!inst.is_object()) fail("instance", "expected an object");
        cfg.instance_name = optional_field<std::string>(inst, "instance.", "name", "");
        cfg.model_file = optional_field<std::string>(inst, "instance.", "file", "");
        if (cfg.instance_name.empty() && cfg.model_file.empty())
            fail("instance", "need either 'name' or 'file'");
        if (!cfg.instance_name.empty()) {
            bool known = false;
            for (const auto& k : kKnownInstances) known |= k == cfg.instance_name;
            if (!known) fail("instance.name", "unknown builder '" + cfg.instance_name + "'");
        }
        cfg.instance_n = optional_field<std::size_t>(inst, "instance.", "n", cfg.instance_n);
        cfg.alpha = optional_field<double>(inst, "instance.", "alpha", cfg.alpha);
        cfg.gamma = optional_field<double>(inst, "instance.", "gamma", cfg.gamma);
        if (cfg.gamma < 0.0 || cfg.gamma >= 1.0) fail("instance.gamma", "must lie in [0,1)");
        if (cfg.alpha < 0.0) fail("instance.alpha", "must be >= 0");
    }

    if (j.contains("algorithm")) {
        const auto& alg = j.at("algorithm");
        if (!alg.is_object()) fail("algorithm", "expected an object");
        cfg.algorithm = require<std::string>(alg, "algorithm.", "id");
        try {
            algorithm_from_name(cfg.algorithm);
        } catch (const ConfigError&) {
            fail("algorithm.id", "unknown algorithm '" + cfg.algorithm + "'");
        }
        cfg.alpha = optional_field<double>(alg, "algorithm.", "alpha", cfg.alpha);
    }

    if (j.contains("solver")) {
        const auto& s = j.at("solver");
        if (!s.is_object()) fail("solver", "expected an object");
        cfg.solver_mode = optional_field<std::string>(s, "solver.", "mode", cfg.solver_mode);
        if (cfg.solver_mode != "finite" && cfg.solver_mode != "gda")
            fail("solver.mode", "must be 'finite' or 'gda'");
        cfg.gda_steps = optional_field<int>(s, "solver.", "steps", cfg.gda_steps);
        cfg.gda_step_w = optional_field<double>(s, "solver.", "step_w", cfg.gda_step_w);
        cfg.gda_step_v = optional_field<double>(s, "solver.", "step_v", cfg.gda_step_v);
        cfg.gda_tol = optional_field<double>(s, "solver.", "tol", cfg.gda_tol);
        cfg.gda_probe_levels =
            optional_field<int>(s, "solver.", "probe_levels", cfg.gda_probe_levels);
        if (cfg.gda_steps <= 0) fail("solver.steps", "must be positive");
    }

    if (j.contains("sizes")) {
        const auto& s = j.at("sizes");
        if (!s.is_object()) fail("sizes", "expected an object");
        cfg.n = optional_field<std::size_t>(s, "sizes.", "N", cfg.n);
        cfg.n0 = optional_field<std::size_t>(s, "sizes.", "N0", cfg.n);
        cfg.nm = optional_field<std::size_t>(s, "sizes.", "Nm", cfg.n);
        if (cfg.n == 0) fail("sizes.N", "must be >= 1");
    }

    if (j.contains("experiment")) {
        const auto& e = j.at("experiment");
        if (!e.is_object()) fail("experiment", "expected an object");
        cfg.experiment = require<std::string>(e, "experiment.", "kind");
        bool known = false;
        for (const auto& k : kKnownExperiments) known |= k == cfg.experiment;
        if (!known) fail("experiment.kind", "unknown experiment '" + cfg.experiment + "'");
        cfg.trials = optional_field<int>(e, "experiment.", "trials", cfg.trials);
        if (cfg.trials <= 0) fail("experiment.trials", "must be positive");
        if (e.contains("n_grid")) {
            if (!e.at("n_grid").is_array() || e.at("n_grid").empty())
                fail("experiment.n_grid", "expected a nonempty array");
            cfg.n_grid.clear();
            for (const auto& v : e.at("n_grid")) {
                if (!v.is_number_unsigned() || v.get<std::size_t>() == 0)
                    fail("experiment.n_grid", "entries must be positive integers");
                cfg.n_grid.push_back(v.get<std::size_t>());
            }
        }
    }

    cfg.seed = optional_field<std::uint64_t>(j, "", "seed", cfg.seed);
    cfg.out_dir = optional_field<std::string>(j, "", "out", cfg.out_dir);
    cfg.dataset_file = optional_field<std::string>(j, "", "dataset", cfg.dataset_file);
    cfg.solution_file = optional_field<std::string>(j, "", "solution", cfg.solution_file);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("config error at <file>: cannot open '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    return parse_config(text);
}

std::string config_echo_json(const RunConfig& cfg) {
    json j;
    j["instance"] = {{"name", cfg.instance_name}, {"file", cfg.model_file},
                     {"n", cfg.instance_n},       {"alpha", cfg.alpha},
                     {"gamma", cfg.gamma}};
    j["algorithm"] = {{"id", cfg.algorithm}, {"alpha", cfg.alpha}};
    j["solver"] = {{"mode", cfg.solver_mode},       {"steps", cfg.gda_steps},
                   {"step_w", cfg.gda_step_w},      {"step_v", cfg.gda_step_v},
                   {"tol", cfg.gda_tol},            {"probe_levels", cfg.gda_probe_levels}};
    j["sizes"] = {{"N", cfg.n}, {"N0", cfg.n0}, {"Nm", cfg.nm}};
    if (!cfg.experiment.empty()) {
        j["experiment"] = {{"kind", cfg.experiment}, {"trials", cfg.trials}};
        j["experiment"]["n_grid"] = cfg.n_grid;
    }
    j["seed"] = cfg.seed;
    j["out"] = cfg.out_dir;
    return j.dump();
}

namespace {

Instance instance_from_config(const RunConfig& cfg) {
    if (!cfg.model_file.empty())
        throw ConfigError("config error at instance.file: external model files need "
                          "explicit classes; use a named builder");
    return build_instance(cfg.instance_name, cfg.instance_n, cfg.alpha, cfg.gamma, cfg.seed);
}

std::string join_path(const std::string& dir, const std::string& name) {
    return dir + "/" + name;
}

}  // namespace

int cmd_gen(const RunConfig& cfg, std::ostream& out) {
    const Instance inst = instance_from_config(cfg);
    std::filesystem::create_directories(cfg.out_dir);
    const std::string stem = cfg.dataset_file.empty() ? inst.name : cfg.dataset_file;
    const OfflineDataset data =
        sample_offline(inst.model, inst.mu, cfg.n, derive_seed(cfg.seed, 1));
    save_offline(data, join_path(cfg.out_dir, stem + ".offline.jsonl"));
    const InitialDataset init = sample_initial(inst.model, cfg.n0, derive_seed(cfg.seed, 2));
    save_initial(init, join_path(cfg.out_dir, stem + ".initial.jsonl"));
    const ModelDataset md = sample_model_data(inst.model, inst.mu, cfg.nm, derive_seed(cfg.seed, 3));
    save_model_data(md, join_path(cfg.out_dir, stem + ".model.jsonl"));
    out << "gen: wrote " << stem << ".{offline,initial,model}.jsonl in " << cfg.out_dir
        << " (N=" << cfg.n << ", N0=" << cfg.n0 << ", Nm=" << cfg.nm << ")\n";
    return kExitOk;
}

int cmd_solve(const RunConfig& cfg, std::ostream& out) {
    const Instance inst = instance_from_config(cfg);
    const AlgorithmId algo = algorithm_from_name(cfg.algorithm);
    std::filesystem::create_directories(cfg.out_dir);

    OfflineDataset data;
    if (!cfg.dataset_file.empty())
        data = load_offline(cfg.dataset_file);
    else
        data = sample_offline(inst.model, inst.mu, cfg.n, derive_seed(cfg.seed, 1));

    json sol_json;
    sol_json["config"] = json::parse(config_echo_json(cfg));
    sol_json["algorithm"] = cfg.algorithm;
    sol_json["instance"] = inst.name;
    sol_json["seed"] = cfg.seed;

    Mat w_table;
    double objective = 0.0;
    if (cfg.solver_mode == "gda") {
        BanditAlgorithm ba;
        switch (algo) {
            case AlgorithmId::pro_mab: ba = BanditAlgorithm::pro_mab; break;
            case AlgorithmId::alm_mab: ba = BanditAlgorithm::alm_mab; break;
            case AlgorithmId::pro_cb: ba = BanditAlgorithm::pro_cb; break;
            case AlgorithmId::alm_cb: ba = BanditAlgorithm::alm_cb; break;
            default:
                throw ConfigError("config error at solver.mode: gda supports the "
                                  "bandit/CB objectives only");
        }
        GdaConfig gc{cfg.gda_steps, cfg.gda_step_w, cfg.gda_step_v, true, cfg.gda_tol,
                     cfg.gda_probe_levels};
        const SaddleSolution sol =
            solve_gda(ba, data, inst.mu, cfg.alpha, inst.spec, inst.W.bounds, gc);
        w_table = sol.w_table;
        objective = sol.objective;
        sol_json["gap_estimate"] = sol.gap_estimate;
        sol_json["converged"] = sol.converged;
    } else {
        InitialDataset init;
        ModelDataset md;
        const bool aux = algo == AlgorithmId::coral_mb || algo == AlgorithmId::coral_mf;
        if (aux) {
            init = sample_initial(inst.model, cfg.n0, derive_seed(cfg.seed, 2));
            md = sample_model_data(inst.model, inst.mu, cfg.nm, derive_seed(cfg.seed, 3));
        }
        // enumerate over the instance classes
        ExperimentReport dummy;
        (void)dummy;
        SaddleSolution sol;
        {
            // reuse the experiment-layer dispatcher through run_trial-style solving
            const auto& W = inst.W.members;
            const auto& V = inst.V.members;
            switch (algo) {
                case AlgorithmId::pro_mab:
                    sol = solve_finite(W.size(), V.size(), 0, 0, [&](int iw, int iv, int, int) {
                        return emp_pro_mab(data, W[iw], V[iv], cfg.alpha, inst.spec);
                    });
                    break;
                case AlgorithmId::alm_mab:
                    sol = solve_finite(W.size(), V.size(), 0, 0, [&](int iw, int iv, int, int) {
                        return emp_alm_mab(data, W[iw], V[iv]);
                    });
                    break;
                case AlgorithmId::pro_cb:
                    sol = solve_finite(W.size(), V.size(), 0, 0, [&](int iw, int iv, int, int) {
                        return emp_pro_cb(data, W[iw], V[iv], cfg.alpha, inst.spec);
                    });
                    break;
                case AlgorithmId::alm_cb:
                    sol = solve_finite(W.size(), V.size(), 0, 0, [&](int iw, int iv, int, int) {
                        return emp_alm_cb(data, W[iw], V[iv], inst.mu);
                    });
                    break;
                case AlgorithmId::coral_mb: {
                    const Mat p_hat = inst.P_class.empty()
                        ? mle_transitions_tabular(md, inst.model.n_states(), inst.model.n_actions())
                        : inst.P_class[mle_transitions_finite(md, inst.P_class)];
                    const FenchelPair fen{(1.0 - inst.model.discount()) / 4.0};
                    sol = solve_finite(W.size(), V.size(), inst.U.size(), 0,
                                       [&](int iw, int iv, int iu, int) {
                        return emp_coral_mb(data, init, p_hat, W[iw], V[iv],
                                            inst.U.members[iu], fen, inst.mu,
                                            inst.model.discount());
                    });
                    break;
                }
                case AlgorithmId::coral_mf: {
                    const FenchelPair fen{(1.0 - inst.model.discount()) / 4.0};
                    sol = solve_finite(W.size(), V.size(), inst.U.size(), inst.Z.size(),
                                       [&](int iw, int iv, int iu, int iz) {
                        return emp_coral_mf(data, init, W[iw], V[iv], inst.U.members[iu],
                                            inst.Z.members[iz], fen, inst.mu,
                                            inst.model.discount());
                    });
                    break;
                }
            }
            w_table = inst.W.members[sol.w_index].table;
            objective = sol.objective;
            sol_json["w_index"] = sol.w_index;
            sol_json["v_index"] = sol.v_index;
            if (sol.u_index >= 0) sol_json["u_index"] = sol.u_index;
            if (sol.zeta_index >= 0) sol_json["zeta_index"] = sol.zeta_index;
        }
    }
    sol_json["objective"] = objective;
    auto& wt = sol_json["w_table"] = json::array();
    for (int s = 0; s < w_table.rows(); ++s) {
        json row = json::array();
        for (int a = 0; a < w_table.cols(); ++a) row.push_back(w_table(s, a));
        wt.push_back(row);
    }
    const Policy pi = policy_from_weights(WeightFn{w_table}, inst.mu);
    auto& pt = sol_json["policy"] = json::array();
    for (int s = 0; s < pi.n_states(); ++s) {
        json row = json::array();
        for (int a = 0; a < pi.n_actions(); ++a) row.push_back(pi(s, a));
        pt.push_back(row);
    }
    const std::string path = join_path(cfg.out_dir, inst.name + ".solution.json");
    std::ofstream os(path);
    os << sol_json.dump(2) << '\n';
    out << "solve: wrote " << path << " (objective=" << objective << ")\n";
    return kExitOk;
}

int cmd_eval(const RunConfig& cfg, std::ostream& out) {
    if (cfg.solution_file.empty())
        throw ConfigError("config error at solution: cmd_eval needs a solution file");
    std::ifstream is(cfg.solution_file);
    if (!is) throw DataError("cannot open '" + cfg.solution_file + "'");
    json sol = json::parse(is, nullptr, false);
    if (sol.is_discarded()) throw DataError("solution file is not valid json");
    const Instance inst = instance_from_config(cfg);
    if (!sol.contains("w_table")) throw DataError("solution file lacks w_table");
    Mat w(inst.model.n_states(), inst.model.n_actions());
    try {
        for (int s = 0; s < w.rows(); ++s)
            for (int a = 0; a < w.cols(); ++a) w(s, a) = sol.at("w_table").at(s).at(a).get<double>();
    } catch (const json::exception& e) {
        throw DataError(std::string("solution w_table malformed: ") + e.what());
    }
    const Policy pi = policy_from_weights(WeightFn{w}, inst.mu);
    const double sub = inst.j_star - j_value(inst.model, pi);
    json rec;
    rec["instance"] = inst.name;
    rec["j_star"] = inst.j_star;
    rec["j_policy"] = inst.j_star - sub;
    rec["subopt"] = sub;
    const std::string path = join_path(cfg.out_dir, inst.name + ".eval.json");
    std::filesystem::create_directories(cfg.out_dir);
    std::ofstream os(path);
    os << rec.dump(2) << '\n';
    out << "eval: subopt=" << sub << " (wrote " << path << ")\n";
    return kExitOk;
}

int cmd_exp(const RunConfig& cfg, std::ostream& out) {
    if (cfg.experiment.empty())
        throw ConfigError("config error at experiment: missing block");
    ExperimentReport rep;
    if (cfg.experiment == "prop1") {
        rep = run_prop1(cfg.n, cfg.trials, cfg.seed);
    } else if (cfg.experiment == "prop2") {
        rep = run_prop2_feasible(cfg.n_grid.empty()
                                     ? std::vector<std::size_t>{128, 512, 2048, 8192}
                                     : cfg.n_grid,
                                 cfg.trials, cfg.seed);
    } else if (cfg.experiment == "prop3_large") {
        Prop3Params p;
        p.alpha = cfg.alpha > 0.0 ? cfg.alpha : 0.3;
        p.n_large = cfg.n;
        rep = run_prop3(Prop3Regime::large_alpha, p, cfg.trials, cfg.seed);
    } else if (cfg.experiment == "prop3_small") {
        Prop3Params p;
        p.n_grid = cfg.n_grid;
        if (p.n_grid.empty())
            for (int k = 12; k <= 20; ++k) p.n_grid.push_back(std::size_t{1} << k);
        rep = run_prop3(Prop3Regime::small_alpha, p, cfg.trials, cfg.seed);
    } else if (cfg.experiment == "figure1") {
        rep = run_figure1(cfg.gamma, cfg.alpha > 0.0 ? cfg.alpha : 0.01);
    } else {  // rate
        rep = run_rate(algorithm_from_name(cfg.algorithm), cfg.instance_name,
                       cfg.n_grid.empty() ? std::vector<std::size_t>{128, 512, 2048, 8192}
                                          : cfg.n_grid,
                       cfg.trials, cfg.seed);
    }
    rep.config_echo = config_echo_json(cfg);
    const EmittedPaths paths = emit_report(rep, cfg.out_dir);
    out << "exp: wrote " << paths.csv << " and " << paths.json << "\n";
    for (const auto& [name, ok] : rep.checks)
        out << "  check " << name << ": " << (ok ? "pass" : "FAIL") << "\n";
    if (!all_checks_pass(rep)) {
        out << "exp: assertion failure\n";
        return kExitAssertion;
    }
    return kExitOk;
}

int cmd_selftest(std::ostream& out) {
    return run_selftest(out) ? kExitOk : kExitAssertion;
}

int run_command(const std::string& command, const RunConfig& cfg, std::ostream& out) {
    try {
        if (command == "gen") return cmd_gen(cfg, out);
        if (command == "solve") return cmd_solve(cfg, out);
        if (command == "eval") return cmd_eval(cfg, out);
        if (command == "exp") return cmd_exp(cfg, out);
        if (command == "selftest") return cmd_selftest(out);
        out << "error category=config message=unknown command '" << command << "'\n";
        return kExitConfig;
    } catch (const ConfigError& e) {
        out << "error category=config message=" << e.what() << "\n";
        return kExitConfig;
    } catch (const DataError& e) {
        out << "error category=data message=" << e.what() << "\n";
        return kExitData;
    } catch (const SolverError& e) {
        out << "error category=solver message=" << e.what() << "\n";
        return kExitSolver;
    } catch (const std::exception& e) {
        out << "error category=data message=" << e.what() << "\n";
        return kExitData;
    }
}

}  // namespace coral
