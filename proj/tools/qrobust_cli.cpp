// Copyright 2026 The qrobust Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qrobust_cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <optional>
#include <ostream>

#include "CLI11.hpp"

#include "qrobust/channel.hpp"
#include "qrobust/errors.hpp"
#include "qrobust/global.hpp"
#include "qrobust/kernels.hpp"
#include "qrobust/local.hpp"
#include "qrobust/model_io.hpp"
#include "qrobust/noise.hpp"
#include "qrobust/qasm.hpp"
#include "qrobust/tensor_network.hpp"
#include "qrobust/training.hpp"
#include "qrobust/version.hpp"

namespace qrobust::cli {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct NoiseFlags {
    std::string file;
    bool random = false;
    std::uint64_t seed = 0;
    std::vector<double> p_range{0.001, 0.01};
    double density = 1.0;
    std::vector<std::string> kinds{"bit_flip", "phase_flip", "depolarizing"};
    std::string kind;
    std::optional<double> p;
    std::vector<int> qubits;
};

void add_noise_options(CLI::App* app, NoiseFlags& f) {
    app->add_option("--noise-file", f.file, "Noise sidecar with explicit placements");
    app->add_flag("--random-noise", f.random, "Inject random noise before verification");
    app->add_option("--seed", f.seed, "Seed for random noise injection");
    app->add_option("--p-range", f.p_range, "Noise level range for random injection")->expected(2);
    app->add_option("--density", f.density, "Expected random noise sites per qubit");
    app->add_option("--kinds", f.kinds, "Channel kinds for random injection");
    app->add_option("--noise", f.kind, "Append a channel of this kind to the end of the circuit");
    app->add_option("--p", f.p, "Level of the appended channel");
    app->add_option("--noise-qubits", f.qubits, "Qubits for the appended channel (default: all)");
}

RandomNoiseConfig random_config(const NoiseFlags& f) {
    RandomNoiseConfig cfg;
    cfg.seed = f.seed;
    cfg.p_lo = f.p_range.at(0);
    cfg.p_hi = f.p_range.at(1);
    cfg.site_density = f.density;
    cfg.kinds.clear();
    for (const auto& k : f.kinds) cfg.kinds.push_back(parse_noise_kind(k));
    cfg.validate();
    return cfg;
}

Json sites_to_json(const std::vector<InjectedSite>& sites) {
    Json out = Json::array();
    for (const auto& s : sites)
        out.push_back(Json{{"position", s.position}, {"qubit", s.qubit}, {"kind", to_string(s.kind)}, {"p", s.p}});
    return out;
}

// Noise goes in three stages: sidecar placements, random injection, then
// channels appended after the last instruction.
Circuit apply_noise(const Circuit& base, const NoiseFlags& f, Json& record) {
    Circuit c = base;
    record = Json::object();
    if (!f.file.empty()) {
        c = place_noise(c, noise_placements_from_json(read_json_file(f.file)));
        record["file"] = f.file;
    }
    if (f.random) {
        const RandomNoiseConfig cfg = random_config(f);
        InjectionResult res = inject_random_noise_detailed(c, cfg);
        c = std::move(res.circuit);
        record["random"] = Json{{"seed", cfg.seed},
                                {"p_range", {cfg.p_lo, cfg.p_hi}},
                                {"site_density", cfg.site_density},
                                {"kinds", f.kinds},
                                {"sites", sites_to_json(res.sites)}};
    }
    if (!f.kind.empty()) {
        if (!f.p) throw InputError("--noise needs --p");
        std::vector<int> qubits = f.qubits;
        if (qubits.empty())
            for (int q = 0; q < c.n_qubits(); ++q) qubits.push_back(q);
        const NoiseKind kind = parse_noise_kind(f.kind);
        c = append_noise(c, standard_channel(kind, *f.p), qubits);
        record["appended"] = Json{{"kind", to_string(kind)}, {"p", *f.p}, {"qubits", qubits}};
    } else if (f.p) {
        throw InputError("--p given without --noise");
    }
    record["sites"] = noise_placements_to_json(c);
    return c;
}

Json model_summary(const QmlModel& m) {
    return Json{{"n_qubits", m.n_qubits()},
                {"instructions", m.circuit().size()},
                {"noise_sites", m.circuit().noise_count()},
                {"measured_qubits", m.measurement().measured_qubits()},
                {"labels", m.measurement().labels()}};
}

Json report_header(const std::vector<std::string>& args) {
    return Json{{"tool", "qrobust"}, {"version", kVersion}, {"command", args}};
}

void emit(const Json& doc, const std::string& path, std::ostream& out) {
    const std::string text = doc.dump(2) + "\n";
    if (path.empty()) {
        out << text;
    } else {
        write_text_file_atomic(path, text);
    }
}

std::vector<std::string> label_names(const Measurement& m, const std::vector<std::size_t>& idx) {
    std::vector<std::string> out;
    for (auto i : idx) out.push_back(m.labels().at(i));
    return out;
}

struct ModelFlags {
    std::string model;
    std::string config;
};

void add_model_options(CLI::App* app, ModelFlags& f) {
    app->add_option("--model", f.model, "OpenQASM 2.0 circuit")->required();
    app->add_option("--config", f.config, "Model config sidecar (default: <model>.json when present)");
}

// ---------------------------------------------------------------------------

struct LocalFlags {
    ModelFlags model;
    NoiseFlags noise;
    std::string data;
    double eps = 0.0;
    std::string state_type;
    std::string mode = "accurate";
    std::string out;
    std::string counterexamples;
};

int cmd_verify_local(const LocalFlags& f, const std::vector<std::string>& args, std::ostream& out) {
    const auto t0 = Clock::now();
    const QmlModel base = load_model(f.model.model, f.model.config);
    Json noise;
    const QmlModel model(apply_noise(base.circuit(), f.noise, noise), base.measurement());
    const Dataset ds = load_dataset(f.data);
    const StateKind kind = f.state_type.empty() ? ds.kind : parse_state_kind(f.state_type);
    const auto data = labeled_states(ds, model.measurement(), kind);
    const VerifyMode mode = parse_verify_mode(f.mode);
    const auto t1 = Clock::now();
    const DatasetReport rep = verify_dataset(model, data, f.eps, mode);
    const double verify_s = seconds_since(t1);

    const Measurement& m = model.measurement();
    Json states = Json::array();
    Json per_state = Json::array();
    for (const auto& s : rep.states) {
        states.push_back(Json{{"index", s.index},
                              {"label", m.labels().at(s.label)},
                              {"predicted", m.labels().at(s.predicted)},
                              {"misclassified", s.misclassified},
                              {"rough_status", to_string(s.rough_status)},
                              {"status", to_string(s.verdict.status)},
                              {"margin", s.verdict.margin},
                              {"f_bar_lower", s.verdict.f_bar_lower},
                              {"counterexample", s.verdict.counterexample.has_value()}});
        per_state.push_back(s.seconds);
    }
    const Json dump = counterexamples_to_json(rep, m);
    std::string ce_path = f.counterexamples;
    if (ce_path.empty() && !f.out.empty()) {
        fs::path p = f.out;
        p.replace_extension(".counterexamples.json");
        ce_path = p.string();
    }

    Json doc = report_header(args);
    doc["config"] = Json{{"model", f.model.model},
                         {"config", f.model.config},
                         {"data", f.data},
                         {"eps", f.eps},
                         {"state_type", to_string(kind)},
                         {"mode", to_string(mode)},
                         {"dissimilarity", "1 - F (Uhlmann fidelity)"},
                         {"rough_condition", "conservative bound: gap > 2 sqrt(eps)"},
                         {"noise", noise}};
    doc["model"] = model_summary(model);
    Json results{{"n_states", rep.states.size()},
                 {"robust_count", rep.robust_count()},
                 {"rough_ra", rep.rough_ra},
                 {"accurate_ra", rep.accurate_ra},
                 {"counterexamples", dump.size()},
                 {"states", std::move(states)}};
    if (ce_path.empty()) {
        results["counterexample_dump"] = dump;
    } else {
        results["counterexample_file"] = ce_path;
        write_text_file_atomic(ce_path, dump.dump(2) + "\n");
    }
    doc["results"] = std::move(results);
    doc["timings"] = Json{{"verify_seconds", verify_s}, {"total_seconds", seconds_since(t0)}, {"per_state_seconds", per_state}};
    emit(doc, f.out, out);
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct GlobalFlags {
    ModelFlags model;
    NoiseFlags noise;
    double eps = 0.0;
    double delta = 0.0;
    std::string engine = "auto";
    double tol = 1e-6;
    int max_iter = 2000;
    std::string out;
};

Json kernel_to_json(const AdversarialKernel& k) {
    return Json{{"psi", vector_to_json(k.psi)},
                {"phi", vector_to_json(k.phi)},
                {"lambda_max", k.lambda_max},
                {"lambda_min", k.lambda_min}};
}

Json stats_to_json(const ContractionStats& s) {
    return Json{{"nodes", s.nodes},
                {"steps", s.steps},
                {"peak_elements", s.peak_elements},
                {"flops", s.flops},
                {"matvecs", s.matvecs},
                {"lanczos_restarts", s.lanczos_restarts},
                {"max_residual", s.max_residual}};
}

constexpr double kEngineAgreement = 1e-5;

int cmd_verify_global(const GlobalFlags& f, const std::vector<std::string>& args, std::ostream& out,
                      std::ostream& err) {
    const auto t0 = Clock::now();
    const QmlModel base = load_model(f.model.model, f.model.config);
    Json noise;
    const QmlModel model(apply_noise(base.circuit(), f.noise, noise), base.measurement());
    if (!(f.eps > 0.0) || !(f.delta > 0.0)) throw InputError("--eps and --delta must be positive");

    std::string engine = f.engine;
    if (engine == "auto") engine = model.n_qubits() <= kDenseQubitCap ? "dense" : "tn";
    if (engine != "dense" && engine != "tn" && engine != "both")
        throw InputError("--engine must be dense, tn, both or auto");

    Json engines = Json::object();
    Json timings = Json::object();
    std::optional<LipschitzResult> dense, tn;
    if (engine == "dense" || engine == "both") {
        const auto t = Clock::now();
        dense = lipschitz_dense(model);
        timings["dense_seconds"] = seconds_since(t);
        engines["dense"] = Json{{"k_star", dense->k_star}};
    }
    if (engine == "tn" || engine == "both") {
        const auto t = Clock::now();
        TnOptions opts;
        opts.tol = f.tol;
        opts.max_iter = f.max_iter;
        tn = lipschitz_tn(model, opts);
        timings["tn_seconds"] = seconds_since(t);
        engines["tn"] = Json{{"k_star", tn->k_star}};
        if (tn->stats) engines["tn"]["contraction"] = stats_to_json(*tn->stats);
    }
    const LipschitzResult& k = dense ? *dense : *tn;
    const GlobalVerdict v = global_decision(k, f.eps, f.delta);

    Json doc = report_header(args);
    doc["config"] = Json{{"model", f.model.model},
                         {"config", f.model.config},
                         {"eps", f.eps},
                         {"delta", f.delta},
                         {"engine", engine},
                         {"tol", f.tol},
                         {"max_iter", f.max_iter},
                         {"noise", noise}};
    doc["model"] = model_summary(model);
    Json results{{"k_star", k.k_star},
                 {"verdict", v.robust ? "YES" : "NO"},
                 {"robust", v.robust},
                 {"witness_subset", label_names(model.measurement(), k.witness_subset)},
                 {"kernel", kernel_to_json(k.kernel)},
                 {"engines", engines}};
    bool agree = true;
    if (dense && tn) {
        const double diff = std::abs(dense->k_star - tn->k_star);
        agree = diff <= kEngineAgreement;
        results["engine_difference"] = diff;
        results["engines_agree"] = agree;
    }
    doc["results"] = std::move(results);
    timings["total_seconds"] = seconds_since(t0);
    doc["timings"] = std::move(timings);
    emit(doc, f.out, out);
    if (!agree) {
        err << "qrobust: dense and tensor-network K* differ by more than " << kEngineAgreement << "\n";
        return kExitNumerical;
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct InjectFlags {
    std::string model;
    NoiseFlags noise;
    std::string out;
    std::string noise_out;
};

int cmd_inject(const InjectFlags& f, const std::vector<std::string>& args, std::ostream& out) {
    const QasmProgram prog = parse_qasm_program(read_text_file(f.model));
    const RandomNoiseConfig cfg = random_config(f.noise);
    const InjectionResult res = inject_random_noise_detailed(prog.circuit, cfg);
    std::string noise_out = f.noise_out;
    if (noise_out.empty()) {
        fs::path p = f.out;
        p.replace_extension(".noise.json");
        noise_out = p.string();
    }
    write_text_file_atomic(f.out, serialize_qasm(res.circuit, prog.measured_qubits));
    write_text_file_atomic(noise_out, noise_placements_to_json(res.circuit).dump(2) + "\n");

    Json doc = report_header(args);
    doc["config"] = Json{{"model", f.model},
                         {"seed", cfg.seed},
                         {"p_range", {cfg.p_lo, cfg.p_hi}},
                         {"site_density", cfg.site_density},
                         {"kinds", f.noise.kinds}};
    doc["results"] = Json{{"qasm", f.out}, {"noise_file", noise_out}, {"sites", sites_to_json(res.sites)}};
    out << doc.dump(2) << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct RenderFlags {
    std::string model;
    std::string config;
    std::string noise_file;
    std::string out;
};

int cmd_render(const RenderFlags& f, std::ostream& out) {
    const QasmProgram prog = parse_qasm_program(read_text_file(f.model));
    std::vector<int> measured = prog.measured_qubits;
    if (!f.config.empty())
        measured = measurement_from_json(read_json_file(f.config), prog.circuit.n_qubits(), measured).measured_qubits();
    Circuit c = prog.circuit;
    if (!f.noise_file.empty()) c = place_noise(c, noise_placements_from_json(read_json_file(f.noise_file)));
    const std::string text = render_text(c, measured);
    if (f.out.empty()) {
        out << text;
    } else {
        write_text_file_atomic(f.out, text);
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct TrainFlags {
    ModelFlags model;
    NoiseFlags noise;
    std::string data;
    std::string state_type;
    double eps = 0.0;
    int epochs = 10;
    double lr = 0.05;
    std::size_t batch_size = 0;
    int steps = 5;
    std::string out;
    std::string history;
    std::string out_model;
};

int cmd_train(const TrainFlags& f, const std::vector<std::string>& args, std::ostream& out) {
    const auto t0 = Clock::now();
    const QmlModel base = load_model(f.model.model, f.model.config);
    Json noise;
    const Circuit circuit = apply_noise(base.circuit(), f.noise, noise);
    const ParameterizedModel pm = ParameterizedModel::from_circuit(circuit, base.measurement());
    if (pm.size() == 0) throw InputError("the circuit has no rx, ry or rz gate to train");
    const Dataset ds = load_dataset(f.data);
    const StateKind kind = f.state_type.empty() ? ds.kind : parse_state_kind(f.state_type);
    const auto data = labeled_states(ds, base.measurement(), kind);

    TrainOptions opts;
    opts.eps = f.eps;
    opts.epochs = f.epochs;
    opts.lr = f.lr;
    opts.seed = f.noise.seed;
    opts.batch_size = f.batch_size;
    opts.steps_per_epoch = f.steps;
    const TrainResult res = adversarial_train(pm, data, opts);

    Json params = Json::array();
    for (std::size_t j = 0; j < res.model.size(); ++j)
        params.push_back(Json{{"name", res.model.sites()[j].name},
                              {"instruction", res.model.sites()[j].instruction},
                              {"value", res.model.theta()[j]}});
    Json history = Json::array();
    for (const auto& r : res.history)
        history.push_back(Json{{"epoch", r.epoch},
                               {"loss_before", r.loss_before},
                               {"loss", r.loss},
                               {"rough_ra", r.rough_ra},
                               {"accurate_ra", r.accurate_ra},
                               {"counterexamples_added", r.counterexamples_added}});
    const QmlModel trained = res.model.bind();
    const std::string qasm = serialize_qasm(trained.circuit(), trained.measurement().measured_qubits());

    Json doc = report_header(args);
    doc["config"] = Json{{"model", f.model.model},
                         {"config", f.model.config},
                         {"data", f.data},
                         {"state_type", to_string(kind)},
                         {"eps", f.eps},
                         {"epochs", f.epochs},
                         {"lr", f.lr},
                         {"seed", f.noise.seed},
                         {"batch_size", f.batch_size},
                         {"steps_per_epoch", f.steps},
                         {"noise", noise}};
    doc["parameters"] = std::move(params);
    doc["history"] = std::move(history);
    doc["qasm"] = qasm;
    doc["timings"] = Json{{"total_seconds", seconds_since(t0)}};

    write_text_file_atomic(f.history, history_csv(res.history));
    if (!f.out_model.empty()) write_text_file_atomic(f.out_model, qasm);
    emit(doc, f.out, out);
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Robustness verification for quantum classifiers"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    LocalFlags lf;
    auto* vl = app.add_subcommand("verify-local", "Local robustness of a labelled dataset");
    add_model_options(vl, lf.model);
    add_noise_options(vl, lf.noise);
    vl->add_option("--data", lf.data, "Dataset JSON")->required();
    vl->add_option("--eps", lf.eps, "Neighbourhood radius in 1 - fidelity")->required();
    vl->add_option("--state-type", lf.state_type, "pure or mixed (default: the dataset's kind)");
    vl->add_option("--mode", lf.mode, "rough or accurate");
    vl->add_option("--out", lf.out, "Report path (default: stdout)");
    vl->add_option("--counterexamples", lf.counterexamples, "Counterexample dump path");

    GlobalFlags gf;
    auto* vg = app.add_subcommand("verify-global", "Global (eps, delta)-robustness via the Lipschitz constant");
    add_model_options(vg, gf.model);
    add_noise_options(vg, gf.noise);
    vg->add_option("--eps", gf.eps, "Input trace-distance bound")->required();
    vg->add_option("--delta", gf.delta, "Output total-variation bound")->required();
    vg->add_option("--engine", gf.engine, "dense, tn, both or auto");
    vg->add_option("--tol", gf.tol, "Lanczos tolerance for the tn engine");
    vg->add_option("--max-iter", gf.max_iter, "Lanczos operator applications per eigenproblem");
    vg->add_option("--out", gf.out, "Report path (default: stdout)");

    InjectFlags inf;
    auto* inj = app.add_subcommand("inject", "Insert random noise into a circuit");
    inj->add_option("--model", inf.model, "OpenQASM 2.0 circuit")->required();
    inj->add_option("--seed", inf.noise.seed, "Injection seed");
    inj->add_option("--p-range", inf.noise.p_range, "Noise level range")->expected(2);
    inj->add_option("--density", inf.noise.density, "Expected noise sites per qubit");
    inj->add_option("--kinds", inf.noise.kinds, "Channel kinds to draw from");
    inj->add_option("--out", inf.out, "Noisy circuit (.qasm, gates only)")->required();
    inj->add_option("--noise-out", inf.noise_out, "Noise sidecar (default: <out> with extension .noise.json)");

    RenderFlags rf;
    auto* ren = app.add_subcommand("render", "Text diagram of a circuit");
    ren->add_option("--model", rf.model, "OpenQASM 2.0 circuit")->required();
    ren->add_option("--config", rf.config, "Model config sidecar for the measured qubits");
    ren->add_option("--noise-file", rf.noise_file, "Noise sidecar with explicit placements");
    ren->add_option("--out", rf.out, "Output path (default: stdout)");

    TrainFlags tf;
    auto* tr = app.add_subcommand("train", "Adversarial retraining on verification counterexamples");
    add_model_options(tr, tf.model);
    add_noise_options(tr, tf.noise);
    tr->add_option("--data", tf.data, "Dataset JSON")->required();
    tr->add_option("--state-type", tf.state_type, "pure or mixed (default: the dataset's kind)");
    tr->add_option("--eps", tf.eps, "Neighbourhood radius in 1 - fidelity")->required();
    tr->add_option("--epochs", tf.epochs, "Maximum number of epochs");
    tr->add_option("--lr", tf.lr, "Initial step size of the line search");
    tr->add_option("--batch-size", tf.batch_size, "Minibatch size (0: full batch)");
    tr->add_option("--steps", tf.steps, "Gradient steps per epoch");
    tr->add_option("--out", tf.out, "Parameters and history JSON (default: stdout)");
    tr->add_option("--history", tf.history, "Training history CSV")->required();
    tr->add_option("--out-model", tf.out_model, "Trained circuit as OpenQASM");

    std::vector<std::string> argv_store{"qrobust"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_store) argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        kernels::configure_threads_from_env();
        if (*vl) return cmd_verify_local(lf, args, out);
        if (*vg) return cmd_verify_global(gf, args, out, err);
        if (*inj) return cmd_inject(inf, args, out);
        if (*ren) return cmd_render(rf, out);
        if (*tr) return cmd_train(tf, args, out);
    } catch (const QasmError& e) {
        err << "qrobust: parse error at line " << e.line() << ", column " << e.column() << ": " << e.what() << "\n";
        return kExitInput;
    } catch (const InputError& e) {
        err << "qrobust: " << e.what() << "\n";
        return kExitInput;
    } catch (const ConvergenceError& e) {
        err << "qrobust: no convergence: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        err << "qrobust: error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitFailure;
}

}  // namespace qrobust::cli
