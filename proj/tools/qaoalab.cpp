// Copyright 2026 The qaoalab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// qaoalab command line: graph generation, simulation, optimization, annealing, TTS analysis,
// shot-noise runs and experiment plans.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "qaoalab/annealer.hpp"
#include "qaoalab/error.hpp"
#include "qaoalab/harness.hpp"

using namespace qaoalab;
namespace fs = std::filesystem;

namespace {

struct Globals {
    std::uint64_t seed = 0;
    int workers = 1;
    std::string out;
};

// Writes to --out when given, stdout otherwise.
void emit(const Globals& g, const std::string& text) {
    if (g.out.empty() || g.out == "-") {
        std::cout << text;
        return;
    }
    write_file_atomic(g.out, text);
}

std::string num(double x) {
    std::ostringstream os;
    os.precision(12);
    os << x;
    return os.str();
}

QaoaParams load_params(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path);
    try {
        const Json j = Json::parse(in);
        if (j.contains("u")) return fourier_to_direct(j.get<FourierParams>());
        QaoaParams p = j.get<QaoaParams>();
        p.validate();
        return p;
    } catch (const Json::exception& e) {
        throw FormatError("invalid parameter file " + path + ": " + e.what());
    }
}

int parse_q(const std::string& text) {
    if (text == "inf" || text == "∞") return 0;
    try {
        const int q = std::stoi(text);
        if (q < 1) throw ParameterError("q must be >= 1 or inf");
        return q;
    } catch (const std::logic_error&) {
        throw ParameterError("q must be an integer or inf, got '" + text + "'");
    }
}

std::vector<fs::path> record_files(const fs::path& dir) {
    fs::path base = fs::is_directory(dir / "records") ? dir / "records" : dir;
    if (!fs::is_directory(base)) throw FormatError("not a directory: " + dir.string());
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(base))
        if (e.path().extension() == ".json") out.push_back(e.path());
    std::sort(out.begin(), out.end());
    return out;
}

// minimal CSV reader for the fit command
std::vector<std::map<std::string, std::string>> read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw FormatError("empty CSV input");
    std::vector<std::string> header;
    std::stringstream hs(line);
    for (std::string cell; std::getline(hs, cell, ',');) header.push_back(cell);
    std::vector<std::map<std::string, std::string>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::map<std::string, std::string> row;
        std::size_t c = 0;
        for (std::string cell; std::getline(ss, cell, ',') && c < header.size(); ++c) row[header[c]] = cell;
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"QAOA and quantum annealing for MaxCut"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--seed", g.seed, "Base random seed")->capture_default_str();
    app.add_option("--workers", g.workers, "Parallel workers")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--out", g.out, "Output file or directory");

    // gen-graph
    auto* gen = app.add_subcommand("gen-graph", "Random d-regular graph as an edge list");
    int gen_n = 10, gen_d = 3;
    bool gen_weighted = false;
    gen->add_option("--n", gen_n, "Vertices")->required();
    gen->add_option("--d", gen_d, "Degree")->capture_default_str();
    gen->add_flag("--weighted", gen_weighted, "Uniform [0,1) edge weights");

    // simulate
    auto* sim = app.add_subcommand("simulate", "Evaluate F_p, r and p_gs at given angles");
    std::string sim_graph, sim_params, sim_dump;
    bool sim_parity = false;
    sim->add_option("--graph", sim_graph)->required()->check(CLI::ExistingFile);
    sim->add_option("--params", sim_params, "JSON with gammas/betas or u/v")->required()->check(CLI::ExistingFile);
    sim->add_option("--dump-state", sim_dump, "Write the final state to this file");
    sim->add_flag("--parity", sim_parity, "Use the parity-reduced basis");

    // optimize
    auto* opt = app.add_subcommand("optimize", "Optimize QAOA angles level by level");
    std::string opt_graph, opt_strategy = "fourier", opt_q = "inf", opt_config, opt_method;
    int opt_R = 0, opt_pmax = 10, opt_ri_seeds = 1;
    double opt_alpha = 0.6;
    bool opt_parity = false;
    opt->add_option("--graph", opt_graph)->required()->check(CLI::ExistingFile);
    opt->add_option("--config", opt_config, "JSON strategy config; flags override")->check(CLI::ExistingFile);
    opt->add_option("--strategy", opt_strategy, "fourier, interp or ri")->capture_default_str();
    opt->add_option("--q", opt_q, "Fourier components kept, or inf")->capture_default_str();
    opt->add_option("--R", opt_R, "Perturbed restarts per level")->capture_default_str();
    opt->add_option("--alpha", opt_alpha, "Perturbation strength")->capture_default_str();
    opt->add_option("--p-max", opt_pmax, "Highest level")->capture_default_str();
    opt->add_option("--ri-seeds", opt_ri_seeds, "Random starts per level for ri")->capture_default_str();
    opt->add_option("--method", opt_method, "bfgs or nelder-mead");
    opt->add_flag("--parity", opt_parity, "Use the parity-reduced basis");

    // anneal
    auto* ann = app.add_subcommand("anneal", "Quantum annealing along a schedule");
    std::string ann_graph, ann_schedule = "linear";
    double ann_T = 10.0;
    bool ann_pops = false;
    int ann_k = 4, ann_samples = 101;
    ann->add_option("--graph", ann_graph)->required()->check(CLI::ExistingFile);
    ann->add_option("--T", ann_T, "Total time (linear schedule)")->capture_default_str();
    ann->add_option("--schedule", ann_schedule, "linear or a file of 't f' lines")->capture_default_str();
    ann->add_flag("--populations", ann_pops, "Emit instantaneous level populations as CSV");
    ann->add_option("--k", ann_k, "Levels tracked")->capture_default_str();
    ann->add_option("--samples", ann_samples, "Population sample times")->capture_default_str();

    // tts
    auto* tts_cmd = app.add_subcommand("tts", "Time-to-solution table from stored records");
    std::string tts_records, tts_kind = "qaoa";
    double tts_pd = kTargetProbability;
    tts_cmd->add_option("--records", tts_records, "Plan or records directory")->required();
    tts_cmd->add_option("--kind", tts_kind, "qa or qaoa")->capture_default_str();
    tts_cmd->add_option("--pd", tts_pd, "Target success probability")->capture_default_str();

    // fit
    auto* fit_cmd = app.add_subcommand("fit", "Fit 1 - r versus p");
    std::string fit_model = "exp", fit_input, fit_x = "p", fit_y = "mean_one_minus_r", fit_kind;
    fit_cmd->add_option("--model", fit_model, "exp or stretched")->capture_default_str();
    fit_cmd->add_option("--input", fit_input, "CSV file (stdin when omitted)");
    fit_cmd->add_option("--x", fit_x, "Column holding p")->capture_default_str();
    fit_cmd->add_option("--y", fit_y, "Column holding 1 - r")->capture_default_str();
    fit_cmd->add_option("--kind", fit_kind, "Keep only rows with this kind column");

    // noise-sim
    auto* noise = app.add_subcommand("noise-sim", "FOURIER optimization under measurement noise");
    std::string noise_graph, noise_init = "educated";
    int noise_level = 1, noise_seeds = 1, noise_pmax = 6;
    NoiseConfig noise_cfg;
    noise->add_option("--graph", noise_graph)->required()->check(CLI::ExistingFile);
    noise->add_option("--start-level", noise_level, "1 or 5")->capture_default_str();
    noise->add_option("--init", noise_init, "educated or random")->capture_default_str();
    noise->add_option("--eps", noise_cfg.epsilon)->capture_default_str();
    noise->add_option("--xi", noise_cfg.xi)->capture_default_str();
    noise->add_option("--delta", noise_cfg.delta)->capture_default_str();
    noise->add_option("--seeds", noise_seeds, "Independent repetitions")->capture_default_str();
    noise->add_option("--p-max", noise_pmax)->capture_default_str();

    // bandwidth
    auto* bw = app.add_subcommand("bandwidth", "Bandwidth before and after Cuthill-McKee renumbering");
    std::string bw_graph;
    bw->add_option("--graph", bw_graph)->required()->check(CLI::ExistingFile);

    // run-plan
    auto* plan_cmd = app.add_subcommand("run-plan", "Run an experiment plan, reusing stored records");
    std::string plan_file, plan_recipe;
    plan_cmd->add_option("--plan", plan_file, "Plan JSON")->check(CLI::ExistingFile);
    plan_cmd->add_option("--recipe", plan_recipe, "Run a recipe with its defaults");

    // verify
    auto* ver = app.add_subcommand("verify", "Re-check stored records and ledgers");
    std::string ver_dir;
    ver->add_option("--dir", ver_dir, "Plan directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            Graph graph = generate_random_regular(gen_n, gen_d, g.seed);
            if (gen_weighted) graph = assign_random_weights(graph, derive_seed(g.seed, 1));
            emit(g, graph_text(graph));
        } else if (*sim) {
            const Graph graph = load_graph(sim_graph);
            QaoaProblem problem(graph, sim_parity ? Basis::ParityPositive : Basis::Full);
            const QaoaParams params = load_params(sim_params);
            const double f = problem.value(params);
            const Json out{{"p", params.p()},
                           {"f", f},
                           {"r", f / problem.c_max()},
                           {"p_gs", problem.ground_state_population(params)},
                           {"c_max", problem.c_max()},
                           {"basis", to_string(problem.basis())}};
            if (!sim_dump.empty()) write_state(sim_dump, problem.state(params));
            emit(g, out.dump(2) + "\n");
        } else if (*opt) {
            StrategyConfig config;
            if (!opt_config.empty()) {
                std::ifstream in(opt_config);
                config = Json::parse(in).get<StrategyConfig>();
            }
            if (!opt_config.empty() && opt->count("--strategy") == 0) {
                // keep the file's strategy
            } else {
                config.strategy = strategy_from_string(opt_strategy);
            }
            if (opt_config.empty() || opt->count("--q")) config.q = parse_q(opt_q);
            if (opt_config.empty() || opt->count("--R")) config.R = opt_R;
            if (opt_config.empty() || opt->count("--alpha")) config.alpha = opt_alpha;
            if (opt_config.empty() || opt->count("--p-max")) config.p_max = opt_pmax;
            if (opt_config.empty() || opt->count("--ri-seeds")) config.ri_seeds = opt_ri_seeds;
            if (opt_config.empty() || app.count("--seed")) config.seed = g.seed;
            if (!opt_method.empty()) config.local.method = local_method_from_string(opt_method);
            config.validate();
            QaoaProblem problem(load_graph(opt_graph), opt_parity ? Basis::ParityPositive : Basis::Full);
            const auto levels = run_strategy(problem, config);
            const Json out{{"graph_sha256", sha256_file(opt_graph)},
                           {"c_max", problem.c_max()},
                           {"config", config},
                           {"levels", levels}};
            emit(g, out.dump(2) + "\n");
        } else if (*ann) {
            const Graph graph = load_graph(ann_graph);
            const DiagonalCost cost = parity_reduce(build_diagonal_cost(graph));
            const AnnealSchedule schedule = ann_schedule == "linear" ? linear_ramp(ann_T) : load_schedule(ann_schedule);
            if (ann_pops) {
                if (ann_samples < 2) throw ParameterError("--samples must be >= 2");
                std::vector<double> times;
                for (int i = 0; i < ann_samples; ++i) times.push_back(schedule.total_time * i / (ann_samples - 1));
                const auto rows = instantaneous_populations(cost, schedule, times, ann_k);
                std::ostringstream csv;
                csv << "t";
                for (int l = 0; l < ann_k; ++l) csv << ",pop_" << l;
                csv << '\n';
                for (std::size_t i = 0; i < times.size(); ++i) {
                    csv << num(times[i]);
                    for (double x : rows[i]) csv << ',' << num(x);
                    csv << '\n';
                }
                emit(g, csv.str());
            } else {
                const StateVector final_state = evolve(cost, schedule);
                const CutResult maxcut = brute_force_maxcut(graph);
                const double p_gs = ground_state_population(final_state, maxcut);
                const Json out{{"T", schedule.total_time},
                               {"p_gs", p_gs},
                               {"tts", tts(schedule.total_time, p_gs)},
                               {"schedule_clamped", schedule.clamped}};
                emit(g, out.dump(2) + "\n");
            }
        } else if (*tts_cmd) {
            const TtsKind kind = tts_kind_from_string(tts_kind);
            std::ostringstream csv;
            csv << "graph_sha256,control,run_time,p_gs,tts\n";
            for (const auto& path : record_files(tts_records)) {
                std::ifstream in(path);
                const Json rec = Json::parse(in);
                const std::string module = rec.value("module", "");
                const std::string sha = rec.at("instance").at("graph_sha256");
                std::vector<TtsRecord> rows;
                if (kind == TtsKind::QA && module == "qa") {
                    for (const auto& r : rec.at("outputs").at("scan").get<std::vector<TtsRecord>>())
                        rows.push_back(qa_record(r.run_time, r.p_gs, tts_pd));
                } else if (kind == TtsKind::QAOA && module == "qaoa") {
                    for (const auto& lr : rec.at("outputs").at("levels").get<std::vector<LevelResult>>())
                        if (lr.chain == ChainTag::B && lr.converged) rows.push_back(qaoa_record(lr, tts_pd));
                }
                for (const auto& r : rows)
                    csv << sha << ',' << num(r.control) << ',' << num(r.run_time) << ',' << num(r.p_gs) << ','
                        << num(r.tts) << '\n';
            }
            emit(g, csv.str());
        } else if (*fit_cmd) {
            std::vector<std::map<std::string, std::string>> rows;
            if (fit_input.empty()) {
                rows = read_csv(std::cin);
            } else {
                std::ifstream in(fit_input);
                if (!in) throw FormatError("cannot open " + fit_input);
                rows = read_csv(in);
            }
            std::vector<std::pair<double, double>> points;
            for (const auto& row : rows) {
                if (!fit_kind.empty() && (!row.count("kind") || row.at("kind") != fit_kind)) continue;
                if (!row.count(fit_x) || !row.count(fit_y)) throw FormatError("missing column " + fit_x + " or " + fit_y);
                points.emplace_back(std::stod(row.at(fit_x)), std::stod(row.at(fit_y)));
            }
            const ScalingFit fit = fit_scaling(points, scaling_model_from_string(fit_model));
            const Json out{{"model", to_string(fit.model)},
                           {"p0", std::isfinite(fit.p0) ? Json(fit.p0) : Json(nullptr)},
                           {"prefactor", fit.prefactor},
                           {"residual", fit.residual},
                           {"n_used", fit.n_used},
                           {"n_dropped", fit.n_dropped}};
            emit(g, out.dump(2) + "\n");
        } else if (*noise) {
            const fs::path dir = g.out.empty() ? fs::path("noise-sim") : fs::path(g.out);
            fs::create_directories(dir);
            QaoaProblem problem(load_graph(noise_graph), Basis::ParityPositive);
            std::ostringstream summary;
            summary << "seed,measurements,measurements_to_maxcut,final_f_bar,final_r,best_cut\n";
            for (int s = 0; s < noise_seeds; ++s) {
                NoiseConfig cfg = noise_cfg;
                cfg.seed = derive_seed(g.seed, s);
                const auto exp =
                    run_noisy_experiment(problem, noise_level, noisy_init_from_string(noise_init), cfg, noise_pmax);
                std::ostringstream ledger;
                exp.ledger.write_csv(ledger);
                write_file_atomic(dir / ("ledger_" + std::to_string(s) + ".csv"), ledger.str());
                const auto& last = exp.levels.back();
                summary << s << ',' << exp.ledger.size() << ',' << exp.ledger.first_hit(problem.c_max()) << ','
                        << num(last.f_bar) << ',' << num(last.level.r) << ',' << num(exp.ledger.best_cut()) << '\n';
            }
            write_file_atomic(dir / "summary.csv", summary.str());
            std::cout << summary.str();
        } else if (*bw) {
            const Graph graph = load_graph(bw_graph);
            const Graph renumbered = renumber(graph, cuthill_mckee(graph));
            std::cout << "bandwidth " << bandwidth(graph) << " -> " << bandwidth(renumbered) << '\n';
            if (!g.out.empty()) write_file_atomic(g.out, graph_text(renumbered));
        } else if (*plan_cmd) {
            if (plan_file.empty() == plan_recipe.empty()) throw ParameterError("give exactly one of --plan or --recipe");
            ExperimentPlan plan = plan_file.empty() ? default_plan(plan_recipe) : load_plan(plan_file);
            if (app.count("--seed")) plan.ensemble.seed = g.seed;
            const fs::path dir = g.out.empty() ? default_output_dir() / plan.recipe : fs::path(g.out);
            RunOptions options;
            options.workers = g.workers;
            options.log = [](const std::string& msg) { std::cerr << msg << '\n'; };
            const PlanSummary s = run_plan(plan, dir, options);
            std::cout << "computed " << s.computed << ", reused " << s.reused << ", failures " << s.failures.size()
                      << '\n';
            for (const auto& o : s.outputs) std::cout << (dir / o).string() << '\n';
            for (const auto& f : s.failures) std::cerr << "failed: " << f << '\n';
            return s.failures.empty() ? 0 : 1;
        } else if (*ver) {
            const VerifyReport report = verify_records(ver_dir);
            for (const auto& issue : report.issues) std::cout << issue << '\n';
            std::cout << report.records << " records, " << report.issues.size() << " issues\n";
            return report.clean() ? 0 : 1;
        }
    } catch (const CapacityError& e) {
        std::cerr << "capacity: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
