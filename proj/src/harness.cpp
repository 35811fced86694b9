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

#include "qaoalab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "qaoalab/annealer.hpp"
#include "qaoalab/error.hpp"

namespace qaoalab {

namespace fs = std::filesystem;

std::vector<std::string> recipe_names() { return {"fig2", "fig3b", "fig4", "fig5", "fig6", "fig7", "fig8a"}; }

ExperimentPlan default_plan(const std::string& recipe) {
    ExperimentPlan plan;
    plan.recipe = recipe;
    plan.strategy.strategy = Strategy::Fourier;
    if (recipe == "fig2") {
        plan.ensemble = {{10}, {"u3R"}, 10, 1};
        plan.strategy.p_max = 6;
    } else if (recipe == "fig3b") {
        plan.ensemble = {{10}, {"w3R"}, 20, 1};
        plan.strategy.R = 10;
        plan.strategy.p_max = 6;
    } else if (recipe == "fig4") {
        plan.ensemble = {{12}, {"u3R", "w3R"}, 20, 1};
        plan.strategy.R = 10;
        plan.strategy.p_max = 12;
    } else if (recipe == "fig5") {
        plan.ensemble = {{10}, {"w3R"}, 50, 1};
        plan.strategy.R = 10;
        plan.strategy.p_max = 20;
    } else if (recipe == "fig6") {
        plan.ensemble = {{10}, {"w3R"}, 20, 1};
        plan.strategy.R = 10;
        plan.strategy.p_max = 20;
        plan.t_grid = {1.0, 1000.0, 25};
    } else if (recipe == "fig7") {
        plan.ensemble = {{10}, {"w3R"}, 1, 1};
    } else if (recipe == "fig8a") {
        plan.ensemble = {{10}, {"w3R"}, 1, 1};
    } else {
        throw ParameterError("unknown recipe '" + recipe + "'");
    }
    return plan;
}

void ExperimentPlan::validate() const {
    const auto names = recipe_names();
    if (std::find(names.begin(), names.end(), recipe) == names.end())
        throw ParameterError("unknown recipe '" + recipe + "'");
    if (ensemble.count < 0) throw ParameterError("ensemble count must be >= 0");
    for (int n : ensemble.n) {
        if (n < 2) throw ParameterError("ensemble sizes must be >= 2");
        if (n > kStatevectorCap)
            throw CapacityError("N = " + std::to_string(n) + " exceeds the statevector cap of " +
                                std::to_string(kStatevectorCap));
        if (n > kSpectrumCapParity && (recipe == "fig5" || recipe == "fig6" || recipe == "fig8a"))
            throw CapacityError("spectral recipes support N <= " + std::to_string(kSpectrumCapParity));
    }
    for (const auto& kind : ensemble.kinds)
        if (kind != "u3R" && kind != "w3R" && kind != "ring") throw ParameterError("unknown ensemble kind '" + kind + "'");
    strategy.validate();
    noise.config.validate();
    if (noise.seeds < 0 || noise.p_max < 1) throw ParameterError("noise seeds >= 0 and p_max >= 1 required");
    for (const auto& mode : noise.modes) {
        if (mode.start_level != 1 && mode.start_level != 5) throw ParameterError("noise start level must be 1 or 5");
        if (mode.init == NoisyInit::Random && mode.start_level != 1)
            throw ParameterError("random noise starts exist at level 1 only");
        if (noise.p_max < mode.start_level) throw ParameterError("noise p_max below a start level");
    }
    if (!(t_grid.lo > 0.0 && t_grid.hi >= t_grid.lo) || t_grid.points < 1) throw ParameterError("invalid time grid");
    if (!(gap_resolution > 0.0 && gap_resolution < 0.5)) throw ParameterError("gap resolution must be in (0, 0.5)");
    if (rtm_cap < 1) throw ParameterError("runs-to-match cap must be >= 1");
    if (!(populations.total_time > 0.0) || populations.samples < 2 || populations.k < 1)
        throw ParameterError("invalid population plan");
}

Json plan_to_json(const ExperimentPlan& plan) {
    Json modes = Json::array();
    for (const auto& m : plan.noise.modes) modes.push_back({{"start_level", m.start_level}, {"init", to_string(m.init)}});
    return Json{{"recipe", plan.recipe},
                {"ensemble",
                 {{"n", plan.ensemble.n},
                  {"kinds", plan.ensemble.kinds},
                  {"count", plan.ensemble.count},
                  {"seed", plan.ensemble.seed}}},
                {"strategy", plan.strategy},
                {"t_grid", {{"lo", plan.t_grid.lo}, {"hi", plan.t_grid.hi}, {"points", plan.t_grid.points}}},
                {"gap_resolution", plan.gap_resolution},
                {"rtm_cap", plan.rtm_cap},
                {"rtm_tol", plan.rtm_tol},
                {"noise",
                 {{"config", plan.noise.config},
                  {"modes", modes},
                  {"seeds", plan.noise.seeds},
                  {"p_max", plan.noise.p_max},
                  {"qa_times", plan.noise.qa_times},
                  {"qa_shots", plan.noise.qa_shots}}},
                {"populations",
                 {{"total_time", plan.populations.total_time},
                  {"samples", plan.populations.samples},
                  {"k", plan.populations.k}}}};
}

namespace {

template <class T>
void read_if(const Json& j, const char* key, T& out) {
    if (auto it = j.find(key); it != j.end()) it->get_to(out);
}

}  // namespace

ExperimentPlan plan_from_json(const Json& j) {
    try {
        ExperimentPlan plan = default_plan(j.at("recipe").get<std::string>());
        if (auto e = j.find("ensemble"); e != j.end()) {
            read_if(*e, "n", plan.ensemble.n);
            read_if(*e, "kinds", plan.ensemble.kinds);
            if (auto k = e->find("kind"); k != e->end()) plan.ensemble.kinds = {k->get<std::string>()};
            read_if(*e, "count", plan.ensemble.count);
            read_if(*e, "seed", plan.ensemble.seed);
        }
        if (auto s = j.find("strategy"); s != j.end()) from_json(*s, plan.strategy);
        if (auto t = j.find("t_grid"); t != j.end()) {
            read_if(*t, "lo", plan.t_grid.lo);
            read_if(*t, "hi", plan.t_grid.hi);
            read_if(*t, "points", plan.t_grid.points);
        }
        read_if(j, "gap_resolution", plan.gap_resolution);
        read_if(j, "rtm_cap", plan.rtm_cap);
        read_if(j, "rtm_tol", plan.rtm_tol);
        if (auto nz = j.find("noise"); nz != j.end()) {
            if (auto c = nz->find("config"); c != nz->end()) from_json(*c, plan.noise.config);
            if (auto m = nz->find("modes"); m != nz->end()) {
                plan.noise.modes.clear();
                for (const auto& mode : *m)
                    plan.noise.modes.push_back(
                        {mode.at("start_level").get<int>(), noisy_init_from_string(mode.at("init").get<std::string>())});
            }
            read_if(*nz, "seeds", plan.noise.seeds);
            read_if(*nz, "p_max", plan.noise.p_max);
            read_if(*nz, "qa_times", plan.noise.qa_times);
            read_if(*nz, "qa_shots", plan.noise.qa_shots);
        }
        if (auto p = j.find("populations"); p != j.end()) {
            read_if(*p, "total_time", plan.populations.total_time);
            read_if(*p, "samples", plan.populations.samples);
            read_if(*p, "k", plan.populations.k);
        }
        plan.validate();
        return plan;
    } catch (const Json::exception& e) {
        throw FormatError(std::string("invalid plan: ") + e.what());
    }
}

ExperimentPlan load_plan(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open plan " + path.string());
    try {
        return plan_from_json(Json::parse(in));
    } catch (const Json::parse_error& e) {
        throw FormatError(std::string("plan is not valid JSON: ") + e.what());
    }
}

fs::path default_output_dir() {
    if (const char* env = std::getenv("QAOALAB_CACHE_DIR"); env && *env) return env;
    return "qaoalab-runs";
}

void write_file_atomic(const fs::path& path, const std::string& contents) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ostringstream suffix;
    suffix << ".tmp." << std::this_thread::get_id();
    const fs::path tmp = path.string() + suffix.str();
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw FormatError("cannot write " + tmp.string());
        out << contents;
        if (!out.flush()) throw FormatError("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

Graph make_instance(const std::string& kind, int n, int index, std::uint64_t seed) {
    const std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(n) * 1000003ULL + index);
    if (kind == "u3R") return generate_random_regular(n, 3, s);
    if (kind == "w3R") return assign_random_weights(generate_random_regular(n, 3, s), derive_seed(s, 1));
    if (kind == "ring") return make_ring(n);
    throw ParameterError("unknown instance kind '" + kind + "'");
}

namespace {

struct Instance {
    std::string kind;
    int n = 0;
    int index = 0;
    Graph graph;
    std::string sha;
    CutResult maxcut;
};

std::string format_number(double x) {
    if (!std::isfinite(x)) return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os.precision(12);
    os << x;
    return os.str();
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buffer[32];
    std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buffer;
}

void parallel_for(int count, int workers, const std::function<void(int)>& body) {
    const int threads = std::max(1, std::min(workers, count));
    if (threads == 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (int i = next++; i < count; i = next++) body(i);
        });
}

Json record_key(const std::string& module, const std::string& graph_sha, const Json& config) {
    return Json{{"module", module}, {"graph_sha256", graph_sha}, {"config", config}};
}

// Content-addressed record directory shared by all stages of a plan.
class RecordStore {
public:
    RecordStore(fs::path dir, std::function<void(const std::string&)> log) : dir_(std::move(dir)), log_(std::move(log)) {
        fs::create_directories(dir_ / "records");
        fs::create_directories(dir_ / "graphs");
        fs::create_directories(dir_ / "ledgers");
    }

    const fs::path& dir() const { return dir_; }

    void add_graph(const Instance& inst) {
        const fs::path path = dir_ / "graphs" / (inst.sha + ".txt");
        std::lock_guard lock(mutex_);
        if (!fs::exists(path)) write_file_atomic(path, graph_text(inst.graph));
    }

    /// Outputs of the record, computing and persisting them when absent. nullopt on failure.
    std::optional<Json> run(const std::string& module, const Instance& inst, const Json& config,
                            const std::function<Json(const std::string& id)>& compute) {
        const std::string id = json_hash(record_key(module, inst.sha, config));
        const fs::path path = dir_ / "records" / (id + ".json");
        if (fs::exists(path)) {
            try {
                std::ifstream in(path);
                Json stored = Json::parse(in);
                if (stored.at("id") == id) {
                    ++reused_;
                    remember(id);
                    return stored.at("outputs");
                }
            } catch (const std::exception&) {
                // unreadable record: recompute below
            }
        }
        const auto start = std::chrono::steady_clock::now();
        try {
            Json outputs = compute(id);
            const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            Json seeds = Json::object();
            if (config.contains("seed")) seeds["seed"] = config.at("seed");
            if (config.contains("strategy")) seeds["strategy_seed"] = config.at("strategy").at("seed");
            if (config.contains("noise")) seeds["noise_seed"] = config.at("noise").at("seed");
            Json record{{"schema_version", kRecordSchemaVersion},
                        {"id", id},
                        {"module", module},
                        {"instance",
                         {{"graph_file", "graphs/" + inst.sha + ".txt"},
                          {"graph_sha256", inst.sha},
                          {"kind", inst.kind},
                          {"n", inst.n},
                          {"index", inst.index}}},
                        {"config", config},
                        {"seeds", seeds},
                        {"outputs", outputs},
                        {"wall_time_s", wall},
                        {"timestamp", utc_timestamp()}};
            write_file_atomic(path, record.dump(1) + "\n");
            ++computed_;
            remember(id);
            if (log_) log_(module + " " + inst.kind + " n=" + std::to_string(inst.n) + " #" +
                           std::to_string(inst.index) + " done in " + format_number(wall) + " s");
            return outputs;
        } catch (const std::exception& e) {
            std::lock_guard lock(mutex_);
            failures_.push_back(module + " " + inst.kind + " n=" + std::to_string(inst.n) + " #" +
                                std::to_string(inst.index) + ": " + e.what());
            return std::nullopt;
        }
    }

    int computed() const { return computed_; }
    int reused() const { return reused_; }
    std::vector<std::string> failures() const {
        std::lock_guard lock(mutex_);
        auto out = failures_;
        std::sort(out.begin(), out.end());
        return out;
    }
    std::vector<std::string> ids() const {
        std::lock_guard lock(mutex_);
        std::vector<std::string> out(ids_.begin(), ids_.end());
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

private:
    void remember(const std::string& id) {
        std::lock_guard lock(mutex_);
        ids_.push_back(id);
    }

    fs::path dir_;
    std::function<void(const std::string&)> log_;
    mutable std::mutex mutex_;
    std::atomic<int> computed_{0}, reused_{0};
    std::vector<std::string> failures_;
    std::vector<std::string> ids_;
};

std::vector<Instance> build_ensemble(const ExperimentPlan& plan) {
    std::vector<Instance> out;
    for (const auto& kind : plan.ensemble.kinds)
        for (int n : plan.ensemble.n) {
            const int count = kind == "ring" ? std::min(plan.ensemble.count, 1) : plan.ensemble.count;
            for (int j = 0; j < count; ++j) {
                Instance inst;
                inst.kind = kind;
                inst.n = n;
                inst.index = j;
                inst.graph = make_instance(kind, n, j, plan.ensemble.seed);
                inst.sha = sha256_hex(graph_text(inst.graph));
                inst.maxcut = brute_force_maxcut(inst.graph);
                out.push_back(std::move(inst));
            }
        }
    return out;
}

class Csv {
public:
    explicit Csv(const std::string& header) { os_ << header << '\n'; }
    template <class... Cells>
    void row(const Cells&... cells) {
        bool first = true;
        ((os_ << (first ? "" : ",") << cell(cells), first = false), ...);
        os_ << '\n';
    }
    std::string str() const { return os_.str(); }

private:
    static std::string cell(double x) { return format_number(x); }
    static std::string cell(int x) { return std::to_string(x); }
    static std::string cell(long x) { return std::to_string(x); }
    static std::string cell(std::size_t x) { return std::to_string(x); }
    static std::string cell(const std::string& x) { return x; }
    static std::string cell(const char* x) { return x; }
    std::ostringstream os_;
};

struct Context {
    const ExperimentPlan& plan;
    RecordStore& store;
    const RunOptions& options;
    std::vector<Instance> instances;
    std::vector<std::string> outputs;

    void emit(const std::string& name, const Csv& csv) {
        write_file_atomic(store.dir() / "summary" / name, csv.str());
        outputs.push_back("summary/" + name);
    }
};

// ---- units ----

std::optional<Json> qaoa_unit(Context& ctx, const Instance& inst) {
    const Json config{{"strategy", ctx.plan.strategy}, {"basis", "parity"}};
    return ctx.store.run("qaoa", inst, config, [&](const std::string&) {
        QaoaProblem problem(inst.graph, Basis::ParityPositive);
        const auto levels = run_strategy(problem, ctx.plan.strategy);
        return Json{{"c_max", problem.c_max()}, {"levels", levels}};
    });
}

std::vector<double> plan_grid(const ExperimentPlan& plan) {
    return log_spaced(plan.t_grid.lo, plan.t_grid.hi, plan.t_grid.points);
}

std::optional<Json> qa_unit(Context& ctx, const Instance& inst) {
    const auto grid = plan_grid(ctx.plan);
    const Json config{{"t_grid", grid}, {"gap_resolution", ctx.plan.gap_resolution}, {"basis", "parity"}};
    return ctx.store.run("qa", inst, config, [&](const std::string&) {
        const DiagonalCost cost = parity_reduce(build_diagonal_cost(inst.graph));
        const GapResult gap = min_gap(cost, ctx.plan.gap_resolution);
        const auto scan = qa_tts_scan(cost, inst.maxcut, grid);
        return Json{{"delta_min", gap.delta_min},
                    {"s_star", gap.s_star},
                    {"endpoint_gap", gap.endpoint_gap},
                    {"c_max", inst.maxcut.c_max},
                    {"scan", scan}};
    });
}

// Best result per level: the B chain for FOURIER, the single entry otherwise.
std::vector<LevelResult> best_levels(const Json& outputs) {
    std::vector<LevelResult> all = outputs.at("levels").get<std::vector<LevelResult>>();
    std::vector<LevelResult> best;
    for (auto& lr : all) {
        if (!best.empty() && best.back().p == lr.p) {
            if (lr.chain == ChainTag::B) best.back() = lr;
        } else {
            best.push_back(lr);
        }
    }
    return best;
}

template <class Fn>
std::vector<std::optional<Json>> for_instances(Context& ctx, Fn unit) {
    std::vector<std::optional<Json>> out(ctx.instances.size());
    parallel_for(static_cast<int>(ctx.instances.size()), ctx.options.workers,
                 [&](int i) { out[i] = unit(ctx, ctx.instances[i]); });
    return out;
}

double median(std::vector<double> xs) {
    if (xs.empty()) return std::nan("");
    std::sort(xs.begin(), xs.end());
    const std::size_t m = xs.size() / 2;
    return xs.size() % 2 ? xs[m] : 0.5 * (xs[m - 1] + xs[m]);
}

// ---- recipes ----

void recipe_fig2(Context& ctx) {
    const auto results = for_instances(ctx, qaoa_unit);
    Csv csv("kind,n,p,i,gamma_mean,gamma_std,beta_mean,beta_std,instances");
    std::map<std::tuple<std::string, int, int, int>, std::vector<std::pair<double, double>>> groups;
    for (std::size_t k = 0; k < results.size(); ++k) {
        if (!results[k]) continue;
        for (const auto& lr : best_levels(*results[k]))
            for (int i = 0; i < lr.p; ++i)
                groups[{ctx.instances[k].kind, ctx.instances[k].n, lr.p, i + 1}].emplace_back(
                    lr.best_params.gammas[i], lr.best_params.betas[i]);
    }
    for (const auto& [key, values] : groups) {
        double gm = 0, bm = 0, gs = 0, bs = 0;
        for (auto [g, b] : values) {
            gm += g;
            bm += b;
        }
        gm /= values.size();
        bm /= values.size();
        for (auto [g, b] : values) {
            gs += (g - gm) * (g - gm);
            bs += (b - bm) * (b - bm);
        }
        const double denom = values.size() > 1 ? values.size() - 1.0 : 1.0;
        csv.row(std::get<0>(key), std::get<1>(key), std::get<2>(key), std::get<3>(key), gm, std::sqrt(gs / denom), bm,
                std::sqrt(bs / denom), values.size());
    }
    ctx.emit("fig2.csv", csv);
}

void recipe_fig3b(Context& ctx) {
    const auto heuristics = for_instances(ctx, qaoa_unit);
    std::vector<std::optional<Json>> rtm(ctx.instances.size());
    parallel_for(static_cast<int>(ctx.instances.size()), ctx.options.workers, [&](int i) {
        if (!heuristics[i]) return;
        Json targets = Json::array();
        for (const auto& lr : best_levels(*heuristics[i])) targets.push_back({{"p", lr.p}, {"f", lr.f_value}});
        const Json config{{"targets", targets},
                          {"tol", ctx.plan.rtm_tol},
                          {"cap", ctx.plan.rtm_cap},
                          {"local", ctx.plan.strategy.local},
                          {"seed", ctx.plan.strategy.seed}};
        const Instance& inst = ctx.instances[i];
        rtm[i] = ctx.store.run("runs_to_match", inst, config, [&](const std::string&) {
            QaoaProblem problem(inst.graph, Basis::ParityPositive);
            Json rows = Json::array();
            for (const auto& t : targets) {
                const int p = t.at("p");
                const auto result = runs_to_match(problem, p, t.at("f").get<double>(), ctx.plan.rtm_tol,
                                                  ctx.plan.strategy.local, derive_seed(ctx.plan.strategy.seed, p),
                                                  ctx.plan.rtm_cap);
                rows.push_back({{"p", p}, {"runs", result.runs}, {"censored", result.censored}});
            }
            return Json{{"rows", rows}};
        });
    });
    std::map<int, std::vector<double>> runs;
    std::map<int, int> censored;
    for (const auto& r : rtm) {
        if (!r) continue;
        for (const auto& row : r->at("rows")) {
            runs[row.at("p").get<int>()].push_back(row.at("runs").get<double>());
            censored[row.at("p").get<int>()] += row.at("censored").get<bool>() ? 1 : 0;
        }
    }
    Csv csv("p,median_runs,censored,instances");
    for (const auto& [p, xs] : runs) csv.row(p, median(xs), censored[p], xs.size());
    ctx.emit("fig3b.csv", csv);
}

void recipe_fig4(Context& ctx) {
    const auto results = for_instances(ctx, qaoa_unit);
    std::map<std::pair<std::string, int>, std::map<int, std::vector<double>>> errors;
    for (std::size_t k = 0; k < results.size(); ++k) {
        if (!results[k]) continue;
        for (const auto& lr : best_levels(*results[k]))
            errors[{ctx.instances[k].kind, ctx.instances[k].n}][lr.p].push_back(1.0 - lr.r);
    }
    Csv table("kind,n,p,mean_one_minus_r,instances,p0_exp,p0_stretched");
    Csv fits("kind,n,model,p0,prefactor,residual,points_used,points_dropped");
    for (const auto& [key, by_p] : errors) {
        std::vector<std::pair<double, double>> averaged;
        std::vector<std::size_t> counts;
        for (const auto& [p, xs] : by_p) {
            averaged.emplace_back(p, std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size());
            counts.push_back(xs.size());
        }
        std::map<ScalingModel, double> p0;
        for (auto model : {ScalingModel::Exponential, ScalingModel::Stretched}) {
            p0[model] = std::nan("");
            try {
                const auto fit = fit_scaling(averaged, model);
                p0[model] = fit.p0;
                fits.row(key.first, key.second, to_string(model), fit.p0, fit.prefactor, fit.residual, fit.n_used,
                         fit.n_dropped);
            } catch (const ParameterError&) {
                fits.row(key.first, key.second, to_string(model), "nan", "nan", "nan", 0, averaged.size());
            }
        }
        for (std::size_t i = 0; i < averaged.size(); ++i)
            table.row(key.first, key.second, static_cast<int>(averaged[i].first), averaged[i].second, counts[i],
                      p0[ScalingModel::Exponential], p0[ScalingModel::Stretched]);
    }
    ctx.emit("fig4.csv", table);
    ctx.emit("fig4_fits.csv", fits);
}

void recipe_fig5(Context& ctx) {
    const auto qaoa = for_instances(ctx, qaoa_unit);
    const auto qa = for_instances(ctx, qa_unit);
    Csv csv("kind,n,instance,delta_min,tts_qa_opt,t_opt,tts_qaoa_opt,p_opt,qaoa_levels_censored");
    std::vector<double> xs, ys;
    int censored_pairs = 0;
    for (std::size_t k = 0; k < ctx.instances.size(); ++k) {
        if (!qaoa[k] || !qa[k]) continue;
        const auto scan = qa[k]->at("scan").get<std::vector<TtsRecord>>();
        std::vector<TtsRecord> qaoa_records;
        for (const auto& lr : best_levels(*qaoa[k]))
            if (lr.converged) qaoa_records.push_back(qaoa_record(lr));
        const auto best_qa = optimal_tts(scan);
        const auto best_qaoa = optimal_tts(qaoa_records);
        const double inf = std::numeric_limits<double>::infinity();
        csv.row(ctx.instances[k].kind, ctx.instances[k].n, ctx.instances[k].index, qa[k]->at("delta_min").get<double>(),
                best_qa.found ? best_qa.tts : inf, best_qa.control, best_qaoa.found ? best_qaoa.tts : inf,
                best_qaoa.control, static_cast<int>(best_levels(*qaoa[k]).size() - qaoa_records.size()));
        if (best_qa.found && best_qaoa.found) {
            xs.push_back(best_qaoa.tts);
            ys.push_back(best_qa.tts);
        } else {
            ++censored_pairs;
        }
    }
    ctx.emit("fig5.csv", csv);
    Csv corr("pairs,censored_pairs,rho_log_tts");
    double rho = std::nan("");
    if (xs.size() >= 2) {
        try {
            rho = log_correlation(xs, ys);
        } catch (const ParameterError&) {
        }
    }
    corr.row(xs.size(), censored_pairs, rho);
    ctx.emit("fig5_correlation.csv", corr);
}

void recipe_fig6(Context& ctx) {
    const auto qa = for_instances(ctx, qa_unit);
    // the hardest instance: smallest gap
    int pick = -1;
    for (std::size_t k = 0; k < qa.size(); ++k)
        if (qa[k] && (pick < 0 || qa[k]->at("delta_min").get<double>() < qa[pick]->at("delta_min").get<double>()))
            pick = static_cast<int>(k);
    Csv qa_csv("T,p_gs,tts");
    Csv qaoa_csv("p,run_time,p_gs,r");
    Csv info("kind,n,instance,delta_min,s_star");
    if (pick >= 0) {
        const Instance& inst = ctx.instances[pick];
        info.row(inst.kind, inst.n, inst.index, qa[pick]->at("delta_min").get<double>(),
                 qa[pick]->at("s_star").get<double>());
        for (const auto& rec : qa[pick]->at("scan").get<std::vector<TtsRecord>>())
            qa_csv.row(rec.control, rec.p_gs, rec.tts);
        if (auto q = qaoa_unit(ctx, inst))
            for (const auto& lr : best_levels(*q)) qaoa_csv.row(lr.p, qaoa_run_time(lr.best_params), lr.p_gs, lr.r);
    }
    ctx.emit("fig6_instance.csv", info);
    ctx.emit("fig6_qa.csv", qa_csv);
    ctx.emit("fig6_qaoa.csv", qaoa_csv);
}

std::string mode_name(const NoiseMode& m) { return to_string(m.init) + "_p" + std::to_string(m.start_level); }

// best-so-far fractional error after M measurements, at log-spaced checkpoints
std::vector<long> checkpoints(long longest) {
    std::vector<long> out;
    for (long decade = 1; decade <= longest; decade *= 10)
        for (long m : {1L, 2L, 5L})
            if (m * decade <= longest) out.push_back(m * decade);
    return out;
}

void recipe_fig7(Context& ctx) {
    Csv runs("mode,seed,measurements,measurements_to_maxcut,final_r");
    Csv curve("mode,measurements,mean_one_minus_r,seeds");
    if (ctx.instances.empty()) {
        ctx.emit("fig7_runs.csv", runs);
        ctx.emit("fig7_curve.csv", curve);
        return;
    }
    const Instance& inst = ctx.instances.front();
    struct Job {
        std::string mode;
        int seed;
        Json config;
        bool qa;
    };
    std::vector<Job> jobs;
    for (const auto& mode : ctx.plan.noise.modes)
        for (int s = 0; s < ctx.plan.noise.seeds; ++s) {
            NoiseConfig cfg = ctx.plan.noise.config;
            cfg.seed = derive_seed(ctx.plan.noise.config.seed, s);
            jobs.push_back({mode_name(mode), s,
                            Json{{"noise", cfg},
                                 {"start_level", mode.start_level},
                                 {"init", to_string(mode.init)},
                                 {"p_max", ctx.plan.noise.p_max}},
                            false});
        }
    for (double t : ctx.plan.noise.qa_times)
        jobs.push_back({"qa_T" + format_number(t), 0,
                        Json{{"T", t}, {"shots", ctx.plan.noise.qa_shots}, {"seed", ctx.plan.noise.config.seed}}, true});

    std::vector<std::optional<Json>> results(jobs.size());
    parallel_for(static_cast<int>(jobs.size()), ctx.options.workers, [&](int i) {
        const Job& job = jobs[i];
        results[i] = ctx.store.run(job.qa ? "qa_ledger" : "noise", inst, job.config, [&](const std::string& id) {
            MeasurementLedger ledger;
            Json levels = Json::array();
            if (job.qa) {
                const double t = job.config.at("T");
                ledger = qa_baseline_ledgers(inst.graph, std::vector<double>{t}, job.config.at("shots").get<long>(),
                                             job.config.at("seed").get<std::uint64_t>())
                             .front();
            } else {
                QaoaProblem problem(inst.graph, Basis::ParityPositive);
                auto experiment = run_noisy_experiment(
                    problem, job.config.at("start_level").get<int>(),
                    noisy_init_from_string(job.config.at("init").get<std::string>()),
                    job.config.at("noise").get<NoiseConfig>(), job.config.at("p_max").get<int>());
                ledger = std::move(experiment.ledger);
                for (const auto& lvl : experiment.levels) {
                    Json entry = lvl.level;
                    entry["f_bar"] = lvl.f_bar;
                    entry["measurements"] = lvl.measurements;
                    levels.push_back(entry);
                }
            }
            std::ostringstream csv;
            ledger.write_csv(csv);
            const std::string rel = "ledgers/" + id + ".csv";
            write_file_atomic(ctx.store.dir() / rel, csv.str());
            return Json{{"ledger", rel},
                        {"ledger_sha256", sha256_hex(csv.str())},
                        {"measurements", ledger.size()},
                        {"measurements_to_maxcut", ledger.first_hit(inst.maxcut.c_max)},
                        {"best_cut", ledger.best_cut()},
                        {"c_max", inst.maxcut.c_max},
                        {"levels", levels}};
        });
    });

    std::map<std::string, std::vector<MeasurementLedger>> ledgers;
    std::vector<std::string> order;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (!results[i]) continue;
        const Json& out = *results[i];
        const double final_r = out.at("best_cut").get<double>() / inst.maxcut.c_max;
        runs.row(jobs[i].mode, jobs[i].seed, out.at("measurements").get<long>(),
                 out.at("measurements_to_maxcut").get<long>(), final_r);
        std::ifstream in(ctx.store.dir() / out.at("ledger").get<std::string>());
        if (!ledgers.count(jobs[i].mode)) order.push_back(jobs[i].mode);
        ledgers[jobs[i].mode].push_back(MeasurementLedger::read_csv(in));
    }
    for (const auto& mode : order) {
        const auto& group = ledgers[mode];
        long longest = 0;
        for (const auto& l : group) longest = std::max(longest, l.size());
        for (long m : checkpoints(longest)) {
            double total = 0.0;
            for (const auto& l : group) {
                const auto& e = l.entries()[std::min(m, l.size()) - 1];
                total += 1.0 - e.best_cut / inst.maxcut.c_max;
            }
            curve.row(mode, m, total / group.size(), group.size());
        }
    }
    ctx.emit("fig7_runs.csv", runs);
    ctx.emit("fig7_curve.csv", curve);
}

void recipe_fig8a(Context& ctx) {
    const int k = ctx.plan.populations.k;
    std::string header = "t,s";
    for (int l = 0; l < k; ++l) header += ",pop_" + std::to_string(l);
    Csv pops(header);
    std::string adiabatic_header = "s";
    for (int l = 1; l <= k; ++l) adiabatic_header += ",measure_" + std::to_string(l);
    Csv adiabatic(adiabatic_header);
    if (!ctx.instances.empty()) {
        const Instance& inst = ctx.instances.front();
        const double total = ctx.plan.populations.total_time;
        std::vector<double> times;
        for (int i = 0; i < ctx.plan.populations.samples; ++i)
            times.push_back(total * i / (ctx.plan.populations.samples - 1));
        const Json config{{"T", total}, {"times", times}, {"k", k}, {"basis", "parity"}};
        auto out = ctx.store.run("populations", inst, config, [&](const std::string&) {
            const DiagonalCost cost = parity_reduce(build_diagonal_cost(inst.graph));
            const auto rows = instantaneous_populations(cost, linear_ramp(total), times, k);
            Json measure = Json::array();
            for (double t : times) {
                const double s = std::min(t / total, 1.0 - 1e-9);
                measure.push_back(adiabaticity_measure(cost, s, k, total));
            }
            return Json{{"populations", rows}, {"adiabaticity", measure}};
        });
        if (out) {
            const auto rows = out->at("populations").get<std::vector<std::vector<double>>>();
            const auto measure = out->at("adiabaticity").get<std::vector<std::vector<double>>>();
            for (std::size_t i = 0; i < times.size(); ++i) {
                std::string line = format_number(times[i]) + "," + format_number(times[i] / total);
                for (double x : rows[i]) line += "," + format_number(x);
                pops.row(line);
                std::string aline = format_number(times[i] / total);
                for (double x : measure[i]) aline += "," + format_number(x);
                adiabatic.row(aline);
            }
        }
    }
    ctx.emit("fig8a_populations.csv", pops);
    ctx.emit("fig8a_adiabaticity.csv", adiabatic);
}

}  // namespace

PlanSummary run_plan(const ExperimentPlan& plan, const fs::path& dir, const RunOptions& options) {
    plan.validate();
    fs::create_directories(dir);
    write_file_atomic(dir / "plan.json", plan_to_json(plan).dump(2) + "\n");
    RecordStore store(dir, options.log);
    Context ctx{plan, store, options, build_ensemble(plan), {}};
    for (const auto& inst : ctx.instances) store.add_graph(inst);

    if (plan.recipe == "fig2") recipe_fig2(ctx);
    else if (plan.recipe == "fig3b") recipe_fig3b(ctx);
    else if (plan.recipe == "fig4") recipe_fig4(ctx);
    else if (plan.recipe == "fig5") recipe_fig5(ctx);
    else if (plan.recipe == "fig6") recipe_fig6(ctx);
    else if (plan.recipe == "fig7") recipe_fig7(ctx);
    else if (plan.recipe == "fig8a") recipe_fig8a(ctx);

    PlanSummary summary;
    summary.computed = store.computed();
    summary.reused = store.reused();
    summary.failures = store.failures();
    summary.outputs = ctx.outputs;
    const Json manifest{{"recipe", plan.recipe},
                        {"records", store.ids()},
                        {"failures", summary.failures},
                        {"outputs", summary.outputs},
                        {"computed", summary.computed},
                        {"reused", summary.reused}};
    write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
    return summary;
}

namespace {

void check_range(const Json& j, const char* key, const std::string& where, std::vector<std::string>& issues) {
    if (!j.contains(key) || !j.at(key).is_number()) return;
    const double x = j.at(key).get<double>();
    if (!(x >= -1e-12 && x <= 1.0 + 1e-9))
        issues.push_back(where + ": " + key + " = " + format_number(x) + " outside [0, 1]");
}

}  // namespace

VerifyReport verify_records(const fs::path& dir) {
    VerifyReport report;
    const fs::path records = dir / "records";
    if (!fs::is_directory(records)) {
        report.issues.push_back("no records directory under " + dir.string());
        return report;
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(records))
        if (entry.path().extension() == ".json") files.push_back(entry.path());
    std::sort(files.begin(), files.end());

    for (const auto& path : files) {
        ++report.records;
        const std::string where = path.filename().string();
        Json rec;
        try {
            std::ifstream in(path);
            rec = Json::parse(in);
        } catch (const std::exception& e) {
            report.issues.push_back(where + ": unreadable (" + e.what() + ")");
            continue;
        }
        try {
            if (rec.at("schema_version") != kRecordSchemaVersion) report.issues.push_back(where + ": unknown schema");
            const std::string sha = rec.at("instance").at("graph_sha256");
            const std::string id = json_hash(record_key(rec.at("module"), sha, rec.at("config")));
            if (rec.at("id") != id || path.stem().string() != id)
                report.issues.push_back(where + ": record id does not match its content");
            const fs::path graph = dir / rec.at("instance").at("graph_file").get<std::string>();
            if (!fs::exists(graph))
                report.issues.push_back(where + ": graph file missing");
            else if (sha256_file(graph.string()) != sha)
                report.issues.push_back(where + ": graph hash mismatch for " + graph.filename().string());

            const Json& out = rec.at("outputs");
            if (out.contains("levels"))
                for (const auto& lvl : out.at("levels")) {
                    check_range(lvl, "r", where, report.issues);
                    check_range(lvl, "p_gs", where, report.issues);
                }
            if (out.contains("scan"))
                for (const auto& s : out.at("scan")) check_range(s, "p_gs", where, report.issues);
            if (out.contains("ledger")) {
                const fs::path ledger_path = dir / out.at("ledger").get<std::string>();
                if (!fs::exists(ledger_path)) {
                    report.issues.push_back(where + ": ledger file missing");
                } else {
                    std::ifstream in(ledger_path);
                    std::ostringstream buffer;
                    buffer << in.rdbuf();
                    if (sha256_hex(buffer.str()) != out.at("ledger_sha256"))
                        report.issues.push_back(where + ": ledger hash mismatch");
                    std::istringstream text(buffer.str());
                    const auto ledger = MeasurementLedger::read_csv(text);
                    if (!ledger.consistent()) report.issues.push_back(where + ": ledger best-so-far not monotone");
                    if (out.contains("c_max") && ledger.best_cut() > out.at("c_max").get<double>() + 1e-9)
                        report.issues.push_back(where + ": ledger cut exceeds the maximum cut");
                }
            }
        } catch (const std::exception& e) {
            report.issues.push_back(where + ": malformed record (" + e.what() + ")");
        }
    }
    return report;
}

}  // namespace qaoalab
