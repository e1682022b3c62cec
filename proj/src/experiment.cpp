#include "qaemu/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "qaemu/embedding.hpp"
#include "qaemu/errors.hpp"
#include "qaemu/exact.hpp"
#include "qaemu/metrics.hpp"
#include "qaemu/postprocess.hpp"
#include "qaemu/textio.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace qaemu {

// ---------------------------------------------------------------------------
// Metadata sidecars

void save_metadata(const std::string& path, const InstanceMetadata& meta) {
    json j;
    j["id"] = meta.id;
    j["class"] = meta.klass;
    j["n"] = meta.n;
    j["N"] = meta.N;
    j["M"] = meta.M;
    j["seed"] = meta.seed;
    if (meta.R > 0) j["R"] = meta.R;
    if (meta.r > 0.0) j["r"] = meta.r;
    if (meta.scale_alpha) j["scale_alpha"] = *meta.scale_alpha;
    if (meta.has_planted) {
        j["planted"] = "all_up";
        j["planted_energy_raw"] = meta.planted_energy_raw;
        j["cycles"] = meta.cycles;
    }
    if (!meta.edges.empty()) {
        json e = json::array();
        for (auto [a, b] : meta.edges) e.push_back({a, b});
        j["edges"] = e;
    }
    if (!meta.clauses.empty()) {
        json cl = json::array();
        for (const NaeClause& c : meta.clauses)
            cl.push_back({{"vars", {c.vars[0], c.vars[1], c.vars[2]}},
                          {"neg", {c.negated[0], c.negated[1], c.negated[2]}}});
        j["clauses"] = cl;
    }
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << j.dump(2) << "\n";
}

InstanceMetadata load_metadata(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open: " + path);
    json j = json::parse(f);
    InstanceMetadata meta;
    meta.id = j.value("id", "");
    meta.klass = j.value("class", "");
    meta.n = j.value("n", 0);
    meta.N = j.value("N", 0);
    meta.M = j.value("M", 0);
    meta.seed = j.value("seed", 0ULL);
    meta.R = j.value("R", 0);
    meta.r = j.value("r", 0.0);
    if (j.contains("scale_alpha")) meta.scale_alpha = j["scale_alpha"].get<double>();
    if (j.contains("planted")) {
        meta.has_planted = true;
        meta.planted_energy_raw = j.value("planted_energy_raw", 0.0);
        if (j.contains("cycles"))
            meta.cycles = j["cycles"].get<std::vector<std::vector<int>>>();
    }
    if (j.contains("edges"))
        for (const auto& e : j["edges"])
            meta.edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    if (j.contains("clauses")) {
        for (const auto& c : j["clauses"]) {
            NaeClause cl{};
            for (int i = 0; i < 3; ++i) {
                cl.vars[i] = c["vars"][i].get<int>();
                cl.negated[i] = c["neg"][i].get<int>();
            }
            meta.clauses.push_back(cl);
        }
    }
    return meta;
}

// ---------------------------------------------------------------------------
// Raw sample archives

namespace {
constexpr char kArchiveMagic[8] = {'Q', 'A', 'E', 'M', 'U', 'S', 'M', 'P'};
}

void save_samples(const std::string& path, const SampleSet& samples, int n) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f.write(kArchiveMagic, 8);
    std::uint32_t version = 1, nn = static_cast<std::uint32_t>(n);
    std::uint64_t count = samples.records.size();
    std::uint32_t gauges = static_cast<std::uint32_t>(samples.gauge_count);
    double time = samples.accounted_time;
    f.write(reinterpret_cast<const char*>(&version), 4);
    f.write(reinterpret_cast<const char*>(&nn), 4);
    f.write(reinterpret_cast<const char*>(&count), 8);
    f.write(reinterpret_cast<const char*>(&gauges), 4);
    f.write(reinterpret_cast<const char*>(&time), 8);
    const std::size_t row_bytes = (static_cast<std::size_t>(n) + 7) / 8;
    std::vector<char> row(row_bytes);
    for (const SampleRecord& rec : samples.records) {
        std::int32_t gauge = rec.gauge, read = rec.read;
        std::uint8_t valid = rec.valid ? 1 : 0;
        f.write(reinterpret_cast<const char*>(&gauge), 4);
        f.write(reinterpret_cast<const char*>(&read), 4);
        f.write(reinterpret_cast<const char*>(&valid), 1);
        f.write(reinterpret_cast<const char*>(&rec.energy), 8);
        std::fill(row.begin(), row.end(), 0);
        for (int i = 0; i < n; ++i)
            if (rec.state[i] < 0) row[i / 8] |= static_cast<char>(1 << (i % 8));
        f.write(row.data(), static_cast<std::streamsize>(row_bytes));
    }
}

SampleSet load_samples(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    char magic[8];
    f.read(magic, 8);
    if (!f || std::memcmp(magic, kArchiveMagic, 8) != 0)
        throw std::runtime_error("not a sample archive: " + path);
    std::uint32_t version, nn, gauges;
    std::uint64_t count;
    double time;
    f.read(reinterpret_cast<char*>(&version), 4);
    f.read(reinterpret_cast<char*>(&nn), 4);
    f.read(reinterpret_cast<char*>(&count), 8);
    f.read(reinterpret_cast<char*>(&gauges), 4);
    f.read(reinterpret_cast<char*>(&time), 8);
    if (!f || version != 1) throw std::runtime_error("unsupported archive version");
    SampleSet out;
    out.gauge_count = static_cast<int>(gauges);
    out.accounted_time = time;
    const std::size_t row_bytes = (nn + 7) / 8;
    std::vector<char> row(row_bytes);
    for (std::uint64_t i = 0; i < count; ++i) {
        SampleRecord rec;
        std::int32_t gauge, read;
        std::uint8_t valid;
        f.read(reinterpret_cast<char*>(&gauge), 4);
        f.read(reinterpret_cast<char*>(&read), 4);
        f.read(reinterpret_cast<char*>(&valid), 1);
        f.read(reinterpret_cast<char*>(&rec.energy), 8);
        f.read(row.data(), static_cast<std::streamsize>(row_bytes));
        if (!f) throw std::runtime_error("truncated sample archive: " + path);
        rec.gauge = gauge;
        rec.read = read;
        rec.valid = valid != 0;
        rec.state.resize(nn);
        for (std::uint32_t b = 0; b < nn; ++b)
            rec.state[b] = (row[b / 8] >> (b % 8)) & 1 ? -1 : 1;
        out.records.push_back(std::move(rec));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Experiment configs

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config: " + path);
    json j;
    try {
        j = json::parse(f);
    } catch (const json::parse_error& e) {
        throw ConfigError("config parse error: " + std::string(e.what()));
    }
    ExperimentConfig c;
    c.name = j.value("name", c.name);
    c.seed = j.value("seed", c.seed);
    c.threads = j.value("threads", c.threads);
    c.output_csv = j.value("output_csv", c.output_csv);
    c.archive_dir = j.value("archive_dir", c.archive_dir);
    c.instances = j.value("instances", c.instances);
    if (j.contains("instance_dir")) {
        // All problem files in the directory, in name order.
        std::vector<std::string> found;
        for (const auto& entry :
             std::filesystem::directory_iterator(j["instance_dir"].get<std::string>()))
            if (entry.path().extension() == ".txt") found.push_back(entry.path().string());
        std::sort(found.begin(), found.end());
        c.instances.insert(c.instances.end(), found.begin(), found.end());
    }
    c.graph_file = j.value("graph", c.graph_file);
    if (j.contains("sampler")) {
        const json& s = j["sampler"];
        c.sampler.t_p = s.value("t_p", c.sampler.t_p);
        c.sampler.t_f = s.value("t_f", c.sampler.t_f);
        c.sampler.t_s = s.value("t_s", c.sampler.t_s);
        c.sampler.min_t_f = s.value("min_t_f", c.sampler.min_t_f);
        c.sampler.sweeps_per_min_anneal =
            s.value("sweeps_per_min_anneal", c.sampler.sweeps_per_min_anneal);
        c.sampler.beta_initial = s.value("beta_initial", c.sampler.beta_initial);
        c.sampler.beta_final = s.value("beta_final", c.sampler.beta_final);
    }
    if (j.contains("ice")) {
        const json& s = j["ice"];
        c.ice.sigma_h = s.value("sigma_h", c.ice.sigma_h);
        c.ice.sigma_J = s.value("sigma_J", c.ice.sigma_J);
        c.ice.seed = s.value("seed", c.ice.seed);
        c.ice.sigma_h_transient = s.value("sigma_h_transient", c.ice.sigma_h_transient);
        c.ice.sigma_J_transient = s.value("sigma_J_transient", c.ice.sigma_J_transient);
    }
    c.reads = j.value("reads", c.reads);
    c.gauges = j.value("gauges", c.gauges);
    c.anneal_multipliers = j.value("anneal_multipliers", c.anneal_multipliers);
    c.scales = j.value("scales", c.scales);
    c.variants = j.value("variants", c.variants);
    c.criteria = j.value("criteria", c.criteria);
    if (j.contains("embedding")) {
        const json& e = j["embedding"];
        c.embedded = true;
        c.embedding_files = e.value("files", c.embedding_files);
        if (e.contains("dir")) {
            // One `<instance-stem>.emb` per instance.
            for (const std::string& inst : c.instances) {
                fs::path p = fs::path(e["dir"].get<std::string>()) /
                             fs::path(inst).stem().concat(".emb");
                c.embedding_files.push_back(p.string());
            }
        }
        if (e.contains("kappa") && e["kappa"].is_number())
            c.kappa = e["kappa"].get<double>();
        c.kappa_grid = e.value("kappa_grid", c.kappa_grid);
        c.kappa_budget = e.value("kappa_budget", c.kappa_budget);
        c.shim = e.value("shim", c.shim);
        c.shim_iterations = e.value("shim_iterations", c.shim_iterations);
        c.shim_step = e.value("shim_step", c.shim_step);
        c.shim_reads = e.value("shim_reads", c.shim_reads);
    }
    c.h_bias = j.value("h_bias", c.h_bias);
    c.reference = j.value("reference", c.reference);
    c.brute_force_limit = j.value("brute_force_limit", c.brute_force_limit);
    return c;
}

// ---------------------------------------------------------------------------
// Experiment engine

namespace {

constexpr std::uint64_t kRunTag = 0x52554eULL;
constexpr std::uint64_t kPrepTag = 0x50524550ULL;

// Index-based worker pool that surfaces the first exception after joining.
template <typename Fn>
void parallel_tasks(std::size_t count, int threads, Fn&& fn) {
    int workers = std::clamp<int>(threads, 1, static_cast<int>(std::max<std::size_t>(1, count)));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) {
        pool.emplace_back([&] {
            while (!failed.load()) {
                std::size_t i = next.fetch_add(1);
                if (i >= count) break;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    failed.store(true);
                    break;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

struct VariantPlan {
    std::string label;
    bool descent_embedded = false;
    bool unembed_stage = false;  // discard or majority_vote
    UnembedPolicy policy = UnembedPolicy::discard;
    bool descent_logical = false;
};

VariantPlan parse_variant(const std::string& text, bool embedded) {
    VariantPlan plan;
    plan.label = text;
    std::stringstream ss(text);
    std::string token;
    bool unembedded_seen = false;
    while (std::getline(ss, token, '+')) {
        if (token == "raw") {
            // no-op stage
        } else if (token == "descent" || token == "descent_embedded") {
            if (unembedded_seen) throw ConfigError("descent_embedded must precede unembedding");
            plan.descent_embedded = true;
        } else if (token == "discard" || token == "majority_vote") {
            if (!embedded) throw ConfigError("variant `" + token + "` needs an embedded run");
            if (unembedded_seen) throw ConfigError("two unembedding stages in variant");
            plan.unembed_stage = true;
            unembedded_seen = true;
            plan.policy =
                token == "discard" ? UnembedPolicy::discard : UnembedPolicy::majority_vote;
        } else if (token == "descent_logical") {
            if (!unembedded_seen)
                throw ConfigError("descent_logical requires discard or majority_vote first");
            plan.descent_logical = true;
        } else {
            throw ConfigError("unknown variant token `" + token + "`");
        }
    }
    if (embedded && !plan.unembed_stage)
        throw ConfigError("embedded variants must unembed (discard or majority_vote)");
    return plan;
}

struct PreparedInstance {
    InstanceMetadata meta;
    Hamiltonian problem;  // native problem or logical problem for embedded runs
    // Embedded runs only:
    std::shared_ptr<const ChimeraGraph> graph;
    Embedding embedding;
    double kappa = 0.0;
    EmbeddedProblem ep;
    std::vector<double> shim_bias;

    double reference_energy = std::numeric_limits<double>::quiet_NaN();
    bool reference_exact = false;
};

struct RunSetting {
    int p;
    double mult;
    double scale;
};

InstanceMetadata fallback_metadata(const std::string& path, const Hamiltonian& H) {
    InstanceMetadata meta;
    meta.id = fs::path(path).stem().string();
    meta.klass = "unknown";
    meta.n = H.size();
    meta.N = static_cast<int>(support(H).size());
    meta.M = static_cast<int>(H.couplers().size());
    return meta;
}

std::string sidecar_path(const std::string& problem_path) {
    fs::path p(problem_path);
    p.replace_extension(".json");
    return p.string();
}

}  // namespace

std::string run_experiment(const ExperimentConfig& config) {
    if (config.instances.empty() && !config.output_csv.empty()) {
        // Header-only output is a valid (empty) experiment.
    }
    if (config.reads < 1) throw ConfigError("reads must be at least 1");
    for (int p : config.gauges)
        if (p < 1) throw ConfigError("gauge counts must be at least 1");
    if (config.embedded && config.graph_file.empty())
        throw ConfigError("embedded experiments need a working graph file");
    if (config.embedded && config.embedding_files.size() != config.instances.size())
        throw ConfigError("need one embedding file per instance");

    std::vector<std::string> variants = config.variants;
    if (variants.empty())
        variants = config.embedded ? std::vector<std::string>{"discard", "majority_vote"}
                                   : std::vector<std::string>{"raw"};
    std::vector<VariantPlan> plans;
    for (const std::string& v : variants) plans.push_back(parse_variant(v, config.embedded));

    for (const std::string& crit : config.criteria)
        if (crit != "exact_ground" && crit != "within_band")
            throw ConfigError("unknown success criterion `" + crit + "`");

    std::shared_ptr<const ChimeraGraph> graph;
    if (!config.graph_file.empty())
        graph = std::make_shared<ChimeraGraph>(load_working_graph(config.graph_file));

    // Phase A: load and prepare instances (references, embeddings, shims).
    std::vector<PreparedInstance> prepared(config.instances.size());
    {
        auto prep_one = [&](std::size_t i) {
                PreparedInstance& pi = prepared[i];
                const std::string& path = config.instances[i];
                if (!fs::exists(path)) throw ConfigError("missing instance file: " + path);
                pi.problem = load_problem(path);
                std::string side = sidecar_path(path);
                pi.meta = fs::exists(side) ? load_metadata(side)
                                           : fallback_metadata(path, pi.problem);

                if (config.embedded) {
                    pi.graph = graph;
                    const std::string& emb_path = config.embedding_files[i];
                    if (!fs::exists(emb_path))
                        throw ConfigError("missing embedding file: " + emb_path);
                    pi.embedding = load_embedding(emb_path, graph);
                    std::vector<std::pair<int, int>> edges;
                    for (const Coupler& c : pi.problem.couplers()) edges.emplace_back(c.u, c.v);
                    validate_embedding(pi.embedding, edges);
                    if (config.kappa > 0.0) {
                        pi.kappa = config.kappa;
                    } else {
                        AnnealerConfig cal = config.sampler;
                        cal.seed = mix_seed(config.seed, {kPrepTag, 1, i});
                        cal.threads = 1;
                        Kappa0Result k0 = estimate_kappa0(pi.problem, pi.embedding, cal,
                                                          config.ice, config.kappa_grid,
                                                          config.kappa_budget);
                        pi.kappa = k0.kappa0;
                    }
                    pi.ep = embed(pi.problem, pi.embedding, pi.kappa);
                    if (config.shim) {
                        AnnealerConfig sh = config.sampler;
                        sh.seed = mix_seed(config.seed, {kPrepTag, 2, i});
                        sh.threads = 1;
                        ShimOptions so;
                        so.reads = config.shim_reads;
                        if (config.h_bias != 0.0)
                            so.injected_bias.assign(graph->full_vertex_count(), config.h_bias);
                        ShimResult sr = chain_shim(pi.embedding, pi.kappa, sh, config.ice,
                                                   config.shim_iterations, config.shim_step, so);
                        pi.shim_bias = std::move(sr.bias);
                    }
                }

                // Reference energy for the success criteria.
                const std::string& mode = config.reference;
                const Hamiltonian& ref_problem = pi.problem;
                if (mode == "planted" || (mode == "auto" && pi.meta.has_planted)) {
                    pi.reference_energy = energy(ref_problem, all_up(ref_problem.size()));
                    pi.reference_exact = true;
                } else if (mode == "brute_force" || mode == "auto") {
                    Subproblem sub = restrict_to_support(ref_problem);
                    if (static_cast<int>(sub.vertex_map.size()) <= config.brute_force_limit &&
                        !sub.vertex_map.empty()) {
                        BruteForceResult bf =
                            brute_force(sub.problem, 1, config.brute_force_limit, 1);
                        pi.reference_energy = bf.ground_energy;
                        pi.reference_exact = true;
                    } else if (mode == "brute_force") {
                        throw ConfigError("instance " + pi.meta.id +
                                          " exceeds the brute-force limit");
                    }
                }
                // best_found (or oversized auto) references resolve in phase C.
        };
        parallel_tasks(config.instances.size(), config.threads, prep_one);
    }

    // Phase B: sampler runs, archives, per-variant energy vectors.
    std::vector<RunSetting> settings;
    for (int p : config.gauges)
        for (double mult : config.anneal_multipliers)
            for (double scale : config.scales) settings.push_back({p, mult, scale});

    struct VariantOutcome {
        std::vector<double> energies;  // valid records only
        std::size_t total = 0;         // denominator including discards
        double alpha = 1.0;            // nominal-weight scaling of the governing problem
    };
    struct TaskResult {
        std::vector<VariantOutcome> variants;
    };
    std::vector<TaskResult> results(config.instances.size() * settings.size());

    if (!config.archive_dir.empty()) fs::create_directories(config.archive_dir);
    json manifest = json::array();

    {
        std::vector<json> manifest_entries(results.size());
        auto run_one = [&](std::size_t t) {
                std::size_t ii = t / settings.size();
                std::size_t si = t % settings.size();
                const PreparedInstance& pi = prepared[ii];
                const RunSetting& rs = settings[si];

                const Hamiltonian& base = config.embedded ? pi.ep.hardware : pi.problem;
                Hamiltonian problem = rs.scale == 1.0 ? base : scale_by(base, rs.scale);

                AnnealerConfig cfg = config.sampler;
                cfg.t_f = config.sampler.t_f * rs.mult;
                cfg.seed = mix_seed(config.seed, {kRunTag, ii, si});
                cfg.threads = 1;  // parallelism lives at the task level

                RunOptions opts;
                if (config.h_bias != 0.0)
                    opts.h_bias.assign(problem.size(), config.h_bias);
                if (!pi.shim_bias.empty()) opts.shim_bias = pi.shim_bias;

                SampleSet raw = run(problem, config.reads, rs.p, cfg, config.ice, opts);

                if (!config.archive_dir.empty()) {
                    std::string name = pi.meta.id + "__p" + std::to_string(rs.p) + "_tf" +
                                       format_double(rs.mult) + "_s" + format_double(rs.scale) +
                                       ".samples";
                    fs::path file = fs::path(config.archive_dir) / name;
                    save_samples(file.string(), raw, problem.size());
                    manifest_entries[t] = json{{"file", name},
                                               {"instance", config.instances[ii]},
                                               {"p", rs.p},
                                               {"anneal_multiplier", rs.mult},
                                               {"scale", rs.scale},
                                               {"reads", config.reads},
                                               {"seed", cfg.seed}};
                }

                TaskResult& tr = results[t];
                tr.variants.resize(plans.size());
                for (std::size_t vi = 0; vi < plans.size(); ++vi) {
                    const VariantPlan& plan = plans[vi];
                    VariantOutcome& out = tr.variants[vi];
                    out.total = raw.records.size();

                    SampleSet stage = raw;
                    std::uint64_t vseed = mix_seed(config.seed, {kRunTag, ii, si, vi});
                    if (plan.descent_embedded) {
                        PostprocessOptions po;
                        po.stages = {PostprocessStage::descent_embedded};
                        po.seed = vseed;
                        stage = postprocess_pipeline(stage, problem, nullptr, nullptr, po);
                    }
                    if (plan.unembed_stage) {
                        stage = unembed_sampleset(stage, pi.embedding, pi.problem, plan.policy,
                                                  vseed);
                        if (plan.descent_logical) {
                            for (std::size_t r = 0; r < stage.records.size(); ++r) {
                                SampleRecord& rec = stage.records[r];
                                if (!rec.valid) continue;
                                Rng rng(mix_seed(vseed, {0x646cULL, r}));
                                rec.state = greedy_descent(pi.problem, rec.state, rng);
                                rec.energy = energy(pi.problem, rec.state);
                            }
                        }
                        out.alpha = 1.0;  // logical energies are unscaled
                    } else {
                        out.alpha = problem.scale_alpha().value_or(1.0);
                    }
                    for (const SampleRecord& rec : stage.records)
                        if (rec.valid) out.energies.push_back(rec.energy);
                }
        };
        parallel_tasks(results.size(), config.threads, run_one);
        for (auto& entry : manifest_entries)
            if (!entry.is_null()) manifest.push_back(entry);
    }

    if (!config.archive_dir.empty()) {
        std::ofstream mf(fs::path(config.archive_dir) / "manifest.json");
        mf << manifest.dump(2) << "\n";
    }

    // Phase C: resolve best-found references, compute metrics, emit CSV.
    std::vector<double> best_found(config.instances.size(),
                                   std::numeric_limits<double>::infinity());
    for (std::size_t ii = 0; ii < config.instances.size(); ++ii) {
        for (std::size_t si = 0; si < settings.size(); ++si) {
            const TaskResult& tr = results[ii * settings.size() + si];
            for (const VariantOutcome& vo : tr.variants)
                for (double e : vo.energies) best_found[ii] = std::min(best_found[ii], e);
        }
    }

    std::ostringstream csv;
    csv << "instance_id,class,n,N,M,p,t_f,scale,kappa,variant,criterion,pi,k99,st99_time_s\n";
    for (std::size_t ii = 0; ii < config.instances.size(); ++ii) {
        const PreparedInstance& pi = prepared[ii];
        double reference = pi.reference_energy;
        if (!pi.reference_exact || config.reference == "best_found") reference = best_found[ii];
        for (std::size_t si = 0; si < settings.size(); ++si) {
            const RunSetting& rs = settings[si];
            const TaskResult& tr = results[ii * settings.size() + si];
            AnnealerConfig cfg = config.sampler;
            cfg.t_f = config.sampler.t_f * rs.mult;
            for (std::size_t vi = 0; vi < plans.size(); ++vi) {
                const VariantOutcome& vo = tr.variants[vi];
                for (const std::string& crit : config.criteria) {
                    double band = 0.0;
                    if (crit == "within_band") {
                        if (config.embedded) {
                            // Hardware-side tolerance mapped to logical units.
                            band = success_band(pi.embedding.qubits_used()) /
                                   (pi.ep.alpha * rs.scale);
                        } else {
                            band = success_band(std::max(1, pi.meta.N)) / 1.0;
                        }
                    }
                    std::size_t hits = 0;
                    for (double e : vo.energies)
                        if (e <= reference + band) ++hits;
                    double pi_val = vo.total == 0
                                        ? 0.0
                                        : static_cast<double>(hits) /
                                              static_cast<double>(vo.total);
                    double k99 = st99(pi_val);
                    int per_gauge = std::max(1, config.reads / rs.p);
                    double time = st99_time(pi_val, per_gauge, cfg);
                    csv << pi.meta.id << "," << pi.meta.klass << "," << pi.meta.n << ","
                        << pi.meta.N << "," << pi.meta.M << "," << rs.p << ","
                        << format_double(cfg.t_f) << "," << format_double(rs.scale) << ",";
                    if (config.embedded) csv << format_double(pi.kappa);
                    csv << "," << plans[vi].label << "," << crit << ","
                        << format_double(pi_val) << "," << format_double(k99) << ","
                        << format_double(time) << "\n";
                }
            }
        }
    }

    std::string text = csv.str();
    if (!config.output_csv.empty()) {
        fs::path out(config.output_csv);
        if (out.has_parent_path()) fs::create_directories(out.parent_path());
        std::ofstream f(out);
        if (!f) throw std::runtime_error("cannot open for writing: " + config.output_csv);
        f << text;
    }
    return text;
}

// ---------------------------------------------------------------------------
// CSV summary

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_metric(const std::string& tok) {
    if (tok == "inf") return std::numeric_limits<double>::infinity();
    double v;
    if (!parse_double(tok, v)) throw std::runtime_error("bad metric value: " + tok);
    return v;
}

}  // namespace

std::string summarize_csv(const std::string& csv_text, const std::vector<int>& levels) {
    std::istringstream in(csv_text);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty CSV");
    std::vector<std::string> header = split_csv_line(line);
    auto col = [&](const std::string& name) {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw std::runtime_error("CSV missing column " + name);
    };
    const std::size_t c_pi = col("pi"), c_k99 = col("k99"), c_time = col("st99_time_s");
    const std::size_t c_id = col("instance_id"), c_kappa = col("kappa");

    struct Group {
        std::vector<double> pi, k99, time;
    };
    std::vector<std::string> order;
    std::map<std::string, Group> groups;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f = split_csv_line(line);
        std::string key;
        for (std::size_t i = 0; i < f.size(); ++i) {
            if (i == c_pi || i == c_k99 || i == c_time || i == c_id || i == c_kappa) continue;
            key += f[i];
            key += ",";
        }
        if (!groups.count(key)) order.push_back(key);
        Group& g = groups[key];
        g.pi.push_back(parse_metric(f[c_pi]));
        g.k99.push_back(parse_metric(f[c_k99]));
        g.time.push_back(parse_metric(f[c_time]));
    }

    std::ostringstream out;
    out << "class,n,N,M,p,t_f,scale,variant,criterion,level,count,pi,k99,st99_time_s\n";
    for (const std::string& key : order) {
        Group& g = groups[key];
        auto p_pi = percentiles(g.pi, levels);
        auto p_k = percentiles(g.k99, levels);
        auto p_t = percentiles(g.time, levels);
        for (int level : levels) {
            out << key << level << "," << g.pi.size() << "," << format_double(p_pi[level])
                << "," << format_double(p_k[level]) << "," << format_double(p_t[level]) << "\n";
        }
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Instance verification

VerifyReport verify_instance(const std::string& problem_path, int hard_limit, int threads) {
    Hamiltonian H = load_problem(problem_path);
    VerifyReport report;
    report.n = H.size();
    std::string side = sidecar_path(problem_path);
    InstanceMetadata meta =
        fs::exists(side) ? load_metadata(side) : fallback_metadata(problem_path, H);
    report.id = meta.id;

    if (meta.has_planted) {
        report.planted_checked = true;
        report.planted_energy = energy(H, all_up(H.size()));
        // The problem file does not carry the scaling factor; the sidecar does.
        double alpha = meta.scale_alpha.value_or(H.scale_alpha().value_or(1.0));
        double expected = alpha * meta.planted_energy_raw;
        report.planted_consistent =
            std::abs(report.planted_energy - expected) <=
            1e-9 * std::max(1.0, std::abs(expected));
    }

    Subproblem sub = restrict_to_support(H);
    if (!sub.vertex_map.empty() &&
        static_cast<int>(sub.vertex_map.size()) <= hard_limit) {
        BruteForceResult bf = brute_force(sub.problem, 16, hard_limit, threads);
        report.exact = true;
        report.ground_energy = bf.ground_energy;
        report.degeneracy = bf.degeneracy;
        if (report.planted_checked && report.planted_energy != bf.ground_energy)
            report.planted_consistent = false;
    } else if (!report.planted_checked) {
        throw ValidationError(
            "instance exceeds the brute-force limit and has no planted state; "
            "cannot verify");
    } else {
        report.note = "support exceeds brute-force limit; planted check only";
    }
    return report;
}

}  // namespace qaemu
