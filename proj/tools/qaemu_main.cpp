// qaemu: desk-scale emulation of a Chimera-topology annealing processor.
// Subcommands cover the full study pipeline:
//   generate -> embed -> calibrate-kappa -> shim -> run -> verify -> report

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "qaemu/embedding.hpp"
#include "qaemu/errors.hpp"
#include "qaemu/exact.hpp"
#include "qaemu/experiment.hpp"
#include "qaemu/generators.hpp"
#include "qaemu/metrics.hpp"
#include "qaemu/sampler.hpp"
#include "qaemu/textio.hpp"

namespace fs = std::filesystem;
using namespace qaemu;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

std::shared_ptr<const ChimeraGraph> resolve_graph(const std::string& graph_file, int k) {
    if (!graph_file.empty())
        return std::make_shared<ChimeraGraph>(load_working_graph(graph_file));
    if (k >= 1) return std::make_shared<ChimeraGraph>(ChimeraGraph::full(k));
    throw ConfigError("specify either --graph FILE or --k GRID");
}

void ensure_parent_dir(const std::string& path) {
    fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

std::vector<std::pair<int, int>> logical_edges(const Hamiltonian& H) {
    std::vector<std::pair<int, int>> edges;
    for (const Coupler& c : H.couplers()) edges.emplace_back(c.u, c.v);
    return edges;
}

struct GenerateArgs {
    std::string klass;
    std::string out_dir = ".";
    std::string graph_file;
    int k = -1;
    int count = 1;
    std::uint64_t seed = 0;
    int R = 1;
    double ratio = 0.0;
    int n = 0;
    bool unique_filter = false;
    int filter_cap = 24;
};

int cmd_generate(const GenerateArgs& a) {
    fs::create_directories(a.out_dir);
    std::shared_ptr<const ChimeraGraph> graph;
    if (a.klass == "ran" || a.klass == "fl") graph = resolve_graph(a.graph_file, a.k);

    for (int i = 0; i < a.count; ++i) {
        std::uint64_t seed = mix_seed(a.seed, {static_cast<std::uint64_t>(i)});
        InstanceMetadata meta;
        meta.seed = seed;
        Hamiltonian problem;

        if (a.klass == "ran") {
            problem = gen_ran(*graph, a.R, seed);
            meta.klass = "ran";
            meta.R = a.R;
            meta.N = graph->num_qubits();
            meta.M = graph->num_couplers();
        } else if (a.klass == "fl") {
            double r = a.ratio > 0.0 ? a.ratio : 0.2;
            int R = a.R > 0 ? a.R : 2;
            FlInstance inst = gen_fl(*graph, R, r, seed);
            problem = inst.problem;
            meta.klass = "fl";
            meta.R = R;
            meta.r = r;
            meta.N = graph->num_qubits();
            meta.M = graph->num_couplers();
            meta.has_planted = true;
            meta.planted_energy_raw = inst.planted_energy_raw;
            meta.cycles = inst.cycles;
        } else if (a.klass == "3mc") {
            if (a.n < 4) throw ConfigError("use --n to set the logical size (even, >= 4)");
            CubicMaxCutInstance inst = gen_3mc(a.n, seed);
            problem = inst.problem;
            meta.klass = "3mc";
            meta.N = a.n;
            meta.M = static_cast<int>(inst.edges.size());
            meta.edges = inst.edges;
        } else if (a.klass == "nae") {
            if (a.n < 4) throw ConfigError("use --n to set the variable count (>= 4)");
            double r = a.ratio > 0.0 ? a.ratio : 2.1;
            NaeInstance inst = gen_nae(a.n, r, seed, a.unique_filter, a.filter_cap);
            problem = inst.problem;
            meta.klass = "nae";
            meta.r = r;
            meta.N = a.n;
            meta.M = static_cast<int>(problem.couplers().size());
            meta.clauses = inst.clauses;
        } else {
            throw ConfigError("unknown instance class `" + a.klass + "`");
        }

        meta.n = problem.size();
        meta.scale_alpha = problem.scale_alpha();
        std::string stem = a.klass + "_n" + std::to_string(meta.n) + "_" +
                           std::to_string(a.seed) + "_" + std::to_string(i);
        meta.id = stem;
        fs::path base = fs::path(a.out_dir) / stem;
        save_problem(base.string() + ".txt", problem);
        save_metadata(base.string() + ".json", meta);
        std::cout << base.string() + ".txt" << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Chimera-structured Ising annealer emulation toolkit"};
    app.require_subcommand(1);

    // generate ---------------------------------------------------------------
    GenerateArgs gen;
    CLI::App* c_gen = app.add_subcommand("generate", "Generate benchmark instances");
    c_gen->add_option("class", gen.klass, "Instance class: ran | fl | 3mc | nae")->required();
    c_gen->add_option("--out", gen.out_dir, "Output directory");
    c_gen->add_option("--graph", gen.graph_file, "Working-graph file");
    c_gen->add_option("--k", gen.k, "Full Chimera grid dimension");
    c_gen->add_option("--count", gen.count, "Number of instances");
    c_gen->add_option("--seed", gen.seed, "Base seed");
    c_gen->add_option("--R", gen.R, "Precision limit");
    c_gen->add_option("--r", gen.ratio, "Constraint/clause ratio");
    c_gen->add_option("--n", gen.n, "Logical size (3mc, nae)");
    c_gen->add_flag("--unique", gen.unique_filter, "Filter NAE to unique solutions");
    c_gen->add_option("--filter-cap", gen.filter_cap, "Brute-force cap for the filter");

    // embed ------------------------------------------------------------------
    std::string emb_instance, emb_graph, emb_out;
    int emb_k = -1, emb_tries = 16;
    std::uint64_t emb_seed = 0;
    CLI::App* c_emb = app.add_subcommand("embed", "Minor-embed a logical instance");
    c_emb->add_option("instance", emb_instance, "Problem file")->required();
    c_emb->add_option("--graph", emb_graph, "Working-graph file");
    c_emb->add_option("--k", emb_k, "Full Chimera grid dimension");
    c_emb->add_option("--out", emb_out, "Embedding output file")->required();
    c_emb->add_option("--seed", emb_seed, "Embedder seed");
    c_emb->add_option("--tries", emb_tries, "Independent attempts");

    // calibrate-kappa ----------------------------------------------------------
    std::string cal_instance, cal_graph, cal_embedding;
    int cal_k = -1, cal_budget = 1000;
    std::uint64_t cal_seed = 0;
    std::vector<double> cal_grid;
    CLI::App* c_cal = app.add_subcommand("calibrate-kappa", "Estimate the minimal chain strength");
    c_cal->add_option("instance", cal_instance, "Problem file")->required();
    c_cal->add_option("--graph", cal_graph, "Working-graph file");
    c_cal->add_option("--k", cal_k, "Full Chimera grid dimension");
    c_cal->add_option("--embedding", cal_embedding, "Embedding file")->required();
    c_cal->add_option("--budget", cal_budget, "Samples per grid point");
    c_cal->add_option("--seed", cal_seed, "Sampler seed");
    c_cal->add_option("--grid", cal_grid, "Chain-strength grid");

    // shim ---------------------------------------------------------------------
    std::string shim_graph, shim_embedding, shim_out;
    int shim_k = -1, shim_iters = 5, shim_reads = 400;
    double shim_kappa = 2.0, shim_step = 0.02, shim_inject = 0.0;
    std::uint64_t shim_seed = 0;
    CLI::App* c_shim = app.add_subcommand("shim", "Calibrate compensating chain h-biases");
    c_shim->add_option("--graph", shim_graph, "Working-graph file");
    c_shim->add_option("--k", shim_k, "Full Chimera grid dimension");
    c_shim->add_option("--embedding", shim_embedding, "Embedding file")->required();
    c_shim->add_option("--kappa", shim_kappa, "Chain strength");
    c_shim->add_option("--iterations", shim_iters, "Shim iterations");
    c_shim->add_option("--step", shim_step, "Bias update step");
    c_shim->add_option("--reads", shim_reads, "Reads per iteration");
    c_shim->add_option("--inject", shim_inject, "Inject a uniform test bias");
    c_shim->add_option("--seed", shim_seed, "Sampler seed");
    c_shim->add_option("--out", shim_out, "Bias output file")->required();

    // run ------------------------------------------------------------------------
    std::string run_config;
    int run_threads = 0;
    CLI::App* c_run = app.add_subcommand("run", "Execute an experiment config");
    c_run->add_option("config", run_config, "Experiment config (JSON)")->required();
    c_run->add_option("--threads", run_threads, "Override worker thread count");

    // verify ------------------------------------------------------------------
    std::string ver_instance;
    int ver_limit = 28, ver_threads = 2;
    CLI::App* c_ver = app.add_subcommand("verify", "Ground-truth report for an instance");
    c_ver->add_option("instance", ver_instance, "Problem file")->required();
    c_ver->add_option("--limit", ver_limit, "Brute-force vertex limit");
    c_ver->add_option("--threads", ver_threads, "Enumeration threads");

    // report -----------------------------------------------------------------
    std::string rep_csv, rep_out;
    CLI::App* c_rep = app.add_subcommand("report", "Percentile summary of a results CSV");
    c_rep->add_option("csv", rep_csv, "Results CSV from `run`")->required();
    c_rep->add_option("--out", rep_out, "Summary output file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (c_gen->parsed()) return cmd_generate(gen);

        if (c_emb->parsed()) {
            auto graph = resolve_graph(emb_graph, emb_k);
            Hamiltonian H = load_problem(emb_instance);
            EmbedderOptions opts;
            opts.seed = emb_seed;
            opts.max_tries = emb_tries;
            auto emb = find_embedding(H.size(), logical_edges(H), graph, opts);
            if (!emb) {
                std::cerr << "infeasible: no embedding found in " << emb_tries << " attempts\n";
                return kExitData;
            }
            ensure_parent_dir(emb_out);
            save_embedding(emb_out, *emb);
            std::cout << "embedded " << H.size() << " variables on " << emb->qubits_used()
                      << " qubits\n";
            return kExitOk;
        }

        if (c_cal->parsed()) {
            auto graph = resolve_graph(cal_graph, cal_k);
            Hamiltonian H = load_problem(cal_instance);
            Embedding emb = load_embedding(cal_embedding, graph);
            validate_embedding(emb, logical_edges(H));
            AnnealerConfig cfg;
            cfg.seed = cal_seed;
            IceModel ice;
            Kappa0Result k0 = estimate_kappa0(H, emb, cfg, ice, cal_grid, cal_budget);
            std::cout << "kappa0 " << format_double(k0.kappa0)
                      << (k0.saturated ? " (saturated)" : "") << "\n";
            return kExitOk;
        }

        if (c_shim->parsed()) {
            auto graph = resolve_graph(shim_graph, shim_k);
            Embedding emb = load_embedding(shim_embedding, graph);
            AnnealerConfig cfg;
            cfg.seed = shim_seed;
            IceModel ice;
            ShimOptions so;
            so.reads = shim_reads;
            if (shim_inject != 0.0)
                so.injected_bias.assign(graph->full_vertex_count(), shim_inject);
            ShimResult res = chain_shim(emb, shim_kappa, cfg, ice, shim_iters, shim_step, so);
            ensure_parent_dir(shim_out);
            std::ofstream f(shim_out);
            if (!f) throw std::runtime_error("cannot open for writing: " + shim_out);
            for (std::size_t q = 0; q < res.bias.size(); ++q)
                if (res.bias[q] != 0.0) f << q << " " << format_double(res.bias[q]) << "\n";
            std::cout << "max polarization per iteration:";
            for (double m : res.max_polarization) std::cout << " " << format_double(m);
            std::cout << (res.converged ? " (converged)" : " (not converged)") << "\n";
            return kExitOk;
        }

        if (c_run->parsed()) {
            ExperimentConfig cfg = load_experiment_config(run_config);
            if (run_threads > 0) cfg.threads = run_threads;
            std::string csv = run_experiment(cfg);
            if (cfg.output_csv.empty()) std::cout << csv;
            else std::cout << "wrote " << cfg.output_csv << "\n";
            return kExitOk;
        }

        if (c_ver->parsed()) {
            VerifyReport rep = verify_instance(ver_instance, ver_limit, ver_threads);
            std::cout << "instance " << rep.id << " (n=" << rep.n << ")\n";
            if (rep.exact) {
                std::cout << "ground energy " << format_double(rep.ground_energy)
                          << ", degeneracy " << rep.degeneracy << "\n";
            }
            if (rep.planted_checked) {
                std::cout << "planted energy " << format_double(rep.planted_energy) << " -> "
                          << (rep.planted_consistent ? "consistent" : "INCONSISTENT") << "\n";
            }
            if (!rep.note.empty()) std::cout << rep.note << "\n";
            return rep.planted_checked && !rep.planted_consistent ? kExitData : kExitOk;
        }

        if (c_rep->parsed()) {
            std::ifstream f(rep_csv);
            if (!f) throw std::runtime_error("cannot open: " + rep_csv);
            std::stringstream buf;
            buf << f.rdbuf();
            std::string summary = summarize_csv(buf.str());
            if (rep_out.empty()) {
                std::cout << summary;
            } else {
                ensure_parent_dir(rep_out);
                std::ofstream out(rep_out);
                if (!out) throw std::runtime_error("cannot open for writing: " + rep_out);
                out << summary;
            }
            return kExitOk;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitData;
    } catch (const ValidationError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const GenerationError& e) {
        std::cerr << "generation failed: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
