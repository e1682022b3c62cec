#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

#include "qaemu/embedding.hpp"
#include "qaemu/exact.hpp"
#include "qaemu/experiment.hpp"
#include "qaemu/generators.hpp"
#include "qaemu/ice.hpp"
#include "qaemu/metrics.hpp"
#include "qaemu/postprocess.hpp"
#include "qaemu/sampler.hpp"

namespace py = pybind11;
using namespace qaemu;

namespace {

SpinState to_spins(const std::vector<int>& v) {
    SpinState s(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) s[i] = static_cast<std::int8_t>(v[i]);
    return s;
}

std::vector<int> from_spins(const SpinState& s) {
    return std::vector<int>(s.begin(), s.end());
}

Hamiltonian make_hamiltonian(int n, const std::vector<double>& h,
                             const std::vector<std::tuple<int, int, double>>& couplers) {
    std::vector<Coupler> cs;
    cs.reserve(couplers.size());
    for (auto& [u, v, w] : couplers) cs.push_back({u, v, w});
    std::vector<double> fields = h.empty() ? std::vector<double>(n, 0.0) : h;
    return Hamiltonian(n, std::move(fields), std::move(cs));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Chimera-structured Ising annealer emulation toolkit";

    py::class_<Hamiltonian>(m, "Hamiltonian")
        .def(py::init(&make_hamiltonian), py::arg("n"), py::arg("h") = std::vector<double>{},
             py::arg("couplers") = std::vector<std::tuple<int, int, double>>{})
        .def_property_readonly("n", &Hamiltonian::size)
        .def_property_readonly("h", [](const Hamiltonian& H) { return H.fields(); })
        .def_property_readonly("couplers",
                               [](const Hamiltonian& H) {
                                   std::vector<std::tuple<int, int, double>> out;
                                   for (const Coupler& c : H.couplers())
                                       out.emplace_back(c.u, c.v, c.value);
                                   return out;
                               })
        .def_property_readonly("scale_alpha",
                               [](const Hamiltonian& H) { return H.scale_alpha(); })
        .def("__repr__", [](const Hamiltonian& H) {
            return "<Hamiltonian n=" + std::to_string(H.size()) + " couplers=" +
                   std::to_string(H.couplers().size()) + ">";
        });

    m.def("energy",
          [](const Hamiltonian& H, const std::vector<int>& s) { return energy(H, to_spins(s)); },
          py::arg("problem"), py::arg("state"));
    m.def("apply_gauge", [](const Hamiltonian& H, const std::vector<int>& g) {
        return apply_gauge(H, to_spins(g));
    });
    m.def("gauge_state", [](const std::vector<int>& g, const std::vector<int>& s) {
        return from_spins(gauge_state(to_spins(g), to_spins(s)));
    });
    m.def("scale_to_unit", &scale_to_unit);
    m.def("scale_by", &scale_by);
    m.def("load_problem", &load_problem);
    m.def("save_problem", &save_problem);

    py::class_<ChimeraGraph, std::shared_ptr<ChimeraGraph>>(m, "ChimeraGraph")
        .def_static("full", &ChimeraGraph::full, py::arg("k"))
        .def_property_readonly("k", &ChimeraGraph::grid)
        .def_property_readonly("num_qubits", &ChimeraGraph::num_qubits)
        .def_property_readonly("num_couplers", &ChimeraGraph::num_couplers)
        .def_property_readonly("qubits", &ChimeraGraph::qubits)
        .def_property_readonly("couplers",
                               [](const ChimeraGraph& g) { return g.couplers(); })
        .def("degree", &ChimeraGraph::degree)
        .def("__repr__", [](const ChimeraGraph& g) {
            return "<ChimeraGraph C_" + std::to_string(g.grid()) + " qubits=" +
                   std::to_string(g.num_qubits()) + ">";
        });
    m.def(
        "random_yield",
        [](std::shared_ptr<ChimeraGraph> g, int dead, std::uint64_t seed) {
            return std::make_shared<ChimeraGraph>(random_yield(*g, dead, seed));
        },
        py::arg("graph"), py::arg("dead_qubits"), py::arg("seed") = 0);
    m.def("load_working_graph", [](const std::string& path) {
        return std::make_shared<ChimeraGraph>(load_working_graph(path));
    });
    m.def("save_working_graph", [](const std::string& path, std::shared_ptr<ChimeraGraph> g) {
        save_working_graph(path, *g);
    });

    py::class_<Embedding>(m, "Embedding")
        .def_property_readonly("chains", [](const Embedding& e) { return e.chains; })
        .def_property_readonly("qubits_used", &Embedding::qubits_used)
        .def_property_readonly("source_n", &Embedding::source_n);
    m.def("choi_clique_embedding",
          [](std::shared_ptr<ChimeraGraph> g) {
              return choi_clique_embedding(std::shared_ptr<const ChimeraGraph>(g));
          });
    m.def(
        "find_embedding",
        [](int n0, const std::vector<std::pair<int, int>>& edges,
           std::shared_ptr<ChimeraGraph> target, std::uint64_t seed, int max_tries) {
            EmbedderOptions opts;
            opts.seed = seed;
            opts.max_tries = max_tries;
            return find_embedding(n0, edges, std::move(target), opts);
        },
        py::arg("n0"), py::arg("edges"), py::arg("target"), py::arg("seed") = 0,
        py::arg("max_tries") = 16);

    py::class_<EmbeddedProblem>(m, "EmbeddedProblem")
        .def_readonly("logical", &EmbeddedProblem::logical)
        .def_readonly("hardware", &EmbeddedProblem::hardware)
        .def_readonly("kappa", &EmbeddedProblem::kappa)
        .def_readonly("alpha", &EmbeddedProblem::alpha);
    m.def("embed", &embed, py::arg("logical"), py::arg("embedding"), py::arg("kappa"));
    m.def("broken_chains", [](const std::vector<int>& s, const Embedding& e) {
        return broken_chains(to_spins(s), e);
    });
    m.def(
        "unembed",
        [](const std::vector<int>& s, const Embedding& e, const std::string& policy,
           std::uint64_t seed) -> std::optional<std::vector<int>> {
            Rng rng(seed);
            auto mapped = unembed(to_spins(s), e,
                                  policy == "majority_vote" ? UnembedPolicy::majority_vote
                                                            : UnembedPolicy::discard,
                                  rng);
            if (!mapped) return std::nullopt;
            return from_spins(*mapped);
        },
        py::arg("state"), py::arg("embedding"), py::arg("policy") = "majority_vote",
        py::arg("seed") = 0);

    py::class_<IceModel>(m, "IceModel")
        .def(py::init([](double sigma_h, double sigma_J, std::uint64_t seed) {
                 return IceModel{sigma_h, sigma_J, seed};
             }),
             py::arg("sigma_h") = 0.050, py::arg("sigma_J") = 0.035, py::arg("seed") = 0)
        .def_readwrite("sigma_h", &IceModel::sigma_h)
        .def_readwrite("sigma_J", &IceModel::sigma_J)
        .def_readwrite("seed", &IceModel::seed);
    m.def("perturb", &perturb, py::arg("problem"), py::arg("model"), py::arg("draw_index") = 0);
    m.def("sigma_E", &sigma_E, py::arg("model"), py::arg("N"), py::arg("M"));
    m.def("success_band", &success_band, py::arg("N"));

    py::class_<AnnealerConfig>(m, "AnnealerConfig")
        .def(py::init<>())
        .def_readwrite("t_p", &AnnealerConfig::t_p)
        .def_readwrite("t_f", &AnnealerConfig::t_f)
        .def_readwrite("t_s", &AnnealerConfig::t_s)
        .def_readwrite("min_t_f", &AnnealerConfig::min_t_f)
        .def_readwrite("sweeps_per_min_anneal", &AnnealerConfig::sweeps_per_min_anneal)
        .def_readwrite("beta_initial", &AnnealerConfig::beta_initial)
        .def_readwrite("beta_final", &AnnealerConfig::beta_final)
        .def_readwrite("seed", &AnnealerConfig::seed)
        .def_readwrite("threads", &AnnealerConfig::threads);

    py::class_<SampleRecord>(m, "SampleRecord")
        .def_property_readonly("state",
                               [](const SampleRecord& r) { return from_spins(r.state); })
        .def_readonly("energy", &SampleRecord::energy)
        .def_readonly("gauge", &SampleRecord::gauge)
        .def_readonly("read", &SampleRecord::read)
        .def_readonly("valid", &SampleRecord::valid);
    py::class_<SampleSet>(m, "SampleSet")
        .def_readonly("records", &SampleSet::records)
        .def_readonly("gauge_count", &SampleSet::gauge_count)
        .def_readonly("accounted_time", &SampleSet::accounted_time)
        .def("__len__", [](const SampleSet& s) { return s.records.size(); });

    m.def(
        "run",
        [](const Hamiltonian& H, int reads, int gauges, const AnnealerConfig& cfg,
           const IceModel& ice) { return run(H, reads, gauges, cfg, ice); },
        py::arg("problem"), py::arg("reads"), py::arg("gauges"), py::arg("config"),
        py::arg("ice"), py::call_guard<py::gil_scoped_release>());
    m.def("total_time", &total_time, py::arg("reads"), py::arg("gauges"), py::arg("config"));
    m.def(
        "estimate_kappa0",
        [](const Hamiltonian& logical, const Embedding& emb, const AnnealerConfig& cfg,
           const IceModel& ice, std::vector<double> grid, int budget) {
            Kappa0Result r = estimate_kappa0(logical, emb, cfg, ice, std::move(grid), budget);
            return std::make_pair(r.kappa0, r.saturated);
        },
        py::arg("logical"), py::arg("embedding"), py::arg("config"), py::arg("ice"),
        py::arg("grid") = std::vector<double>{}, py::arg("budget") = 1000);
    m.def(
        "chain_shim",
        [](const Embedding& emb, double kappa, const AnnealerConfig& cfg, const IceModel& ice,
           int iterations, double step, int reads) {
            ShimOptions so;
            so.reads = reads;
            ShimResult r = chain_shim(emb, kappa, cfg, ice, iterations, step, so);
            return std::make_tuple(r.bias, r.max_polarization, r.converged);
        },
        py::arg("embedding"), py::arg("kappa"), py::arg("config"), py::arg("ice"),
        py::arg("iterations") = 5, py::arg("step") = 0.02, py::arg("reads") = 400);

    m.def(
        "greedy_descent",
        [](const Hamiltonian& H, const std::vector<int>& s, std::uint64_t seed) {
            Rng rng(seed);
            return from_spins(greedy_descent(H, to_spins(s), rng));
        },
        py::arg("problem"), py::arg("state"), py::arg("seed") = 0);

    py::class_<BruteForceResult>(m, "BruteForceResult")
        .def_readonly("ground_energy", &BruteForceResult::ground_energy)
        .def_readonly("degeneracy", &BruteForceResult::degeneracy)
        .def_property_readonly("ground_states",
                               [](const BruteForceResult& r) {
                                   std::vector<std::vector<int>> out;
                                   for (const SpinState& s : r.ground_states)
                                       out.push_back(from_spins(s));
                                   return out;
                               })
        .def_readonly("truncated", &BruteForceResult::truncated);
    m.def("brute_force", &brute_force, py::arg("problem"), py::arg("cap") = 64,
          py::arg("hard_limit") = 28, py::arg("threads") = 1,
          py::call_guard<py::gil_scoped_release>());
    m.def(
        "energy_gap",
        [](const Hamiltonian& H, int hard_limit, int threads) {
            EnergyGapResult r = energy_gap(H, hard_limit, threads);
            return std::make_tuple(r.ground, r.first_excited, r.has_gap);
        },
        py::arg("problem"), py::arg("hard_limit") = 28, py::arg("threads") = 1);

    m.def(
        "gen_ran",
        [](std::shared_ptr<ChimeraGraph> g, int R, std::uint64_t seed) {
            return gen_ran(*g, R, seed);
        },
        py::arg("graph"), py::arg("R"), py::arg("seed") = 0);
    m.def(
        "gen_fl",
        [](std::shared_ptr<ChimeraGraph> g, int R, double r, std::uint64_t seed) {
            FlInstance inst = gen_fl(*g, R, r, seed);
            return std::make_tuple(inst.problem, from_spins(inst.planted), inst.cycles,
                                   inst.planted_energy_raw);
        },
        py::arg("graph"), py::arg("R") = 2, py::arg("r") = 0.2, py::arg("seed") = 0);
    m.def(
        "gen_3mc",
        [](int n, std::uint64_t seed) {
            CubicMaxCutInstance inst = gen_3mc(n, seed);
            return std::make_pair(inst.problem, inst.edges);
        },
        py::arg("n"), py::arg("seed") = 0);
    m.def(
        "gen_nae",
        [](int n, double r, std::uint64_t seed, bool unique_filter, int cap) {
            return gen_nae(n, r, seed, unique_filter, cap).problem;
        },
        py::arg("n"), py::arg("r") = 2.1, py::arg("seed") = 0,
        py::arg("unique_filter") = false, py::arg("cap") = 24);

    m.def("success_prob",
          [](const SampleSet& ss, double reference, double band) {
              return success_prob(ss, band > 0.0 ? SuccessCriterion::within(reference, band)
                                                 : SuccessCriterion::exact(reference));
          },
          py::arg("samples"), py::arg("reference"), py::arg("band") = 0.0);
    m.def("st99", &st99, py::arg("pi"));
    m.def("st99_time", &st99_time, py::arg("pi"), py::arg("reads_per_gauge"),
          py::arg("config"));
    m.def("percentiles", &percentiles, py::arg("values"),
          py::arg("levels") = std::vector<int>{5, 25, 50, 75, 95});

    m.def("run_experiment_file", [](const std::string& path) {
        return run_experiment(load_experiment_config(path));
    });
}
