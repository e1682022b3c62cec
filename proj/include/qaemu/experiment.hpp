#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qaemu/generators.hpp"
#include "qaemu/ice.hpp"
#include "qaemu/sampler.hpp"

namespace qaemu {

/// Sidecar record written next to every generated instance file.
struct InstanceMetadata {
    std::string id;
    std::string klass;  // ran | fl | 3mc | nae
    int n = 0;          // problem vertex count (native: full vertex space)
    int N = 0;          // active qubits used for error accounting
    int M = 0;          // active couplers used for error accounting
    std::uint64_t seed = 0;
    int R = 0;
    double r = 0.0;
    std::optional<double> scale_alpha;

    bool has_planted = false;  // FL: the all-up state is a planted ground state
    double planted_energy_raw = 0.0;
    std::vector<std::vector<int>> cycles;

    std::vector<std::pair<int, int>> edges;  // 3mc
    std::vector<NaeClause> clauses;          // nae
};

void save_metadata(const std::string& path, const InstanceMetadata& meta);
InstanceMetadata load_metadata(const std::string& path);

// Raw sample archive: bit-packed spin rows with a small binary header.
void save_samples(const std::string& path, const SampleSet& samples, int n);
SampleSet load_samples(const std::string& path);

/// Declarative experiment description; see configs/ for examples. Settings are
/// the cartesian product of gauges x anneal_multipliers x scales x variants,
/// and the output has one CSV row per (instance, setting, criterion).
struct ExperimentConfig {
    std::string name = "experiment";
    std::uint64_t seed = 0;
    int threads = 1;
    std::string output_csv;   // empty: return text only
    std::string archive_dir;  // empty: no raw archives

    std::vector<std::string> instances;  // problem-file paths (sidecars alongside)
    std::string graph_file;              // working graph, required for embedded runs

    AnnealerConfig sampler;
    IceModel ice;
    int reads = 1000;
    std::vector<int> gauges = {10};
    std::vector<double> anneal_multipliers = {1.0};
    std::vector<double> scales = {1.0};
    std::vector<std::string> variants;  // native: raw|descent; embedded: discard|
                                        // majority_vote|...+descent_logical|...
    std::vector<std::string> criteria = {"exact_ground"};

    bool embedded = false;
    std::vector<std::string> embedding_files;  // parallel to instances
    double kappa = 0.0;                        // 0 = calibrate per instance
    std::vector<double> kappa_grid;
    int kappa_budget = 1000;
    bool shim = false;
    int shim_iterations = 5;
    double shim_step = 0.02;
    int shim_reads = 400;

    double h_bias = 0.0;              // uniform hardware-frame field bias
    std::string reference = "auto";   // auto | brute_force | planted | best_found
    int brute_force_limit = 28;
};

ExperimentConfig load_experiment_config(const std::string& path);

/// Executes the experiment and returns the CSV text (also written to
/// output_csv when set). Deterministic for a fixed config, independent of the
/// worker thread count.
std::string run_experiment(const ExperimentConfig& config);

/// Nearest-rank percentile summary of an experiment CSV, grouped over
/// instances with identical (class, n, N, M, setting, criterion).
std::string summarize_csv(const std::string& csv_text,
                          const std::vector<int>& levels = {5, 25, 50, 75, 95});

struct VerifyReport {
    std::string id;
    int n = 0;
    bool exact = false;  // brute-force result available
    double ground_energy = 0.0;
    std::uint64_t degeneracy = 0;
    bool planted_checked = false;
    bool planted_consistent = false;
    double planted_energy = 0.0;
    std::string note;
};

/// Ground-truth report for an instance file: support-restricted brute force
/// when within the limit, and the planted-state consistency check for FL
/// instances of any size. Throws ValidationError when neither applies.
VerifyReport verify_instance(const std::string& problem_path, int hard_limit = 28,
                             int threads = 1);

}  // namespace qaemu
