#pragma once

#include <cstdint>
#include <vector>

#include "qaemu/embedding.hpp"
#include "qaemu/ice.hpp"
#include "qaemu/ising.hpp"

namespace qaemu {

/// Timing and schedule parameters of the annealer backend. Times follow the
/// hardware pipeline: programming (t_p, once per gauge), anneal (t_f, per
/// read, floor min_t_f) and readout (t_s, per read). The classical proxy maps
/// t_f linearly to Metropolis sweeps: sweeps_per_min_anneal at the floor.
struct AnnealerConfig {
    double t_p = 30e-3;
    double t_f = 20e-6;
    double t_s = 116e-6;
    double min_t_f = 20e-6;
    double sweeps_per_min_anneal = 10.0;
    double beta_initial = 0.1;  // geometric schedule
    double beta_final = 10.0;
    std::uint64_t seed = 0;
    int threads = 1;

    int sweeps() const;
    void validate() const;
};

struct SampleRecord {
    SpinState state;  // mapped back to the nominal frame
    double energy;    // against the nominal Hamiltonian
    int gauge = 0;
    int read = 0;
    bool valid = true;
    SpinState source_state;  // pre-postprocessing state, when processed
};

struct SampleSet {
    std::vector<SampleRecord> records;
    int gauge_count = 1;
    double accounted_time = 0.0;  // p*t_p + k*(t_f + t_s)
};

/// Hardware-frame extras for a run. h biases are added to the programmed
/// fields after the gauge transformation, which is what makes gauge averaging
/// effective against them.
struct RunOptions {
    std::vector<double> h_bias;        // injected systematic bias
    std::vector<double> shim_bias;     // compensation from chain_shim
    std::vector<GaugeVector> gauges;   // explicit gauges; size must equal p
};

/// T = p*t_p + k*(t_f + t_s).
double total_time(int reads, int gauges, const AnnealerConfig& config);

/// One anneal: single-spin-flip Metropolis from a uniform random state
/// through a geometric inverse-temperature schedule.
SpinState anneal_once(const Hamiltonian& H, int sweeps, Rng& rng, double beta_initial = 0.1,
                      double beta_final = 10.0);

/// Full pipeline: per gauge, program apply_gauge(H, g) with one persistent ICE
/// draw, run k/p anneals, and map the read states back through the gauge.
/// With p = 1 and no explicit gauge the identity gauge is used. Deterministic
/// per seed regardless of thread count.
SampleSet run(const Hamiltonian& H, int reads, int gauges, const AnnealerConfig& config,
              const IceModel& ice, const RunOptions& options = {});

struct Kappa0Result {
    double kappa0 = 0.0;
    bool saturated = false;  // no grid value produced an unbroken best sample
};

/// Smallest grid chain strength for which the minimum-energy sample has no
/// broken chains. Default grid 1, 1.5, 2, ..., 8.
Kappa0Result estimate_kappa0(const Hamiltonian& logical, const Embedding& emb,
                             const AnnealerConfig& config, const IceModel& ice,
                             std::vector<double> grid = {}, int sample_budget = 1000);

struct ShimOptions {
    int reads = 1000;
    std::vector<double> injected_bias;  // test/demo injection, hardware frame
};

struct ShimResult {
    std::vector<double> bias;               // compensating h-bias per qubit
    std::vector<double> max_polarization;   // per-iteration max |m_i|
    bool converged = false;
};

/// Calibration loop: samples the chain-only Hamiltonian (0, J_c), measures the
/// polarization of each unbroken chain, and accumulates a compensating h-bias
/// on that chain's qubits until the polarizations are flat.
ShimResult chain_shim(const Embedding& emb, double kappa, const AnnealerConfig& config,
                      const IceModel& ice, int iterations = 5, double step = 0.05,
                      const ShimOptions& options = {});

}  // namespace qaemu
