#include "qaemu/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "qaemu/errors.hpp"

namespace qaemu {

namespace {

constexpr std::uint64_t kGaugeTag = 0x6761756765ULL;
constexpr std::uint64_t kReadTag = 0x72656164ULL;
constexpr std::uint64_t kShimTag = 0x7368696dULL;
constexpr std::uint64_t kKappaTag = 0x6b617070ULL;

Hamiltonian add_field_offsets(const Hamiltonian& H, const std::vector<double>* a,
                              const std::vector<double>* b) {
    bool have_a = a && !a->empty();
    bool have_b = b && !b->empty();
    if (!have_a && !have_b) return H;
    std::vector<double> h = H.fields();
    if (have_a) {
        if (a->size() != h.size())
            throw ConfigError("h bias vector length does not match problem size");
        for (std::size_t i = 0; i < h.size(); ++i) h[i] += (*a)[i];
    }
    if (have_b) {
        if (b->size() != h.size())
            throw ConfigError("shim bias vector length does not match problem size");
        for (std::size_t i = 0; i < h.size(); ++i) h[i] += (*b)[i];
    }
    return Hamiltonian(H.size(), std::move(h), H.couplers(), H.scale_alpha());
}

}  // namespace

int AnnealerConfig::sweeps() const {
    double ratio = t_f / min_t_f;
    return std::max(1, static_cast<int>(std::lround(sweeps_per_min_anneal * ratio)));
}

void AnnealerConfig::validate() const {
    if (!(t_p > 0.0) || !(t_s > 0.0) || !(min_t_f > 0.0))
        throw ConfigError("all component times must be positive");
    if (t_f < min_t_f) throw ConfigError("anneal time is below the platform floor");
    if (!(beta_initial > 0.0) || !(beta_final >= beta_initial))
        throw ConfigError("invalid temperature schedule");
    if (sweeps_per_min_anneal <= 0.0) throw ConfigError("sweeps per minimum anneal must be positive");
    if (threads < 1) throw ConfigError("thread count must be at least 1");
}

double total_time(int reads, int gauges, const AnnealerConfig& config) {
    if (reads < 1 || gauges < 1) throw ConfigError("reads and gauges must be at least 1");
    return gauges * config.t_p + static_cast<double>(reads) * (config.t_f + config.t_s);
}

SpinState anneal_once(const Hamiltonian& H, int sweeps, Rng& rng, double beta_initial,
                      double beta_final) {
    if (sweeps < 1) throw ConfigError("sweep count must be at least 1");
    const int n = H.size();
    SpinState s = random_state(n, rng);
    std::vector<double> local(H.fields());
    for (int i = 0; i < n; ++i)
        for (auto [j, w] : H.neighbors(i)) local[i] += w * s[j];

    const double ratio = beta_final / beta_initial;
    for (int sweep = 0; sweep < sweeps; ++sweep) {
        double beta = sweeps == 1
                          ? beta_final
                          : beta_initial * std::pow(ratio, static_cast<double>(sweep) /
                                                               static_cast<double>(sweeps - 1));
        for (int i = 0; i < n; ++i) {
            double delta = -2.0 * s[i] * local[i];
            if (delta <= 0.0 || rng.uniform() < std::exp(-beta * delta)) {
                s[i] = static_cast<std::int8_t>(-s[i]);
                double two_s = 2.0 * s[i];
                for (auto [j, w] : H.neighbors(i)) local[j] += two_s * w;
            }
        }
    }
    return s;
}

SampleSet run(const Hamiltonian& H, int reads, int gauges, const AnnealerConfig& config,
              const IceModel& ice, const RunOptions& options) {
    config.validate();
    if (reads < 1 || gauges < 1) throw ConfigError("reads and gauges must be at least 1");
    if (!options.gauges.empty() && static_cast<int>(options.gauges.size()) != gauges)
        throw ConfigError("explicit gauge list length does not match gauge count");
    const int n = H.size();
    const int p = gauges;

    // Per-gauge programmed Hamiltonians: gauge, persistent ICE draw, then any
    // hardware-frame field offsets.
    std::vector<GaugeVector> gauge_vectors(p);
    std::vector<Hamiltonian> programmed(p);
    for (int i = 0; i < p; ++i) {
        if (!options.gauges.empty()) {
            gauge_vectors[i] = options.gauges[i];
            if (static_cast<int>(gauge_vectors[i].size()) != n)
                throw ConfigError("explicit gauge length does not match problem size");
        } else if (p == 1) {
            gauge_vectors[i] = GaugeVector(n, 1);
        } else {
            Rng grng(mix_seed(config.seed, {kGaugeTag, static_cast<std::uint64_t>(i)}));
            gauge_vectors[i] = random_gauge(n, grng);
        }
        Hamiltonian gauged = apply_gauge(H, gauge_vectors[i]);
        Hamiltonian perturbed = perturb(gauged, ice, static_cast<std::uint64_t>(i));
        programmed[i] = add_field_offsets(perturbed, &options.h_bias, &options.shim_bias);
    }

    // Reads split as evenly as possible across gauges.
    std::vector<int> reads_per_gauge(p, reads / p);
    for (int i = 0; i < reads % p; ++i) ++reads_per_gauge[i];

    struct Job {
        int gauge;
        int read;
    };
    std::vector<Job> jobs;
    jobs.reserve(reads);
    for (int i = 0; i < p; ++i)
        for (int r = 0; r < reads_per_gauge[i]; ++r) jobs.push_back({i, r});

    SampleSet out;
    out.records.resize(jobs.size());
    out.gauge_count = p;
    out.accounted_time = total_time(reads, p, config);

    const int sweeps = config.sweeps();
    const bool transient = ice.sigma_h_transient > 0.0 || ice.sigma_J_transient > 0.0;

    auto work = [&](std::size_t j) {
        const Job& job = jobs[j];
        Rng rng(mix_seed(config.seed, {kReadTag, static_cast<std::uint64_t>(job.gauge),
                                       static_cast<std::uint64_t>(job.read)}));
        SpinState hw;
        if (transient) {
            Hamiltonian per_read =
                perturb_transient(programmed[job.gauge], ice,
                                  static_cast<std::uint64_t>(job.gauge),
                                  static_cast<std::uint64_t>(job.read));
            hw = anneal_once(per_read, sweeps, rng, config.beta_initial, config.beta_final);
        } else {
            hw = anneal_once(programmed[job.gauge], sweeps, rng, config.beta_initial,
                             config.beta_final);
        }
        SpinState nominal = gauge_state(gauge_vectors[job.gauge], hw);
        double e = energy(H, nominal);
        out.records[j] = SampleRecord{std::move(nominal), e, job.gauge, job.read, true, {}};
    };

    int workers = std::min<int>(config.threads, static_cast<int>(jobs.size()));
    if (workers <= 1) {
        for (std::size_t j = 0; j < jobs.size(); ++j) work(j);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (int t = 0; t < workers; ++t) {
            pool.emplace_back([&] {
                while (true) {
                    std::size_t j = next.fetch_add(1);
                    if (j >= jobs.size()) break;
                    work(j);
                }
            });
        }
        for (auto& th : pool) th.join();
    }
    return out;
}

Kappa0Result estimate_kappa0(const Hamiltonian& logical, const Embedding& emb,
                             const AnnealerConfig& config, const IceModel& ice,
                             std::vector<double> grid, int sample_budget) {
    if (grid.empty())
        for (double k = 1.0; k <= 8.0 + 1e-12; k += 0.5) grid.push_back(k);
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (grid[i] <= grid[i - 1] || grid[0] <= 0.0)
            throw ConfigError("kappa grid must be increasing and positive");
    if (sample_budget < 1) throw ConfigError("sample budget must be at least 1");

    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
        EmbeddedProblem ep = embed(logical, emb, grid[gi]);
        AnnealerConfig cfg = config;
        cfg.seed = mix_seed(config.seed, {kKappaTag, gi});
        SampleSet ss = run(ep.hardware, sample_budget, 1, cfg, ice);
        std::size_t best = 0;
        for (std::size_t j = 1; j < ss.records.size(); ++j)
            if (ss.records[j].energy < ss.records[best].energy) best = j;
        if (broken_chains(ss.records[best].state, emb).empty())
            return {grid[gi], false};
    }
    return {grid.back(), true};
}

ShimResult chain_shim(const Embedding& emb, double kappa, const AnnealerConfig& config,
                      const IceModel& ice, int iterations, double step,
                      const ShimOptions& options) {
    if (iterations < 1) throw ConfigError("shim iterations must be at least 1");
    if (options.reads < 1) throw ConfigError("shim reads must be at least 1");
    if (!emb.target) throw ValidationError("embedding has no target graph");
    const int V = emb.target->full_vertex_count();

    std::vector<Coupler> chain_j = chain_tree_couplers(emb, kappa);
    Hamiltonian raw(V, std::vector<double>(V, 0.0), chain_j);
    Hamiltonian chain_only = raw.all_zero() ? raw : scale_to_unit(raw);

    ShimResult result;
    result.bias.assign(V, 0.0);
    for (int iter = 0; iter < iterations; ++iter) {
        AnnealerConfig cfg = config;
        cfg.seed = mix_seed(config.seed, {kShimTag, static_cast<std::uint64_t>(iter)});
        RunOptions opts;
        opts.h_bias = options.injected_bias;
        opts.shim_bias = result.bias;
        SampleSet ss = run(chain_only, options.reads, 1, cfg, ice, opts);

        double max_abs = 0.0;
        for (int i = 0; i < emb.source_n(); ++i) {
            const auto& chain = emb.chains[i];
            long sum = 0;
            long count = 0;
            for (const SampleRecord& rec : ss.records) {
                std::int8_t first = rec.state[chain.front()];
                bool unanimous = true;
                for (int q : chain) {
                    if (rec.state[q] != first) {
                        unanimous = false;
                        break;
                    }
                }
                if (!unanimous) continue;
                sum += first;
                ++count;
            }
            if (count == 0) continue;
            double m = static_cast<double>(sum) / static_cast<double>(count);
            max_abs = std::max(max_abs, std::abs(m));
            // A polarized chain signals a residual field of the opposite
            // sign; move the compensating bias toward cancelling it.
            for (int q : chain) result.bias[q] += step * m;
        }
        result.max_polarization.push_back(max_abs);
    }
    result.converged = result.max_polarization.back() < 0.1;
    return result;
}

}  // namespace qaemu
