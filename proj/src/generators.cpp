#include "qaemu/generators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "qaemu/errors.hpp"
#include "qaemu/exact.hpp"
#include "qaemu/rng.hpp"

namespace qaemu {

namespace {
constexpr std::uint64_t kRanTag = 0x72616eULL;
constexpr std::uint64_t kFlTag = 0x666cULL;
constexpr std::uint64_t kCubicTag = 0x336d63ULL;
constexpr std::uint64_t kNaeTag = 0x6e6165ULL;

long round_off(double x) { return std::lround(x); }
}  // namespace

Hamiltonian gen_ran(const ChimeraGraph& g, int R, std::uint64_t seed) {
    if (R < 1) throw ValidationError("precision limit R must be at least 1");
    Rng rng(mix_seed(seed, {kRanTag}));
    std::vector<Coupler> couplers;
    couplers.reserve(g.couplers().size());
    for (auto [u, v] : g.couplers()) {
        long t = static_cast<long>(rng.below(2 * static_cast<std::uint64_t>(R)));
        long value = t < R ? t - R : t - R + 1;  // uniform on {-R..-1, 1..R}
        couplers.push_back({u, v, static_cast<double>(value)});
    }
    Hamiltonian raw(g.full_vertex_count(), std::vector<double>(g.full_vertex_count(), 0.0),
                    std::move(couplers));
    return scale_by(raw, 1.0 / static_cast<double>(R));
}

namespace {

struct FlBuild {
    std::vector<std::vector<int>> cycles;
    std::map<std::pair<int, int>, int> j_sum;
};

bool build_fl_cycles(const ChimeraGraph& g, int R, long target, Rng& rng, FlBuild& out) {
    const long walk_budget = 100L * g.num_qubits();
    std::set<std::pair<int, int>> frozen;
    auto key = [](int a, int b) { return std::make_pair(std::min(a, b), std::max(a, b)); };

    for (long c = 0; c < target; ++c) {
        long steps = 0;
        std::vector<int> cycle;
        while (steps < walk_budget) {
            // Non-backtracking walk from a random start; the cycle closes at
            // the first revisit of the current path.
            int start = g.qubits()[rng.below(g.qubits().size())];
            std::vector<int> path{start};
            std::vector<int> pos(g.full_vertex_count(), -1);
            pos[start] = 0;
            int prev = -1;
            bool found = false;
            while (steps < walk_budget) {
                int cur = path.back();
                std::vector<int> choices;
                for (int nb : g.neighbors(cur)) {
                    if (nb == prev) continue;
                    if (frozen.count(key(cur, nb))) continue;
                    choices.push_back(nb);
                }
                if (choices.empty()) break;  // dead end; new walk
                int next = choices[rng.below(choices.size())];
                ++steps;
                if (pos[next] >= 0) {
                    cycle.assign(path.begin() + pos[next], path.end());
                    found = true;
                    break;
                }
                pos[next] = static_cast<int>(path.size());
                path.push_back(next);
                prev = cur;
            }
            if (!found) continue;
            // Spread constraint: reject cycles confined to one unit cell.
            bool one_cell = true;
            for (int v : cycle)
                if (g.cell_of(v) != g.cell_of(cycle.front())) {
                    one_cell = false;
                    break;
                }
            if (one_cell) {
                cycle.clear();
                continue;
            }
            break;
        }
        if (cycle.empty()) return false;  // budget exhausted

        std::size_t positive = rng.below(cycle.size());
        for (std::size_t i = 0; i < cycle.size(); ++i) {
            int a = cycle[i];
            int b = cycle[(i + 1) % cycle.size()];
            int contribution = (i == positive) ? 1 : -1;
            auto k = key(a, b);
            out.j_sum[k] += contribution;
            if (std::abs(out.j_sum[k]) == R) frozen.insert(k);
        }
        out.cycles.push_back(std::move(cycle));
    }
    return true;
}

}  // namespace

FlInstance gen_fl(const ChimeraGraph& g, int R, double r, std::uint64_t seed) {
    if (R < 1) throw ValidationError("precision limit R must be at least 1");
    if (!(r > 0.0)) throw ValidationError("constraint-to-qubit ratio must be positive");
    long target = round_off(r * g.num_qubits());
    if (target < 1) throw ValidationError("constraint count rounds to zero");

    const int max_restarts = 200;
    for (int restart = 0; restart < max_restarts; ++restart) {
        Rng rng(mix_seed(seed, {kFlTag, static_cast<std::uint64_t>(restart)}));
        FlBuild build;
        if (!build_fl_cycles(g, R, target, rng, build)) continue;

        std::vector<Coupler> couplers;
        couplers.reserve(build.j_sum.size());
        for (const auto& [k, v] : build.j_sum)
            couplers.push_back({k.first, k.second, static_cast<double>(v)});
        Hamiltonian raw(g.full_vertex_count(),
                        std::vector<double>(g.full_vertex_count(), 0.0), std::move(couplers));

        FlInstance inst;
        inst.problem = scale_to_unit(raw);
        inst.planted = all_up(g.full_vertex_count());
        inst.cycles = std::move(build.cycles);
        for (const auto& cycle : inst.cycles)
            inst.planted_energy_raw -= static_cast<double>(cycle.size()) - 2.0;
        return inst;
    }
    throw GenerationError("frustrated-loop walk budget exhausted; no instance found");
}

CubicMaxCutInstance gen_3mc(int n_logical, std::uint64_t seed) {
    if (n_logical < 4 || n_logical % 2 != 0)
        throw ValidationError("cubic graphs need an even vertex count of at least 4");

    const int max_attempts = 20000;
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        Rng rng(mix_seed(seed, {kCubicTag, static_cast<std::uint64_t>(attempt)}));
        // Configuration model: pair up three stubs per vertex.
        std::vector<int> stubs;
        stubs.reserve(3 * n_logical);
        for (int v = 0; v < n_logical; ++v)
            for (int i = 0; i < 3; ++i) stubs.push_back(v);
        for (std::size_t i = stubs.size(); i > 1; --i)
            std::swap(stubs[i - 1], stubs[rng.below(i)]);

        std::set<std::pair<int, int>> edge_set;
        bool simple = true;
        for (std::size_t i = 0; i < stubs.size(); i += 2) {
            int a = stubs[i], b = stubs[i + 1];
            if (a == b) {
                simple = false;
                break;
            }
            auto e = std::make_pair(std::min(a, b), std::max(a, b));
            if (!edge_set.insert(e).second) {
                simple = false;
                break;
            }
        }
        if (!simple) continue;

        std::vector<std::vector<int>> adj(n_logical);
        for (auto [a, b] : edge_set) {
            adj[a].push_back(b);
            adj[b].push_back(a);
        }
        std::vector<char> seen(n_logical, 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        int visited = 1;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int nb : adj[v])
                if (!seen[nb]) {
                    seen[nb] = 1;
                    ++visited;
                    stack.push_back(nb);
                }
        }
        if (visited != n_logical) continue;

        CubicMaxCutInstance inst;
        inst.edges.assign(edge_set.begin(), edge_set.end());
        std::vector<Coupler> couplers;
        for (auto [a, b] : inst.edges) couplers.push_back({a, b, 1.0});
        inst.problem = Hamiltonian(n_logical, std::vector<double>(n_logical, 0.0),
                                   std::move(couplers));
        return inst;
    }
    throw GenerationError("no simple connected cubic graph found");
}

NaeInstance gen_nae(int n_vars, double r, std::uint64_t seed, bool unique_filter,
                    int brute_force_cap) {
    if (n_vars < 4) throw ValidationError("NAE instances need at least 4 variables");
    if (!(r > 0.0)) throw ValidationError("clause-to-variable ratio must be positive");
    if (unique_filter && n_vars > brute_force_cap)
        throw ConfigError("uniqueness filtering needs the exact oracle; raise the cap or "
                          "disable the filter");
    long n_clauses = round_off(r * n_vars);
    if (n_clauses < 1) throw ValidationError("clause count rounds to zero");

    const int max_attempts = 10000;
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        Rng rng(mix_seed(seed, {kNaeTag, static_cast<std::uint64_t>(attempt)}));
        NaeInstance inst;
        std::map<std::pair<int, int>, int> j_sum;
        for (long c = 0; c < n_clauses; ++c) {
            NaeClause clause;
            for (int i = 0; i < 3; ++i) {
                int v;
                bool fresh;
                do {
                    v = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_vars)));
                    fresh = true;
                    for (int j = 0; j < i; ++j)
                        if (clause.vars[j] == v) fresh = false;
                } while (!fresh);
                clause.vars[i] = v;
                clause.negated[i] = rng.spin();
            }
            for (int i = 0; i < 3; ++i)
                for (int j = i + 1; j < 3; ++j) {
                    int a = std::min(clause.vars[i], clause.vars[j]);
                    int b = std::max(clause.vars[i], clause.vars[j]);
                    j_sum[{a, b}] += clause.negated[i] * clause.negated[j];
                }
            inst.clauses.push_back(clause);
        }
        std::vector<Coupler> couplers;
        for (const auto& [k, v] : j_sum)
            couplers.push_back({k.first, k.second, static_cast<double>(v)});
        inst.problem = Hamiltonian(n_vars, std::vector<double>(n_vars, 0.0),
                                   std::move(couplers));
        if (unique_filter) {
            BruteForceResult bf = brute_force(inst.problem, 4, brute_force_cap);
            if (bf.degeneracy != 2) continue;  // not unique up to global flip
        }
        return inst;
    }
    throw GenerationError("no NAE instance accepted by the uniqueness filter");
}

}  // namespace qaemu
