#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include "qaemu/chimera.hpp"
#include "qaemu/ising.hpp"
#include "qaemu/rng.hpp"

namespace qaemu::test {

// Working graph with the V7 element counts: 481 qubits, 1306 couplers.
inline ChimeraGraph v7_like_graph(std::uint64_t seed) {
    ChimeraGraph full8 = ChimeraGraph::full(8);
    for (std::uint64_t attempt = 0;; ++attempt) {
        ChimeraGraph g = random_yield(full8, 31, mix_seed(seed, {attempt}));
        if (g.num_couplers() < 1306) continue;
        std::vector<std::pair<int, int>> couplers = g.couplers();
        Rng rng(mix_seed(seed, {attempt, 0x7072756eULL}));
        while (couplers.size() > 1306)
            couplers.erase(couplers.begin() + static_cast<long>(rng.below(couplers.size())));
        return ChimeraGraph::from_elements(8, g.qubits(), couplers);
    }
}

// Reference evaluator for exhaustive checks: energies of all 2^n states in
// index order (bit set = spin -1), independent of the library's enumeration.
inline std::vector<double> full_spectrum(const Hamiltonian& H) {
    const int n = H.size();
    std::vector<double> out;
    out.reserve(1u << n);
    for (std::uint64_t code = 0; code < (1ULL << n); ++code) {
        SpinState s(n);
        for (int i = 0; i < n; ++i) s[i] = (code >> i) & 1 ? -1 : 1;
        out.push_back(energy(H, s));
    }
    return out;
}

inline SpinState state_from_code(std::uint64_t code, int n) {
    SpinState s(n);
    for (int i = 0; i < n; ++i) s[i] = (code >> i) & 1 ? -1 : 1;
    return s;
}

// Naive ground-state search used as the oracle against the Gray-code scanner.
inline std::pair<double, std::set<std::vector<std::int8_t>>> naive_ground(const Hamiltonian& H) {
    double best = 1e300;
    std::set<std::vector<std::int8_t>> states;
    const int n = H.size();
    for (std::uint64_t code = 0; code < (1ULL << n); ++code) {
        SpinState s = state_from_code(code, n);
        double e = energy(H, s);
        if (e < best) {
            best = e;
            states.clear();
            states.insert(s);
        } else if (e == best) {
            states.insert(s);
        }
    }
    return {best, states};
}

inline Hamiltonian random_hamiltonian(int n, double coupler_density, Rng& rng,
                                      bool integer_weights = false, int weight_range = 3) {
    std::vector<double> h(n);
    for (double& x : h)
        x = integer_weights
                ? static_cast<double>(static_cast<long>(rng.below(2 * weight_range + 1)) -
                                      weight_range)
                : 2.0 * rng.uniform() - 1.0;
    std::vector<Coupler> couplers;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) {
            if (rng.uniform() >= coupler_density) continue;
            double w = integer_weights
                           ? static_cast<double>(
                                 static_cast<long>(rng.below(2 * weight_range + 1)) -
                                 weight_range)
                           : 2.0 * rng.uniform() - 1.0;
            if (w != 0.0) couplers.push_back({u, v, w});
        }
    return Hamiltonian(n, std::move(h), std::move(couplers));
}

}  // namespace qaemu::test
