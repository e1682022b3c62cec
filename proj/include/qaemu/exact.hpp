#pragma once

#include <cstdint>
#include <vector>

#include "qaemu/ising.hpp"

namespace qaemu {

struct BruteForceResult {
    double ground_energy = 0.0;
    std::uint64_t degeneracy = 0;            // complete count of ground states
    std::vector<SpinState> ground_states;    // truncated at the retain cap
    bool truncated = false;
};

/// Exhaustive ground-state search by Gray-code enumeration with incremental
/// energy updates. Problems whose fields are all zero are enumerated over half
/// the state space and completed by spin-flip symmetry. Refuses problems with
/// more than `hard_limit` vertices. Enumeration may be partitioned across
/// `threads` workers; the result is independent of the partitioning.
BruteForceResult brute_force(const Hamiltonian& H, std::size_t cap = 64, int hard_limit = 28,
                             int threads = 1);

struct EnergyGapResult {
    double ground = 0.0;
    double first_excited = 0.0;
    bool has_gap = false;  // false on a constant energy landscape
};

/// The two smallest distinct energy values of H.
EnergyGapResult energy_gap(const Hamiltonian& H, int hard_limit = 28, int threads = 1);

}  // namespace qaemu
