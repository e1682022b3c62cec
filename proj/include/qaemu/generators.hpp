#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "qaemu/chimera.hpp"
#include "qaemu/ising.hpp"

namespace qaemu {

/// RAN-R: every active coupler gets a uniform nonzero integer in [-R, R],
/// h = 0, then scaled by alpha = 1/R.
Hamiltonian gen_ran(const ChimeraGraph& g, int R, std::uint64_t seed);

struct FlInstance {
    Hamiltonian problem;                    // unit-scaled
    SpinState planted;                      // all-up; a ground state by construction
    std::vector<std::vector<int>> cycles;   // vertex sequence of each loop
    double planted_energy_raw = 0.0;        // pre-scaling: sum of -(len_i - 2)
};

/// FL-R frustrated-loop instance: round(r*n) cycles found by non-backtracking
/// random walk (cycles confined to one unit cell are rejected), each cycle all
/// -1 except one random +1 edge, edges frozen once |sum| reaches R.
FlInstance gen_fl(const ChimeraGraph& g, int R, double r, std::uint64_t seed);

struct CubicMaxCutInstance {
    Hamiltonian problem;  // h = 0, J = +1 on the edges
    std::vector<std::pair<int, int>> edges;
};

/// 3MC: MAX-CUT on a uniform random connected cubic graph; ground states are
/// maximum cuts. n_logical must be even and at least 4.
CubicMaxCutInstance gen_3mc(int n_logical, std::uint64_t seed);

struct NaeClause {
    int vars[3];
    int negated[3];  // q_i in {-1, +1}; -1 marks a negated literal
};

struct NaeInstance {
    Hamiltonian problem;  // h = 0, J accumulated over clauses
    std::vector<NaeClause> clauses;
};

/// NAE-3SAT near the phase transition: round(r*n) clauses over 3 distinct
/// variables with independent negations; clause terms J_{ij} = q_i q_j. With
/// unique_filter, instances are regenerated until the brute-force ground set
/// is a single solution up to global spin flip (requires n_vars within the
/// brute-force cap).
NaeInstance gen_nae(int n_vars, double r, std::uint64_t seed, bool unique_filter = false,
                    int brute_force_cap = 24);

}  // namespace qaemu
