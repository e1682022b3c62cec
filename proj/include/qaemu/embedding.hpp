#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qaemu/chimera.hpp"
#include "qaemu/ising.hpp"

namespace qaemu {

/// Minor-embedding of a logical problem into a hardware graph: each logical
/// variable maps to a nonempty chain of hardware qubits. Valid embeddings have
/// pairwise-disjoint chains, each chain connected in the target, and at least
/// one hardware coupler between the chains of every logical edge.
struct Embedding {
    std::vector<std::vector<int>> chains;  // logical var -> sorted qubit ids
    std::shared_ptr<const ChimeraGraph> target;

    int source_n() const { return static_cast<int>(chains.size()); }
    int qubits_used() const;
    /// Chain index owning hardware qubit `q`, or -1.
    int chain_of(int q) const;
};

/// Throws ValidationError if any embedding invariant fails against the given
/// logical edge set (disjointness, connectivity, edge coverage).
void validate_embedding(const Embedding& emb,
                        const std::vector<std::pair<int, int>>& logical_edges);

/// Clique embedding of K_{4k} into the upper diagonal of the full C_k using
/// 4k(k+1) qubits in chains of size k+1. Logical vertex 4b+i owns the
/// horizontal qubits of row b at columns b..k-1 and the vertical qubits of
/// column b at rows 0..b, all at in-cell index i.
Embedding choi_clique_embedding(std::shared_ptr<const ChimeraGraph> target);
Embedding choi_clique_embedding(int k);

struct EmbedderOptions {
    std::uint64_t seed = 0;
    int max_tries = 16;    // independent restarts
    int max_passes = 64;   // rip-up/re-route rounds per restart
    double penalty = 8.0;  // vertex-sharing penalty base
};

/// Randomized chain embedder: seeds each logical vertex, routes logical edges
/// along cheapest paths where qubits already claimed by other chains cost
/// penalty^usage, and re-routes until chains are disjoint or the budget runs
/// out. Infeasibility is a normal outcome (nullopt), not an error.
std::optional<Embedding> find_embedding(int n0,
                                        const std::vector<std::pair<int, int>>& logical_edges,
                                        std::shared_ptr<const ChimeraGraph> target,
                                        const EmbedderOptions& options = {});

/// A logical problem realized on hardware: logical couplings placed on one
/// inter-chain coupler each, logical fields split equally over chain qubits,
/// spanning-tree chain couplers at -kappa, and the result unit-scaled.
struct EmbeddedProblem {
    Hamiltonian logical;
    Embedding embedding;
    double kappa = 0.0;

    Hamiltonian hardware;  // unit-scaled, on the full hardware vertex space
    double alpha = 1.0;    // scaling applied to the raw hardware weights

    // Raw (pre-scaling) hardware terms; hardware = alpha * (h, Jp + Jc).
    std::vector<double> hardware_fields;
    std::vector<Coupler> problem_couplers;
    std::vector<Coupler> chain_couplers;  // every value is exactly -kappa

    /// Constant chain energy of any unbroken state, pre-scaling:
    /// -kappa * chain_couplers.size().
    double chain_energy() const { return -kappa * static_cast<double>(chain_couplers.size()); }
};

EmbeddedProblem embed(const Hamiltonian& logical, const Embedding& emb, double kappa);

/// Spanning-tree chain couplers at -kappa, BFS-rooted at each chain's
/// smallest qubit. These are the J_c terms of an embedded problem.
std::vector<Coupler> chain_tree_couplers(const Embedding& emb, double kappa);

/// Logical variables whose chain spins do not unanimously agree.
std::vector<int> broken_chains(const SpinState& hardware_state, const Embedding& emb);

enum class UnembedPolicy { discard, majority_vote };

/// Maps a hardware state back to a logical state. Under `discard` a broken
/// chain rejects the sample (nullopt); under `majority_vote` each logical spin
/// is the chain majority with a seeded uniform tie-break.
std::optional<SpinState> unembed(const SpinState& hardware_state, const Embedding& emb,
                                 UnembedPolicy policy, Rng& rng);

// Embedding file format: one line per logical variable, `var: q1 q2 ...`.
void write_embedding(std::ostream& os, const Embedding& emb);
Embedding read_embedding(std::istream& is, std::shared_ptr<const ChimeraGraph> target);
void save_embedding(const std::string& path, const Embedding& emb);
Embedding load_embedding(const std::string& path, std::shared_ptr<const ChimeraGraph> target);

}  // namespace qaemu
