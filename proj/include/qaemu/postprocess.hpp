#pragma once

#include <cstdint>
#include <vector>

#include "qaemu/embedding.hpp"
#include "qaemu/ising.hpp"
#include "qaemu/sampler.hpp"

namespace qaemu {

/// Walks s to a 1-flip local minimum by strictly energy-decreasing single-spin
/// flips, examining candidates in seeded-random sweep order. Zero-energy flips
/// are never taken.
SpinState greedy_descent(const Hamiltonian& H, const SpinState& s, Rng& rng);

enum class PostprocessStage { majority_vote, descent_embedded, descent_logical };

struct PostprocessOptions {
    std::vector<PostprocessStage> stages;
    std::uint64_t seed = 0;
};

/// Applies the stages in order to every record. `problem` is the Hamiltonian
/// the raw records were sampled from (hardware or native); majority_vote and
/// descent_logical additionally need the embedding and the logical problem.
/// Processed records keep the raw state in `source_state`, and their energies
/// are recomputed against whichever problem governs the final state.
SampleSet postprocess_pipeline(const SampleSet& raw, const Hamiltonian& problem,
                               const Embedding* emb, const Hamiltonian* logical,
                               const PostprocessOptions& options);

/// Maps every record of an embedded run back to the logical problem under the
/// given chain policy. Under `discard`, records with broken chains come back
/// invalid; under `majority_vote` every record stays valid.
SampleSet unembed_sampleset(const SampleSet& raw, const Embedding& emb,
                            const Hamiltonian& logical, UnembedPolicy policy,
                            std::uint64_t seed);

}  // namespace qaemu
