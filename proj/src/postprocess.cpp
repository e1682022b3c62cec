#include "qaemu/postprocess.hpp"

#include <algorithm>

#include "qaemu/errors.hpp"

namespace qaemu {

namespace {
constexpr std::uint64_t kDescentTag = 0x64657363ULL;
constexpr std::uint64_t kUnembedTag = 0x756e656dULL;
}  // namespace

SpinState greedy_descent(const Hamiltonian& H, const SpinState& s, Rng& rng) {
    if (static_cast<int>(s.size()) != H.size())
        throw DimensionError("spin state length does not match problem size");
    const int n = H.size();
    SpinState cur = s;
    std::vector<double> local(H.fields());
    for (int i = 0; i < n; ++i)
        for (auto [j, w] : H.neighbors(i)) local[i] += w * cur[j];

    // Ties are never taken; the guard keeps rounding drift in the local
    // fields from promoting an exactly-zero flip to "improving".
    const double tie_guard = 1e-9 * std::max(1.0, H.max_abs_weight());
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    bool improved = true;
    while (improved) {
        improved = false;
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[rng.below(i)]);
        for (int i : order) {
            double delta = -2.0 * cur[i] * local[i];
            if (delta < -tie_guard) {
                cur[i] = static_cast<std::int8_t>(-cur[i]);
                double two_s = 2.0 * cur[i];
                for (auto [j, w] : H.neighbors(i)) local[j] += two_s * w;
                improved = true;
            }
        }
    }
    return cur;
}

SampleSet postprocess_pipeline(const SampleSet& raw, const Hamiltonian& problem,
                               const Embedding* emb, const Hamiltonian* logical,
                               const PostprocessOptions& options) {
    // Stage-order checks: descents on the embedded state must precede the
    // majority vote, logical descents must follow it.
    bool voted = false;
    for (PostprocessStage stage : options.stages) {
        switch (stage) {
            case PostprocessStage::majority_vote:
                if (!emb || !logical)
                    throw ConfigError("majority_vote requires an embedding and logical problem");
                if (voted) throw ConfigError("majority_vote applied twice");
                voted = true;
                break;
            case PostprocessStage::descent_embedded:
                if (voted) throw ConfigError("descent_embedded must precede majority_vote");
                break;
            case PostprocessStage::descent_logical:
                if (!emb || !logical)
                    throw ConfigError("descent_logical requires an embedding and logical problem");
                if (!voted) throw ConfigError("descent_logical requires majority_vote first");
                break;
        }
    }

    SampleSet out;
    out.gauge_count = raw.gauge_count;
    out.accounted_time = raw.accounted_time;
    out.records.resize(raw.records.size());

    for (std::size_t idx = 0; idx < raw.records.size(); ++idx) {
        const SampleRecord& rec = raw.records[idx];
        Rng rng(mix_seed(options.seed, {kDescentTag, static_cast<std::uint64_t>(idx)}));
        SpinState state = rec.state;
        bool in_logical_frame = false;
        for (PostprocessStage stage : options.stages) {
            switch (stage) {
                case PostprocessStage::descent_embedded:
                    state = greedy_descent(problem, state, rng);
                    break;
                case PostprocessStage::majority_vote:
                    state = *unembed(state, *emb, UnembedPolicy::majority_vote, rng);
                    in_logical_frame = true;
                    break;
                case PostprocessStage::descent_logical:
                    state = greedy_descent(*logical, state, rng);
                    break;
            }
        }
        const Hamiltonian& governing = in_logical_frame ? *logical : problem;
        double e = energy(governing, state);
        out.records[idx] =
            SampleRecord{std::move(state), e, rec.gauge, rec.read, true, rec.state};
    }
    return out;
}

SampleSet unembed_sampleset(const SampleSet& raw, const Embedding& emb,
                            const Hamiltonian& logical, UnembedPolicy policy,
                            std::uint64_t seed) {
    SampleSet out;
    out.gauge_count = raw.gauge_count;
    out.accounted_time = raw.accounted_time;
    out.records.resize(raw.records.size());
    for (std::size_t idx = 0; idx < raw.records.size(); ++idx) {
        const SampleRecord& rec = raw.records[idx];
        Rng rng(mix_seed(seed, {kUnembedTag, static_cast<std::uint64_t>(idx)}));
        auto mapped = unembed(rec.state, emb, policy, rng);
        if (mapped) {
            double e = energy(logical, *mapped);
            out.records[idx] =
                SampleRecord{std::move(*mapped), e, rec.gauge, rec.read, true, rec.state};
        } else {
            out.records[idx] = SampleRecord{SpinState{}, 0.0, rec.gauge, rec.read, false,
                                            rec.state};
        }
    }
    return out;
}

}  // namespace qaemu
