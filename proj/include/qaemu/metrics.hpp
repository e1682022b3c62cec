#pragma once

#include <map>
#include <vector>

#include "qaemu/sampler.hpp"

namespace qaemu {

/// What counts as a successful sample: exactly the reference (ground) energy,
/// or within `band` of it. band is 0 iff mode is exact_ground.
struct SuccessCriterion {
    enum class Mode { exact_ground, within_band };
    Mode mode = Mode::exact_ground;
    double reference_energy = 0.0;
    double band = 0.0;

    static SuccessCriterion exact(double reference);
    static SuccessCriterion within(double reference, double band);
};

/// Fraction of records with energy <= reference + band. Invalid (discarded)
/// records count as failures.
double success_prob(const SampleSet& samples, const SuccessCriterion& criterion);

/// k99 = log(1 - 0.99) / log(1 - pi): expected samples for 99% cumulative
/// success probability, floored at 1. pi = 0 maps to infinity, pi = 1 to 1.
double st99(double pi);

/// Wall time for ST99 under the pipeline cost model: whole reads plus whole
/// programming cycles of `reads_per_gauge` reads each.
double st99_time(double pi, int reads_per_gauge, const AnnealerConfig& config);

/// Nearest-rank percentiles. Infinite entries sort above all finite values,
/// so lower percentiles stay finite when some observations have pi = 0.
std::map<int, double> percentiles(std::vector<double> values,
                                  const std::vector<int>& levels = {5, 25, 50, 75, 95});

}  // namespace qaemu
