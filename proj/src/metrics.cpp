#include "qaemu/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qaemu/errors.hpp"

namespace qaemu {

SuccessCriterion SuccessCriterion::exact(double reference) {
    return {Mode::exact_ground, reference, 0.0};
}

SuccessCriterion SuccessCriterion::within(double reference, double band) {
    if (band < 0.0) throw ValidationError("band must be nonnegative");
    SuccessCriterion c{Mode::within_band, reference, band};
    if (band == 0.0) c.mode = Mode::exact_ground;
    return c;
}

double success_prob(const SampleSet& samples, const SuccessCriterion& criterion) {
    if (samples.records.empty()) throw ValidationError("empty sample set");
    std::size_t hits = 0;
    const double cutoff = criterion.reference_energy + criterion.band;
    for (const SampleRecord& rec : samples.records)
        if (rec.valid && rec.energy <= cutoff) ++hits;
    return static_cast<double>(hits) / static_cast<double>(samples.records.size());
}

double st99(double pi) {
    if (pi < 0.0 || pi > 1.0) throw ValidationError("success probability must be in [0, 1]");
    if (pi == 0.0) return std::numeric_limits<double>::infinity();
    if (pi == 1.0) return 1.0;  // a single sample suffices
    return std::max(1.0, std::log(0.01) / std::log1p(-pi));
}

double st99_time(double pi, int reads_per_gauge, const AnnealerConfig& config) {
    if (reads_per_gauge < 1) throw ConfigError("reads per gauge must be at least 1");
    double k99 = st99(pi);
    if (std::isinf(k99)) return k99;
    // Guard against ceil() promoting values a few ulps above an integer.
    double reads = std::ceil(k99 - 1e-9);
    double programmings = std::ceil(k99 / static_cast<double>(reads_per_gauge) - 1e-9);
    return reads * (config.t_f + config.t_s) + programmings * config.t_p;
}

std::map<int, double> percentiles(std::vector<double> values, const std::vector<int>& levels) {
    if (values.empty()) throw ValidationError("empty value list");
    std::sort(values.begin(), values.end());
    std::map<int, double> out;
    const auto n = static_cast<double>(values.size());
    for (int level : levels) {
        if (level < 1 || level > 100) throw ValidationError("percentile level out of range");
        auto rank = static_cast<std::size_t>(std::ceil(level / 100.0 * n));
        rank = std::max<std::size_t>(rank, 1);
        out[level] = values[rank - 1];
    }
    return out;
}

}  // namespace qaemu
