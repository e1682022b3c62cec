#include "qaemu/ice.hpp"

#include <cmath>

#include "qaemu/errors.hpp"
#include "qaemu/rng.hpp"

namespace qaemu {

namespace {

Hamiltonian perturb_with(const Hamiltonian& H, double sigma_h, double sigma_J, Rng& rng) {
    std::vector<double> h = H.fields();
    for (double& x : h)
        if (sigma_h > 0.0) x += sigma_h * rng.normal();
    std::vector<Coupler> couplers = H.couplers();
    for (Coupler& c : couplers)
        if (sigma_J > 0.0) c.value += sigma_J * rng.normal();
    return Hamiltonian(H.size(), std::move(h), std::move(couplers), H.scale_alpha());
}

}  // namespace

Hamiltonian perturb(const Hamiltonian& H, const IceModel& model, std::uint64_t draw_index) {
    if (model.sigma_h < 0.0 || model.sigma_J < 0.0)
        throw ValidationError("ICE standard deviations must be nonnegative");
    if (model.sigma_h == 0.0 && model.sigma_J == 0.0) return H;
    Rng rng(mix_seed(model.seed, {0x1ce0ULL, draw_index}));
    return perturb_with(H, model.sigma_h, model.sigma_J, rng);
}

Hamiltonian perturb_transient(const Hamiltonian& H, const IceModel& model,
                              std::uint64_t gauge_index, std::uint64_t read_index) {
    if (model.sigma_h_transient == 0.0 && model.sigma_J_transient == 0.0) return H;
    Rng rng(mix_seed(model.seed, {0x1ce1ULL, gauge_index, read_index}));
    return perturb_with(H, model.sigma_h_transient, model.sigma_J_transient, rng);
}

double sigma_E(const IceModel& model, int N, int M) {
    if (N < 0 || M < 0) throw ValidationError("element counts must be nonnegative");
    return std::sqrt(static_cast<double>(N) * model.sigma_h * model.sigma_h +
                     static_cast<double>(M) * model.sigma_J * model.sigma_J);
}

double success_band(int N) {
    if (N <= 0) throw ValidationError("qubit count must be positive");
    return 1.67 * std::sqrt(static_cast<double>(N) / 481.0);
}

}  // namespace qaemu
