#pragma once

#include <cstdint>

#include "qaemu/ising.hpp"

namespace qaemu {

/// Intrinsic control error: independent zero-mean Gaussian misspecification
/// of every programmed field and coupler, relative to the nominal [-1, 1]
/// scale. The persistent component is redrawn once per programming cycle; an
/// optional transient component (default off) is redrawn per read.
struct IceModel {
    double sigma_h = 0.050;  // V7 field error
    double sigma_J = 0.035;  // V7 coupler error
    std::uint64_t seed = 0;
    double sigma_h_transient = 0.0;
    double sigma_J_transient = 0.0;

    bool enabled() const {
        return sigma_h > 0.0 || sigma_J > 0.0 || sigma_h_transient > 0.0 ||
               sigma_J_transient > 0.0;
    }
};

/// Persistent perturbation for one programming cycle: h'_u = h_u + N(0, sigma_h),
/// J'_uv = J_uv + N(0, sigma_J), deterministic per (seed, draw_index).
/// Perturbed weights may leave [-1, 1]; they are not clamped.
Hamiltonian perturb(const Hamiltonian& H, const IceModel& model, std::uint64_t draw_index);

/// Per-read transient perturbation, keyed independently of the persistent one.
Hamiltonian perturb_transient(const Hamiltonian& H, const IceModel& model,
                              std::uint64_t gauge_index, std::uint64_t read_index);

/// sigma_E = sqrt(N sigma_h^2 + M sigma_J^2): std-dev of the per-state energy
/// error on a graph with N active qubits and M active couplers.
double sigma_E(const IceModel& model, int N, int M);

/// Size-scaled within-band success tolerance, 1.67 * sqrt(N / 481): the V7
/// full-size sigma_E scaled to N active qubits.
double success_band(int N);

}  // namespace qaemu
