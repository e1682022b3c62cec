#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qaemu/rng.hpp"

namespace qaemu {

// Spin configurations and gauge vectors are vectors over {-1, +1}.
using SpinState = std::vector<std::int8_t>;
using GaugeVector = std::vector<std::int8_t>;

struct Coupler {
    int u;
    int v;
    double value;
};

/// An Ising problem (h, J): local fields over n vertices plus a sparse
/// upper-triangular coupling map. Immutable after construction; symmetric or
/// duplicate coupler input is folded into u < v entries with summed weight,
/// and exact-zero couplers are dropped. `scale_alpha` records the cumulative
/// scaling factor applied to the original weights, when any.
class Hamiltonian {
  public:
    Hamiltonian() = default;
    explicit Hamiltonian(int n);
    Hamiltonian(int n, std::vector<double> fields, std::vector<Coupler> couplers,
                std::optional<double> scale_alpha = std::nullopt);

    int size() const { return n_; }
    const std::vector<double>& fields() const { return h_; }
    const std::vector<Coupler>& couplers() const { return couplers_; }
    std::optional<double> scale_alpha() const { return scale_alpha_; }

    double max_abs_weight() const;
    bool all_zero() const;
    // True when every weight lies in [-1, 1].
    bool hardware_ready() const;

    // Adjacency of the coupling graph: neighbors(u) lists (v, J_uv).
    const std::vector<std::pair<int, double>>& neighbors(int u) const { return adj_[u]; }

  private:
    int n_ = 0;
    std::vector<double> h_;
    std::vector<Coupler> couplers_;
    std::optional<double> scale_alpha_;
    std::vector<std::vector<std::pair<int, double>>> adj_;
};

/// E(s) = sum_v h_v s_v + sum_{uv} J_uv s_u s_v.
double energy(const Hamiltonian& H, const SpinState& s);

/// Gauge-transformed problem: h'_u = h_u g_u, J'_uv = J_uv g_u g_v.
Hamiltonian apply_gauge(const Hamiltonian& H, const GaugeVector& g);

/// Elementwise product g_u * s_u; an involution.
SpinState gauge_state(const GaugeVector& g, const SpinState& s);

/// Rescales so all weights lie in [-1, 1] with at least one at +-1, using
/// alpha = 1 / max(|h|_inf, |J|_inf). Throws ValidationError on an all-zero
/// problem. Energy minimizers are unchanged.
Hamiltonian scale_to_unit(const Hamiltonian& H);

/// Multiplies every weight by `factor` (> 0) and composes it into scale_alpha.
Hamiltonian scale_by(const Hamiltonian& H, double factor);

GaugeVector random_gauge(int n, Rng& rng);
SpinState random_state(int n, Rng& rng);
SpinState all_up(int n);
void validate_state(const SpinState& s, int n);

/// Vertices that carry a nonzero field or at least one coupler.
std::vector<int> support(const Hamiltonian& H);

struct Subproblem {
    Hamiltonian problem;          // relabeled onto 0..support-1
    std::vector<int> vertex_map;  // vertex_map[i] = original vertex id
};

/// Restriction of H to its support. Vertices outside the support contribute
/// zero to every energy, so ground energies coincide.
Subproblem restrict_to_support(const Hamiltonian& H);

// Problem text format: header line `n`, then `u u h_u` per nonzero field and
// `u v J_uv` per coupler, 0-indexed. Blank lines and `#` comments allowed.
void write_problem(std::ostream& os, const Hamiltonian& H);
Hamiltonian read_problem(std::istream& is);
void save_problem(const std::string& path, const Hamiltonian& H);
Hamiltonian load_problem(const std::string& path);

}  // namespace qaemu
