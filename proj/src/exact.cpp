#include "qaemu/exact.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <thread>

#include "qaemu/errors.hpp"

namespace qaemu {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Flat adjacency for the enumeration kernel.
struct Csr {
    int n = 0;
    std::vector<double> h;
    std::vector<int> offset;
    std::vector<int> nbr;
    std::vector<double> w;
    double tol = 0.0;

    explicit Csr(const Hamiltonian& H) : n(H.size()), h(H.fields()) {
        offset.assign(n + 1, 0);
        for (const Coupler& c : H.couplers()) {
            ++offset[c.u + 1];
            ++offset[c.v + 1];
        }
        for (int i = 0; i < n; ++i) offset[i + 1] += offset[i];
        nbr.resize(offset[n]);
        w.resize(offset[n]);
        std::vector<int> cursor(offset.begin(), offset.end() - 1);
        for (const Coupler& c : H.couplers()) {
            nbr[cursor[c.u]] = c.v;
            w[cursor[c.u]++] = c.value;
            nbr[cursor[c.v]] = c.u;
            w[cursor[c.v]++] = c.value;
        }
        double total = 0.0;
        for (double x : h) total += std::abs(x);
        for (const Coupler& c : H.couplers()) total += std::abs(c.value);
        // Clusters energies closer than the worst drift of one refresh window;
        // far below the level spacing of any scaled integer problem.
        tol = std::max(1.0, total) * 1e-8;
    }
};

struct ScanResult {
    double best = kInf;
    double second = kInf;
    std::uint64_t count = 0;
    std::vector<std::uint64_t> codes;  // Gray codes of retained ground states
    std::uint64_t second_code = 0;
    bool has_second = false;
};

double evaluate(const Csr& p, const std::vector<std::int8_t>& s) {
    double e = 0.0;
    for (int i = 0; i < p.n; ++i) e += p.h[i] * s[i];
    double pair_sum = 0.0;
    for (int i = 0; i < p.n; ++i)
        for (int k = p.offset[i]; k < p.offset[i + 1]; ++k)
            pair_sum += p.w[k] * s[i] * s[p.nbr[k]];
    return e + 0.5 * pair_sum;
}

// Scans state indices [begin, end) in Gray order.
ScanResult scan_block(const Csr& p, std::uint64_t begin, std::uint64_t end, std::size_t cap) {
    ScanResult r;
    const int n = p.n;
    std::uint64_t gray = begin ^ (begin >> 1);
    std::vector<std::int8_t> s(n);
    for (int i = 0; i < n; ++i) s[i] = (gray >> i) & 1 ? -1 : 1;
    std::vector<double> local(p.h);
    for (int i = 0; i < n; ++i)
        for (int k = p.offset[i]; k < p.offset[i + 1]; ++k) local[i] += p.w[k] * s[p.nbr[k]];
    double e = evaluate(p, s);

    auto process = [&](double energy, std::uint64_t code) {
        if (energy < r.best - p.tol) {
            if (r.best < r.second) {
                r.second = r.best;
                r.second_code = r.codes.empty() ? code : r.codes.front();
                r.has_second = true;
            }
            r.best = energy;
            r.count = 1;
            r.codes.assign(1, code);
        } else if (energy <= r.best + p.tol) {
            ++r.count;
            if (r.codes.size() < cap) r.codes.push_back(code);
        } else if (energy < r.second - p.tol) {
            r.second = energy;
            r.second_code = code;
            r.has_second = true;
        }
    };

    process(e, gray);
    for (std::uint64_t t = begin + 1; t < end; ++t) {
        if ((t & 0xFFFFFFULL) == 0) e = evaluate(p, s);  // drift refresh
        int b = std::countr_zero(t);
        e += -2.0 * s[b] * local[b];
        s[b] = static_cast<std::int8_t>(-s[b]);
        gray ^= 1ULL << b;
        double two_s = 2.0 * s[b];
        for (int k = p.offset[b]; k < p.offset[b + 1]; ++k) local[p.nbr[k]] += two_s * p.w[k];

        if (e < r.best - p.tol) {
            if (r.best < r.second) {
                r.second = r.best;
                r.second_code = r.codes.front();
                r.has_second = true;
            }
            r.best = e;
            r.count = 1;
            r.codes.assign(1, gray);
        } else if (e <= r.best + p.tol) {
            ++r.count;
            if (r.codes.size() < cap) r.codes.push_back(gray);
        } else if (e < r.second - p.tol) {
            r.second = e;
            r.second_code = gray;
            r.has_second = true;
        }
    }
    return r;
}

ScanResult scan(const Csr& p, std::size_t cap, int threads) {
    const std::uint64_t total = 1ULL << p.n;
    int workers = std::clamp(threads, 1, 64);
    if (p.n < 22) workers = 1;
    if (workers == 1) return scan_block(p, 0, total, cap);

    std::vector<ScanResult> partial(workers);
    std::vector<std::thread> pool;
    std::uint64_t chunk = total / workers;
    for (int t = 0; t < workers; ++t) {
        std::uint64_t begin = chunk * t;
        std::uint64_t end = (t + 1 == workers) ? total : begin + chunk;
        pool.emplace_back(
            [&, t, begin, end] { partial[t] = scan_block(p, begin, end, cap); });
    }
    for (auto& th : pool) th.join();

    ScanResult merged;
    for (const ScanResult& b : partial) merged.best = std::min(merged.best, b.best);
    for (const ScanResult& b : partial) {
        if (b.best <= merged.best + p.tol) {
            merged.count += b.count;
            for (std::uint64_t code : b.codes) {
                if (merged.codes.size() < cap) merged.codes.push_back(code);
            }
            if (b.has_second && b.second < merged.second - p.tol &&
                b.second > merged.best + p.tol) {
                merged.second = b.second;
                merged.second_code = b.second_code;
                merged.has_second = true;
            }
        } else {
            // This block's whole ground cluster is excited globally.
            if (b.best < merged.second - p.tol) {
                merged.second = b.best;
                merged.second_code = b.codes.front();
                merged.has_second = true;
            }
        }
    }
    return merged;
}

SpinState state_from_code(std::uint64_t code, int n) {
    SpinState s(n);
    for (int i = 0; i < n; ++i) s[i] = (code >> i) & 1 ? -1 : 1;
    return s;
}

bool fields_all_zero(const Hamiltonian& H) {
    for (double x : H.fields())
        if (x != 0.0) return false;
    return true;
}

// Removes the last vertex, pinning its spin to +1: its couplings become
// fields on the neighbors. Valid only when its own field is zero.
Hamiltonian pin_last_spin(const Hamiltonian& H) {
    int n = H.size();
    std::vector<double> h(H.fields().begin(), H.fields().end() - 1);
    std::vector<Coupler> couplers;
    for (const Coupler& c : H.couplers()) {
        if (c.v == n - 1)
            h[c.u] += c.value;
        else
            couplers.push_back(c);
    }
    return Hamiltonian(n - 1, std::move(h), std::move(couplers), H.scale_alpha());
}

}  // namespace

BruteForceResult brute_force(const Hamiltonian& H, std::size_t cap, int hard_limit,
                             int threads) {
    if (H.size() < 1) throw ValidationError("cannot enumerate an empty problem");
    if (H.size() > hard_limit)
        throw ValidationError("problem size " + std::to_string(H.size()) +
                              " exceeds the brute-force limit " + std::to_string(hard_limit));
    if (cap == 0) cap = 1;

    bool symmetric = fields_all_zero(H) && H.size() >= 2;
    const Hamiltonian& kernel_problem_ref = H;
    Hamiltonian reduced;
    if (symmetric) reduced = pin_last_spin(H);
    const Hamiltonian& kp = symmetric ? reduced : kernel_problem_ref;

    Csr p(kp);
    ScanResult r = scan(p, cap, threads);

    BruteForceResult out;
    // Exact energies for the retained candidates via the reference evaluator.
    std::vector<SpinState> states;
    states.reserve(r.codes.size());
    for (std::uint64_t code : r.codes) {
        SpinState s = state_from_code(code, kp.size());
        if (symmetric) s.push_back(1);
        states.push_back(std::move(s));
    }
    double exact_min = kInf;
    std::vector<double> exact(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
        exact[i] = energy(H, states[i]);
        exact_min = std::min(exact_min, exact[i]);
    }
    out.ground_energy = exact_min;
    for (std::size_t i = 0; i < states.size(); ++i)
        if (exact[i] == exact_min && out.ground_states.size() < cap)
            out.ground_states.push_back(states[i]);
    if (symmetric) {
        std::vector<SpinState> mirrored;
        for (const SpinState& s : out.ground_states) {
            SpinState m(s.size());
            for (std::size_t i = 0; i < s.size(); ++i) m[i] = static_cast<std::int8_t>(-s[i]);
            mirrored.push_back(std::move(m));
        }
        for (auto& m : mirrored)
            if (out.ground_states.size() < cap) out.ground_states.push_back(std::move(m));
        out.degeneracy = 2 * r.count;
    } else {
        out.degeneracy = r.count;
    }
    out.truncated = out.degeneracy > out.ground_states.size();
    return out;
}

EnergyGapResult energy_gap(const Hamiltonian& H, int hard_limit, int threads) {
    if (H.size() < 1) throw ValidationError("cannot enumerate an empty problem");
    if (H.size() > hard_limit)
        throw ValidationError("problem size " + std::to_string(H.size()) +
                              " exceeds the brute-force limit " + std::to_string(hard_limit));

    bool symmetric = fields_all_zero(H) && H.size() >= 2;
    Hamiltonian reduced;
    if (symmetric) reduced = pin_last_spin(H);
    const Hamiltonian& kp = symmetric ? reduced : H;

    Csr p(kp);
    ScanResult r = scan(p, 1, threads);

    EnergyGapResult out;
    SpinState ground = state_from_code(r.codes.front(), kp.size());
    if (symmetric) ground.push_back(1);
    out.ground = energy(H, ground);
    if (r.has_second) {
        SpinState excited = state_from_code(r.second_code, kp.size());
        if (symmetric) excited.push_back(1);
        out.first_excited = energy(H, excited);
        out.has_gap = true;
    }
    return out;
}

}  // namespace qaemu
