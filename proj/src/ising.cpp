#include "qaemu/ising.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "qaemu/errors.hpp"
#include "qaemu/textio.hpp"

namespace qaemu {

Hamiltonian::Hamiltonian(int n) : Hamiltonian(n, std::vector<double>(n, 0.0), {}) {}

Hamiltonian::Hamiltonian(int n, std::vector<double> fields, std::vector<Coupler> couplers,
                         std::optional<double> scale_alpha)
    : n_(n), scale_alpha_(scale_alpha) {
    if (n < 0) throw ValidationError("vertex count must be nonnegative");
    if (static_cast<int>(fields.size()) != n)
        throw DimensionError("field vector length does not match vertex count");
    if (scale_alpha_ && *scale_alpha_ <= 0.0)
        throw ValidationError("scale_alpha must be positive");
    h_ = std::move(fields);

    std::map<std::pair<int, int>, double> folded;
    for (const Coupler& c : couplers) {
        if (c.u < 0 || c.u >= n || c.v < 0 || c.v >= n)
            throw ValidationError("coupler endpoint out of range");
        if (c.u == c.v) throw ValidationError("self-couplings are not allowed");
        int u = std::min(c.u, c.v);
        int v = std::max(c.u, c.v);
        folded[{u, v}] += c.value;
    }
    couplers_.reserve(folded.size());
    for (const auto& [key, value] : folded) {
        if (value == 0.0) continue;
        couplers_.push_back({key.first, key.second, value});
    }

    adj_.resize(n_);
    for (const Coupler& c : couplers_) {
        adj_[c.u].emplace_back(c.v, c.value);
        adj_[c.v].emplace_back(c.u, c.value);
    }
}

double Hamiltonian::max_abs_weight() const {
    double m = 0.0;
    for (double x : h_) m = std::max(m, std::abs(x));
    for (const Coupler& c : couplers_) m = std::max(m, std::abs(c.value));
    return m;
}

bool Hamiltonian::all_zero() const { return max_abs_weight() == 0.0; }

bool Hamiltonian::hardware_ready() const { return max_abs_weight() <= 1.0; }

double energy(const Hamiltonian& H, const SpinState& s) {
    if (static_cast<int>(s.size()) != H.size())
        throw DimensionError("spin state length does not match problem size");
    double e = 0.0;
    const auto& h = H.fields();
    for (int u = 0; u < H.size(); ++u) e += h[u] * s[u];
    for (const Coupler& c : H.couplers()) e += c.value * s[c.u] * s[c.v];
    return e;
}

Hamiltonian apply_gauge(const Hamiltonian& H, const GaugeVector& g) {
    if (static_cast<int>(g.size()) != H.size())
        throw DimensionError("gauge vector length does not match problem size");
    std::vector<double> h = H.fields();
    for (int u = 0; u < H.size(); ++u) h[u] *= g[u];
    std::vector<Coupler> couplers = H.couplers();
    for (Coupler& c : couplers) c.value *= g[c.u] * g[c.v];
    return Hamiltonian(H.size(), std::move(h), std::move(couplers), H.scale_alpha());
}

SpinState gauge_state(const GaugeVector& g, const SpinState& s) {
    if (g.size() != s.size())
        throw DimensionError("gauge vector and spin state lengths differ");
    SpinState out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i)
        out[i] = static_cast<std::int8_t>(g[i] * s[i]);
    return out;
}

Hamiltonian scale_to_unit(const Hamiltonian& H) {
    double m = H.max_abs_weight();
    if (m == 0.0) throw ValidationError("cannot scale an all-zero Hamiltonian");
    return scale_by(H, 1.0 / m);
}

Hamiltonian scale_by(const Hamiltonian& H, double factor) {
    if (!(factor > 0.0)) throw ValidationError("scale factor must be positive");
    std::vector<double> h = H.fields();
    for (double& x : h) x *= factor;
    std::vector<Coupler> couplers = H.couplers();
    for (Coupler& c : couplers) c.value *= factor;
    double alpha = H.scale_alpha().value_or(1.0) * factor;
    return Hamiltonian(H.size(), std::move(h), std::move(couplers), alpha);
}

GaugeVector random_gauge(int n, Rng& rng) {
    GaugeVector g(n);
    for (int i = 0; i < n; ++i) g[i] = static_cast<std::int8_t>(rng.spin());
    return g;
}

SpinState random_state(int n, Rng& rng) {
    SpinState s(n);
    for (int i = 0; i < n; ++i) s[i] = static_cast<std::int8_t>(rng.spin());
    return s;
}

SpinState all_up(int n) { return SpinState(n, 1); }

void validate_state(const SpinState& s, int n) {
    if (static_cast<int>(s.size()) != n)
        throw DimensionError("spin state length does not match problem size");
    for (std::int8_t v : s)
        if (v != 1 && v != -1) throw ValidationError("spin entries must be -1 or +1");
}

std::vector<int> support(const Hamiltonian& H) {
    std::vector<char> used(H.size(), 0);
    for (int u = 0; u < H.size(); ++u)
        if (H.fields()[u] != 0.0) used[u] = 1;
    for (const Coupler& c : H.couplers()) used[c.u] = used[c.v] = 1;
    std::vector<int> out;
    for (int u = 0; u < H.size(); ++u)
        if (used[u]) out.push_back(u);
    return out;
}

Subproblem restrict_to_support(const Hamiltonian& H) {
    Subproblem sub;
    sub.vertex_map = support(H);
    std::vector<int> inverse(H.size(), -1);
    for (std::size_t i = 0; i < sub.vertex_map.size(); ++i) inverse[sub.vertex_map[i]] = static_cast<int>(i);
    std::vector<double> h(sub.vertex_map.size());
    for (std::size_t i = 0; i < sub.vertex_map.size(); ++i) h[i] = H.fields()[sub.vertex_map[i]];
    std::vector<Coupler> couplers;
    couplers.reserve(H.couplers().size());
    for (const Coupler& c : H.couplers())
        couplers.push_back({inverse[c.u], inverse[c.v], c.value});
    sub.problem = Hamiltonian(static_cast<int>(sub.vertex_map.size()), std::move(h),
                              std::move(couplers), H.scale_alpha());
    return sub;
}

void write_problem(std::ostream& os, const Hamiltonian& H) {
    os << H.size() << "\n";
    for (int u = 0; u < H.size(); ++u)
        if (H.fields()[u] != 0.0)
            os << u << " " << u << " " << format_double(H.fields()[u]) << "\n";
    for (const Coupler& c : H.couplers())
        os << c.u << " " << c.v << " " << format_double(c.value) << "\n";
}

Hamiltonian read_problem(std::istream& is) {
    std::string line;
    int line_no = 0;
    long long n = -1;
    std::vector<double> h;
    std::vector<Coupler> couplers;

    while (std::getline(is, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string a, b, c;
        if (!(ls >> a)) continue;  // blank line
        if (n < 0) {
            if (!parse_int(a, n) || n < 0 || (ls >> b))
                throw ParseError("expected header line with vertex count", line_no);
            h.assign(static_cast<std::size_t>(n), 0.0);
            continue;
        }
        if (!(ls >> b >> c))
            throw ParseError("expected `u v weight`", line_no);
        std::string extra;
        if (ls >> extra) throw ParseError("trailing tokens", line_no);
        long long u, v;
        double w;
        if (!parse_int(a, u) || !parse_int(b, v) || !parse_double(c, w))
            throw ParseError("malformed entry", line_no);
        if (u < 0 || u >= n || v < 0 || v >= n)
            throw ParseError("vertex index out of range", line_no);
        if (u == v) {
            h[static_cast<std::size_t>(u)] += w;
        } else {
            couplers.push_back({static_cast<int>(u), static_cast<int>(v), w});
        }
    }
    if (n < 0) throw ParseError("missing header line", line_no == 0 ? 1 : line_no);
    return Hamiltonian(static_cast<int>(n), std::move(h), std::move(couplers));
}

void save_problem(const std::string& path, const Hamiltonian& H) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    write_problem(f, H);
}

Hamiltonian load_problem(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open: " + path);
    return read_problem(f);
}

}  // namespace qaemu
