#include "qaemu/chimera.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "qaemu/errors.hpp"
#include "qaemu/rng.hpp"
#include "qaemu/textio.hpp"

namespace qaemu {

int ChimeraGraph::vertex_id(int k, int row, int col, int orientation, int index) {
    return 8 * (k * row + col) + 4 * orientation + index;
}

ChimeraGraph::Coord ChimeraGraph::coord(int id) const {
    Coord c;
    int cell = id / 8;
    int within = id % 8;
    c.row = cell / k_;
    c.col = cell % k_;
    c.orientation = within / 4;
    c.index = within % 4;
    return c;
}

ChimeraGraph ChimeraGraph::full(int k) {
    if (k < 1) throw ValidationError("Chimera grid dimension must be at least 1");
    ChimeraGraph g;
    g.k_ = k;
    int n = 8 * k * k;
    g.active_.assign(n, 1);
    g.qubits_.resize(n);
    for (int i = 0; i < n; ++i) g.qubits_[i] = i;

    for (int row = 0; row < k; ++row) {
        for (int col = 0; col < k; ++col) {
            // K_{4,4} between the two orientations of the cell.
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j)
                    g.couplers_.emplace_back(vertex_id(k, row, col, 0, i),
                                             vertex_id(k, row, col, 1, j));
            // Matchings to the next cell along each direction.
            if (col + 1 < k)
                for (int i = 0; i < 4; ++i)
                    g.couplers_.emplace_back(vertex_id(k, row, col, 0, i),
                                             vertex_id(k, row, col + 1, 0, i));
            if (row + 1 < k)
                for (int i = 0; i < 4; ++i)
                    g.couplers_.emplace_back(vertex_id(k, row, col, 1, i),
                                             vertex_id(k, row + 1, col, 1, i));
        }
    }
    for (auto& c : g.couplers_)
        if (c.first > c.second) std::swap(c.first, c.second);
    std::sort(g.couplers_.begin(), g.couplers_.end());
    g.build_adjacency();
    return g;
}

ChimeraGraph ChimeraGraph::from_elements(int k, const std::vector<int>& qubits,
                                         const std::vector<std::pair<int, int>>& couplers) {
    ChimeraGraph base = full(k);
    ChimeraGraph g;
    g.k_ = k;
    g.active_.assign(8 * k * k, 0);
    for (int q : qubits) {
        if (q < 0 || q >= 8 * k * k)
            throw ValidationError("qubit id outside the full Chimera graph");
        g.active_[q] = 1;
    }
    for (int q = 0; q < 8 * k * k; ++q)
        if (g.active_[q]) g.qubits_.push_back(q);

    for (auto [u, v] : couplers) {
        if (u > v) std::swap(u, v);
        if (!base.has_coupler(u, v))
            throw ValidationError("coupler does not exist in the full Chimera graph");
        if (!g.active_[u] || !g.active_[v])
            throw ValidationError("coupler references an inactive qubit");
        g.couplers_.emplace_back(u, v);
    }
    std::sort(g.couplers_.begin(), g.couplers_.end());
    g.couplers_.erase(std::unique(g.couplers_.begin(), g.couplers_.end()), g.couplers_.end());
    g.build_adjacency();
    return g;
}

void ChimeraGraph::build_adjacency() {
    adj_.assign(8 * k_ * k_, {});
    for (auto [u, v] : couplers_) {
        adj_[u].push_back(v);
        adj_[v].push_back(u);
    }
    for (auto& nb : adj_) std::sort(nb.begin(), nb.end());
}

bool ChimeraGraph::qubit_active(int id) const {
    return id >= 0 && id < static_cast<int>(active_.size()) && active_[id];
}

bool ChimeraGraph::has_coupler(int u, int v) const {
    if (u > v) std::swap(u, v);
    return std::binary_search(couplers_.begin(), couplers_.end(), std::make_pair(u, v));
}

const std::vector<int>& ChimeraGraph::neighbors(int id) const {
    if (id < 0 || id >= static_cast<int>(adj_.size()))
        throw ValidationError("vertex id outside the full Chimera graph");
    return adj_[id];
}

ChimeraGraph random_yield(const ChimeraGraph& g, int dead_qubits, std::uint64_t seed) {
    if (dead_qubits < 0 || dead_qubits > g.num_qubits())
        throw ValidationError("dead qubit count exceeds active qubit count");
    std::vector<int> pool = g.qubits();
    Rng rng(mix_seed(seed, {0x79696c64ULL}));
    // Partial Fisher-Yates: the first dead_qubits entries are the removals.
    for (int i = 0; i < dead_qubits; ++i) {
        std::size_t j = i + rng.below(pool.size() - i);
        std::swap(pool[i], pool[j]);
    }
    std::vector<char> dead(8 * g.grid() * g.grid(), 0);
    for (int i = 0; i < dead_qubits; ++i) dead[pool[i]] = 1;

    std::vector<int> qubits;
    for (int q : g.qubits())
        if (!dead[q]) qubits.push_back(q);
    std::vector<std::pair<int, int>> couplers;
    for (auto [u, v] : g.couplers())
        if (!dead[u] && !dead[v]) couplers.emplace_back(u, v);
    return ChimeraGraph::from_elements(g.grid(), qubits, couplers);
}

void write_working_graph(std::ostream& os, const ChimeraGraph& g) {
    os << "chimera " << g.grid() << "\n";
    for (int q : g.qubits()) os << "q " << q << "\n";
    for (auto [u, v] : g.couplers()) os << "c " << u << " " << v << "\n";
}

ChimeraGraph read_working_graph(std::istream& is) {
    std::string line;
    int line_no = 0;
    long long k = -1;
    std::vector<int> qubits;
    std::vector<std::pair<int, int>> couplers;
    while (std::getline(is, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag)) continue;
        if (k < 0) {
            std::string kv;
            if (tag != "chimera" || !(ls >> kv))
                throw ParseError("expected `chimera k` header", line_no);
            if (!parse_int(kv, k) || k < 1)
                throw ParseError("invalid grid dimension", line_no);
            continue;
        }
        if (tag == "q") {
            std::string a;
            if (!(ls >> a)) throw ParseError("expected `q <id>`", line_no);
            long long id;
            if (!parse_int(a, id)) throw ParseError("malformed qubit id", line_no);
            qubits.push_back(static_cast<int>(id));
        } else if (tag == "c") {
            std::string a, b;
            if (!(ls >> a >> b)) throw ParseError("expected `c <u> <v>`", line_no);
            long long u, v;
            if (!parse_int(a, u) || !parse_int(b, v))
                throw ParseError("malformed coupler", line_no);
            couplers.emplace_back(static_cast<int>(u), static_cast<int>(v));
        } else {
            throw ParseError("unknown record tag `" + tag + "`", line_no);
        }
    }
    if (k < 0) throw ParseError("missing `chimera k` header", 1);
    return ChimeraGraph::from_elements(static_cast<int>(k), qubits, couplers);
}

void save_working_graph(const std::string& path, const ChimeraGraph& g) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    write_working_graph(f, g);
}

ChimeraGraph load_working_graph(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open: " + path);
    return read_working_graph(f);
}

}  // namespace qaemu
