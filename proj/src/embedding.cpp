#include "qaemu/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <set>
#include <sstream>

#include "qaemu/errors.hpp"
#include "qaemu/textio.hpp"

namespace qaemu {

int Embedding::qubits_used() const {
    int total = 0;
    for (const auto& chain : chains) total += static_cast<int>(chain.size());
    return total;
}

int Embedding::chain_of(int q) const {
    for (std::size_t i = 0; i < chains.size(); ++i)
        if (std::binary_search(chains[i].begin(), chains[i].end(), q))
            return static_cast<int>(i);
    return -1;
}

namespace {

bool chain_connected(const std::vector<int>& chain, const ChimeraGraph& g) {
    if (chain.empty()) return false;
    if (chain.size() == 1) return true;
    std::set<int> members(chain.begin(), chain.end());
    std::vector<int> stack{chain.front()};
    std::set<int> seen{chain.front()};
    while (!stack.empty()) {
        int q = stack.back();
        stack.pop_back();
        for (int nb : g.neighbors(q)) {
            if (members.count(nb) && !seen.count(nb)) {
                seen.insert(nb);
                stack.push_back(nb);
            }
        }
    }
    return seen.size() == members.size();
}

bool chains_coupled(const std::vector<int>& a, const std::vector<int>& b, const ChimeraGraph& g) {
    for (int u : a)
        for (int v : b)
            if (g.has_coupler(u, v)) return true;
    return false;
}

}  // namespace

void validate_embedding(const Embedding& emb,
                        const std::vector<std::pair<int, int>>& logical_edges) {
    if (!emb.target) throw ValidationError("embedding has no target graph");
    const ChimeraGraph& g = *emb.target;
    std::set<int> used;
    for (std::size_t i = 0; i < emb.chains.size(); ++i) {
        const auto& chain = emb.chains[i];
        if (chain.empty())
            throw ValidationError("chain " + std::to_string(i) + " is empty");
        for (int q : chain) {
            if (!g.qubit_active(q))
                throw ValidationError("chain " + std::to_string(i) + " uses inactive qubit " +
                                      std::to_string(q));
            if (!used.insert(q).second)
                throw ValidationError("qubit " + std::to_string(q) + " appears in two chains");
        }
        if (!chain_connected(chain, g))
            throw ValidationError("chain " + std::to_string(i) + " is not connected");
    }
    for (auto [a, b] : logical_edges) {
        if (a < 0 || b < 0 || a >= emb.source_n() || b >= emb.source_n())
            throw ValidationError("logical edge endpoint outside the embedding");
        if (!chains_coupled(emb.chains[a], emb.chains[b], g))
            throw ValidationError("no coupler between chains " + std::to_string(a) + " and " +
                                  std::to_string(b));
    }
}

Embedding choi_clique_embedding(std::shared_ptr<const ChimeraGraph> target) {
    if (!target) throw ValidationError("null target graph");
    int k = target->grid();
    Embedding emb;
    emb.target = target;
    emb.chains.resize(4 * k);
    for (int b = 0; b < k; ++b) {
        for (int i = 0; i < 4; ++i) {
            std::vector<int>& chain = emb.chains[4 * b + i];
            for (int col = b; col < k; ++col)
                chain.push_back(ChimeraGraph::vertex_id(k, b, col, 0, i));
            for (int row = 0; row <= b; ++row)
                chain.push_back(ChimeraGraph::vertex_id(k, row, b, 1, i));
            std::sort(chain.begin(), chain.end());
            for (int q : chain)
                if (!target->qubit_active(q))
                    throw ValidationError("clique embedding infeasible: qubit " +
                                          std::to_string(q) + " is inactive");
        }
    }
    std::vector<std::pair<int, int>> clique_edges;
    for (int a = 0; a < 4 * k; ++a)
        for (int b = a + 1; b < 4 * k; ++b) clique_edges.emplace_back(a, b);
    validate_embedding(emb, clique_edges);
    return emb;
}

Embedding choi_clique_embedding(int k) {
    return choi_clique_embedding(std::make_shared<ChimeraGraph>(ChimeraGraph::full(k)));
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Router {
    const ChimeraGraph& g;
    int V;
    double penalty;
    std::vector<int> usage;

    double weight(int q) const {
        if (!g.qubit_active(q)) return kInf;
        if (usage[q] == 0) return 1.0;
        return std::pow(penalty, std::min(usage[q], 8));
    }

    // Cheapest paths from the super-source `chain` to every other vertex.
    // dist[q] counts the weights of path vertices outside the chain, q
    // included; parent[q] steps back toward the chain (-1 = adjacent to it).
    void dijkstra(const std::vector<int>& chain, std::vector<double>& dist,
                  std::vector<int>& parent) const {
        dist.assign(V, kInf);
        parent.assign(V, -2);
        std::vector<char> in_chain(V, 0), done(V, 0);
        for (int q : chain) in_chain[q] = done[q] = 1;
        using Item = std::pair<double, int>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
        for (int q : chain) {
            for (int nb : g.neighbors(q)) {
                if (in_chain[nb]) continue;
                double w = weight(nb);
                if (w < dist[nb]) {
                    dist[nb] = w;
                    parent[nb] = -1;
                    pq.emplace(w, nb);
                }
            }
        }
        while (!pq.empty()) {
            auto [d, q] = pq.top();
            pq.pop();
            if (done[q] || d > dist[q]) continue;
            done[q] = 1;
            for (int nb : g.neighbors(q)) {
                if (done[nb] || in_chain[nb]) continue;
                double cand = d + weight(nb);
                if (cand < dist[nb]) {
                    dist[nb] = cand;
                    parent[nb] = q;
                    pq.emplace(cand, nb);
                }
            }
        }
    }
};

// Drops chain qubits that are not needed for connectivity or for coupling to
// any logical neighbor; keeps chains lean after routing succeeds.
void trim_chains(std::vector<std::vector<int>>& chains,
                 const std::vector<std::vector<int>>& adj0, const ChimeraGraph& g) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t x = 0; x < chains.size(); ++x) {
            auto& chain = chains[x];
            if (chain.size() <= 1) continue;
            for (std::size_t qi = 0; qi < chain.size(); ++qi) {
                std::vector<int> reduced;
                reduced.reserve(chain.size() - 1);
                for (std::size_t t = 0; t < chain.size(); ++t)
                    if (t != qi) reduced.push_back(chain[t]);
                if (!chain_connected(reduced, g)) continue;
                bool covers = true;
                for (int y : adj0[x]) {
                    if (!chains_coupled(reduced, chains[y], g)) {
                        covers = false;
                        break;
                    }
                }
                if (!covers) continue;
                chain = reduced;
                changed = true;
                break;  // rescan this chain from the start
            }
        }
    }
}

}  // namespace

std::optional<Embedding> find_embedding(int n0,
                                        const std::vector<std::pair<int, int>>& logical_edges,
                                        std::shared_ptr<const ChimeraGraph> target,
                                        const EmbedderOptions& options) {
    if (n0 <= 0) throw ValidationError("logical graph must be nonempty");
    if (!target) throw ValidationError("null target graph");
    const ChimeraGraph& g = *target;
    if (n0 > g.num_qubits()) return std::nullopt;

    std::vector<std::vector<int>> adj0(n0);
    for (auto [a, b] : logical_edges) {
        if (a < 0 || b < 0 || a >= n0 || b >= n0 || a == b)
            throw ValidationError("invalid logical edge");
        adj0[a].push_back(b);
        adj0[b].push_back(a);
    }
    for (auto& nb : adj0) {
        std::sort(nb.begin(), nb.end());
        nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    }

    const int V = g.full_vertex_count();
    for (int attempt = 0; attempt < options.max_tries; ++attempt) {
        Rng rng(mix_seed(options.seed, {0xe3bedULL, static_cast<std::uint64_t>(attempt)}));
        Router router{g, V, options.penalty, std::vector<int>(V, 0)};
        std::vector<std::vector<int>> chains(n0);

        std::vector<int> order(n0);
        for (int i = 0; i < n0; ++i) order[i] = i;

        bool failed = false;
        bool success = false;
        for (int pass = 0; pass < options.max_passes && !failed; ++pass) {
            for (std::size_t i = order.size(); i > 1; --i)
                std::swap(order[i - 1], order[rng.below(i)]);

            for (int x : order) {
                for (int q : chains[x]) --router.usage[q];
                chains[x].clear();

                std::vector<int> embedded;
                for (int y : adj0[x])
                    if (!chains[y].empty()) embedded.push_back(y);

                std::set<int> chain;
                if (embedded.empty()) {
                    // Seed at a random free qubit, falling back to any active one.
                    std::vector<int> free_qubits;
                    for (int q : g.qubits())
                        if (router.usage[q] == 0) free_qubits.push_back(q);
                    const std::vector<int>& pool = free_qubits.empty() ? g.qubits() : free_qubits;
                    chain.insert(pool[rng.below(pool.size())]);
                } else {
                    std::size_t m = embedded.size();
                    std::vector<std::vector<double>> dist(m);
                    std::vector<std::vector<int>> parent(m);
                    for (std::size_t yi = 0; yi < m; ++yi)
                        router.dijkstra(chains[embedded[yi]], dist[yi], parent[yi]);

                    int root = -1;
                    double best = kInf;
                    for (int q = 0; q < V; ++q) {
                        if (!g.qubit_active(q)) continue;
                        double total = 0.0;
                        for (std::size_t yi = 0; yi < m; ++yi) {
                            total += dist[yi][q];
                            if (total == kInf) break;
                        }
                        if (total == kInf) continue;
                        total -= (static_cast<double>(m) - 1.0) * router.weight(q);
                        if (total < best) {
                            best = total;
                            root = q;
                        }
                    }
                    if (root < 0) {
                        failed = true;  // neighbors unreachable; restart
                        break;
                    }
                    chain.insert(root);
                    for (std::size_t yi = 0; yi < m; ++yi) {
                        int cur = root;
                        while (true) {
                            chain.insert(cur);
                            if (parent[yi][cur] == -1 || parent[yi][cur] == -2) break;
                            cur = parent[yi][cur];
                        }
                    }
                }
                chains[x].assign(chain.begin(), chain.end());
                for (int q : chains[x]) ++router.usage[q];
            }
            if (failed) break;

            int max_usage = 0;
            for (int q = 0; q < V; ++q) max_usage = std::max(max_usage, router.usage[q]);
            if (max_usage <= 1) {
                success = true;
                break;
            }
        }
        if (!success) continue;

        trim_chains(chains, adj0, g);
        Embedding emb;
        emb.chains = std::move(chains);
        emb.target = target;
        validate_embedding(emb, logical_edges);
        return emb;
    }
    return std::nullopt;
}

EmbeddedProblem embed(const Hamiltonian& logical, const Embedding& emb, double kappa) {
    if (kappa <= 0.0) throw ValidationError("chain strength must be positive");
    if (logical.size() != emb.source_n())
        throw DimensionError("logical problem size does not match embedding");
    if (!emb.target) throw ValidationError("embedding has no target graph");
    const ChimeraGraph& g = *emb.target;

    EmbeddedProblem ep;
    ep.logical = logical;
    ep.embedding = emb;
    ep.kappa = kappa;

    const int V = g.full_vertex_count();
    ep.hardware_fields.assign(V, 0.0);
    for (int i = 0; i < logical.size(); ++i) {
        const auto& chain = emb.chains[i];
        if (chain.empty())
            throw ValidationError("chain " + std::to_string(i) + " is empty");
        double share = logical.fields()[i] / static_cast<double>(chain.size());
        for (int q : chain) ep.hardware_fields[q] = share;
    }

    // Each logical coupling goes on the lexicographically first coupler
    // between the two chains.
    for (const Coupler& c : logical.couplers()) {
        int bu = -1, bv = -1;
        for (int u : emb.chains[c.u]) {
            for (int v : emb.chains[c.v]) {
                int a = std::min(u, v), b = std::max(u, v);
                if (!g.has_coupler(a, b)) continue;
                if (bu < 0 || std::make_pair(a, b) < std::make_pair(bu, bv)) {
                    bu = a;
                    bv = b;
                }
            }
        }
        if (bu < 0)
            throw ValidationError("embedding does not cover logical edge (" +
                                  std::to_string(c.u) + ", " + std::to_string(c.v) + ")");
        ep.problem_couplers.push_back({bu, bv, c.value});
    }

    ep.chain_couplers = chain_tree_couplers(emb, kappa);

    std::vector<Coupler> all = ep.problem_couplers;
    all.insert(all.end(), ep.chain_couplers.begin(), ep.chain_couplers.end());
    Hamiltonian raw(V, ep.hardware_fields, std::move(all));
    if (raw.all_zero()) {
        ep.hardware = raw;
        ep.alpha = 1.0;
    } else {
        ep.hardware = scale_to_unit(raw);
        ep.alpha = ep.hardware.scale_alpha().value();
    }
    return ep;
}

std::vector<Coupler> chain_tree_couplers(const Embedding& emb, double kappa) {
    if (kappa <= 0.0) throw ValidationError("chain strength must be positive");
    if (!emb.target) throw ValidationError("embedding has no target graph");
    const ChimeraGraph& g = *emb.target;
    std::vector<Coupler> out;
    for (const auto& chain : emb.chains) {
        if (chain.size() <= 1) continue;
        std::set<int> members(chain.begin(), chain.end());
        std::set<int> seen{chain.front()};
        std::vector<int> frontier{chain.front()};
        while (!frontier.empty()) {
            std::vector<int> next;
            for (int q : frontier) {
                for (int nb : g.neighbors(q)) {
                    if (!members.count(nb) || seen.count(nb)) continue;
                    seen.insert(nb);
                    out.push_back({std::min(q, nb), std::max(q, nb), -kappa});
                    next.push_back(nb);
                }
            }
            frontier = std::move(next);
        }
        if (seen.size() != members.size())
            throw ValidationError("chain is not connected in the target graph");
    }
    return out;
}

std::vector<int> broken_chains(const SpinState& hardware_state, const Embedding& emb) {
    if (!emb.target) throw ValidationError("embedding has no target graph");
    if (static_cast<int>(hardware_state.size()) != emb.target->full_vertex_count())
        throw DimensionError("hardware state length does not match target graph");
    std::vector<int> broken;
    for (int i = 0; i < emb.source_n(); ++i) {
        const auto& chain = emb.chains[i];
        std::int8_t first = hardware_state[chain.front()];
        for (int q : chain) {
            if (hardware_state[q] != first) {
                broken.push_back(i);
                break;
            }
        }
    }
    return broken;
}

std::optional<SpinState> unembed(const SpinState& hardware_state, const Embedding& emb,
                                 UnembedPolicy policy, Rng& rng) {
    if (!emb.target) throw ValidationError("embedding has no target graph");
    if (static_cast<int>(hardware_state.size()) != emb.target->full_vertex_count())
        throw DimensionError("hardware state length does not match target graph");
    SpinState logical(emb.source_n());
    for (int i = 0; i < emb.source_n(); ++i) {
        const auto& chain = emb.chains[i];
        int up = 0;
        for (int q : chain)
            if (hardware_state[q] > 0) ++up;
        int down = static_cast<int>(chain.size()) - up;
        if (policy == UnembedPolicy::discard) {
            if (up != 0 && down != 0) return std::nullopt;
            logical[i] = up > 0 ? 1 : -1;
        } else {
            if (up > down)
                logical[i] = 1;
            else if (down > up)
                logical[i] = -1;
            else
                logical[i] = static_cast<std::int8_t>(rng.spin());
        }
    }
    return logical;
}

void write_embedding(std::ostream& os, const Embedding& emb) {
    for (int i = 0; i < emb.source_n(); ++i) {
        os << i << ":";
        for (int q : emb.chains[i]) os << " " << q;
        os << "\n";
    }
}

Embedding read_embedding(std::istream& is, std::shared_ptr<const ChimeraGraph> target) {
    std::string line;
    int line_no = 0;
    std::vector<std::pair<int, std::vector<int>>> entries;
    int max_var = -1;
    while (std::getline(is, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto colon = line.find(':');
        if (colon == std::string::npos) throw ParseError("expected `var: q1 q2 ...`", line_no);
        long long var;
        std::string head = line.substr(0, colon);
        std::istringstream hs(head);
        std::string tok;
        if (!(hs >> tok) || !parse_int(tok, var) || var < 0 || (hs >> tok))
            throw ParseError("malformed variable index", line_no);
        std::istringstream qs(line.substr(colon + 1));
        std::vector<int> chain;
        while (qs >> tok) {
            long long q;
            if (!parse_int(tok, q)) throw ParseError("malformed qubit id", line_no);
            chain.push_back(static_cast<int>(q));
        }
        if (chain.empty()) throw ParseError("empty chain", line_no);
        std::sort(chain.begin(), chain.end());
        entries.emplace_back(static_cast<int>(var), std::move(chain));
        max_var = std::max(max_var, static_cast<int>(var));
    }
    Embedding emb;
    emb.target = std::move(target);
    emb.chains.resize(max_var + 1);
    std::vector<char> seen(max_var + 1, 0);
    for (auto& [var, chain] : entries) {
        if (seen[var]) throw ParseError("variable " + std::to_string(var) + " repeated", 0);
        seen[var] = 1;
        emb.chains[var] = std::move(chain);
    }
    for (int i = 0; i <= max_var; ++i)
        if (!seen[i])
            throw ValidationError("embedding file missing variable " + std::to_string(i));
    return emb;
}

void save_embedding(const std::string& path, const Embedding& emb) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    write_embedding(f, emb);
}

Embedding load_embedding(const std::string& path, std::shared_ptr<const ChimeraGraph> target) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open: " + path);
    return read_embedding(f, std::move(target));
}

}  // namespace qaemu
