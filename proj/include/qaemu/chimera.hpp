#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace qaemu {

/// A Chimera hardware graph: a k x k grid of K_{4,4} cells with a possibly
/// reduced working set of qubits and couplers.
///
/// Vertex labeling: id = 8*(k*row + col) + 4*orientation + index, with
/// orientation 0 ("horizontal") coupling to the cells left and right and
/// orientation 1 ("vertical") coupling to the cells above and below. Within a
/// cell the two orientations form the sides of the K_{4,4}; inter-cell
/// couplers match equal orientation and equal index in adjacent cells.
class ChimeraGraph {
  public:
    struct Coord {
        int row, col, orientation, index;
    };

    /// Full C_k with all 8k^2 qubits and all couplers active.
    static ChimeraGraph full(int k);

    /// Working graph with exactly the listed elements active. Every listed
    /// qubit and coupler must exist in the full C_k.
    static ChimeraGraph from_elements(int k, const std::vector<int>& qubits,
                                      const std::vector<std::pair<int, int>>& couplers);

    int grid() const { return k_; }
    int full_vertex_count() const { return 8 * k_ * k_; }
    int num_qubits() const { return static_cast<int>(qubits_.size()); }
    int num_couplers() const { return static_cast<int>(couplers_.size()); }

    bool qubit_active(int id) const;
    bool has_coupler(int u, int v) const;

    const std::vector<int>& qubits() const { return qubits_; }
    const std::vector<std::pair<int, int>>& couplers() const { return couplers_; }
    const std::vector<int>& neighbors(int id) const;

    int degree(int id) const { return static_cast<int>(neighbors(id).size()); }

    static int vertex_id(int k, int row, int col, int orientation, int index);
    Coord coord(int id) const;
    int cell_of(int id) const { return id / 8; }

  private:
    int k_ = 0;
    std::vector<char> active_;
    std::vector<int> qubits_;                     // sorted active ids
    std::vector<std::pair<int, int>> couplers_;   // sorted, u < v
    std::vector<std::vector<int>> adj_;

    void build_adjacency();
};

/// Removes a uniform random subset of `dead_qubits` active qubits together
/// with their incident couplers. Deterministic per seed.
ChimeraGraph random_yield(const ChimeraGraph& g, int dead_qubits, std::uint64_t seed);

// Working-graph text format: `chimera k`, then `q <id>` per active qubit and
// `c <u> <v>` per active coupler.
void write_working_graph(std::ostream& os, const ChimeraGraph& g);
ChimeraGraph read_working_graph(std::istream& is);
void save_working_graph(const std::string& path, const ChimeraGraph& g);
ChimeraGraph load_working_graph(const std::string& path);

}  // namespace qaemu
