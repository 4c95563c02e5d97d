#pragma once

#include <memory>
#include <span>
#include <vector>

#include "mvm/measure.hpp"

namespace mvm {

/// Regular grid on the probability simplex over a fixed support of size N:
/// all weight vectors k/M with k a nonnegative integer composition of M.
/// Nodes are stored in descending lexicographic order of their compositions,
/// so node 0 is the vertex delta_{x_1}.
///
/// Interpolation is piecewise linear on the Kuhn-Freudenthal subdivision:
/// the query point is mapped to cumulative coordinates s_i = M (p_1+...+p_i),
/// where the grid cell and its containing simplex are found by sorting the
/// fractional parts; the resulting weights are nonnegative, sum to one,
/// reproduce linear functions exactly and interpolate nodal values exactly.
class SimplexGrid {
public:
    /// Throws ArgumentError if M < 1 or N < 2, and a resource guard if the
    /// node count would exceed 10^7.
    static SimplexGrid build(Support support, int M);

    const Support& support() const { return data_->support; }
    int resolution() const { return data_->M; }
    std::size_t n_atoms() const { return data_->support.size(); }
    std::size_t node_count() const { return data_->comps.size() / n_atoms(); }

    /// Integer composition of node `idx` (N entries summing to M).
    std::span<const int> node(std::size_t idx) const {
        return {data_->comps.data() + idx * n_atoms(), n_atoms()};
    }
    /// Barycentric point k/M of node `idx`.
    std::vector<double> node_point(std::size_t idx) const;
    /// The probability measure carried by node `idx`.
    AtomicMeasure node_measure(std::size_t idx) const;

    /// Index of the node with the given composition (binary search).
    std::size_t index_of(std::span<const int> comp) const;

    /// True if the node is a simplex vertex (all mass on one atom).
    bool is_vertex(std::size_t idx) const;
    /// Node index of the vertex with all mass on atom i.
    std::size_t vertex_node(std::size_t atom) const { return data_->vertices[atom]; }

    /// Nearest grid node to p (componentwise rounding with largest-remainder
    /// correction).
    std::size_t nearest_node(std::span<const double> p) const;

    /// Interpolation stencil at p: pairs (node index, weight), weights >= 0
    /// summing to 1. p must have nonnegative coordinates summing to 1 within
    /// 1e-9; it is renormalised internally.
    std::vector<std::pair<std::size_t, double>> stencil(std::span<const double> p) const;

    /// Interpolate a nodal value field at p.
    double interpolate(std::span<const double> values, std::span<const double> p) const;

private:
    struct Data {
        Support support;
        int M;
        std::vector<int> comps;            // node-major compositions
        std::vector<std::size_t> vertices; // vertex node index per atom
    };
    std::shared_ptr<const Data> data_;
};

} // namespace mvm
