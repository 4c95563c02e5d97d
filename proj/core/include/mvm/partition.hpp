#pragma once

#include <memory>
#include <vector>

#include "mvm/measure.hpp"

namespace mvm {

/// Piecewise-linear partition of unity on the real line at resolution n.
///
/// Interior cells are tents of half-width h = 1/(2n) centred on the grid
/// {k h : |k h| <= n}, so every interior cell has diameter exactly 1/n. Two
/// exterior cells cover |x| > n: their hats ramp from 0 at +-n to 1 at
/// +-(n + h) and stay 1 beyond. Each cell carries a representative point,
/// the point of the closed cell nearest the origin (0 for cells containing
/// the origin, +-n for the exterior cells).
///
/// Cheap to copy; all state is shared and immutable.
class Partition {
public:
    std::size_t cell_count() const { return data_->reps.size(); }
    int resolution() const { return data_->n; }
    double mesh() const { return data_->h; }

    double rep(std::size_t i) const { return data_->reps[i]; }

    /// Hat function of cell i at x.
    double hat(std::size_t i, double x) const;

    /// Indices of the cells whose hat is nonzero at x (at most three).
    std::vector<std::size_t> active_cells(double x) const;

private:
    friend Partition build_partition(int n);
    struct Data {
        int n;
        double h;
        long k_max;               // interior tents run over k in [-k_max, k_max]
        std::vector<double> reps; // index 0: exterior left, then tents, last: exterior right
    };
    std::shared_ptr<const Data> data_;
};

/// Build the resolution-n partition. Throws ArgumentError for n <= 0.
Partition build_partition(int n);

/// T_n phi: x -> sum_i phi(rep_i) hat_i(x). phi is evaluated once per cell.
ScalarField apply_tn(const Partition& part, const ScalarField& phi);

/// T_n* mu: probability measure sum_i mu(hat_i) delta_{rep_i}; atoms sharing
/// a representative are merged.
AtomicMeasure apply_tn_star(const Partition& part, const AtomicMeasure& mu);

} // namespace mvm
