#include "mola/energy.hpp"

namespace mola {

namespace {

// Resolve a Moore neighbor under the boundary rule. Returns false if the
// neighbor falls off an open map.
inline bool resolve(const LandUseGrid& grid, Boundary boundary, int i, int j, int& ni, int& nj) {
    if (boundary == Boundary::periodic) {
        ni = (i + grid.rows()) % grid.rows();
        nj = (j + grid.cols()) % grid.cols();
        return true;
    }
    ni = i;
    nj = j;
    return grid.in_bounds(i, j);
}

}  // namespace

double compactness_objective(const LandUseGrid& grid, Boundary boundary) {
    long matches = 0;
    for (int i = 0; i < grid.rows(); i++) {
        for (int j = 0; j < grid.cols(); j++) {
            const use_type s = grid.at(i, j);
            for (int k = 0; k < 8; k++) {
                int ni, nj;
                if (!resolve(grid, boundary, i + kMooreDi[k], j + kMooreDj[k], ni, nj)) continue;
                if (grid.at(ni, nj) == s) matches++;
            }
        }
    }
    return -static_cast<double>(matches);
}

double suitability_objective(const LandUseGrid& grid, const SuitabilityField& field) {
    require_compatible(grid, field);
    double sum = 0.0;
    for (int i = 0; i < grid.rows(); i++)
        for (int j = 0; j < grid.cols(); j++)
            sum += field.score(i, j, grid.at(i, j));
    return -sum;
}

EnergyBreakdown total_energy(const LandUseGrid& grid, const SuitabilityField& field,
                             const PrioritySet& priorities, Boundary boundary) {
    EnergyBreakdown e;
    e.compactness = compactness_objective(grid, boundary);
    e.suitability = suitability_objective(grid, field);
    e.total = priorities.compactness * e.compactness + priorities.suitability * e.suitability;
    return e;
}

FlipDelta delta_objectives_flip(const LandUseGrid& grid, const SuitabilityField& field,
                                const PrioritySet& priorities, int i, int j, use_type new_type,
                                Boundary boundary) {
    if (!grid.in_bounds(i, j))
        throw std::out_of_range("delta_energy_flip: cell out of bounds");
    if (new_type >= grid.types())
        throw std::invalid_argument("delta_energy_flip: type out of range");
    require_compatible(grid, field);

    const use_type old_type = grid.at(i, j);
    FlipDelta d;
    if (new_type == old_type) return d;

    // Each changed pair is counted from both endpoints in O1.
    int match_delta = 0;
    for (int k = 0; k < 8; k++) {
        int ni, nj;
        if (!resolve(grid, boundary, i + kMooreDi[k], j + kMooreDj[k], ni, nj)) continue;
        const use_type n = grid.at(ni, nj);
        if (n == new_type) match_delta++;
        if (n == old_type) match_delta--;
    }
    d.d_compactness = -2.0 * match_delta;
    d.d_suitability = -(field.score(i, j, new_type) - field.score(i, j, old_type));
    d.d_total = priorities.compactness * d.d_compactness + priorities.suitability * d.d_suitability;
    return d;
}

double delta_energy_flip(const LandUseGrid& grid, const SuitabilityField& field,
                         const PrioritySet& priorities, int i, int j, use_type new_type,
                         Boundary boundary) {
    return delta_objectives_flip(grid, field, priorities, i, j, new_type, boundary).d_total;
}

}  // namespace mola
