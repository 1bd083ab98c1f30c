#pragma once

#include "mola/grid.hpp"

namespace mola {

// Offsets of the 8-cell Moore neighborhood.
inline constexpr int kMooreDi[8] = {-1, -1, -1, 0, 0, 1, 1, 1};
inline constexpr int kMooreDj[8] = {-1, 0, 1, -1, 1, -1, 0, 1};

// O1 = -sum_ijs b_ijs x_ijs: minus the count of same-type Moore neighbors
// summed over all cells, so each matching adjacent pair contributes -2.
// Open boundaries drop out-of-range neighbors; periodic wraps them.
double compactness_objective(const LandUseGrid& grid, Boundary boundary = Boundary::open);

// O2 = -sum_ij c_{ij,s(i,j)}.
double suitability_objective(const LandUseGrid& grid, const SuitabilityField& field);

// (O1, O2, H) with H = P_C*O1 + P_S*O2.
EnergyBreakdown total_energy(const LandUseGrid& grid, const SuitabilityField& field,
                             const PrioritySet& priorities, Boundary boundary = Boundary::open);

// H(grid with cell (i,j) set to new_type) - H(grid), from the Moore
// neighborhood and the cell's suitability row only.
double delta_energy_flip(const LandUseGrid& grid, const SuitabilityField& field,
                         const PrioritySet& priorities, int i, int j, use_type new_type,
                         Boundary boundary = Boundary::open);

// Same split as delta_energy_flip but reporting the objective deltas
// separately; used by samplers to keep incremental energy bookkeeping.
struct FlipDelta {
    double d_compactness = 0.0;
    double d_suitability = 0.0;
    double d_total = 0.0;
};
FlipDelta delta_objectives_flip(const LandUseGrid& grid, const SuitabilityField& field,
                                const PrioritySet& priorities, int i, int j, use_type new_type,
                                Boundary boundary = Boundary::open);

}  // namespace mola
