#pragma once

#include <optional>
#include <vector>

#include "mola/grid.hpp"

namespace mola {

// Boolean parcel membership with the derived droplet geometry.
class RegionMask {
public:
    RegionMask(int rows, int cols) : rows_(rows), cols_(cols),
        member_(static_cast<std::size_t>(rows) * cols, 0) {
        if (rows < 1 || cols < 1)
            throw std::invalid_argument("RegionMask: dims must be >= 1");
    }

    // Axis-aligned solid rectangle [i0, i0+h) x [j0, j0+w).
    static RegionMask rectangle(int rows, int cols, int i0, int j0, int h, int w);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool at(int i, int j) const { return member_[idx(i, j)] != 0; }
    void set(int i, int j, bool m) { member_[idx(i, j)] = m ? 1 : 0; }

    std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i) * cols_ + j; }

private:
    int rows_ = 0, cols_ = 0;
    std::vector<std::uint8_t> member_;
};

enum class BoundaryMode { four_neighbor, moore_pairs };

// A = member count; L = exposed 4-neighbor parcel edges, map edges counted
// as exposed.
struct Geometry {
    long boundary = 0;  // L
    long area = 0;      // A
};
Geometry boundary_and_area(const RegionMask& mask);

// In-bounds Moore-adjacent (member, non-member) pairs; matches the count of
// same-type pairs broken by flipping the region inside a uniform map.
long moore_boundary_pairs(const RegionMask& mask);

struct NucleationEstimate {
    double delta_e_m = 0.0;  // per unit boundary length
    double delta_e_o = 0.0;  // per unit area
    double delta_f = 0.0;    // delta_e_m*L - delta_e_o*A
    bool flips = false;      // delta_f < 0
};
NucleationEstimate nucleation_estimate(const RegionMask& mask, double delta_e_m, double delta_e_o);

// Minimum per-area on-site gain for which reallocating the region pays:
// delta_E_M * L / A.
double flip_threshold(const RegionMask& mask, double delta_e_m);

struct FlashpointPrediction {
    double p_s_star = 0.0;
    double margin = 0.0;       // mean on-site gain m over the region
    long boundary = 0;         // L used (mode-dependent)
    long area = 0;
    BoundaryMode mode = BoundaryMode::moore_pairs;
};

// P_S* = P_C * dE_M * L / (m * A) with dE_M = 2 per interface pair; above
// P_S* the flipped region has lower H. Empty when the region has no on-site
// incentive (m <= 0).
std::optional<FlashpointPrediction> predict_flashpoint_priority(
    const RegionMask& mask, const SuitabilityField& field, use_type from_type, use_type to_type,
    const PrioritySet& priorities_base, BoundaryMode mode = BoundaryMode::moore_pairs);

}  // namespace mola
