#include "mola/nucleation.hpp"

#include "mola/energy.hpp"

namespace mola {

RegionMask RegionMask::rectangle(int rows, int cols, int i0, int j0, int h, int w) {
    if (h < 1 || w < 1 || i0 < 0 || j0 < 0 || i0 + h > rows || j0 + w > cols)
        throw std::invalid_argument("RegionMask::rectangle: rectangle exceeds grid bounds");
    RegionMask mask(rows, cols);
    for (int i = i0; i < i0 + h; i++)
        for (int j = j0; j < j0 + w; j++) mask.set(i, j, true);
    return mask;
}

Geometry boundary_and_area(const RegionMask& mask) {
    static constexpr int di[4] = {-1, 1, 0, 0};
    static constexpr int dj[4] = {0, 0, -1, 1};
    Geometry g;
    for (int i = 0; i < mask.rows(); i++) {
        for (int j = 0; j < mask.cols(); j++) {
            if (!mask.at(i, j)) continue;
            g.area++;
            for (int k = 0; k < 4; k++) {
                const int ni = i + di[k], nj = j + dj[k];
                const bool outside = ni < 0 || ni >= mask.rows() || nj < 0 || nj >= mask.cols();
                if (outside || !mask.at(ni, nj)) g.boundary++;
            }
        }
    }
    if (g.area == 0)
        throw std::invalid_argument("boundary_and_area: empty mask");
    return g;
}

long moore_boundary_pairs(const RegionMask& mask) {
    long pairs = 0;
    for (int i = 0; i < mask.rows(); i++) {
        for (int j = 0; j < mask.cols(); j++) {
            if (!mask.at(i, j)) continue;
            for (int k = 0; k < 8; k++) {
                const int ni = i + kMooreDi[k], nj = j + kMooreDj[k];
                if (ni < 0 || ni >= mask.rows() || nj < 0 || nj >= mask.cols()) continue;
                if (!mask.at(ni, nj)) pairs++;
            }
        }
    }
    return pairs;
}

NucleationEstimate nucleation_estimate(const RegionMask& mask, double delta_e_m, double delta_e_o) {
    const Geometry g = boundary_and_area(mask);
    NucleationEstimate e;
    e.delta_e_m = delta_e_m;
    e.delta_e_o = delta_e_o;
    e.delta_f = delta_e_m * g.boundary - delta_e_o * g.area;
    e.flips = e.delta_f < 0.0;
    return e;
}

double flip_threshold(const RegionMask& mask, double delta_e_m) {
    if (delta_e_m < 0.0)
        throw std::invalid_argument("flip_threshold: delta_e_m must be nonnegative");
    const Geometry g = boundary_and_area(mask);
    return delta_e_m * static_cast<double>(g.boundary) / static_cast<double>(g.area);
}

std::optional<FlashpointPrediction> predict_flashpoint_priority(
    const RegionMask& mask, const SuitabilityField& field, use_type from_type, use_type to_type,
    const PrioritySet& priorities_base, BoundaryMode mode) {
    if (mask.rows() != field.rows() || mask.cols() != field.cols())
        throw std::invalid_argument("predict_flashpoint_priority: mask/field dimension mismatch");
    if (from_type >= field.types() || to_type >= field.types() || from_type == to_type)
        throw std::invalid_argument("predict_flashpoint_priority: bad type pair");

    const Geometry g = boundary_and_area(mask);
    double margin_sum = 0.0;
    for (int i = 0; i < mask.rows(); i++)
        for (int j = 0; j < mask.cols(); j++)
            if (mask.at(i, j))
                margin_sum += field.score(i, j, to_type) - field.score(i, j, from_type);
    const double margin = margin_sum / static_cast<double>(g.area);
    if (!(margin > 0.0)) return std::nullopt;

    FlashpointPrediction p;
    p.mode = mode;
    p.area = g.area;
    p.boundary = (mode == BoundaryMode::moore_pairs) ? moore_boundary_pairs(mask) : g.boundary;
    p.margin = margin;
    // Each broken same-type Moore pair raises O1 by 2.
    const double delta_e_m = 2.0;
    p.p_s_star = priorities_base.compactness * delta_e_m * static_cast<double>(p.boundary) /
                 (margin * static_cast<double>(p.area));
    return p;
}

}  // namespace mola
