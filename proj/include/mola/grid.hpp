#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mola {

// Land-use type code. For S=3 the canonical labels are
// 0=agriculture, 1=construction, 2=conservation.
using use_type = std::uint8_t;

enum class Boundary { open, periodic };

// Objective weights plus the annealing threshold (k_B = 1).
struct PrioritySet {
    double compactness = 1.0;   // P_C
    double suitability = 0.0;   // P_S
    double threshold = 1.0;     // T

    void validate() const {
        if (compactness < 0.0 || suitability < 0.0)
            throw std::invalid_argument("PrioritySet: weights must be nonnegative");
        if (compactness == 0.0 && suitability == 0.0)
            throw std::invalid_argument("PrioritySet: weights must not both be zero");
        if (!(threshold > 0.0))
            throw std::invalid_argument("PrioritySet: threshold must be positive");
    }
};

struct EnergyBreakdown {
    double compactness = 0.0;   // O1
    double suitability = 0.0;   // O2
    double total = 0.0;         // H = P_C*O1 + P_S*O2
};

// Dense N x M map of type codes. The one-hot x_ijs field is a view on
// this, never a representation.
class LandUseGrid {
public:
    LandUseGrid() = default;
    LandUseGrid(int rows, int cols, int types, use_type fill = 0)
        : rows_(rows), cols_(cols), types_(types),
          cells_(static_cast<std::size_t>(rows) * cols, fill) {
        if (rows < 1 || cols < 1)
            throw std::invalid_argument("LandUseGrid: dims must be >= 1");
        if (types < 2)
            throw std::invalid_argument("LandUseGrid: need at least 2 types");
        if (fill >= types)
            throw std::invalid_argument("LandUseGrid: fill type out of range");
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int types() const { return types_; }
    std::size_t size() const { return cells_.size(); }

    use_type at(int i, int j) const { return cells_[idx(i, j)]; }
    void set(int i, int j, use_type s) {
        if (s >= types_)
            throw std::invalid_argument("LandUseGrid::set: type out of range");
        cells_[idx(i, j)] = s;
    }

    const std::vector<use_type>& cells() const { return cells_; }
    std::vector<use_type>& cells() { return cells_; }

    bool in_bounds(int i, int j) const {
        return i >= 0 && i < rows_ && j >= 0 && j < cols_;
    }

    std::size_t idx(int i, int j) const {
        return static_cast<std::size_t>(i) * cols_ + j;
    }

    // Per-type cell counts N_X.
    std::vector<int> use_counts() const {
        std::vector<int> counts(types_, 0);
        for (use_type s : cells_) counts[s]++;
        return counts;
    }

    friend bool operator==(const LandUseGrid&, const LandUseGrid&) = default;

private:
    int rows_ = 0, cols_ = 0, types_ = 0;
    std::vector<use_type> cells_;
};

// Per-parcel, per-type suitability scores c_ijs.
class SuitabilityField {
public:
    SuitabilityField() = default;
    SuitabilityField(int rows, int cols, int types, double fill = 0.0)
        : rows_(rows), cols_(cols), types_(types),
          scores_(static_cast<std::size_t>(rows) * cols * types, fill) {
        if (rows < 1 || cols < 1 || types < 2)
            throw std::invalid_argument("SuitabilityField: bad dimensions");
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int types() const { return types_; }

    double score(int i, int j, int s) const { return scores_[idx(i, j, s)]; }
    void set(int i, int j, int s, double c) { scores_[idx(i, j, s)] = c; }

    const std::vector<double>& scores() const { return scores_; }

    std::size_t idx(int i, int j, int s) const {
        return (static_cast<std::size_t>(i) * cols_ + j) * types_ + s;
    }

    bool matches(const LandUseGrid& grid) const {
        return rows_ == grid.rows() && cols_ == grid.cols() && types_ == grid.types();
    }

private:
    int rows_ = 0, cols_ = 0, types_ = 0;
    std::vector<double> scores_;
};

inline void require_compatible(const LandUseGrid& grid, const SuitabilityField& field) {
    if (!field.matches(grid))
        throw std::invalid_argument("suitability field dimensions do not match grid");
}

}  // namespace mola
