#pragma once

#include <complex>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mola/sampler.hpp"

namespace mola {

// Histogram of a single type's use count N_X.
struct Hist1D {
    std::map<int, std::size_t> bins;
    std::size_t total = 0;
};

// Histogram over full use-count vectors (N_0, ..., N_{S-1}).
struct HistFull {
    std::map<std::vector<int>, std::size_t> bins;
    std::size_t total = 0;
};

// F(bin) = -ln(count/total), shifted so min F = 0. Unobserved bins carry
// no entry.
struct LandauSurface {
    std::map<int, double> values;
    std::map<int, std::size_t> counts;
};

struct Minimum {
    int bin = 0;
    double f = 0.0;
};

struct OptimalCounts {
    std::vector<int> counts;                    // per-type global Landau minimum
    std::vector<std::vector<int>> minimum_set;  // tied global minima of the full histogram
    bool degenerate = false;
};

// Aggregated optimal counts along a priority sweep.
struct UseCountSeries {
    std::vector<double> priorities;           // strictly increasing P_S values
    std::vector<std::vector<double>> counts;  // counts[n][type]
    std::vector<std::size_t> replicates;      // replicates behind point n
};

struct Flashpoint {
    int interval = 0;  // between priorities[interval] and priorities[interval+1]
    double p_low = 0.0, p_high = 0.0;
    std::vector<int> types;
    std::vector<double> rel_changes;
};

struct FlashpointScan {
    std::vector<Flashpoint> flashpoints;
    std::vector<std::string> warnings;  // zero-denominator skips
};

// Per-parcel mean of z = exp(2*pi*i*(s-1)/3).
struct GrayAreaMap {
    int rows = 0, cols = 0;
    std::vector<std::complex<double>> mean;  // row-major
    std::size_t samples = 0;

    const std::complex<double>& at(int i, int j) const {
        return mean[static_cast<std::size_t>(i) * cols + j];
    }
};

struct TernaryPoint {
    double w[3] = {0, 0, 0};  // barycentric (agriculture, construction, conservation)
    double x = 0.0, y = 0.0;  // vertices A=(0,0), C=(1,0), V=(1/2, sqrt(3)/2)
};

Hist1D build_histogram(const std::vector<SampleRecord>& records, int type_axis);
Hist1D build_histogram(const ReplicateSet& replicates, int type_axis);
HistFull build_histogram_full(const std::vector<SampleRecord>& records);
Hist1D marginalize(const HistFull& hist, int type_axis);

LandauSurface landau_surface(const Hist1D& hist);

// Local minima of the (optionally moving-average smoothed) surface, ordered
// by F ascending; ties broken by lower bin. Endpoints of the observed bin
// range qualify.
std::vector<Minimum> find_minima(const LandauSurface& surface, int smoothing_window = 3);

OptimalCounts optimal_counts(const ReplicateSet& replicates, double tie_tolerance = 1e-9);

FlashpointScan detect_flashpoints(const UseCountSeries& series, double alpha = 0.1);

// Pooled complex mean over one or two ensembles of S=3 grids.
GrayAreaMap gray_area_map(const std::vector<LandUseGrid>& ensemble_a,
                          const std::vector<LandUseGrid>* ensemble_b = nullptr);

TernaryPoint ternary_project(const std::vector<int>& counts, long total_cells);

struct ScanPoint {
    double t = 0.0;
    std::vector<Minimum> minima;  // well-separated minima of the pooled N_X surface
    bool broken = false;          // multiple peripheral minima / peripheral global minimum
};

struct ScanResult {
    std::vector<ScanPoint> points;
    std::optional<double> largest_broken_t;
};

// Fixed-threshold replicate runs of the compactness-only model across
// t_values; classifies each threshold's pooled Landau surface as symmetric
// or broken.
ScanResult symmetry_breaking_scan(int rows, int cols, int types, const std::vector<double>& t_values,
                                  const AnnealSchedule& schedule, const std::vector<std::uint64_t>& seeds,
                                  const SamplerOptions& options, int parallelism = 1,
                                  int smoothing_window = 5);

}  // namespace mola
