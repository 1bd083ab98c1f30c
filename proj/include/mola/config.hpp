#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mola/grid.hpp"
#include "mola/sampler.hpp"

namespace mola {

// Synthetic suitability generators standing in for externally supplied
// c_ijs data.
struct GeneratorSpec {
    enum class Kind { uniform_random, gradient, two_region_island, blobs };
    Kind kind = Kind::uniform_random;
    std::uint64_t seed = 0;

    // uniform_random: c ~ U[low, high] per (i,j,s)
    double low = 0.0, high = 1.0;

    // gradient: per-type tent profile along an axis, peak amplitude `scale`
    bool gradient_along_rows = true;
    double scale = 1.0;

    // two_region_island: background type scores `background_bonus`
    // everywhere; `margin` is added to the island type inside the rectangle,
    // so the net on-site gain for flipping it is margin - background_bonus
    use_type background_type = 0;
    use_type island_type = 1;
    double background_bonus = 1.0;
    double margin = 1.0;
    int island_i = 0, island_j = 0, island_rows = 0, island_cols = 0;

    // blobs: `blob_count` random disks of radius `blob_radius`, each adding
    // `amplitude` to one random type's score
    int blob_count = 8;
    double blob_radius = 4.0;
    double amplitude = 1.0;
};

SuitabilityField generate_field(const GeneratorSpec& spec, int rows, int cols, int types);

struct AnalysisOptions {
    double alpha = 0.1;
    int smoothing_window = 3;
    int refine_depth = 0;
    int refine_multiplier = 4;
    // Samples whose per-type counts are all within this distance of the
    // Landau optimum feed the gray-area average.
    int gray_bin_tolerance = 45;
};

struct RunConfig {
    int rows = 30, cols = 30, types = 3;

    // Exactly one of the two suitability sources.
    std::optional<std::filesystem::path> suitability_file;
    std::optional<GeneratorSpec> generator;

    PrioritySet priorities;               // P_C and measurement threshold
    std::vector<double> sweep;            // P_S values; empty for single runs
    AnnealSchedule schedule;
    SamplerOptions sampler;
    std::vector<std::uint64_t> seeds;
    AnalysisOptions analysis;
    std::filesystem::path out_dir = "out";

    SuitabilityField resolve_field() const;
    void validate() const;
};

RunConfig load_config(const std::filesystem::path& path);

// Frozen effective config with every default resolved; written alongside
// run outputs.
std::string effective_config_json(const RunConfig& config);

}  // namespace mola
