#pragma once

#include <filesystem>

#include "mola/config.hpp"

namespace mola {

struct PipelineOptions {
    int parallelism = 1;
    bool resume = false;
};

// Single-priority anneal run: samples, Landau surfaces, optimal counts,
// ternary data, effective config, manifest.
void anneal_pipeline(const RunConfig& config, const std::filesystem::path& out_dir,
                     const PipelineOptions& options);

// Full priority sweep: per-point runs, use-count series, flashpoint report,
// gray-area maps around each flashpoint, optional bisection refinement.
void sweep_pipeline(const RunConfig& config, const std::filesystem::path& out_dir,
                    const PipelineOptions& options);

// Rebuild every SVG in a run directory from its CSVs alone.
void render_reports(const std::filesystem::path& run_dir);

}  // namespace mola
