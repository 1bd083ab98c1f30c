#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mola/analysis.hpp"
#include "mola/grid.hpp"
#include "mola/nucleation.hpp"
#include "mola/sampler.hpp"

namespace mola::io {

// Grid snapshot: N rows x M integer columns of type codes.
void write_grid_csv(const std::filesystem::path& path, const LandUseGrid& grid);
LandUseGrid read_grid_csv(const std::filesystem::path& path, int types);

// Suitability, long form: header `i,j,s,c`, one row per (parcel, type),
// 0-based indices. Every (i,j,s) combination must be present.
void write_suitability_csv(const std::filesystem::path& path, const SuitabilityField& field);
SuitabilityField read_suitability_csv(const std::filesystem::path& path, int rows, int cols, int types);

// Suitability, layered form: S matrix files named `<stem>.<s>.csv`.
SuitabilityField read_suitability_layers(const std::filesystem::path& stem, int rows, int cols, int types);

// Sample stream: `seed,sweep,N_0,...,N_{S-1},O1,O2,H`.
void write_samples_csv(const std::filesystem::path& path, const ReplicateSet& replicates);

// Landau surface: `bin,F,count`.
void write_landau_csv(const std::filesystem::path& path, const LandauSurface& surface);
LandauSurface read_landau_csv(const std::filesystem::path& path);

// Flashpoint report: `n,P_low,P_high,type,rel_change`.
void write_flashpoints_csv(const std::filesystem::path& path, const FlashpointScan& scan);

// Gray-area map: `i,j,re,im,modulus,argument`.
void write_gray_area_csv(const std::filesystem::path& path, const GrayAreaMap& map);
GrayAreaMap read_gray_area_csv(const std::filesystem::path& path);

// Ternary data: `sample,x,y,w0,w1,w2`.
void write_ternary_csv(const std::filesystem::path& path, const std::vector<TernaryPoint>& points);
std::vector<TernaryPoint> read_ternary_csv(const std::filesystem::path& path);

// Use-count series: `P_S,N_0,...,N_{S-1},replicates`.
void write_series_csv(const std::filesystem::path& path, const UseCountSeries& series);
UseCountSeries read_series_csv(const std::filesystem::path& path);

// Region mask: 0/1 matrix of grid dims.
void write_mask_csv(const std::filesystem::path& path, const RegionMask& mask);
RegionMask read_mask_csv(const std::filesystem::path& path);

// Gray-area render: one square per parcel, hue = arg<z>, saturation = |<z>|.
std::string gray_area_svg(const GrayAreaMap& map, int cell_px = 12);

// Ternary scatter with triangle frame; at most max_points markers, chosen
// deterministically from the given seed when the input is larger.
std::string ternary_svg(const std::vector<TernaryPoint>& points, std::size_t max_points = 5000,
                        std::uint64_t subsample_seed = 0, int size_px = 480);

// Polyline chart of per-type land-use fraction against P_S.
std::string series_svg(const UseCountSeries& series, long total_cells, int width_px = 640,
                       int height_px = 400);

// Free-energy curve F(N_X).
std::string landau_svg(const LandauSurface& surface, int width_px = 640, int height_px = 400);

std::string format_double(double v);

// FNV-1a 64-bit over file contents; manifest entries carry it.
std::uint64_t fnv1a_file(const std::filesystem::path& path);

}  // namespace mola::io
