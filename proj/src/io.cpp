#include "mola/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <tuple>

namespace mola::io {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open for writing: " + path.string());
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open for reading: " + path.string());
    return in;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    return fields;
}

// Hue/saturation square, value fixed at 1; hue from arg<z> mapped to [0,360).
std::string hsv_to_hex(double hue_deg, double sat) {
    sat = std::clamp(sat, 0.0, 1.0);
    hue_deg = std::fmod(std::fmod(hue_deg, 360.0) + 360.0, 360.0);
    const double c = sat;
    const double x = c * (1.0 - std::fabs(std::fmod(hue_deg / 60.0, 2.0) - 1.0));
    double r = 0, g = 0, b = 0;
    if (hue_deg < 60) { r = c; g = x; }
    else if (hue_deg < 120) { r = x; g = c; }
    else if (hue_deg < 180) { g = c; b = x; }
    else if (hue_deg < 240) { g = x; b = c; }
    else if (hue_deg < 300) { r = x; b = c; }
    else { r = c; b = x; }
    const double m = 1.0 - c;
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                  static_cast<int>(std::lround((r + m) * 255.0)),
                  static_cast<int>(std::lround((g + m) * 255.0)),
                  static_cast<int>(std::lround((b + m) * 255.0)));
    return buf;
}

}  // namespace

std::string format_double(double v) {
    // Shortest representation that parses back to the same double.
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_grid_csv(const std::filesystem::path& path, const LandUseGrid& grid) {
    auto out = open_out(path);
    for (int i = 0; i < grid.rows(); i++) {
        for (int j = 0; j < grid.cols(); j++) {
            if (j) out << ',';
            out << static_cast<int>(grid.at(i, j));
        }
        out << '\n';
    }
}

LandUseGrid read_grid_csv(const std::filesystem::path& path, int types) {
    auto in = open_in(path);
    std::vector<std::vector<int>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<int> row;
        for (const auto& f : split_csv(line)) row.push_back(std::stoi(f));
        if (!rows.empty() && row.size() != rows.front().size())
            throw std::runtime_error("grid csv: ragged rows in " + path.string());
        rows.push_back(std::move(row));
    }
    if (rows.empty())
        throw std::runtime_error("grid csv: empty file " + path.string());
    LandUseGrid grid(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()), types);
    for (int i = 0; i < grid.rows(); i++)
        for (int j = 0; j < grid.cols(); j++) {
            if (rows[i][j] < 0 || rows[i][j] >= types)
                throw std::runtime_error("grid csv: type code out of range in " + path.string());
            grid.set(i, j, static_cast<use_type>(rows[i][j]));
        }
    return grid;
}

void write_suitability_csv(const std::filesystem::path& path, const SuitabilityField& field) {
    auto out = open_out(path);
    out << "i,j,s,c\n";
    for (int i = 0; i < field.rows(); i++)
        for (int j = 0; j < field.cols(); j++)
            for (int s = 0; s < field.types(); s++)
                out << i << ',' << j << ',' << s << ',' << format_double(field.score(i, j, s)) << '\n';
}

SuitabilityField read_suitability_csv(const std::filesystem::path& path, int rows, int cols, int types) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line) || split_csv(line) != std::vector<std::string>{"i", "j", "s", "c"})
        throw std::runtime_error("suitability csv: expected header i,j,s,c in " + path.string());
    SuitabilityField field(rows, cols, types);
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(rows) * cols * types, 0);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != 4)
            throw std::runtime_error("suitability csv: malformed row in " + path.string());
        const int i = std::stoi(f[0]), j = std::stoi(f[1]), s = std::stoi(f[2]);
        const double c = std::stod(f[3]);
        if (i < 0 || i >= rows || j < 0 || j >= cols || s < 0 || s >= types)
            throw std::runtime_error("suitability csv: index out of range in " + path.string());
        if (!std::isfinite(c))
            throw std::runtime_error("suitability csv: non-finite score in " + path.string());
        field.set(i, j, s, c);
        seen[field.idx(i, j, s)] = 1;
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end())
        throw std::runtime_error("suitability csv: missing (i,j,s) combinations in " + path.string());
    return field;
}

SuitabilityField read_suitability_layers(const std::filesystem::path& stem, int rows, int cols, int types) {
    SuitabilityField field(rows, cols, types);
    for (int s = 0; s < types; s++) {
        std::filesystem::path layer = stem;
        layer += "." + std::to_string(s) + ".csv";
        auto in = open_in(layer);
        std::string line;
        int i = 0;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto f = split_csv(line);
            if (i >= rows || static_cast<int>(f.size()) != cols)
                throw std::runtime_error("suitability layer: bad shape in " + layer.string());
            for (int j = 0; j < cols; j++) field.set(i, j, s, std::stod(f[j]));
            i++;
        }
        if (i != rows)
            throw std::runtime_error("suitability layer: bad shape in " + layer.string());
    }
    return field;
}

void write_samples_csv(const std::filesystem::path& path, const ReplicateSet& replicates) {
    auto out = open_out(path);
    int types = 0;
    for (const auto& recs : replicates.records)
        if (!recs.empty()) { types = static_cast<int>(recs.front().use_counts.size()); break; }
    out << "seed,sweep";
    for (int s = 0; s < types; s++) out << ",N_" << s;
    out << ",O1,O2,H\n";
    for (std::size_t k = 0; k < replicates.seeds.size(); k++) {
        for (const auto& r : replicates.records[k]) {
            out << replicates.seeds[k] << ',' << r.sweep;
            for (int c : r.use_counts) out << ',' << c;
            out << ',' << format_double(r.energy.compactness)
                << ',' << format_double(r.energy.suitability)
                << ',' << format_double(r.energy.total) << '\n';
        }
    }
}

void write_landau_csv(const std::filesystem::path& path, const LandauSurface& surface) {
    auto out = open_out(path);
    out << "bin,F,count\n";
    for (const auto& [bin, f] : surface.values)
        out << bin << ',' << format_double(f) << ',' << surface.counts.at(bin) << '\n';
}

LandauSurface read_landau_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::string line;
    std::getline(in, line);
    LandauSurface s;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != 3)
            throw std::runtime_error("landau csv: malformed row in " + path.string());
        const int bin = std::stoi(f[0]);
        s.values[bin] = std::stod(f[1]);
        s.counts[bin] = std::stoull(f[2]);
    }
    return s;
}

void write_flashpoints_csv(const std::filesystem::path& path, const FlashpointScan& scan) {
    auto out = open_out(path);
    out << "n,P_low,P_high,type,rel_change\n";
    for (const auto& fp : scan.flashpoints)
        for (std::size_t k = 0; k < fp.types.size(); k++)
            out << fp.interval << ',' << format_double(fp.p_low) << ',' << format_double(fp.p_high)
                << ',' << fp.types[k] << ',' << format_double(fp.rel_changes[k]) << '\n';
}

void write_gray_area_csv(const std::filesystem::path& path, const GrayAreaMap& map) {
    auto out = open_out(path);
    out << "i,j,re,im,modulus,argument\n";
    for (int i = 0; i < map.rows; i++)
        for (int j = 0; j < map.cols; j++) {
            const auto z = map.at(i, j);
            out << i << ',' << j << ',' << format_double(z.real()) << ',' << format_double(z.imag())
                << ',' << format_double(std::abs(z)) << ',' << format_double(std::arg(z)) << '\n';
        }
}

GrayAreaMap read_gray_area_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::string line;
    std::getline(in, line);
    GrayAreaMap map;
    std::vector<std::tuple<int, int, std::complex<double>>> vals;
    int rows = 0, cols = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != 6)
            throw std::runtime_error("gray-area csv: malformed row in " + path.string());
        const int i = std::stoi(f[0]), j = std::stoi(f[1]);
        vals.emplace_back(i, j, std::complex<double>(std::stod(f[2]), std::stod(f[3])));
        rows = std::max(rows, i + 1);
        cols = std::max(cols, j + 1);
    }
    map.rows = rows;
    map.cols = cols;
    map.mean.assign(static_cast<std::size_t>(rows) * cols, {0.0, 0.0});
    map.samples = 1;
    for (const auto& [i, j, z] : vals) map.mean[static_cast<std::size_t>(i) * cols + j] = z;
    return map;
}

void write_ternary_csv(const std::filesystem::path& path, const std::vector<TernaryPoint>& points) {
    auto out = open_out(path);
    out << "sample,x,y,w0,w1,w2\n";
    for (std::size_t k = 0; k < points.size(); k++)
        out << k << ',' << format_double(points[k].x) << ',' << format_double(points[k].y) << ','
            << format_double(points[k].w[0]) << ',' << format_double(points[k].w[1]) << ','
            << format_double(points[k].w[2]) << '\n';
}

std::vector<TernaryPoint> read_ternary_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::string line;
    std::getline(in, line);
    std::vector<TernaryPoint> points;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != 6)
            throw std::runtime_error("ternary csv: malformed row in " + path.string());
        TernaryPoint p;
        p.x = std::stod(f[1]);
        p.y = std::stod(f[2]);
        for (int s = 0; s < 3; s++) p.w[s] = std::stod(f[3 + s]);
        points.push_back(p);
    }
    return points;
}

void write_series_csv(const std::filesystem::path& path, const UseCountSeries& series) {
    auto out = open_out(path);
    const int types = series.counts.empty() ? 0 : static_cast<int>(series.counts.front().size());
    out << "P_S";
    for (int s = 0; s < types; s++) out << ",N_" << s;
    out << ",replicates\n";
    for (std::size_t n = 0; n < series.priorities.size(); n++) {
        out << format_double(series.priorities[n]);
        for (double c : series.counts[n]) out << ',' << format_double(c);
        out << ',' << (n < series.replicates.size() ? series.replicates[n] : 0) << '\n';
    }
}

UseCountSeries read_series_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("series csv: empty file " + path.string());
    const auto header = split_csv(line);
    if (header.size() < 3 || header.front() != "P_S" || header.back() != "replicates")
        throw std::runtime_error("series csv: bad header in " + path.string());
    const std::size_t types = header.size() - 2;
    UseCountSeries series;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != header.size())
            throw std::runtime_error("series csv: malformed row in " + path.string());
        series.priorities.push_back(std::stod(f[0]));
        std::vector<double> counts;
        for (std::size_t s = 0; s < types; s++) counts.push_back(std::stod(f[1 + s]));
        series.counts.push_back(std::move(counts));
        series.replicates.push_back(std::stoull(f.back()));
    }
    return series;
}

void write_mask_csv(const std::filesystem::path& path, const RegionMask& mask) {
    auto out = open_out(path);
    for (int i = 0; i < mask.rows(); i++) {
        for (int j = 0; j < mask.cols(); j++) {
            if (j) out << ',';
            out << (mask.at(i, j) ? 1 : 0);
        }
        out << '\n';
    }
}

RegionMask read_mask_csv(const std::filesystem::path& path) {
    const LandUseGrid grid = read_grid_csv(path, 2);
    RegionMask mask(grid.rows(), grid.cols());
    for (int i = 0; i < grid.rows(); i++)
        for (int j = 0; j < grid.cols(); j++) mask.set(i, j, grid.at(i, j) == 1);
    return mask;
}

std::string gray_area_svg(const GrayAreaMap& map, int cell_px) {
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << map.cols * cell_px
        << "\" height=\"" << map.rows * cell_px << "\">\n";
    for (int i = 0; i < map.rows; i++) {
        for (int j = 0; j < map.cols; j++) {
            const auto z = map.at(i, j);
            const double hue = std::arg(z) * 180.0 / std::numbers::pi;
            svg << "<rect x=\"" << j * cell_px << "\" y=\"" << i * cell_px << "\" width=\""
                << cell_px << "\" height=\"" << cell_px << "\" fill=\""
                << hsv_to_hex(hue, std::abs(z)) << "\"/>\n";
        }
    }
    svg << "</svg>\n";
    return svg.str();
}

std::string ternary_svg(const std::vector<TernaryPoint>& points, std::size_t max_points,
                        std::uint64_t subsample_seed, int size_px) {
    // Deterministic subsample without replacement when over the cap.
    std::vector<std::size_t> order(points.size());
    for (std::size_t k = 0; k < order.size(); k++) order[k] = k;
    if (points.size() > max_points) {
        std::mt19937_64 eng(subsample_seed);
        std::shuffle(order.begin(), order.end(), eng);
        order.resize(max_points);
        std::sort(order.begin(), order.end());
    }

    const double margin = 24.0;
    const double side = size_px - 2.0 * margin;
    const double height = side * std::numbers::sqrt3 / 2.0;
    auto px = [&](double x, double y) {
        return std::pair<double, double>{margin + x * side, margin + height - y * side};
    };
    const auto a = px(0, 0), c = px(1, 0), v = px(0.5, std::numbers::sqrt3 / 2.0);

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size_px << "\" height=\""
        << static_cast<int>(height + 2 * margin) << "\">\n";
    svg << "<polygon points=\"" << a.first << ',' << a.second << ' ' << c.first << ',' << c.second
        << ' ' << v.first << ',' << v.second << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (std::size_t k : order) {
        const auto p = px(points[k].x, points[k].y);
        svg << "<circle cx=\"" << format_double(p.first) << "\" cy=\"" << format_double(p.second)
            << "\" r=\"1.5\" fill=\"steelblue\" fill-opacity=\"0.5\"/>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

std::string series_svg(const UseCountSeries& series, long total_cells, int width_px, int height_px) {
    const int types = series.counts.empty() ? 0 : static_cast<int>(series.counts.front().size());
    const double margin = 36.0;
    const double pmin = series.priorities.front(), pmax = series.priorities.back();
    auto px = [&](double p, double frac) {
        const double x = margin + (p - pmin) / std::max(pmax - pmin, 1e-300) * (width_px - 2 * margin);
        const double y = height_px - margin - frac * (height_px - 2 * margin);
        return std::pair<double, double>{x, y};
    };
    static const char* colors[] = {"#2a9d34", "#b04a3a", "#3a6ab0", "#b08a3a", "#7a3ab0"};
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_px << "\" height=\""
        << height_px << "\">\n";
    svg << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << width_px - 2 * margin
        << "\" height=\"" << height_px - 2 * margin << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int s = 0; s < types; s++) {
        svg << "<polyline fill=\"none\" stroke=\"" << colors[s % 5] << "\" points=\"";
        for (std::size_t n = 0; n < series.priorities.size(); n++) {
            const auto p = px(series.priorities[n], series.counts[n][s] / total_cells);
            svg << format_double(p.first) << ',' << format_double(p.second) << ' ';
        }
        svg << "\"/>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

std::string landau_svg(const LandauSurface& surface, int width_px, int height_px) {
    const double margin = 36.0;
    const double bmin = surface.values.begin()->first;
    const double bmax = surface.values.rbegin()->first;
    double fmax = 0.0;
    for (const auto& [bin, f] : surface.values) fmax = std::max(fmax, f);
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_px << "\" height=\""
        << height_px << "\">\n";
    svg << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << width_px - 2 * margin
        << "\" height=\"" << height_px - 2 * margin << "\" fill=\"none\" stroke=\"black\"/>\n";
    svg << "<polyline fill=\"none\" stroke=\"#3a6ab0\" points=\"";
    for (const auto& [bin, f] : surface.values) {
        const double x = margin + (bin - bmin) / std::max(bmax - bmin, 1.0) * (width_px - 2 * margin);
        const double y = height_px - margin - f / std::max(fmax, 1e-300) * (height_px - 2 * margin);
        svg << format_double(x) << ',' << format_double(y) << ' ';
    }
    svg << "\"/>\n</svg>\n";
    return svg.str();
}

std::uint64_t fnv1a_file(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize k = 0; k < in.gcount(); k++) {
            hash ^= static_cast<unsigned char>(buf[k]);
            hash *= 0x100000001b3ULL;
        }
    }
    return hash;
}

}  // namespace mola::io
