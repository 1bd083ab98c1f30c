#include "mola/pipeline.hpp"

#include <algorithm>
#include <complex>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>

#include "json.hpp"
#include "mola/io.hpp"

namespace mola {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct PointSummary {
    double p_s = 0.0;
    std::vector<int> counts;
    std::size_t replicates = 0;
    bool degenerate = false;
    std::vector<std::complex<double>> z_sum;  // per-parcel sum over minimum-bin samples
    std::size_t z_count = 0;
};

std::string point_label(std::size_t index, double p_s) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "point_%03zu_ps_%s", index, io::format_double(p_s).c_str());
    return buf;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << text;
}

void write_zsum_csv(const fs::path& path, const PointSummary& s, int rows, int cols) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << "i,j,re_sum,im_sum\n";
    for (int i = 0; i < rows; i++)
        for (int j = 0; j < cols; j++) {
            const auto& z = s.z_sum[static_cast<std::size_t>(i) * cols + j];
            out << i << ',' << j << ',' << io::format_double(z.real()) << ','
                << io::format_double(z.imag()) << '\n';
        }
}

std::vector<std::complex<double>> read_zsum_csv(const fs::path& path, int rows, int cols) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
    std::string line;
    std::getline(in, line);
    std::vector<std::complex<double>> sums(static_cast<std::size_t>(rows) * cols);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        int i, j;
        double re, im;
        if (std::sscanf(line.c_str(), "%d,%d,%lf,%lf", &i, &j, &re, &im) != 4)
            throw std::runtime_error("zsum csv: malformed row in " + path.string());
        sums[static_cast<std::size_t>(i) * cols + j] = {re, im};
    }
    return sums;
}

GrayAreaMap map_from_sums(const std::vector<std::complex<double>>& sums, std::size_t count,
                          int rows, int cols) {
    GrayAreaMap map;
    map.rows = rows;
    map.cols = cols;
    map.samples = count;
    map.mean = sums;
    if (count > 0)
        for (auto& z : map.mean) z /= static_cast<double>(count);
    return map;
}

PointSummary run_point(const RunConfig& config, const SuitabilityField& field, double p_s,
                       const std::vector<std::uint64_t>& seeds, const fs::path& dir,
                       int parallelism) {
    fs::create_directories(dir);
    PrioritySet priorities = config.priorities;
    priorities.suitability = p_s;
    SamplerOptions options = config.sampler;
    options.snapshots = SnapshotPolicy::measured;  // gray-area sums need grids

    const ReplicateSet reps = run_replicates(field, priorities, config.schedule, seeds,
                                             options, parallelism);
    io::write_samples_csv(dir / "samples.csv", reps);

    for (int t = 0; t < config.types; t++)
        io::write_landau_csv(dir / ("landau_" + std::to_string(t) + ".csv"),
                             landau_surface(build_histogram(reps, t)));

    const OptimalCounts opt = optimal_counts(reps);

    PointSummary s;
    s.p_s = p_s;
    s.counts = opt.counts;
    s.replicates = seeds.size();
    s.degenerate = opt.degenerate;
    s.z_sum.assign(static_cast<std::size_t>(config.rows) * config.cols, {0.0, 0.0});

    std::vector<TernaryPoint> ternary;
    const long cells = static_cast<long>(config.rows) * config.cols;
    for (const auto& recs : reps.records) {
        for (const auto& r : recs) {
            if (config.types == 3) ternary.push_back(ternary_project(r.use_counts, cells));
            bool near_minimum = true;
            for (int t = 0; t < config.types; t++)
                if (std::abs(r.use_counts[t] - opt.counts[t]) > config.analysis.gray_bin_tolerance)
                    near_minimum = false;
            if (!near_minimum || !r.snapshot) continue;
            const auto& g = *r.snapshot;
            for (std::size_t c = 0; c < g.size(); c++) {
                const double angle = 2.0 * std::numbers::pi * (g.cells()[c] - 1.0) / 3.0;
                s.z_sum[c] += std::complex<double>(std::cos(angle), std::sin(angle));
            }
            s.z_count++;
        }
    }
    if (config.types == 3) io::write_ternary_csv(dir / "ternary.csv", ternary);
    write_zsum_csv(dir / "zsum.csv", s, config.rows, config.cols);

    json pj;
    pj["p_s"] = p_s;
    pj["counts"] = s.counts;
    pj["replicates"] = s.replicates;
    pj["degenerate"] = s.degenerate;
    pj["minimum_set_size"] = opt.minimum_set.size();
    pj["z_count"] = s.z_count;
    pj["done"] = true;
    write_text(dir / "point.json", pj.dump(2) + "\n");
    return s;
}

// A point is reusable only if its previous run completed; half-written
// points are redone from scratch.
std::optional<PointSummary> load_point(const RunConfig& config, double p_s, const fs::path& dir) {
    const fs::path meta = dir / "point.json";
    if (!fs::exists(meta)) return std::nullopt;
    std::ifstream in(meta);
    json pj = json::parse(in, nullptr, false);
    if (pj.is_discarded() || !pj.value("done", false)) return std::nullopt;
    PointSummary s;
    s.p_s = pj.at("p_s").get<double>();
    if (std::abs(s.p_s - p_s) > 1e-12) return std::nullopt;
    s.counts = pj.at("counts").get<std::vector<int>>();
    s.replicates = pj.at("replicates").get<std::size_t>();
    s.degenerate = pj.value("degenerate", false);
    s.z_count = pj.at("z_count").get<std::size_t>();
    s.z_sum = read_zsum_csv(dir / "zsum.csv", config.rows, config.cols);
    return s;
}

void write_manifest(const fs::path& out_dir) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(out_dir)) {
        if (!entry.is_regular_file()) continue;
        if (entry.path().filename() == "manifest.json") continue;
        files.push_back(fs::relative(entry.path(), out_dir));
    }
    std::sort(files.begin(), files.end());
    json m;
    m["schema_version"] = 1;
    m["files"] = json::array();
    for (const auto& f : files) {
        char hash[20];
        std::snprintf(hash, sizeof(hash), "%016llx",
                      static_cast<unsigned long long>(io::fnv1a_file(out_dir / f)));
        m["files"].push_back({{"path", f.generic_string()}, {"fnv1a64", hash}});
    }
    write_text(out_dir / "manifest.json", m.dump(2) + "\n");
}

UseCountSeries series_from_points(const std::vector<PointSummary>& points) {
    UseCountSeries series;
    for (const auto& p : points) {
        series.priorities.push_back(p.p_s);
        series.counts.emplace_back(p.counts.begin(), p.counts.end());
        series.replicates.push_back(p.replicates);
    }
    return series;
}

// Recursive bisection around a flagged interval; refined points land in
// refine/ and are folded into refined_series.csv.
void refine_interval(const RunConfig& config, const SuitabilityField& field,
                     const PointSummary& lo, const PointSummary& hi, int depth,
                     const std::vector<std::uint64_t>& seeds, const fs::path& refine_dir,
                     const PipelineOptions& options, std::vector<PointSummary>& refined) {
    if (depth <= 0) return;
    const double mid = 0.5 * (lo.p_s + hi.p_s);
    const fs::path dir = refine_dir / point_label(refined.size(), mid);
    std::optional<PointSummary> cached;
    if (options.resume) cached = load_point(config, mid, dir);
    const PointSummary m = cached ? *cached
                                  : run_point(config, field, mid, seeds, dir, options.parallelism);
    refined.push_back(m);

    auto still_flagged = [&](const PointSummary& a, const PointSummary& b) {
        for (std::size_t t = 0; t < a.counts.size(); t++) {
            const double denom = 0.5 * (a.counts[t] + b.counts[t]);
            if (denom > 0.0 && std::abs(a.counts[t] - b.counts[t]) / denom > config.analysis.alpha)
                return true;
        }
        return false;
    };
    if (still_flagged(lo, m))
        refine_interval(config, field, lo, m, depth - 1, seeds, refine_dir, options, refined);
    if (still_flagged(m, hi))
        refine_interval(config, field, m, hi, depth - 1, seeds, refine_dir, options, refined);
}

}  // namespace

void anneal_pipeline(const RunConfig& config, const fs::path& out_dir,
                     const PipelineOptions& options) {
    config.validate();
    fs::create_directories(out_dir);
    write_text(out_dir / "effective_config.json", effective_config_json(config));
    const SuitabilityField field = config.resolve_field();
    io::write_suitability_csv(out_dir / "suitability.csv", field);
    try {
        run_point(config, field, config.priorities.suitability, config.seeds, out_dir,
                  options.parallelism);
        render_reports(out_dir);
        write_manifest(out_dir);
    } catch (...) {
        write_text(out_dir / "FAILED", "run did not complete; partial results preserved\n");
        throw;
    }
}

void sweep_pipeline(const RunConfig& config, const fs::path& out_dir,
                    const PipelineOptions& options) {
    config.validate();
    if (config.sweep.size() < 2)
        throw std::invalid_argument("sweep_pipeline: config needs a sweep with >= 2 points");
    fs::create_directories(out_dir);
    write_text(out_dir / "effective_config.json", effective_config_json(config));
    const SuitabilityField field = config.resolve_field();
    io::write_suitability_csv(out_dir / "suitability.csv", field);

    try {
        std::vector<PointSummary> points;
        for (std::size_t n = 0; n < config.sweep.size(); n++) {
            const fs::path dir = out_dir / "points" / point_label(n, config.sweep[n]);
            std::optional<PointSummary> cached;
            if (options.resume) cached = load_point(config, config.sweep[n], dir);
            points.push_back(cached ? *cached
                                    : run_point(config, field, config.sweep[n], config.seeds, dir,
                                                options.parallelism));
        }

        const UseCountSeries series = series_from_points(points);
        io::write_series_csv(out_dir / "series.csv", series);
        const FlashpointScan scan = detect_flashpoints(series, config.analysis.alpha);
        io::write_flashpoints_csv(out_dir / "flashpoints.csv", scan);
        if (!scan.warnings.empty()) {
            std::string text;
            for (const auto& w : scan.warnings) text += w + "\n";
            write_text(out_dir / "flashpoint_warnings.txt", text);
        }

        // Gray-area maps below, above, and across each flashpoint.
        for (const auto& fp : scan.flashpoints) {
            const PointSummary& lo = points[fp.interval];
            const PointSummary& hi = points[fp.interval + 1];
            const std::string tag = std::to_string(fp.interval);
            io::write_gray_area_csv(out_dir / ("grayarea_" + tag + "_below.csv"),
                                    map_from_sums(lo.z_sum, lo.z_count, config.rows, config.cols));
            io::write_gray_area_csv(out_dir / ("grayarea_" + tag + "_above.csv"),
                                    map_from_sums(hi.z_sum, hi.z_count, config.rows, config.cols));
            std::vector<std::complex<double>> pooled(lo.z_sum.size());
            for (std::size_t c = 0; c < pooled.size(); c++) pooled[c] = lo.z_sum[c] + hi.z_sum[c];
            io::write_gray_area_csv(out_dir / ("grayarea_" + tag + "_combined.csv"),
                                    map_from_sums(pooled, lo.z_count + hi.z_count,
                                                  config.rows, config.cols));
        }

        if (config.analysis.refine_depth > 0 && !scan.flashpoints.empty()) {
            std::vector<std::uint64_t> seeds = config.seeds;
            const std::size_t target = seeds.size() *
                static_cast<std::size_t>(std::max(1, config.analysis.refine_multiplier));
            for (std::uint64_t extra = 1; seeds.size() < target; extra++) {
                const std::uint64_t candidate = 0x100000000ULL + extra;
                if (std::find(seeds.begin(), seeds.end(), candidate) == seeds.end())
                    seeds.push_back(candidate);
            }
            std::vector<PointSummary> refined;
            for (const auto& fp : scan.flashpoints)
                refine_interval(config, field, points[fp.interval], points[fp.interval + 1],
                                config.analysis.refine_depth, seeds, out_dir / "refine", options,
                                refined);
            if (!refined.empty()) {
                std::vector<PointSummary> all = points;
                all.insert(all.end(), refined.begin(), refined.end());
                std::sort(all.begin(), all.end(),
                          [](const PointSummary& a, const PointSummary& b) { return a.p_s < b.p_s; });
                io::write_series_csv(out_dir / "refined_series.csv", series_from_points(all));
            }
        }

        render_reports(out_dir);
        write_manifest(out_dir);
    } catch (...) {
        write_text(out_dir / "FAILED", "sweep did not complete; partial results preserved\n");
        throw;
    }
}

void render_reports(const fs::path& run_dir) {
    if (!fs::exists(run_dir))
        throw std::runtime_error("render_reports: no such run directory: " + run_dir.string());

    long total_cells = 900;
    const fs::path cfg_path = run_dir / "effective_config.json";
    if (fs::exists(cfg_path)) {
        std::ifstream in(cfg_path);
        const json cfg = json::parse(in);
        total_cells = cfg.at("grid").at("rows").get<long>() * cfg.at("grid").at("cols").get<long>();
    }

    std::vector<fs::path> csvs;
    for (const auto& entry : fs::recursive_directory_iterator(run_dir))
        if (entry.is_regular_file() && entry.path().extension() == ".csv")
            csvs.push_back(entry.path());
    std::sort(csvs.begin(), csvs.end());

    bool rendered = false;
    for (const auto& csv : csvs) {
        const std::string name = csv.filename().string();
        fs::path svg = csv;
        svg.replace_extension(".svg");
        if (name == "series.csv" || name == "refined_series.csv") {
            write_text(svg, io::series_svg(io::read_series_csv(csv), total_cells));
        } else if (name.starts_with("grayarea_")) {
            write_text(svg, io::gray_area_svg(io::read_gray_area_csv(csv)));
        } else if (name == "ternary.csv") {
            write_text(svg, io::ternary_svg(io::read_ternary_csv(csv)));
        } else if (name.starts_with("landau_")) {
            write_text(svg, io::landau_svg(io::read_landau_csv(csv)));
        } else {
            continue;
        }
        rendered = true;
    }
    if (!rendered)
        throw std::runtime_error(
            "render_reports: nothing to render in " + run_dir.string() +
            "; expected series.csv, landau_<type>.csv, ternary.csv or grayarea_*.csv");
}

}  // namespace mola
