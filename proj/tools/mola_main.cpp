#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "mola/io.hpp"
#include "mola/pipeline.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    int parallelism = 1;
    std::uint64_t seed_override = 0;
    bool has_seed_override = false;
    std::string sampler_override;
    bool resume = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_config = true) {
    auto* cfg = cmd->add_option("--config", args.config_path, "run config JSON");
    if (needs_config) cfg->required();
    cmd->add_option("--out", args.out_dir, "output directory (overrides config)");
    cmd->add_option("--parallelism", args.parallelism, "worker count")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", args.seed_override, "master seed override")
        ->each([&](const std::string&) { args.has_seed_override = true; });
    cmd->add_option("--sampler", args.sampler_override, "sampler override")
        ->check(CLI::IsMember({"metropolis", "wolff"}));
    cmd->add_flag("--resume", args.resume, "reuse completed sweep points");
}

mola::RunConfig resolve_config(CommonArgs& args) {
    mola::RunConfig config = mola::load_config(args.config_path);
    if (args.has_seed_override) config.sampler.master_seed = args.seed_override;
    if (args.sampler_override == "metropolis") config.sampler.kind = mola::SamplerKind::metropolis;
    if (args.sampler_override == "wolff") config.sampler.kind = mola::SamplerKind::wolff;
    if (!args.out_dir.empty()) config.out_dir = args.out_dir;
    if (const char* env = std::getenv("MOLA_OUT")) config.out_dir = env;
    return config;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-objective land allocation sampling and analysis"};
    app.require_subcommand(1);

    CommonArgs args;

    auto* anneal = app.add_subcommand("anneal", "single-priority annealing run");
    add_common(anneal, args);

    auto* sweep = app.add_subcommand("sweep", "priority sweep with flashpoint analysis");
    add_common(sweep, args);

    auto* flashpoints = app.add_subcommand("flashpoints", "detect flashpoints in a series CSV");
    std::string series_path, report_path = "flashpoints.csv";
    double alpha = 0.1;
    flashpoints->add_option("--series", series_path, "use-count series CSV")->required();
    flashpoints->add_option("--report", report_path, "output report CSV");
    flashpoints->add_option("--alpha", alpha, "flashpoint cutoff")->check(CLI::Range(1e-12, 1.0));

    auto* grayarea = app.add_subcommand("grayarea", "gray-area map from grid snapshot CSVs");
    std::vector<std::string> ensemble_a, ensemble_b;
    std::string gray_out = "grayarea.csv";
    grayarea->add_option("--grids", ensemble_a, "snapshot CSVs (first ensemble)")->required();
    grayarea->add_option("--grids-b", ensemble_b, "snapshot CSVs pooled in as a second ensemble");
    grayarea->add_option("--out", gray_out, "output CSV (SVG written alongside)");

    auto* ternary = app.add_subcommand("ternary", "ternary projection of a samples CSV");
    std::string samples_path, ternary_out = "ternary.csv";
    long ternary_cells = 900;
    ternary->add_option("--samples", samples_path, "samples CSV from a run")->required();
    ternary->add_option("--cells", ternary_cells, "total parcel count")->required();
    ternary->add_option("--out", ternary_out, "output CSV (SVG written alongside)");

    auto* nucleation = app.add_subcommand("nucleation", "region-flip threshold prediction");
    std::string mask_path, nucleation_config, nucleation_out = "nucleation.csv";
    int from_type = 0, to_type = 1;
    std::string mode = "moore";
    nucleation->add_option("--mask", mask_path, "0/1 region mask CSV")->required();
    nucleation->add_option("--config", nucleation_config, "run config providing the field")->required();
    nucleation->add_option("--from", from_type, "current type inside the region");
    nucleation->add_option("--to", to_type, "candidate type inside the region");
    nucleation->add_option("--mode", mode, "boundary metric")->check(CLI::IsMember({"moore", "four"}));
    nucleation->add_option("--out", nucleation_out, "output report CSV");

    auto* render = app.add_subcommand("render", "rebuild SVGs from a run directory");
    std::string run_dir;
    render->add_option("--run", run_dir, "run directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        mola::PipelineOptions popts;
        if (anneal->parsed()) {
            mola::RunConfig config = resolve_config(args);
            popts.parallelism = args.parallelism;
            popts.resume = args.resume;
            mola::anneal_pipeline(config, config.out_dir, popts);
            std::cout << "anneal run written to " << config.out_dir << "\n";
        } else if (sweep->parsed()) {
            mola::RunConfig config = resolve_config(args);
            popts.parallelism = args.parallelism;
            popts.resume = args.resume;
            mola::sweep_pipeline(config, config.out_dir, popts);
            std::cout << "sweep written to " << config.out_dir << "\n";
        } else if (flashpoints->parsed()) {
            const auto series = mola::io::read_series_csv(series_path);
            const auto scan = mola::detect_flashpoints(series, alpha);
            mola::io::write_flashpoints_csv(report_path, scan);
            for (const auto& w : scan.warnings) std::cerr << "warning: " << w << "\n";
            std::cout << scan.flashpoints.size() << " flashpoint(s) -> " << report_path << "\n";
        } else if (grayarea->parsed()) {
            std::vector<mola::LandUseGrid> a, b;
            for (const auto& p : ensemble_a) a.push_back(mola::io::read_grid_csv(p, 3));
            for (const auto& p : ensemble_b) b.push_back(mola::io::read_grid_csv(p, 3));
            const auto map = mola::gray_area_map(a, ensemble_b.empty() ? nullptr : &b);
            mola::io::write_gray_area_csv(gray_out, map);
            fs::path svg = gray_out;
            svg.replace_extension(".svg");
            write_text(svg, mola::io::gray_area_svg(map));
            std::cout << "gray-area map over " << map.samples << " samples -> " << gray_out << "\n";
        } else if (ternary->parsed()) {
            std::ifstream in(samples_path);
            if (!in) throw std::runtime_error("cannot open samples CSV: " + samples_path);
            std::string line;
            std::getline(in, line);
            std::vector<mola::TernaryPoint> points;
            while (std::getline(in, line)) {
                if (line.empty()) continue;
                std::vector<int> counts(3);
                unsigned long long seed_field, sweep_field;
                if (std::sscanf(line.c_str(), "%llu,%llu,%d,%d,%d", &seed_field, &sweep_field,
                                &counts[0], &counts[1], &counts[2]) != 5)
                    throw std::runtime_error("samples CSV: malformed row");
                points.push_back(mola::ternary_project(counts, ternary_cells));
            }
            mola::io::write_ternary_csv(ternary_out, points);
            fs::path svg = ternary_out;
            svg.replace_extension(".svg");
            write_text(svg, mola::io::ternary_svg(points));
            std::cout << points.size() << " samples projected -> " << ternary_out << "\n";
        } else if (nucleation->parsed()) {
            args.config_path = nucleation_config;
            const mola::RunConfig config = mola::load_config(nucleation_config);
            const auto field = config.resolve_field();
            const auto mask = mola::io::read_mask_csv(mask_path);
            const auto boundary_mode = mode == "moore" ? mola::BoundaryMode::moore_pairs
                                                       : mola::BoundaryMode::four_neighbor;
            const auto pred = mola::predict_flashpoint_priority(
                mask, field, static_cast<mola::use_type>(from_type),
                static_cast<mola::use_type>(to_type), config.priorities, boundary_mode);
            const auto geom = mola::boundary_and_area(mask);
            std::ofstream out(nucleation_out, std::ios::binary);
            out << "L,A,mode,deltaEM,m,P_S_star\n";
            if (pred) {
                out << pred->boundary << ',' << pred->area << ','
                    << (mode == "moore" ? "moore" : "four") << ",2,"
                    << mola::io::format_double(pred->margin) << ','
                    << mola::io::format_double(pred->p_s_star) << '\n';
                std::cout << "P_S* = " << pred->p_s_star << " (L=" << pred->boundary
                          << ", A=" << pred->area << ")\n";
            } else {
                out << geom.boundary << ',' << geom.area << ','
                    << (mode == "moore" ? "moore" : "four") << ",2,,\n";
                std::cout << "no on-site incentive inside region (m <= 0); no finite P_S*\n";
            }
        } else if (render->parsed()) {
            mola::render_reports(run_dir);
            std::cout << "reports rendered in " << run_dir << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
