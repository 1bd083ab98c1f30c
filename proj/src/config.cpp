#include "mola/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "json.hpp"
#include "mola/io.hpp"

namespace mola {

using nlohmann::json;

SuitabilityField generate_field(const GeneratorSpec& spec, int rows, int cols, int types) {
    SuitabilityField field(rows, cols, types);
    Rng rng(mix_seeds(spec.seed, 0x6f1e1dULL));
    switch (spec.kind) {
        case GeneratorSpec::Kind::uniform_random: {
            if (spec.high < spec.low)
                throw std::invalid_argument("generator: high must be >= low");
            for (int i = 0; i < rows; i++)
                for (int j = 0; j < cols; j++)
                    for (int s = 0; s < types; s++)
                        field.set(i, j, s, spec.low + (spec.high - spec.low) * rng.uniform());
            break;
        }
        case GeneratorSpec::Kind::gradient: {
            // Type s peaks at fraction s/(S-1) along the chosen axis.
            for (int i = 0; i < rows; i++)
                for (int j = 0; j < cols; j++) {
                    const int coord = spec.gradient_along_rows ? i : j;
                    const int extent = spec.gradient_along_rows ? rows : cols;
                    const double u = extent > 1 ? static_cast<double>(coord) / (extent - 1) : 0.0;
                    for (int s = 0; s < types; s++) {
                        const double peak = static_cast<double>(s) / (types - 1);
                        field.set(i, j, s, spec.scale * (1.0 - std::fabs(u - peak)));
                    }
                }
            break;
        }
        case GeneratorSpec::Kind::two_region_island: {
            if (spec.background_type >= types || spec.island_type >= types ||
                spec.background_type == spec.island_type)
                throw std::invalid_argument("generator: bad island/background type pair");
            if (spec.island_rows < 1 || spec.island_cols < 1 || spec.island_i < 0 ||
                spec.island_j < 0 || spec.island_i + spec.island_rows > rows ||
                spec.island_j + spec.island_cols > cols)
                throw std::invalid_argument("generator: island exceeds grid bounds");
            for (int i = 0; i < rows; i++)
                for (int j = 0; j < cols; j++)
                    field.set(i, j, spec.background_type, spec.background_bonus);
            // The island adds `margin` to the chosen type's score inside the
            // rectangle; a zero margin leaves the field untouched. The net
            // on-site gain for flipping the island is margin - background_bonus.
            for (int i = spec.island_i; i < spec.island_i + spec.island_rows; i++)
                for (int j = spec.island_j; j < spec.island_j + spec.island_cols; j++)
                    field.set(i, j, spec.island_type, field.score(i, j, spec.island_type) + spec.margin);
            break;
        }
        case GeneratorSpec::Kind::blobs: {
            for (int b = 0; b < spec.blob_count; b++) {
                const double ci = rng.uniform() * rows, cj = rng.uniform() * cols;
                const int s = rng.below(types);
                for (int i = 0; i < rows; i++)
                    for (int j = 0; j < cols; j++) {
                        const double d2 = (i - ci) * (i - ci) + (j - cj) * (j - cj);
                        if (d2 <= spec.blob_radius * spec.blob_radius)
                            field.set(i, j, s, field.score(i, j, s) + spec.amplitude);
                    }
            }
            break;
        }
    }
    return field;
}

namespace {

GeneratorSpec::Kind parse_kind(const std::string& k) {
    if (k == "uniform-random") return GeneratorSpec::Kind::uniform_random;
    if (k == "gradient") return GeneratorSpec::Kind::gradient;
    if (k == "two-region-island") return GeneratorSpec::Kind::two_region_island;
    if (k == "blobs") return GeneratorSpec::Kind::blobs;
    throw std::invalid_argument("config: unknown generator kind '" + k + "'");
}

std::string kind_name(GeneratorSpec::Kind k) {
    switch (k) {
        case GeneratorSpec::Kind::uniform_random: return "uniform-random";
        case GeneratorSpec::Kind::gradient: return "gradient";
        case GeneratorSpec::Kind::two_region_island: return "two-region-island";
        case GeneratorSpec::Kind::blobs: return "blobs";
    }
    return "?";
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    return j.at(key).get<T>();
}

GeneratorSpec parse_generator(const json& g) {
    GeneratorSpec spec;
    spec.kind = parse_kind(g.at("kind").get<std::string>());
    spec.seed = get_or<std::uint64_t>(g, "seed", 0);
    spec.low = get_or(g, "low", spec.low);
    spec.high = get_or(g, "high", spec.high);
    spec.gradient_along_rows = get_or(g, "along_rows", spec.gradient_along_rows);
    spec.scale = get_or(g, "scale", spec.scale);
    spec.background_type = static_cast<use_type>(get_or<int>(g, "background_type", spec.background_type));
    spec.island_type = static_cast<use_type>(get_or<int>(g, "island_type", spec.island_type));
    spec.background_bonus = get_or(g, "background_bonus", spec.background_bonus);
    spec.margin = get_or(g, "margin", spec.margin);
    if (g.contains("island")) {
        const auto& isl = g.at("island");
        spec.island_i = isl.at("i").get<int>();
        spec.island_j = isl.at("j").get<int>();
        spec.island_rows = isl.at("rows").get<int>();
        spec.island_cols = isl.at("cols").get<int>();
    }
    spec.blob_count = get_or(g, "blob_count", spec.blob_count);
    spec.blob_radius = get_or(g, "blob_radius", spec.blob_radius);
    spec.amplitude = get_or(g, "amplitude", spec.amplitude);
    return spec;
}

}  // namespace

void RunConfig::validate() const {
    if (rows < 1 || cols < 1)
        throw std::invalid_argument("config: grid dims must be >= 1 (field 'grid')");
    if (types < 2)
        throw std::invalid_argument("config: need at least 2 types (field 'grid.types')");
    if (suitability_file.has_value() == generator.has_value())
        throw std::invalid_argument("config: exactly one suitability source required "
                                    "(field 'suitability')");
    priorities.validate();
    schedule.validate();
    for (std::size_t n = 1; n < sweep.size(); n++)
        if (!(sweep[n] > sweep[n - 1]))
            throw std::invalid_argument("config: sweep values must be strictly increasing "
                                        "(field 'sweep')");
    if (seeds.empty())
        throw std::invalid_argument("config: need at least one seed (field 'seeds')");
    if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size())
        throw std::invalid_argument("config: duplicate seeds (field 'seeds')");
    if (!(analysis.alpha > 0.0 && analysis.alpha < 1.0))
        throw std::invalid_argument("config: alpha must be in (0,1) (field 'analysis.alpha')");
    if (analysis.smoothing_window < 1)
        throw std::invalid_argument("config: smoothing_window must be >= 1 "
                                    "(field 'analysis.smoothing_window')");
}

SuitabilityField RunConfig::resolve_field() const {
    if (suitability_file)
        return io::read_suitability_csv(*suitability_file, rows, cols, types);
    return generate_field(*generator, rows, cols, types);
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open config: " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error("config parse error in " + path.string() + ": " + e.what());
    }

    RunConfig c;
    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        c.rows = get_or(g, "rows", c.rows);
        c.cols = get_or(g, "cols", c.cols);
        c.types = get_or(g, "types", c.types);
    }
    if (j.contains("suitability")) {
        const auto& s = j.at("suitability");
        if (s.contains("file")) c.suitability_file = s.at("file").get<std::string>();
        if (s.contains("generator")) c.generator = parse_generator(s.at("generator"));
    }
    if (j.contains("priorities")) {
        const auto& p = j.at("priorities");
        c.priorities.compactness = get_or(p, "p_c", 1.0);
        c.priorities.suitability = get_or(p, "p_s", 0.0);
        c.priorities.threshold = get_or(p, "threshold", c.schedule.t_target);
    }
    if (j.contains("sweep")) {
        const auto& s = j.at("sweep");
        if (s.contains("values")) {
            c.sweep = s.at("values").get<std::vector<double>>();
        } else {
            const double start = s.at("start").get<double>();
            const double stop = s.at("stop").get<double>();
            const double step = s.at("step").get<double>();
            if (!(step > 0.0))
                throw std::invalid_argument("config: sweep step must be positive (field 'sweep.step')");
            for (int n = 0;; n++) {
                const double v = start + n * step;
                if (v > stop + step * 1e-9) break;
                c.sweep.push_back(v);
            }
        }
    }
    if (j.contains("schedule")) {
        const auto& s = j.at("schedule");
        c.schedule.t_start = get_or(s, "t_start", c.schedule.t_start);
        c.schedule.t_target = get_or(s, "t_target", c.schedule.t_target);
        c.schedule.thermalize_sweeps = get_or(s, "thermalize_sweeps", c.schedule.thermalize_sweeps);
        c.schedule.cool_sweeps = get_or(s, "cool_sweeps", c.schedule.cool_sweeps);
        c.schedule.equilibrate_sweeps = get_or(s, "equilibrate_sweeps", c.schedule.equilibrate_sweeps);
        c.schedule.measure_sweeps = get_or(s, "measure_sweeps", c.schedule.measure_sweeps);
        c.schedule.measure_interval = get_or(s, "measure_interval", c.schedule.measure_interval);
    }
    if (!j.contains("priorities")) c.priorities.threshold = c.schedule.t_target;
    if (j.contains("sampler")) {
        const auto& s = j.at("sampler");
        const std::string kind = get_or<std::string>(s, "kind", "wolff");
        if (kind == "metropolis") c.sampler.kind = SamplerKind::metropolis;
        else if (kind == "wolff") c.sampler.kind = SamplerKind::wolff;
        else throw std::invalid_argument("config: sampler kind must be metropolis|wolff "
                                         "(field 'sampler.kind')");
        const std::string boundary = get_or<std::string>(s, "boundary", "open");
        if (boundary == "open") c.sampler.boundary = Boundary::open;
        else if (boundary == "periodic") c.sampler.boundary = Boundary::periodic;
        else throw std::invalid_argument("config: boundary must be open|periodic "
                                         "(field 'sampler.boundary')");
        c.sampler.wolff_interleave = get_or(s, "interleave", c.sampler.wolff_interleave);
    }
    if (j.contains("snapshots")) {
        const std::string p = j.at("snapshots").get<std::string>();
        if (p == "none") c.sampler.snapshots = SnapshotPolicy::none;
        else if (p == "measured") c.sampler.snapshots = SnapshotPolicy::measured;
        else throw std::invalid_argument("config: snapshots must be none|measured "
                                         "(field 'snapshots')");
    }
    if (j.contains("seeds")) {
        const auto& s = j.at("seeds");
        c.sampler.master_seed = get_or<std::uint64_t>(s, "master", 0);
        if (s.contains("list")) {
            c.seeds = s.at("list").get<std::vector<std::uint64_t>>();
        } else if (s.contains("count")) {
            const auto count = s.at("count").get<std::uint64_t>();
            for (std::uint64_t k = 0; k < count; k++) c.seeds.push_back(k);
        }
    }
    if (j.contains("analysis")) {
        const auto& a = j.at("analysis");
        c.analysis.alpha = get_or(a, "alpha", c.analysis.alpha);
        c.analysis.smoothing_window = get_or(a, "smoothing_window", c.analysis.smoothing_window);
        c.analysis.refine_depth = get_or(a, "refine_depth", c.analysis.refine_depth);
        c.analysis.refine_multiplier = get_or(a, "refine_multiplier", c.analysis.refine_multiplier);
        c.analysis.gray_bin_tolerance = get_or(a, "gray_bin_tolerance", c.analysis.gray_bin_tolerance);
    }
    if (j.contains("output") && j.at("output").contains("dir"))
        c.out_dir = j.at("output").at("dir").get<std::string>();

    c.validate();
    return c;
}

std::string effective_config_json(const RunConfig& c) {
    json j;
    j["schema_version"] = 1;
    j["grid"] = {{"rows", c.rows}, {"cols", c.cols}, {"types", c.types}};
    if (c.suitability_file) {
        j["suitability"] = {{"file", c.suitability_file->string()}};
    } else {
        const GeneratorSpec& g = *c.generator;
        json gj{{"kind", kind_name(g.kind)}, {"seed", g.seed}};
        switch (g.kind) {
            case GeneratorSpec::Kind::uniform_random:
                gj["low"] = g.low;
                gj["high"] = g.high;
                break;
            case GeneratorSpec::Kind::gradient:
                gj["along_rows"] = g.gradient_along_rows;
                gj["scale"] = g.scale;
                break;
            case GeneratorSpec::Kind::two_region_island:
                gj["background_type"] = g.background_type;
                gj["island_type"] = g.island_type;
                gj["background_bonus"] = g.background_bonus;
                gj["margin"] = g.margin;
                gj["island"] = {{"i", g.island_i}, {"j", g.island_j},
                                {"rows", g.island_rows}, {"cols", g.island_cols}};
                break;
            case GeneratorSpec::Kind::blobs:
                gj["blob_count"] = g.blob_count;
                gj["blob_radius"] = g.blob_radius;
                gj["amplitude"] = g.amplitude;
                break;
        }
        j["suitability"] = {{"generator", gj}};
    }
    j["priorities"] = {{"p_c", c.priorities.compactness}, {"p_s", c.priorities.suitability},
                       {"threshold", c.priorities.threshold}};
    if (!c.sweep.empty()) j["sweep"] = {{"values", c.sweep}};
    j["schedule"] = {{"t_start", c.schedule.t_start}, {"t_target", c.schedule.t_target},
                     {"thermalize_sweeps", c.schedule.thermalize_sweeps},
                     {"cool_sweeps", c.schedule.cool_sweeps},
                     {"equilibrate_sweeps", c.schedule.equilibrate_sweeps},
                     {"measure_sweeps", c.schedule.measure_sweeps},
                     {"measure_interval", c.schedule.measure_interval}};
    j["sampler"] = {{"kind", c.sampler.kind == SamplerKind::wolff ? "wolff" : "metropolis"},
                    {"boundary", c.sampler.boundary == Boundary::open ? "open" : "periodic"},
                    {"interleave", c.sampler.wolff_interleave}};
    j["snapshots"] = c.sampler.snapshots == SnapshotPolicy::measured ? "measured" : "none";
    j["seeds"] = {{"master", c.sampler.master_seed}, {"list", c.seeds}};
    j["analysis"] = {{"alpha", c.analysis.alpha},
                     {"smoothing_window", c.analysis.smoothing_window},
                     {"refine_depth", c.analysis.refine_depth},
                     {"refine_multiplier", c.analysis.refine_multiplier},
                     {"gray_bin_tolerance", c.analysis.gray_bin_tolerance}};
    j["output"] = {{"dir", c.out_dir.string()}};
    return j.dump(2) + "\n";
}

}  // namespace mola
