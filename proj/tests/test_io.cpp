#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <map>
#include <random>

#include "mola/config.hpp"
#include "mola/io.hpp"
#include "mola/pipeline.hpp"

using namespace mola;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("mola_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void spill(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

// Relative path -> file bytes for every regular file under root.
std::map<std::string, std::string> dir_contents(const fs::path& root) {
    std::map<std::string, std::string> m;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file())
            m[fs::relative(e.path(), root).generic_string()] = slurp(e.path());
    return m;
}

SuitabilityField random_field(int rows, int cols, int types, std::uint64_t seed) {
    std::mt19937_64 eng(seed);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    SuitabilityField f(rows, cols, types);
    for (int i = 0; i < rows; i++)
        for (int j = 0; j < cols; j++)
            for (int s = 0; s < types; s++) f.set(i, j, s, u(eng));
    return f;
}

// Minimal valid sweep config JSON with a small schedule.
std::string small_sweep_config(const std::string& extra = "") {
    return std::string(R"({
  "grid": {"rows": 6, "cols": 6, "types": 3},
  "suitability": {"generator": {"kind": "uniform-random", "seed": 11, "low": -1, "high": 1}},
  "priorities": {"p_c": 1.0, "threshold": 1.0},
  "sweep": {"values": [0.5, 1.0, 1.5]},
  "schedule": {"t_start": 3.0, "t_target": 1.0, "thermalize_sweeps": 20,
               "cool_sweeps": 30, "equilibrate_sweeps": 20,
               "measure_sweeps": 40, "measure_interval": 10},
  "seeds": {"list": [1, 2, 3, 4], "master": 7})" +
           extra + "\n}\n");
}

}  // namespace

TEST_CASE("grid csv round trip") {
    TempDir tmp;
    LandUseGrid g(3, 4, 3);
    for (std::size_t c = 0; c < g.size(); c++) g.cells()[c] = static_cast<use_type>(c % 3);
    io::write_grid_csv(tmp.path / "g.csv", g);
    CHECK(io::read_grid_csv(tmp.path / "g.csv", 3) == g);
    SUBCASE("out-of-range codes rejected") {
        spill(tmp.path / "bad.csv", "0,1\n2,3\n");
        CHECK_THROWS(io::read_grid_csv(tmp.path / "bad.csv", 3));
    }
}

TEST_CASE("suitability csv round trips") {
    TempDir tmp;
    const auto f = random_field(4, 5, 3, 17);
    io::write_suitability_csv(tmp.path / "f.csv", f);
    const auto back = io::read_suitability_csv(tmp.path / "f.csv", 4, 5, 3);
    for (int i = 0; i < 4; i++)
        for (int j = 0; j < 5; j++)
            for (int s = 0; s < 3; s++)
                CHECK(back.score(i, j, s) == doctest::Approx(f.score(i, j, s)).epsilon(1e-12));

    SUBCASE("missing combination is an error") {
        // Drop the last data row.
        std::string text = slurp(tmp.path / "f.csv");
        text.erase(text.rfind('\n', text.size() - 2) + 1);
        spill(tmp.path / "partial.csv", text);
        CHECK_THROWS(io::read_suitability_csv(tmp.path / "partial.csv", 4, 5, 3));
    }
    SUBCASE("layered form matches long form") {
        for (int s = 0; s < 3; s++) {
            std::ofstream out(tmp.path / ("f." + std::to_string(s) + ".csv"));
            for (int i = 0; i < 4; i++) {
                for (int j = 0; j < 5; j++)
                    out << (j ? "," : "") << io::format_double(f.score(i, j, s));
                out << "\n";
            }
        }
        const auto layered = io::read_suitability_layers(tmp.path / "f", 4, 5, 3);
        for (int i = 0; i < 4; i++)
            for (int j = 0; j < 5; j++)
                for (int s = 0; s < 3; s++)
                    CHECK(layered.score(i, j, s) == doctest::Approx(f.score(i, j, s)).epsilon(1e-12));
    }
}

TEST_CASE("landau, gray-area, ternary, series, mask round trips") {
    TempDir tmp;
    SUBCASE("landau") {
        LandauSurface s;
        s.values = {{3, 0.0}, {5, 1.25}, {9, 0.5}};
        s.counts = {{3, 100}, {5, 28}, {9, 60}};
        io::write_landau_csv(tmp.path / "l.csv", s);
        const auto back = io::read_landau_csv(tmp.path / "l.csv");
        CHECK(back.counts == s.counts);
        for (const auto& [bin, v] : s.values)
            CHECK(back.values.at(bin) == doctest::Approx(v).epsilon(1e-12));
    }
    SUBCASE("gray area") {
        GrayAreaMap m;
        m.rows = 2;
        m.cols = 3;
        m.samples = 9;
        for (int c = 0; c < 6; c++) m.mean.push_back({0.1 * c, -0.05 * c});
        io::write_gray_area_csv(tmp.path / "z.csv", m);
        const auto back = io::read_gray_area_csv(tmp.path / "z.csv");
        CHECK(back.rows == 2);
        CHECK(back.cols == 3);
        for (int c = 0; c < 6; c++) CHECK(std::abs(back.mean[c] - m.mean[c]) < 1e-12);
    }
    SUBCASE("ternary") {
        std::vector<TernaryPoint> pts{ternary_project({4, 3, 2}, 9), ternary_project({0, 9, 0}, 9)};
        io::write_ternary_csv(tmp.path / "t.csv", pts);
        const auto back = io::read_ternary_csv(tmp.path / "t.csv");
        REQUIRE(back.size() == 2);
        for (std::size_t k = 0; k < 2; k++) {
            CHECK(back[k].x == doctest::Approx(pts[k].x).epsilon(1e-12));
            CHECK(back[k].y == doctest::Approx(pts[k].y).epsilon(1e-12));
        }
    }
    SUBCASE("series") {
        UseCountSeries s;
        s.priorities = {0.5, 1.0};
        s.counts = {{500, 300, 100}, {380, 360, 160}};
        s.replicates = {300, 300};
        io::write_series_csv(tmp.path / "s.csv", s);
        const auto back = io::read_series_csv(tmp.path / "s.csv");
        CHECK(back.priorities == s.priorities);
        CHECK(back.replicates == s.replicates);
        REQUIRE(back.counts.size() == 2);
        for (int n = 0; n < 2; n++)
            for (int t = 0; t < 3; t++)
                CHECK(back.counts[n][t] == doctest::Approx(s.counts[n][t]).epsilon(1e-12));
    }
    SUBCASE("mask") {
        const auto m = RegionMask::rectangle(5, 6, 1, 2, 3, 2);
        io::write_mask_csv(tmp.path / "m.csv", m);
        const auto back = io::read_mask_csv(tmp.path / "m.csv");
        for (int i = 0; i < 5; i++)
            for (int j = 0; j < 6; j++) CHECK(back.at(i, j) == m.at(i, j));
    }
}

TEST_CASE("samples csv format") {
    TempDir tmp;
    ReplicateSet reps;
    reps.seeds = {42};
    reps.records.resize(1);
    SampleRecord r;
    r.sweep = 100;
    r.use_counts = {5, 3, 1};
    r.energy = {-10.0, -2.5, -12.5};
    reps.records[0].push_back(r);
    io::write_samples_csv(tmp.path / "s.csv", reps);
    CHECK(slurp(tmp.path / "s.csv") == "seed,sweep,N_0,N_1,N_2,O1,O2,H\n42,100,5,3,1,-10,-2.5,-12.5\n");
}

TEST_CASE("svg emitters produce non-empty well-formed documents") {
    GrayAreaMap m;
    m.rows = m.cols = 2;
    m.samples = 1;
    m.mean = {{1, 0}, {-0.5, 0.5}, {0, 0}, {0.2, -0.2}};
    const auto svg = io::gray_area_svg(m);
    CHECK(svg.starts_with("<svg"));
    CHECK(svg.find("</svg>") != std::string::npos);

    std::vector<TernaryPoint> pts;
    for (int k = 0; k <= 10; k++) pts.push_back(ternary_project({k, 10 - k, 0}, 10));
    CHECK(io::ternary_svg(pts).find("</svg>") != std::string::npos);
    // Subsampling keeps the document bounded and deterministic.
    std::vector<TernaryPoint> many(20000, pts[3]);
    const auto a = io::ternary_svg(many, 100, 5);
    CHECK(a == io::ternary_svg(many, 100, 5));
    CHECK(a.size() < io::ternary_svg(many, 20000, 5).size());
}

TEST_CASE("generators") {
    SUBCASE("uniform-random is deterministic in the seed and honors bounds") {
        GeneratorSpec g;
        g.kind = GeneratorSpec::Kind::uniform_random;
        g.seed = 5;
        g.low = -0.25;
        g.high = 0.75;
        const auto a = generate_field(g, 8, 8, 3);
        const auto b = generate_field(g, 8, 8, 3);
        g.seed = 6;
        const auto c = generate_field(g, 8, 8, 3);
        bool differs = false;
        for (int i = 0; i < 8; i++)
            for (int j = 0; j < 8; j++)
                for (int s = 0; s < 3; s++) {
                    CHECK(a.score(i, j, s) == b.score(i, j, s));
                    CHECK(a.score(i, j, s) >= -0.25);
                    CHECK(a.score(i, j, s) <= 0.75);
                    if (a.score(i, j, s) != c.score(i, j, s)) differs = true;
                }
        CHECK(differs);
    }
    SUBCASE("island with zero margin equals pure background") {
        GeneratorSpec g;
        g.kind = GeneratorSpec::Kind::two_region_island;
        g.island_i = g.island_j = 2;
        g.island_rows = g.island_cols = 3;
        g.margin = 0.0;
        const auto f = generate_field(g, 8, 8, 3);
        for (int i = 0; i < 8; i++)
            for (int j = 0; j < 8; j++) {
                CHECK(f.score(i, j, 0) == 1.0);  // background bonus
                CHECK(f.score(i, j, 1) == 0.0);
                CHECK(f.score(i, j, 2) == 0.0);
            }
    }
    SUBCASE("island margin is confined to the rectangle") {
        GeneratorSpec g;
        g.kind = GeneratorSpec::Kind::two_region_island;
        g.island_i = g.island_j = 2;
        g.island_rows = g.island_cols = 3;
        g.background_bonus = 1.0;
        g.margin = 2.0;  // net on-site gain 1.0 inside
        const auto f = generate_field(g, 8, 8, 3);
        for (int i = 0; i < 8; i++)
            for (int j = 0; j < 8; j++) {
                const bool inside = i >= 2 && i < 5 && j >= 2 && j < 5;
                CHECK(f.score(i, j, 1) - f.score(i, j, 0) == (inside ? 1.0 : -1.0));
            }
    }
    SUBCASE("island exceeding the grid is rejected") {
        GeneratorSpec g;
        g.kind = GeneratorSpec::Kind::two_region_island;
        g.island_i = 6;
        g.island_j = 6;
        g.island_rows = g.island_cols = 4;
        CHECK_THROWS(generate_field(g, 8, 8, 3));
    }
    SUBCASE("gradient peaks where each type is most suitable") {
        GeneratorSpec g;
        g.kind = GeneratorSpec::Kind::gradient;
        g.scale = 2.0;
        const auto f = generate_field(g, 9, 4, 3);
        CHECK(f.score(0, 0, 0) == doctest::Approx(2.0));  // type 0 peaks at the top
        CHECK(f.score(4, 0, 1) == doctest::Approx(2.0));  // type 1 in the middle
        CHECK(f.score(8, 0, 2) == doctest::Approx(2.0));  // type 2 at the bottom
        CHECK(f.score(8, 0, 0) < f.score(0, 0, 0));
    }
}

TEST_CASE("config loading") {
    TempDir tmp;
    SUBCASE("defaults resolve to the reference protocol") {
        spill(tmp.path / "c.json", R"({
  "suitability": {"generator": {"kind": "uniform-random"}},
  "seeds": {"count": 3}
})");
        const auto c = load_config(tmp.path / "c.json");
        CHECK(c.rows == 30);
        CHECK(c.cols == 30);
        CHECK(c.types == 3);
        CHECK(c.schedule.t_start == 15.0);
        CHECK(c.schedule.t_target == 1.0);
        CHECK(c.schedule.thermalize_sweeps == 1000);
        CHECK(c.schedule.cool_sweeps == 35000);
        CHECK(c.schedule.equilibrate_sweeps == 10000);
        CHECK(c.schedule.measure_sweeps == 10000);
        CHECK(c.schedule.measure_interval == 50);
        CHECK(c.priorities.compactness == 1.0);
        CHECK(c.priorities.threshold == 1.0);
        CHECK(c.sampler.kind == SamplerKind::wolff);
        CHECK(c.sampler.boundary == Boundary::open);
        CHECK(c.seeds == std::vector<std::uint64_t>{0, 1, 2});
        CHECK(c.analysis.alpha == 0.1);
    }
    SUBCASE("sweep range 0.1..8.0 step 0.1 expands to 80 points") {
        spill(tmp.path / "c.json", R"({
  "suitability": {"generator": {"kind": "uniform-random"}},
  "seeds": {"count": 1},
  "sweep": {"start": 0.1, "stop": 8.0, "step": 0.1}
})");
        const auto c = load_config(tmp.path / "c.json");
        REQUIRE(c.sweep.size() == 80);
        CHECK(c.sweep.front() == doctest::Approx(0.1));
        CHECK(c.sweep.back() == doctest::Approx(8.0));
    }
    SUBCASE("bad alpha names the offending field") {
        spill(tmp.path / "c.json", R"({
  "suitability": {"generator": {"kind": "uniform-random"}},
  "seeds": {"count": 1},
  "analysis": {"alpha": 1.5}
})");
        CHECK_THROWS_WITH_AS(load_config(tmp.path / "c.json"),
                             doctest::Contains("analysis.alpha"), std::invalid_argument);
    }
    SUBCASE("both or neither suitability source is an error") {
        spill(tmp.path / "none.json", R"({"seeds": {"count": 1}})");
        CHECK_THROWS(load_config(tmp.path / "none.json"));
        spill(tmp.path / "both.json", R"({
  "suitability": {"file": "x.csv", "generator": {"kind": "uniform-random"}},
  "seeds": {"count": 1}
})");
        CHECK_THROWS(load_config(tmp.path / "both.json"));
    }
    SUBCASE("effective config echo reloads to the same config") {
        spill(tmp.path / "c.json", small_sweep_config());
        const auto c = load_config(tmp.path / "c.json");
        spill(tmp.path / "echo.json", effective_config_json(c));
        const auto back = load_config(tmp.path / "echo.json");
        CHECK(back.rows == c.rows);
        CHECK(back.sweep == c.sweep);
        CHECK(back.seeds == c.seeds);
        CHECK(back.schedule.cool_sweeps == c.schedule.cool_sweeps);
        CHECK(back.sampler.master_seed == c.sampler.master_seed);
        CHECK(effective_config_json(back) == effective_config_json(c));
    }
}

TEST_CASE("manifest hashing") {
    TempDir tmp;
    spill(tmp.path / "a.txt", "hello");
    const auto h1 = io::fnv1a_file(tmp.path / "a.txt");
    spill(tmp.path / "b.txt", "hello");
    CHECK(io::fnv1a_file(tmp.path / "b.txt") == h1);
    spill(tmp.path / "c.txt", "hello!");
    CHECK(io::fnv1a_file(tmp.path / "c.txt") != h1);
    // FNV-1a 64 reference value for "hello".
    CHECK(h1 == 0xa430d84680aabd0bULL);
}

TEST_CASE("pipelines") {
    TempDir tmp;
    spill(tmp.path / "sweep.json", small_sweep_config());
    const auto config = load_config(tmp.path / "sweep.json");

    SUBCASE("sweep produces the full artifact set and is resumable") {
        PipelineOptions opts;
        opts.parallelism = 2;
        sweep_pipeline(config, tmp.path / "run", opts);
        CHECK(fs::exists(tmp.path / "run/effective_config.json"));
        CHECK(fs::exists(tmp.path / "run/suitability.csv"));
        CHECK(fs::exists(tmp.path / "run/series.csv"));
        CHECK(fs::exists(tmp.path / "run/series.svg"));
        CHECK(fs::exists(tmp.path / "run/flashpoints.csv"));
        CHECK(fs::exists(tmp.path / "run/manifest.json"));
        CHECK(fs::exists(tmp.path / "run/points/point_000_ps_0.5/samples.csv"));
        CHECK(fs::exists(tmp.path / "run/points/point_000_ps_0.5/landau_0.csv"));
        CHECK(fs::exists(tmp.path / "run/points/point_000_ps_0.5/ternary.csv"));
        CHECK_FALSE(fs::exists(tmp.path / "run/FAILED"));

        const auto series = io::read_series_csv(tmp.path / "run/series.csv");
        CHECK(series.priorities == config.sweep);
        CHECK(series.replicates == std::vector<std::size_t>(3, 4));

        // Resume must not recompute finished points: corrupt a sample file
        // and verify the tampered bytes survive a resumed run.
        spill(tmp.path / "run/points/point_000_ps_0.5/samples.csv", "tampered\n");
        opts.resume = true;
        sweep_pipeline(config, tmp.path / "run", opts);
        CHECK(slurp(tmp.path / "run/points/point_000_ps_0.5/samples.csv") == "tampered\n");
    }

    SUBCASE("outputs are byte-identical across runs and parallelism levels") {
        PipelineOptions serial, parallel;
        serial.parallelism = 1;
        parallel.parallelism = 4;
        sweep_pipeline(config, tmp.path / "a", serial);
        sweep_pipeline(config, tmp.path / "b", parallel);
        CHECK(dir_contents(tmp.path / "a") == dir_contents(tmp.path / "b"));
    }

    SUBCASE("anneal pipeline emits a single-point run") {
        auto single = config;
        single.sweep.clear();
        single.priorities.suitability = 1.0;
        anneal_pipeline(single, tmp.path / "one", PipelineOptions{2, false});
        CHECK(fs::exists(tmp.path / "one/samples.csv"));
        CHECK(fs::exists(tmp.path / "one/landau_0.csv"));
        CHECK(fs::exists(tmp.path / "one/landau_0.svg"));
        CHECK(fs::exists(tmp.path / "one/ternary.csv"));
        CHECK(fs::exists(tmp.path / "one/ternary.svg"));
        CHECK(fs::exists(tmp.path / "one/manifest.json"));
    }

    SUBCASE("render_reports rebuilds SVGs from CSVs alone") {
        anneal_pipeline(config, tmp.path / "r", PipelineOptions{2, false});
        const auto before = slurp(tmp.path / "r/ternary.svg");
        fs::remove(tmp.path / "r/ternary.svg");
        render_reports(tmp.path / "r");
        CHECK(slurp(tmp.path / "r/ternary.svg") == before);
    }

    SUBCASE("render_reports on an empty directory names the expected files") {
        fs::create_directories(tmp.path / "empty");
        CHECK_THROWS_WITH_AS(render_reports(tmp.path / "empty"),
                             doctest::Contains("series.csv"), std::runtime_error);
    }
}
