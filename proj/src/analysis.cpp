#include "mola/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace mola {

namespace {

void check_axis(int axis, int types) {
    if (axis < 0 || axis >= types)
        throw std::invalid_argument("type axis out of range");
}

}  // namespace

Hist1D build_histogram(const std::vector<SampleRecord>& records, int type_axis) {
    if (records.empty())
        throw std::invalid_argument("build_histogram: no records");
    check_axis(type_axis, static_cast<int>(records.front().use_counts.size()));
    Hist1D h;
    for (const auto& r : records) {
        h.bins[r.use_counts[type_axis]]++;
        h.total++;
    }
    return h;
}

Hist1D build_histogram(const ReplicateSet& replicates, int type_axis) {
    Hist1D h;
    for (const auto& recs : replicates.records) {
        for (const auto& r : recs) {
            check_axis(type_axis, static_cast<int>(r.use_counts.size()));
            h.bins[r.use_counts[type_axis]]++;
            h.total++;
        }
    }
    if (h.total == 0)
        throw std::invalid_argument("build_histogram: empty replicate set");
    return h;
}

HistFull build_histogram_full(const std::vector<SampleRecord>& records) {
    if (records.empty())
        throw std::invalid_argument("build_histogram_full: no records");
    HistFull h;
    for (const auto& r : records) {
        h.bins[r.use_counts]++;
        h.total++;
    }
    return h;
}

Hist1D marginalize(const HistFull& hist, int type_axis) {
    Hist1D h;
    for (const auto& [counts, n] : hist.bins) {
        check_axis(type_axis, static_cast<int>(counts.size()));
        h.bins[counts[type_axis]] += n;
        h.total += n;
    }
    return h;
}

LandauSurface landau_surface(const Hist1D& hist) {
    if (hist.total == 0)
        throw std::invalid_argument("landau_surface: empty histogram");
    LandauSurface s;
    double fmin = std::numeric_limits<double>::infinity();
    for (const auto& [bin, n] : hist.bins) {
        const double f = -std::log(static_cast<double>(n) / static_cast<double>(hist.total));
        s.values[bin] = f;
        s.counts[bin] = n;
        fmin = std::min(fmin, f);
    }
    for (auto& [bin, f] : s.values) f -= fmin;
    return s;
}

std::vector<Minimum> find_minima(const LandauSurface& surface, int smoothing_window) {
    if (surface.values.empty())
        throw std::invalid_argument("find_minima: empty surface");
    if (smoothing_window < 1) smoothing_window = 1;

    std::vector<int> bins;
    std::vector<double> f;
    for (const auto& [bin, val] : surface.values) {
        bins.push_back(bin);
        f.push_back(val);
    }
    const int n = static_cast<int>(bins.size());

    // Centered moving average over observed bins, truncated at the ends.
    std::vector<double> sm(n);
    const int half = smoothing_window / 2;
    for (int k = 0; k < n; k++) {
        const int lo = std::max(0, k - half), hi = std::min(n - 1, k + half);
        double acc = 0.0;
        for (int q = lo; q <= hi; q++) acc += f[q];
        sm[k] = acc / (hi - lo + 1);
    }

    std::vector<Minimum> out;
    int k = 0;
    while (k < n) {
        int end = k;
        while (end + 1 < n && sm[end + 1] == sm[k]) end++;  // plateau
        const bool down_left = (k == 0) || sm[k - 1] > sm[k];
        const bool down_right = (end == n - 1) || sm[end + 1] > sm[end];
        if (down_left && down_right) out.push_back({bins[k], sm[k]});
        k = end + 1;
    }
    std::stable_sort(out.begin(), out.end(), [](const Minimum& a, const Minimum& b) {
        if (a.f != b.f) return a.f < b.f;
        return a.bin < b.bin;
    });
    return out;
}

OptimalCounts optimal_counts(const ReplicateSet& replicates, double tie_tolerance) {
    std::vector<SampleRecord> pooled;
    for (const auto& recs : replicates.records)
        pooled.insert(pooled.end(), recs.begin(), recs.end());
    if (pooled.empty())
        throw std::invalid_argument("optimal_counts: empty ensemble");

    const int types = static_cast<int>(pooled.front().use_counts.size());
    OptimalCounts out;
    for (int t = 0; t < types; t++) {
        const auto minima = find_minima(landau_surface(build_histogram(pooled, t)), 1);
        out.counts.push_back(minima.front().bin);
    }

    // Degeneracy is read off the full count-vector histogram: all bins tied
    // with the most probable one (within tolerance in F) form the minimum set.
    const HistFull full = build_histogram_full(pooled);
    std::size_t best = 0;
    for (const auto& [counts, n] : full.bins) best = std::max(best, n);
    for (const auto& [counts, n] : full.bins) {
        const double fgap = std::log(static_cast<double>(best) / static_cast<double>(n));
        if (fgap <= tie_tolerance) out.minimum_set.push_back(counts);
    }
    out.degenerate = out.minimum_set.size() > 1;
    return out;
}

FlashpointScan detect_flashpoints(const UseCountSeries& series, double alpha) {
    if (series.priorities.size() < 2)
        throw std::invalid_argument("detect_flashpoints: need at least two priority points");
    if (!(alpha > 0.0))
        throw std::invalid_argument("detect_flashpoints: alpha must be positive");
    if (series.counts.size() != series.priorities.size())
        throw std::invalid_argument("detect_flashpoints: series size mismatch");
    for (std::size_t n = 1; n < series.priorities.size(); n++)
        if (!(series.priorities[n] > series.priorities[n - 1]))
            throw std::invalid_argument("detect_flashpoints: priorities must be strictly increasing");

    FlashpointScan scan;
    for (std::size_t n = 0; n + 1 < series.priorities.size(); n++) {
        Flashpoint fp;
        fp.interval = static_cast<int>(n);
        fp.p_low = series.priorities[n];
        fp.p_high = series.priorities[n + 1];
        const auto& lo = series.counts[n];
        const auto& hi = series.counts[n + 1];
        for (std::size_t x = 0; x < lo.size(); x++) {
            const double denom = 0.5 * (lo[x] + hi[x]);
            if (denom == 0.0) {
                std::ostringstream msg;
                msg << "type " << x << " absent on both sides of interval " << n << "; skipped";
                scan.warnings.push_back(msg.str());
                continue;
            }
            const double rel = std::abs(hi[x] - lo[x]) / denom;
            if (rel > alpha) {
                fp.types.push_back(static_cast<int>(x));
                fp.rel_changes.push_back(rel);
            }
        }
        if (!fp.types.empty()) scan.flashpoints.push_back(std::move(fp));
    }
    return scan;
}

GrayAreaMap gray_area_map(const std::vector<LandUseGrid>& ensemble_a,
                          const std::vector<LandUseGrid>* ensemble_b) {
    const std::vector<LandUseGrid>* parts[2] = {&ensemble_a, ensemble_b};
    GrayAreaMap map;
    for (const auto* part : parts) {
        if (!part) continue;
        for (const auto& g : *part) {
            if (g.types() != 3)
                throw std::invalid_argument("gray_area_map: defined for S=3 only");
            if (map.samples == 0) {
                map.rows = g.rows();
                map.cols = g.cols();
                map.mean.assign(g.size(), {0.0, 0.0});
            } else if (g.rows() != map.rows || g.cols() != map.cols) {
                throw std::invalid_argument("gray_area_map: grid dimensions differ");
            }
            for (std::size_t c = 0; c < g.size(); c++) {
                const double angle = 2.0 * std::numbers::pi * (g.cells()[c] - 1.0) / 3.0;
                map.mean[c] += std::complex<double>(std::cos(angle), std::sin(angle));
            }
            map.samples++;
        }
    }
    if (map.samples == 0)
        throw std::invalid_argument("gray_area_map: empty ensemble");
    for (auto& z : map.mean) z /= static_cast<double>(map.samples);
    return map;
}

TernaryPoint ternary_project(const std::vector<int>& counts, long total_cells) {
    if (counts.size() != 3)
        throw std::invalid_argument("ternary_project: defined for S=3 only");
    if (counts[0] + counts[1] + counts[2] != total_cells)
        throw std::invalid_argument("ternary_project: counts do not sum to the cell total");
    TernaryPoint p;
    for (int s = 0; s < 3; s++) p.w[s] = static_cast<double>(counts[s]) / total_cells;
    p.x = p.w[1] + 0.5 * p.w[2];
    p.y = p.w[2] * std::numbers::sqrt3 / 2.0;
    return p;
}

ScanResult symmetry_breaking_scan(int rows, int cols, int types, const std::vector<double>& t_values,
                                  const AnnealSchedule& schedule, const std::vector<std::uint64_t>& seeds,
                                  const SamplerOptions& options, int parallelism,
                                  int smoothing_window) {
    for (std::size_t k = 1; k < t_values.size(); k++)
        if (!(t_values[k] > t_values[k - 1]))
            throw std::invalid_argument("symmetry_breaking_scan: t_values must be increasing");

    const SuitabilityField zero_field(rows, cols, types);
    PrioritySet weights;
    weights.compactness = 1.0;
    weights.suitability = 0.0;

    const long cells = static_cast<long>(rows) * cols;
    ScanResult result;
    for (double t : t_values) {
        AnnealSchedule sched = schedule;
        sched.t_target = t;
        sched.t_start = std::max(schedule.t_start, t);
        weights.threshold = t;

        const ReplicateSet reps = run_replicates(zero_field, weights, sched, seeds, options, parallelism);

        // Pool N_X over all types; the compactness-only model is symmetric
        // under label permutations, so pooling just triples the statistics.
        Hist1D pooled;
        for (const auto& recs : reps.records) {
            for (const auto& r : recs) {
                for (int x : r.use_counts) pooled.bins[x]++;
                pooled.total += r.use_counts.size();
            }
        }

        ScanPoint point;
        point.t = t;
        auto minima = find_minima(landau_surface(pooled), smoothing_window);

        // Keep minima within 2 F-units of the global one, then merge minima
        // closer than cells/8 bins, keeping the deepest of each group.
        std::erase_if(minima, [&](const Minimum& m) { return m.f > minima.front().f + 2.0; });
        std::sort(minima.begin(), minima.end(),
                  [](const Minimum& a, const Minimum& b) { return a.bin < b.bin; });
        for (const Minimum& m : minima) {
            if (!point.minima.empty() && m.bin - point.minima.back().bin < cells / 8) {
                if (m.f < point.minima.back().f) point.minima.back() = m;
            } else {
                point.minima.push_back(m);
            }
        }

        const double center = static_cast<double>(cells) / types;
        const Minimum global = *std::min_element(
            point.minima.begin(), point.minima.end(),
            [](const Minimum& a, const Minimum& b) { return a.f < b.f; });
        const bool multiple_wells = point.minima.size() >= 2 &&
                                    point.minima.back().bin - point.minima.front().bin > cells / 4;
        const bool peripheral_global = std::abs(global.bin - center) > static_cast<double>(cells) / 6.0;
        point.broken = multiple_wells || peripheral_global;
        if (point.broken) result.largest_broken_t = t;
        result.points.push_back(std::move(point));
    }
    return result;
}

}  // namespace mola
