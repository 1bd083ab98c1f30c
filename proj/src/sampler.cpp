#include "mola/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <set>
#include <thread>

namespace mola {

void AnnealSchedule::validate() const {
    if (!(t_target > 0.0))
        throw std::invalid_argument("schedule: t_target must be positive");
    if (t_start < t_target)
        throw std::invalid_argument("schedule: t_start must be >= t_target");
    if (thermalize_sweeps < 0 || cool_sweeps < 0 || equilibrate_sweeps < 0 || measure_sweeps < 0)
        throw std::invalid_argument("schedule: sweep counts must be >= 0");
    if (measure_interval < 1)
        throw std::invalid_argument("schedule: measure_interval must be >= 1");
}

AnnealSchedule AnnealSchedule::fixed(double t, long thermalize, long measure, long interval) {
    AnnealSchedule s;
    s.t_start = t;
    s.t_target = t;
    s.thermalize_sweeps = thermalize;
    s.cool_sweeps = 0;
    s.equilibrate_sweeps = 0;
    s.measure_sweeps = measure;
    s.measure_interval = interval;
    return s;
}

int metropolis_sweep(LandUseGrid& grid, const SuitabilityField& field,
                     const PrioritySet& priorities, Rng& rng, Boundary boundary,
                     double* o1, double* o2) {
    const int rows = grid.rows(), cols = grid.cols(), types = grid.types();
    const double t = priorities.threshold;
    const long proposals = static_cast<long>(rows) * cols;
    int accepted = 0;
    for (long p = 0; p < proposals; p++) {
        const int i = rng.below(rows);
        const int j = rng.below(cols);
        const use_type old_type = grid.at(i, j);
        const use_type new_type =
            static_cast<use_type>((old_type + 1 + rng.below(types - 1)) % types);
        const FlipDelta d = delta_objectives_flip(grid, field, priorities, i, j, new_type, boundary);
        if (d.d_total <= 0.0 || rng.uniform() < std::exp(-d.d_total / t)) {
            grid.set(i, j, new_type);
            if (o1) *o1 += d.d_compactness;
            if (o2) *o2 += d.d_suitability;
            accepted++;
        }
    }
    return accepted;
}

namespace {

// Applies the label transposition a<->b to every flagged cell and folds the
// energy change into o1/o2. Pairs with both endpoints flipped are invariant
// under the transposition, so only flipped/unflipped pairs contribute.
void flip_cells(LandUseGrid& grid, const SuitabilityField& field, Boundary boundary,
                const std::vector<std::uint8_t>& flip, use_type a, use_type b,
                double* o1, double* o2) {
    const int rows = grid.rows(), cols = grid.cols();
    long match_delta = 0;
    double suit_delta = 0.0;
    for (int i = 0; i < rows; i++) {
        for (int j = 0; j < cols; j++) {
            if (!flip[grid.idx(i, j)]) continue;
            const use_type s = grid.at(i, j);
            const use_type sn = (s == a) ? b : a;
            suit_delta += field.score(i, j, sn) - field.score(i, j, s);
            for (int k = 0; k < 8; k++) {
                int ni = i + kMooreDi[k], nj = j + kMooreDj[k];
                if (boundary == Boundary::periodic) {
                    ni = (ni + rows) % rows;
                    nj = (nj + cols) % cols;
                } else if (!grid.in_bounds(ni, nj)) {
                    continue;
                }
                if (flip[grid.idx(ni, nj)]) continue;
                const use_type n = grid.at(ni, nj);
                if (n == sn) match_delta++;
                if (n == s) match_delta--;
            }
        }
    }
    if (o1) *o1 += -2.0 * static_cast<double>(match_delta);
    if (o2) *o2 += -suit_delta;
    for (std::size_t c = 0; c < grid.size(); c++) {
        if (flip[c]) grid.cells()[c] = (grid.cells()[c] == a) ? b : a;
    }
}

}  // namespace

int wolff_step(LandUseGrid& grid, const SuitabilityField& field,
               const PrioritySet& priorities, Rng& rng, Boundary boundary,
               double* o1, double* o2) {
    const int rows = grid.rows(), cols = grid.cols(), types = grid.types();
    const double t = priorities.threshold;
    const double p_bond = 1.0 - std::exp(-2.0 * priorities.compactness / t);

    // Transposition (a, b): a is the seed cell's type, b a uniformly random
    // other label. Sites of other types are inert for this move.
    const int seed = rng.below(rows * cols);
    const use_type a = grid.cells()[seed];
    const use_type b = static_cast<use_type>((a + 1 + rng.below(types - 1)) % types);

    std::vector<std::uint8_t> in_cluster(grid.size(), 0);
    std::vector<int> stack;
    in_cluster[seed] = 1;
    stack.push_back(seed);
    bool ghost_in_cluster = false;
    bool ghost_pending = false;
    int cluster_size = 1;

    // Site-ghost coupling in the embedded two-label model: h = P_S*(c_a-c_b)/2
    // with spin +1 for label a. A bond forms only when the coupling aligns
    // the site with the (fixed, +1) ghost.
    auto try_ghost_bond = [&](int cell) {
        const int i = cell / cols, j = cell % cols;
        const double h = 0.5 * priorities.suitability * (field.score(i, j, a) - field.score(i, j, b));
        const double hs = (grid.cells()[cell] == a) ? h : -h;
        return hs > 0.0 && rng.uniform() < 1.0 - std::exp(-2.0 * hs / t);
    };

    while (!stack.empty() || ghost_pending) {
        if (ghost_pending) {
            // The ghost couples to every active site; test each edge to a
            // site not yet in the cluster exactly once.
            ghost_pending = false;
            for (int c = 0; c < rows * cols; c++) {
                if (in_cluster[c]) continue;
                const use_type s = grid.cells()[c];
                if (s != a && s != b) continue;
                if (try_ghost_bond(c)) {
                    in_cluster[c] = 1;
                    cluster_size++;
                    stack.push_back(c);
                }
            }
            continue;
        }
        const int cell = stack.back();
        stack.pop_back();
        const int i = cell / cols, j = cell % cols;
        const use_type s = grid.cells()[cell];

        if (!ghost_in_cluster && priorities.suitability != 0.0 && try_ghost_bond(cell)) {
            ghost_in_cluster = true;
            ghost_pending = true;
        }
        for (int k = 0; k < 8; k++) {
            int ni = i + kMooreDi[k], nj = j + kMooreDj[k];
            if (boundary == Boundary::periodic) {
                ni = (ni + rows) % rows;
                nj = (nj + cols) % cols;
            } else if (!grid.in_bounds(ni, nj)) {
                continue;
            }
            const int nc = static_cast<int>(grid.idx(ni, nj));
            if (in_cluster[nc] || grid.cells()[nc] != s) continue;
            if (rng.uniform() < p_bond) {
                in_cluster[nc] = 1;
                cluster_size++;
                stack.push_back(nc);
            }
        }
    }

    if (!ghost_in_cluster) {
        flip_cells(grid, field, boundary, in_cluster, a, b, o1, o2);
        return cluster_size;
    }
    // The ghost side stays fixed: apply the transposition to the active
    // complement instead, which is the same physical move.
    std::vector<std::uint8_t> flip(grid.size(), 0);
    for (std::size_t c = 0; c < grid.size(); c++) {
        const use_type s = grid.cells()[c];
        if (!in_cluster[c] && (s == a || s == b)) flip[c] = 1;
    }
    flip_cells(grid, field, boundary, flip, a, b, o1, o2);
    return cluster_size;
}

Chain::Chain(LandUseGrid grid, const SuitabilityField& field, PrioritySet weights,
             Boundary boundary, Rng rng)
    : grid_(std::move(grid)), field_(field), weights_(weights), boundary_(boundary),
      rng_(rng) {
    require_compatible(grid_, field_);
    o1_ = compactness_objective(grid_, boundary_);
    o2_ = suitability_objective(grid_, field_);
}

void Chain::sweep(double t, SamplerKind kind, bool wolff_interleave) {
    PrioritySet p = weights_;
    p.threshold = t;
    if (kind == SamplerKind::metropolis) {
        metropolis_sweep(grid_, field_, p, rng_, boundary_, &o1_, &o2_);
        return;
    }
    wolff_step(grid_, field_, p, rng_, boundary_, &o1_, &o2_);
    if (wolff_interleave) metropolis_sweep(grid_, field_, p, rng_, boundary_, &o1_, &o2_);
}

EnergyBreakdown Chain::energy() const {
    EnergyBreakdown e;
    e.compactness = o1_;
    e.suitability = o2_;
    e.total = weights_.compactness * o1_ + weights_.suitability * o2_;
    return e;
}

LandUseGrid Chain::random_grid(int rows, int cols, int types, Rng& rng) {
    LandUseGrid g(rows, cols, types);
    for (auto& c : g.cells()) c = static_cast<use_type>(rng.below(types));
    return g;
}

std::vector<SampleRecord> run_anneal(const SuitabilityField& field, const PrioritySet& priorities,
                                     const AnnealSchedule& schedule, std::uint64_t seed,
                                     const SamplerOptions& options) {
    schedule.validate();
    priorities.validate();
    Rng rng = Rng::for_replicate(options.master_seed, seed);
    Chain chain(Chain::random_grid(field.rows(), field.cols(), field.types(), rng),
                field, priorities, options.boundary, rng);

    long sweep_index = 0;
    auto do_sweep = [&](double t) {
        chain.sweep(t, options.kind, options.wolff_interleave);
        sweep_index++;
    };

    for (long k = 0; k < schedule.thermalize_sweeps; k++) do_sweep(schedule.t_start);
    for (long k = 0; k < schedule.cool_sweeps; k++) {
        const double frac = static_cast<double>(k + 1) / static_cast<double>(schedule.cool_sweeps);
        do_sweep(schedule.t_start + (schedule.t_target - schedule.t_start) * frac);
    }
    for (long k = 0; k < schedule.equilibrate_sweeps; k++) do_sweep(schedule.t_target);

    std::vector<SampleRecord> records;
    records.reserve(schedule.measure_sweeps / schedule.measure_interval);
    for (long m = 1; m <= schedule.measure_sweeps; m++) {
        do_sweep(schedule.t_target);
        if (m % schedule.measure_interval != 0) continue;
        SampleRecord rec;
        rec.sweep = sweep_index;
        rec.use_counts = chain.grid().use_counts();
        rec.energy = chain.energy();
        if (options.snapshots == SnapshotPolicy::measured) rec.snapshot = chain.grid();
        records.push_back(std::move(rec));
    }
    return records;
}

ReplicateSet run_replicates(const SuitabilityField& field, const PrioritySet& priorities,
                            const AnnealSchedule& schedule, const std::vector<std::uint64_t>& seeds,
                            const SamplerOptions& options, int parallelism) {
    if (seeds.empty())
        throw std::invalid_argument("run_replicates: need at least one seed");
    if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size())
        throw std::invalid_argument("run_replicates: duplicate seeds");

    ReplicateSet out;
    out.seeds = seeds;
    out.records.resize(seeds.size());

    const int workers = std::max(1, std::min<int>(parallelism, static_cast<int>(seeds.size())));
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= seeds.size()) return;
            out.records[k] = run_anneal(field, priorities, schedule, seeds[k], options);
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; w++) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    return out;
}

}  // namespace mola
