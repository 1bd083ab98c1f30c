#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mola/energy.hpp"
#include "mola/grid.hpp"
#include "mola/rng.hpp"

namespace mola {

enum class SamplerKind { metropolis, wolff };

enum class SnapshotPolicy { none, measured };

// Sampling protocol: thermalize at t_start, cool linearly in sweep index
// to t_target, equilibrate, then measure every measure_interval sweeps.
struct AnnealSchedule {
    double t_start = 15.0;
    double t_target = 1.0;
    long thermalize_sweeps = 1000;
    long cool_sweeps = 35000;
    long equilibrate_sweeps = 10000;
    long measure_sweeps = 10000;
    long measure_interval = 50;

    void validate() const;

    // Temperature held fixed at t for the whole run.
    static AnnealSchedule fixed(double t, long thermalize, long measure, long interval);
};

struct SampleRecord {
    long sweep = 0;
    std::vector<int> use_counts;
    EnergyBreakdown energy;
    std::optional<LandUseGrid> snapshot;
};

struct SamplerOptions {
    SamplerKind kind = SamplerKind::wolff;
    Boundary boundary = Boundary::open;
    // One Metropolis sweep interleaved with every Wolff cluster move; the
    // cluster kernel alone is ergodic only through its label transpositions.
    bool wolff_interleave = true;
    SnapshotPolicy snapshots = SnapshotPolicy::none;
    std::uint64_t master_seed = 0;
};

struct ReplicateSet {
    std::vector<std::uint64_t> seeds;
    std::vector<std::vector<SampleRecord>> records;  // records[k] belongs to seeds[k]
};

// One proposed flip per cell to a uniformly random different type, each
// accepted with probability min(1, exp(-dH/T)). Returns the number of
// accepted flips. o1/o2, when given, are updated incrementally.
int metropolis_sweep(LandUseGrid& grid, const SuitabilityField& field,
                     const PrioritySet& priorities, Rng& rng,
                     Boundary boundary = Boundary::open,
                     double* o1 = nullptr, double* o2 = nullptr);

// One ghost-site Wolff cluster move for the label transposition drawn from
// the seed cell's type. Returns the number of lattice sites flipped into or
// out of the transposition (cluster size, ghost excluded).
int wolff_step(LandUseGrid& grid, const SuitabilityField& field,
               const PrioritySet& priorities, Rng& rng,
               Boundary boundary = Boundary::open,
               double* o1 = nullptr, double* o2 = nullptr);

// Markov chain with incremental energy bookkeeping.
class Chain {
public:
    Chain(LandUseGrid grid, const SuitabilityField& field, PrioritySet weights,
          Boundary boundary, Rng rng);

    // One MC sweep at temperature t under the given kernel.
    void sweep(double t, SamplerKind kind, bool wolff_interleave = true);

    const LandUseGrid& grid() const { return grid_; }
    EnergyBreakdown energy() const;   // from incremental tallies
    Rng& rng() { return rng_; }

    static LandUseGrid random_grid(int rows, int cols, int types, Rng& rng);

private:
    LandUseGrid grid_;
    const SuitabilityField& field_;
    PrioritySet weights_;
    Boundary boundary_;
    Rng rng_;
    double o1_ = 0.0, o2_ = 0.0;
};

// Full anneal for one seed; deterministic given (master_seed, seed, config).
std::vector<SampleRecord> run_anneal(const SuitabilityField& field, const PrioritySet& priorities,
                                     const AnnealSchedule& schedule, std::uint64_t seed,
                                     const SamplerOptions& options);

// Independent replicates, one per seed, fanned out over `parallelism`
// workers. Output is keyed by seed and independent of scheduling.
ReplicateSet run_replicates(const SuitabilityField& field, const PrioritySet& priorities,
                            const AnnealSchedule& schedule, const std::vector<std::uint64_t>& seeds,
                            const SamplerOptions& options, int parallelism = 1);

}  // namespace mola
