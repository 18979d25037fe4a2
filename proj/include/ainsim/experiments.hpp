#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ainsim/metrics.hpp"
#include "ainsim/multihop.hpp"
#include "ainsim/rational.hpp"

namespace ainsim {

// Index-parallel loop; results must be written to per-index slots. 0 jobs
// resolves to AIN_SIM_JOBS or the hardware concurrency.
void parallel_for(long count, int jobs, const std::function<void(long)>& body);
int resolve_jobs(int jobs);

// FNV-1a over the canonical config string; stamped into CSV metadata lines.
std::uint64_t fnv1a_hash(const std::string& text);

struct DofExperimentConfig {
    std::string scheme = "aligned";  // "aligned" or "tdma"
    int extension = 2;
    int seed_count = 10;
    std::uint64_t base_seed = 1;
    std::vector<double> p_grid_db = {30.0, 40.0, 50.0, 60.0};
    long symbols = 100000;
    double noise_var = 1.0;
    MagnitudeBounds bounds{};
    ChannelModel model = ChannelModel::time_varying;
    int jobs = 0;

    std::string canonical() const;
};

struct DofExperimentResult {
    std::vector<double> p_grid_db;
    std::vector<double> avg_rates;  // bits per channel use, averaged over seeds
    double dof_slope = 0.0;
    double max_leakage = 0.0;
    double max_residual_ratio = 0.0;
    Eigen::MatrixXd sinr1_avg;  // p-grid rows x W1 streams
    Eigen::MatrixXd sinr2_avg;  // p-grid rows x W2 streams
};

DofExperimentResult run_dof_experiment(const DofExperimentConfig& config);

// Asymmetric-signaling run on one constant complex channel: checks the phase
// conditions, then measures the 2x2 rotation-embedded pipeline across the
// power grid. Throws singular_channel_error if the embedding is degenerate.
struct RotationExperimentResult {
    PhaseConditionReport phases;
    bool pipeline_ran = false;
    std::vector<double> rates;
    double dof_slope = 0.0;
};

RotationExperimentResult run_rotation_experiment(const Eigen::Matrix2cd& first_hop,
                                                 const Eigen::Matrix2cd& second_hop,
                                                 const std::vector<double>& p_grid_db,
                                                 long symbols, std::uint64_t seed);

struct TwoHopGapStats {
    int seeds = 0;
    double min_gap = 0.0;
    double mean_gap = 0.0;
};

TwoHopGapStats two_hop_gap_stats(int seeds, std::uint64_t base_seed, MagnitudeBounds bounds,
                                 int jobs = 0);

struct GainSolveStats {
    int seeds = 0;
    int converged = 0;
    double worst_residual = 0.0;
    double mean_iterations = 0.0;
    std::vector<GainSolveReport> reports;
};

GainSolveStats gain_solve_stats(int hops, int seeds, std::uint64_t base_seed,
                                MagnitudeBounds bounds, int jobs = 0,
                                double tol = kNewtonTol);

// Folds an H-hop network with generic unit-magnitude random gains and runs
// the aligned pipeline on the reduction.
struct ReducedRunResult {
    double residual_ratio = 0.0;
    double leakage = 0.0;
    std::vector<double> rates;
    double dof_slope = 0.0;
};

ReducedRunResult run_reduced_experiment(int hops, int extension, std::uint64_t seed,
                                        MagnitudeBounds bounds,
                                        const std::vector<double>& p_grid_db, long symbols,
                                        double noise_var);

}  // namespace ainsim
