#include "ainsim/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <sstream>
#include <thread>

namespace ainsim {

int resolve_jobs(int jobs) {
    if (jobs > 0) return jobs;
    if (const char* env = std::getenv("AIN_SIM_JOBS")) {
        const int parsed = std::atoi(env);
        if (parsed > 0) return parsed;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_for(long count, int jobs, const std::function<void(long)>& body) {
    const int workers = std::min<long>(resolve_jobs(jobs), count);
    if (workers <= 1) {
        for (long i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<long> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                const long i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& thread : pool) thread.join();
    if (first_error) std::rethrow_exception(first_error);
}

std::uint64_t fnv1a_hash(const std::string& text) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char byte : text) {
        hash ^= byte;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::string DofExperimentConfig::canonical() const {
    std::ostringstream out;
    out << "scheme=" << scheme << ";m=" << extension << ";seeds=" << seed_count
        << ";base=" << base_seed << ";grid=";
    for (double p : p_grid_db) out << p << ",";
    out << ";symbols=" << symbols << ";noise=" << noise_var << ";bounds=" << bounds.min_mag << ","
        << bounds.max_mag << ";model=" << to_string(model);
    return out.str();
}

namespace {

double db_to_power(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace

DofExperimentResult run_dof_experiment(const DofExperimentConfig& config) {
    if (config.scheme != "aligned" && config.scheme != "tdma") {
        throw config_error("unknown scheme: " + config.scheme);
    }
    if (config.seed_count < 1) throw config_error("need at least one seed");
    const int m = config.extension;
    const auto grid = config.p_grid_db;
    const std::size_t points = grid.size();
    const int seeds = config.seed_count;

    DofExperimentResult result;
    result.p_grid_db = grid;
    result.avg_rates.assign(points, 0.0);
    const int streams1 = config.scheme == "tdma" ? 1 : m;
    const int streams2 = config.scheme == "tdma" ? 1 : std::max(0, m - 1);
    result.sinr1_avg = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(points), streams1);
    result.sinr2_avg = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(points), streams2);

    struct SeedOutcome {
        std::vector<double> rates;
        Eigen::MatrixXd sinr1, sinr2;
        double leakage = 0.0;
        double residual = 0.0;
    };
    std::vector<SeedOutcome> outcomes(static_cast<std::size_t>(seeds));

    parallel_for(seeds, config.jobs, [&](long index) {
        const std::uint64_t channel_seed =
            derive_stream_seed(config.base_seed, static_cast<std::uint64_t>(index));
        const auto channel = sample_channel(channel_seed, 2, m, config.model, config.bounds);
        SeedOutcome outcome;
        outcome.rates.assign(points, 0.0);
        outcome.sinr1 = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(points), streams1);
        outcome.sinr2 = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(points), streams2);

        if (config.scheme == "tdma") {
            for (std::size_t p = 0; p < points; ++p) {
                const auto rates = tdma_baseline(channel, db_to_power(grid[p]), config.noise_var);
                outcome.rates[p] = rates.sum_rate;
                outcome.sinr1(static_cast<Eigen::Index>(p), 0) = rates.sinr1;
                outcome.sinr2(static_cast<Eigen::Index>(p), 0) = rates.sinr2;
            }
        } else {
            for (std::size_t p = 0; p < points; ++p) {
                AlignedPipeline pipeline =
                    AlignedPipeline::from_channel(channel, db_to_power(grid[p]), config.noise_var);
                const auto link = pipeline.measure(
                    config.symbols, derive_stream_seed(channel_seed, 1000 + p));
                Eigen::VectorXd sinrs(link.sinr1.size() + link.sinr2.size());
                sinrs << link.sinr1, link.sinr2;
                outcome.rates[p] = sum_rate(sinrs, m, Field::complex_field);
                outcome.sinr1.row(static_cast<Eigen::Index>(p)) = link.sinr1.transpose();
                if (streams2 > 0) {
                    outcome.sinr2.row(static_cast<Eigen::Index>(p)) = link.sinr2.transpose();
                }
                if (p == 0) {
                    outcome.leakage = pipeline.probe().leakage;
                    outcome.residual = residual_interference_ratio(pipeline);
                }
            }
        }
        outcomes[static_cast<std::size_t>(index)] = std::move(outcome);
    });

    for (const auto& outcome : outcomes) {
        for (std::size_t p = 0; p < points; ++p) result.avg_rates[p] += outcome.rates[p];
        result.sinr1_avg += outcome.sinr1;
        result.sinr2_avg += outcome.sinr2;
        result.max_leakage = std::max(result.max_leakage, outcome.leakage);
        result.max_residual_ratio = std::max(result.max_residual_ratio, outcome.residual);
    }
    for (std::size_t p = 0; p < points; ++p) result.avg_rates[p] /= seeds;
    result.sinr1_avg /= seeds;
    result.sinr2_avg /= seeds;
    result.dof_slope = dof_slope(result.avg_rates, grid, Field::complex_field);
    return result;
}

RotationExperimentResult run_rotation_experiment(const Eigen::Matrix2cd& first_hop,
                                                 const Eigen::Matrix2cd& second_hop,
                                                 const std::vector<double>& p_grid_db,
                                                 long symbols, std::uint64_t seed) {
    RotationExperimentResult result;
    result.phases = phase_condition(first_hop, second_hop);
    if (!result.phases.first_hop_ok || !result.phases.second_hop_ok) {
        return result;  // degenerate phases: the embedding would be singular
    }
    const auto matrices = TwoHopMatrices::from_real_rotation(first_hop, second_hop);
    result.rates.reserve(p_grid_db.size());
    for (std::size_t p = 0; p < p_grid_db.size(); ++p) {
        AlignedPipeline pipeline(matrices, db_to_power(p_grid_db[p]), 1.0);
        const auto link = pipeline.measure(symbols, derive_stream_seed(seed, p));
        Eigen::VectorXd sinrs(link.sinr1.size() + link.sinr2.size());
        sinrs << link.sinr1, link.sinr2;
        // Three real streams per complex use; rate in bits per complex use.
        result.rates.push_back(sum_rate(sinrs, 1, Field::real_field));
    }
    result.dof_slope = dof_slope(result.rates, p_grid_db, Field::complex_field);
    result.pipeline_ran = true;
    return result;
}

TwoHopGapStats two_hop_gap_stats(int seeds, std::uint64_t base_seed, MagnitudeBounds bounds,
                                 int jobs) {
    TwoHopGapStats stats;
    stats.seeds = seeds;
    std::vector<double> gaps(static_cast<std::size_t>(seeds));
    parallel_for(seeds, jobs, [&](long index) {
        const auto channel =
            sample_channel(derive_stream_seed(base_seed, static_cast<std::uint64_t>(index)), 2, 1,
                           ChannelModel::constant_complex, bounds);
        gaps[static_cast<std::size_t>(index)] = two_hop_infeasibility(channel);
    });
    stats.min_gap = *std::min_element(gaps.begin(), gaps.end());
    stats.mean_gap = 0.0;
    for (double gap : gaps) stats.mean_gap += gap;
    stats.mean_gap /= seeds;
    return stats;
}

GainSolveStats gain_solve_stats(int hops, int seeds, std::uint64_t base_seed,
                                MagnitudeBounds bounds, int jobs, double tol) {
    GainSolveStats stats;
    stats.seeds = seeds;
    stats.reports.resize(static_cast<std::size_t>(seeds));
    parallel_for(seeds, jobs, [&](long index) {
        const std::uint64_t seed = derive_stream_seed(base_seed, static_cast<std::uint64_t>(index));
        const auto channel =
            sample_channel(seed, hops, 1, ChannelModel::constant_complex, bounds);
        stats.reports[static_cast<std::size_t>(index)] =
            solve_gains(channel, GainAssignment::unit(hops - 1), 50, tol, seed ^ 0xabcdef);
    });
    for (const auto& report : stats.reports) {
        stats.converged += report.converged ? 1 : 0;
        stats.worst_residual = std::max(stats.worst_residual, report.residual);
        stats.mean_iterations += report.iterations;
    }
    stats.mean_iterations /= std::max(1, seeds);
    return stats;
}

ReducedRunResult run_reduced_experiment(int hops, int extension, std::uint64_t seed,
                                        MagnitudeBounds bounds,
                                        const std::vector<double>& p_grid_db, long symbols,
                                        double noise_var) {
    const auto channel =
        sample_channel(seed, hops, extension, ChannelModel::time_varying, bounds);
    // Generic unit-magnitude gains for the folded layers.
    Xoshiro256pp rng(derive_stream_seed(seed, 77));
    std::vector<std::array<cplx, 2>> folded(static_cast<std::size_t>(hops - 2));
    for (auto& layer : folded) {
        layer[0] = std::polar(1.0, rng.uniform(0.0, 6.283185307179586));
        layer[1] = std::polar(1.0, rng.uniform(0.0, 6.283185307179586));
    }
    const auto reduced = reduce_to_two_hops(channel, folded);

    auto matrices = TwoHopMatrices::from_channel(reduced.two_hop);
    matrices.extra_noise_d1 = reduced.extra_noise_d1;
    matrices.extra_noise_d2 = reduced.extra_noise_d2;

    ReducedRunResult result;
    result.rates.reserve(p_grid_db.size());
    for (std::size_t p = 0; p < p_grid_db.size(); ++p) {
        AlignedPipeline pipeline(matrices, db_to_power(p_grid_db[p]), noise_var);
        if (p == 0) {
            result.leakage = pipeline.probe().leakage;
            result.residual_ratio = residual_interference_ratio(pipeline);
        }
        const auto link = pipeline.measure(symbols, derive_stream_seed(seed, 2000 + p));
        Eigen::VectorXd sinrs(link.sinr1.size() + link.sinr2.size());
        sinrs << link.sinr1, link.sinr2;
        result.rates.push_back(sum_rate(sinrs, extension, Field::complex_field));
    }
    result.dof_slope = dof_slope(result.rates, p_grid_db, Field::complex_field);
    return result;
}

}  // namespace ainsim
