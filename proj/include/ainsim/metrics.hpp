#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ainsim/transceiver.hpp"

namespace ainsim {

enum class Field { complex_field, real_field };

struct LinkMetrics {
    Eigen::VectorXd per_stream_sinr;
    double sum_rate = 0.0;            // bits per channel use (per extension slot)
    double dof_slope = 0.0;
    double residual_interference_ratio = 0.0;
    std::vector<double> p_grid;
};

// Shannon-rate surrogate per channel use: sum of log2(1+sinr) over streams,
// halved for real signal dimensions, divided by the extension length.
double sum_rate(const Eigen::VectorXd& sinrs, int extension, Field field);

// Least-squares slope of rate against log2(P) (or half that for real
// channels). Needs >= 3 grid points spanning >= 20 dB.
double dof_slope(const std::vector<double>& rates, const std::vector<double>& powers_db,
                 Field field);

struct EndToEndReport {
    Eigen::MatrixXcd d1_desired;  // M x M, expected first-difference chain
    Eigen::MatrixXcd d2_desired;  // (M-1) x (M-1)
    double leakage = 0.0;
    bool matches_chain_template = false;
    double template_gap = 0.0;  // worst deviation from the chain pattern
};

EndToEndReport end_to_end_matrix(const AlignedPipeline& pipeline);

// Cross-user received power over desired received power, maximized over
// projected destination dimensions, with the pipeline's power allocation.
double residual_interference_ratio(const AlignedPipeline& pipeline);

// Deviation of a square map from the chain pattern (1 on the diagonal, -1 on
// the first subdiagonal, 0 elsewhere).
double chain_template_gap(const Eigen::MatrixXcd& desired);

}  // namespace ainsim
