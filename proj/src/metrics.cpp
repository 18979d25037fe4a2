#include "ainsim/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace ainsim {

double sum_rate(const Eigen::VectorXd& sinrs, int extension, Field field) {
    if (extension < 1) throw parameter_error("extension length must be >= 1");
    double total = 0.0;
    for (Eigen::Index k = 0; k < sinrs.size(); ++k) {
        if (sinrs[k] < 0.0) throw parameter_error("SINR must be nonnegative");
        total += std::log2(1.0 + sinrs[k]);
    }
    if (field == Field::real_field) total *= 0.5;
    return total / static_cast<double>(extension);
}

double dof_slope(const std::vector<double>& rates, const std::vector<double>& powers_db,
                 Field field) {
    if (rates.size() != powers_db.size()) {
        throw parameter_error("one rate per grid point required");
    }
    if (powers_db.size() < 3) throw parameter_error("DoF slope needs at least 3 grid points");
    const auto [lo, hi] = std::minmax_element(powers_db.begin(), powers_db.end());
    if (*hi - *lo < 20.0) throw parameter_error("DoF slope needs a span of at least 20 dB");

    // Regressor: log2(P), halved for real-valued channels.
    const double log2_10 = std::log2(10.0);
    std::vector<double> x(powers_db.size());
    for (std::size_t i = 0; i < powers_db.size(); ++i) {
        x[i] = powers_db[i] / 10.0 * log2_10;
        if (field == Field::real_field) x[i] *= 0.5;
    }
    const double n = static_cast<double>(x.size());
    double mean_x = 0.0, mean_y = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mean_x += x[i];
        mean_y += rates[i];
    }
    mean_x /= n;
    mean_y /= n;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        num += (x[i] - mean_x) * (rates[i] - mean_y);
        den += (x[i] - mean_x) * (x[i] - mean_x);
    }
    return num / den;
}

double chain_template_gap(const Eigen::MatrixXcd& desired) {
    double gap = 0.0;
    for (Eigen::Index r = 0; r < desired.rows(); ++r) {
        for (Eigen::Index c = 0; c < desired.cols(); ++c) {
            cplx expected = 0.0;
            if (r == c) expected = 1.0;
            if (r == c + 1) expected = -1.0;
            gap = std::max(gap, std::abs(desired(r, c) - expected));
        }
    }
    return gap;
}

EndToEndReport end_to_end_matrix(const AlignedPipeline& pipeline) {
    const EndToEndProbe probe = pipeline.probe();
    EndToEndReport report;
    report.d1_desired = probe.d1_desired;
    report.d2_desired = probe.d2_desired;
    report.leakage = probe.leakage;
    report.template_gap =
        std::max(chain_template_gap(probe.d1_desired), chain_template_gap(probe.d2_desired));
    report.matches_chain_template = report.template_gap < 1e-10;
    return report;
}

double residual_interference_ratio(const AlignedPipeline& pipeline) {
    const EndToEndProbe probe = pipeline.probe();
    const auto& scales = pipeline.scales();
    const int m = pipeline.extension();

    auto power_row = [](const Eigen::MatrixXcd& map, Eigen::Index row,
                        const Eigen::VectorXd& amps) {
        double power = 0.0;
        for (Eigen::Index j = 0; j < map.cols(); ++j) {
            power += std::norm(map(row, j)) * amps[j] * amps[j];
        }
        return power;
    };

    double worst = 0.0;
    for (Eigen::Index r = 0; r < m; ++r) {
        const double desired = power_row(probe.d1_desired, r, scales.source1_amplitudes);
        if (m > 1) {
            const double cross = power_row(probe.d1_cross, r, scales.source2_amplitudes);
            worst = std::max(worst, cross / desired);
        }
    }
    for (Eigen::Index r = 0; r + 1 < m; ++r) {
        const double desired = power_row(probe.d2_desired, r, scales.source2_amplitudes);
        const double cross = power_row(probe.d2_cross, r, scales.source1_amplitudes);
        worst = std::max(worst, cross / desired);
    }
    return worst;
}

}  // namespace ainsim
