#include "ainsim/relay.hpp"

#include <cmath>
#include <limits>

#include "ainsim/beamforming.hpp"

namespace ainsim {

Isolator::Isolator(const std::vector<Eigen::VectorXcd>& effective_columns) {
    if (effective_columns.empty()) throw parameter_error("no effective columns given");
    const auto dim = effective_columns.front().size();
    Eigen::MatrixXcd stacked(dim, static_cast<Eigen::Index>(effective_columns.size()));
    for (std::size_t k = 0; k < effective_columns.size(); ++k) {
        stacked.col(static_cast<Eigen::Index>(k)) = effective_columns[k];
    }
    if (stacked.rows() != stacked.cols()) {
        throw parameter_error("effective matrix must be square");
    }

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(stacked);
    const double smin = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    condition_number_ = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
    if (!(condition_number_ < kConditionCap)) {
        throw conditioning_error("effective receive matrix is too ill-conditioned to isolate",
                                 condition_number_);
    }

    inverse_ = stacked.fullPivLu().inverse();
    noise_gains_.resize(inverse_.rows());
    for (Eigen::Index r = 0; r < inverse_.rows(); ++r) {
        noise_gains_[r] = inverse_.row(r).norm();
    }
}

Eigen::VectorXcd Isolator::isolate(const Eigen::VectorXcd& received) const {
    if (received.size() != inverse_.cols()) {
        throw parameter_error("received vector length does not match the effective matrix");
    }
    return inverse_ * received;
}

std::pair<Eigen::VectorXcd, Eigen::VectorXd> isolate(
    const Eigen::VectorXcd& received, const std::vector<Eigen::VectorXcd>& effective_columns) {
    Isolator iso(effective_columns);
    return {iso.isolate(received), iso.noise_gains()};
}

double forward_power_scale(const std::vector<Eigen::VectorXcd>& relay_vectors, double power,
                           const Eigen::VectorXd& stream_second_moments) {
    if (static_cast<Eigen::Index>(relay_vectors.size()) != stream_second_moments.size()) {
        throw parameter_error("one second moment per forwarded stream required");
    }
    if (relay_vectors.empty()) return 0.0;
    const double slots = static_cast<double>(relay_vectors.front().size());
    double per_slot = 0.0;
    for (std::size_t k = 0; k < relay_vectors.size(); ++k) {
        per_slot += relay_vectors[k].squaredNorm() *
                    stream_second_moments[static_cast<Eigen::Index>(k)];
    }
    per_slot /= slots;
    if (!(per_slot > 0.0)) {
        throw degenerate_input_error("total forwarded signal power is zero");
    }
    return std::sqrt(power / per_slot);
}

ForwardResult forward_linear(const Eigen::VectorXcd& isolated,
                             const std::vector<Eigen::VectorXcd>& relay_vectors, double power,
                             const Eigen::VectorXd& stream_second_moments,
                             std::optional<double> scale_override) {
    if (static_cast<Eigen::Index>(relay_vectors.size()) != isolated.size()) {
        throw parameter_error("one relay vector per isolated stream required");
    }
    ForwardResult result;
    result.power_scale =
        scale_override ? *scale_override
                       : forward_power_scale(relay_vectors, power, stream_second_moments);
    if (relay_vectors.empty()) {
        result.forwarded = Eigen::VectorXcd();
        return result;
    }
    Eigen::VectorXcd sum = Eigen::VectorXcd::Zero(relay_vectors.front().size());
    for (std::size_t k = 0; k < relay_vectors.size(); ++k) {
        sum += relay_vectors[k] * isolated[static_cast<Eigen::Index>(k)];
    }
    result.forwarded = result.power_scale * sum;
    return result;
}

RelayReport relay_process(const Eigen::VectorXcd& received,
                          const std::vector<Eigen::VectorXcd>& effective_columns,
                          const std::vector<Eigen::VectorXcd>& relay_vectors, double power,
                          const Eigen::VectorXd& stream_second_moments,
                          std::optional<double> scale_override) {
    Isolator isolator(effective_columns);
    RelayReport report;
    report.isolated = isolator.isolate(received);
    report.noise_gain = isolator.noise_gains();
    const auto forwarded_streams = static_cast<Eigen::Index>(relay_vectors.size());
    auto result = forward_linear(report.isolated.head(forwarded_streams), relay_vectors, power,
                                 stream_second_moments, scale_override);
    report.forwarded = std::move(result.forwarded);
    report.power_scale = result.power_scale;
    return report;
}

namespace {

// Number of tuples enumerated over all coordinates except the last, whose
// optimum is closed-form. Throws past the search budget.
long enumeration_work(std::size_t dims, long symbol_bound, const char* what) {
    const double box = 2.0 * static_cast<double>(symbol_bound) + 1.0;
    double work = 1.0;
    for (std::size_t k = 0; k + 1 < dims; ++k) work *= box;
    if (work > static_cast<double>(kEnumerationCap)) {
        throw capacity_error(std::string(what) + " enumeration exceeds the search cap");
    }
    return static_cast<long>(work);
}

// Decodes tuple index `idx` (mixed radix, box = 2*bound+1 per coordinate)
// into the first dims-1 coordinates.
void decode_tuple(long idx, long bound, std::vector<long>& coords) {
    const long box = 2 * bound + 1;
    for (std::size_t k = 0; k + 1 < coords.size(); ++k) {
        coords[k] = idx % box - bound;
        idx /= box;
    }
}

}  // namespace

std::vector<long> hard_decide(double received, const std::vector<double>& directions,
                              long symbol_bound) {
    if (directions.empty()) throw parameter_error("no directions to decide over");
    if (symbol_bound < 0) throw parameter_error("symbol bound must be nonnegative");
    const std::size_t dims = directions.size();
    const long work = enumeration_work(dims, symbol_bound, "hard-decision");
    const double last_dir = directions.back();
    if (last_dir == 0.0) throw degenerate_input_error("zero decision direction");

    std::vector<long> candidate(dims, 0);
    std::vector<long> best;
    double best_distance = std::numeric_limits<double>::infinity();

    for (long idx = 0; idx < work; ++idx) {
        decode_tuple(idx, symbol_bound, candidate);
        double partial = received;
        for (std::size_t k = 0; k + 1 < dims; ++k) {
            partial -= directions[k] * static_cast<double>(candidate[k]);
        }
        long last = std::lround(partial / last_dir);
        last = std::max(-symbol_bound, std::min(symbol_bound, last));
        candidate.back() = last;
        const double distance = std::abs(partial - last_dir * static_cast<double>(last));
        if (distance < best_distance || (distance == best_distance && candidate < best)) {
            best_distance = distance;
            best = candidate;
        }
    }
    return best;
}

double min_nonzero_combination(const std::vector<double>& directions, long bound) {
    if (directions.empty()) throw parameter_error("no directions given");
    if (bound < 1) throw parameter_error("bound must be at least 1");
    const std::size_t dims = directions.size();
    const long work = enumeration_work(dims, bound, "minimum-distance");
    const double last_dir = directions.back();
    if (last_dir == 0.0) throw degenerate_input_error("zero direction");

    double best = std::numeric_limits<double>::infinity();
    std::vector<long> candidate(dims, 0);
    for (long idx = 0; idx < work; ++idx) {
        decode_tuple(idx, bound, candidate);
        double partial = 0.0;
        bool lead_zero = true;
        for (std::size_t k = 0; k + 1 < dims; ++k) {
            partial += directions[k] * static_cast<double>(candidate[k]);
            lead_zero = lead_zero && candidate[k] == 0;
        }
        const long rounded = std::lround(-partial / last_dir);
        for (long shift : {0L, -1L, 1L}) {
            const long n = std::max(-bound, std::min(bound, rounded + shift));
            if (lead_zero && n == 0) continue;
            best = std::min(best, std::abs(partial + last_dir * static_cast<double>(n)));
        }
    }
    return best;
}

}  // namespace ainsim
