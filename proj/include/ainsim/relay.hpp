#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "ainsim/errors.hpp"

namespace ainsim {

inline constexpr long kEnumerationCap = 100000;  // hard-decision search budget

// Inversion of the effective per-relay receive matrix, reusable across
// Monte-Carlo frames of one channel realization.
class Isolator {
  public:
    explicit Isolator(const std::vector<Eigen::VectorXcd>& effective_columns);

    Eigen::VectorXcd isolate(const Eigen::VectorXcd& received) const;
    const Eigen::VectorXd& noise_gains() const { return noise_gains_; }
    double condition_number() const { return condition_number_; }

  private:
    Eigen::MatrixXcd inverse_;
    Eigen::VectorXd noise_gains_;
    double condition_number_ = 0.0;
};

// One-shot form of the isolation step.
std::pair<Eigen::VectorXcd, Eigen::VectorXd> isolate(
    const Eigen::VectorXcd& received, const std::vector<Eigen::VectorXcd>& effective_columns);

struct ForwardResult {
    Eigen::VectorXcd forwarded;
    double power_scale = 0.0;
};

// Full record of one relay's processing: isolated per-dimension values
// (signal sums plus inverted noise), the forwarded block, and the scaling
// bookkeeping destinations need.
struct RelayReport {
    Eigen::VectorXcd isolated;
    Eigen::VectorXcd forwarded;
    Eigen::VectorXd noise_gain;
    double power_scale = 0.0;
};

RelayReport relay_process(const Eigen::VectorXcd& received,
                          const std::vector<Eigen::VectorXcd>& effective_columns,
                          const std::vector<Eigen::VectorXcd>& relay_vectors, double power,
                          const Eigen::VectorXd& stream_second_moments,
                          std::optional<double> scale_override = std::nullopt);

// Re-beamforms isolated values and scales so the expected per-slot transmit
// power (under the supplied per-stream second moments) equals `power`.
// `scale_override` substitutes an externally agreed scale, e.g. the common
// scale both relays of a neutralization pair must share.
ForwardResult forward_linear(const Eigen::VectorXcd& isolated,
                             const std::vector<Eigen::VectorXcd>& relay_vectors, double power,
                             const Eigen::VectorXd& stream_second_moments,
                             std::optional<double> scale_override = std::nullopt);

// The power scale forward_linear would apply, without forming the signal.
double forward_power_scale(const std::vector<Eigen::VectorXcd>& relay_vectors, double power,
                           const Eigen::VectorXd& stream_second_moments);

// Nearest-constellation-point decision for a scalar observation of
// sum_k directions[k] * n_k with every n_k an integer in [-bound, bound].
// Minimizes |received - sum| over the full box; ties break to the
// lexicographically smallest tuple. The enumeration work (box size over all
// but the last coordinate, whose optimum is closed-form) is capped.
std::vector<long> hard_decide(double received, const std::vector<double>& directions,
                              long symbol_bound);

// Smallest |sum_k directions[k] * n_k| over nonzero integer tuples with
// |n_k| <= bound: the constellation minimum distance at a receiver, up to
// the caller's amplitude factor.
double min_nonzero_combination(const std::vector<double>& directions, long bound);

}  // namespace ainsim
