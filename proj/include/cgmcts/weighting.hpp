#pragma once

#include <cstddef>
#include <deque>
#include <span>
#include <utility>

#include "cgmcts/constraints.hpp"

namespace cgmcts {

struct AdaptationConfig {
    double eta = 0.1;
    double alpha = 0.01;
    int warmup_rounds = 5;
};

/// Sliding window of (post-simulation scores, validation reward) pairs; oldest evicted first.
class ObservationBuffer {
public:
    explicit ObservationBuffer(std::size_t capacity = 10);

    void push(const ConstraintVector& scores, double reward);

    [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
    [[nodiscard]] std::size_t capacity() const noexcept { return capacity_; }
    [[nodiscard]] const std::deque<std::pair<ConstraintVector, double>>& entries() const noexcept { return entries_; }

    /// Pearson correlation of each family's score column with the rewards.
    [[nodiscard]] FamilyArray correlations() const;

private:
    std::size_t capacity_;
    std::deque<std::pair<ConstraintVector, double>> entries_;
};

/// Pearson coefficient; 0 when either side has zero variance.
/// Throws InputError on length mismatch or fewer than two samples.
double pearson_corr(std::span<const double> x, std::span<const double> y);

/// (1 - alpha) * normalised(w_i exp(eta corr_i)) + alpha * w_i^(0), with w^(0) uniform.
WeightVector reweight(const WeightVector& w, const FamilyArray& corr, const AdaptationConfig& cfg);

/// Round-level update. Returns `w` untouched during warm-up (round_index < warmup_rounds)
/// or while the buffer holds fewer than two observations.
WeightVector update_weights(const WeightVector& w, const ObservationBuffer& buffer, const AdaptationConfig& cfg,
                            int round_index);

}  // namespace cgmcts
