#include "cgmcts/weighting.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "cgmcts/errors.hpp"

namespace cgmcts {

ObservationBuffer::ObservationBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw ContractViolation("observation window must hold at least one entry");
}

void ObservationBuffer::push(const ConstraintVector& scores, double reward) {
    entries_.emplace_back(scores, reward);
    while (entries_.size() > capacity_) entries_.pop_front();
}

FamilyArray ObservationBuffer::correlations() const {
    FamilyArray corr = FamilyArray::Zero();
    if (entries_.size() < 2) return corr;
    std::vector<double> rewards;
    for (const auto& [_, r] : entries_) rewards.push_back(r);
    for (Family f : kAllFamilies) {
        std::vector<double> column;
        for (const auto& [c, _] : entries_) column.push_back(c[f]);
        corr(static_cast<int>(f)) = pearson_corr(column, rewards);
    }
    return corr;
}

double pearson_corr(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw InputError("pearson_corr: length mismatch");
    if (x.size() < 2) throw InputError("pearson_corr: need at least two samples");
    const auto n = static_cast<Eigen::Index>(x.size());
    Eigen::Map<const Eigen::ArrayXd> a(x.data(), n);
    Eigen::Map<const Eigen::ArrayXd> b(y.data(), n);
    const Eigen::ArrayXd da = a - a.mean();
    const Eigen::ArrayXd db = b - b.mean();
    const double saa = (da * da).sum();
    const double sbb = (db * db).sum();
    if (saa == 0.0 || sbb == 0.0) return 0.0;
    return std::clamp((da * db).sum() / std::sqrt(saa * sbb), -1.0, 1.0);
}

WeightVector reweight(const WeightVector& w, const FamilyArray& corr, const AdaptationConfig& cfg) {
    const FamilyArray scaled = w.values * (cfg.eta * corr).exp();
    WeightVector out;
    out.values = (1.0 - cfg.alpha) * scaled / scaled.sum() + cfg.alpha * WeightVector::uniform().values;
    return out;
}

WeightVector update_weights(const WeightVector& w, const ObservationBuffer& buffer, const AdaptationConfig& cfg,
                            int round_index) {
    if (round_index < cfg.warmup_rounds || buffer.size() < 2) return w;
    return reweight(w, buffer.correlations(), cfg);
}

}  // namespace cgmcts
