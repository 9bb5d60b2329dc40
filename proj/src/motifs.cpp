#include "cgmcts/motifs.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "cgmcts/constraints.hpp"
#include "cgmcts/errors.hpp"
#include "cgmcts/random.hpp"

namespace cgmcts {

using nlohmann::json;

MotifLibrary::MotifLibrary(std::vector<std::string> registry, std::vector<std::string> categories, MotifParams params)
    : registry_(std::move(registry)), categories_(std::move(categories)), params_(params) {}

std::vector<const Motif*> MotifLibrary::in_category(const std::string& category) const {
    std::vector<const Motif*> out;
    for (const auto& m : motifs_)
        if (m.category == category) out.push_back(&m);
    return out;
}

std::size_t MotifLibrary::count(const std::string& category) const {
    return static_cast<std::size_t>(
        std::count_if(motifs_.begin(), motifs_.end(), [&](const Motif& m) { return m.category == category; }));
}

void MotifLibrary::add(const std::string& category, const Eigen::VectorXd& vector, MotifOrigin origin) {
    if (static_cast<std::size_t>(vector.size()) != registry_.size())
        throw InputError("motif dimension does not match the registry");
    if ((vector.array() < 0.0).any() || !(vector.maxCoeff() > 0.0))
        throw InputError("motif vector must be non-negative with a positive entry");
    if (std::find(categories_.begin(), categories_.end(), category) == categories_.end())
        categories_.push_back(category);
    // Keep motifs grouped by category in category order.
    auto cat_rank = [&](const std::string& c) {
        return std::find(categories_.begin(), categories_.end(), c) - categories_.begin();
    };
    auto rank = cat_rank(category);
    auto pos = std::find_if(motifs_.begin(), motifs_.end(), [&](const Motif& m) { return cat_rank(m.category) > rank; });
    motifs_.insert(pos, Motif{category, vector.normalized(), origin});
}

void MotifLibrary::remove_if(const std::string& category, const std::function<bool(const Motif&)>& pred) {
    std::erase_if(motifs_, [&](const Motif& m) { return m.category == category && pred(m); });
}

MotifLibrary MotifLibrary::frozen_copy() const {
    MotifLibrary copy = *this;
    copy.frozen_ = true;
    return copy;
}

bool operator==(const MotifLibrary& a, const MotifLibrary& b) {
    if (a.registry_ != b.registry_ || a.categories_ != b.categories_ || a.frozen_ != b.frozen_ ||
        a.motifs_.size() != b.motifs_.size())
        return false;
    const auto& p = a.params_;
    const auto& q = b.params_;
    if (p.refinement_period != q.refinement_period || p.cluster_count != q.cluster_count ||
        p.min_separation != q.min_separation || p.max_per_category != q.max_per_category ||
        p.kmeans_iterations != q.kmeans_iterations)
        return false;
    for (std::size_t i = 0; i < a.motifs_.size(); ++i) {
        const auto& m = a.motifs_[i];
        const auto& n = b.motifs_[i];
        if (m.category != n.category || m.origin != n.origin || m.vector != n.vector) return false;
    }
    return true;
}

double cosine_similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    if (a.size() != b.size()) throw InputError("cosine similarity of vectors with different sizes");
    const double na = a.norm();
    const double nb = b.norm();
    if (na == 0.0 || nb == 0.0) throw InputError("cosine similarity of a zero vector");
    return std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
}

double score_pattern(const Eigen::VectorXd& histogram, const std::string& category, const MotifLibrary& lib) {
    if (histogram.size() == 0 || histogram.norm() == 0.0) return kNeutralScore;
    auto motifs = lib.in_category(category);
    if (motifs.empty()) return kNeutralScore;
    double best = 0.0;
    for (const auto* m : motifs) best = std::max(best, cosine_similarity(histogram, m->vector));
    return std::clamp(best, 0.0, 1.0);
}

double score_pattern(const WorkflowState& state, const OperatorRegistry& registry, const std::string& category,
                     const MotifLibrary& lib) {
    return score_pattern(state.histogram_vector(registry), category, lib);
}

namespace {

bool separated_from_all(const Eigen::VectorXd& v, const std::vector<Eigen::VectorXd>& kept, double min_sep) {
    return std::all_of(kept.begin(), kept.end(),
                       [&](const Eigen::VectorXd& k) { return cosine_distance(v, k) >= min_sep; });
}

}  // namespace

MotifLibrary init_templates(const std::vector<std::string>& registry, const std::vector<std::string>& categories,
                            std::size_t per_category, std::uint64_t seed, MotifParams params) {
    const std::size_t d = registry.size();
    if (d == 0) throw InitError("cannot build motif templates over an empty registry");
    // Pool: indicator directions over 1..4 operators.
    std::vector<Eigen::VectorXd> pool;
    const std::size_t max_support = std::min<std::size_t>(4, d);
    for (std::uint64_t mask = 1; mask < (1ULL << std::min<std::size_t>(d, 20)); ++mask) {
        auto bits = static_cast<std::size_t>(std::popcount(mask));
        if (bits > max_support) continue;
        Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
        for (std::size_t i = 0; i < d; ++i)
            if (mask & (1ULL << i)) v(static_cast<Eigen::Index>(i)) = 1.0;
        pool.push_back(v.normalized());
    }

    MotifLibrary lib(registry, categories, params);
    for (std::size_t c = 0; c < categories.size(); ++c) {
        Rng rng(derive_seed(seed, c));
        auto order = pool;
        shuffle_in_place(order, rng);
        // narrow supports first; greedy then reaches full capacity regardless of the shuffle
        std::stable_sort(order.begin(), order.end(), [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
            return (a.array() > 0).count() < (b.array() > 0).count();
        });
        std::vector<Eigen::VectorXd> kept;
        for (const auto& v : order) {
            if (kept.size() == per_category) break;
            if (separated_from_all(v, kept, params.min_separation)) kept.push_back(v);
        }
        if (kept.size() < per_category)
            throw InitError("only " + std::to_string(kept.size()) + " templates separated by " +
                            std::to_string(params.min_separation) + " fit a registry of " + std::to_string(d) +
                            " operators (requested " + std::to_string(per_category) + ")");
        for (const auto& v : kept) lib.add(categories[c], v, MotifOrigin::baseline_template);
    }
    return lib;
}

KMeansResult spherical_kmeans(const Eigen::MatrixXd& raw, std::size_t k, int max_iterations, std::uint64_t seed) {
    KMeansResult result;
    const auto n = static_cast<std::size_t>(raw.cols());
    if (n == 0 || k == 0) return result;
    Eigen::MatrixXd points = raw.colwise().normalized();
    k = std::min(k, n);

    // Farthest-point initialisation.
    Rng rng(seed);
    std::vector<Eigen::Index> chosen{static_cast<Eigen::Index>(uniform_index(rng, n))};
    Eigen::VectorXd nearest = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), 2.0);
    while (chosen.size() < k) {
        const Eigen::VectorXd last = points.col(chosen.back());
        Eigen::VectorXd dist = (1.0 - (points.transpose() * last).array()).matrix();
        nearest = nearest.cwiseMin(dist);
        Eigen::Index far = 0;
        double far_dist = nearest.maxCoeff(&far);
        if (far_dist <= 1e-12) break;  // no distinct direction left
        chosen.push_back(far);
    }
    Eigen::MatrixXd centroids(points.rows(), static_cast<Eigen::Index>(chosen.size()));
    for (std::size_t j = 0; j < chosen.size(); ++j) centroids.col(static_cast<Eigen::Index>(j)) = points.col(chosen[j]);

    std::vector<std::size_t> labels(n, 0);
    std::vector<std::size_t> previous(n, static_cast<std::size_t>(-1));
    int it = 0;
    for (; it < max_iterations; ++it) {
        Eigen::MatrixXd sims = centroids.transpose() * points;  // k x n
        for (std::size_t i = 0; i < n; ++i) {
            Eigen::Index best = 0;
            sims.col(static_cast<Eigen::Index>(i)).maxCoeff(&best);
            labels[i] = static_cast<std::size_t>(best);
        }
        if (labels == previous) break;
        previous = labels;
        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(centroids.rows(), centroids.cols());
        for (std::size_t i = 0; i < n; ++i)
            sums.col(static_cast<Eigen::Index>(labels[i])) += points.col(static_cast<Eigen::Index>(i));
        for (Eigen::Index j = 0; j < centroids.cols(); ++j)
            if (sums.col(j).norm() > 0.0) centroids.col(j) = sums.col(j).normalized();
    }
    result.iterations = it;

    std::vector<std::size_t> sizes(static_cast<std::size_t>(centroids.cols()), 0);
    for (auto l : labels) ++sizes[l];
    std::vector<std::size_t> remap(sizes.size(), 0);
    std::vector<Eigen::Index> keep;
    for (std::size_t j = 0; j < sizes.size(); ++j) {
        if (sizes[j] == 0) continue;
        remap[j] = keep.size();
        keep.push_back(static_cast<Eigen::Index>(j));
    }
    result.centroids.resize(centroids.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j) {
        result.centroids.col(static_cast<Eigen::Index>(j)) = centroids.col(keep[j]);
        result.sizes.push_back(sizes[static_cast<std::size_t>(keep[j])]);
    }
    for (auto& l : labels) l = remap[l];
    result.labels = std::move(labels);
    return result;
}

MotifLibrary refine(const MotifLibrary& lib, const std::vector<ObservedHistogram>& observed, int round_index,
                    std::uint64_t seed) {
    if (lib.frozen()) throw FrozenError("motif library is frozen");
    MotifLibrary out = lib;
    const auto& params = lib.params();

    std::vector<std::string> order = lib.categories();
    for (const auto& [cat, _] : observed)
        if (std::find(order.begin(), order.end(), cat) == order.end()) order.push_back(cat);

    for (std::size_t c = 0; c < order.size(); ++c) {
        const std::string& category = order[c];
        std::vector<Eigen::VectorXd> samples;
        for (const auto& [cat, v] : observed)
            if (cat == category && v.size() == static_cast<Eigen::Index>(lib.dimension()) && v.norm() > 0.0)
                samples.push_back(v);
        if (samples.empty()) continue;

        Eigen::MatrixXd points(static_cast<Eigen::Index>(lib.dimension()), static_cast<Eigen::Index>(samples.size()));
        for (std::size_t i = 0; i < samples.size(); ++i) points.col(static_cast<Eigen::Index>(i)) = samples[i];
        auto km = spherical_kmeans(points, static_cast<std::size_t>(std::max(1, params.cluster_count)),
                                   params.kmeans_iterations,
                                   derive_seed(derive_seed(seed, static_cast<std::uint64_t>(round_index)), c));

        std::vector<std::size_t> visit(km.sizes.size());
        std::iota(visit.begin(), visit.end(), 0);
        std::stable_sort(visit.begin(), visit.end(), [&](auto a, auto b) { return km.sizes[a] > km.sizes[b]; });

        for (auto j : visit) {
            const Eigen::VectorXd centroid = km.centroids.col(static_cast<Eigen::Index>(j));
            bool collides = false;
            std::size_t displaced = 0;
            for (const auto* m : out.in_category(category)) {
                if (cosine_distance(centroid, m->vector) >= params.min_separation) continue;
                if (m->origin == MotifOrigin::clustered) collides = true;
                else ++displaced;
            }
            if (collides) continue;
            if (out.count(category) - displaced >= params.max_per_category) continue;
            out.remove_if(category, [&](const Motif& m) {
                return m.origin == MotifOrigin::baseline_template &&
                       cosine_distance(centroid, m.vector) < params.min_separation;
            });
            out.add(category, centroid, MotifOrigin::clustered);
        }
    }
    return out;
}

json library_to_json(const MotifLibrary& lib) {
    json categories = json::array();
    for (const auto& name : lib.categories()) {
        json motifs = json::array();
        for (const auto* m : lib.in_category(name)) {
            std::vector<double> v(m->vector.data(), m->vector.data() + m->vector.size());
            motifs.push_back({{"vector", v},
                              {"origin", m->origin == MotifOrigin::clustered ? "clustered" : "baseline_template"}});
        }
        categories.push_back({{"name", name}, {"motifs", std::move(motifs)}});
    }
    const auto& p = lib.params();
    return json{{"version", 1},
                {"registry", lib.registry()},
                {"categories", std::move(categories)},
                {"frozen", lib.frozen()},
                {"params",
                 {{"refinement_period", p.refinement_period},
                  {"cluster_count", p.cluster_count},
                  {"min_separation", p.min_separation},
                  {"max_per_category", p.max_per_category},
                  {"kmeans_iterations", p.kmeans_iterations}}}};
}

MotifLibrary library_from_json(const json& doc) {
    try {
        if (doc.at("version").get<int>() != 1) throw ParseError("unsupported motif library version");
        MotifParams params;
        if (doc.contains("params")) {
            const auto& p = doc.at("params");
            params.refinement_period = p.value("refinement_period", params.refinement_period);
            params.cluster_count = p.value("cluster_count", params.cluster_count);
            params.min_separation = p.value("min_separation", params.min_separation);
            params.max_per_category = p.value("max_per_category", params.max_per_category);
            params.kmeans_iterations = p.value("kmeans_iterations", params.kmeans_iterations);
        }
        std::vector<std::string> names;
        for (const auto& c : doc.at("categories")) names.push_back(c.at("name").get<std::string>());
        MotifLibrary lib(doc.at("registry").get<std::vector<std::string>>(), names, params);
        for (const auto& c : doc.at("categories")) {
            const auto name = c.at("name").get<std::string>();
            for (const auto& m : c.at("motifs")) {
                auto values = m.at("vector").get<std::vector<double>>();
                Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
                auto origin = m.at("origin").get<std::string>();
                if (origin != "clustered" && origin != "baseline_template")
                    throw ParseError("unknown motif origin '" + origin + "'");
                // Stored vectors are already unit length; insert verbatim to keep round trips exact.
                if (static_cast<std::size_t>(v.size()) != lib.dimension()) throw ParseError("motif dimension mismatch");
                lib.motifs_.push_back(
                    Motif{name, v, origin == "clustered" ? MotifOrigin::clustered : MotifOrigin::baseline_template});
            }
        }
        lib.frozen_ = doc.at("frozen").get<bool>();
        return lib;
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed motif library: ") + e.what());
    }
}

}  // namespace cgmcts
