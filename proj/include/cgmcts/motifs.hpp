#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "cgmcts/state.hpp"

namespace cgmcts {

enum class MotifOrigin { baseline_template, clustered };

/// One unit-length operator-histogram direction.
struct Motif {
    std::string category;
    Eigen::VectorXd vector;
    MotifOrigin origin = MotifOrigin::baseline_template;
};

struct MotifParams {
    int refinement_period = 3;
    int cluster_count = 20;        ///< k per category
    double min_separation = 0.3;   ///< cosine distance
    std::size_t max_per_category = 30;
    int kmeans_iterations = 50;
};

/// Pattern library v_P. Values are immutable snapshots: refinement returns a new library.
class MotifLibrary {
public:
    MotifLibrary() = default;
    MotifLibrary(std::vector<std::string> registry, std::vector<std::string> categories, MotifParams params);

    [[nodiscard]] const std::vector<std::string>& registry() const noexcept { return registry_; }
    [[nodiscard]] const std::vector<std::string>& categories() const noexcept { return categories_; }
    [[nodiscard]] const std::vector<Motif>& motifs() const noexcept { return motifs_; }
    [[nodiscard]] const MotifParams& params() const noexcept { return params_; }
    [[nodiscard]] bool frozen() const noexcept { return frozen_; }
    [[nodiscard]] std::size_t dimension() const noexcept { return registry_.size(); }

    [[nodiscard]] std::vector<const Motif*> in_category(const std::string& category) const;
    [[nodiscard]] std::size_t count(const std::string& category) const;

    /// Normalises `vector` and stores it. Registers the category when new.
    void add(const std::string& category, const Eigen::VectorXd& vector, MotifOrigin origin);
    void remove_if(const std::string& category, const std::function<bool(const Motif&)>& pred);
    [[nodiscard]] MotifLibrary frozen_copy() const;

    friend bool operator==(const MotifLibrary& a, const MotifLibrary& b);

private:
    std::vector<std::string> registry_;
    std::vector<std::string> categories_;
    std::vector<Motif> motifs_;
    MotifParams params_;
    bool frozen_ = false;

    friend MotifLibrary library_from_json(const nlohmann::json&);
};

/// Cosine of the angle between a and b. Throws InputError on a zero vector or size mismatch.
double cosine_similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b);
inline double cosine_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return 1.0 - cosine_similarity(a, b);
}

/// Max cosine similarity between the raw histogram and the category's motifs;
/// 0.5 when the histogram is empty or the category has no motifs.
double score_pattern(const Eigen::VectorXd& histogram, const std::string& category, const MotifLibrary& lib);
double score_pattern(const WorkflowState& state, const OperatorRegistry& registry, const std::string& category,
                     const MotifLibrary& lib);

/// Seeded baseline templates: greedy selection from a shuffled pool of
/// sparse indicator directions, keeping pairwise cosine distance >= min_separation.
/// Throws InitError when `per_category` separated templates cannot be found.
MotifLibrary init_templates(const std::vector<std::string>& registry, const std::vector<std::string>& categories,
                            std::size_t per_category, std::uint64_t seed, MotifParams params = {});

struct KMeansResult {
    Eigen::MatrixXd centroids;          ///< one unit-length centroid per column
    std::vector<std::size_t> sizes;     ///< points per centroid
    std::vector<std::size_t> labels;    ///< centroid index per point
    int iterations = 0;
};

/// Spherical k-means over the columns of `points` (cosine distance).
/// Farthest-point initialisation from a seeded first pick; k is clipped to the number of
/// distinct directions. Empty clusters are dropped from the result.
KMeansResult spherical_kmeans(const Eigen::MatrixXd& points, std::size_t k, int max_iterations, std::uint64_t seed);

using ObservedHistogram = std::pair<std::string, Eigen::VectorXd>;

/// Clusters observed histograms per category and merges representative centroids.
///
/// Centroids are visited largest cluster first. A centroid closer than min_separation to a
/// clustered motif already in the library is discarded; otherwise it displaces every baseline
/// template within min_separation and is added, subject to the per-category cap.
/// Throws FrozenError on a frozen library.
MotifLibrary refine(const MotifLibrary& lib, const std::vector<ObservedHistogram>& observed, int round_index,
                    std::uint64_t seed);

// {version, registry, categories:[{name, motifs:[{vector, origin}]}], frozen, params}
nlohmann::json library_to_json(const MotifLibrary& lib);
MotifLibrary library_from_json(const nlohmann::json& doc);

}  // namespace cgmcts
