#pragma once

#include "scml/dataio.hpp"
#include "scml/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace scml {

/// Class ids compacted to [0, num_classes).
struct LabelVector {
    std::vector<int> values;
    int num_classes = 0;

    /// Maps arbitrary integer labels onto 0..c-1 in ascending order of the raw value.
    static LabelVector from_raw(const std::vector<int>& raw);
    Index size() const noexcept { return values.size(); }
};

struct MetricReport {
    std::string name;
    double value = 0.0;
    std::vector<std::pair<std::string, std::string>> params;

    /// `name,value,key=value;key=value`
    std::string to_csv() const;
};

/// Sum over classes of the squared shift between the class centroid of all points and of
/// the sampled points. Throws EmptyClassAfterSampling when a class has no sampled member.
double odoc(const Matrix& points, const LabelVector& labels, const IndexList& sampled);
double odoc(const Dataset& full, const IndexList& sampled);

inline constexpr std::uint64_t cc_exhaustive_pair_limit = 20'000'000;
inline constexpr std::uint64_t cc_sampled_pairs = 1'000'000;

struct CongruenceResult {
    double value = 0.0;
    std::uint64_t pairs = 0;
    bool sampled = false;
};

/// Cosine similarity between corresponding pairwise distances. All pairs are used when
/// their number fits the budget; otherwise `pair_budget` (default 10^6 above 2*10^7 pairs)
/// uniformly drawn pairs are used.
CongruenceResult congruence(const Matrix& high, const Matrix& low, std::optional<std::uint64_t> pair_budget = std::nullopt,
                            std::uint64_t seed = 0);
double congruence_coefficient(const Matrix& high, const Matrix& low,
                              std::optional<std::uint64_t> pair_budget = std::nullopt, std::uint64_t seed = 0);

/// Maximum-weight perfect matching on a square weight matrix; returns the column assigned to each row.
std::vector<int> max_weight_assignment(const std::vector<std::vector<double>>& weight);

/// Fraction of points whose predicted class maps to the true class under the best one-to-one mapping.
double hungarian_acc(const LabelVector& truth, const LabelVector& predicted);

/// Mean accuracy of a k-NN majority-vote classifier over `repeats` random 25%/75% train/test splits.
double knn_classifier_acc(const Matrix& coords, const LabelVector& labels, Index k = 5, Index repeats = 5,
                          std::uint64_t seed = 0);

struct KMeansResult {
    std::vector<int> assignments;
    Matrix centers;
    std::vector<double> sse_history;  // SSE after each assignment step
    Index iterations = 0;
};

/// Lloyd's algorithm with k-means++ seeding; stops early when assignments stop changing.
KMeansResult kmeans(const Matrix& coords, Index clusters, Index max_iterations = 200, std::uint64_t seed = 0);

double kmeans_cluster_acc(const Matrix& coords, const LabelVector& labels, Index iterations = 200,
                          std::uint64_t seed = 0);

}  // namespace scml
