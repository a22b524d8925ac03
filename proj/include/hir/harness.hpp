#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "hir/engine.hpp"
#include "hir/features.hpp"
#include "hir/invariant.hpp"
#include "hir/network.hpp"
#include "hir/transforms.hpp"

namespace hir {

// ---- test images ---------------------------------------------------------

/// Smooth blob mixture under a soft circular window, values roughly in [-1, 2].
/// Content stays inside radius 0.45 * size around the centre.
Grid<double> natural_image(std::size_t size, std::uint64_t seed);

/// I.i.d. uniform [0, 1) pixels.
Grid<double> random_image(std::size_t rows, std::size_t cols, std::uint64_t seed);

// ---- deviation reports ---------------------------------------------------

struct NodeDeviation {
    int node_id = 0;
    int level = 0;
    double scale = 0.0;        // network scale the node ran at (untransformed side)
    std::size_t margin = 0;    // interior margin in pixels of the compared maps
    double linf = 0.0;         // max |a - b| / max |b| over the interior
    double l2 = 0.0;           // ||a - b|| / ||b|| over the interior
};

struct DeviationReport {
    std::string transform;
    std::vector<NodeDeviation> nodes;  // empty for invariance reports
    /// Unit nodes pooled: sqrt(sum |a - b|^2 / sum |b|^2) over all interiors.
    double aggregate_l2 = 0.0;
    /// Invariant vectors (invariance reports only).
    double final_linf = 0.0;
    double final_l2 = 0.0;

    double max_node_linf() const;
    double max_node_l2() const;
    nlohmann::ordered_json to_json() const;
};

/// Compares forward(t(image)) against t(forward(image)) node by node on the
/// interior: ceil(w) * level pixels from every edge, plus the shift for
/// translations. Arbitrary rotations compare the inscribed disc of that
/// interior. ScaleDyadic(s) runs the transformed image through the same
/// topology at scales w * s and uses ceil(w * s) * level.
DeviationReport equivariance_report(const Grid<double>& image, const NetworkSpec& net, const TransformSpec& t,
                                    const EngineConfig& engine);

/// Node-by-node comparison of `direct` = forward(t(image)) against t(`base`),
/// as in equivariance_report.
DeviationReport compare_banks(const ActivationBank& direct, const ActivationBank& base, const NetworkSpec& net,
                              const TransformSpec& t);

/// Relative deviations of `moved` against `reference`, stored as final_*.
DeviationReport compare_vectors(const InvariantVector& moved, const InvariantVector& reference,
                                const TransformSpec& t);

/// Relative deviation between extract(t(image)) and extract(image).
DeviationReport invariance_report(const Grid<double>& image, const NetworkSpec& net, const BandConfig& bands,
                                  const TransformSpec& t, const EngineConfig& engine,
                                  ScaleReducer reducer = ScaleReducer::Max);

/// Same topology at every scale multiplied by s.
NetworkSpec rescaled(const NetworkSpec& net, double s);

// ---- classification ------------------------------------------------------

enum class ClassifierKind { NearestCentroid, RidgeLinear };

std::string to_string(ClassifierKind kind);
ClassifierKind classifier_kind_from_string(const std::string& name);

struct Classifier {
    ClassifierKind kind = ClassifierKind::NearestCentroid;
    std::vector<int> classes;       // ascending
    std::vector<double> mean;       // training-split column means
    std::vector<double> stddev;     // training-split column deviations, 1 for constant columns
    Grid<double> centroids;         // classes x features (NearestCentroid)
    Grid<double> weights;           // features x classes (RidgeLinear)
    std::vector<double> bias;       // per class (RidgeLinear)
    double ridge_lambda = 1.0;
};

/// Standardises on `train`, then fits. Ridge is one-vs-rest on +-1 targets.
Classifier fit(ClassifierKind kind, const FeatureMatrix& train, double ridge_lambda = 1.0);

/// One class id per row. Ties go to the lowest class id.
std::vector<int> predict(const Classifier& clf, const Grid<double>& features);

struct Metrics {
    double precision = 0.0;  // macro, percent
    double recall = 0.0;
    double f1 = 0.0;
    double accuracy = 0.0;

    nlohmann::ordered_json to_json() const;
};

/// Macro averages over the union of true and predicted classes; 0 where a
/// denominator is empty.
Metrics metrics(const std::vector<int>& predictions, const std::vector<int>& labels);

struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

/// Per class, a seeded shuffle puts round(ratio * count) samples in train,
/// keeping at least one on each side when the class has two or more.
Split stratified_split(const std::vector<int>& labels, double train_ratio, std::uint64_t seed);

}  // namespace hir
