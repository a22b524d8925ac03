#include "hir/harness.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <set>

#include <Eigen/Dense>

#include "hir/error.hpp"

namespace hir {

Grid<double> natural_image(std::size_t size, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Grid<double> g(size, size);
    const double n = static_cast<double>(size);
    const double c = (n - 1.0) / 2.0;

    for (int blob = 0; blob < 12; ++blob) {
        const double ci = c + (u(rng) - 0.5) * n * 0.6;
        const double cj = c + (u(rng) - 0.5) * n * 0.6;
        const double sigma = 2.0 + 4.0 * u(rng);
        const double amp = 2.0 * u(rng) - 0.5;
        for (std::size_t i = 0; i < size; ++i) {
            for (std::size_t j = 0; j < size; ++j) {
                const double di = static_cast<double>(i) - ci, dj = static_cast<double>(j) - cj;
                g(i, j) += amp * std::exp(-(di * di + dj * dj) / (2.0 * sigma * sigma));
            }
        }
    }
    // raised-cosine taper from 0.8 to 1.0 of the window radius
    const double radius = 0.45 * n;
    for (std::size_t i = 0; i < size; ++i) {
        for (std::size_t j = 0; j < size; ++j) {
            const double r = std::hypot(static_cast<double>(i) - c, static_cast<double>(j) - c) / radius;
            const double m = r < 0.8 ? 1.0 : r < 1.0 ? 0.5 + 0.5 * std::cos(std::numbers::pi * (r - 0.8) / 0.2) : 0.0;
            g(i, j) *= m;
        }
    }
    return g;
}

Grid<double> random_image(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Grid<double> g(rows, cols);
    for (double& v : g.values()) v = u(rng);
    return g;
}

// ---- deviation reports ---------------------------------------------------

double DeviationReport::max_node_linf() const {
    double m = 0.0;
    for (const auto& n : nodes) m = std::max(m, n.linf);
    return m;
}

double DeviationReport::max_node_l2() const {
    double m = 0.0;
    for (const auto& n : nodes) m = std::max(m, n.l2);
    return m;
}

nlohmann::ordered_json DeviationReport::to_json() const {
    nlohmann::ordered_json j;
    j["transform"] = transform;
    auto arr = nlohmann::ordered_json::array();
    for (const auto& n : nodes) {
        arr.push_back({{"node_id", n.node_id}, {"level", n.level}, {"scale", n.scale}, {"margin", n.margin},
                       {"linf", n.linf}, {"l2", n.l2}});
    }
    j["nodes"] = arr;
    j["aggregate_l2"] = aggregate_l2;
    j["final_linf"] = final_linf;
    j["final_l2"] = final_l2;
    return j;
}

NetworkSpec rescaled(const NetworkSpec& net, double s) {
    std::vector<double> scales = net.scales();
    for (double& w : scales) w *= s;
    return NetworkSpec(net.family(), net.max_level(), std::move(scales), net.fan_out_cap(), net.pruned_node_ids());
}

namespace {

struct Accum {
    double diff2 = 0.0, ref2 = 0.0, diff_max = 0.0, ref_max = 0.0;

    void add(cplx a, cplx b) {
        const double d = std::abs(a - b), r = std::abs(b);
        diff2 += d * d;
        ref2 += r * r;
        diff_max = std::max(diff_max, d);
        ref_max = std::max(ref_max, r);
    }
    static double ratio(double num, double den) { return den > 0.0 ? num / den : num; }
    double linf() const { return ratio(diff_max, ref_max); }
    double l2() const { return ratio(std::sqrt(diff2), std::sqrt(ref2)); }
};

Accum compare(const Grid<cplx>& a, const Grid<cplx>& b, std::size_t margin, bool disc) {
    if (!a.same_shape(b)) throw DomainError("compared maps differ in size");
    Accum acc;
    const std::size_t rows = a.rows(), cols = a.cols();
    if (2 * margin >= rows || 2 * margin >= cols) return acc;
    const double ci = (static_cast<double>(rows) - 1.0) / 2.0, cj = (static_cast<double>(cols) - 1.0) / 2.0;
    const double radius = std::min(ci, cj) - static_cast<double>(margin);
    for (std::size_t i = margin; i + margin < rows; ++i) {
        for (std::size_t j = margin; j + margin < cols; ++j) {
            if (disc && std::hypot(static_cast<double>(i) - ci, static_cast<double>(j) - cj) > radius) continue;
            acc.add(a(i, j), b(i, j));
        }
    }
    return acc;
}

std::size_t shift_of(const TransformSpec& t) {
    if (t.kind != TransformKind::Translate) return 0;
    return static_cast<std::size_t>(std::max(std::abs(t.dx), std::abs(t.dy)));
}

}  // namespace

DeviationReport compare_banks(const ActivationBank& direct, const ActivationBank& base, const NetworkSpec& net,
                              const TransformSpec& t) {
    const double s = t.kind == TransformKind::ScaleDyadic ? t.scale : 1.0;
    const bool disc = t.kind == TransformKind::RotateArbitrary;
    if (direct.per_scale.size() != base.per_scale.size()) throw DomainError("compared banks differ in scale count");

    DeviationReport report;
    report.transform = t.describe();
    double diff2 = 0.0, ref2 = 0.0;
    for (std::size_t k = 0; k < base.scales.size(); ++k) {
        const double w_out = base.scales[k] * s;
        for (const auto& [id, map] : base.per_scale[k]) {
            const auto& node = net.node(id);
            const Grid<cplx> moved = apply_transform(map.data, t);
            const std::size_t margin =
                static_cast<std::size_t>(std::ceil(w_out)) * static_cast<std::size_t>(node.level) + shift_of(t);
            const Accum acc = compare(direct.per_scale[k].at(id).data, moved, margin, disc);
            report.nodes.push_back({id, node.level, base.scales[k], margin, acc.linf(), acc.l2()});
            if (!node.skip) {
                diff2 += acc.diff2;
                ref2 += acc.ref2;
            }
        }
    }
    report.aggregate_l2 = Accum::ratio(std::sqrt(diff2), std::sqrt(ref2));
    return report;
}

DeviationReport equivariance_report(const Grid<double>& image, const NetworkSpec& net, const TransformSpec& t,
                                    const EngineConfig& engine) {
    const double s = t.kind == TransformKind::ScaleDyadic ? t.scale : 1.0;
    const NetworkSpec target = s == 1.0 ? net : rescaled(net, s);
    const ActivationBank direct = forward(FeatureMap::from_real(apply_transform(image, t)), target, engine);
    const ActivationBank base = forward(FeatureMap::from_real(image), net, engine);
    return compare_banks(direct, base, net, t);
}

DeviationReport compare_vectors(const InvariantVector& moved, const InvariantVector& reference,
                                const TransformSpec& t) {
    if (reference.size() != moved.size()) throw InvariantViolation("invariance", "invariant vectors differ in length");
    Accum acc;
    for (std::size_t i = 0; i < reference.size(); ++i) acc.add(moved.values[i], reference.values[i]);
    DeviationReport report;
    report.transform = t.describe();
    report.final_linf = acc.linf();
    report.final_l2 = acc.l2();
    report.aggregate_l2 = report.final_l2;
    return report;
}

DeviationReport invariance_report(const Grid<double>& image, const NetworkSpec& net, const BandConfig& bands,
                                  const TransformSpec& t, const EngineConfig& engine, ScaleReducer reducer) {
    const InvariantVector ref = extract(FeatureMap::from_real(image), net, bands, engine, reducer);
    const InvariantVector moved = extract(FeatureMap::from_real(apply_transform(image, t)), net, bands, engine, reducer);
    return compare_vectors(moved, ref, t);
}

// ---- classification ------------------------------------------------------

std::string to_string(ClassifierKind kind) {
    return kind == ClassifierKind::NearestCentroid ? "centroid" : "ridge";
}

ClassifierKind classifier_kind_from_string(const std::string& name) {
    if (name == "centroid") return ClassifierKind::NearestCentroid;
    if (name == "ridge") return ClassifierKind::RidgeLinear;
    throw ConfigError("unknown classifier '" + name + "' (expected centroid or ridge)");
}

namespace {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Matrix standardized(const Classifier& clf, const Grid<double>& x) {
    if (x.cols() != clf.mean.size()) {
        throw ConfigError("classifier expects " + std::to_string(clf.mean.size()) + " features, got " +
                          std::to_string(x.cols()));
    }
    Matrix out(x.rows(), x.cols());
    for (std::size_t r = 0; r < x.rows(); ++r) {
        for (std::size_t c = 0; c < x.cols(); ++c) out(r, c) = (x(r, c) - clf.mean[c]) / clf.stddev[c];
    }
    return out;
}

}  // namespace

Classifier fit(ClassifierKind kind, const FeatureMatrix& train, double ridge_lambda) {
    train.check();
    if (train.samples() == 0) throw ConfigError("fit: empty training set");
    if (kind == ClassifierKind::RidgeLinear && !(ridge_lambda > 0.0)) throw ConfigError("fit: ridge lambda must be > 0");

    Classifier clf;
    clf.kind = kind;
    clf.ridge_lambda = ridge_lambda;
    clf.classes = train.classes();
    const std::size_t n = train.samples(), d = train.features(), k = clf.classes.size();

    clf.mean.assign(d, 0.0);
    clf.stddev.assign(d, 0.0);
    for (std::size_t c = 0; c < d; ++c) {
        double s = 0.0;
        for (std::size_t r = 0; r < n; ++r) s += train.values(r, c);
        const double mu = s / static_cast<double>(n);
        double v = 0.0;
        for (std::size_t r = 0; r < n; ++r) v += (train.values(r, c) - mu) * (train.values(r, c) - mu);
        const double sd = std::sqrt(v / static_cast<double>(n));
        clf.mean[c] = mu;
        clf.stddev[c] = sd > 0.0 ? sd : 1.0;
    }
    const Matrix x = standardized(clf, train.values);

    std::map<int, std::size_t> index;
    for (std::size_t i = 0; i < k; ++i) index[clf.classes[i]] = i;

    if (kind == ClassifierKind::NearestCentroid) {
        clf.centroids = Grid<double>(k, d);
        std::vector<double> count(k, 0.0);
        for (std::size_t r = 0; r < n; ++r) {
            const std::size_t ci = index.at(train.labels[r]);
            count[ci] += 1.0;
            for (std::size_t c = 0; c < d; ++c) clf.centroids(ci, c) += x(r, c);
        }
        for (std::size_t ci = 0; ci < k; ++ci) {
            for (std::size_t c = 0; c < d; ++c) clf.centroids(ci, c) /= count[ci];
        }
        return clf;
    }

    // Columns of x are centred, so the bias is the target mean.
    Matrix y = Matrix::Constant(n, k, -1.0);
    for (std::size_t r = 0; r < n; ++r) y(r, index.at(train.labels[r])) = 1.0;
    const Eigen::RowVectorXd bias = y.colwise().mean();
    y.rowwise() -= bias;

    Matrix w;
    if (d <= n) {
        Matrix gram = x.transpose() * x;
        gram.diagonal().array() += ridge_lambda;
        w = gram.llt().solve(x.transpose() * y);
    } else {
        Matrix gram = x * x.transpose();
        gram.diagonal().array() += ridge_lambda;
        w = x.transpose() * gram.llt().solve(y);
    }
    clf.weights = Grid<double>(d, k);
    for (std::size_t c = 0; c < d; ++c) {
        for (std::size_t ci = 0; ci < k; ++ci) clf.weights(c, ci) = w(c, ci);
    }
    clf.bias.assign(bias.data(), bias.data() + k);
    return clf;
}

std::vector<int> predict(const Classifier& clf, const Grid<double>& features) {
    const Matrix x = standardized(clf, features);
    const std::size_t k = clf.classes.size(), d = clf.mean.size();
    std::vector<int> out(features.rows());
    for (std::size_t r = 0; r < features.rows(); ++r) {
        std::size_t best = 0;
        double best_score = 0.0;
        for (std::size_t ci = 0; ci < k; ++ci) {
            double score = 0.0;
            if (clf.kind == ClassifierKind::NearestCentroid) {
                for (std::size_t c = 0; c < d; ++c) {
                    const double diff = x(r, c) - clf.centroids(ci, c);
                    score -= diff * diff;
                }
            } else {
                score = clf.bias[ci];
                for (std::size_t c = 0; c < d; ++c) score += x(r, c) * clf.weights(c, ci);
            }
            if (ci == 0 || score > best_score) {
                best = ci;
                best_score = score;
            }
        }
        out[r] = clf.classes[best];
    }
    return out;
}

nlohmann::ordered_json Metrics::to_json() const {
    return {{"precision", precision}, {"recall", recall}, {"f1", f1}, {"accuracy", accuracy}};
}

Metrics metrics(const std::vector<int>& predictions, const std::vector<int>& labels) {
    if (predictions.size() != labels.size()) {
        throw ConfigError("metrics: " + std::to_string(predictions.size()) + " predictions for " +
                          std::to_string(labels.size()) + " labels");
    }
    if (labels.empty()) throw ConfigError("metrics: no samples");

    std::set<int> classes(labels.begin(), labels.end());
    classes.insert(predictions.begin(), predictions.end());
    std::map<int, double> tp, predicted, actual;
    double correct = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        predicted[predictions[i]] += 1.0;
        actual[labels[i]] += 1.0;
        if (predictions[i] == labels[i]) {
            tp[labels[i]] += 1.0;
            correct += 1.0;
        }
    }

    Metrics m;
    for (int c : classes) {
        const double p = predicted[c] > 0.0 ? tp[c] / predicted[c] : 0.0;
        const double r = actual[c] > 0.0 ? tp[c] / actual[c] : 0.0;
        m.precision += p;
        m.recall += r;
        m.f1 += p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
    }
    const double k = static_cast<double>(classes.size());
    m.precision *= 100.0 / k;
    m.recall *= 100.0 / k;
    m.f1 *= 100.0 / k;
    m.accuracy = 100.0 * correct / static_cast<double>(labels.size());
    return m;
}

Split stratified_split(const std::vector<int>& labels, double train_ratio, std::uint64_t seed) {
    if (!(train_ratio > 0.0 && train_ratio < 1.0)) throw ConfigError("train ratio must lie in (0, 1)");
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);

    std::mt19937_64 rng(seed);
    Split out;
    for (auto& [label, idx] : by_class) {
        std::shuffle(idx.begin(), idx.end(), rng);
        std::size_t n_train = static_cast<std::size_t>(std::lround(train_ratio * static_cast<double>(idx.size())));
        if (idx.size() >= 2) n_train = std::clamp<std::size_t>(n_train, 1, idx.size() - 1);
        else n_train = idx.size();
        out.train.insert(out.train.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
        out.test.insert(out.test.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
    }
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

}  // namespace hir
