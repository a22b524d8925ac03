#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "hir/error.hpp"
#include "hir/network.hpp"

using namespace hir;

namespace {

FeatureMap noise(std::size_t side, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u;
    Grid<double> g(side, side);
    for (auto& v : g.values()) v = u(rng);
    return FeatureMap::from_real(g);
}

double max_diff(const Grid<cplx>& a, const Grid<cplx>& b) {
    double d = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a.values()[k] - b.values()[k]));
    return d;
}

}  // namespace

TEST(Topology, LevelLayout) {
    const NetworkSpec net = build_tree(3, 4.0, RadialFamily::cosine());
    EXPECT_EQ(static_cast<int>(net.nodes().size()), NetworkSpec::node_count(3));
    EXPECT_EQ(NetworkSpec::node_count(1), 3);
    EXPECT_EQ(NetworkSpec::node_count(3), 12);
    EXPECT_EQ(net.unit_count(), 2 + 3 + 4);
    for (int level = 1; level <= 3; ++level) {
        const int first = NetworkSpec::level_offset(level);
        for (int n = 0; n <= level; ++n) {
            const auto& node = net.node(first + n);
            EXPECT_EQ(node.level, level);
            EXPECT_FALSE(node.skip);
            EXPECT_EQ(node.order, BasisOrder(n, level - n));
        }
        EXPECT_TRUE(net.node(first + level + 1).skip);
    }
    EXPECT_TRUE(net.node(0).parents.empty());
    EXPECT_EQ(net.node(3).parents, (std::vector<int>{0, 1, 2}));
    EXPECT_THROW(net.node(12), DomainError);
}

TEST(Topology, FanOutCap) {
    const NetworkSpec net = build_tree(3, 4.0, RadialFamily::cosine(), 2);
    for (const auto& node : net.nodes()) EXPECT_LE(node.parents.size(), 2u);
    // level 2 unit (1,1): nearest radial orders are (1,0) then (0,1)
    EXPECT_EQ(net.node(4).parents, (std::vector<int>{0, 1}));
    // skip follows the previous skip first
    const auto& skip = net.node(6).parents;
    EXPECT_NE(std::find(skip.begin(), skip.end(), 2), skip.end());
}

TEST(Topology, Validation) {
    EXPECT_THROW(build_tree(0, 4.0, RadialFamily::cosine()), ConfigError);
    EXPECT_THROW(build_tree(9, 4.0, RadialFamily::cosine()), ConfigError);
    EXPECT_THROW(build_tree(2, 0.5, RadialFamily::cosine()), ConfigError);
    EXPECT_THROW(build_tree(2, 4.0, RadialFamily::cosine(), -1), ConfigError);
    EXPECT_THROW(NetworkSpec(RadialFamily::cosine(), 2, {4.0}, 0, {42}), ConfigError);
    EXPECT_THROW(build_multiscale(2, 3, 2, RadialFamily::cosine()), ConfigError);
}

TEST(Topology, MultiscaleScales) {
    const NetworkSpec net = build_multiscale(2, 2, 4, RadialFamily::cosine());
    EXPECT_EQ(net.scales(), (std::vector<double>{4.0, 8.0, 16.0}));
    EXPECT_TRUE(net.multiscale());
}

TEST(Topology, PathsAndPathValidity) {
    const NetworkSpec net = build_tree(3, 5.0, RadialFamily::cosine());
    EXPECT_EQ(net.paths_to(0, 5.0).size(), 1u);
    // level 2 nodes have three parents, level 3 nodes have four level-2 parents
    EXPECT_EQ(net.paths_to(3, 5.0).size(), 3u);
    const auto paths = net.paths_to(NetworkSpec::level_offset(3), 5.0);
    EXPECT_EQ(paths.size(), 12u);
    for (const auto& p : paths) {
        EXPECT_TRUE(p.valid());
        EXPECT_LE(p.lambdas.size(), 3u);
        EXPECT_GE(p.lambdas.size(), 1u);
    }
    EXPECT_FALSE(PathSpec{}.valid());
    EXPECT_FALSE((PathSpec{{{2, 1, 3.0}, {1, 0, 3.0}}}.valid()));
}

TEST(Topology, JsonRoundTrip) {
    const NetworkSpec net(RadialFamily::jacobi(1.0, 2.0, 2.0), 3, {4.0, 8.0}, 2, {1, 7});
    const NetworkSpec back = NetworkSpec::from_json(nlohmann::json::parse(net.to_json().dump()));
    EXPECT_EQ(back, net);
    EXPECT_THROW(NetworkSpec::from_json(nlohmann::json{{"family", "cosine"}}), ConfigError);
}

TEST(Pruning, RequiredKeepsAncestors) {
    const NetworkSpec net(RadialFamily::cosine(), 2, {4.0}, 1, {0, 1, 2, 3, 5, 6});
    EXPECT_EQ(net.emitted_nodes(), (std::vector<int>{4}));
    const auto req = net.required_nodes();
    EXPECT_EQ(req.front(), net.node(4).parents.front());
    EXPECT_EQ(req.back(), 4);
}

TEST(Forward, LevelOneGivesThreeActivations) {
    const NetworkSpec net = build_tree(1, 3.0, RadialFamily::cosine());
    const FeatureMap img = noise(20, 1);
    const ActivationBank bank = forward(img, net, EngineConfig{});
    ASSERT_EQ(bank.per_scale.size(), 1u);
    EXPECT_EQ(bank.per_scale[0].size(), 3u);
    EXPECT_EQ(bank.per_scale[0].at(2).data, img.data);
}

TEST(Forward, NodesConsumeTheMeanOfTheirParents) {
    const NetworkSpec net = build_tree(2, 3.0, RadialFamily::cosine());
    const FeatureMap img = noise(24, 2);
    EngineConfig cfg;
    cfg.path = ConvPath::Direct;
    const auto acts = forward(img, net, cfg).per_scale[0];
    FeatureMap mean = acts.at(0);
    for (std::size_t t = 0; t < mean.data.size(); ++t) {
        mean.data.values()[t] = (acts.at(0).data.values()[t] + acts.at(1).data.values()[t] + img.data.values()[t]) / 3.0;
    }
    EXPECT_LT(max_diff(acts.at(6).data, mean.data), 1e-15);
    const FeatureMap expect = unit_apply(mean, {1, 1, 3.0}, cfg);
    EXPECT_LT(max_diff(acts.at(4).data, expect.data), 1e-13);
}

TEST(Forward, FftAndDirectAgree) {
    const NetworkSpec net = build_tree(2, 4.0, RadialFamily::harmonic(2.0));
    const FeatureMap img = noise(30, 3);
    EngineConfig direct;
    direct.path = ConvPath::Direct;
    const auto a = forward(img, net, direct).per_scale[0];
    const auto b = forward(img, net, EngineConfig{}).per_scale[0];
    for (const auto& [id, map] : a) EXPECT_LT(max_diff(map.data, b.at(id).data), 1e-12) << id;
}

TEST(Forward, PrunedNetworkEmitsOnlySurvivors) {
    const NetworkSpec full = build_tree(2, 3.0, RadialFamily::cosine());
    const NetworkSpec pruned(RadialFamily::cosine(), 2, {3.0}, 0, {0, 2, 3, 5, 6});
    const FeatureMap img = noise(20, 4);
    const auto a = forward(img, full, EngineConfig{}).per_scale[0];
    const auto b = forward(img, pruned, EngineConfig{}).per_scale[0];
    ASSERT_EQ(b.size(), 2u);
    EXPECT_EQ(b.at(1).data, a.at(1).data);
    EXPECT_EQ(b.at(4).data, a.at(4).data);
}

TEST(Forward, RejectsSmallImages) {
    EXPECT_THROW(forward(noise(8, 0), build_tree(1, 4.0, RadialFamily::cosine()), EngineConfig{}), DomainError);
}

TEST(ScalePool, MaxAndMean) {
    NodeActivationSet a, b;
    FeatureMap x, y;
    x.data = Grid<cplx>(1, 2, std::vector<cplx>{1.0, 4.0});
    y.data = Grid<cplx>(1, 2, std::vector<cplx>{3.0, 2.0});
    a.emplace(0, x);
    b.emplace(0, y);
    const auto mx = scale_pool({a, b}, ScaleReducer::Max);
    EXPECT_EQ(mx.at(0).data(0, 0), cplx(3.0));
    EXPECT_EQ(mx.at(0).data(0, 1), cplx(4.0));
    const auto mn = scale_pool({a, b}, ScaleReducer::Mean);
    EXPECT_EQ(mn.at(0).data(0, 0), cplx(2.0));
    EXPECT_THROW(scale_pool({a}), DomainError);
    NodeActivationSet c;
    c.emplace(1, y);
    EXPECT_THROW(scale_pool({a, c}), DomainError);
}
