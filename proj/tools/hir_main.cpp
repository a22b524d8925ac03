// hir: feature extraction, verification, benchmarking, classification and
// selection over hierarchical invariant representations.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hir/commands.hpp"
#include "hir/config.hpp"
#include "hir/error.hpp"

namespace {

struct Flags {
    std::string config;
    std::string input;
    std::string output;
    std::uint64_t seed = 0;
    std::string conv;
    int depth = 0;
    double scale = 0.0;
    std::string scales;
    std::string bands;
    std::size_t select_k = 0;
    std::string classifier;
    double train_ratio = 0.0;
    std::string fault;
};

struct Options {
    CLI::Option* config = nullptr;
    CLI::Option* seed = nullptr;
    CLI::Option* conv = nullptr;
    CLI::Option* depth = nullptr;
    CLI::Option* scale = nullptr;
    CLI::Option* scales = nullptr;
    CLI::Option* bands = nullptr;
    CLI::Option* select_k = nullptr;
    CLI::Option* classifier = nullptr;
    CLI::Option* train_ratio = nullptr;
};

hir::RunConfig resolve(const Flags& f, const Options& o) {
    hir::RunConfig c = o.config->count() ? hir::RunConfig::load(f.config) : hir::RunConfig{};
    if (o.seed->count()) c.seed = f.seed;
    if (o.conv->count()) c.conv = hir::conv_path_from_string(f.conv);
    if (o.depth->count()) c.depth = f.depth;
    if (o.scale->count()) {
        c.multiscale = false;
        c.scale = f.scale;
    }
    if (o.scales->count()) c.set_scales(f.scales);
    if (o.bands->count()) c.set_bands(f.bands);
    if (o.select_k->count()) c.select_k = f.select_k;
    if (o.classifier->count()) c.classifier = hir::classifier_kind_from_string(f.classifier);
    if (o.train_ratio->count()) c.train_ratio = f.train_ratio;
    c.validate();
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hierarchical invariant representations"};
    app.require_subcommand(1);
    app.fallthrough();

    Flags f;
    Options o;
    o.config = app.add_option("--config", f.config, "Run configuration JSON")->check(CLI::ExistingFile);
    app.add_option("--input", f.input, "Image directory (class per subdirectory) or features CSV");
    app.add_option("--output", f.output, "Output path");
    o.seed = app.add_option("--seed", f.seed, "Random seed");
    o.conv = app.add_option("--conv", f.conv, "Convolution path")->check(CLI::IsMember({"direct", "fft"}));
    o.depth = app.add_option("--depth", f.depth, "Network depth L");
    o.scale = app.add_option("--scale", f.scale, "Single scale w");
    o.scales = app.add_option("--scales", f.scales, "Dyadic scales 2^t, TMIN:TMAX");
    o.scale->excludes(o.scales);
    o.bands = app.add_option("--bands", f.bands, "Band pooling K:NB, K may be 'nyquist'");
    o.select_k = app.add_option("--select-k", f.select_k, "Number of features to keep");
    o.classifier =
        app.add_option("--classifier", f.classifier, "Classifier")->check(CLI::IsMember({"centroid", "ridge"}));
    o.train_ratio = app.add_option("--train-ratio", f.train_ratio, "Training fraction per class");

    auto* extract = app.add_subcommand("extract", "Write invariant features of every image to CSV");
    auto* verify = app.add_subcommand("verify", "Run the equivariance and invariance suite");
    verify->add_option("--inject-fault", f.fault, "Corrupt a component before verifying")
        ->check(CLI::IsMember({"kernel-cache"}));
    auto* bench = app.add_subcommand("bench", "Time direct and FFT convolution across scales");
    auto* classify = app.add_subcommand("classify", "Split, fit and score a classifier");
    auto* select = app.add_subcommand("select", "Rank features and prune the network");
    auto* build = app.add_subcommand("build", "Write the network specification JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? hir::kExitOk : hir::kExitUsage;
    }

    auto need = [&](const std::string& value, const char* flag) {
        if (value.empty()) throw hir::ConfigError(std::string(flag) + " is required for this command");
        return std::filesystem::path(value);
    };
    auto optional_path = [](const std::string& value) {
        return value.empty() ? std::nullopt : std::optional<std::filesystem::path>(value);
    };

    try {
        const hir::RunConfig config = resolve(f, o);
        if (extract->parsed()) {
            hir::cmd_extract(config, need(f.input, "--input"), need(f.output, "--output"));
        } else if (verify->parsed()) {
            hir::VerifyOptions opts;
            opts.inject_kernel_fault = f.fault == "kernel-cache";
            hir::cmd_verify(config, optional_path(f.input), need(f.output, "--output"), opts, std::cout);
        } else if (bench->parsed()) {
            hir::cmd_bench(config, optional_path(f.output), std::cout);
        } else if (classify->parsed()) {
            hir::cmd_classify(config, need(f.input, "--input"), optional_path(f.output), std::cout);
        } else if (select->parsed()) {
            hir::cmd_select(config, need(f.input, "--input"), need(f.output, "--output"), std::cout);
        } else if (build->parsed()) {
            const auto spec = config.network().to_json().dump(2);
            if (f.output.empty()) {
                std::cout << spec << '\n';
            } else {
                std::ofstream out(f.output);
                if (!out) throw hir::IoError("cannot write " + f.output);
                out << spec << '\n';
            }
        }
    } catch (const hir::InvariantViolation& e) {
        std::cerr << "invariant violated [" << e.invariant() << "]: " << e.what() << '\n';
        return hir::kExitInvariant;
    } catch (const hir::IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return hir::kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return hir::kExitUsage;
    }
    return hir::kExitOk;
}
