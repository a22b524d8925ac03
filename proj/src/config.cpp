#include "hir/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "hir/error.hpp"
#include "hir/quadrature.hpp"

namespace hir {
namespace {

int parse_int(const std::string& text, const std::string& what) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
        throw ConfigError(what + ": '" + text + "' is not an integer");
    }
    return v;
}

std::pair<std::string, std::string> split_colon(const std::string& spec, const std::string& what) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos || spec.find(':', colon + 1) != std::string::npos) {
        throw ConfigError(what + ": expected A:B, got '" + spec + "'");
    }
    return {spec.substr(0, colon), spec.substr(colon + 1)};
}

std::string reducer_name(ScaleReducer r) { return r == ScaleReducer::Max ? "max" : "mean"; }

ScaleReducer reducer_from(const std::string& name) {
    if (name == "max") return ScaleReducer::Max;
    if (name == "mean") return ScaleReducer::Mean;
    throw ConfigError("scale_reducer must be max or mean, got '" + name + "'");
}

}  // namespace

void RunConfig::set_scales(const std::string& spec) {
    const auto [lo, hi] = split_colon(spec, "--scales");
    t_min = parse_int(lo, "--scales");
    t_max = parse_int(hi, "--scales");
    multiscale = true;
}

void RunConfig::set_bands(const std::string& spec) {
    const auto [k, nb] = split_colon(spec, "--bands");
    bands_nyquist = k == "nyquist";
    band_k = bands_nyquist ? 0 : parse_int(k, "--bands");
    num_bands = parse_int(nb, "--bands");
}

void RunConfig::validate() const {
    if (depth < 1 || depth > kMaxDepth) {
        throw ConfigError("depth must lie in [1, " + std::to_string(kMaxDepth) + "], got " + std::to_string(depth));
    }
    if (multiscale) {
        if (t_min < 0 || t_max > 10 || t_min > t_max) {
            throw ConfigError("scales need 0 <= TMIN <= TMAX <= 10, got " + std::to_string(t_min) + ":" +
                              std::to_string(t_max));
        }
        if (t_min == t_max) throw ConfigError("a dyadic scale range needs at least two scales");
    } else if (!(scale >= 1.0) || !std::isfinite(scale)) {
        throw ConfigError("scale must be >= 1");
    }
    if (band_k < 0) throw ConfigError("bands: K must be >= 0");
    if (num_bands < 1) throw ConfigError("bands: number of bands must be >= 1");
    if (!bands_nyquist && band_k == 0 && num_bands != 1) throw ConfigError("bands: K = 0 allows a single band only");
    QuadratureRule::from_label(quadrature);
    if (fan_out_cap < 0) throw ConfigError("fan_out_cap must be >= 0");
    if (!(ridge_lambda > 0.0)) throw ConfigError("ridge_lambda must be > 0");
    if (!(train_ratio > 0.0 && train_ratio < 1.0)) throw ConfigError("train ratio must lie in (0, 1)");
}

void RunConfig::validate_for_image(std::size_t rows, std::size_t cols) const {
    validate();
    const std::size_t r = rows + 2 * margin, c = cols + 2 * margin;
    const double w_max = multiscale ? std::ldexp(1.0, t_max) : scale;
    const std::size_t side = 2 * static_cast<std::size_t>(std::ceil(w_max)) + 1;
    if (side > std::min(r, c)) {
        throw ConfigError("scale " + std::to_string(w_max) + " needs images of at least " + std::to_string(side) +
                          " pixels per side, got " + std::to_string(r) + "x" + std::to_string(c));
    }
    if (!bands_nyquist && static_cast<std::size_t>(band_k) > std::min(r, c) / 2) {
        throw ConfigError("bands: K=" + std::to_string(band_k) + " exceeds floor(min side / 2) = " +
                          std::to_string(std::min(r, c) / 2));
    }
}

NetworkSpec RunConfig::network() const {
    if (multiscale) return build_multiscale(depth, t_min, t_max, family, fan_out_cap);
    return build_tree(depth, scale, family, fan_out_cap);
}

EngineConfig RunConfig::engine() const {
    EngineConfig e;
    e.family = family;
    e.rule = QuadratureRule::from_label(quadrature);
    e.path = conv;
    return e;
}

BandConfig RunConfig::bands(std::size_t rows, std::size_t cols) const {
    if (bands_nyquist) return BandConfig::nyquist(rows, cols, num_bands);
    return BandConfig(band_k, num_bands);
}

nlohmann::ordered_json RunConfig::to_json() const {
    nlohmann::ordered_json j;
    j["family"] = {{"kind", to_string(family.kind())}, {"alpha", family.alpha()}, {"p", family.p()}, {"q", family.q()}};
    j["depth"] = depth;
    if (multiscale) {
        j["scale"] = {{"mode", "dyadic"}, {"t_min", t_min}, {"t_max", t_max}};
    } else {
        j["scale"] = {{"mode", "single"}, {"w", scale}};
    }
    j["bands"] = {{"K", bands_nyquist ? nlohmann::ordered_json("nyquist") : nlohmann::ordered_json(band_k)},
                  {"num_bands", num_bands}};
    j["conv"] = to_string(conv);
    j["quadrature"] = quadrature;
    j["fan_out_cap"] = fan_out_cap;
    j["scale_reducer"] = reducer_name(reducer);
    j["select_k"] = select_k;
    j["classifier"] = to_string(classifier);
    j["ridge_lambda"] = ridge_lambda;
    j["seed"] = seed;
    j["train_ratio"] = train_ratio;
    j["margin"] = margin;
    j["workers"] = workers;
    return j;
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
    RunConfig c;
    try {
        if (j.contains("family")) {
            const auto& f = j.at("family");
            c.family = RadialFamily::make(radial_kind_from_string(f.at("kind").get<std::string>()),
                                          f.value("alpha", 2.0), f.value("p", 0.0), f.value("q", 0.0));
        }
        c.depth = j.value("depth", c.depth);
        if (j.contains("scale")) {
            const auto& s = j.at("scale");
            const std::string mode = s.value("mode", std::string("single"));
            if (mode == "single") {
                c.multiscale = false;
                c.scale = s.value("w", c.scale);
            } else if (mode == "dyadic") {
                c.multiscale = true;
                c.t_min = s.value("t_min", c.t_min);
                c.t_max = s.value("t_max", c.t_max);
            } else {
                throw ConfigError("scale.mode must be single or dyadic, got '" + mode + "'");
            }
        }
        if (j.contains("bands")) {
            const auto& b = j.at("bands");
            if (b.contains("K") && b.at("K").is_string()) {
                if (b.at("K").get<std::string>() != "nyquist") throw ConfigError("bands.K must be an integer or \"nyquist\"");
                c.bands_nyquist = true;
            } else {
                c.band_k = b.value("K", c.band_k);
            }
            c.num_bands = b.value("num_bands", c.num_bands);
        }
        if (j.contains("conv")) c.conv = conv_path_from_string(j.at("conv").get<std::string>());
        c.quadrature = j.value("quadrature", c.quadrature);
        c.fan_out_cap = j.value("fan_out_cap", c.fan_out_cap);
        if (j.contains("scale_reducer")) c.reducer = reducer_from(j.at("scale_reducer").get<std::string>());
        c.select_k = j.value("select_k", c.select_k);
        if (j.contains("classifier")) c.classifier = classifier_kind_from_string(j.at("classifier").get<std::string>());
        c.ridge_lambda = j.value("ridge_lambda", c.ridge_lambda);
        c.seed = j.value("seed", c.seed);
        c.train_ratio = j.value("train_ratio", c.train_ratio);
        c.margin = j.value("margin", c.margin);
        c.workers = j.value("workers", c.workers);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path.string());
    try {
        return from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

void RunConfig::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << to_json().dump(2) << '\n';
}

}  // namespace hir
