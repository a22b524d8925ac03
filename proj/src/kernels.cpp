#include "hir/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>

#include <json.hpp>

#include "hir/error.hpp"
#include "hir/format.hpp"

namespace hir {

PixelGrid::PixelGrid(double di, double dj) : delta_i(di), delta_j(dj) {
    if (!(di > 0.0) || !(dj > 0.0)) throw DomainError("pixel dimensions must be positive");
}

cplx kernel_entry(const RadialFamily& family, BasisOrder order, const LocalFrame& frame, int i, int j,
                  const PixelGrid& grid, const QuadratureRule& rule) {
    const double ci = i * grid.delta_i;
    const double cj = j * grid.delta_j;
    // nearest point of the pixel rectangle to the disk centre
    const double ni = std::clamp(frame.u, ci - 0.5 * grid.delta_i, ci + 0.5 * grid.delta_i);
    const double nj = std::clamp(frame.v, cj - 0.5 * grid.delta_j, cj + 0.5 * grid.delta_j);
    const double di = ni - frame.u;
    const double dj = nj - frame.v;
    if (di * di + dj * dj > frame.w * frame.w) return {0.0, 0.0};

    cplx acc{};
    for (const auto& node : rule.nodes) {
        const double x = ci + node.x * grid.delta_i;
        const double y = cj + node.y * grid.delta_j;
        acc += node.weight * std::conj(basis_value(family, order, frame, x, y));
    }
    const cplx value = acc * (grid.delta_i * grid.delta_j / (frame.w * frame.w));
    if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) {
        throw DomainError("kernel entry is not finite (radial weight diverges at a quadrature node)");
    }
    return value;
}

KernelTable build_kernel(const RadialFamily& family, BasisOrder order, double w, const PixelGrid& grid,
                         const QuadratureRule& rule) {
    if (!(w >= 1.0)) throw DomainError("kernel scale w must be at least 1 pixel");
    const int half_i = static_cast<int>(std::ceil(w / grid.delta_i));
    const int half_j = static_cast<int>(std::ceil(w / grid.delta_j));
    const LocalFrame frame(half_i * grid.delta_i, half_j * grid.delta_j, w);

    KernelTable table;
    table.values = Grid<cplx>(2 * half_i + 1, 2 * half_j + 1);
    table.family = family;
    table.order = order;
    table.scale = w;
    table.grid = grid;
    table.rule_label = rule.label;
    for (int i = 0; i <= 2 * half_i; ++i) {
        for (int j = 0; j <= 2 * half_j; ++j) {
            table.values(i, j) = kernel_entry(family, order, frame, i, j, grid, rule);
        }
    }
    return table;
}

std::shared_ptr<const KernelTable> KernelCache::get(const RadialFamily& family, BasisOrder order, double w,
                                                    const PixelGrid& grid, const QuadratureRule& rule) {
    KernelKey key{family, order, w, grid, rule.label};
    {
        std::shared_lock lock(mutex_);
        if (auto it = tables_.find(key); it != tables_.end()) return it->second;
    }
    auto table = std::make_shared<const KernelTable>(build_kernel(family, order, w, grid, rule));
    std::unique_lock lock(mutex_);
    auto [it, inserted] = tables_.emplace(std::move(key), std::move(table));
    return it->second;
}

void KernelCache::clear() {
    std::unique_lock lock(mutex_);
    tables_.clear();
}

std::size_t KernelCache::size() const {
    std::shared_lock lock(mutex_);
    return tables_.size();
}

std::vector<std::shared_ptr<const KernelTable>> KernelCache::snapshot() const {
    std::shared_lock lock(mutex_);
    std::vector<std::shared_ptr<const KernelTable>> out;
    out.reserve(tables_.size());
    for (const auto& [key, table] : tables_) out.push_back(table);
    return out;
}

void KernelCache::corrupt_entry(const KernelKey& key, const QuadratureRule& rule, std::size_t i,
                                std::size_t j, cplx delta) {
    auto original = get(key.family, key.order, key.scale, key.grid, rule);
    auto corrupted = std::make_shared<KernelTable>(*original);
    if (i >= corrupted->values.rows() || j >= corrupted->values.cols()) {
        throw DomainError("corrupt_entry index outside the kernel table");
    }
    corrupted->values(i, j) += delta;
    std::unique_lock lock(mutex_);
    tables_[key] = std::move(corrupted);
}

KernelCache& default_kernel_cache() {
    static KernelCache cache;
    return cache;
}

void write_kernel_dump(const KernelTable& table, const std::filesystem::path& csv_path) {
    std::ofstream csv(csv_path);
    if (!csv) throw IoError("cannot write kernel dump " + csv_path.string());
    csv << "i,j,re,im\n";
    for (std::size_t i = 0; i < table.values.rows(); ++i) {
        for (std::size_t j = 0; j < table.values.cols(); ++j) {
            csv << i << ',' << j << ',' << format_double(table.values(i, j).real()) << ','
                << format_double(table.values(i, j).imag()) << '\n';
        }
    }
    nlohmann::ordered_json desc;
    desc["family"] = to_string(table.family.kind());
    desc["alpha"] = table.family.alpha();
    desc["p"] = table.family.p();
    desc["q"] = table.family.q();
    desc["n"] = table.order.n;
    desc["m"] = table.order.m;
    desc["w"] = table.scale;
    desc["support_half_size"] = table.half_rows();
    desc["rule"] = table.rule_label;
    desc["side_length"] = {table.values.rows(), table.values.cols()};
    std::ofstream json(csv_path.string() + ".json");
    if (!json) throw IoError("cannot write kernel descriptor for " + csv_path.string());
    json << desc.dump(2) << '\n';
}

}  // namespace hir
