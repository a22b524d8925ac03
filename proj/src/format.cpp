#include "hir/format.hpp"

#include <array>
#include <charconv>

namespace hir {

std::string format_double(double value) {
    std::array<char, 64> buffer{};
    auto [end, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value,
                                   std::chars_format::general, 9);
    return std::string(buffer.data(), end);
}

}  // namespace hir
