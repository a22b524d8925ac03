#pragma once

#include <string>

namespace hir {

/// Locale-independent shortest form with 9 significant digits.
std::string format_double(double value);

}  // namespace hir
