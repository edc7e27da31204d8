#pragma once

#include <string>

namespace aggrestab {

/// Shortest locale-independent text for a double at 17 significant digits ("inf", "-inf", "nan" for specials).
std::string format_double(double v);

}  // namespace aggrestab
