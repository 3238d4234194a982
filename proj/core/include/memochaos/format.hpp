#pragma once

#include <string>
#include <string_view>

namespace memochaos {

/// Scientific notation with 17 significant digits ("%.16e"). Round-trips
/// every finite double; NaN and infinities print as "nan", "inf", "-inf".
std::string format_sci(double value);

/// Parses text written by format_sci (or any strtod-compatible number).
/// Throws InvalidArgument on trailing garbage or empty input.
double parse_double(std::string_view text);

}  // namespace memochaos
