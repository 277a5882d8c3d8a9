#pragma once

#include <string>

namespace umda {

/// Shortest fixed-notation decimal that parses back to the same double, with
/// at least one fractional digit: 41000 -> "41000.0", 350.2 -> "350.2",
/// 1.0 / 3 -> "0.3333333333333333". Non-finite values give nan / inf / -inf.
std::string format_decimal(double value);

}  // namespace umda
