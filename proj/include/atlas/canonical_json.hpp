#pragma once

#include <string>

#include "atlas/json_io.hpp"

namespace atlas {

/// Byte-stable serialization: object keys sorted, two-space indentation,
/// every floating-point number printed with exactly six decimals, trailing
/// newline. Throws InputError on non-finite numbers.
std::string canonical_dump(const json& value);

/// Rounds to six decimals the way canonical_dump prints.
double round_to_micro(double value);

}  // namespace atlas
