#pragma once

#include <string>

namespace plateau {

/// Shortest decimal string that parses back to the same double.
std::string shortest(double value);

}  // namespace plateau
