#pragma once

#include <string>

namespace nehari {

// Shortest round-trip decimal form; "nan", "inf", "-inf" for non-finite values.
std::string format_double(double x);

}  // namespace nehari
