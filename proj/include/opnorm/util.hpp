#pragma once

#include <string>

namespace opnorm {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

// Shortest form that round-trips at 17 significant digits ("%.17g").
std::string format_real(double v);

}  // namespace opnorm
