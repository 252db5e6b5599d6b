#include "opnorm/util.hpp"

#include <cstdio>

namespace opnorm {

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace opnorm
