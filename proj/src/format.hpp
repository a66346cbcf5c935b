#pragma once

#include <sstream>
#include <string>

namespace orthonet::detail {

/// Default stream rendering for provenance strings: 0, 0.5, 1e-06.
inline std::string format_number(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace orthonet::detail
