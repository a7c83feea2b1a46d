#pragma once

#include <sstream>
#include <string>

namespace claimsim::detail {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace claimsim::detail
