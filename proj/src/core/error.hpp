#pragma once

#include <stdexcept>
#include <string>

namespace wbesprit {

enum class Errc {
  ok = 0,
  degenerate_geometry,
  no_intersection,
  validation,
  ill_conditioned,
  underdetermined,
  pairing_failure,
  out_of_range,
  io,
  internal,
};

class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace wbesprit
