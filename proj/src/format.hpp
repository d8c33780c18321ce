#pragma once

#include <string>

#include <fmt/format.h>

namespace rmtcorr::detail {

/// Shortest decimal that round-trips; output files are byte-stable.
inline std::string num(double x) { return fmt::format("{}", x); }

}  // namespace rmtcorr::detail
