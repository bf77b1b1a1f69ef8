#pragma once

namespace ncorr {

inline constexpr const char* kVersion = "0.1.0";

} // namespace ncorr
