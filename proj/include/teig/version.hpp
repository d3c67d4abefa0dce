#pragma once

namespace teig {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace teig
