#pragma once

namespace wmh2 {

inline constexpr const char* kVersion = "0.1.0";

// Convention identifiers echoed into every run manifest.
inline constexpr const char* kBumpId = "exp-telescoping-v1";
inline constexpr const char* kSignatureId = "(+,-,-,-): d^0=d_0, d^j=-d_j, Box=dtt-Lap";
inline constexpr const char* kZeroModeId = "inverse-operators-zero";

} // namespace wmh2
