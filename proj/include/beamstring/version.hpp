#pragma once

namespace beamstring {

/// Tool version embedded in every report/CSV header for provenance.
inline constexpr const char* kVersion = "0.1.0";

}  // namespace beamstring
