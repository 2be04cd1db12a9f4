#pragma once

namespace rnsift {

inline constexpr const char* kToolName = "rnsift";
inline constexpr const char* kToolVersion = "0.1.0";

} // namespace rnsift
