#pragma once

namespace bgw {

// Single version constant, echoed into every output so artifacts can be
// traced back to the build that produced them.
inline constexpr const char* kBgwlabVersion = "1.0.0";

}  // namespace bgw
