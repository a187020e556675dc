#pragma once

namespace keygraph {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace keygraph
