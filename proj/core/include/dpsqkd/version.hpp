// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace dpsqkd {

inline constexpr const char* kVersion = "dpsqkd 0.1.0";

}  // namespace dpsqkd
