// SPDX-License-Identifier: Apache-2.0
#include <cstdlib>
#include <string_view>

#include "avs/kernels.hpp"

namespace avs::kernels {

const KernelTable& active() {
  static const KernelTable& table = [] () -> const KernelTable& {
    const char* forced = std::getenv("AVS_KERNELS");
    if (forced != nullptr && std::string_view(forced) == "scalar") return scalar();
    if (const KernelTable* fast = avx2()) return *fast;
    return scalar();
  }();
  return table;
}

}  // namespace avs::kernels
