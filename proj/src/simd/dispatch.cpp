#include <atomic>
#include <cstdlib>
#include <string_view>

#include "uled/simd/kernels.hpp"

namespace uled::simd {

#ifndef ULED_BUILD_AVX2
const KernelTable* avx2_kernels() noexcept { return nullptr; }
#endif

namespace {

std::atomic<const KernelTable*> forced{nullptr};

const KernelTable& select_from_environment() noexcept {
  const char* env = std::getenv("ULED_INSPECT_SIMD");
  const std::string_view choice = env ? env : "";
  if (choice == "scalar") return scalar_kernels();
  if (const auto* avx2 = avx2_kernels()) return *avx2;
  return scalar_kernels();
}

}  // namespace

const KernelTable& active_kernels() noexcept {
  if (const auto* table = forced.load(std::memory_order_acquire)) return *table;
  static const KernelTable& selected = select_from_environment();
  return selected;
}

void override_kernels(const KernelTable* table) noexcept {
  forced.store(table, std::memory_order_release);
}

}  // namespace uled::simd
