#include <atomic>
#include <cstdlib>
#include <string_view>

#include "clinsent/kernels.hpp"
#include "clinsent/types.hpp"

namespace clinsent::simd {

namespace {

const KernelTable* initial_table() {
    const char* env = std::getenv("CLIN_SENT_SIMD");
    const std::string_view choice = env ? env : "auto";
    if (choice == "scalar") return &scalar_kernels();
    if (cpu_supports_avx2()) return avx2_kernels();
    return &scalar_kernels();
}

std::atomic<const KernelTable*>& table_slot() {
    static std::atomic<const KernelTable*> slot{initial_table()};
    return slot;
}

} // namespace

bool cpu_supports_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
    return avx2_kernels() != nullptr && __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

const KernelTable& active() { return *table_slot().load(std::memory_order_acquire); }

Backend active_backend() { return &active() == &scalar_kernels() ? Backend::scalar : Backend::avx2; }

void select_backend(Backend b) {
    if (b == Backend::scalar) {
        table_slot().store(&scalar_kernels(), std::memory_order_release);
        return;
    }
    if (!cpu_supports_avx2()) throw Error("AVX2 kernels are not available on this CPU");
    table_slot().store(avx2_kernels(), std::memory_order_release);
}

} // namespace clinsent::simd
