#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "kernels_internal.hpp"

namespace gnc::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(GNCONVERT_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") != 0;
#else
    return false;
#endif
}

const KernelTable* find(std::string_view name) {
    const auto tables = available();
    if (name == "auto") {
        return tables.back();
    }
    for (const KernelTable* t : tables) {
        if (name == t->name) {
            return t;
        }
    }
    return nullptr;
}

const KernelTable* initial_selection() {
    if (const char* env = std::getenv("GNCONVERT_KERNELS"); env != nullptr && *env != '\0') {
        if (const KernelTable* t = find(env)) {
            return t;
        }
        throw std::invalid_argument(std::string("GNCONVERT_KERNELS names an unavailable kernel set: ") + env);
    }
    return available().back();
}

std::atomic<const KernelTable*>& slot() {
    static std::atomic<const KernelTable*> current{initial_selection()};
    return current;
}

}  // namespace

std::vector<const KernelTable*> available() {
    std::vector<const KernelTable*> out{&scalar()};
#if defined(GNCONVERT_HAVE_AVX2)
    if (cpu_has_avx2()) {
        out.push_back(&detail::kAvx2);
    }
#endif
#if defined(GNCONVERT_HAVE_NEON)
    out.push_back(&detail::kNeon);
#endif
    return out;
}

const KernelTable& active() {
    return *slot().load(std::memory_order_acquire);
}

void set_active(std::string_view name) {
    const KernelTable* t = find(name);
    if (t == nullptr) {
        throw std::invalid_argument("kernel set not available: " + std::string(name));
    }
    slot().store(t, std::memory_order_release);
}

}  // namespace gnc::kernels
