#include <atomic>
#include <cstdlib>
#include <string>

#include "thermo/error.hpp"
#include "thermo/simd/kernels.hpp"

namespace thermo::simd {

std::string_view to_string(Level level) {
    switch (level) {
        case Level::Scalar: return "scalar";
        case Level::Avx2: return "avx2";
    }
    return "?";
}

Level level_from_string(std::string_view name) {
    if (name == "scalar") return Level::Scalar;
    if (name == "avx2") return Level::Avx2;
    throw ConfigError("unknown SIMD level '" + std::string(name) + "' (expected scalar or avx2)");
}

bool available(Level level) {
    switch (level) {
        case Level::Scalar: return true;
        case Level::Avx2:
#if defined(THERMO_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
    }
    return false;
}

Level detected_level() { return available(Level::Avx2) ? Level::Avx2 : Level::Scalar; }

namespace {

Level initial_level() {
    if (const char* env = std::getenv("THERMO_SIMD_LEVEL"); env != nullptr && *env != '\0') {
        const Level requested = level_from_string(env);
        if (!available(requested)) {
            throw ConfigError("THERMO_SIMD_LEVEL=" + std::string(env) + " is not supported on this machine");
        }
        return requested;
    }
    return detected_level();
}

std::atomic<int>& level_slot() {
    static std::atomic<int> slot{static_cast<int>(initial_level())};
    return slot;
}

}  // namespace

Level active_level() { return static_cast<Level>(level_slot().load(std::memory_order_relaxed)); }

void set_active_level(Level level) {
    if (!available(level)) throw ConfigError("SIMD level " + std::string(to_string(level)) + " is not available");
    level_slot().store(static_cast<int>(level), std::memory_order_relaxed);
}

const KernelTable& kernels(Level level) {
#if defined(THERMO_HAVE_AVX2)
    if (level == Level::Avx2) return detail::avx2_table;
#endif
    (void)level;
    return detail::scalar_table;
}

}  // namespace thermo::simd
