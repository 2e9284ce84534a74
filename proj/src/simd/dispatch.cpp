#include <atomic>
#include <cstdlib>
#include <string>

#include "gevflow/simd.hpp"

namespace gevflow::simd {
namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Backend initial_backend() {
  const bool avx2_ok = avx2_available();
  if (const char* env = std::getenv("GEVFLOW_SIMD")) {
    const std::string req(env);
    if (req == "scalar") return Backend::Scalar;
    if (req == "avx2" && avx2_ok) return Backend::Avx2;
  }
  return avx2_ok ? Backend::Avx2 : Backend::Scalar;
}

std::atomic<Backend>& current() {
  static std::atomic<Backend> b{initial_backend()};
  return b;
}

}  // namespace

bool avx2_available() { return avx2_kernels() != nullptr && cpu_has_avx2(); }

const Kernels& kernels() {
  return current().load(std::memory_order_relaxed) == Backend::Avx2
             ? *avx2_kernels()
             : scalar_kernels();
}

Backend backend() { return current().load(std::memory_order_relaxed); }

bool set_backend(Backend b) {
  if (b == Backend::Avx2 && !avx2_available()) return false;
  current().store(b, std::memory_order_relaxed);
  return true;
}

std::string_view backend_name(Backend b) {
  return b == Backend::Avx2 ? "avx2" : "scalar";
}

}  // namespace gevflow::simd
