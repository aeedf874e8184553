#include <cstdlib>
#include <string_view>

#include "simba/kernels.hpp"

namespace simba::kernels {

namespace detail {
#ifndef SIMBA_HAVE_AVX2
const KernelTable* avx2_table() { return nullptr; }
#endif
#ifndef SIMBA_HAVE_NEON
const KernelTable* neon_table() { return nullptr; }
#endif
}  // namespace detail

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
    case Isa::kNeon:
      return "neon";
  }
  return "unknown";
}

const KernelTable* table_for(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return &detail::kScalarTable;
    case Isa::kAvx2:
      return detail::avx2_table();
    case Isa::kNeon:
      return detail::neon_table();
  }
  return nullptr;
}

namespace {

const KernelTable& select() {
  const char* force = std::getenv("SIMBA_FORCE_SCALAR");
  if (force && std::string_view(force) != "0" && !std::string_view(force).empty()) return detail::kScalarTable;
  if (auto* t = detail::avx2_table()) return *t;
  if (auto* t = detail::neon_table()) return *t;
  return detail::kScalarTable;
}

}  // namespace

const KernelTable& active() {
  static const KernelTable& table = select();
  return table;
}

}  // namespace simba::kernels
