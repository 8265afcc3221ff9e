#include "dlad/rng.hpp"

namespace dlad {

std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view purpose,
                          std::uint64_t entity_id) {
  std::uint64_t h = mix64(master_seed ^ 0x243F6A8885A308D3ULL);
  for (unsigned char c : purpose) {
    h = mix64(h ^ c);
  }
  return mix64(h ^ entity_id);
}

}  // namespace dlad
