#include "ghzclock/random.hpp"

namespace ghzclock {

Stream make_stream(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    return Stream(seq);
}

}  // namespace ghzclock
