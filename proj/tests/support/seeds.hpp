#pragma once

#include <cstdint>

#include "edsketch/randomness.hpp"

namespace edsketch::oracle {

inline Seed seed_of(uint8_t v) {
    Seed s{};
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = static_cast<uint8_t>(v * 37 + i);
    return s;
}

}  // namespace edsketch::oracle
