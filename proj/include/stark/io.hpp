#ifndef STARK_IO_HPP
#define STARK_IO_HPP

#include <cstdint>
#include <string>

#include "stark/potential.hpp"

namespace stark {

// Potential descriptor file:
// {"gamma": float, "form": "box"|"linear"|"poly"|"samples",
//  "coeffs": [...], "samples": {"x": [...], "v": [...]}}
PotentialSpec load_potential_spec(const std::string& path);
Potential load_potential(const std::string& path);

uint64_t fnv1a64(const std::string& s);
std::string hash_hex(uint64_t h);

// Atomic artifact write: temp file in the target directory, then rename.
void write_atomic(const std::string& path, const std::string& content);

// 17-significant-digit float formatting, no locale.
std::string g17(double x);

}  // namespace stark

#endif
