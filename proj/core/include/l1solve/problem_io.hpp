#pragma once

#include <cstdint>
#include <filesystem>

#include "l1solve/generators.hpp"

namespace l1solve {

/// Binary container for GeneratedProblem, format "L1PROBv1" (little-endian,
/// K stored row-major float64). Byte layout documented in docs/problem_format.md.
void save_problem(const GeneratedProblem& prob, const std::filesystem::path& path);
GeneratedProblem load_problem(const std::filesystem::path& path);

/// FNV-1a 64-bit hash of the problem's serialized bytes; used to key
/// reference caches to the exact problem they were computed for.
std::uint64_t problem_hash(const GeneratedProblem& prob);

}  // namespace l1solve
