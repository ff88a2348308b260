#pragma once

#include <cstdint>
#include <ostream>

namespace sqf {

/// Runs the randomized invariant suites with the given seed and prints one
/// line per check. Returns 0 when every suite passes. The output depends
/// only on the seed, never on the thread count.
int run_verify_suite(std::uint64_t seed, int threads, std::ostream& out);

}  // namespace sqf
