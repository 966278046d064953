#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace rqb {

// thrown when a construction or search exceeds its configured state budget
struct ResourceLimitError : std::runtime_error {
    explicit ResourceLimitError(const std::string& what) : std::runtime_error(what) {}
};

struct FlavorError : std::runtime_error {
    explicit FlavorError(const std::string& what) : std::runtime_error(what) {}
};

constexpr std::uint64_t kDefaultMaxStates = 5'000'000;

}  // namespace rqb
