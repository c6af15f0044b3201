#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace costdd {

/// Item costs indexed by 1-based item number. Entries may be zero or negative.
class CostVector {
public:
    CostVector() = default;
    explicit CostVector(std::vector<std::int64_t> costs) : costs_(std::move(costs)) {}
    CostVector(std::initializer_list<std::int64_t> costs) : costs_(costs) {}

    std::uint32_t size() const noexcept { return static_cast<std::uint32_t>(costs_.size()); }

    std::int64_t operator[](std::uint32_t item) const {
        if (item == 0 || item > costs_.size()) throw ContractError("CostVector: item index out of range");
        return costs_[item - 1];
    }

    std::span<const std::int64_t> values() const noexcept { return costs_; }

private:
    std::vector<std::int64_t> costs_;
};

} // namespace costdd
