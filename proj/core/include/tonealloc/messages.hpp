#pragma once

#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

namespace tonealloc {

/// Base station -> every user: the current tone prices.
struct PriceAnnounce {
  std::uint64_t iter = 0;
  std::vector<double> mu;

  friend bool operator==(const PriceAnnounce&, const PriceAnnounce&) = default;
};

/// User -> base station: one demand bit per tone. Nothing else leaves a user.
struct Bid {
  std::size_t user_id = 0;
  std::vector<bool> demand;

  friend bool operator==(const Bid&, const Bid&) = default;
};

using Message = std::variant<PriceAnnounce, Bid>;

}  // namespace tonealloc
