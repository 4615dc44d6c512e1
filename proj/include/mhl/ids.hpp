#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>

namespace mhl {

/// Opaque identifier. The tag only separates the id kinds at compile time.
template <class Tag>
struct Id {
  std::uint64_t value = 0;

  friend constexpr auto operator<=>(Id, Id) = default;

  friend std::ostream& operator<<(std::ostream& os, Id id) {
    return os << Tag::prefix << id.value;
  }
};

struct EventTag { static constexpr const char* prefix = "e"; };
struct FactTag { static constexpr const char* prefix = "f"; };
struct EventGroupTag { static constexpr const char* prefix = "g"; };
struct ConstraintTag { static constexpr const char* prefix = "c"; };
struct ClusterTag { static constexpr const char* prefix = "k"; };
struct LeafTag { static constexpr const char* prefix = "l"; };

using EventId = Id<EventTag>;
using FactId = Id<FactTag>;
using EventGroupId = Id<EventGroupTag>;
using ConstraintId = Id<ConstraintTag>;
using ClusterId = Id<ClusterTag>;
using LeafId = Id<LeafTag>;

/// Hands out ids from a single counter shared by every id kind, so ids are
/// strictly increasing over the lifetime of one world and never reused.
class IdAllocator {
 public:
  template <class IdType>
  IdType next() {
    return IdType{next_++};
  }

  std::uint64_t peek() const { return next_; }

 private:
  std::uint64_t next_ = 1;
};

}  // namespace mhl

template <class Tag>
struct std::hash<mhl::Id<Tag>> {
  std::size_t operator()(mhl::Id<Tag> id) const noexcept {
    return std::hash<std::uint64_t>{}(id.value);
  }
};
