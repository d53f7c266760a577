// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace chlru {

enum class AccessResult : uint8_t { kHit, kMiss };

// LRU cache of unit-size items drawn from a dense id universe [0, universe).
//
// Residents live in a fixed pool of `capacity` slots threaded on an intrusive
// doubly linked list, most recent at the head. An item -> slot table sized to
// the universe gives O(1) lookups without hashing, and nothing allocates
// after construction. This is move-to-front truncated at the capacity: an
// access misses exactly when the item's recency rank exceeds the capacity.
class LruCache {
 public:
  LruCache(std::size_t capacity, std::size_t universe);

  AccessResult access(uint32_t item) {
    uint32_t slot = slot_of_[item];
    if (slot != kNil) {
      if (slot != head_) {
        unlink(slot);
        push_front(slot);
      }
      return AccessResult::kHit;
    }
    if (size_ < nodes_.size()) {
      slot = static_cast<uint32_t>(size_++);
    } else {
      slot = tail_;
      unlink(slot);
      slot_of_[nodes_[slot].item] = kNil;
    }
    nodes_[slot].item = item;
    slot_of_[item] = slot;
    push_front(slot);
    return AccessResult::kMiss;
  }

  // 1-based recency rank, or nullopt if not resident. Linear time.
  std::optional<std::size_t> mtf_position(uint32_t item) const;

  bool contains(uint32_t item) const { return slot_of_[item] != kNil; }
  std::size_t capacity() const { return nodes_.size(); }
  std::size_t occupancy() const { return size_; }
  std::size_t universe() const { return slot_of_.size(); }

  // Residents, most recent first.
  std::vector<uint32_t> residents() const;

  void clear();

 private:
  static constexpr uint32_t kNil = UINT32_MAX;

  struct Node {
    uint32_t item;
    uint32_t prev;
    uint32_t next;
  };

  void unlink(uint32_t slot) {
    Node& n = nodes_[slot];
    if (n.prev != kNil) nodes_[n.prev].next = n.next; else head_ = n.next;
    if (n.next != kNil) nodes_[n.next].prev = n.prev; else tail_ = n.prev;
  }

  void push_front(uint32_t slot) {
    Node& n = nodes_[slot];
    n.prev = kNil;
    n.next = head_;
    if (head_ != kNil) nodes_[head_].prev = slot; else tail_ = slot;
    head_ = slot;
  }

  std::vector<Node> nodes_;
  std::vector<uint32_t> slot_of_;
  uint32_t head_ = kNil;
  uint32_t tail_ = kNil;
  std::size_t size_ = 0;
};

}  // namespace chlru
