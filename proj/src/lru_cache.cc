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

#include "chlru/lru_cache.h"

#include <stdexcept>

namespace chlru {

LruCache::LruCache(std::size_t capacity, std::size_t universe)
    : nodes_(capacity), slot_of_(universe, kNil) {
  if (capacity == 0) throw std::invalid_argument("lru: capacity must be >= 1");
  if (capacity >= kNil || universe > kNil) {
    throw std::invalid_argument("lru: capacity or universe exceeds 32-bit ids");
  }
}

std::optional<std::size_t> LruCache::mtf_position(uint32_t item) const {
  if (item >= slot_of_.size() || slot_of_[item] == kNil) return std::nullopt;
  std::size_t rank = 1;
  for (uint32_t s = head_; s != kNil; s = nodes_[s].next, ++rank) {
    if (nodes_[s].item == item) return rank;
  }
  return std::nullopt;
}

std::vector<uint32_t> LruCache::residents() const {
  std::vector<uint32_t> out;
  out.reserve(size_);
  for (uint32_t s = head_; s != kNil; s = nodes_[s].next) {
    out.push_back(nodes_[s].item);
  }
  return out;
}

void LruCache::clear() {
  for (uint32_t s = head_; s != kNil; s = nodes_[s].next) {
    slot_of_[nodes_[s].item] = kNil;
  }
  head_ = tail_ = kNil;
  size_ = 0;
}

}  // namespace chlru
