#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace swept::detail {

/// Linear-probing hash map from uint64 keys to V. The all-ones key is
/// reserved as the empty marker. No erase.
template <typename V>
class FlatMap {
public:
    static constexpr uint64_t kEmpty = ~uint64_t{0};

    explicit FlatMap(size_t expected = 16) { rehash(capacity_for(expected)); }

    size_t size() const { return m_size; }

    V *find(uint64_t key) {
        size_t i = slot(key);
        while (true) {
            if (m_keys[i] == key) return &m_values[i];
            if (m_keys[i] == kEmpty) return nullptr;
            i = (i + 1) & m_mask;
        }
    }
    const V *find(uint64_t key) const { return const_cast<FlatMap *>(this)->find(key); }

    /// Returns the slot for `key`, default-constructing it if new.
    std::pair<V *, bool> try_emplace(uint64_t key) {
        if ((m_size + 1) * 4 > m_keys.size() * 3) rehash(m_keys.size() * 2);
        size_t i = slot(key);
        while (true) {
            if (m_keys[i] == key) return {&m_values[i], false};
            if (m_keys[i] == kEmpty) {
                m_keys[i] = key;
                m_values[i] = V{};
                ++m_size;
                return {&m_values[i], true};
            }
            i = (i + 1) & m_mask;
        }
    }

    template <typename F>
    void for_each(F &&f) const {
        for (size_t i = 0; i < m_keys.size(); ++i)
            if (m_keys[i] != kEmpty) f(m_keys[i], m_values[i]);
    }

private:
    static size_t capacity_for(size_t n) {
        size_t c = 16;
        while (c * 3 < n * 4) c <<= 1;
        return c;
    }
    static uint64_t mix(uint64_t x) {
        x ^= x >> 33;
        x *= 0xff51afd7ed558ccdULL;
        x ^= x >> 33;
        x *= 0xc4ceb9fe1a85ec53ULL;
        x ^= x >> 33;
        return x;
    }
    size_t slot(uint64_t key) const { return static_cast<size_t>(mix(key)) & m_mask; }

    void rehash(size_t cap) {
        std::vector<uint64_t> keys(cap, kEmpty);
        std::vector<V> values(cap);
        const size_t mask = cap - 1;
        for (size_t i = 0; i < m_keys.size(); ++i) {
            if (m_keys[i] == kEmpty) continue;
            size_t j = static_cast<size_t>(mix(m_keys[i])) & mask;
            while (keys[j] != kEmpty) j = (j + 1) & mask;
            keys[j] = m_keys[i];
            values[j] = std::move(m_values[i]);
        }
        m_keys = std::move(keys);
        m_values = std::move(values);
        m_mask = mask;
    }

    std::vector<uint64_t> m_keys;
    std::vector<V> m_values;
    size_t m_mask = 0;
    size_t m_size = 0;
};

} // namespace swept::detail
