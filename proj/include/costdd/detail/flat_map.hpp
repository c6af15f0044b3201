#pragma once

#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <memory>
#include <new>
#include <utility>
#include <vector>

#ifdef __linux__
#include <sys/mman.h>
#endif

namespace costdd::detail {

inline std::uint64_t mix64(std::uint64_t x) noexcept {
    // splitmix64 finalizer
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

inline std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) noexcept {
    return mix64(a * 0x9e3779b97f4a7c15ULL + b);
}

/// Two-word key used by every memo table in the library.
struct Key2 {
    std::uint64_t a;
    std::uint64_t b;
    friend bool operator==(const Key2&, const Key2&) = default;
};

/// Open-addressing hash map with linear probing for trivially copyable
/// Key2 keys. `a == ~0` marks an empty slot, so callers must never insert
/// that value. No erase; grows by doubling at 70% load.
template <class Value>
class FlatMap {
public:
    static constexpr std::uint64_t kEmpty = ~std::uint64_t{0};

    FlatMap() { rehash(16); }

    std::size_t size() const noexcept { return size_; }
    std::size_t capacity() const noexcept { return slots_.size(); }

    const Value* find(const Key2& k) const noexcept {
        std::size_t mask = slots_.size() - 1;
        for (std::size_t i = hash_combine(k.a, k.b) & mask;; i = (i + 1) & mask) {
            const Slot& s = slots_[i];
            if (s.key.a == kEmpty) return nullptr;
            if (s.key == k) return &s.value;
        }
    }

    /// Inserts or overwrites.
    void insert(const Key2& k, const Value& v) {
        if ((size_ + 1) * 10 > slots_.size() * 7) rehash(slots_.size() * 2);
        std::size_t mask = slots_.size() - 1;
        for (std::size_t i = hash_combine(k.a, k.b) & mask;; i = (i + 1) & mask) {
            Slot& s = slots_[i];
            if (s.key.a == kEmpty) {
                s.key = k;
                s.value = v;
                ++size_;
                return;
            }
            if (s.key == k) {
                s.value = v;
                return;
            }
        }
    }

    void clear() {
        slots_.clear();
        size_ = 0;
        rehash(16);
    }

private:
    struct Slot {
        Key2 key{kEmpty, 0};
        Value value{};
    };

    void rehash(std::size_t cap) {
        std::vector<Slot> old = std::move(slots_);
        slots_.assign(cap, Slot{});
        size_ = 0;
        for (const Slot& s : old)
            if (s.key.a != kEmpty) insert(s.key, s.value);
    }

    std::vector<Slot> slots_;
    std::size_t size_ = 0;
};

/// (node, bound) -> node table for the flat backtracking memo. That memo
/// can hold tens of millions of entries, so slots are 16 bytes: node ids
/// are stored in 32 bits and insert refuses larger ones.
class BoundMemo {
public:
    static constexpr std::uint32_t kEmpty = ~std::uint32_t{0};

    BoundMemo() { rehash(16); }

    std::size_t size() const noexcept { return size_; }

    const std::uint32_t* find(std::uint64_t node, std::int64_t bound) const noexcept {
        if (node >= kEmpty) return nullptr;
        const std::size_t mask = cap_ - 1;
        for (std::size_t i = slot_of(node, bound) & mask;; i = (i + 1) & mask) {
            const Slot& s = slots_[i];
            if (s.node == kEmpty) return nullptr;
            if (s.node == node && s.bound == bound) return &s.result;
        }
    }

    /// Returns false, storing nothing, when an id does not fit in 32 bits.
    bool insert(std::uint64_t node, std::int64_t bound, std::uint64_t result) {
        if (node >= kEmpty || result >= kEmpty) return false;
        if ((size_ + 1) * 10 > cap_ * 7) rehash(cap_ * 2);
        place(static_cast<std::uint32_t>(node), bound, static_cast<std::uint32_t>(result));
        return true;
    }

    void clear() {
        slots_.reset();
        cap_ = 0;
        size_ = 0;
        rehash(16);
    }

private:
    struct Slot {
        std::int64_t bound = 0;
        std::uint32_t node = kEmpty;
        std::uint32_t result = 0;
    };
    static_assert(sizeof(Slot) == 16);

    static std::uint64_t slot_of(std::uint64_t node, std::int64_t bound) noexcept {
        return hash_combine(node, static_cast<std::uint64_t>(bound));
    }

    void place(std::uint32_t node, std::int64_t bound, std::uint32_t result) {
        const std::size_t mask = cap_ - 1;
        for (std::size_t i = slot_of(node, bound) & mask;; i = (i + 1) & mask) {
            Slot& s = slots_[i];
            if (s.node == kEmpty) {
                s = {bound, node, result};
                ++size_;
                return;
            }
            if (s.node == node && s.bound == bound) {
                s.result = result;
                return;
            }
        }
    }

    struct Free {
        void operator()(Slot* p) const noexcept { std::free(p); }
    };
    using Table = std::unique_ptr<Slot[], Free>;

    // Big tables are probed at random, so ask for huge pages to keep TLB
    // misses down.
    static Table allocate(std::size_t cap) {
        constexpr std::size_t kHuge = std::size_t{2} << 20;
        const std::size_t bytes = cap * sizeof(Slot);
        void* p = nullptr;
        if (bytes >= kHuge) {
            p = std::aligned_alloc(kHuge, bytes);
#ifdef __linux__
            if (p) ::madvise(p, bytes, MADV_HUGEPAGE);
#endif
        } else {
            p = std::malloc(bytes);
        }
        if (!p) throw std::bad_alloc();
        Slot* slots = static_cast<Slot*>(p);
        std::uninitialized_fill_n(slots, cap, Slot{});
        return Table(slots);
    }

    void rehash(std::size_t cap) {
        Table old = std::move(slots_);
        const std::size_t old_cap = cap_;
        slots_ = allocate(cap);
        cap_ = cap;
        size_ = 0;
        for (std::size_t i = 0; i < old_cap; ++i)
            if (old[i].node != kEmpty) place(old[i].node, old[i].bound, old[i].result);
    }

    Table slots_;
    std::size_t cap_ = 0;
    std::size_t size_ = 0;
};

} // namespace costdd::detail
