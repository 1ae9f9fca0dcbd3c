#pragma once

// Inversion statistics of permutations and the bijection between a
// permutation and its inversion profile (I_<2, ..., I_<n).

#include <algorithm>
#include <bit>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace invstat {

// A permutation of [n] stored as the sequence sigma_1..sigma_n (1-based values).
struct Permutation {
    std::vector<std::uint32_t> seq;

    std::size_t size() const { return seq.size(); }

    bool is_valid() const {
        std::vector<bool> seen(seq.size(), false);
        for (auto v : seq) {
            if (v < 1 || v > seq.size() || seen[v - 1]) return false;
            seen[v - 1] = true;
        }
        return true;
    }

    static Permutation identity(std::size_t n) {
        Permutation p;
        p.seq.resize(n);
        for (std::size_t i = 0; i < n; ++i) p.seq[i] = static_cast<std::uint32_t>(i + 1);
        return p;
    }

    static Permutation reversal(std::size_t n) {
        Permutation p;
        p.seq.resize(n);
        for (std::size_t i = 0; i < n; ++i) p.seq[i] = static_cast<std::uint32_t>(n - i);
        return p;
    }

    bool operator==(const Permutation&) const = default;
};

// I_<j for j = 2..n plus the total.
struct InversionProfile {
    std::vector<std::uint32_t> by_j;  // by_j[j-2] = I_<j, j = 2..n
    std::uint64_t total = 0;

    std::size_t n() const { return by_j.size() + 1; }

    bool bounds_ok() const {
        for (std::size_t idx = 0; idx < by_j.size(); ++idx)
            if (by_j[idx] > idx + 1) return false;  // I_<j <= j-1, j = idx+2
        return true;
    }
};

namespace detail {

// Fenwick tree over positions 1..n with an O(log n) k-th one query.
class FenwickTree {
  public:
    explicit FenwickTree(std::size_t n) : n_(n), tree_(n + 1, 0) {
        log2_ = n_ == 0 ? 0 : std::bit_width(n_) - 1;
    }

    void add(std::size_t pos, std::int32_t delta) {
        for (std::size_t i = pos; i <= n_; i += i & (~i + 1)) tree_[i] += delta;
    }

    std::int64_t prefix(std::size_t pos) const {
        std::int64_t s = 0;
        for (std::size_t i = pos; i > 0; i -= i & (~i + 1)) s += tree_[i];
        return s;
    }

    // smallest pos with prefix(pos) >= k (k >= 1); requires such pos to exist
    std::size_t kth(std::int64_t k) const {
        std::size_t pos = 0;
        for (std::size_t step = std::size_t(1) << log2_; step > 0; step >>= 1) {
            const std::size_t next = pos + step;
            if (next <= n_ && tree_[next] < k) {
                pos = next;
                k -= tree_[next];
            }
        }
        return pos + 1;
    }

  private:
    std::size_t n_;
    std::size_t log2_;
    std::vector<std::int64_t> tree_;
};

}  // namespace detail

// Merge-count, O(n log n).  Counts pairs of positions out of order.
inline std::uint64_t count_inversions(const Permutation& perm) {
    const std::size_t n = perm.size();
    if (n < 2) return 0;
    std::vector<std::uint32_t> a(perm.seq), buf(n);
    std::uint64_t count = 0;
    for (std::size_t width = 1; width < n; width *= 2) {
        for (std::size_t lo = 0; lo + width < n; lo += 2 * width) {
            const std::size_t mid = lo + width;
            const std::size_t hi = std::min(lo + 2 * width, n);
            std::size_t i = lo, j = mid, k = lo;
            while (i < mid && j < hi) {
                if (a[j] < a[i]) {
                    count += mid - i;
                    buf[k++] = a[j++];
                } else {
                    buf[k++] = a[i++];
                }
            }
            while (i < mid) buf[k++] = a[i++];
            while (j < hi) buf[k++] = a[j++];
            std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo),
                      buf.begin() + static_cast<std::ptrdiff_t>(hi),
                      a.begin() + static_cast<std::ptrdiff_t>(lo));
        }
    }
    return count;
}

// Per-value inversion counts: by_j[j-2] = #{ i < j : position(i) > position(j) }.
// Order-statistic accumulation over positions, O(n log n).
inline InversionProfile profile(const Permutation& perm) {
    const std::size_t n = perm.size();
    InversionProfile pr;
    if (n < 1) return pr;
    std::vector<std::uint32_t> pos(n + 1);
    for (std::size_t i = 0; i < n; ++i) pos[perm.seq[i]] = static_cast<std::uint32_t>(i + 1);

    detail::FenwickTree occupied(n);
    pr.by_j.resize(n - 1);
    occupied.add(pos[1], 1);
    for (std::size_t j = 2; j <= n; ++j) {
        // smaller values inserted so far: j-1; those at positions <= pos[j]
        // are not inversions with j
        const std::int64_t before = occupied.prefix(pos[j]);
        const auto inv = static_cast<std::uint32_t>(static_cast<std::int64_t>(j - 1) - before);
        pr.by_j[j - 2] = inv;
        pr.total += inv;
        occupied.add(pos[j], 1);
    }
    return pr;
}

// Inverse of profile(): the unique permutation whose insertion positions
// reproduce the given profile.  Value j ends up in the (j - I_<j)-th free
// slot from the left, scanning values from n down to 1.
inline Permutation permutation_from_profile(const InversionProfile& pr) {
    const std::size_t n = pr.n();
    if (!pr.bounds_ok())
        throw std::invalid_argument("permutation_from_profile: profile exceeds bounds");
    Permutation perm;
    perm.seq.assign(n, 0);
    detail::FenwickTree free_slots(n);
    for (std::size_t i = 1; i <= n; ++i) free_slots.add(i, 1);
    for (std::size_t j = n; j >= 1; --j) {
        const std::uint32_t inv = j >= 2 ? pr.by_j[j - 2] : 0;
        const std::size_t slot = free_slots.kth(static_cast<std::int64_t>(j - inv));
        perm.seq[slot - 1] = static_cast<std::uint32_t>(j);
        free_slots.add(slot, -1);
    }
    return perm;
}

}  // namespace invstat
