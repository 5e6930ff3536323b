#pragma once

// Exterior-algebra bookkeeping: degree-k bases as sorted index subsets in
// lexicographic order, with merge-sign wedge multiplication.

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

namespace di {

using IndexSet = std::vector<int>;

inline long binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    long b = 1;
    for (int i = 0; i < k; ++i) b = b * (n - i) / (i + 1);
    return b;
}

struct ExteriorBasis {
    int n = 0;                             // rank of the underlying free module
    std::vector<std::string> labels;       // one per index, for display

    explicit ExteriorBasis(int rank, std::vector<std::string> lab = {})
        : n(rank), labels(std::move(lab)) {
        if (labels.empty())
            for (int i = 0; i < n; ++i) labels.push_back("e" + std::to_string(i + 1));
    }

    // All size-k subsets of {0..n-1}, each sorted ascending, enumerated in
    // lexicographic order.
    std::vector<IndexSet> degree(int k) const {
        std::vector<IndexSet> out;
        if (k < 0 || k > n) return out;
        IndexSet cur(static_cast<size_t>(k));
        for (int i = 0; i < k; ++i) cur[static_cast<size_t>(i)] = i;
        while (true) {
            out.push_back(cur);
            int i = k - 1;
            while (i >= 0 && cur[static_cast<size_t>(i)] == n - k + i) --i;
            if (i < 0) break;
            ++cur[static_cast<size_t>(i)];
            for (int j = i + 1; j < k; ++j)
                cur[static_cast<size_t>(j)] = cur[static_cast<size_t>(j - 1)] + 1;
        }
        return out;
    }

    size_t rank(int k) const { return static_cast<size_t>(binomial(n, k)); }

    // Position of a sorted subset within the lexicographic enumeration.
    size_t index_of(const IndexSet& S) const {
        size_t idx = 0;
        int prev = -1;
        int k = static_cast<int>(S.size());
        for (int pos = 0; pos < k; ++pos) {
            for (int v = prev + 1; v < S[static_cast<size_t>(pos)]; ++v)
                idx += static_cast<size_t>(binomial(n - 1 - v, k - 1 - pos));
            prev = S[static_cast<size_t>(pos)];
        }
        return idx;
    }

    std::string label_of(const IndexSet& S, const std::string& unit = "1") const {
        if (S.empty()) return unit;
        std::string out;
        for (size_t i = 0; i < S.size(); ++i) {
            if (i) out += "^";
            out += labels[static_cast<size_t>(S[i])];
        }
        return out;
    }
};

// Merges two sorted disjoint subsets; returns the sign of the interleaving
// permutation (+1/−1), or 0 when the subsets overlap. `merged` is filled
// with the sorted union on a nonzero return.
inline int wedge_merge(const IndexSet& a, const IndexSet& b, IndexSet& merged) {
    merged.clear();
    merged.reserve(a.size() + b.size());
    size_t i = 0, j = 0;
    int sign = 1;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) return 0;
        if (a[i] < b[j]) {
            merged.push_back(a[i++]);
        } else {
            // b[j] jumps over the remaining elements of a
            if ((a.size() - i) % 2 == 1) sign = -sign;
            merged.push_back(b[j++]);
        }
    }
    while (i < a.size()) merged.push_back(a[i++]);
    while (j < b.size()) merged.push_back(b[j++]);
    return sign;
}

// Removes the element at position `pos` of a sorted subset.
inline IndexSet subset_without(const IndexSet& S, size_t pos) {
    IndexSet out = S;
    out.erase(out.begin() + static_cast<long>(pos));
    return out;
}

}  // namespace di
