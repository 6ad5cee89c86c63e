#pragma once

// Level-by-level enumeration of admissible words with cylinder lengths.
// Words of each length are stored in "offset-lex" order (children of a word
// are contiguous, ordered by successor offset), which gives O(1) parent,
// suffix and child-range lookups. The transfer operator factorizes over
// parent/suffix pointers, so spectral iterations cost O(#words) per step
// with no stored transition matrix.

#include <cstdint>

#include "teich/symbolic.hpp"

namespace teich {

template <class R>
struct WordSpace {
    const MarkovSystem<R>* sys = nullptr;
    int levels = 0;

    // slot L holds data for words of L symbols (slot 0 unused)
    std::vector<std::vector<uint32_t>> parent;      // prefix index in level L-1
    std::vector<std::vector<uint32_t>> sfx;         // suffix index in level L-1
    std::vector<std::vector<uint16_t>> last;        // last symbol
    std::vector<std::vector<uint32_t>> child_start; // into level L+1, size count(L)+1
    std::vector<std::vector<double>> len;           // cylinder arc lengths

    size_t count(int L) const { return last[L].size(); }

    Word word_at(int L, uint32_t idx) const {
        Word w(L);
        uint32_t cur = idx;
        for (int l = L; l >= 1; --l) {
            w[l - 1] = last[l][cur];
            cur = parent[l][cur];
        }
        return w;
    }

    int64_t index_of(const Word& w) const {
        if (w.empty() || int(w.size()) > levels) return -1;
        const auto& s = *sys;
        int64_t idx = w[0];
        for (size_t l = 1; l < w.size(); ++l) {
            int prev = w[l - 1];
            if (!s.admissible(prev, w[l])) return -1;
            int o = (w[l] - s.img_lo[prev] + s.size()) % s.size();
            idx = child_start[int(l)][idx] + o;
        }
        return idx;
    }
};

template <class R>
WordSpace<R> build_word_space(const MarkovSystem<R>& sys, int levels) {
    WordSpace<R> ws;
    ws.sys = &sys;
    ws.levels = levels;
    ws.parent.resize(levels + 1);
    ws.sfx.resize(levels + 1);
    ws.last.resize(levels + 1);
    ws.child_start.resize(levels + 1);
    ws.len.resize(levels + 1);
    const int k = sys.size();

    for (int i = 0; i < k; ++i) {
        ws.parent[1].push_back(0);
        ws.sfx[1].push_back(0);
        ws.last[1].push_back(uint16_t(i));
        ws.len[1].push_back(to_double(sys.interval(i).length));
    }

    // lengths by stepwise chord propagation up the parent chain (innermost
    // branch first); O(L) per word but precise at every depth
    std::vector<DiskMobius<R>> inv(k);
    for (int i = 0; i < k; ++i) inv[i] = sys.branch[i].inverse();
    auto node_length = [&](int L, uint32_t parent_idx, int j) {
        ChordPair<R> c = ChordPair<R>::of_arc(sys.interval(j));
        uint32_t cur = parent_idx;
        for (int l = L - 1; l >= 1; --l) {
            c.step(inv[ws.last[l][cur]]);
            cur = ws.parent[l][cur];
        }
        return to_double(c.length());
    };

    for (int L = 2; L <= levels; ++L) {
        // child ranges of level L-1 from the row sums alone
        auto& cs = ws.child_start[L - 1];
        cs.assign(ws.count(L - 1) + 1, 0);
        for (uint32_t q = 0; q < ws.count(L - 1); ++q)
            cs[q + 1] = cs[q] + uint32_t(sys.row_sum(ws.last[L - 1][q]));

        size_t total = cs.back();
        ws.parent[L].reserve(total);
        ws.sfx[L].reserve(total);
        ws.last[L].reserve(total);
        ws.len[L].reserve(total);

        for (uint32_t q = 0; q < ws.count(L - 1); ++q) {
            int tip = ws.last[L - 1][q];
            int span = sys.row_sum(tip);
            for (int o = 0; o < span; ++o) {
                int j = (sys.img_lo[tip] + o) % k;
                ws.parent[L].push_back(q);
                ws.last[L].push_back(uint16_t(j));
                ws.len[L].push_back(node_length(L, q, j));
                if (L == 2)
                    ws.sfx[L].push_back(uint32_t(j));
                else
                    ws.sfx[L].push_back(ws.child_start[L - 2][ws.sfx[L - 1][q]] + uint32_t(o));
            }
        }
    }
    return ws;
}

} // namespace teich
