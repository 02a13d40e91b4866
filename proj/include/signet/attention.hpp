#pragma once

#include <cmath>
#include <vector>

#include "signet/autograd.hpp"

namespace signet::ag {

/// Observation sink for attention runs. key_visits[t] accumulates, per query
/// token t, the number of key comparisons in each attention pattern the token
/// participates in (counted once per head group, since every head of a group
/// visits the same keys). prob_row_sums collects each computed attention row's
/// total weight; keep_matrices additionally retains the full weight matrices.
template <typename T>
struct AttnProbe {
    std::vector<int64_t> key_visits;
    std::vector<double> prob_row_sums;
    bool keep_matrices = false;
    std::vector<TensorT<T>> matrices;

    void reset(int64_t num_tokens) {
        key_visits.assign(static_cast<size_t>(num_tokens), 0);
        prob_row_sums.clear();
        matrices.clear();
    }
};

/// Heads [h0, h1) attend within each listed segment. Segments hold patch token
/// indices; every patch token must appear in exactly one segment.
struct HeadGroup {
    int h0 = 0;
    int h1 = 0;
    std::vector<std::vector<int64_t>> segments;
};

/// Scaled dot-product attention over pre-projected q, k, v of shape [L x d].
/// Heads are processed per the group layout and concatenated; no output
/// projection is applied here. When attach_cls is set, token 0 is treated as a
/// classification token: it joins every segment as an extra query/key row and
/// its per-segment outputs are averaged.
template <typename T>
typename GraphT<T>::Var segment_attention(GraphT<T>& g, typename GraphT<T>::Var q,
                                          typename GraphT<T>::Var k, typename GraphT<T>::Var v,
                                          int heads, const std::vector<HeadGroup>& groups,
                                          bool attach_cls, AttnProbe<T>* probe = nullptr) {
    using Var = typename GraphT<T>::Var;
    const int64_t L = g.value(q).dim(0);
    const int64_t d = g.value(q).dim(1);
    if (heads <= 0 || d % heads != 0) {
        throw ConfigError("attention width " + std::to_string(d) + " not divisible by " +
                          std::to_string(heads) + " heads");
    }
    const int64_t dh = d / heads;
    const T scale = T(1) / std::sqrt(static_cast<T>(dh));

    std::vector<Var> head_outs(static_cast<size_t>(heads));
    for (const HeadGroup& grp : groups) {
        // Validate coverage: each patch token exactly once.
        std::vector<int64_t> seen(static_cast<size_t>(L), 0);
        for (const auto& seg : grp.segments) {
            for (int64_t t : seg) {
                if (t < 0 || t >= L) throw BoundsError("attention segment index out of range");
                seen[static_cast<size_t>(t)] += 1;
            }
        }
        for (int64_t t = attach_cls ? 1 : 0; t < L; ++t) {
            if (seen[static_cast<size_t>(t)] != 1) {
                throw ConfigError("attention segments must cover each token exactly once");
            }
        }

        for (int h = grp.h0; h < grp.h1; ++h) {
            Var qh = g.slice_cols(q, h * dh, (h + 1) * dh);
            Var kh = g.slice_cols(k, h * dh, (h + 1) * dh);
            Var vh = g.slice_cols(v, h * dh, (h + 1) * dh);

            std::vector<Var> seg_outs;
            std::vector<int64_t> perm(static_cast<size_t>(L), -1);
            std::vector<int64_t> cls_offsets;
            int64_t pool_rows = 0;
            for (const auto& seg : grp.segments) {
                std::vector<int64_t> rows;
                rows.reserve(seg.size() + 1);
                if (attach_cls) rows.push_back(0);
                rows.insert(rows.end(), seg.begin(), seg.end());

                Var qs = g.gather_rows(qh, rows);
                Var ks = g.gather_rows(kh, rows);
                Var vs = g.gather_rows(vh, rows);
                Var scores = g.scale(g.matmul(qs, g.transpose(ks)), scale);
                Var probs = g.softmax_rows(scores);
                Var os = g.matmul(probs, vs);

                if (probe != nullptr && h == grp.h0) {
                    const int64_t sz = static_cast<int64_t>(rows.size());
                    for (int64_t t : rows) probe->key_visits[static_cast<size_t>(t)] += sz;
                    const auto& pm = g.value(probs);
                    for (int64_t r = 0; r < sz; ++r) {
                        double s = 0.0;
                        for (int64_t c = 0; c < sz; ++c) s += static_cast<double>(pm.at(r, c));
                        probe->prob_row_sums.push_back(s);
                    }
                    if (probe->keep_matrices) probe->matrices.push_back(pm);
                }

                if (attach_cls) cls_offsets.push_back(pool_rows);
                for (size_t i = attach_cls ? 1 : 0; i < rows.size(); ++i) {
                    perm[static_cast<size_t>(rows[i])] = pool_rows + static_cast<int64_t>(i);
                }
                pool_rows += static_cast<int64_t>(rows.size());
                seg_outs.push_back(os);
            }

            Var pool = seg_outs.size() == 1 ? seg_outs[0] : g.concat_rows(seg_outs);
            if (attach_cls) {
                Var cls_rows = g.gather_rows(pool, cls_offsets);
                Var cls_mean = g.mean_rows(cls_rows);
                pool = g.concat_rows({pool, cls_mean});
                perm[0] = pool_rows;  // averaged row appended at the end
            }
            head_outs[static_cast<size_t>(h)] = g.gather_rows(pool, perm);
        }
    }
    for (const Var& hv : head_outs) {
        if (!hv.valid()) throw ConfigError("head groups do not cover all attention heads");
    }
    return heads == 1 ? head_outs[0] : g.concat_cols(head_outs);
}

/// Standard multi-head self-attention over a full sequence: per-head scaled
/// dot-product (scale 1/sqrt(d/heads)), heads concatenated, then output
/// projection w_out (+ optional row bias b_out).
template <typename T>
typename GraphT<T>::Var multi_head_attention(GraphT<T>& g, typename GraphT<T>::Var q,
                                             typename GraphT<T>::Var k,
                                             typename GraphT<T>::Var v, int heads,
                                             typename GraphT<T>::Var w_out,
                                             typename GraphT<T>::Var b_out = {},
                                             AttnProbe<T>* probe = nullptr) {
    const int64_t L = g.value(q).dim(0);
    std::vector<int64_t> all(static_cast<size_t>(L));
    for (int64_t i = 0; i < L; ++i) all[static_cast<size_t>(i)] = i;
    std::vector<HeadGroup> groups{HeadGroup{0, heads, {all}}};
    auto cat = segment_attention(g, q, k, v, heads, groups, false, probe);
    auto out = g.matmul(cat, w_out);
    if (b_out.valid()) out = g.add_rowbias(out, b_out);
    return out;
}

}  // namespace signet::ag
