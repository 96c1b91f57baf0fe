// polymer.hpp — one-dimensional polymer gas: partition functions by brute
// force, truncated cluster weights, Kotecky-Preiss checks, pressure and
// finite-size corrections

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <unordered_map>
#include <vector>

#include "sbl/errors.hpp"

namespace sbl::polymer {

using Complex = std::complex<double>;
using Subset = std::uint64_t; // bit (tau-1) set iff tau in A, tau = 1..64

inline int subset_size(Subset a) { return __builtin_popcountll(a); }

inline int subset_min(Subset a) { return __builtin_ctzll(a) + 1; }

inline int subset_max(Subset a) { return 64 - __builtin_clzll(a); }

inline int diameter(Subset a) { return a ? subset_max(a) - subset_min(a) + 1 : 0; }

inline Subset translate(Subset a, int shift) {
    return shift >= 0 ? (a << shift) : (a >> -shift);
}

// dist(A, B) <= gap
inline bool adjacent(Subset a, Subset b, int gap) {
    Subset s = a;
    for (int g = 1; g <= gap; ++g) s |= (a << g) | (a >> g);
    return (s & b) != 0;
}

struct PolymerSystem {
    int n = 0;
    int adjacency_gap = 1;
    std::map<Subset, Complex> weight;

    Complex w(Subset a) const {
        auto it = weight.find(a);
        return it == weight.end() ? Complex(0.0, 0.0) : it->second;
    }

    std::vector<Subset> support() const {
        std::vector<Subset> out;
        for (const auto& [a, v] : weight)
            if (v != Complex(0.0, 0.0)) out.push_back(a);
        return out;
    }
};

// --------------------------- brute-force partition ----------------------------

namespace detail {

// maximal chains of occupied sites with successive gaps <= gap
inline std::vector<Subset> gap_runs(Subset s, int n, int gap) {
    std::vector<Subset> runs;
    Subset cur = 0;
    int prev = -1000;
    for (int tau = 1; tau <= n; ++tau) {
        if (!(s >> (tau - 1) & 1)) continue;
        if (tau - prev > gap && cur) {
            runs.push_back(cur);
            cur = 0;
        }
        cur |= Subset(1) << (tau - 1);
        prev = tau;
    }
    if (cur) runs.push_back(cur);
    return runs;
}

template <typename Fn>
void for_each_set_partition(int m, std::vector<int>& label, int pos, int blocks, Fn&& fn) {
    if (pos == m) {
        fn(label, blocks);
        return;
    }
    for (int b = 0; b <= blocks; ++b) {
        label[static_cast<std::size_t>(pos)] = b;
        for_each_set_partition(m, label, pos + 1, std::max(blocks, b + 1), fn);
    }
}

} // namespace detail

// Upsilon_n = sum over collections of pairwise non-adjacent subsets of the
// weight products; the empty collection contributes 1. Exact: every valid
// collection is a choice of occupied sites plus a grouping of its gap-runs.
inline Complex brute_force_partition(const PolymerSystem& sys) {
    if (sys.n > 12) throw HorizonTooLarge("brute_force_partition: n > 12");
    const int gap = sys.adjacency_gap;
    Complex total = 1.0; // empty collection
    for (Subset s = 1; s < (Subset(1) << sys.n); ++s) {
        const auto runs = detail::gap_runs(s, sys.n, gap);
        const int m = static_cast<int>(runs.size());
        std::vector<int> label(static_cast<std::size_t>(m));
        Complex acc = 0.0;
        detail::for_each_set_partition(m, label, 0, 0, [&](const std::vector<int>& lab, int blocks) {
            Complex prod = 1.0;
            for (int b = 0; b < blocks && prod != Complex(0.0, 0.0); ++b) {
                Subset u = 0;
                for (int i = 0; i < m; ++i)
                    if (lab[static_cast<std::size_t>(i)] == b) u |= runs[static_cast<std::size_t>(i)];
                prod *= sys.w(u);
            }
            acc += prod;
        });
        total += acc;
    }
    return total;
}

// ----------------------------- truncated weights ------------------------------

namespace detail {

// sum over connected spanning edge-subsets of (-1)^{#edges}, for the graph
// whose adjacency is given per-vertex as a bitmask; cached by (size, adjacency
// signature) since the value depends only on the graph
inline std::int64_t connected_alternating_sum(const std::vector<std::uint32_t>& adj) {
    const int m = static_cast<int>(adj.size());
    std::uint64_t key = static_cast<std::uint64_t>(m);
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            key = (key << 1) | ((adj[static_cast<std::size_t>(i)] >> j) & 1u);
    static std::unordered_map<std::uint64_t, std::int64_t> cache;
    if (auto it = cache.find(key); it != cache.end()) return it->second;

    const std::uint32_t full = (m == 32) ? ~0u : ((1u << m) - 1u);
    // A(mask) = 1 iff the induced subgraph has no edges
    auto edgeless = [&](std::uint32_t mask) -> std::int64_t {
        for (int i = 0; i < m; ++i)
            if ((mask >> i & 1) && (adj[static_cast<std::size_t>(i)] & mask)) return 0;
        return 1;
    };
    std::vector<std::int64_t> c(full + 1u, 0);
    // iterate masks in increasing popcount-compatible order (numeric order works:
    // every proper submask of x is < x)
    for (std::uint32_t mask = 1; mask <= full; ++mask) {
        const std::uint32_t low = mask & (~mask + 1u);
        if (!(mask & low)) continue;
        std::int64_t val = edgeless(mask);
        // subtract C(T) * A(mask \ T) over proper submasks T containing the low bit
        const std::uint32_t rest = mask ^ low;
        for (std::uint32_t sub = rest;; sub = (sub - 1) & rest) {
            const std::uint32_t t = sub | low;
            if (t != mask) val -= c[t] * edgeless(mask ^ t);
            if (sub == 0) break;
        }
        c[mask] = val;
    }
    const std::int64_t out = c[full];
    cache.emplace(key, out);
    return out;
}

} // namespace detail

// w^T of a member multiset (repeats allowed, treated as labeled vertices):
//   sum over connected graphs of (-1)^{#edges} * 1[edges adjacent] * prod w(A).
// The multiset symmetry factor 1/prod(mult!) is applied by the enumerations
// below, not here.
inline Complex truncated_weight(const PolymerSystem& sys, const std::vector<Subset>& members) {
    const int m = static_cast<int>(members.size());
    if (m == 0) return 0.0;
    // 11 is the largest size whose adjacency signature fits the 64-bit cache key
    if (m > 11) throw ClusterTooLarge("truncated_weight: more than 11 members");
    std::vector<std::uint32_t> adj(static_cast<std::size_t>(m), 0);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            if (i != j && adjacent(members[static_cast<std::size_t>(i)],
                                   members[static_cast<std::size_t>(j)], sys.adjacency_gap))
                adj[static_cast<std::size_t>(i)] |= 1u << j;
    const std::int64_t c = detail::connected_alternating_sum(adj);
    if (c == 0) return 0.0;
    Complex prod = 1.0;
    for (const Subset& a : members) prod *= sys.w(a);
    return static_cast<double>(c) * prod;
}

// ----------------------------- Kotecky-Preiss ---------------------------------

struct KpReport {
    bool satisfied = false;
    double worst_ratio = 0.0;
    Subset witness = 0;
};

// For every A' with nonzero weight: sum_{A ~ A'} |w(A)| e^{a(A)} <= a(A').
// A polymer is adjacent to itself (dist 0), so the sum includes A = A'.
inline KpReport check_kotecky_preiss(const PolymerSystem& sys,
                                     const std::function<double(Subset)>& a_fn) {
    KpReport rep;
    rep.satisfied = true;
    const auto supp = sys.support();
    for (const Subset& ap : supp) {
        double lhs = 0.0;
        for (const Subset& a : supp)
            if (adjacent(a, ap, sys.adjacency_gap))
                lhs += std::abs(sys.w(a)) * std::exp(a_fn(a));
        const double ratio = lhs / a_fn(ap);
        if (ratio > rep.worst_ratio) {
            rep.worst_ratio = ratio;
            rep.witness = ap;
        }
    }
    rep.satisfied = rep.worst_ratio <= 1.0;
    return rep;
}

inline double default_kp_size(Subset a) { return static_cast<double>(subset_size(a)); }

// --------------------------- cluster enumeration ------------------------------

struct ClusterSum {
    Complex value{0.0, 0.0};
    double truncation_bound = 0.0;
};

namespace detail {

// enumerate multisets (nondecreasing index sequences) from `polys` up to
// size_cap; fn(members, symmetry) with symmetry = 1/prod(mult!)
template <typename Filter, typename Fn>
void for_each_multiset(const std::vector<Subset>& polys, int size_cap, Filter&& accept,
                       Fn&& fn) {
    const int np = static_cast<int>(polys.size());
    std::vector<Subset> members;
    std::vector<int> idx;
    std::function<void(int)> rec = [&](int start) {
        if (!members.empty() && accept(members)) {
            double sym = 1.0;
            int runlen = 1;
            for (std::size_t i = 1; i <= idx.size(); ++i) {
                if (i < idx.size() && idx[i] == idx[i - 1]) {
                    ++runlen;
                    sym *= runlen;
                } else {
                    runlen = 1;
                }
            }
            fn(members, 1.0 / sym);
        }
        if (static_cast<int>(members.size()) == size_cap) return;
        for (int p = start; p < np; ++p) {
            members.push_back(polys[static_cast<std::size_t>(p)]);
            idx.push_back(p);
            rec(p);
            members.pop_back();
            idx.pop_back();
        }
    };
    rec(0);
    (void)np;
}

inline bool members_connected(const std::vector<Subset>& members, int gap) {
    const int m = static_cast<int>(members.size());
    if (m <= 1) return true;
    std::uint32_t visited = 1, frontier = 1;
    while (frontier) {
        std::uint32_t next = 0;
        for (int i = 0; i < m; ++i) {
            if (!(frontier >> i & 1)) continue;
            for (int j = 0; j < m; ++j)
                if (!(visited >> j & 1) &&
                    adjacent(members[static_cast<std::size_t>(i)],
                             members[static_cast<std::size_t>(j)], gap))
                    next |= 1u << j;
        }
        visited |= next;
        frontier = next;
    }
    return visited == (m == 32 ? ~0u : (1u << m) - 1u);
}

// geometric tail estimate for the cluster series beyond size_cap, from the
// Kotecky-Preiss data with a(A) = |A|
inline double kp_tail_bound(const PolymerSystem& sys, int size_cap) {
    KpReport kp = check_kotecky_preiss(sys, default_kp_size);
    double s1 = 0.0;
    for (const Subset& a : sys.support())
        s1 += std::abs(sys.w(a)) * std::exp(default_kp_size(a));
    if (!(kp.worst_ratio < 1.0)) return std::numeric_limits<double>::infinity();
    return s1 * std::pow(kp.worst_ratio, size_cap) / (1.0 - kp.worst_ratio);
}

} // namespace detail

// log Upsilon_n = sum over clusters (multisets of nonzero-weight subsets,
// connected under adjacency) of w^T / prod(mult!), capped at cluster_size_cap.
inline ClusterSum cluster_log_partition(const PolymerSystem& sys, int cluster_size_cap) {
    const auto polys = sys.support();
    if (polys.size() > 64)
        throw HorizonTooLarge("cluster_log_partition: more than 64 distinct polymers");
    ClusterSum out;
    detail::for_each_multiset(
        polys, cluster_size_cap,
        [&](const std::vector<Subset>& ms) {
            return detail::members_connected(ms, sys.adjacency_gap);
        },
        [&](const std::vector<Subset>& ms, double sym) {
            out.value += sym * truncated_weight(sys, ms);
        });
    out.truncation_bound = detail::kp_tail_bound(sys, cluster_size_cap);
    return out;
}

// ------------------------ translation-invariant families ----------------------

// Weights given on canonical shapes (min element 1); w(A) extends by
// translation. Cluster sums anchored at min supp = 1 within a diameter window.
struct WeightFamily {
    std::map<Subset, Complex> shapes; // canonical: bit 0 set
    int adjacency_gap = 1;

    PolymerSystem instantiate(int window) const {
        PolymerSystem sys;
        sys.n = window;
        sys.adjacency_gap = adjacency_gap;
        const Subset limit = (window >= 64) ? ~Subset(0) : ((Subset(1) << window) - 1);
        for (const auto& [shape, v] : shapes) {
            if (v == Complex(0.0, 0.0)) continue;
            for (int shift = 0;; ++shift) {
                const Subset a = translate(shape, shift);
                if ((a & ~limit) || a < shape) break;
                sys.weight[a] = v;
            }
        }
        return sys;
    }
};

struct PressureResult {
    Complex value{0.0, 0.0};
    double tail_bound = 0.0;
};

// p = sum over clusters with min supp = 1 of w^T, capped in size and diameter.
inline PressureResult pressure(const WeightFamily& family, int cluster_size_cap,
                               int diameter_cap) {
    PolymerSystem sys = family.instantiate(diameter_cap);
    const auto polys = sys.support();
    PressureResult out;
    detail::for_each_multiset(
        polys, cluster_size_cap,
        [&](const std::vector<Subset>& ms) {
            Subset supp = 0;
            for (Subset a : ms) supp |= a;
            if (!(supp & 1)) return false; // min supp must be 1
            return detail::members_connected(ms, sys.adjacency_gap);
        },
        [&](const std::vector<Subset>& ms, double sym) {
            out.value += sym * truncated_weight(sys, ms);
        });
    out.tail_bound = detail::kp_tail_bound(sys, cluster_size_cap);
    return out;
}

// p - n^{-1} log Upsilon_n: anchored clusters weighted by
// (n - max(n+1-d, 0))/n, i.e. (d-1)/n for d <= n+1 and 1 beyond.
inline Complex finite_size_correction(const WeightFamily& family, int n,
                                      int cluster_size_cap, int diameter_cap) {
    PolymerSystem sys = family.instantiate(diameter_cap);
    const auto polys = sys.support();
    Complex out = 0.0;
    detail::for_each_multiset(
        polys, cluster_size_cap,
        [&](const std::vector<Subset>& ms) {
            Subset supp = 0;
            for (Subset a : ms) supp |= a;
            if (!(supp & 1)) return false;
            return detail::members_connected(ms, sys.adjacency_gap);
        },
        [&](const std::vector<Subset>& ms, double sym) {
            Subset supp = 0;
            for (Subset a : ms) supp |= a;
            const int d = diameter(supp);
            const double plus = std::max(n + 1 - d, 0);
            out += sym * truncated_weight(sys, ms) * ((n - plus) / n);
        });
    return out;
}

} // namespace sbl::polymer
