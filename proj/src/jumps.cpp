#include "otcc/jumps.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

namespace otcc::jumps {

namespace {

// Detector constants. The pyramid floor keeps coarse levels long enough for
// several maxima to coexist; shorter levels turn staircases into near-linear
// ramps whose cost has no stable maxima. Candidate significance compares a
// cell's cost against the median cost in a window around it, which adapts to
// heteroscedastic spacing (scaling vectors spread multiplicatively).
constexpr Index kPyramidFloor = 12;
constexpr double kSignificanceRatio = 8.0;
constexpr Index kMedianWindow = 10;
constexpr double kFpNoiseRel = 1e-12;

struct Run {
    Index begin, end;  // inclusive plateau [begin, end]
};

// Maximal equal-value runs of F that are local maxima: strictly above the
// differing neighbours on both sides; the whole-array plateau is excluded.
std::vector<Run> local_max_runs(const Vector& F) {
    std::vector<Run> runs;
    const Index k = F.size();
    Index i = 0;
    while (i < k) {
        Index j = i;
        while (j + 1 < k && F[j + 1] == F[i]) ++j;
        const bool whole = (i == 0 && j == k - 1);
        const bool left_ok = (i == 0) || (F[i - 1] < F[i]);
        const bool right_ok = (j == k - 1) || (F[j + 1] < F[i]);
        if (!whole && left_ok && right_ok) runs.push_back({i, j});
        i = j + 1;
    }
    return runs;
}

double window_median(const Vector& F, Index center, Index radius) {
    const Index lo = std::max<Index>(0, center - radius);
    const Index hi = std::min<Index>(F.size(), center + radius + 1);
    std::vector<double> w(F.data() + lo, F.data() + hi);
    const std::size_t mid = (w.size() - 1) / 2;
    std::nth_element(w.begin(), w.begin() + mid, w.end());
    return w[mid];
}

}  // namespace

Vector jump_cost(const Vector& v) {
    const Index k = v.size();
    if (k < 3) throw std::invalid_argument("jump_cost: length < 3");
    Vector F(k);
    F[0] = std::abs(v[1] - v[0]);
    F[k - 1] = std::abs(v[k - 1] - v[k - 2]);
    for (Index i = 1; i + 1 < k; ++i)
        F[i] = std::abs(v[i] - v[i - 1]) + std::abs(v[i + 1] - v[i]);
    return F;
}

Vector coarsen(const Vector& v) {
    const Index k = v.size();
    if (k < 2) throw std::invalid_argument("coarsen: length < 2");
    const Index half = k / 2;
    Vector out(half + (k % 2));
    for (Index i = 0; i < half; ++i) out[i] = 0.5 * (v[2 * i] + v[2 * i + 1]);
    if (k % 2) out[half] = v[k - 1];
    return out;
}

JumpList detect(const Vector& v) {
    const Index k = v.size();
    if (k < 4) throw std::invalid_argument("detect: length < 4");
    Vector w = v;
    std::sort(w.data(), w.data() + k);

    std::vector<Vector> levels;
    levels.push_back(std::move(w));
    while (true) {
        Vector next = coarsen(levels.back());
        if (next.size() < kPyramidFloor) break;
        levels.push_back(std::move(next));
    }
    const Vector& base = levels.front();

    // level-0 candidates: leftmost cell of each significant local-max plateau
    const Vector F0 = jump_cost(base);
    std::vector<Index> candidates;
    for (const Run& r : local_max_runs(F0)) {
        const double med = window_median(F0, r.begin, kMedianWindow);
        if (F0[r.begin] > kSignificanceRatio * med) candidates.push_back(r.begin);
    }

    // gate sets at coarser levels: every cell of each local-max plateau
    std::vector<std::set<Index>> gates;
    for (std::size_t s = 1; s < levels.size(); ++s) {
        std::set<Index> g;
        const Vector Fs = jump_cost(levels[s]);
        for (const Run& r : local_max_runs(Fs))
            for (Index c = r.begin; c <= r.end; ++c) g.insert(c);
        gates.push_back(std::move(g));
    }

    // a candidate survives when its ancestor cell (one cell of slack on each
    // side) is gated at every coarser level
    const double range = base[k - 1] - base[0];
    JumpList jl;
    for (Index cell : candidates) {
        bool chained = true;
        for (std::size_t s = 1; s < levels.size(); ++s) {
            const Index a = cell >> s;
            const auto& g = gates[s - 1];
            if (!g.count(a) && !g.count(a - 1) && !g.count(a + 1)) {
                chained = false;
                break;
            }
        }
        if (!chained) continue;
        const Index pos = cell + 1;
        if (pos < 1 || pos > k - 1) continue;
        if (base[pos] - base[pos - 1] <= kFpNoiseRel * range) continue;
        jl.positions.push_back(pos);
        jl.scales_confirmed.push_back(static_cast<int>(levels.size()));
    }
    return jl;
}

Partition partition_from_jumps(const SortPermutation& perm, const JumpList& jl) {
    const Index k = perm.size();
    for (Index p : jl.positions)
        if (p < 1 || p > k - 1)
            throw std::invalid_argument("partition_from_jumps: position out of range");
    Partition part;
    part.labels.assign(k, 1);
    part.g = static_cast<int>(jl.positions.size()) + 1;
    for (Index rank = 0; rank < k; ++rank) {
        int label = 1;
        for (Index p : jl.positions)
            if (p <= rank) ++label;
        part.labels[perm.order[rank]] = label;
    }
    return part;
}

}  // namespace otcc::jumps
