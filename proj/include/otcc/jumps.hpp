#pragma once

#include "otcc/core.hpp"

namespace otcc::jumps {

/// Detected steps in a sorted vector. A jump at position p (1-based cut)
/// separates sorted ranks < p from ranks >= p (0-based). Cluster count is
/// positions.size() + 1.
struct JumpList {
    std::vector<Index> positions;          ///< strictly increasing, in [1, k-1]
    std::vector<int> scales_confirmed;     ///< levels in each jump's chain
    Index cluster_count() const { return static_cast<Index>(positions.size()) + 1; }
};

/// Cluster label per original index, labels in {1..g}, rank-monotone in the
/// sorted order their scaling values induce.
struct Partition {
    std::vector<int> labels;
    int g = 1;
};

/// F[i] = |v[i]-v[i-1]| + |v[i+1]-v[i]| for interior cells; boundary cells
/// use the single available difference. Requires non-decreasing v, length >= 3.
Vector jump_cost(const Vector& v);

/// Pairwise averages; an odd tail element is carried through unaveraged.
Vector coarsen(const Vector& v);

/// Multiscale step detection on the ascending sort of v. Length >= 4.
JumpList detect(const Vector& v);

/// Labels original indices by which inter-jump band their sorted rank lies in.
Partition partition_from_jumps(const SortPermutation& perm, const JumpList& jl);

}  // namespace otcc::jumps
