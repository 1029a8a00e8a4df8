#pragma once

#include <array>
#include <span>
#include <vector>

#include "thief/common.hpp"
#include "thief/linalg.hpp"

namespace thief {

inline constexpr int kHoursPerDay = 24;
inline constexpr int kNumBlocks = 60;
inline constexpr int kNumAggregateBlocks = 36;

// Block lengths of the hierarchy, coarsest first. All divisors of 24.
inline constexpr std::array<int, 8> kBlockLengths = {24, 12, 8, 6, 4, 3, 2, 1};

// One delivery block: `length` consecutive hours starting at hour
// `index * length`. The hourly blocks have length 1.
struct BlockId {
    int length = 0;
    int index = 0;

    bool operator==(const BlockId&) const = default;
};

// Canonical ordering of the 60 blocks: coarsest level first (24H, 12H,
// 8H, 6H, 4H, 3H, 2H, 1H), chronological within a level. Ordinals are
// the row indices of the summing matrix.
int block_ordinal(BlockId block);
BlockId block_at(int ordinal);
bool is_valid_block(BlockId block);

// Offset of a level's first block in the canonical order.
int level_offset(int block_length);
// Number of blocks on a level (24 / length).
int level_block_count(int block_length);

// Forecasts or observations for all 60 blocks, canonical order.
using HierarchyVector = std::array<double, kNumBlocks>;

// Mean-based aggregation operator: maps 24 hourly values to all hierarchy
// levels. Row for block (L, i) holds 1/L over the block's hours. The
// bottom 24 rows are the identity.
struct SummingMatrix {
    Matrix entries;                  // rows x 24
    std::vector<BlockId> block_order;  // row labels

    std::size_t rows() const { return entries.rows(); }
};

// The fixed eight-level hierarchy over 24 hours (60 rows).
SummingMatrix build_summing_matrix();

// Generic constructor for any set of divisor levels of `hours`. Lengths
// must divide `hours`; duplicates are rejected. Level order follows the
// given list; blocks are chronological within a level.
SummingMatrix build_summing_matrix(std::span<const int> block_lengths, int hours = kHoursPerDay);

// Mean of the hours covered by `block` on one day.
double block_mean(std::span<const double, kHoursPerDay> hourly, BlockId block);

// Aggregates one day of hourly prices to all 60 blocks. Rejects
// non-finite entries. Requires the canonical summing matrix.
HierarchyVector aggregate(std::span<const double, kHoursPerDay> hourly,
                          const SummingMatrix& s);

}  // namespace thief
