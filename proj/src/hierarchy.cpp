#include "thief/hierarchy.hpp"

#include <algorithm>
#include <cmath>

#include "thief/kernels.hpp"

namespace thief {

namespace {

// Cumulative block counts for the canonical level order.
constexpr std::array<int, 9> level_offsets() {
    std::array<int, 9> off{};
    int acc = 0;
    for (std::size_t i = 0; i < kBlockLengths.size(); ++i) {
        off[i] = acc;
        acc += kHoursPerDay / kBlockLengths[i];
    }
    off[8] = acc;
    return off;
}

constexpr std::array<int, 9> kLevelOffsets = level_offsets();

int level_position(int block_length) {
    for (std::size_t i = 0; i < kBlockLengths.size(); ++i)
        if (kBlockLengths[i] == block_length) return static_cast<int>(i);
    return -1;
}

}  // namespace

bool is_valid_block(BlockId block) {
    const int pos = level_position(block.length);
    if (pos < 0) return false;
    return block.index >= 0 && block.index < kHoursPerDay / block.length;
}

int level_offset(int block_length) {
    const int pos = level_position(block_length);
    if (pos < 0) throw ValidationError(cat("unknown block length ", block_length, "H"));
    return kLevelOffsets[pos];
}

int level_block_count(int block_length) {
    const int pos = level_position(block_length);
    if (pos < 0) throw ValidationError(cat("unknown block length ", block_length, "H"));
    return kHoursPerDay / block_length;
}

int block_ordinal(BlockId block) {
    if (!is_valid_block(block))
        throw ValidationError(cat("invalid block (", block.length, "H, index ", block.index, ")"));
    return level_offset(block.length) + block.index;
}

BlockId block_at(int ordinal) {
    if (ordinal < 0 || ordinal >= kNumBlocks)
        throw ValidationError(cat("block ordinal ", ordinal, " out of range [0, 60)"));
    for (std::size_t i = 0; i < kBlockLengths.size(); ++i) {
        if (ordinal < kLevelOffsets[i + 1])
            return BlockId{kBlockLengths[i], ordinal - kLevelOffsets[i]};
    }
    return BlockId{};  // unreachable
}

SummingMatrix build_summing_matrix(std::span<const int> block_lengths, int hours) {
    std::size_t rows = 0;
    for (const int len : block_lengths) {
        if (len <= 0 || hours % len != 0)
            throw ValidationError(cat("block length ", len, " does not divide ", hours));
        if (std::count(block_lengths.begin(), block_lengths.end(), len) != 1)
            throw ValidationError(cat("duplicate block length ", len));
        rows += static_cast<std::size_t>(hours / len);
    }
    SummingMatrix s;
    s.entries = Matrix(rows, hours);
    s.block_order.reserve(rows);
    std::size_t r = 0;
    for (const int len : block_lengths) {
        const int count = hours / len;
        const double w = 1.0 / len;
        for (int i = 0; i < count; ++i, ++r) {
            for (int h = i * len; h < (i + 1) * len; ++h) s.entries(r, h) = w;
            s.block_order.push_back(BlockId{len, i});
        }
    }
    return s;
}

SummingMatrix build_summing_matrix() {
    return build_summing_matrix(std::span<const int>(kBlockLengths), kHoursPerDay);
}

double block_mean(std::span<const double, kHoursPerDay> hourly, BlockId block) {
    if (!is_valid_block(block))
        throw ValidationError(cat("invalid block (", block.length, "H, index ", block.index, ")"));
    double acc = 0.0;
    const int start = block.index * block.length;
    for (int h = start; h < start + block.length; ++h) acc += hourly[h];
    return acc / block.length;
}

HierarchyVector aggregate(std::span<const double, kHoursPerDay> hourly,
                          const SummingMatrix& s) {
    if (s.rows() != kNumBlocks || s.entries.cols() != kHoursPerDay)
        throw ValidationError("aggregate: expected the canonical 60x24 summing matrix");
    for (int h = 0; h < kHoursPerDay; ++h)
        if (!std::isfinite(hourly[h]))
            throw ValidationError(cat("aggregate: non-finite price at hour ", h + 1));
    HierarchyVector out{};
    kernels::matvec(s.entries.data(), kNumBlocks, kHoursPerDay, hourly.data(), out.data());
    return out;
}

}  // namespace thief
