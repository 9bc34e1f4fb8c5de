#include "qnc/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qnc/error.hpp"

namespace qnc {

namespace {

std::uint64_t level_count(int bits) {
    if (bits < 1 || bits > QuantizerSpec::kMaxBitsPerBlock)
        throw InvalidParameters("bits per block L*C_e must lie in [1, " +
                                std::to_string(QuantizerSpec::kMaxBitsPerBlock) + "], got " +
                                std::to_string(bits));
    return std::uint64_t{1} << bits;
}

}  // namespace

double quantizer_step(int bits, double q_max) {
    return 2.0 * q_max / static_cast<double>(level_count(bits));
}

QuantizerSpec::QuantizerSpec(std::vector<int> bits_per_block, int block_length, double q_max)
    : block_length_(block_length), q_max_(q_max) {
    if (block_length < 1) throw InvalidParameters("block length must be at least 1");
    if (!(q_max > 0.0)) throw InvalidParameters("q_max must be positive");
    levels_.reserve(bits_per_block.size());
    steps_.reserve(bits_per_block.size());
    for (int bits : bits_per_block) {
        levels_.push_back(level_count(bits));
        steps_.push_back(2.0 * q_max / static_cast<double>(levels_.back()));
    }
}

namespace {

std::vector<int> edge_bits(const Deployment& d, int block_length) {
    std::vector<int> bits;
    bits.reserve(d.edges().size());
    for (const Edge& e : d.edges()) bits.push_back(block_length * e.capacity);
    return bits;
}

}  // namespace

QuantizerSpec::QuantizerSpec(const Deployment& d, int block_length, double q_max)
    : QuantizerSpec(edge_bits(d, block_length), block_length, q_max) {}

Eigen::VectorXd QuantizerSpec::steps() const {
    return Eigen::Map<const Eigen::VectorXd>(steps_.data(), static_cast<Eigen::Index>(steps_.size()));
}

double QuantizerSpec::quantize(EdgeId e, double value) const {
    const auto i = static_cast<std::size_t>(e);
    const double delta = steps_[i];
    const double top = static_cast<double>(levels_[i] - 1);
    double cell = std::floor((std::clamp(value, -q_max_, q_max_) + q_max_) / delta);
    cell = std::clamp(cell, 0.0, top);
    return -q_max_ + (cell + 0.5) * delta;
}

}  // namespace qnc
