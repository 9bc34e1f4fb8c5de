#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "qnc/network.hpp"

namespace qnc {

/// Per-edge uniform quantizers over [-q_max, q_max] with floor(2^(L*C_e))
/// cells and midpoint reconstruction.
///
/// Inputs outside the range are clipped. A value on a cell boundary belongs
/// to the upper cell, except +q_max which falls in the top cell.
class QuantizerSpec {
public:
    /// Largest L*C_e supported; beyond this the step is below double resolution at q_max ~ 10.
    static constexpr int kMaxBitsPerBlock = 52;

    QuantizerSpec(const Deployment& d, int block_length, double q_max);
    /// Single quantizer with the given resolution, as used at a PF source node.
    QuantizerSpec(std::vector<int> bits_per_block, int block_length, double q_max);

    int block_length() const { return block_length_; }
    double q_max() const { return q_max_; }
    int num_quantizers() const { return static_cast<int>(steps_.size()); }

    double step(EdgeId e) const { return steps_[static_cast<std::size_t>(e)]; }
    std::uint64_t levels(EdgeId e) const { return levels_[static_cast<std::size_t>(e)]; }
    /// Delta_Q = [Delta_e : e in E].
    Eigen::VectorXd steps() const;

    double quantize(EdgeId e, double value) const;

private:
    int block_length_;
    double q_max_;
    std::vector<std::uint64_t> levels_;
    std::vector<double> steps_;
};

/// Step of a uniform quantizer with floor(2^bits) cells over [-q_max, q_max].
double quantizer_step(int bits, double q_max);

}  // namespace qnc
