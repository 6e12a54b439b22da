// SPDX-License-Identifier: Apache-2.0

#ifndef RUINLAB_RNG_HPP
#define RUINLAB_RNG_HPP

#include <array>
#include <cstdint>

namespace ruinlab {

/// Counter-based stream (Philox 4x32-10). The variate sequence is a pure
/// function of (master seed, replication index): replications can run on any
/// worker in any order and still reproduce bit-identical draws.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t replication);

    std::uint64_t master_seed() const { return master_seed_; }
    std::uint64_t replication() const { return replication_; }

    std::uint64_t next_u64();
    /// Uniform on the open interval (0, 1); never returns 0 or 1.
    double next_uniform();
    double next_exponential(double rate);

private:
    void refill();

    std::uint64_t master_seed_ = 0;
    std::uint64_t replication_ = 0;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    int available_ = 0;
};

/// Deterministic stream factory (spec'd entry point; equivalent to the
/// constructor).
inline RngStream make_stream(std::uint64_t master_seed, std::uint64_t replication) {
    return RngStream(master_seed, replication);
}

} // namespace ruinlab

#endif
