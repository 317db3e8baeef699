#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <span>
#include <tuple>
#include <vector>

#include "dgmd/core/vec3.hpp"

namespace dgmd {

/// Particle record exchanged between ranks.
struct GhostRecord {
    std::uint64_t global_id = 0;
    std::uint64_t molecule = 0;
    std::uint32_t species = 0;
    Vec3 q{};
    Vec3 q_trial{};
    Vec3 p{};

    friend bool operator==(const GhostRecord&, const GhostRecord&) = default;
};

using Bytes = std::vector<std::byte>;

/// Little-endian encoding: u64 record count, then per record
/// global_id u64, molecule u64, species u32, q, q_trial, p as 3 x f64 each.
Bytes encode_records(std::span<const GhostRecord> records);
std::vector<GhostRecord> decode_records(std::span<const std::byte> bytes);

/// Length-prefixed arrays of Vec3 (field refreshes and reverse contributions).
Bytes encode_vectors(std::span<const Vec3> values);
std::vector<Vec3> decode_vectors(std::span<const std::byte> bytes);

/// Length-prefixed arrays of u64 (planning messages).
Bytes encode_u64(std::span<const std::uint64_t> values);
std::vector<std::uint64_t> decode_u64(std::span<const std::byte> bytes);

/// In-process reliable message fabric. Messages between a (sender, receiver, tag) triple are
/// delivered in send order; receiving from an empty channel is a protocol error.
class SimulatedFabric {
public:
    void send(int from, int to, int tag, Bytes payload);
    Bytes receive(int to, int from, int tag);
    bool idle() const;

    std::size_t messages_sent() const { return messages_; }
    std::size_t bytes_sent() const { return bytes_; }

private:
    std::map<std::tuple<int, int, int>, std::deque<Bytes>> channels_;
    std::size_t messages_ = 0;
    std::size_t bytes_ = 0;
};

} // namespace dgmd
