#include "dgmd/spatial/fabric.hpp"

#include <bit>
#include <cstring>
#include <stdexcept>
#include <string>

namespace dgmd {

namespace {

void put_u64(Bytes& out, std::uint64_t v) {
    if constexpr (std::endian::native == std::endian::little) {
        const auto n = out.size();
        out.resize(n + 8);
        std::memcpy(out.data() + n, &v, 8);
    } else {
        for (int k = 0; k < 8; ++k) out.push_back(static_cast<std::byte>((v >> (8 * k)) & 0xffu));
    }
}

void put_u32(Bytes& out, std::uint32_t v) {
    for (int k = 0; k < 4; ++k) out.push_back(static_cast<std::byte>((v >> (8 * k)) & 0xffu));
}

void put_vec(Bytes& out, const Vec3& v) {
    put_u64(out, std::bit_cast<std::uint64_t>(v.x));
    put_u64(out, std::bit_cast<std::uint64_t>(v.y));
    put_u64(out, std::bit_cast<std::uint64_t>(v.z));
}

class Reader {
public:
    explicit Reader(std::span<const std::byte> b) : b_(b) {}

    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        if constexpr (std::endian::native == std::endian::little) {
            std::memcpy(&v, b_.data() + pos_, 8);
        } else {
            for (int k = 0; k < 8; ++k)
                v |= std::to_integer<std::uint64_t>(b_[pos_ + k]) << (8 * k);
        }
        pos_ += 8;
        return v;
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int k = 0; k < 4; ++k) v |= std::to_integer<std::uint32_t>(b_[pos_ + k]) << (8 * k);
        pos_ += 4;
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    Vec3 vec() {
        const double x = f64(), y = f64(), z = f64();
        return {x, y, z};
    }
    void finish() const {
        if (pos_ != b_.size()) throw std::runtime_error("trailing bytes in message");
    }

private:
    void need(std::size_t n) const {
        if (pos_ + n > b_.size()) throw std::runtime_error("truncated message");
    }
    std::span<const std::byte> b_;
    std::size_t pos_ = 0;
};

constexpr std::size_t record_bytes = 8 + 8 + 4 + 9 * 8;

} // namespace

Bytes encode_records(std::span<const GhostRecord> records) {
    Bytes out;
    out.reserve(8 + records.size() * record_bytes);
    put_u64(out, records.size());
    for (const auto& r : records) {
        put_u64(out, r.global_id);
        put_u64(out, r.molecule);
        put_u32(out, r.species);
        put_vec(out, r.q);
        put_vec(out, r.q_trial);
        put_vec(out, r.p);
    }
    return out;
}

std::vector<GhostRecord> decode_records(std::span<const std::byte> bytes) {
    Reader in(bytes);
    const auto n = in.u64();
    if (n > bytes.size() / record_bytes) throw std::runtime_error("record count exceeds message");
    std::vector<GhostRecord> out(n);
    for (auto& r : out) {
        r.global_id = in.u64();
        r.molecule = in.u64();
        r.species = in.u32();
        r.q = in.vec();
        r.q_trial = in.vec();
        r.p = in.vec();
    }
    in.finish();
    return out;
}

namespace {

// Raw copy of trivially copyable values when the host byte order is already little-endian.
template <class T>
void put_block(Bytes& out, std::span<const T> values) {
    const auto n = out.size();
    out.resize(n + values.size_bytes());
    if (!values.empty()) std::memcpy(out.data() + n, values.data(), values.size_bytes());
}

template <class T>
void get_block(std::span<const std::byte> bytes, std::size_t offset, std::vector<T>& out) {
    if (!out.empty()) std::memcpy(out.data(), bytes.data() + offset, out.size() * sizeof(T));
}

void check_length(std::size_t have, std::size_t want) {
    if (have < want) throw std::runtime_error("truncated message");
    if (have > want) throw std::runtime_error("trailing bytes in message");
}

constexpr bool little = std::endian::native == std::endian::little;
static_assert(sizeof(Vec3) == 24);

} // namespace

Bytes encode_vectors(std::span<const Vec3> values) {
    Bytes out;
    out.reserve(8 + 24 * values.size());
    put_u64(out, values.size());
    if constexpr (little) put_block(out, values);
    else for (const auto& v : values) put_vec(out, v);
    return out;
}

std::vector<Vec3> decode_vectors(std::span<const std::byte> bytes) {
    Reader in(bytes);
    const auto n = in.u64();
    if (n > bytes.size() / 24) throw std::runtime_error("vector count exceeds message");
    std::vector<Vec3> out(n);
    if constexpr (little) {
        check_length(bytes.size(), 8 + 24 * n);
        get_block(bytes, 8, out);
        return out;
    }
    for (auto& v : out) v = in.vec();
    in.finish();
    return out;
}

Bytes encode_u64(std::span<const std::uint64_t> values) {
    Bytes out;
    out.reserve(8 + 8 * values.size());
    put_u64(out, values.size());
    if constexpr (little) put_block(out, values);
    else for (auto v : values) put_u64(out, v);
    return out;
}

std::vector<std::uint64_t> decode_u64(std::span<const std::byte> bytes) {
    Reader in(bytes);
    const auto n = in.u64();
    if (n > bytes.size() / 8) throw std::runtime_error("value count exceeds message");
    std::vector<std::uint64_t> out(n);
    if constexpr (little) {
        check_length(bytes.size(), 8 + 8 * n);
        get_block(bytes, 8, out);
        return out;
    }
    for (auto& v : out) v = in.u64();
    in.finish();
    return out;
}

void SimulatedFabric::send(int from, int to, int tag, Bytes payload) {
    ++messages_;
    bytes_ += payload.size();
    channels_[{from, to, tag}].push_back(std::move(payload));
}

Bytes SimulatedFabric::receive(int to, int from, int tag) {
    auto it = channels_.find({from, to, tag});
    if (it == channels_.end() || it->second.empty())
        throw std::runtime_error("no message from rank " + std::to_string(from) + " to rank " +
                                 std::to_string(to) + " with tag " + std::to_string(tag));
    Bytes b = std::move(it->second.front());
    it->second.pop_front();
    return b;
}

bool SimulatedFabric::idle() const {
    for (const auto& [key, queue] : channels_)
        if (!queue.empty()) return false;
    return true;
}

} // namespace dgmd
