#include "chromnet/nn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace chromnet::nn {

namespace {

using Kind = CheckpointError::Kind;

void put_le(std::vector<std::uint8_t>& out, std::uint64_t v, int bytes) {
    for (int i = 0; i < bytes; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

class Reader {
public:
    explicit Reader(const std::vector<std::uint8_t>& b) : b_(b) {}
    std::uint64_t le(int bytes) {
        if (pos_ + static_cast<std::size_t>(bytes) > b_.size()) throw CheckpointError(Kind::corrupt, "checkpoint is truncated");
        std::uint64_t v = 0;
        for (int i = bytes - 1; i >= 0; --i) v = (v << 8) | b_[pos_ + static_cast<std::size_t>(i)];
        pos_ += static_cast<std::size_t>(bytes);
        return v;
    }
    bool done() const noexcept { return pos_ == b_.size(); }

private:
    const std::vector<std::uint8_t>& b_;
    std::size_t pos_ = 0;
};

template <class T>
using Bits = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;

} // namespace

template <class T>
std::vector<std::uint8_t> encode_checkpoint(const Network<T>& net) {
    std::vector<std::uint8_t> out = {'C', 'H', 'K', 'W'};
    put_le(out, kCheckpointVersion, 2);
    put_le(out, sizeof(T), 1);
    put_le(out, 0, 1);
    put_le(out, spec_hash(net.spec()), 8);
    const auto& params = net.parameters();
    put_le(out, params.size(), 4);
    for (const auto& t : params) {
        put_le(out, t.size(), 8);
        for (std::size_t k = 0; k < t.size(); ++k) put_le(out, std::bit_cast<Bits<T>>(t[k]), sizeof(T));
    }
    return out;
}

template <class T>
void decode_checkpoint(const std::vector<std::uint8_t>& bytes, Network<T>& net) {
    if (bytes.size() < 4 || std::memcmp(bytes.data(), "CHKW", 4) != 0) {
        throw CheckpointError(Kind::corrupt, "not a checkpoint (bad magic)");
    }
    Reader r(bytes);
    r.le(4);
    if (r.le(2) != kCheckpointVersion) throw CheckpointError(Kind::version_mismatch, "unsupported checkpoint version");
    if (r.le(1) != sizeof(T)) throw CheckpointError(Kind::shape_mismatch, "checkpoint scalar width differs from model");
    r.le(1);
    if (r.le(8) != spec_hash(net.spec())) {
        throw CheckpointError(Kind::spec_mismatch, "checkpoint was written for a different architecture");
    }
    auto& params = net.parameters();
    if (r.le(4) != params.size()) throw CheckpointError(Kind::shape_mismatch, "parameter tensor count differs");
    std::vector<Tensor<T>> loaded = params;
    for (auto& t : loaded) {
        if (r.le(8) != t.size()) throw CheckpointError(Kind::shape_mismatch, "parameter tensor size differs");
        for (std::size_t k = 0; k < t.size(); ++k) t[k] = std::bit_cast<T>(static_cast<Bits<T>>(r.le(sizeof(T))));
    }
    if (!r.done()) throw CheckpointError(Kind::corrupt, "trailing bytes after the last tensor");
    params = std::move(loaded);
}

template <class T>
void write_checkpoint(const Network<T>& net, const std::filesystem::path& path) {
    const auto bytes = encode_checkpoint(net);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError(Kind::io, "cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw CheckpointError(Kind::io, "failed writing " + path.string());
}

template <class T>
void read_checkpoint(const std::filesystem::path& path, Network<T>& net) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointError(Kind::io, "cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    decode_checkpoint(bytes, net);
}

template std::vector<std::uint8_t> encode_checkpoint<float>(const Network<float>&);
template std::vector<std::uint8_t> encode_checkpoint<double>(const Network<double>&);
template void decode_checkpoint<float>(const std::vector<std::uint8_t>&, Network<float>&);
template void decode_checkpoint<double>(const std::vector<std::uint8_t>&, Network<double>&);
template void write_checkpoint<float>(const Network<float>&, const std::filesystem::path&);
template void write_checkpoint<double>(const Network<double>&, const std::filesystem::path&);
template void read_checkpoint<float>(const std::filesystem::path&, Network<float>&);
template void read_checkpoint<double>(const std::filesystem::path&, Network<double>&);

} // namespace chromnet::nn
