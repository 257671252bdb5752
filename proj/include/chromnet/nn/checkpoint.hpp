#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <vector>

#include "chromnet/nn/network.hpp"

namespace chromnet::nn {

// Weight checkpoint, little-endian:
//   "CHKW" | version u16 | scalar bytes u8 (4 or 8) | reserved u8 (0)
//   | spec hash u64 | tensor count u32
//   then per parameter tensor, in declaration order:
//   element count u64 | elements as IEEE-754 of the stated width
inline constexpr std::uint16_t kCheckpointVersion = 1;

class CheckpointError : public std::runtime_error {
public:
    enum class Kind { io, corrupt, version_mismatch, spec_mismatch, shape_mismatch };
    CheckpointError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

template <class T>
std::vector<std::uint8_t> encode_checkpoint(const Network<T>& net);

/// Loads weights into `net`; the stored spec hash must match net.spec().
template <class T>
void decode_checkpoint(const std::vector<std::uint8_t>& bytes, Network<T>& net);

template <class T>
void write_checkpoint(const Network<T>& net, const std::filesystem::path& path);

template <class T>
void read_checkpoint(const std::filesystem::path& path, Network<T>& net);

} // namespace chromnet::nn
