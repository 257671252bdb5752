#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "chromnet/generator.hpp"
#include "chromnet/graph.hpp"
#include "chromnet/oracles.hpp"
#include "chromnet/rng.hpp"

namespace chromnet::data {

enum class Split : std::uint8_t { train = 0, valid = 1, test = 2 };

/// Which label a model predicts or a statistic summarizes.
enum class Target { chromatic, clique };

const char* to_string(Split s) noexcept;
const char* to_string(Target t) noexcept; ///< "chi" / "omega"
Split parse_split(const std::string& s);
Target parse_target(const std::string& s); ///< accepts chi|chromatic, omega|clique

/// A graph with its exact labels. Labels of 0/0 mark a record that has not
/// been labelled yet.
struct LabeledGraph {
    Graph graph{1};
    int chromatic = 0;
    int clique = 0;
    int source_order = 0;
    int edges = 0;

    bool labeled() const noexcept { return chromatic != 0; }
    int label(Target t) const noexcept { return t == Target::chromatic ? chromatic : clique; }

    friend bool operator==(const LabeledGraph&, const LabeledGraph&) = default;
};

inline constexpr std::uint16_t kFormatVersion = 1;

struct Dataset {
    std::vector<LabeledGraph> records;
    Split split = Split::train;
    std::uint64_t gen_seed = 0;
    int order = 0; ///< shared vertex count; 0 only for an empty dataset
    std::uint16_t format_version = kFormatVersion;

    std::size_t size() const noexcept { return records.size(); }
    bool empty() const noexcept { return records.empty(); }

    /// Throws DatasetError(invalid_dataset) on any invariant violation.
    void validate() const;

    friend bool operator==(const Dataset&, const Dataset&) = default;
};

class DatasetError : public std::runtime_error {
public:
    enum class Kind {
        io,
        corrupt_header,
        version_mismatch,
        truncated_records,
        checksum_mismatch,
        corrupt_record,
        trailing_bytes,
        unsupported_order,
        invalid_dataset,
    };
    DatasetError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

// Binary layout, all integers little-endian:
//   header   "CHRG" | version u16 | split u8 | order u8 | count u64 | seed u64
//   record   source_order u8 | chromatic u8 | clique u8 | edges u16 | adjacency
//   trailer  CRC-32 (zlib polynomial) over all record bytes
// The adjacency is the strict upper triangle, row-major ((0,1), (0,2), ...,
// (1,2), ...), one bit per pair, least significant bit first, padded to
// ceil(order*(order-1)/2 / 8) bytes.
inline constexpr std::array<char, 4> kDatasetMagic{'C', 'H', 'R', 'G'};
inline constexpr std::size_t kHeaderBytes = 24;

std::size_t packed_adjacency_bytes(int order) noexcept;
std::vector<std::uint8_t> pack_adjacency(const Graph& g);
Graph unpack_adjacency(int order, const std::uint8_t* bytes);

std::vector<std::uint8_t> encode_dataset(const Dataset& ds);
Dataset decode_dataset(const std::vector<std::uint8_t>& bytes);

void write_dataset(const Dataset& ds, const std::filesystem::path& path);
Dataset read_dataset(const std::filesystem::path& path);

/// CSV with header `order,chromatic,clique,edges,adj_hex`; adj_hex is the
/// packed adjacency as lowercase hex.
void export_csv(const Dataset& ds, const std::filesystem::path& path);

struct DistributionStats {
    std::map<int, std::size_t> histogram;
    int min = 0;
    double median = 0.0;
    int max = 0;
    std::size_t total = 0;
};

DistributionStats compute_stats(const Dataset& ds, Target target);

struct SplitFractions {
    double train = 0.8;
    double valid = 0.1;
    double test = 0.1;
};

struct SplitResult {
    Dataset train;
    Dataset valid;
    Dataset test;
};

/// Random partition. The train and valid sizes are round(fraction * n); test
/// takes the rest. Records keep their input order within each part.
SplitResult split_dataset(const std::vector<LabeledGraph>& records, SplitFractions fractions, Rng& rng);

struct LabelOptions {
    oracle::SolverLimits limits{};
    int threads = 0;      ///< 0 = OpenMP default
    int max_attempts = 8; ///< fresh substreams tried per slot before giving up
};

struct BuildReport {
    std::size_t regenerated = 0; ///< slots whose first graph blew the solver budget
};

/// Labels one graph into a record.
LabeledGraph make_record(const Graph& g, int source_order, const oracle::SolverLimits& limits);

/// Generates and labels cfg.total() graphs. A graph that exceeds the solver
/// budget is replaced by one drawn from the next substream of its slot.
/// Output is independent of the thread count.
Dataset build_dataset(const gen::GenConfig& cfg, Split split, const LabelOptions& opts = {},
                      BuildReport* report = nullptr);

/// Same graphs as build_dataset, with labels left at 0.
Dataset build_unlabeled(const gen::GenConfig& cfg, Split split);

/// Computes labels for every record in place.
void label_dataset(Dataset& ds, const LabelOptions& opts = {});

} // namespace chromnet::data
