#include "chromnet/dataset.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <iterator>
#include <numeric>

#include <omp.h>

namespace chromnet::data {

namespace {

using Kind = DatasetError::Kind;

void put_u8(std::vector<std::uint8_t>& out, unsigned v) { out.push_back(static_cast<std::uint8_t>(v)); }

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_le(const std::uint8_t* p, int bytes) {
    std::uint64_t v = 0;
    for (int i = bytes - 1; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

std::uint32_t crc32_of(const std::uint8_t* data, std::size_t len) {
    uLong crc = crc32(0L, Z_NULL, 0);
    // zlib takes uInt lengths; feed in chunks.
    while (len > 0) {
        const auto chunk = static_cast<uInt>(std::min<std::size_t>(len, 1u << 30));
        crc = crc32(crc, data, chunk);
        data += chunk;
        len -= chunk;
    }
    return static_cast<std::uint32_t>(crc);
}

std::size_t record_bytes(int order) { return 5 + packed_adjacency_bytes(order); }

} // namespace

const char* to_string(Split s) noexcept {
    switch (s) {
    case Split::train: return "train";
    case Split::valid: return "valid";
    case Split::test: return "test";
    }
    return "?";
}

const char* to_string(Target t) noexcept { return t == Target::chromatic ? "chi" : "omega"; }

Split parse_split(const std::string& s) {
    if (s == "train") return Split::train;
    if (s == "valid" || s == "validation") return Split::valid;
    if (s == "test") return Split::test;
    throw std::invalid_argument("unknown split '" + s + "' (expected train|valid|test)");
}

Target parse_target(const std::string& s) {
    if (s == "chi" || s == "chromatic") return Target::chromatic;
    if (s == "omega" || s == "clique") return Target::clique;
    throw std::invalid_argument("unknown target '" + s + "' (expected chi|omega)");
}

void Dataset::validate() const {
    if (order < 0 || order > 255) throw DatasetError(Kind::unsupported_order, "dataset order must be in [0, 255]");
    if (!records.empty() && order == 0) throw DatasetError(Kind::invalid_dataset, "non-empty dataset has order 0");
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        const std::string where = "record " + std::to_string(i) + ": ";
        if (r.graph.order() != order) throw DatasetError(Kind::invalid_dataset, where + "graph order differs from dataset");
        if (r.edges != edge_count(r.graph)) throw DatasetError(Kind::invalid_dataset, where + "edge count mismatch");
        if (r.source_order < 0 || r.source_order > order)
            throw DatasetError(Kind::invalid_dataset, where + "source order out of range");
        if (r.labeled()) {
            if (r.clique < 1 || r.clique > r.chromatic || r.chromatic > order)
                throw DatasetError(Kind::invalid_dataset, where + "labels violate 1 <= clique <= chromatic <= order");
        } else if (r.clique != 0) {
            throw DatasetError(Kind::invalid_dataset, where + "clique set on an unlabelled record");
        }
    }
}

std::size_t packed_adjacency_bytes(int order) noexcept {
    const std::size_t pairs = static_cast<std::size_t>(order) * static_cast<std::size_t>(std::max(order - 1, 0)) / 2;
    return (pairs + 7) / 8;
}

std::vector<std::uint8_t> pack_adjacency(const Graph& g) {
    std::vector<std::uint8_t> out(packed_adjacency_bytes(g.order()), 0);
    std::size_t bit = 0;
    for (int i = 0; i < g.order(); ++i)
        for (int j = i + 1; j < g.order(); ++j, ++bit)
            if (g.has_edge(i, j)) out[bit >> 3] |= static_cast<std::uint8_t>(1u << (bit & 7));
    return out;
}

Graph unpack_adjacency(int order, const std::uint8_t* bytes) {
    Graph g(order);
    std::size_t bit = 0;
    for (int i = 0; i < order; ++i)
        for (int j = i + 1; j < order; ++j, ++bit)
            if (bytes[bit >> 3] >> (bit & 7) & 1u) g.set_edge(i, j);
    return g;
}

std::vector<std::uint8_t> encode_dataset(const Dataset& ds) {
    if (ds.order > 255) throw DatasetError(Kind::unsupported_order, "order above 255 cannot be stored");
    ds.validate();
    std::vector<std::uint8_t> out;
    out.reserve(kHeaderBytes + ds.size() * record_bytes(ds.order) + 4);
    out.insert(out.end(), kDatasetMagic.begin(), kDatasetMagic.end());
    put_u16(out, ds.format_version);
    put_u8(out, static_cast<unsigned>(ds.split));
    put_u8(out, static_cast<unsigned>(ds.order));
    put_u64(out, ds.size());
    put_u64(out, ds.gen_seed);
    for (const auto& r : ds.records) {
        put_u8(out, static_cast<unsigned>(r.source_order));
        put_u8(out, static_cast<unsigned>(r.chromatic));
        put_u8(out, static_cast<unsigned>(r.clique));
        put_u16(out, static_cast<std::uint16_t>(r.edges));
        const auto packed = pack_adjacency(r.graph);
        out.insert(out.end(), packed.begin(), packed.end());
    }
    put_u32(out, crc32_of(out.data() + kHeaderBytes, out.size() - kHeaderBytes));
    return out;
}

Dataset decode_dataset(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < kHeaderBytes || !std::equal(kDatasetMagic.begin(), kDatasetMagic.end(), bytes.begin())) {
        throw DatasetError(Kind::corrupt_header, "not a dataset file (bad magic or short header)");
    }
    Dataset ds;
    ds.format_version = static_cast<std::uint16_t>(get_le(&bytes[4], 2));
    if (ds.format_version != kFormatVersion) {
        throw DatasetError(Kind::version_mismatch, "dataset format version " + std::to_string(ds.format_version) +
                                                       " is not supported (expected " +
                                                       std::to_string(kFormatVersion) + ")");
    }
    const unsigned split = bytes[6];
    if (split > 2) throw DatasetError(Kind::corrupt_header, "unknown split tag " + std::to_string(split));
    ds.split = static_cast<Split>(split);
    ds.order = bytes[7];
    const std::uint64_t count = get_le(&bytes[8], 8);
    ds.gen_seed = get_le(&bytes[16], 8);
    if (count > 0 && ds.order == 0) throw DatasetError(Kind::corrupt_header, "records declared with order 0");

    const std::size_t rec = record_bytes(ds.order);
    const std::size_t available = bytes.size() - kHeaderBytes;
    if (count > available / rec || available < count * rec + 4) {
        throw DatasetError(Kind::truncated_records, "file holds fewer bytes than its " + std::to_string(count) +
                                                        " declared records");
    }
    if (available > count * rec + 4) {
        throw DatasetError(Kind::trailing_bytes, "unexpected bytes after the checksum");
    }
    const std::uint8_t* region = bytes.data() + kHeaderBytes;
    const auto stored_crc = static_cast<std::uint32_t>(get_le(region + count * rec, 4));
    if (stored_crc != crc32_of(region, count * rec)) {
        throw DatasetError(Kind::checksum_mismatch, "record checksum mismatch");
    }

    ds.records.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        const std::uint8_t* p = region + i * rec;
        LabeledGraph r;
        r.source_order = p[0];
        r.chromatic = p[1];
        r.clique = p[2];
        r.edges = static_cast<int>(get_le(p + 3, 2));
        r.graph = unpack_adjacency(ds.order, p + 5);
        if (r.clique > r.chromatic || (r.chromatic != 0 && r.clique == 0) || r.chromatic > ds.order ||
            r.edges != edge_count(r.graph)) {
            throw DatasetError(Kind::corrupt_record, "record " + std::to_string(i) + " has inconsistent labels");
        }
        ds.records.push_back(std::move(r));
    }
    return ds;
}

void write_dataset(const Dataset& ds, const std::filesystem::path& path) {
    const auto bytes = encode_dataset(ds);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DatasetError(Kind::io, "cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DatasetError(Kind::io, "failed writing " + path.string());
}

Dataset read_dataset(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DatasetError(Kind::io, "cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_dataset(bytes);
}

void export_csv(const Dataset& ds, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DatasetError(Kind::io, "cannot open " + path.string() + " for writing");
    static constexpr char kHex[] = "0123456789abcdef";
    out << "order,chromatic,clique,edges,adj_hex\n";
    for (const auto& r : ds.records) {
        out << r.graph.order() << ',' << r.chromatic << ',' << r.clique << ',' << r.edges << ',';
        for (auto b : pack_adjacency(r.graph)) out << kHex[b >> 4] << kHex[b & 0xF];
        out << '\n';
    }
    if (!out) throw DatasetError(Kind::io, "failed writing " + path.string());
}

DistributionStats compute_stats(const Dataset& ds, Target target) {
    if (ds.empty()) throw std::invalid_argument("cannot compute statistics of an empty dataset");
    DistributionStats st;
    std::vector<int> values;
    values.reserve(ds.size());
    for (const auto& r : ds.records) {
        const int v = r.label(target);
        ++st.histogram[v];
        values.push_back(v);
    }
    std::sort(values.begin(), values.end());
    st.total = values.size();
    st.min = values.front();
    st.max = values.back();
    const std::size_t mid = values.size() / 2;
    st.median = values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
    return st;
}

SplitResult split_dataset(const std::vector<LabeledGraph>& records, SplitFractions f, Rng& rng) {
    if (!(f.train > 0 && f.valid > 0 && f.test > 0) || std::abs(f.train + f.valid + f.test - 1.0) > 1e-9) {
        throw std::invalid_argument("split fractions must be positive and sum to 1");
    }
    const std::size_t n = records.size();
    const auto n_train = static_cast<std::size_t>(std::llround(f.train * static_cast<double>(n)));
    const auto n_valid = std::min(n - n_train, static_cast<std::size_t>(std::llround(f.valid * static_cast<double>(n))));

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    rng.shuffle(std::span(idx));
    std::vector<std::uint8_t> part(n, 2);
    for (std::size_t i = 0; i < n_train; ++i) part[idx[i]] = 0;
    for (std::size_t i = n_train; i < n_train + n_valid; ++i) part[idx[i]] = 1;

    const int order = records.empty() ? 0 : records.front().graph.order();
    SplitResult out;
    out.train.split = Split::train;
    out.valid.split = Split::valid;
    out.test.split = Split::test;
    Dataset* parts[3] = {&out.train, &out.valid, &out.test};
    for (auto* d : parts) d->order = order;
    for (std::size_t i = 0; i < n; ++i) parts[part[i]]->records.push_back(records[i]);
    return out;
}

LabeledGraph make_record(const Graph& g, int source_order, const oracle::SolverLimits& limits) {
    const auto labels = oracle::label_graph(g, limits);
    return {g, labels.chromatic, labels.clique, source_order, edge_count(g)};
}

namespace {

template <class Body>
void parallel_slots(std::size_t count, int threads, Body&& body) {
    std::vector<std::exception_ptr> errors(count);
    const int nthreads = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 16) num_threads(nthreads)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i) {
        try {
            body(static_cast<std::size_t>(i));
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace

Dataset build_dataset(const gen::GenConfig& cfg, Split split, const LabelOptions& opts, BuildReport* report) {
    cfg.validate();
    Dataset ds;
    ds.split = split;
    ds.gen_seed = cfg.seed;
    ds.order = cfg.max_order;
    ds.records.resize(cfg.total());
    std::vector<int> retries(cfg.total(), 0);

    parallel_slots(cfg.total(), opts.threads, [&](std::size_t slot) {
        const int n = 2 + static_cast<int>(slot / static_cast<std::size_t>(cfg.per_order_count));
        const int index = static_cast<int>(slot % static_cast<std::size_t>(cfg.per_order_count));
        for (int attempt = 0;; ++attempt) {
            try {
                ds.records[slot] = make_record(gen::generate_one(cfg, n, index, attempt), n, opts.limits);
                retries[slot] = attempt;
                return;
            } catch (const oracle::BudgetExceeded&) {
                if (attempt + 1 >= opts.max_attempts) throw;
            }
        }
    });
    if (report) {
        report->regenerated = static_cast<std::size_t>(
            std::count_if(retries.begin(), retries.end(), [](int r) { return r > 0; }));
    }
    return ds;
}

Dataset build_unlabeled(const gen::GenConfig& cfg, Split split) {
    cfg.validate();
    Dataset ds;
    ds.split = split;
    ds.gen_seed = cfg.seed;
    ds.order = cfg.max_order;
    for (int n = 2; n <= cfg.max_order; ++n) {
        for (int k = 0; k < cfg.per_order_count; ++k) {
            Graph g = gen::generate_one(cfg, n, k);
            const int e = edge_count(g);
            ds.records.push_back({std::move(g), 0, 0, n, e});
        }
    }
    return ds;
}

void label_dataset(Dataset& ds, const LabelOptions& opts) {
    parallel_slots(ds.size(), opts.threads, [&](std::size_t i) {
        auto& r = ds.records[i];
        const auto labels = oracle::label_graph(r.graph, opts.limits);
        r.chromatic = labels.chromatic;
        r.clique = labels.clique;
    });
}

} // namespace chromnet::data
