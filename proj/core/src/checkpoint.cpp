#include "seq2form/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace s2f {

namespace {

constexpr char kMagic[8] = {'S', '2', 'F', 'C', 'K', 'P', 'T', '\0'};
constexpr std::uint32_t kFormatVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

void write_u32(std::ostream& os, std::uint32_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

void write_u64(std::ostream& os, std::uint64_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint32_t read_u32(std::istream& is, const std::string& what) {
    std::uint32_t v = 0;
    if (!is.read(reinterpret_cast<char*>(&v), sizeof(v))) {
        throw std::runtime_error("checkpoint: truncated while reading " + what);
    }
    return v;
}

std::uint64_t read_u64(std::istream& is, const std::string& what) {
    std::uint64_t v = 0;
    if (!is.read(reinterpret_cast<char*>(&v), sizeof(v))) {
        throw std::runtime_error("checkpoint: truncated while reading " + what);
    }
    return v;
}

}  // namespace

void save_checkpoint(const ParameterStore& store, const std::string& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("checkpoint: cannot open " + path + " for writing");

    os.write(kMagic, sizeof(kMagic));
    write_u32(os, kFormatVersion);
    write_u32(os, static_cast<std::uint32_t>(store.size()));

    // Manifest first, payload offsets measured from payload start.
    std::uint64_t offset = 0;
    for (const auto& [name, t] : store) {
        write_u32(os, static_cast<std::uint32_t>(name.size()));
        os.write(name.data(), static_cast<std::streamsize>(name.size()));
        write_u32(os, static_cast<std::uint32_t>(t.shape.size()));
        for (int d : t.shape) write_u32(os, static_cast<std::uint32_t>(d));
        write_u64(os, offset);
        offset += t.values.size() * sizeof(double);
    }
    for (const auto& [name, t] : store) {
        os.write(reinterpret_cast<const char*>(t.values.data()),
                 static_cast<std::streamsize>(t.values.size() * sizeof(double)));
    }
    if (!os) throw std::runtime_error("checkpoint: write failed for " + path);
}

void load_checkpoint(ParameterStore& store, const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("checkpoint: cannot open " + path);

    char magic[8];
    if (!is.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw std::runtime_error("checkpoint: bad magic in " + path);
    }
    std::uint32_t version = read_u32(is, "format version");
    if (version != kFormatVersion) {
        throw std::runtime_error("checkpoint: unsupported format version " +
                                 std::to_string(version) + " in " + path);
    }
    std::uint32_t count = read_u32(is, "tensor count");

    struct Entry {
        std::string name;
        Shape shape;
        std::uint64_t offset;
    };
    std::vector<Entry> manifest;
    manifest.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        Entry e;
        std::uint32_t name_len = read_u32(is, "name length");
        e.name.resize(name_len);
        if (!is.read(e.name.data(), name_len)) {
            throw std::runtime_error("checkpoint: truncated name in " + path);
        }
        std::uint32_t rank = read_u32(is, "rank");
        e.shape.resize(rank);
        for (std::uint32_t r = 0; r < rank; ++r) {
            e.shape[r] = static_cast<int>(read_u32(is, "shape dim"));
        }
        e.offset = read_u64(is, "payload offset");
        manifest.push_back(std::move(e));
    }

    std::streampos payload_start = is.tellg();
    for (const auto& e : manifest) {
        if (store.contains(e.name) && store.get(e.name).shape != e.shape) {
            throw std::runtime_error("checkpoint: shape mismatch for " + e.name + ": file has " +
                                     shape_str(e.shape) + ", store has " +
                                     shape_str(store.get(e.name).shape));
        }
        Tensor& t = store.create(e.name, e.shape);
        is.seekg(payload_start + static_cast<std::streamoff>(e.offset));
        if (!is.read(reinterpret_cast<char*>(t.values.data()),
                     static_cast<std::streamsize>(t.values.size() * sizeof(double)))) {
            throw std::runtime_error("checkpoint: truncated payload for " + e.name + " in " +
                                     path);
        }
        t.drop_grad();
    }
}

}  // namespace s2f
