#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lpv/core/error.hpp"
#include "lpv/nn/tiny.hpp"

namespace lpv::nn {

// Checkpoint container, bit-exact layout:
//   4-byte magic "LPDN", 4-byte LE version, 4-byte LE JSON length,
//   JSON architecture descriptor, raw 32-bit LE float payload.
inline constexpr char kCheckpointMagic[4] = {'L', 'P', 'D', 'N'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

namespace detail {

inline void put_u32le(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

inline std::uint32_t get_u32le(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    if (!is) throw CorruptCheckpoint("checkpoint: truncated header");
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

inline nlohmann::json arch_to_json(const TinyArch& a) {
    return nlohmann::json{{"type", "tiny3d"},
                          {"total_steps", a.total_steps},
                          {"num_labels", a.num_labels},
                          {"embed_dim", a.embed_dim},
                          {"widths", a.widths},
                          {"frames", a.frames},
                          {"height", a.height},
                          {"width", a.width}};
}

inline TinyArch arch_from_json(const nlohmann::json& j) {
    if (j.value("type", "") != "tiny3d")
        throw CorruptCheckpoint("checkpoint: unknown architecture type");
    TinyArch a;
    a.total_steps = j.at("total_steps").get<int>();
    a.num_labels = j.at("num_labels").get<int>();
    a.embed_dim = j.at("embed_dim").get<int>();
    a.widths = j.at("widths").get<std::vector<int>>();
    a.frames = j.at("frames").get<std::size_t>();
    a.height = j.at("height").get<std::size_t>();
    a.width = j.at("width").get<std::size_t>();
    return a;
}

} // namespace detail

inline void save_checkpoint(const TinyModelF& model, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IOError("checkpoint: cannot open for write: " + path);
    os.write(kCheckpointMagic, 4);
    detail::put_u32le(os, kCheckpointVersion);
    const std::string arch = detail::arch_to_json(model.arch()).dump();
    detail::put_u32le(os, static_cast<std::uint32_t>(arch.size()));
    os.write(arch.data(), static_cast<std::streamsize>(arch.size()));
    static_assert(sizeof(float) == 4);
    os.write(reinterpret_cast<const char*>(model.params().data()),
             static_cast<std::streamsize>(model.params().size() * 4));
    if (!os) throw IOError("checkpoint: write failed: " + path);
}

inline TinyModelF load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IOError("checkpoint: cannot open: " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kCheckpointMagic, 4) != 0)
        throw CorruptCheckpoint("checkpoint: bad magic");
    const std::uint32_t version = detail::get_u32le(is);
    if (version != kCheckpointVersion)
        throw VersionMismatch("checkpoint: unsupported version " + std::to_string(version));
    const std::uint32_t jlen = detail::get_u32le(is);
    std::string jtxt(jlen, '\0');
    is.read(jtxt.data(), jlen);
    if (!is) throw CorruptCheckpoint("checkpoint: truncated descriptor");
    TinyArch arch;
    try {
        arch = detail::arch_from_json(nlohmann::json::parse(jtxt));
    } catch (const nlohmann::json::exception&) {
        throw CorruptCheckpoint("checkpoint: invalid architecture descriptor");
    }
    std::vector<float> params(detail::ParamLayout::build(arch).total);
    is.read(reinterpret_cast<char*>(params.data()),
            static_cast<std::streamsize>(params.size() * 4));
    if (!is || is.gcount() != static_cast<std::streamsize>(params.size() * 4))
        throw CorruptCheckpoint("checkpoint: truncated payload");
    char extra;
    if (is.read(&extra, 1))
        throw CorruptCheckpoint("checkpoint: trailing bytes");
    return TinyModelF(arch, std::move(params));
}

} // namespace lpv::nn
