#include <catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "lpv/diffusion/noising.hpp"
#include "lpv/nn/checkpoint.hpp"

using namespace lpv;
using namespace lpv::nn;
namespace fs = std::filesystem;

namespace {
struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("lpv_ckpt_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { std::error_code ec; fs::remove_all(path, ec); }
};

TinyArch arch() {
    TinyArch a;
    a.total_steps = 40;
    a.num_labels = 3;
    a.embed_dim = 8;
    a.widths = {6, 5};
    a.frames = 4;
    a.height = 8;
    a.width = 8;
    return a;
}
} // namespace

TEST_CASE("checkpoint round trip reproduces predictions bitwise") {
    TempDir tmp;
    const std::string path = (tmp.path / "model.lpdn").string();
    TinyModelF model = TinyModelF::init(arch(), 77);
    save_checkpoint(model, path);
    TinyModelF loaded = load_checkpoint(path);
    REQUIRE(loaded.params() == model.params());
    REQUIRE(loaded.arch() == model.arch());

    TensorF x(4, 3, 8, 8);
    diffusion::NoiseStream s(5);
    s.fill(x, 0, 0);
    TensorF y1 = model.forward(x, 11, CondLabel{2});
    TensorF y2 = loaded.forward(x, 11, CondLabel{2});
    REQUIRE(y1.vec() == y2.vec());
}

TEST_CASE("checkpoint header layout is bit-exact") {
    TempDir tmp;
    const std::string path = (tmp.path / "model.lpdn").string();
    TinyModelF model = TinyModelF::init(arch(), 1);
    save_checkpoint(model, path);
    std::ifstream is(path, std::ios::binary);
    char magic[4];
    is.read(magic, 4);
    REQUIRE(std::string(magic, 4) == "LPDN");
    unsigned char ver[4];
    is.read(reinterpret_cast<char*>(ver), 4);
    REQUIRE(ver[0] == 1);
    REQUIRE(ver[1] == 0);
    unsigned char jlen[4];
    is.read(reinterpret_cast<char*>(jlen), 4);
    std::uint32_t n = jlen[0] | (jlen[1] << 8) | (jlen[2] << 16)
        | (static_cast<std::uint32_t>(jlen[3]) << 24);
    std::string jtxt(n, '\0');
    is.read(jtxt.data(), n);
    REQUIRE(jtxt.find("tiny3d") != std::string::npos);
    // remaining bytes must be exactly 4 * param_count
    auto pos = is.tellg();
    is.seekg(0, std::ios::end);
    REQUIRE(static_cast<std::size_t>(is.tellg() - pos) == model.param_count() * 4);
}

TEST_CASE("corrupt checkpoints are rejected") {
    TempDir tmp;
    const std::string good = (tmp.path / "good.lpdn").string();
    TinyModelF model = TinyModelF::init(arch(), 2);
    save_checkpoint(model, good);

    SECTION("foreign magic") {
        const std::string bad = (tmp.path / "magic.lpdn").string();
        fs::copy_file(good, bad);
        std::fstream f(bad, std::ios::in | std::ios::out | std::ios::binary);
        f.write("XXXX", 4);
        f.close();
        REQUIRE_THROWS_AS(load_checkpoint(bad), CorruptCheckpoint);
    }

    SECTION("truncated payload") {
        const std::string bad = (tmp.path / "trunc.lpdn").string();
        std::ifstream src(good, std::ios::binary);
        std::string bytes((std::istreambuf_iterator<char>(src)), {});
        std::ofstream dst(bad, std::ios::binary);
        dst.write(bytes.data(), static_cast<std::streamsize>(bytes.size() - 10));
        dst.close();
        REQUIRE_THROWS_AS(load_checkpoint(bad), CorruptCheckpoint);
    }

    SECTION("version mismatch") {
        const std::string bad = (tmp.path / "ver.lpdn").string();
        fs::copy_file(good, bad);
        std::fstream f(bad, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(4);
        const char v2[4] = {9, 0, 0, 0};
        f.write(v2, 4);
        f.close();
        REQUIRE_THROWS_AS(load_checkpoint(bad), VersionMismatch);
    }

    SECTION("missing file") {
        REQUIRE_THROWS_AS(load_checkpoint((tmp.path / "nope.lpdn").string()), IOError);
    }
}
