#include <catch_amalgamated.hpp>

#include "lpv/nn/train.hpp"

using namespace lpv;
using namespace lpv::nn;

namespace {
std::vector<TrainSample> toy_dataset(int count) {
    std::vector<TrainSample> data;
    for (int i = 0; i < count; ++i) {
        TensorF clip(4, 3, 12, 12);
        diffusion::NoiseStream s(derive_seed(9000, static_cast<std::uint64_t>(i)));
        s.fill(clip, 0, 0);
        for (auto& v : clip.vec()) v = 0.5f + 0.15f * v;
        data.push_back({std::move(clip), CondLabel{i % 2}});
    }
    return data;
}

TinyArch toy_arch() {
    TinyArch a;
    a.total_steps = 100;
    a.num_labels = 2;
    a.embed_dim = 8;
    a.widths = {8, 8};
    a.frames = 4;
    a.height = 12;
    a.width = 12;
    return a;
}
} // namespace

TEST_CASE("training reduces the loss on a small dataset") {
    TinyModelF model = TinyModelF::init(toy_arch(), 1);
    auto data = toy_dataset(8);
    diffusion::NoiseSchedule sched = diffusion::make_schedule(100, 1e-3, 0.05);
    TrainConfig cfg;
    cfg.epochs = 20;
    cfg.lr = 2e-3;
    cfg.batch_size = 4;
    cfg.seed = 7;
    TrainResult r = train(model, data, sched, cfg);
    REQUIRE(r.epoch_loss.size() == 20);
    REQUIRE(r.epoch_loss.back() < r.epoch_loss.front());
}

TEST_CASE("lr = 0 leaves parameters unchanged") {
    TinyModelF model = TinyModelF::init(toy_arch(), 2);
    std::vector<float> before = model.params();
    auto data = toy_dataset(4);
    diffusion::NoiseSchedule sched = diffusion::make_schedule(100, 1e-3, 0.05);
    TrainConfig cfg;
    cfg.epochs = 3;
    cfg.lr = 0.0;
    cfg.seed = 7;
    TrainResult r = train(model, data, sched, cfg);
    REQUIRE(model.params() == before);
    for (std::size_t i = 1; i < r.epoch_loss.size(); ++i)
        REQUIRE(r.epoch_loss[i] == r.epoch_loss[0]);
}

TEST_CASE("training is deterministic per seed") {
    auto data = toy_dataset(4);
    diffusion::NoiseSchedule sched = diffusion::make_schedule(100, 1e-3, 0.05);
    TrainConfig cfg;
    cfg.epochs = 4;
    cfg.lr = 1e-3;
    cfg.seed = 11;
    TinyModelF m1 = TinyModelF::init(toy_arch(), 3);
    TinyModelF m2 = TinyModelF::init(toy_arch(), 3);
    TrainResult r1 = train(m1, data, sched, cfg);
    TrainResult r2 = train(m2, data, sched, cfg);
    REQUIRE(r1.epoch_loss == r2.epoch_loss);
    REQUIRE(m1.params() == m2.params());

    cfg.seed = 12;
    TinyModelF m3 = TinyModelF::init(toy_arch(), 3);
    TrainResult r3 = train(m3, data, sched, cfg);
    REQUIRE(r1.epoch_loss != r3.epoch_loss);
}

TEST_CASE("empty dataset is rejected") {
    TinyModelF model = TinyModelF::init(toy_arch(), 5);
    diffusion::NoiseSchedule sched = diffusion::make_schedule(100, 1e-3, 0.05);
    std::vector<TrainSample> empty;
    REQUIRE_THROWS_AS(train(model, empty, sched, TrainConfig{}), EmptyTrainingSet);
}
