// Copyright (c) 2026, The PastNet Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "manifest.hpp"
#include "pastnet/checkpoint.hpp"
#include "pastnet/dataset.hpp"
#include "run_config.hpp"
#include "support/oracles.hpp"

using namespace pastnet;
using namespace pastnet::cli;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = dispatch(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("pastnet_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write(const fs::path& p, const json& j) { std::ofstream(p) << j.dump(2); }

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

}  // namespace

TEST_CASE("generate swe twice gives bit-identical files", "[cli]") {
    const auto dir = scratch("gen");
    const auto a = (dir / "a.pstj").string(), b = (dir / "b.pstj").string();
    REQUIRE(run({"generate", "--kind", "swe", "--num", "4", "--seed", "7", "--out", a}).code == 0);
    REQUIRE(run({"generate", "--kind", "swe", "--num", "4", "--seed", "7", "--out", b}).code == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(read_dataset(a).shape == Shape5{4, 100, 3, 128, 128});

    const auto m = json::parse(slurp(a + ".manifest.json"));
    CHECK(m["command"] == "generate");
    CHECK(m["seed"] == 7);
    CHECK(m["config_sha256"].get<std::string>().size() == 64);
    CHECK(m["outputs"][0]["sha256"] == sha256_file(a));
}

TEST_CASE("usage errors exit 2 with usage text on the error stream", "[cli]") {
    for (const auto& args : std::vector<std::vector<std::string>>{
             {"generate", "--kind", "swe", "--num", "1", "--seed", "1", "--out", "x.pstj", "--bogus"},
             {"frobnicate"},
             {},
             {"generate", "--kind", "heat", "--num", "1", "--seed", "1", "--out", "x.pstj"},
             {"eval", "--ckpt", "a.ckpt"}}) {
        const auto r = run(args);
        CHECK(r.code == 2);
        CHECK(contains(r.err, "Usage"));
        CHECK(r.out.empty());
    }
    CHECK_FALSE(fs::exists("x.pstj"));

    const auto help = run({"--help"});
    CHECK(help.code == 0);
    CHECK(contains(help.out, "estimate-dim"));
    CHECK(run({"train", "--help"}).code == 0);
}

TEST_CASE("runtime failures exit 1 with a message", "[cli]") {
    const auto r = run({"eval", "--ckpt", "/nonexistent/model.ckpt", "--data", "/nonexistent/d.pstj", "--report", "r.json"});
    CHECK(r.code == 1);
    CHECK(contains(r.err, "error: "));
}

TEST_CASE("config validation names every violated field", "[cli][config]") {
    SECTION("patch size 7 with H = 64") {
        const auto p = parse_config({{"patch_h", 7}, {"height", 64}});
        REQUIRE(p.errors.size() == 1);
        CHECK(contains(p.errors[0], "patch_h"));
    }
    SECTION("negative beta") {
        const auto p = parse_config({{"beta", -1.0}});
        REQUIRE(p.errors.size() == 1);
        CHECK(contains(p.errors[0], "beta"));
    }
    SECTION("all problems are reported together") {
        const auto p = parse_config({{"patch_h", 7},
                                     {"beta", -1},
                                     {"lernrate", 0.1},
                                     {"seed", "zero"},
                                     {"nse_viscosity", -1.0},
                                     {"swe_grid", 1.5}});
        std::string all;
        for (const auto& e : p.errors) all += e + "\n";
        CHECK(p.errors.size() == 6);
        for (const char* key : {"patch_h", "beta", "lernrate: unknown key", "seed", "nse_viscosity", "swe_grid"})
            CHECK(contains(all, key));
    }
    SECTION("load_config throws with the list and check-config exits 1") {
        const auto dir = scratch("cfg");
        write(dir / "bad.json", {{"patch_h", 7}, {"beta", -1}});
        try {
            (void)load_config(dir / "bad.json");
            FAIL("expected ConfigError");
        } catch (const std::exception& e) {
            CHECK(contains(e.what(), "patch_h"));
            CHECK(contains(e.what(), "beta"));
        }
        const auto r = run({"check-config", (dir / "bad.json").string()});
        CHECK(r.code == 1);
        CHECK(contains(r.err, "patch_h"));
        CHECK(contains(r.err, "beta"));
    }
}

TEST_CASE("shipped schema and sample config match the code", "[cli][config]") {
    const fs::path docs = fs::path(PASTNET_SOURCE_DIR) / "docs";
    const auto schema = json::parse(slurp(docs / "config.schema.json"));
    CHECK(schema == config_schema());

    const auto sample = json::parse(slurp(docs / "sample_config.json"));
    const auto parsed = parse_config(sample);
    CHECK(parsed.errors.empty());

    // Every key of a full config is documented, and the full config round-trips.
    const auto full = parsed.config.to_json();
    for (const auto& [key, value] : full.items()) {
        INFO(key);
        REQUIRE(schema["properties"].contains(key));
        CHECK_FALSE(schema["properties"][key]["description"].get<std::string>().empty());
    }
    CHECK(schema["properties"].size() == full.size());
    const auto again = parse_config(full);
    CHECK(again.errors.empty());
    CHECK(again.config.to_json() == full);
    CHECK(config_hash(again.config) == config_hash(parsed.config));
}

TEST_CASE("pipeline from generation to plots", "[cli][pipeline]") {
    const auto dir = scratch("pipeline");
    const auto data = (dir / "train.pstj").string(), cfg_path = (dir / "run.json").string();
    json cfg = testing::tiny_config().to_json();
    cfg["bounce_glyph_scale"] = 1;
    cfg["bounce_n_glyphs"] = 1;
    cfg["bounce_height"] = 16;
    cfg["bounce_width"] = 16;
    cfg["epochs_phase0"] = 2;
    cfg["epochs_phase1"] = 2;
    cfg["epochs_phase2"] = 2;
    cfg["checkpoint_every"] = 2;
    cfg["latent_dim"] = 2;
    cfg["train_data"] = data;
    cfg["work_dir"] = (dir / "work").string();
    write(cfg_path, cfg);
    REQUIRE(run({"check-config", cfg_path}).code == 0);
    REQUIRE(run({"generate", "--kind", "bounce", "--num", "6", "--seed", "3", "--frames", "4", "--config", cfg_path,
                 "--out", data})
                .code == 0);

    const auto est = run({"estimate-dim", "--data", data, "--neighbors", "5", "--sample", "100", "--config", cfg_path,
                          "--out", (dir / "est.json").string(), "--ckpt", (dir / "ae.ckpt").string()});
    REQUIRE(est.code == 0);
    const auto e = json::parse(slurp(dir / "est.json"));
    CHECK(e["D"].get<std::int64_t>() >= 1);
    CHECK(e["R"] == 5);
    CHECK(load_checkpoint(dir / "ae.ckpt").phase() == "autoencoder");

    const auto pre = run({"pretrain-vq", "--config", cfg_path});
    INFO(pre.err);
    REQUIRE(pre.code == 0);
    REQUIRE(fs::exists(dir / "work" / "vqvae.ckpt"));
    REQUIRE(fs::exists(dir / "work" / "vqvae.ckpt.manifest.json"));

    const auto tr = run({"train", "--config", cfg_path, "--max-steps", "2"});
    INFO(tr.err);
    REQUIRE(tr.code == 0);
    const auto model = dir / "work" / "model.ckpt";
    CHECK(load_checkpoint(model).header["step"] == 2);

    const auto resumed = run({"train", "--config", cfg_path, "--resume", model.string()});
    INFO(resumed.err);
    REQUIRE(resumed.code == 0);
    const auto final_ck = load_checkpoint(model);
    CHECK(final_ck.header["step"].get<std::int64_t>() > 2);
    CHECK(final_ck.header["loss_curve"].size() == final_ck.header["step"].get<std::size_t>());

    SECTION("resume with a different model config is refused") {
        json other = cfg;
        other["embed_dim"] = 8;
        write(dir / "other.json", other);
        const auto r = run({"train", "--config", (dir / "other.json").string(), "--resume", model.string()});
        CHECK(r.code == 1);
        CHECK(contains(r.err, "embed_dim"));
    }

    SECTION("eval, predict and plot") {
        const auto report = dir / "report.json";
        const auto ev = run({"eval", "--ckpt", model.string(), "--data", data, "--report", report.string()});
        INFO(ev.err);
        REQUIRE(ev.code == 0);
        const auto rep = json::parse(slurp(report));
        for (const char* key : {"mse_pixel", "mae_pixel", "ssim", "ms_ssim", "psnr"}) CHECK(rep["metrics"].contains(key));
        CHECK(rep["windows"] == 6);
        CHECK(rep["sample"]["prediction"].size() == 2);
        CHECK(rep["sample"]["prediction"][0].size() == 256);
        CHECK(rep["loss_curve"].size() == final_ck.header["loss_curve"].size());

        const auto manifest = json::parse(slurp(report.string() + ".manifest.json"));
        std::vector<std::string> inputs;
        for (const auto& i : manifest["inputs"]) inputs.push_back(i["sha256"]);
        CHECK(inputs == std::vector<std::string>{sha256_file(model), sha256_file(data)});

        const auto pred = dir / "pred.pstj";
        REQUIRE(run({"predict", "--ckpt", model.string(), "--input", data, "--out", pred.string()}).code == 0);
        const auto p = read_dataset(pred);
        CHECK(p.shape == Shape5{6, 2, 1, 16, 16});
        for (float v : p.data) REQUIRE(std::isfinite(v));

        const auto before = sha256_file(report), ck_before = sha256_file(model);
        const auto pl = run({"plot", "--report", report.string(), "--out", (dir / "plots").string()});
        REQUIRE(pl.code == 0);
        CHECK(slurp(dir / "plots" / "loss_curve.png").substr(1, 3) == "PNG");
        CHECK(slurp(dir / "plots" / "frames.png").substr(1, 3) == "PNG");
        CHECK(fs::exists(dir / "plots" / "manifest.json"));
        CHECK(sha256_file(report) == before);
        CHECK(sha256_file(model) == ck_before);
    }

    SECTION("eval on data of another frame size exits 1 with a shape message") {
        const auto big = (dir / "big.pstj").string();
        REQUIRE(run({"generate", "--kind", "bounce", "--num", "1", "--seed", "1", "--frames", "4", "--size", "32",
                     "--out", big})
                    .code == 0);
        const auto r = run({"eval", "--ckpt", model.string(), "--data", big, "--report", (dir / "r2.json").string()});
        CHECK(r.code == 1);
        CHECK(contains(r.err, "shape mismatch"));
        CHECK_FALSE(fs::exists(dir / "r2.json"));

        const auto short_data = (dir / "short.pstj").string();
        REQUIRE(run({"generate", "--kind", "bounce", "--num", "1", "--seed", "1", "--frames", "1", "--config",
                     cfg_path, "--out", short_data})
                    .code == 0);
        const auto rp = run({"predict", "--ckpt", model.string(), "--input", short_data, "--out",
                             (dir / "p2.pstj").string()});
        CHECK(rp.code == 1);
        CHECK(contains(rp.err, "shape mismatch"));
    }
}

TEST_CASE("default output directory follows the environment", "[cli]") {
    ::setenv(kOutDirEnv, "/tmp/pastnet-env-out", 1);
    CHECK(default_out_dir() == fs::path("/tmp/pastnet-env-out"));
    CHECK(RunConfig{}.vq_path() == fs::path("/tmp/pastnet-env-out/vqvae.ckpt"));
    ::setenv(kOutDirEnv, "", 1);
    CHECK(default_out_dir() == fs::path("pastnet-out"));
    ::unsetenv(kOutDirEnv);
}
