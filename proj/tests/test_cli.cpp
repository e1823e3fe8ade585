#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>

#include "doctest.h"
#include "nst/checkpoint.hpp"
#include "nst/commands.hpp"
#include "nst/config.hpp"
#include "nst/errors.hpp"
#include "test_support.hpp"

using namespace nst;
using testing::read_file;
using testing::TempDir;
using testing::write_file;

namespace {

Config tiny_config() {
  Config c = Config::preset("toy");
  c.hidden_dim = 8;
  c.cbow.dim = 6;
  c.train.epochs = 2;
  c.textcnn.epochs = 2;
  c.textcnn.feature_maps = 4;
  return c;
}

int run(const std::string& args) {
  const std::string cmd = std::string(NST_BINARY) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string patch_version(std::string bytes, std::uint32_t version) {
  for (int i = 0; i < 4; ++i) bytes[4 + i] = static_cast<char>((version >> (8 * i)) & 0xff);
  return bytes;
}

// Small attitude corpus plus one file per polarity.
struct Workspace {
  TempDir dir{"cli"};
  fs::path all = dir / "all.tsv";
  fs::path pos = dir / "pos.tsv";
  fs::path neg = dir / "neg.tsv";

  Workspace() {
    cmd_toygen("restaurant", 10, 3, "attitude", {}, all);
    cmd_toygen("restaurant", 10, 4, "attitude", {"1,1,1", "1,0,1"}, pos);
    cmd_toygen("restaurant", 10, 5, "attitude", {"0,1,1", "0,0,1"}, neg);
  }
};

}  // namespace

TEST_CASE("checkpoint bytes survive a round trip") {
  Checkpoint ckpt;
  ckpt.config_json = R"({"k":1})";
  ckpt.vocab = {"<pad>", "<unk>", "<s>", "</s>", "naïve"};
  ckpt.put("odd", Tensor{{2, 3},
                         {-0.0, std::numeric_limits<double>::denorm_min(), 1e308, -1.0 / 3,
                          std::numeric_limits<double>::quiet_NaN(), 7}});
  ckpt.put("scalar", Tensor{{}, {42}});
  const std::string bytes = ckpt.serialize();
  CHECK(bytes.substr(0, 4) == "STYM");
  const Checkpoint back = Checkpoint::deserialize(bytes);
  CHECK(back.serialize() == bytes);
  CHECK(back.vocab == ckpt.vocab);
  CHECK(std::signbit(back.tensor("odd").values[0]));
  CHECK(std::isnan(back.tensor("odd").values[4]));

  TempDir dir("ckpt");
  ckpt.save(dir / "a.bin");
  Checkpoint::load(dir / "a.bin").save(dir / "b.bin");
  CHECK(read_file(dir / "a.bin") == read_file(dir / "b.bin"));

  CHECK_THROWS_AS(Checkpoint::deserialize(patch_version(bytes, 0)), DataError);
  CHECK_THROWS_AS(Checkpoint::deserialize(patch_version(bytes, 2)), DataError);
  CHECK_NOTHROW(Checkpoint::deserialize(patch_version(bytes, 1)));
  CHECK_THROWS_AS(Checkpoint::deserialize("STYX" + bytes.substr(4)), DataError);
  CHECK_THROWS_AS(Checkpoint::deserialize(bytes.substr(0, bytes.size() - 3)), DataError);
  CHECK_THROWS_AS(Checkpoint::deserialize(bytes + "x"), DataError);
  CHECK_THROWS_AS(ckpt.put("bad", Tensor{{2, 2}, {1, 2, 3}}), UsageError);
  CHECK_THROWS_AS(Checkpoint::load(dir / "missing.bin"), DataError);
}

TEST_CASE("config presets, overrides and json") {
  const Config desk = Config::preset("desk");
  CHECK(desk.hidden_dim == 32);
  CHECK(Config::preset("full").hidden_dim == 300);
  CHECK(Config::preset("toy").cbow.epochs == 0);
  CHECK_THROWS_AS(Config::preset("huge"), UsageError);

  Config c = desk;
  c.apply_override("train.lr=0.01");
  c.apply_override("hidden_dim=12");
  c.apply_override("textcnn.widths=[2,3]");
  CHECK(c.train.adam.lr == 0.01);
  CHECK(c.hidden_dim == 12);
  CHECK(c.textcnn.widths == std::vector<int>{2, 3});
  CHECK_THROWS_AS(c.apply_override("train.nope=1"), UsageError);
  CHECK_THROWS_AS(c.apply_override("hidden_dim"), UsageError);
  CHECK_THROWS_AS(c.apply_override("hidden_dim=\"x\""), UsageError);

  c.set_seed(9);
  CHECK(c.cbow.seed == 9);
  CHECK(c.train.seed != c.textcnn.seed);
  const Config back = Config::from_json(c.to_json());
  CHECK(back.to_json() == c.to_json());

  Config bad = desk;
  bad.drop_rate = 1.0;
  CHECK_THROWS_AS(bad.validate(), UsageError);
}

TEST_CASE("command pipeline") {
  Workspace ws;
  const Config cfg = tiny_config();
  const auto log = cmd_train(cfg, {ws.all}, ws.dir / "m1.bin");
  CHECK(log.size() == 2);
  cmd_train(cfg, {ws.all}, ws.dir / "m2.bin");
  CHECK(read_file(ws.dir / "m1.bin") == read_file(ws.dir / "m2.bin"));
  const fs::path model = ws.dir / "m1.bin";
  const Checkpoint ckpt = Checkpoint::load(model);
  CHECK(model_checkpoint(model_from_checkpoint(ckpt),
                         Vocab::from_tokens(ckpt.vocab), ckpt.config_json)
            .serialize() == ckpt.serialize());

  SUBCASE("style extraction is reproducible") {
    cmd_extract(model, ws.all, 1, 0.0, ws.dir / "s1.bin");
    cmd_extract(model, ws.pos, std::nullopt, 0.0, ws.dir / "s2.bin");
    cmd_extract(model, ws.all, 1, 0.0, ws.dir / "s3.bin");
    CHECK(read_file(ws.dir / "s1.bin") == read_file(ws.dir / "s3.bin"));
    const StyleMatrix sm = style_from_checkpoint(Checkpoint::load(ws.dir / "s1.bin"));
    CHECK(sm.n == 40);
    CHECK(sm.dim() == 8);
    CHECK_THROWS_AS(cmd_extract(model, ws.all, 7, 0.0, ws.dir / "s4.bin"), DataError);

    const auto heat = cmd_visualize({ws.dir / "s1.bin", ws.dir / "s2.bin"}, 3,
                                    VizMode::kHeatmap, ws.dir / "viz", true);
    CHECK(heat.size() == 4);
    const auto mds =
        cmd_visualize({ws.dir / "s1.bin", ws.dir / "s2.bin"}, 3, VizMode::kMds, ws.dir / "viz", false);
    REQUIRE(mds.size() == 1);
    const std::string scatter = read_file(mds[0]);
    CHECK(std::count(scatter.begin(), scatter.end(), '\n') == 7);
    CHECK(scatter.find("s1:e1") != std::string::npos);
  }

  SUBCASE("transfer onto the source style equals reconstruction") {
    cmd_transfer(model, ws.pos, ws.pos, ws.pos, 0.0, ws.dir / "same.txt");
    cmd_reconstruct(model, ws.pos, ws.dir / "rec.txt");
    CHECK(read_file(ws.dir / "same.txt") == read_file(ws.dir / "rec.txt"));
    const std::string rec = read_file(ws.dir / "rec.txt");
    CHECK(std::count(rec.begin(), rec.end(), '\n') == 20);
  }

  SUBCASE("transfer, evaluation and sweep") {
    cmd_transfer(model, ws.neg, ws.neg, ws.pos, 0.0, ws.dir / "t1.txt");
    cmd_transfer(model, ws.neg, ws.neg, ws.pos, 0.0, ws.dir / "t2.txt");
    CHECK(read_file(ws.dir / "t1.txt") == read_file(ws.dir / "t2.txt"));

    cmd_train_classifier(cfg, model, ws.all, ws.dir / "c1.bin");
    cmd_train_classifier(cfg, model, ws.all, ws.dir / "c2.bin");
    CHECK(read_file(ws.dir / "c1.bin") == read_file(ws.dir / "c2.bin"));

    const EvalReport r = cmd_evaluate(ws.dir / "c1.bin", ws.dir / "t1.txt", ws.neg, 1);
    CHECK(r.acc >= 0.0);
    CHECK(r.acc <= 100.0);
    CHECK(r.g_score == doctest::Approx(std::sqrt(r.acc * r.bleu)));
    write_file(ws.dir / "short.txt", "a\n");
    CHECK_THROWS_AS(cmd_evaluate(ws.dir / "c1.bin", ws.dir / "short.txt", ws.neg, 1), DataError);

    const auto rows = cmd_sweep(model, ws.dir / "c1.bin", ws.neg, ws.neg, ws.pos, 1,
                                {0.0, 0.3, 0.6});
    REQUIRE(rows.size() == 3);
    CHECK(rows[1].drop_rate == 0.3);
    CHECK(rows[0].report.acc == doctest::Approx(r.acc));
    const std::string table = format_sweep(rows);
    CHECK(std::count(table.begin(), table.end(), '\n') == 4);
    CHECK(table.find("drop_rate") != std::string::npos);
  }
}

TEST_CASE("toygen command is seeded") {
  TempDir dir("cli");
  cmd_toygen("product", 5, 2, "tense", {}, dir / "a.tsv");
  cmd_toygen("product", 5, 2, "tense", {}, dir / "b.tsv");
  CHECK(read_file(dir / "a.tsv") == read_file(dir / "b.tsv"));
  const std::string text = read_file(dir / "a.tsv");
  CHECK(std::count(text.begin(), text.end(), '\n') == 40);
  CHECK_THROWS_AS(cmd_toygen("garden", 5, 2, "tense", {}, dir / "c.tsv"), UsageError);
  CHECK_THROWS_AS(cmd_toygen("product", 5, 2, "tense", {"1,1"}, dir / "c.tsv"), UsageError);
}

TEST_CASE("binary exit codes") {
  TempDir dir("cli");
  const std::string d = dir.path().string();
  CHECK(run("") == 1);
  CHECK(run("frobnicate") == 1);
  CHECK(run("toygen --bogus -o " + d + "/x.tsv") == 1);
  CHECK(run("toygen -n 5 --seed 3 -o " + d + "/a.tsv") == 0);
  CHECK(run("toygen -n 5 --seed 3 -o " + d + "/b.tsv") == 0);
  CHECK(read_file(dir / "a.tsv") == read_file(dir / "b.tsv"));
  cmd_toygen("restaurant", 5, 3, "attitude", {}, dir / "c.tsv");
  CHECK(read_file(dir / "a.tsv") == read_file(dir / "c.tsv"));

  CHECK(run("train " + d + "/missing.txt -q -o " + d + "/m.bin") == 2);
  CHECK(run("train " + d + "/a.tsv -q --preset toy --set train.nope=1 -o " + d + "/m.bin") == 1);
  CHECK(run("train " + d + "/a.tsv -q --preset toy --set hidden_dim=8 --set train.epochs=1 -o " +
            d + "/m.bin") == 0);
  CHECK(run("extract-style --model " + d + "/a.tsv --corpus " + d + "/a.tsv -o " + d + "/s.bin") ==
        2);

  // Poisoned weights make every semantic vector non-finite.
  Checkpoint ckpt = Checkpoint::load(dir / "m.bin");
  Eigen::MatrixXd w = ckpt.matrix("embeddings");
  w.setConstant(std::numeric_limits<double>::quiet_NaN());
  ckpt.put_matrix("embeddings", w);
  ckpt.save(dir / "nan.bin");
  CHECK(run("extract-style --model " + d + "/nan.bin --corpus " + d + "/a.tsv -o " + d +
            "/s.bin") == 3);
}
