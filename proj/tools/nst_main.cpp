// nst: command-line front end for style-matrix extraction and NS transfer.
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nst/commands.hpp"
#include "nst/errors.hpp"
#include "nst/recipes.hpp"

namespace {

struct ConfigFlags {
  std::string config_path;
  std::string preset = "desk";
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file");
    cmd->add_option("--preset", preset, "desk, full or toy (ignored with --config)");
    cmd->add_option("--set", overrides, "override section.key=value")->take_all();
    cmd->add_option("--seed", seed, "seed for every component");
  }

  nst::Config build() const {
    nst::Config config =
        config_path.empty() ? nst::Config::preset(preset) : nst::Config::load(config_path);
    if (seed) config.set_seed(*seed);
    for (const auto& o : overrides) config.apply_override(o);
    config.validate();
    return config;
  }
};

std::vector<nst::fs::path> to_paths(const std::vector<std::string>& in) {
  return {in.begin(), in.end()};
}

void run_recipe(const std::string& kind, const nst::Config& config, std::uint64_t data_seed,
                int per_style, const std::vector<double>& rates) {
  nst::ToyTaskOptions options;
  options.config = config;
  options.data_seed = data_seed;
  options.per_style = per_style;
  options.with_domain_b = kind == "ood";
  const nst::ToyTask task = nst::build_toy_task(options);
  const auto& last = task.log.back();
  std::printf("trained %d epochs, final reconstruction loss %.4f\n", last.epoch + 1,
              last.reconstruction);
  std::printf("held-out exact reconstruction %.2f%%\n",
              nst::exact_reconstruction(task.model, task.vocab, task.held_a.lines,
                                        config.max_len));
  const bool ood = kind == "ood";
  const nst::TextCnn clf =
      nst::train_attribute_classifier(task, nst::ToyAttribute::kAttitude, true, ood);
  const auto dirs = ood ? nst::out_of_domain_directions(task) : nst::attitude_directions(task);
  std::vector<nst::SweepRow> rows;
  const std::vector<double> used = kind == "sweep" ? rates : std::vector<double>{config.drop_rate};
  for (double rate : used) rows.push_back({rate, nst::run_transfer(task, dirs, clf, rate).report});
  std::cout << nst::format_sweep(rows);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Style-matrix text style transfer"};
  app.require_subcommand(1);

  // build-vocab
  std::vector<std::string> inputs;
  std::string out;
  int min_freq = 1;
  std::optional<std::size_t> max_size;
  auto* vocab_cmd = app.add_subcommand("build-vocab", "Build a vocabulary file");
  vocab_cmd->add_option("inputs", inputs, "corpus files (.tsv = labeled)")->required();
  vocab_cmd->add_option("-o,--out", out)->required();
  vocab_cmd->add_option("--min-freq", min_freq)->check(CLI::PositiveNumber);
  vocab_cmd->add_option("--max-size", max_size);

  ConfigFlags flags;
  auto* emb_cmd = app.add_subcommand("train-embeddings", "Train CBOW word vectors");
  emb_cmd->add_option("inputs", inputs)->required();
  emb_cmd->add_option("-o,--out", out)->required();
  flags.attach(emb_cmd);

  auto* train_cmd = app.add_subcommand("train", "Train embeddings and the seq2seq model");
  train_cmd->add_option("inputs", inputs)->required();
  train_cmd->add_option("-o,--out", out)->required();
  bool quiet = false;
  train_cmd->add_flag("-q,--quiet", quiet, "no per-epoch log");
  flags.attach(train_cmd);

  std::string checkpoint, corpus, source, corpus_x, corpus_y, classifier;
  std::optional<int> label;
  double drop_rate = 0.0;
  auto* extract_cmd = app.add_subcommand("extract-style", "Compute a corpus style matrix");
  extract_cmd->add_option("--model", checkpoint)->required();
  extract_cmd->add_option("--corpus", corpus)->required();
  extract_cmd->add_option("--label", label, "keep only this label");
  extract_cmd->add_option("--drop-rate", drop_rate);
  extract_cmd->add_option("-o,--out", out)->required();

  std::optional<double> eps;
  auto* transfer_cmd = app.add_subcommand("transfer", "NS transfer from corpus X style to Y");
  transfer_cmd->add_option("--model", checkpoint)->required();
  transfer_cmd->add_option("--source", source)->required();
  transfer_cmd->add_option("--x", corpus_x, "source-style corpus")->required();
  transfer_cmd->add_option("--y", corpus_y, "target-style corpus")->required();
  transfer_cmd->add_option("--drop-rate", drop_rate);
  transfer_cmd->add_option("--eps", eps);
  transfer_cmd->add_option("-o,--out", out)->required();

  auto* recon_cmd = app.add_subcommand("reconstruct", "Autoencoder output for each sentence");
  recon_cmd->add_option("--model", checkpoint)->required();
  recon_cmd->add_option("--source", source)->required();
  recon_cmd->add_option("-o,--out", out)->required();

  auto* clf_cmd = app.add_subcommand("train-classifier", "Train the evaluation TextCNN");
  clf_cmd->add_option("--model", checkpoint, "model checkpoint supplying the vocabulary")
      ->required();
  clf_cmd->add_option("--corpus", corpus, "labeled corpus")->required();
  clf_cmd->add_option("-o,--out", out)->required();
  flags.attach(clf_cmd);

  std::string transferred;
  int target = 1;
  auto* eval_cmd = app.add_subcommand("evaluate", "Acc, BLEU, G-Score and Mean");
  eval_cmd->add_option("--classifier", classifier)->required();
  eval_cmd->add_option("--transferred", transferred)->required();
  eval_cmd->add_option("--source", source)->required();
  eval_cmd->add_option("--target", target, "target style label")->required();

  std::vector<double> rates{0.0, 0.15, 0.3, 0.45, 0.6, 0.75, 0.9};
  auto* sweep_cmd = app.add_subcommand("sweep", "Evaluate transfer over drop rates");
  sweep_cmd->add_option("--model", checkpoint)->required();
  sweep_cmd->add_option("--classifier", classifier)->required();
  sweep_cmd->add_option("--source", source)->required();
  sweep_cmd->add_option("--x", corpus_x)->required();
  sweep_cmd->add_option("--y", corpus_y)->required();
  sweep_cmd->add_option("--target", target)->required();
  sweep_cmd->add_option("--rates", rates)->delimiter(',');

  std::vector<std::string> styles;
  int k = 50;
  std::string mode = "heatmap";
  bool svg = false;
  auto* viz_cmd = app.add_subcommand("visualize", "Eigenvector heatmaps or MDS scatter");
  viz_cmd->add_option("styles", styles, "style-matrix files")->required();
  viz_cmd->add_option("-k", k)->check(CLI::PositiveNumber);
  viz_cmd->add_option("--mode", mode)->check(CLI::IsMember({"heatmap", "mds"}));
  viz_cmd->add_flag("--svg", svg);
  viz_cmd->add_option("-o,--out", out, "output path prefix")->required();

  std::string domain = "restaurant", attribute = "attitude";
  int n_per_cell = 100;
  std::uint64_t toy_seed = 1;
  std::vector<std::string> cells;
  auto* toy_cmd = app.add_subcommand("toygen", "Generate a synthetic labeled corpus");
  toy_cmd->add_option("--domain", domain)->check(CLI::IsMember({"restaurant", "product"}));
  toy_cmd->add_option("-n,--per-cell", n_per_cell)->check(CLI::PositiveNumber);
  toy_cmd->add_option("--seed", toy_seed);
  toy_cmd->add_option("--label", attribute)
      ->check(CLI::IsMember({"attitude", "tense", "intensity"}));
  toy_cmd->add_option("--cell", cells, "attitude,tense,intensity (repeatable)");
  toy_cmd->add_option("-o,--out", out)->required();

  std::string recipe = "attitude";
  ConfigFlags recipe_flags;
  recipe_flags.preset = "toy";
  std::uint64_t data_seed = 1;
  int per_style = 2000;
  auto* recipe_cmd = app.add_subcommand("recipe", "Run a synthetic-grammar experiment");
  recipe_cmd->add_option("kind", recipe)->check(CLI::IsMember({"attitude", "sweep", "ood"}));
  recipe_cmd->add_option("--data-seed", data_seed);
  recipe_cmd->add_option("--per-style", per_style);
  recipe_cmd->add_option("--rates", rates)->delimiter(',');
  recipe_flags.attach(recipe_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*vocab_cmd) {
      nst::cmd_build_vocab(to_paths(inputs), min_freq, max_size, out);
    } else if (*emb_cmd) {
      nst::cmd_train_embeddings(flags.build(), to_paths(inputs), out);
    } else if (*train_cmd) {
      for (const auto& e : nst::cmd_train(flags.build(), to_paths(inputs), out)) {
        if (quiet) continue;
        std::printf("epoch %d tf=%.3f rec=%.6f cls=%.6f total=%.6f\n", e.epoch,
                    e.teacher_forcing, e.reconstruction, e.classification, e.total);
      }
    } else if (*extract_cmd) {
      nst::cmd_extract(checkpoint, corpus, label, drop_rate, out);
    } else if (*transfer_cmd) {
      nst::cmd_transfer(checkpoint, source, corpus_x, corpus_y, drop_rate, out, eps);
    } else if (*recon_cmd) {
      nst::cmd_reconstruct(checkpoint, source, out);
    } else if (*clf_cmd) {
      nst::cmd_train_classifier(flags.build(), checkpoint, corpus, out);
    } else if (*eval_cmd) {
      const auto report = nst::cmd_evaluate(classifier, transferred, source, target);
      std::cout << report.to_json() << '\n' << report.to_table();
    } else if (*sweep_cmd) {
      std::cout << nst::format_sweep(
          nst::cmd_sweep(checkpoint, classifier, source, corpus_x, corpus_y, target, rates));
    } else if (*viz_cmd) {
      const auto m = mode == "mds" ? nst::VizMode::kMds : nst::VizMode::kHeatmap;
      for (const auto& p : nst::cmd_visualize(to_paths(styles), k, m, out, svg)) {
        std::cout << p.string() << '\n';
      }
    } else if (*recipe_cmd) {
      run_recipe(recipe, recipe_flags.build(), data_seed, per_style, rates);
    } else if (*toy_cmd) {
      nst::cmd_toygen(domain, n_per_cell, toy_seed, attribute, cells, out);
    }
  } catch (const nst::UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const nst::DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const nst::NumericError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
