#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nst/bleu.hpp"
#include "nst/checkpoint.hpp"
#include "nst/commands.hpp"
#include "nst/errors.hpp"
#include "nst/metrics.hpp"
#include "nst/toygen.hpp"
#include "nst/transfer.hpp"
#include "nst/viz.hpp"

namespace py = pybind11;
using namespace nst;

namespace {

std::vector<Tokens> tokenize_all(const std::vector<std::string>& lines) {
  std::vector<Tokens> out;
  out.reserve(lines.size());
  for (const auto& l : lines) out.push_back(tokenize(l));
  return out;
}

// A trained checkpoint with its vocabulary.
class Model {
 public:
  explicit Model(const std::string& path) {
    const Checkpoint ckpt = Checkpoint::load(path);
    model_ = model_from_checkpoint(ckpt);
    vocab_ = Vocab::from_tokens(ckpt.vocab);
  }

  Eigen::VectorXd encode(const std::string& text) const {
    const Tokens toks = tokenize(text);
    return nst::encode(model_, encode_text(vocab_, toks));
  }

  std::string decode(const Eigen::VectorXd& z, int max_len) const {
    return render(strip_eos(decode_greedy(model_, z, max_len)));
  }

  std::vector<std::string> reconstruct(const std::vector<std::string>& lines, int max_len) const {
    return render_all(reconstruct_sentences(model_, sentences(lines), max_len));
  }

  std::vector<std::string> transfer(const std::vector<std::string>& lines,
                                    const std::vector<std::string>& corpus_x,
                                    const std::vector<std::string>& corpus_y, double eps,
                                    int max_len) const {
    const TransferOperatorPair pair =
        make_operator_pair(corpus_style(model_, corpus(corpus_x, "x")),
                           corpus_style(model_, corpus(corpus_y, "y")), eps, "x", "y");
    return render_all(transfer_sentences(model_, pair, sentences(lines), max_len));
  }

  std::size_t vocab_size() const { return vocab_.size(); }
  int hidden_dim() const { return model_.hidden_dim(); }

 private:
  LabeledCorpus corpus(const std::vector<std::string>& lines, std::string name) const {
    return encode_corpus_lines(RawCorpus{tokenize_all(lines), std::nullopt}, vocab_,
                               std::move(name));
  }
  std::vector<Sentence> sentences(const std::vector<std::string>& lines) const {
    return corpus(lines, "input").sentences;
  }
  std::string render(const std::vector<TokenId>& ids) const {
    return join_tokens(decode_ids(vocab_, ids));
  }
  std::vector<std::string> render_all(const std::vector<std::vector<TokenId>>& outs) const {
    std::vector<std::string> r;
    for (const auto& ids : outs) r.push_back(render(ids));
    return r;
  }

  Seq2SeqModel model_;
  Vocab vocab_;
};

}  // namespace

PYBIND11_MODULE(_nst, m) {
  m.doc() = "Style matrices and Neutralization-Stylization transfer";

  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  py::class_<StyleMatrix>(m, "StyleMatrix")
      .def_readonly("cov", &StyleMatrix::cov)
      .def_readonly("mean", &StyleMatrix::mean)
      .def_readonly("n", &StyleMatrix::n);

  m.def("style_matrix", &compute_style_matrix, py::arg("z"),
        "Style matrix of the columns of z (d x N).");
  m.def(
      "symmetric_eigen",
      [](const Eigen::MatrixXd& s) {
        const EigenFactorization ef = symmetric_eigen(s);
        return py::make_tuple(ef.values, ef.vectors);
      },
      py::arg("s"), "Descending eigenvalues and eigenvector columns of a PSD matrix.");
  m.def(
      "neutralize",
      [](const StyleMatrix& source, const Eigen::MatrixXd& z, double eps) {
        return neutralize(make_neutralizer(source, eps), z);
      },
      py::arg("source"), py::arg("z"), py::arg("eps") = kDefaultClampEps);
  m.def(
      "stylize",
      [](const StyleMatrix& target, const Eigen::MatrixXd& z, double eps) {
        return stylize(make_stylizer(target, eps), z);
      },
      py::arg("target"), py::arg("z"), py::arg("eps") = kDefaultClampEps);

  m.def(
      "bleu",
      [](const std::vector<std::string>& candidates, const std::vector<std::string>& references) {
        return bleu(tokenize_all(candidates), tokenize_all(references));
      },
      py::arg("candidates"), py::arg("references"));
  m.def(
      "aggregate",
      [](double acc, double bleu) {
        const EvalReport r = aggregate(acc, bleu);
        py::dict d;
        d["acc"] = r.acc;
        d["bleu"] = r.bleu;
        d["g_score"] = r.g_score;
        d["mean"] = r.mean;
        return d;
      },
      py::arg("acc"), py::arg("bleu"));
  m.def(
      "classical_mds",
      [](const Eigen::MatrixXd& points, int out_dim) {
        return classical_mds(points, std::vector<std::string>(points.rows()), out_dim).points;
      },
      py::arg("points"), py::arg("out_dim") = 2);

  m.def(
      "toygen",
      [](const std::string& domain, int n_per_cell, std::uint64_t seed,
         const std::string& attribute) {
        const ToyGrammar g = domain == "product" ? ToyGrammar::product(seed)
                             : domain == "restaurant"
                                 ? ToyGrammar::restaurant(seed)
                                 : throw UsageError("unknown toy domain: " + domain);
        const ToyAttribute attr = attribute == "tense"       ? ToyAttribute::kTense
                                  : attribute == "intensity" ? ToyAttribute::kIntensity
                                  : attribute == "attitude"
                                      ? ToyAttribute::kAttitude
                                      : throw UsageError("unknown attribute: " + attribute);
        const ToyCorpus c = generate(g, n_per_cell, all_cells());
        std::vector<std::string> lines;
        for (const auto& l : c.lines) lines.push_back(join_tokens(l));
        return py::make_tuple(lines, c.labels(attr));
      },
      py::arg("domain") = "restaurant", py::arg("n_per_cell") = 10, py::arg("seed") = 1,
      py::arg("attribute") = "attitude", "Synthetic review sentences and their labels.");

  m.def(
      "train",
      [](const std::vector<std::string>& inputs, const std::string& out, const std::string& preset,
         const std::vector<std::string>& overrides) {
        Config config = Config::preset(preset);
        for (const auto& o : overrides) config.apply_override(o);
        config.validate();
        std::vector<fs::path> paths(inputs.begin(), inputs.end());
        std::vector<double> losses;
        for (const auto& e : cmd_train(config, paths, out)) losses.push_back(e.total);
        return losses;
      },
      py::arg("inputs"), py::arg("out"), py::arg("preset") = "toy",
      py::arg("overrides") = std::vector<std::string>{},
      "Trains a model checkpoint on corpus files; returns the per-epoch loss.");

  py::class_<Model>(m, "Model")
      .def(py::init<const std::string&>(), py::arg("path"))
      .def("encode", &Model::encode, py::arg("text"))
      .def("decode", &Model::decode, py::arg("z"), py::arg("max_len") = 30)
      .def("reconstruct", &Model::reconstruct, py::arg("lines"), py::arg("max_len") = 30)
      .def("transfer", &Model::transfer, py::arg("lines"), py::arg("corpus_x"),
           py::arg("corpus_y"), py::arg("eps") = kDefaultClampEps, py::arg("max_len") = 30)
      .def_property_readonly("vocab_size", &Model::vocab_size)
      .def_property_readonly("hidden_dim", &Model::hidden_dim);
}
