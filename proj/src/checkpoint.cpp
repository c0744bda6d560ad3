#include "acci/checkpoint.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "acci/error.hpp"

namespace acci {

namespace {

using nlohmann::json;

json matrix_json(const Matrix& m) {
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::vector<double>(m.flat().begin(), m.flat().end())}};
}

void read_matrix(const json& j, Matrix& m, const char* name) {
  const auto rows = j.at("rows").get<std::size_t>(), cols = j.at("cols").get<std::size_t>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (rows != m.rows() || cols != m.cols() || data.size() != rows * cols)
    throw ValidationError(std::string("checkpoint array '") + name + "' has the wrong shape");
  std::copy(data.begin(), data.end(), m.flat().begin());
}

void read_vector(const json& j, Vector& v, const char* name) {
  auto data = j.get<std::vector<double>>();
  if (data.size() != v.size()) throw ValidationError(std::string("checkpoint array '") + name + "' has the wrong size");
  v = std::move(data);
}

}  // namespace

std::string checkpoint_json(const Model& model, const PipelineConfig& config) {
  json j;
  j["format"] = "acci-checkpoint";
  j["version"] = 1;
  j["seed"] = config.seed;
  j["config"] = config_text(config);
  j["context"] = model.window == ContextWindow::sentence ? "sentence" : "document";

  const PairHeads& h = model.heads;
  j["heads"] = {{"dim", h.dim},
                {"hidden", h.hidden},
                {"w", matrix_json(h.w)},
                {"w_p", h.w_p},
                {"b_p", h.b_p},
                {"w_f", matrix_json(h.w_f)},
                {"w_e", h.w_e},
                {"b_e", h.b_e},
                {"phi_c", h.phi_c},
                {"w_arg", h.w_arg},
                {"b_arg", h.b_arg},
                {"phi_e", h.phi_e}};

  if (const ToyEncoder* toy = model.toy()) {
    j["encoder"] = {{"backend", "toy"},
                    {"dim", toy->dim()},
                    {"oov_buckets", toy->oov_buckets()},
                    {"vocabulary", toy->vocabulary()},
                    {"embeddings", matrix_json(toy->embeddings())},
                    {"layers", json::array()}};
    for (const ToyLayer& l : toy->layers())
      j["encoder"]["layers"].push_back(
          {{"wq", matrix_json(l.wq)}, {"wk", matrix_json(l.wk)}, {"wv", matrix_json(l.wv)}});
  } else {
    j["encoder"] = {{"backend", model.encoder().name()}, {"dim", model.encoder().dim()}};
  }
  return j.dump();
}

Checkpoint parse_checkpoint(const std::string& text) {
  try {
    const json j = json::parse(text);
    if (j.value("format", "") != "acci-checkpoint") throw ValidationError("not an acci checkpoint");
    std::istringstream cfg(j.at("config").get<std::string>());
    PipelineConfig config = parse_config(cfg);

    const json& hj = j.at("heads");
    PairHeads h = PairHeads::zeros(hj.at("dim").get<std::size_t>(), hj.at("hidden").get<std::size_t>());
    read_matrix(hj.at("w"), h.w, "w");
    read_vector(hj.at("w_p"), h.w_p, "w_p");
    h.b_p = hj.at("b_p").get<double>();
    read_matrix(hj.at("w_f"), h.w_f, "w_f");
    read_vector(hj.at("w_e"), h.w_e, "w_e");
    h.b_e = hj.at("b_e").get<double>();
    read_vector(hj.at("phi_c"), h.phi_c, "phi_c");
    read_vector(hj.at("w_arg"), h.w_arg, "w_arg");
    h.b_arg = hj.at("b_arg").get<double>();
    read_vector(hj.at("phi_e"), h.phi_e, "phi_e");

    const json& ej = j.at("encoder");
    const auto backend = ej.at("backend").get<std::string>();
    const auto dim = ej.at("dim").get<std::size_t>();
    std::unique_ptr<EncoderBackend> encoder;
    if (backend == "toy") {
      const json& lj = ej.at("layers");
      if (!lj.is_array() || lj.empty()) throw ValidationError("checkpoint encoder has no layers");
      auto toy = std::make_unique<ToyEncoder>(ej.at("vocabulary").get<std::vector<std::string>>(), dim, 0,
                                              ej.at("oov_buckets").get<std::size_t>(), lj.size());
      read_matrix(ej.at("embeddings"), toy->embeddings(), "embeddings");
      for (std::size_t l = 0; l < lj.size(); ++l) {
        ToyLayer& w = toy->layers()[l];
        read_matrix(lj[l].at("wq"), w.wq, "wq");
        read_matrix(lj[l].at("wk"), w.wk, "wk");
        read_matrix(lj[l].at("wv"), w.wv, "wv");
      }
      encoder = std::move(toy);
    } else if (backend == "external") {
      encoder = std::make_unique<ExternalEncoder>(
          dim, http_transport(config.external_host, config.external_port, config.external_path));
    } else {
      throw ValidationError("checkpoint names unknown encoder backend '" + backend + "'");
    }
    const ContextWindow window = parse_context_window(j.value("context", std::string("sentence")));
    return {Model(std::move(encoder), std::move(h), window), std::move(config)};
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint(const std::string& path, const Model& model, const PipelineConfig& config) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write checkpoint " + path);
  out << checkpoint_json(model, config) << '\n';
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("checkpoint " + path + " does not exist; train one first with `acci train`");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_checkpoint(buf.str());
}

}  // namespace acci
