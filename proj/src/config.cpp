#include "acci/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "acci/error.hpp"

namespace acci {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used == v.size()) return x;
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": '" + v + "' is not a number");
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  std::uint64_t x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw ConfigError(key + ": '" + v + "' is not a non-negative integer");
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": '" + v + "' is not a boolean");
}

// Shortest text that reads back to the same double.
std::string fmt(double x) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "encoder.backend",     "encoder.dim",         "encoder.layers",      "encoder.oov_buckets", "encoder.context",
      "encoder.external.host", "encoder.external.port", "encoder.external.path", "heads.hidden",
      "train.lr_encoder",    "train.lr_heads",      "train.weight_decay",  "train.alpha",
      "train.batch_size",    "train.epochs",        "train.loss",          "train.bias_head",
      "infer.alpha",         "infer.beta",          "cluster.tau",         "cluster.link",
      "cluster.gate",        "pairs.scope",         "pairs.filter_mode",   "pairs.keep_nonmatch_rate",
      "pairs.oracle",        "pairs.filter_train",  "pairs.filter_eval",   "seed"};
  return keys;
}

void apply_setting(PipelineConfig& c, const std::string& key, const std::string& value) {
  const std::string& v = value;
  if (key == "encoder.backend") {
    if (v != "toy" && v != "external") throw ConfigError("encoder.backend must be toy or external");
    c.encoder_backend = v;
  } else if (key == "encoder.dim") {
    c.encoder_dim = to_uint(key, v);
  } else if (key == "encoder.layers") {
    c.encoder_layers = to_uint(key, v);
  } else if (key == "encoder.oov_buckets") {
    c.oov_buckets = to_uint(key, v);
  } else if (key == "encoder.context") {
    c.context = parse_context_window(v);
  } else if (key == "encoder.external.host") {
    c.external_host = v;
  } else if (key == "encoder.external.port") {
    c.external_port = static_cast<int>(to_uint(key, v));
  } else if (key == "encoder.external.path") {
    c.external_path = v;
  } else if (key == "heads.hidden") {
    c.heads_hidden = to_uint(key, v);
  } else if (key == "train.lr_encoder") {
    c.train.lr_encoder = to_double(key, v);
  } else if (key == "train.lr_heads") {
    c.train.lr_heads = to_double(key, v);
  } else if (key == "train.weight_decay") {
    c.train.weight_decay = to_double(key, v);
  } else if (key == "train.alpha") {
    c.train.alpha_train = to_double(key, v);
  } else if (key == "train.batch_size") {
    c.train.batch_size = to_uint(key, v);
  } else if (key == "train.epochs") {
    c.train.epochs = to_uint(key, v);
  } else if (key == "train.loss") {
    c.train.loss_kind = parse_loss_kind(v);
  } else if (key == "train.bias_head") {
    c.train.train_bias_head = to_bool(key, v);
  } else if (key == "infer.alpha") {
    if (v == "auto") c.alpha_infer.reset();
    else c.alpha_infer = to_double(key, v);
  } else if (key == "infer.beta") {
    c.beta = to_double(key, v);
  } else if (key == "cluster.tau") {
    c.cluster.tau = to_double(key, v);
  } else if (key == "cluster.link") {
    c.cluster.link = parse_link_mode(v);
  } else if (key == "cluster.gate") {
    c.gate = to_double(key, v);
  } else if (key == "pairs.scope") {
    c.scope = parse_pair_scope(v);
  } else if (key == "pairs.filter_mode") {
    c.filter_mode = parse_filter_mode(v);
  } else if (key == "pairs.keep_nonmatch_rate") {
    c.keep_nonmatch_rate = to_double(key, v);
  } else if (key == "pairs.oracle") {
    c.oracle_filter = to_bool(key, v);
  } else if (key == "pairs.filter_train") {
    c.filter_train = to_bool(key, v);
  } else if (key == "pairs.filter_eval") {
    c.filter_eval = to_bool(key, v);
  } else if (key == "seed") {
    c.seed = to_uint(key, v);
    c.train.seed = c.seed;
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

PipelineConfig parse_config(std::istream& in, PipelineConfig base) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    apply_setting(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  validate(base);
  return base;
}

PipelineConfig load_config(const std::string& path, PipelineConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  return parse_config(in, std::move(base));
}

std::string config_text(const PipelineConfig& c) {
  std::ostringstream out;
  out << "encoder.backend = " << c.encoder_backend << '\n'
      << "encoder.dim = " << c.encoder_dim << '\n'
      << "encoder.layers = " << c.encoder_layers << '\n'
      << "encoder.oov_buckets = " << c.oov_buckets << '\n'
      << "encoder.context = " << (c.context == ContextWindow::sentence ? "sentence" : "document") << '\n'
      << "encoder.external.host = " << c.external_host << '\n'
      << "encoder.external.port = " << c.external_port << '\n'
      << "encoder.external.path = " << c.external_path << '\n'
      << "heads.hidden = " << c.heads_hidden << '\n'
      << "train.lr_encoder = " << fmt(c.train.lr_encoder) << '\n'
      << "train.lr_heads = " << fmt(c.train.lr_heads) << '\n'
      << "train.weight_decay = " << fmt(c.train.weight_decay) << '\n'
      << "train.alpha = " << fmt(c.train.alpha_train) << '\n'
      << "train.batch_size = " << c.train.batch_size << '\n'
      << "train.epochs = " << c.train.epochs << '\n'
      << "train.loss = " << to_string(c.train.loss_kind) << '\n'
      << "train.bias_head = " << (c.train.train_bias_head ? "true" : "false") << '\n'
      << "infer.alpha = " << (c.alpha_infer ? fmt(*c.alpha_infer) : std::string("auto")) << '\n'
      << "infer.beta = " << fmt(c.beta) << '\n'
      << "cluster.tau = " << fmt(c.cluster.tau) << '\n'
      << "cluster.link = " << to_string(c.cluster.link) << '\n'
      << "cluster.gate = " << fmt(c.gate) << '\n'
      << "pairs.scope = " << to_string(c.scope) << '\n'
      << "pairs.filter_mode = " << to_string(c.filter_mode) << '\n'
      << "pairs.keep_nonmatch_rate = " << fmt(c.keep_nonmatch_rate) << '\n'
      << "pairs.oracle = " << (c.oracle_filter ? "true" : "false") << '\n'
      << "pairs.filter_train = " << (c.filter_train ? "true" : "false") << '\n'
      << "pairs.filter_eval = " << (c.filter_eval ? "true" : "false") << '\n'
      << "seed = " << c.seed << '\n';
  return out.str();
}

void validate(const PipelineConfig& c) {
  if (c.encoder_dim == 0 || c.heads_hidden == 0) throw ConfigError("encoder.dim and heads.hidden must be positive");
  if (c.oov_buckets == 0) throw ConfigError("encoder.oov_buckets must be positive");
  if (c.encoder_layers == 0) throw ConfigError("encoder.layers must be positive");
  validate(c.train);
  if (c.alpha_infer && !(*c.alpha_infer >= 0.0)) throw ConfigError("infer.alpha must be >= 0");
  if (!(c.beta >= 0.0)) throw ConfigError("infer.beta must be >= 0");
  if (!(c.keep_nonmatch_rate >= 0.0 && c.keep_nonmatch_rate <= 1.0))
    throw ConfigError("pairs.keep_nonmatch_rate must lie in [0,1]");
}

PipelineConfig synthetic_experiment_config() {
  PipelineConfig c;
  c.encoder_dim = 32;
  c.heads_hidden = 32;
  c.encoder_layers = 2;
  c.train.lr_encoder = 3e-3;
  c.train.lr_heads = 1e-2;
  c.train.alpha_train = 0.3;
  c.train.batch_size = 16;
  c.train.epochs = 8;
  c.beta = 0.25;
  c.seed = 7;
  c.train.seed = 7;
  return c;
}

}  // namespace acci
