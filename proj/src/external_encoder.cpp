#include <httplib.h>

#include <json.hpp>

#include "acci/encoding.hpp"
#include "acci/error.hpp"

namespace acci {

ExternalEncoder::ExternalEncoder(std::size_t dim, ExternalTransport transport)
    : dim_(dim), transport_(std::move(transport)) {
  if (dim_ == 0) throw ConfigError("encoder dimension must be positive");
  if (!transport_) throw ConfigError("external encoder needs a transport");
}

Matrix ExternalEncoder::forward(std::span<const std::string> tokens) const {
  if (tokens.empty()) throw ContractError("cannot encode an empty token sequence");
  nlohmann::json request;
  request["tokens"] = std::vector<std::string>(tokens.begin(), tokens.end());
  const std::string reply = transport_(request.dump());

  nlohmann::json body;
  try {
    body = nlohmann::json::parse(reply);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("external encoder returned invalid JSON: ") + e.what());
  }
  if (!body.contains("hidden") || !body["hidden"].is_array())
    throw Error("external encoder response has no 'hidden' array");
  const auto& rows = body["hidden"];
  if (rows.size() != tokens.size())
    throw Error("external encoder returned " + std::to_string(rows.size()) + " rows for " +
                std::to_string(tokens.size()) + " tokens");
  Matrix h(tokens.size(), dim_);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].is_array() || rows[i].size() != dim_)
      throw Error("external encoder row " + std::to_string(i) + " does not have " + std::to_string(dim_) + " values");
    for (std::size_t c = 0; c < dim_; ++c) {
      const double v = rows[i][c].get<double>();
      if (!std::isfinite(v)) throw Error("external encoder returned a non-finite value");
      h(i, c) = v;
    }
  }
  return h;
}

ExternalTransport http_transport(std::string host, int port, std::string path) {
  return [host = std::move(host), port, path = std::move(path)](const std::string& request) {
    httplib::Client client(host, port);
    client.set_read_timeout(120, 0);
    auto res = client.Post(path, request, "application/json");
    if (!res) throw Error("external encoder at " + host + ":" + std::to_string(port) + " is unreachable");
    if (res->status != 200) throw Error("external encoder answered HTTP " + std::to_string(res->status));
    return res->body;
  };
}

}  // namespace acci
