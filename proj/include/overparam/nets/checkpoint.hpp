#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "overparam/nets/three_layer.hpp"
#include "overparam/nets/two_layer.hpp"

namespace overparam {

namespace detail {
template <class Derived>
nlohmann::json matrix_to_json(const Eigen::MatrixBase<Derived>& m) {
  nlohmann::json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  auto& data = j["data"] = nlohmann::json::array();
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) data.push_back(static_cast<double>(m(r, c)));
  return j;
}

template <class S>
MatrixT<S> matrix_from_json(const nlohmann::json& j) {
  const Index rows = j.at("rows").get<Index>(), cols = j.at("cols").get<Index>();
  const auto& data = j.at("data");
  require_input(static_cast<Index>(data.size()) == rows * cols, "checkpoint: array size mismatch");
  MatrixT<S> m(rows, cols);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) m(r, c) = static_cast<S>(data[static_cast<std::size_t>(r * cols + c)].get<double>());
  return m;
}

template <class S>
VectorT<S> vector_from_json(const nlohmann::json& j) {
  const MatrixT<S> m = matrix_from_json<S>(j);
  return Eigen::Map<const VectorT<S>>(m.data(), m.size());
}

template <class S>
const char* scalar_name() {
  return sizeof(S) == sizeof(float) ? "float32" : "float64";
}
}  // namespace detail

// Doubles are written with round-trip precision, so load(save(net)) is bit-exact.
template <class S>
nlohmann::json to_json(const TwoLayerNet<S>& net) {
  nlohmann::json j;
  j["arch"] = "2layer";
  j["scalar"] = detail::scalar_name<S>();
  j["dims"] = {{"m", net.m()}, {"d", net.d()}, {"k", net.k()}};
  j["profile"] = to_string(net.profile);
  j["seed"] = net.seed;
  j["eps_a"] = net.eps_a;
  j["w0"] = detail::matrix_to_json(net.w0);
  j["w_delta"] = detail::matrix_to_json(net.w_delta);
  j["b"] = detail::matrix_to_json(net.b);
  j["a"] = detail::matrix_to_json(net.a);
  return j;
}

template <class S>
nlohmann::json to_json(const ThreeLayerNet<S>& net) {
  nlohmann::json j;
  j["arch"] = "3layer";
  j["scalar"] = detail::scalar_name<S>();
  j["dims"] = {{"m1", net.m1()}, {"m2", net.m2()}, {"d", net.d()}, {"k", net.k()}};
  j["profile"] = to_string(net.profile);
  j["seed"] = net.seed;
  j["lambda"] = net.lambda;
  j["w0"] = detail::matrix_to_json(net.w0);
  j["w_delta"] = detail::matrix_to_json(net.w_delta);
  j["v0"] = detail::matrix_to_json(net.v0);
  j["v_delta"] = detail::matrix_to_json(net.v_delta);
  j["b1"] = detail::matrix_to_json(net.b1);
  j["b2"] = detail::matrix_to_json(net.b2);
  j["a"] = detail::matrix_to_json(net.a);
  return j;
}

template <class S>
TwoLayerNet<S> two_layer_from_json(const nlohmann::json& j) {
  require_input(j.at("arch") == "2layer", "checkpoint: not a two-layer net");
  TwoLayerNet<S> net;
  net.profile = profile_from_string(j.at("profile").get<std::string>());
  net.seed = j.at("seed").get<std::uint64_t>();
  net.eps_a = j.at("eps_a").get<double>();
  net.w0 = detail::matrix_from_json<S>(j.at("w0"));
  net.w_delta = detail::matrix_from_json<S>(j.at("w_delta"));
  net.b = detail::vector_from_json<S>(j.at("b"));
  net.a = detail::matrix_from_json<S>(j.at("a"));
  return net;
}

template <class S>
ThreeLayerNet<S> three_layer_from_json(const nlohmann::json& j) {
  require_input(j.at("arch") == "3layer", "checkpoint: not a three-layer net");
  ThreeLayerNet<S> net;
  net.profile = profile_from_string(j.at("profile").get<std::string>());
  net.seed = j.at("seed").get<std::uint64_t>();
  net.lambda = j.at("lambda").get<double>();
  net.w0 = detail::matrix_from_json<S>(j.at("w0"));
  net.w_delta = detail::matrix_from_json<S>(j.at("w_delta"));
  net.v0 = detail::matrix_from_json<S>(j.at("v0"));
  net.v_delta = detail::matrix_from_json<S>(j.at("v_delta"));
  net.b1 = detail::vector_from_json<S>(j.at("b1"));
  net.b2 = detail::vector_from_json<S>(j.at("b2"));
  net.a = detail::matrix_from_json<S>(j.at("a"));
  return net;
}

inline void save_json(const nlohmann::json& j, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw InvalidInput("cannot open " + path);
  os << j.dump() << '\n';
}

inline nlohmann::json load_json(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InvalidInput("cannot open " + path);
  return nlohmann::json::parse(is);
}

}  // namespace overparam
