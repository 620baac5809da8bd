#include "chokefit/nnet.hpp"

#include <cmath>
#include <fstream>
#include <random>

namespace chokefit::nnet {

namespace {

constexpr const char* kFormatTag = "chokefit-mlp";
constexpr int kFormatVersion = 1;

double softplus(double a) { return a > 0.0 ? a + std::log1p(std::exp(-a)) : std::log1p(std::exp(a)); }

double sigmoid(double a) {
  if (a >= 0.0) return 1.0 / (1.0 + std::exp(-a));
  const double e = std::exp(a);
  return e / (1.0 + e);
}

void check_sizes(std::span<const std::size_t> sizes) {
  if (sizes.size() < 2) throw std::invalid_argument("network needs at least input and output sizes");
  for (std::size_t s : sizes) {
    if (s == 0) throw std::invalid_argument("layer width must be positive");
  }
  if (sizes.front() != 1 || sizes.back() != 1) {
    throw std::invalid_argument("area network maps a scalar input to a scalar output");
  }
}

std::string head_name(OutputHead h) { return h == OutputHead::softplus ? "softplus" : "linear"; }

OutputHead head_from_name(const std::string& s) {
  if (s == "softplus") return OutputHead::softplus;
  if (s == "linear") return OutputHead::linear;
  throw FormatError("unknown output head '" + s + "'");
}

}  // namespace

std::vector<std::size_t> MlpParams::sizes() const {
  std::vector<std::size_t> out;
  if (layers.empty()) return out;
  out.push_back(static_cast<std::size_t>(layers.front().weight.cols()));
  for (const Layer& l : layers) out.push_back(static_cast<std::size_t>(l.weight.rows()));
  return out;
}

std::size_t MlpParams::num_parameters() const noexcept {
  std::size_t n = 0;
  for (const Layer& l : layers) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

void MlpParams::validate() const {
  if (layers.empty()) throw std::invalid_argument("network has no layers");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const Layer& l = layers[i];
    if (l.bias.size() != l.weight.rows()) throw std::invalid_argument("bias size does not match layer width");
    if (i > 0 && l.weight.cols() != layers[i - 1].weight.rows()) {
      throw std::invalid_argument("layer dimensions do not chain");
    }
  }
  if (layers.front().weight.cols() != 1 || layers.back().weight.rows() != 1) {
    throw std::invalid_argument("area network maps a scalar input to a scalar output");
  }
}

MlpGradients MlpGradients::zeros_like(const MlpParams& params) {
  MlpGradients g;
  g.layers.reserve(params.layers.size());
  for (const Layer& l : params.layers) {
    g.layers.push_back(Layer{Eigen::MatrixXd::Zero(l.weight.rows(), l.weight.cols()),
                             Eigen::VectorXd::Zero(l.bias.size())});
  }
  return g;
}

void MlpGradients::set_zero() {
  for (Layer& l : layers) {
    l.weight.setZero();
    l.bias.setZero();
  }
  d_input = 0.0;
}

MlpParams zeros(std::span<const std::size_t> sizes, OutputHead head, double output_scale) {
  check_sizes(sizes);
  MlpParams p;
  p.head = head;
  p.output_scale = output_scale;
  for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
    const auto in = static_cast<Eigen::Index>(sizes[i]);
    const auto out = static_cast<Eigen::Index>(sizes[i + 1]);
    p.layers.push_back(Layer{Eigen::MatrixXd::Zero(out, in), Eigen::VectorXd::Zero(out)});
  }
  return p;
}

MlpParams he_init(std::uint64_t seed, std::span<const std::size_t> sizes, OutputHead head,
                  double output_scale) {
  MlpParams p = zeros(sizes, head, output_scale);
  std::mt19937_64 rng(seed);
  for (Layer& l : p.layers) {
    std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / static_cast<double>(l.weight.cols())));
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) l.weight(r, c) = dist(rng);
    }
  }
  return p;
}

const Eigen::VectorXd& BatchEvaluator::forward(std::span<const double> inputs, const MlpParams& params) {
  const auto b = static_cast<Eigen::Index>(inputs.size());
  const std::size_t depth = params.layers.size();
  activations_.resize(depth);
  pre_.resize(depth);
  activations_[0] = Eigen::Map<const Eigen::RowVectorXd>(inputs.data(), b);
  for (std::size_t l = 0; l < depth; ++l) {
    const Layer& layer = params.layers[l];
    pre_[l].noalias() = layer.weight * activations_[l];
    pre_[l].colwise() += layer.bias;
    if (l + 1 < depth) activations_[l + 1] = pre_[l].cwiseMax(0.0);
  }
  outputs_.resize(b);
  const Eigen::MatrixXd& head = pre_[depth - 1];
  for (Eigen::Index j = 0; j < b; ++j) {
    const double a = head(0, j);
    const double out = params.output_scale * (params.head == OutputHead::softplus ? softplus(a) : a);
    if (!std::isfinite(out)) throw EvaluationError("network produced a non-finite output");
    outputs_[j] = out;
  }
  return outputs_;
}

Eigen::VectorXd BatchEvaluator::backward(std::span<const double> d_output, const MlpParams& params,
                                         MlpGradients& grads) {
  const std::size_t depth = params.layers.size();
  const auto b = static_cast<Eigen::Index>(d_output.size());
  Eigen::MatrixXd delta(1, b);
  const Eigen::MatrixXd& head = pre_[depth - 1];
  for (Eigen::Index j = 0; j < b; ++j) {
    const double slope = params.head == OutputHead::softplus ? sigmoid(head(0, j)) : 1.0;
    delta(0, j) = d_output[static_cast<std::size_t>(j)] * params.output_scale * slope;
  }
  Eigen::MatrixXd upstream;
  for (std::size_t l = depth; l-- > 0;) {
    const Layer& layer = params.layers[l];
    grads.layers[l].weight.noalias() += delta * activations_[l].transpose();
    grads.layers[l].bias += delta.rowwise().sum();
    upstream.noalias() = layer.weight.transpose() * delta;
    if (l > 0) {
      // ReLU subgradient is 0 at a pre-activation of exactly 0.
      delta = upstream.cwiseProduct((pre_[l - 1].array() > 0.0).cast<double>().matrix());
    }
  }
  Eigen::VectorXd d_input = upstream.row(0).transpose();
  grads.d_input += d_input.sum();
  return d_input;
}

double forward(double u, const MlpParams& params) {
  BatchEvaluator ev;
  return ev.forward(std::span<const double>(&u, 1), params)[0];
}

std::pair<double, MlpGradients> forward_with_gradients(double u, const MlpParams& params) {
  BatchEvaluator ev;
  const double value = ev.forward(std::span<const double>(&u, 1), params)[0];
  MlpGradients grads = MlpGradients::zeros_like(params);
  const double seed = 1.0;
  ev.backward(std::span<const double>(&seed, 1), params, grads);
  return {value, std::move(grads)};
}

double l2_norm_sq(const MlpParams& params) {
  double s = 0.0;
  for (const Layer& l : params.layers) s += l.weight.squaredNorm() + l.bias.squaredNorm();
  return s;
}

Eigen::VectorXd flatten(const MlpParams& params) {
  Eigen::VectorXd flat(static_cast<Eigen::Index>(params.num_parameters()));
  Eigen::Index at = 0;
  for (const Layer& l : params.layers) {
    flat.segment(at, l.weight.size()) = Eigen::Map<const Eigen::VectorXd>(l.weight.data(), l.weight.size());
    at += l.weight.size();
    flat.segment(at, l.bias.size()) = l.bias;
    at += l.bias.size();
  }
  return flat;
}

Eigen::VectorXd flatten(const MlpGradients& grads) {
  Eigen::Index n = 0;
  for (const Layer& l : grads.layers) n += l.weight.size() + l.bias.size();
  Eigen::VectorXd flat(n);
  Eigen::Index at = 0;
  for (const Layer& l : grads.layers) {
    flat.segment(at, l.weight.size()) = Eigen::Map<const Eigen::VectorXd>(l.weight.data(), l.weight.size());
    at += l.weight.size();
    flat.segment(at, l.bias.size()) = l.bias;
    at += l.bias.size();
  }
  return flat;
}

void unflatten(std::span<const double> flat, MlpParams& params) {
  if (flat.size() != params.num_parameters()) throw std::invalid_argument("flat parameter size mismatch");
  std::size_t at = 0;
  for (Layer& l : params.layers) {
    const auto nw = static_cast<std::size_t>(l.weight.size());
    std::copy_n(flat.data() + at, nw, l.weight.data());
    at += nw;
    const auto nb = static_cast<std::size_t>(l.bias.size());
    std::copy_n(flat.data() + at, nb, l.bias.data());
    at += nb;
  }
}

void to_json(nlohmann::json& j, const MlpParams& params) {
  j = nlohmann::json::object();
  j["format"] = kFormatTag;
  j["version"] = kFormatVersion;
  j["head"] = head_name(params.head);
  j["output_scale"] = params.output_scale;
  nlohmann::json layers = nlohmann::json::array();
  for (const Layer& l : params.layers) {
    if (!l.weight.allFinite() || !l.bias.allFinite()) throw FormatError("cannot serialize non-finite parameters");
    nlohmann::json jl;
    jl["rows"] = l.weight.rows();
    jl["cols"] = l.weight.cols();
    jl["weight"] = std::vector<double>(l.weight.data(), l.weight.data() + l.weight.size());
    jl["bias"] = std::vector<double>(l.bias.data(), l.bias.data() + l.bias.size());
    layers.push_back(std::move(jl));
  }
  j["layers"] = std::move(layers);
}

void from_json(const nlohmann::json& j, MlpParams& params) {
  try {
    if (j.at("format").get<std::string>() != kFormatTag) throw FormatError("not a network parameter record");
    const int version = j.at("version").get<int>();
    if (version != kFormatVersion) {
      throw FormatError("unsupported network format version " + std::to_string(version));
    }
    MlpParams p;
    p.head = head_from_name(j.at("head").get<std::string>());
    p.output_scale = j.at("output_scale").get<double>();
    for (const auto& jl : j.at("layers")) {
      const auto rows = jl.at("rows").get<Eigen::Index>();
      const auto cols = jl.at("cols").get<Eigen::Index>();
      const auto w = jl.at("weight").get<std::vector<double>>();
      const auto b = jl.at("bias").get<std::vector<double>>();
      if (static_cast<Eigen::Index>(w.size()) != rows * cols || static_cast<Eigen::Index>(b.size()) != rows) {
        throw FormatError("layer payload does not match its declared shape");
      }
      Layer l{Eigen::Map<const Eigen::MatrixXd>(w.data(), rows, cols),
              Eigen::Map<const Eigen::VectorXd>(b.data(), rows)};
      p.layers.push_back(std::move(l));
    }
    p.validate();
    params = std::move(p);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed network record: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("malformed network record: ") + e.what());
  }
}

void save(const MlpParams& params, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  out << nlohmann::json(params).dump() << '\n';
}

MlpParams load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed network file: ") + e.what());
  }
  return j.get<MlpParams>();
}

}  // namespace chokefit::nnet
