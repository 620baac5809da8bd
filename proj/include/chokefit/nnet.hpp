#pragma once

// Small fully connected ReLU network mapping the choke opening u to a flow
// area, with a softplus output head and hand-written reverse-mode gradients.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include "json.hpp"

namespace chokefit::nnet {

class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class OutputHead {
  softplus,  // scale * softplus(a): non-negative area
  linear,    // scale * a
};

struct Layer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out
};

struct MlpParams {
  std::vector<Layer> layers;
  OutputHead head = OutputHead::softplus;
  double output_scale = 1e-2;  // [m2] per unit of head output

  /// Layer widths, input first: {1, 100, 100, 100, 1} for the default net.
  [[nodiscard]] std::vector<std::size_t> sizes() const;
  [[nodiscard]] std::size_t num_parameters() const noexcept;
  /// Throws std::invalid_argument when layer dimensions do not chain.
  void validate() const;
};

struct MlpGradients {
  std::vector<Layer> layers;
  double d_input = 0.0;

  /// Zero gradients with the same shape as `params`.
  static MlpGradients zeros_like(const MlpParams& params);
  void set_zero();
};

inline const std::vector<std::size_t>& default_sizes() {
  static const std::vector<std::size_t> sizes{1, 100, 100, 100, 1};
  return sizes;
}

/// He initialization: weights i.i.d. N(0, 2 / fan_in), zero biases.
MlpParams he_init(std::uint64_t seed, std::span<const std::size_t> sizes,
                  OutputHead head = OutputHead::softplus, double output_scale = 1e-2);

MlpParams zeros(std::span<const std::size_t> sizes, OutputHead head = OutputHead::softplus,
                double output_scale = 1e-2);

double forward(double u, const MlpParams& params);
std::pair<double, MlpGradients> forward_with_gradients(double u, const MlpParams& params);
double l2_norm_sq(const MlpParams& params);

/// Flat parameter layout: for each layer, weights in column-major order
/// followed by the bias.
Eigen::VectorXd flatten(const MlpParams& params);
void unflatten(std::span<const double> flat, MlpParams& params);
Eigen::VectorXd flatten(const MlpGradients& grads);

/// Batched evaluation over a set of inputs. Holds the activations of the last
/// forward pass so that backward() can accumulate parameter gradients.
class BatchEvaluator {
 public:
  /// Returns network outputs for each input; throws EvaluationError on
  /// non-finite intermediates.
  const Eigen::VectorXd& forward(std::span<const double> inputs, const MlpParams& params);

  /// Accumulates sum_j d_output[j] * d out_j / d params into `grads` and
  /// returns d out_j / d u_j scaled by d_output[j] for each input.
  Eigen::VectorXd backward(std::span<const double> d_output, const MlpParams& params,
                           MlpGradients& grads);

 private:
  std::vector<Eigen::MatrixXd> activations_;  // z_0 .. z_{K-1}
  std::vector<Eigen::MatrixXd> pre_;          // pre-activations per layer
  Eigen::VectorXd outputs_;
};

void to_json(nlohmann::json& j, const MlpParams& params);
void from_json(const nlohmann::json& j, MlpParams& params);

/// Versioned standalone container. Round trip is bit-exact.
void save(const MlpParams& params, const std::filesystem::path& path);
MlpParams load(const std::filesystem::path& path);

}  // namespace chokefit::nnet
