#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "homconv/error.hpp"
#include "homconv/homology.hpp"
#include "homconv/matrix.hpp"
#include "homconv/rng.hpp"

namespace homconv {

/// Filter counts of the two convolution levels, dropout, output classes.
struct HcnnConfig {
  int zeta = 8;   // 1st-level filters
  int xi = 32;    // 2nd-level filters
  double dropout_rate = 0.25;
  int n_classes = 2;

  void validate() const;
  friend bool operator==(const HcnnConfig&, const HcnnConfig&) = default;
};

/// A named slice of the flat parameter vector.
struct Tensor {
  std::string name;
  std::vector<std::size_t> shape;
  std::size_t offset = 0;
  std::size_t size = 0;

  friend bool operator==(const Tensor&, const Tensor&) = default;
};

/// The two-level convolution path of one nonempty simplicial family.
struct FamilyPath {
  std::string family;          // "tetrahedra", "triangles" or "edges"
  std::size_t simplex_size = 0;  // kernel = stride = k + 1
  std::size_t simplex_count = 0;  // m: 2nd-level kernel width
  std::vector<int> gather;     // flat feature indices, m * (k + 1)
  std::size_t conv1_weight = 0;  // tensor ids: zeta x (k+1)
  std::size_t conv1_bias = 0;    //             zeta
  std::size_t conv2_weight = 0;  //             xi x zeta x m
  std::size_t conv2_bias = 0;    //             xi

  friend bool operator==(const FamilyPath&, const FamilyPath&) = default;
};

/// Compiled classifier. Topology is a pure function of (families, config,
/// input_dim); all learnable scalars live in `parameters`.
struct HcnnModel {
  HcnnConfig config;
  SimplicialFamilies families;
  std::size_t input_dim = 0;
  std::vector<FamilyPath> paths;  // H, R, E order, empty families omitted
  std::vector<Tensor> tensors;
  std::size_t head_weight = 0;  // C x (xi * F)
  std::size_t head_bias = 0;    // C
  std::vector<double> parameters;

  std::span<const double> view(std::size_t tensor) const {
    return std::span<const double>(parameters).subspan(tensors[tensor].offset, tensors[tensor].size);
  }
  std::span<double> view(std::size_t tensor) {
    return std::span<double>(parameters).subspan(tensors[tensor].offset, tensors[tensor].size);
  }

  friend bool operator==(const HcnnModel&, const HcnnModel&) = default;
};

/// Raised when an activation or the loss stops being finite.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Builds the per-family paths and draws fan-in scaled uniform weights.
/// `input_dim` is the feature count of the batches the model will see.
HcnnModel compile(const SimplicialFamilies& families, const HcnnConfig& config, std::size_t input_dim,
                  std::uint64_t seed);

/// Closed-form learnable scalar count for the given topology.
std::size_t expected_param_count(const SimplicialFamilies& families, const HcnnConfig& config);
std::size_t param_count(const HcnnModel& model);

/// Intermediate activations of one forward pass, kept for backprop and for
/// inspection. Per path: conv1 is B x zeta x m, conv2 is B x xi.
struct ForwardTrace {
  struct PathTrace {
    std::vector<double> conv1_pre;
    std::vector<double> conv1_out;   // after ReLU and dropout
    std::vector<double> conv1_mask;  // dropout scale per unit (1 when inactive)
    std::vector<double> conv2_pre;
    std::vector<double> conv2_out;
    std::vector<double> conv2_mask;
  };
  std::vector<PathTrace> paths;
  Matrix hidden;  // B x (xi * F)
  Matrix logits;  // B x C
};

/// Logits for `batch` (B x input_dim). Dropout is applied only when
/// `training`; it then draws from `rng`, which must be non-null.
Matrix forward(const HcnnModel& model, const Matrix& batch, bool training, Rng* rng);
ForwardTrace forward_trace(const HcnnModel& model, const Matrix& batch, bool training, Rng* rng);

struct LossAndGradients {
  double loss = 0.0;
  std::vector<double> gradients;  // same layout as HcnnModel::parameters
};

/// Mean softmax cross-entropy over the batch and its exact gradient.
LossAndGradients loss_and_gradients(const HcnnModel& model, const Matrix& batch, std::span<const int> labels,
                                    bool training, Rng* rng);

/// Mean cross-entropy without gradients, inference mode.
double evaluate_loss(const HcnnModel& model, const Matrix& batch, std::span<const int> labels);

/// Row-wise softmax.
Matrix softmax(const Matrix& logits);

/// Row-wise argmax of logits; ties go to the smallest class index.
std::vector<int> argmax_rows(const Matrix& logits);
std::vector<int> predict(const HcnnModel& model, const Matrix& batch);

/// Self-describing JSON checkpoint (config, families, shaped tensors).
/// Doubles are written with round-trip precision, so save/load is bit exact.
void save_checkpoint(std::ostream& out, const HcnnModel& model);
HcnnModel load_checkpoint(std::istream& in);

}  // namespace homconv
