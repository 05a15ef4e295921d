#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace unfog::nn {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Named parameter with its gradient accumulator.
struct Tensor {
    std::string name;
    Matrix value;
    Matrix grad;

    Tensor() = default;
    Tensor(std::string n, Eigen::Index rows, Eigen::Index cols)
        : name(std::move(n)), value(Matrix::Zero(rows, cols)), grad(Matrix::Zero(rows, cols)) {}
    void zero_grad() { grad.setZero(); }
};

enum class Activation { ReLU, Identity };

/// Fully connected layer on batch-major inputs (batch x in).
struct DenseLayer {
    Tensor w;  // in x out
    Tensor b;  // 1 x out
    Activation act = Activation::Identity;

    DenseLayer(int in, int out, Activation activation, const std::string& name);

    Matrix forward(const Matrix& x);
    /// Propagates dLoss/dOutput, accumulates parameter grads, returns dLoss/dInput.
    Matrix backward(const Matrix& dy);

  private:
    Matrix x_cache_;
    Matrix pre_cache_;
};

/// Single LSTM layer with gates stored concatenated as [i f g o]. Processes
/// a whole window and exposes the final hidden state; backward runs full
/// backpropagation through time from the gradient at that final state.
struct LstmLayer {
    int input_size = 0;
    int hidden = 0;
    Tensor wx;  // input_size x 4H
    Tensor wh;  // H x 4H
    Tensor b;   // 1 x 4H

    LstmLayer(int input_size, int hidden, const std::string& name);

    /// One cell evaluation without touching layer caches (for unit tests).
    static void cell(const LstmLayer& layer, const Matrix& x, const Matrix& h_prev, const Matrix& c_prev,
                     Matrix& h_out, Matrix& c_out);

    Matrix forward(const std::vector<Matrix>& window);
    void backward(const Matrix& dh_final);

  private:
    struct StepCache {
        Matrix x, h_prev, c_prev;
        Matrix i, f, g, o;
        Matrix c, tanh_c;
    };
    std::vector<StepCache> steps_;
};

enum class ModelKind { DNN, LSTM };

struct ModelSpec {
    ModelKind kind = ModelKind::DNN;
    int arch_id = 0;  // 1..9 for catalog rows, 0 for custom
    std::vector<int> hidden;
    int lstm_hidden = 0;
    int lookback = 1;
    int input_width = 137;
    int output_width = 22;
    bool flatten_window = false;  // DNN variant consuming all W rows
    bool custom = false;

    /// Width of the first layer's input given the window handling.
    int effective_input() const {
        return kind == ModelKind::DNN && flatten_window ? input_width * lookback : input_width;
    }
};

/// Catalog row 1..9: five dense stacks, four LSTM-plus-dense stacks.
ModelSpec table_spec(int arch_id, int lookback);
void validate_spec(const ModelSpec& spec);
std::string spec_summary(const ModelSpec& spec);

class Network {
  public:
    Network(ModelSpec spec, std::uint64_t seed);

    const ModelSpec& spec() const { return spec_; }
    std::uint64_t init_seed() const { return init_seed_; }

    /// window: lookback matrices, each batch x input_width. DNN models use
    /// the final row (or the flattened window); LSTM models consume all rows.
    Matrix forward(const std::vector<Matrix>& window);
    void backward(const Matrix& dout);
    void zero_grad();
    std::vector<Tensor*> parameters();
    std::vector<const Tensor*> parameters() const;
    std::size_t parameter_count() const;

    void save(const std::filesystem::path& path, std::uint64_t steps = 0) const;
    static Network load(const std::filesystem::path& path, std::uint64_t* steps_out = nullptr);

  private:
    ModelSpec spec_;
    std::uint64_t init_seed_ = 0;
    std::optional<LstmLayer> lstm_;
    std::vector<DenseLayer> dense_;

    void init_parameters();
    Matrix assemble_input(const std::vector<Matrix>& window) const;
};

double mse_loss(const Matrix& prediction, const Matrix& target);
Matrix mse_grad(const Matrix& prediction, const Matrix& target);

struct AdamParams {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

class Adam {
  public:
    explicit Adam(const std::vector<Tensor*>& params, AdamParams hp = {});
    void step(const std::vector<Tensor*>& params);
    long long t() const { return t_; }

  private:
    AdamParams hp_;
    std::vector<Matrix> m_, v_;
    long long t_ = 0;
};

struct GradCheckResult {
    double max_rel_error = 0.0;
    std::string worst_param;
    long long checked = 0;
};

/// Central-difference check of every parameter gradient (or a seeded sample
/// of max_per_tensor entries per tensor when the model is large). eps must
/// lie in [1e-7, 1e-3].
GradCheckResult grad_check(Network& net, const std::vector<Matrix>& window, const Matrix& target,
                           double eps = 1e-5, int max_per_tensor = 0, std::uint64_t sample_seed = 0);

}  // namespace unfog::nn
