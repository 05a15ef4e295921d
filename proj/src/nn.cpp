#include "unfog/nn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "unfog/rng.hpp"
#include "unfog/textio.hpp"

namespace unfog::nn {

namespace {

[[noreturn]] void shape_error(const std::string& where, Eigen::Index got_r, Eigen::Index got_c,
                              Eigen::Index want_r, Eigen::Index want_c) {
    std::ostringstream os;
    os << where << ": got " << got_r << "x" << got_c << ", want " << want_r << "x" << want_c;
    throw std::invalid_argument(os.str());
}

/// Uniform fan-in init: U(-sqrt(1/fan_in), sqrt(1/fan_in)), filled in
/// row-major order from a stream keyed by the tensor name. The sqrt(6/fan_in)
/// bound collapses stacks deeper than two hidden layers on this data (most of
/// a layer's relu units die within an epoch); the smaller bound trains all
/// catalog depths cleanly.
void init_uniform(Tensor& t, int fan_in, std::uint64_t seed) {
    auto rng = seeded_rng(seed, {"init", t.name});
    const double limit = std::sqrt(1.0 / static_cast<double>(fan_in));
    double* data = t.value.data();
    const Eigen::Index n = t.value.size();
    for (Eigen::Index i = 0; i < n; ++i) data[i] = uniform_real(rng, -limit, limit);
}

Matrix sigmoid(const Matrix& z) { return ((-z.array()).exp() + 1.0).inverse().matrix(); }

}  // namespace

DenseLayer::DenseLayer(int in, int out, Activation activation, const std::string& name)
    : w(name + ".w", in, out), b(name + ".b", 1, out), act(activation) {
    if (in <= 0 || out <= 0) throw std::invalid_argument("dense layer sizes must be positive");
}

Matrix DenseLayer::forward(const Matrix& x) {
    if (x.cols() != w.value.rows()) shape_error("dense " + w.name, x.rows(), x.cols(), x.rows(), w.value.rows());
    x_cache_ = x;
    pre_cache_ = x * w.value;
    pre_cache_.rowwise() += b.value.row(0);
    if (act == Activation::ReLU) return pre_cache_.cwiseMax(0.0);
    return pre_cache_;
}

Matrix DenseLayer::backward(const Matrix& dy) {
    if (dy.rows() != pre_cache_.rows() || dy.cols() != pre_cache_.cols())
        shape_error("dense backward " + w.name, dy.rows(), dy.cols(), pre_cache_.rows(), pre_cache_.cols());
    Matrix dpre = dy;
    if (act == Activation::ReLU)
        dpre = (pre_cache_.array() > 0.0).select(dpre, Matrix::Zero(dpre.rows(), dpre.cols()));
    w.grad.noalias() += x_cache_.transpose() * dpre;
    b.grad.row(0) += dpre.colwise().sum();
    return dpre * w.value.transpose();
}

LstmLayer::LstmLayer(int input, int hidden_size, const std::string& name)
    : input_size(input),
      hidden(hidden_size),
      wx(name + ".wx", input, 4 * hidden_size),
      wh(name + ".wh", hidden_size, 4 * hidden_size),
      b(name + ".b", 1, 4 * hidden_size) {
    if (input <= 0 || hidden_size <= 0) throw std::invalid_argument("lstm sizes must be positive");
}

void LstmLayer::cell(const LstmLayer& layer, const Matrix& x, const Matrix& h_prev, const Matrix& c_prev,
                     Matrix& h_out, Matrix& c_out) {
    const int h = layer.hidden;
    if (x.cols() != layer.input_size)
        shape_error("lstm cell input", x.rows(), x.cols(), x.rows(), layer.input_size);
    if (h_prev.cols() != h || c_prev.cols() != h)
        shape_error("lstm cell state", h_prev.rows(), h_prev.cols(), x.rows(), h);
    Matrix z = x * layer.wx.value + h_prev * layer.wh.value;
    z.rowwise() += layer.b.value.row(0);
    const Matrix i = sigmoid(z.leftCols(h));
    const Matrix f = sigmoid(z.middleCols(h, h));
    const Matrix g = z.middleCols(2 * h, h).array().tanh().matrix();
    const Matrix o = sigmoid(z.rightCols(h));
    c_out = f.cwiseProduct(c_prev) + i.cwiseProduct(g);
    h_out = o.cwiseProduct(c_out.array().tanh().matrix());
}

Matrix LstmLayer::forward(const std::vector<Matrix>& window) {
    if (window.empty()) throw std::invalid_argument("lstm forward: empty window");
    const auto batch = window.front().rows();
    const int h = hidden;
    steps_.clear();
    steps_.reserve(window.size());
    Matrix h_prev = Matrix::Zero(batch, h);
    Matrix c_prev = Matrix::Zero(batch, h);
    for (const Matrix& x : window) {
        if (x.rows() != batch || x.cols() != input_size)
            shape_error("lstm forward step", x.rows(), x.cols(), batch, input_size);
        Matrix z = x * wx.value + h_prev * wh.value;
        z.rowwise() += b.value.row(0);
        StepCache sc;
        sc.x = x;
        sc.h_prev = h_prev;
        sc.c_prev = c_prev;
        sc.i = sigmoid(z.leftCols(h));
        sc.f = sigmoid(z.middleCols(h, h));
        sc.g = z.middleCols(2 * h, h).array().tanh().matrix();
        sc.o = sigmoid(z.rightCols(h));
        sc.c = sc.f.cwiseProduct(c_prev) + sc.i.cwiseProduct(sc.g);
        sc.tanh_c = sc.c.array().tanh().matrix();
        h_prev = sc.o.cwiseProduct(sc.tanh_c);
        c_prev = sc.c;
        steps_.push_back(std::move(sc));
    }
    return h_prev;
}

void LstmLayer::backward(const Matrix& dh_final) {
    if (steps_.empty()) throw std::logic_error("lstm backward before forward");
    const int h = hidden;
    const auto batch = steps_.front().x.rows();
    if (dh_final.rows() != batch || dh_final.cols() != h)
        shape_error("lstm backward", dh_final.rows(), dh_final.cols(), batch, h);

    Matrix dh = dh_final;
    Matrix dc_carry = Matrix::Zero(batch, h);
    Matrix dz(batch, 4 * h);
    for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) {
        const StepCache& sc = *it;
        // h = o * tanh(c); c = f * c_prev + i * g
        const Matrix do_ = dh.cwiseProduct(sc.tanh_c);
        const Matrix dc = dc_carry +
                          dh.cwiseProduct(sc.o).cwiseProduct(
                              (1.0 - sc.tanh_c.array().square()).matrix());
        const Matrix di = dc.cwiseProduct(sc.g);
        const Matrix df = dc.cwiseProduct(sc.c_prev);
        const Matrix dg = dc.cwiseProduct(sc.i);
        dz.leftCols(h) = di.cwiseProduct(sc.i).cwiseProduct((1.0 - sc.i.array()).matrix());
        dz.middleCols(h, h) = df.cwiseProduct(sc.f).cwiseProduct((1.0 - sc.f.array()).matrix());
        dz.middleCols(2 * h, h) = dg.cwiseProduct((1.0 - sc.g.array().square()).matrix());
        dz.rightCols(h) = do_.cwiseProduct(sc.o).cwiseProduct((1.0 - sc.o.array()).matrix());

        wx.grad.noalias() += sc.x.transpose() * dz;
        wh.grad.noalias() += sc.h_prev.transpose() * dz;
        b.grad.row(0) += dz.colwise().sum();

        dh.noalias() = dz * wh.value.transpose();
        dc_carry = dc.cwiseProduct(sc.f);
    }
}

ModelSpec table_spec(int arch_id, int lookback) {
    ModelSpec spec;
    spec.arch_id = arch_id;
    spec.lookback = lookback;
    switch (arch_id) {
        case 1: spec.kind = ModelKind::DNN; spec.hidden = {128, 64}; break;
        case 2: spec.kind = ModelKind::DNN; spec.hidden = {256, 128}; break;
        case 3: spec.kind = ModelKind::DNN; spec.hidden = {512, 256}; break;
        case 4: spec.kind = ModelKind::DNN; spec.hidden = {256, 128, 64, 32}; break;
        case 5: spec.kind = ModelKind::DNN; spec.hidden = {512, 256, 128, 64, 32}; break;
        case 6: spec.kind = ModelKind::LSTM; spec.lstm_hidden = 256; spec.hidden = {128}; break;
        case 7: spec.kind = ModelKind::LSTM; spec.lstm_hidden = 512; spec.hidden = {256}; break;
        case 8: spec.kind = ModelKind::LSTM; spec.lstm_hidden = 128; spec.hidden = {64, 32}; break;
        case 9: spec.kind = ModelKind::LSTM; spec.lstm_hidden = 512; spec.hidden = {256, 128, 32}; break;
        default: throw std::invalid_argument("architecture id must be 1..9, got " + std::to_string(arch_id));
    }
    validate_spec(spec);
    return spec;
}

void validate_spec(const ModelSpec& spec) {
    if (spec.lookback < 1) throw std::invalid_argument("lookback must be >= 1");
    if (spec.input_width <= 0 || spec.output_width <= 0)
        throw std::invalid_argument("model widths must be positive");
    if (spec.kind == ModelKind::DNN && spec.lstm_hidden != 0)
        throw std::invalid_argument("dnn spec must not carry an lstm width");
    if (spec.kind == ModelKind::LSTM && spec.lstm_hidden <= 0)
        throw std::invalid_argument("lstm spec needs a positive lstm width");
    if (spec.kind == ModelKind::LSTM && spec.flatten_window)
        throw std::invalid_argument("flatten_window applies to dnn models only");
    if (spec.custom) return;
    if (spec.arch_id < 1 || spec.arch_id > 9)
        throw std::invalid_argument("non-catalog model spec must set the custom flag");
    ModelSpec row;
    row.arch_id = spec.arch_id;
    row.lookback = spec.lookback;
    switch (spec.arch_id) {
        case 1: row.kind = ModelKind::DNN; row.hidden = {128, 64}; break;
        case 2: row.kind = ModelKind::DNN; row.hidden = {256, 128}; break;
        case 3: row.kind = ModelKind::DNN; row.hidden = {512, 256}; break;
        case 4: row.kind = ModelKind::DNN; row.hidden = {256, 128, 64, 32}; break;
        case 5: row.kind = ModelKind::DNN; row.hidden = {512, 256, 128, 64, 32}; break;
        case 6: row.kind = ModelKind::LSTM; row.lstm_hidden = 256; row.hidden = {128}; break;
        case 7: row.kind = ModelKind::LSTM; row.lstm_hidden = 512; row.hidden = {256}; break;
        case 8: row.kind = ModelKind::LSTM; row.lstm_hidden = 128; row.hidden = {64, 32}; break;
        case 9: row.kind = ModelKind::LSTM; row.lstm_hidden = 512; row.hidden = {256, 128, 32}; break;
    }
    const bool match = spec.kind == row.kind && spec.hidden == row.hidden &&
                       spec.lstm_hidden == row.lstm_hidden && spec.input_width == 137 &&
                       spec.output_width == 22;
    if (!match)
        throw std::invalid_argument("spec does not match catalog row " + std::to_string(spec.arch_id) +
                                    "; set the custom flag for ad-hoc models");
}

std::string spec_summary(const ModelSpec& spec) {
    std::ostringstream os;
    os << (spec.kind == ModelKind::LSTM ? "lstm" : "dnn");
    if (spec.arch_id > 0) os << " arch " << spec.arch_id;
    if (spec.kind == ModelKind::LSTM) os << " [" << spec.lstm_hidden << " lstm]";
    os << " hidden (";
    for (std::size_t i = 0; i < spec.hidden.size(); ++i) os << (i ? ", " : "") << spec.hidden[i];
    os << ") lookback " << spec.lookback;
    if (spec.flatten_window) os << " flattened";
    return os.str();
}

Network::Network(ModelSpec spec, std::uint64_t seed) : spec_(std::move(spec)), init_seed_(seed) {
    validate_spec(spec_);
    int width = spec_.effective_input();
    if (spec_.kind == ModelKind::LSTM) {
        lstm_.emplace(width, spec_.lstm_hidden, "lstm");
        width = spec_.lstm_hidden;
    }
    for (std::size_t i = 0; i < spec_.hidden.size(); ++i) {
        dense_.emplace_back(width, spec_.hidden[i], Activation::ReLU, "dense" + std::to_string(i));
        width = spec_.hidden[i];
    }
    dense_.emplace_back(width, spec_.output_width, Activation::Identity, "out");
    init_parameters();
}

void Network::init_parameters() {
    if (lstm_) {
        init_uniform(lstm_->wx, lstm_->input_size, init_seed_);
        init_uniform(lstm_->wh, lstm_->hidden, init_seed_);
        lstm_->b.value.setZero();
        // standard LSTM practice: bias the forget gate open at the start
        lstm_->b.value.row(0).segment(lstm_->hidden, lstm_->hidden).setConstant(1.0);
    }
    for (auto& layer : dense_) {
        init_uniform(layer.w, static_cast<int>(layer.w.value.rows()), init_seed_);
        layer.b.value.setZero();
    }
}

Matrix Network::assemble_input(const std::vector<Matrix>& window) const {
    if (static_cast<int>(window.size()) != spec_.lookback)
        throw std::invalid_argument("window has " + std::to_string(window.size()) + " rows, spec lookback is " +
                                    std::to_string(spec_.lookback));
    for (const Matrix& x : window)
        if (x.cols() != spec_.input_width)
            shape_error("network input", x.rows(), x.cols(), x.rows(), spec_.input_width);
    if (!spec_.flatten_window) return window.back();
    Matrix flat(window.front().rows(), spec_.effective_input());
    for (std::size_t t = 0; t < window.size(); ++t)
        flat.middleCols(static_cast<Eigen::Index>(t) * spec_.input_width, spec_.input_width) = window[t];
    return flat;
}

Matrix Network::forward(const std::vector<Matrix>& window) {
    Matrix h;
    if (spec_.kind == ModelKind::LSTM) {
        if (static_cast<int>(window.size()) != spec_.lookback)
            throw std::invalid_argument("window has " + std::to_string(window.size()) +
                                        " rows, spec lookback is " + std::to_string(spec_.lookback));
        h = lstm_->forward(window);
    } else {
        h = assemble_input(window);
    }
    for (auto& layer : dense_) h = layer.forward(h);
    return h;
}

void Network::backward(const Matrix& dout) {
    Matrix d = dout;
    for (auto it = dense_.rbegin(); it != dense_.rend(); ++it) d = it->backward(d);
    if (lstm_) lstm_->backward(d);
}

void Network::zero_grad() {
    for (Tensor* t : parameters()) t->zero_grad();
}

std::vector<Tensor*> Network::parameters() {
    std::vector<Tensor*> out;
    if (lstm_) {
        out.push_back(&lstm_->wx);
        out.push_back(&lstm_->wh);
        out.push_back(&lstm_->b);
    }
    for (auto& layer : dense_) {
        out.push_back(&layer.w);
        out.push_back(&layer.b);
    }
    return out;
}

std::vector<const Tensor*> Network::parameters() const {
    std::vector<const Tensor*> out;
    for (Tensor* t : const_cast<Network*>(this)->parameters()) out.push_back(t);
    return out;
}

std::size_t Network::parameter_count() const {
    std::size_t n = 0;
    for (const Tensor* t : parameters()) n += static_cast<std::size_t>(t->value.size());
    return n;
}

double mse_loss(const Matrix& prediction, const Matrix& target) {
    if (prediction.rows() != target.rows() || prediction.cols() != target.cols())
        shape_error("mse_loss", prediction.rows(), prediction.cols(), target.rows(), target.cols());
    const double n = static_cast<double>(prediction.size());
    return (prediction - target).squaredNorm() / n;
}

Matrix mse_grad(const Matrix& prediction, const Matrix& target) {
    if (prediction.rows() != target.rows() || prediction.cols() != target.cols())
        shape_error("mse_grad", prediction.rows(), prediction.cols(), target.rows(), target.cols());
    const double n = static_cast<double>(prediction.size());
    return (2.0 / n) * (prediction - target);
}

Adam::Adam(const std::vector<Tensor*>& params, AdamParams hp) : hp_(hp) {
    m_.reserve(params.size());
    v_.reserve(params.size());
    for (const Tensor* t : params) {
        m_.push_back(Matrix::Zero(t->value.rows(), t->value.cols()));
        v_.push_back(Matrix::Zero(t->value.rows(), t->value.cols()));
    }
}

void Adam::step(const std::vector<Tensor*>& params) {
    if (params.size() != m_.size()) throw std::invalid_argument("adam: parameter list changed size");
    ++t_;
    const double bc1 = 1.0 - std::pow(hp_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(hp_.beta2, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        Tensor& p = *params[i];
        if (p.grad.rows() != m_[i].rows() || p.grad.cols() != m_[i].cols())
            shape_error("adam step " + p.name, p.grad.rows(), p.grad.cols(), m_[i].rows(), m_[i].cols());
        m_[i] = hp_.beta1 * m_[i] + (1.0 - hp_.beta1) * p.grad;
        v_[i] = hp_.beta2 * v_[i] + (1.0 - hp_.beta2) * p.grad.cwiseProduct(p.grad);
        const auto m_hat = m_[i].array() / bc1;
        const auto v_hat = v_[i].array() / bc2;
        p.value.array() -= hp_.lr * m_hat / (v_hat.sqrt() + hp_.eps);
    }
}

GradCheckResult grad_check(Network& net, const std::vector<Matrix>& window, const Matrix& target, double eps,
                           int max_per_tensor, std::uint64_t sample_seed) {
    if (!(eps >= 1e-7 && eps <= 1e-3)) throw std::invalid_argument("grad_check eps must be in [1e-7, 1e-3]");

    net.zero_grad();
    const Matrix out = net.forward(window);
    net.backward(mse_grad(out, target));

    std::vector<Tensor*> params = net.parameters();
    std::vector<Matrix> analytic;
    analytic.reserve(params.size());
    for (Tensor* t : params) analytic.push_back(t->grad);

    GradCheckResult result;
    auto rng = seeded_rng(sample_seed, {"grad_check"});
    for (std::size_t pi = 0; pi < params.size(); ++pi) {
        Tensor& t = *params[pi];
        const Eigen::Index n = t.value.size();
        std::vector<Eigen::Index> indices;
        if (max_per_tensor > 0 && n > max_per_tensor) {
            std::set<Eigen::Index> chosen;
            while (static_cast<int>(chosen.size()) < max_per_tensor)
                chosen.insert(static_cast<Eigen::Index>(uniform_int(rng, 0, static_cast<long long>(n) - 1)));
            indices.assign(chosen.begin(), chosen.end());
        } else {
            indices.resize(static_cast<std::size_t>(n));
            for (Eigen::Index i = 0; i < n; ++i) indices[static_cast<std::size_t>(i)] = i;
        }
        for (Eigen::Index idx : indices) {
            double& slot = t.value.data()[idx];
            const double saved = slot;
            slot = saved + eps;
            const double up = mse_loss(net.forward(window), target);
            slot = saved - eps;
            const double down = mse_loss(net.forward(window), target);
            slot = saved;
            const double numeric = (up - down) / (2.0 * eps);
            const double a = analytic[pi].data()[idx];
            const double rel = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-3});
            ++result.checked;
            if (rel > result.max_rel_error) {
                result.max_rel_error = rel;
                result.worst_param = t.name + "[" + std::to_string(idx) + "]";
            }
        }
    }
    // leave the network in the analytic-gradient state it had on entry
    net.zero_grad();
    const Matrix out2 = net.forward(window);
    net.backward(mse_grad(out2, target));
    return result;
}

namespace {

constexpr std::string_view kModelTag = "unfog-model";

}  // namespace

void Network::save(const std::filesystem::path& path, std::uint64_t steps) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << kModelTag << " v1\n";
    out << "kind " << (spec_.kind == ModelKind::LSTM ? "lstm" : "dnn") << "\n";
    out << "arch " << spec_.arch_id << "\n";
    out << "custom " << (spec_.custom ? 1 : 0) << "\n";
    out << "lookback " << spec_.lookback << "\n";
    out << "input " << spec_.input_width << "\n";
    out << "output " << spec_.output_width << "\n";
    out << "flatten " << (spec_.flatten_window ? 1 : 0) << "\n";
    out << "lstm_hidden " << spec_.lstm_hidden << "\n";
    out << "hidden";
    for (int h : spec_.hidden) out << " " << h;
    out << "\n";
    out << "seed " << init_seed_ << "\n";
    out << "steps " << steps << "\n";
    const auto params = parameters();
    out << "tensors " << params.size() << "\n";
    for (const Tensor* t : params) {
        out << "tensor " << t->name << " " << t->value.rows() << " " << t->value.cols() << "\n";
        for (Eigen::Index r = 0; r < t->value.rows(); ++r) {
            for (Eigen::Index c = 0; c < t->value.cols(); ++c) {
                if (c) out << "\t";
                out << textio::format_double(t->value(r, c));
            }
            out << "\n";
        }
    }
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

Network Network::load(const std::filesystem::path& path, std::uint64_t* steps_out) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    auto next_line = [&](const char* what) {
        if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": truncated before " + what);
        return std::istringstream(line);
    };
    {
        auto ls = next_line("header");
        std::string tag, version;
        ls >> tag >> version;
        if (tag != kModelTag || version != "v1")
            throw std::runtime_error(path.string() + ": not a v1 model file");
    }
    ModelSpec spec;
    std::uint64_t seed = 0, steps = 0;
    std::size_t tensor_count = 0;
    auto expect_key = [&](const char* key) {
        auto ls = next_line(key);
        std::string k;
        ls >> k;
        if (k != key) throw std::runtime_error(path.string() + ": expected '" + key + "', got '" + k + "'");
        return ls;
    };
    {
        auto ls = expect_key("kind");
        std::string kind;
        ls >> kind;
        if (kind == "lstm") spec.kind = ModelKind::LSTM;
        else if (kind == "dnn") spec.kind = ModelKind::DNN;
        else throw std::runtime_error(path.string() + ": unknown kind '" + kind + "'");
    }
    expect_key("arch") >> spec.arch_id;
    int flag = 0;
    expect_key("custom") >> flag;
    spec.custom = flag != 0;
    expect_key("lookback") >> spec.lookback;
    expect_key("input") >> spec.input_width;
    expect_key("output") >> spec.output_width;
    expect_key("flatten") >> flag;
    spec.flatten_window = flag != 0;
    expect_key("lstm_hidden") >> spec.lstm_hidden;
    {
        auto ls = expect_key("hidden");
        int h;
        while (ls >> h) spec.hidden.push_back(h);
    }
    expect_key("seed") >> seed;
    expect_key("steps") >> steps;
    expect_key("tensors") >> tensor_count;

    Network net(spec, seed);
    auto params = net.parameters();
    if (params.size() != tensor_count)
        throw std::runtime_error(path.string() + ": tensor count mismatch");
    for (Tensor* t : params) {
        auto ls = expect_key("tensor");
        std::string name;
        Eigen::Index rows = 0, cols = 0;
        ls >> name >> rows >> cols;
        if (name != t->name || rows != t->value.rows() || cols != t->value.cols())
            throw std::runtime_error(path.string() + ": tensor '" + name + "' does not match spec shape");
        for (Eigen::Index r = 0; r < rows; ++r) {
            if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": truncated tensor " + name);
            auto fields = textio::split(textio::strip(line), '\t');
            if (static_cast<Eigen::Index>(fields.size()) != cols)
                throw std::runtime_error(path.string() + ": tensor " + name + " row " + std::to_string(r) +
                                         " has wrong width");
            for (Eigen::Index c = 0; c < cols; ++c)
                t->value(r, c) = textio::parse_double(fields[static_cast<std::size_t>(c)]);
        }
    }
    if (steps_out) *steps_out = steps;
    return net;
}

}  // namespace unfog::nn
