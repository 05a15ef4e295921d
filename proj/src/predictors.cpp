#include "unfog/predictors.hpp"

#include <stdexcept>

#include "unfog/belief.hpp"
#include "unfog/scaling.hpp"
#include "unfog/train.hpp"

namespace unfog {

Predictor Predictor::last_seen() { return Predictor(PredictorKind::LastSeen, "last_seen"); }

Predictor Predictor::velocity_extrapolation() {
    return Predictor(PredictorKind::VelocityExtrapolation, "velocity_extrapolation");
}

Predictor Predictor::model(std::shared_ptr<nn::Network> net, std::string name) {
    if (!net) throw std::invalid_argument("model predictor needs a network");
    if (name.empty()) {
        const auto& spec = net->spec();
        name = (spec.kind == nn::ModelKind::LSTM ? "lstm" : "dnn");
        if (spec.arch_id > 0) name += "_arch" + std::to_string(spec.arch_id);
        name += "_w" + std::to_string(spec.lookback);
    }
    Predictor p(PredictorKind::Model, std::move(name));
    p.net_ = std::move(net);
    return p;
}

namespace {

Prediction from_final_row(const Dataset& ds, const Dataset::Sample& s, bool extrapolate) {
    const double* row = ds.last_input_row(s);
    Prediction pred;
    for (int i = 0; i < kPlayersPerTeam; ++i) {
        const auto off = static_cast<std::size_t>(schema::left_offset(i));
        Vec2 p{unscale(row[off], domains::position_x()), unscale(row[off + 1], domains::position_y())};
        const int pc = s.meta.opponent_pos_count[static_cast<std::size_t>(i)];
        if (extrapolate && pc < kMaxPosCount) {
            const Vec2 v{unscale(row[off + 2], domains::velocity()), unscale(row[off + 3], domains::velocity())};
            p = field::clamp(p + v * static_cast<double>(pc));
        }
        pred.position[static_cast<std::size_t>(i)] = p;
        pred.known[static_cast<std::size_t>(i)] = pc < kMaxPosCount;
    }
    return pred;
}

}  // namespace

Prediction Predictor::predict(const Dataset& ds, std::size_t sample_idx) const {
    return predict_batch(ds, {sample_idx}).front();
}

std::vector<Prediction> Predictor::predict_batch(const Dataset& ds,
                                                 const std::vector<std::size_t>& sample_idx) const {
    std::vector<Prediction> out;
    out.reserve(sample_idx.size());
    if (kind_ != PredictorKind::Model) {
        for (std::size_t idx : sample_idx)
            out.push_back(from_final_row(ds, ds.samples[idx], kind_ == PredictorKind::VelocityExtrapolation));
        return out;
    }

    if (ds.lookback != net_->spec().lookback)
        throw std::invalid_argument("predictor lookback " + std::to_string(net_->spec().lookback) +
                                    " does not match dataset lookback " + std::to_string(ds.lookback));
    const auto window = gather_window(ds, sample_idx);
    const nn::Matrix y = net_->forward(window);
    for (Eigen::Index r = 0; r < y.rows(); ++r) {
        Prediction pred;
        for (int i = 0; i < kPlayersPerTeam; ++i) {
            const Vec2 p{unscale(y(r, 2 * i), domains::position_x()),
                         unscale(y(r, 2 * i + 1), domains::position_y())};
            pred.position[static_cast<std::size_t>(i)] = field::clamp(p, kPredictionClampMargin);
            pred.known[static_cast<std::size_t>(i)] = true;
        }
        out.push_back(pred);
    }
    return out;
}

}  // namespace unfog
