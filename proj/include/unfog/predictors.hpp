#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "unfog/dataset.hpp"
#include "unfog/geometry.hpp"
#include "unfog/nn.hpp"

namespace unfog {

enum class PredictorKind { LastSeen, VelocityExtrapolation, Model };

/// Predicted opponent positions in meters. known = false marks opponents the
/// belief has forgotten (sentinel position); evaluation skips those.
struct Prediction {
    std::array<Vec2, kPlayersPerTeam> position{};
    std::array<bool, kPlayersPerTeam> known{};
};

/// Margin beyond the field bounds applied to model outputs, so early-training
/// divergence cannot blow up the error metric.
inline constexpr double kPredictionClampMargin = 5.0;

class Predictor {
  public:
    static Predictor last_seen();
    static Predictor velocity_extrapolation();
    static Predictor model(std::shared_ptr<nn::Network> net, std::string name = {});

    PredictorKind kind() const { return kind_; }
    const std::string& name() const { return name_; }
    const nn::Network* network() const { return net_.get(); }

    Prediction predict(const Dataset& ds, std::size_t sample_idx) const;
    /// Model predictors batch their forward passes; baselines fall back to
    /// the scalar path. Results match predict() element for element.
    std::vector<Prediction> predict_batch(const Dataset& ds, const std::vector<std::size_t>& sample_idx) const;

  private:
    Predictor(PredictorKind kind, std::string name) : kind_(kind), name_(std::move(name)) {}

    PredictorKind kind_;
    std::string name_;
    std::shared_ptr<nn::Network> net_;
};

}  // namespace unfog
