#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "statetrace/bptt.hpp"
#include "statetrace/lstm.hpp"
#include "statetrace/random.hpp"

namespace statetrace {

struct TrainConfig {
    double learning_rate = 1e-3;
    std::size_t epochs = 50;
    std::size_t bptt_window = 32;
    std::size_t batch_size = 1;
    std::uint64_t seed = 0;
    double grad_clip_norm = 5.0;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    double init_scale = 0.08;
};

inline void validate_train_config(const TrainConfig& cfg) {
    detail::require(cfg.learning_rate > 0.0, "train: learning_rate must be > 0");
    detail::require(cfg.epochs >= 1, "train: epochs must be >= 1");
    detail::require(cfg.bptt_window >= 2, "train: bptt_window must be >= 2");
    detail::require(cfg.batch_size >= 1, "train: batch_size must be >= 1");
    detail::require(cfg.grad_clip_norm > 0.0, "train: grad_clip_norm must be > 0");
    detail::require(cfg.init_scale > 0.0, "train: init_scale must be > 0");
    detail::require(cfg.adam_beta1 > 0.0 && cfg.adam_beta1 < 1.0 && cfg.adam_beta2 > 0.0 &&
                        cfg.adam_beta2 < 1.0 && cfg.adam_eps > 0.0,
                    "train: invalid Adam hyperparameters");
}

/// Hidden layer widths of the stacked LSTM.
struct ModelShape {
    std::vector<std::size_t> hidden_dims{64, 64};

    /// Desk-scale default: 2 layers x 64 nodes.
    static ModelShape desk_scale() { return ModelShape{{64, 64}}; }
    /// Published setting: 2 hidden layers x 256 nodes each.
    static ModelShape paper_scale() { return ModelShape{{256, 256}}; }
};

/// Fresh model with parameters drawn uniformly from [-init_scale, init_scale]
/// (documented order: per layer w_x, w_h, b; then w_out, b_out), after which
/// every forget-gate bias is set to +1.0.
inline ForecastModel initialize_model(std::size_t input_dim, const ModelShape& shape,
                                      const TrainConfig& cfg) {
    detail::require(!shape.hidden_dims.empty(), "train: need at least one hidden layer");
    ForecastModel model;
    model.input_dim = input_dim;
    std::size_t in_dim = input_dim;
    for (std::size_t h : shape.hidden_dims) {
        detail::require(h >= 1, "train: hidden_dim must be >= 1");
        LstmLayerParams p;
        p.input_dim = in_dim;
        p.hidden_dim = h;
        p.w_x = Matrix(4 * h, in_dim);
        p.w_h = Matrix(4 * h, h);
        p.b.assign(4 * h, 0.0);
        model.layers.push_back(std::move(p));
        in_dim = h;
    }
    model.w_out = Matrix(input_dim, in_dim);
    model.b_out.assign(input_dim, 0.0);

    RandomSource rng(cfg.seed);
    for (auto* tensor : tensor_views(model)) {
        for (double& v : *tensor) {
            v = rng.uniform(-cfg.init_scale, cfg.init_scale);
        }
    }
    for (auto& layer : model.layers) {
        for (std::size_t j = layer.hidden_dim; j < 2 * layer.hidden_dim; ++j) {
            layer.b[j] = 1.0;
        }
    }
    return model;
}

/// Pooled per-channel mean/std over every row of the training split. Constant
/// channels get std 1 so the transform stays defined.
inline ChannelNormalization fit_normalization(const std::vector<TimeCourses>& dataset) {
    const std::size_t k = dataset.front().channels();
    ChannelNormalization norm;
    norm.mean.assign(k, 0.0);
    norm.stddev.assign(k, 0.0);
    std::size_t total_rows = 0;
    for (const auto& tc : dataset) {
        for (std::size_t t = 0; t < tc.length(); ++t) {
            const double* row = tc.data.row(t);
            for (std::size_t c = 0; c < k; ++c) {
                norm.mean[c] += row[c];
            }
        }
        total_rows += tc.length();
    }
    for (std::size_t c = 0; c < k; ++c) {
        norm.mean[c] /= static_cast<double>(total_rows);
    }
    for (const auto& tc : dataset) {
        for (std::size_t t = 0; t < tc.length(); ++t) {
            const double* row = tc.data.row(t);
            for (std::size_t c = 0; c < k; ++c) {
                const double d = row[c] - norm.mean[c];
                norm.stddev[c] += d * d;
            }
        }
    }
    for (std::size_t c = 0; c < k; ++c) {
        norm.stddev[c] = std::sqrt(norm.stddev[c] / static_cast<double>(total_rows));
        if (norm.stddev[c] < 1e-12) {
            norm.stddev[c] = 1.0;
        }
    }
    return norm;
}

struct TrainResult {
    ForecastModel model;
    std::vector<double> loss_curve;  // one mean training loss per epoch
};

/// Fit a stacked LSTM on the dataset. Deterministic: the same seed, dataset
/// order and config produce a bit-identical model. Updates are Adam steps on
/// batch-averaged truncated-BPTT gradients with global-norm clipping.
inline TrainResult train(const std::vector<TimeCourses>& dataset, const ModelShape& shape,
                         const TrainConfig& cfg) {
    validate_train_config(cfg);
    detail::require(!dataset.empty(), "train: dataset is empty");
    const std::size_t k = dataset.front().channels();
    for (const auto& tc : dataset) {
        validate_time_courses(tc);
        detail::require(tc.channels() == k, "train: inconsistent channel count in dataset");
    }

    TrainResult result;
    result.model = initialize_model(k, shape, cfg);
    result.model.normalization = fit_normalization(dataset);

    std::vector<TimeCourses> normalized;
    normalized.reserve(dataset.size());
    for (const auto& tc : dataset) {
        normalized.push_back(apply_normalization(result.model, tc));
    }

    ModelGradients m1 = ModelGradients::zeros_like(result.model);
    ModelGradients m2 = ModelGradients::zeros_like(result.model);
    auto params = tensor_views(result.model);
    auto m1v = tensor_views(m1);
    auto m2v = tensor_views(m2);

    std::size_t adam_step = 0;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < normalized.size(); start += cfg.batch_size) {
            const std::size_t end = std::min(start + cfg.batch_size, normalized.size());
            ModelGradients batch_grads = ModelGradients::zeros_like(result.model);
            for (std::size_t i = start; i < end; ++i) {
                GradientResult g = compute_gradients(result.model, normalized[i],
                                                     cfg.bptt_window);
                accumulate_gradients(batch_grads, g.gradients);
                epoch_loss += g.loss;
            }
            scale_gradients(batch_grads, 1.0 / static_cast<double>(end - start));
            const double norm = gradient_global_norm(batch_grads);
            if (norm > cfg.grad_clip_norm) {
                scale_gradients(batch_grads, cfg.grad_clip_norm / norm);
            }

            ++adam_step;
            const double bc1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(adam_step));
            const double bc2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(adam_step));
            auto gv = tensor_views(batch_grads);
            for (std::size_t tv = 0; tv < params.size(); ++tv) {
                auto& p = *params[tv];
                auto& g = *gv[tv];
                auto& ma = *m1v[tv];
                auto& va = *m2v[tv];
                for (std::size_t j = 0; j < p.size(); ++j) {
                    ma[j] = cfg.adam_beta1 * ma[j] + (1.0 - cfg.adam_beta1) * g[j];
                    va[j] = cfg.adam_beta2 * va[j] + (1.0 - cfg.adam_beta2) * g[j] * g[j];
                    const double mhat = ma[j] / bc1;
                    const double vhat = va[j] / bc2;
                    p[j] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.adam_eps);
                }
            }
        }
        result.loss_curve.push_back(epoch_loss / static_cast<double>(normalized.size()));
    }
    return result;
}

}  // namespace statetrace
