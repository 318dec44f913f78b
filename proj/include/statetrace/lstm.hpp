#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "statetrace/errors.hpp"
#include "statetrace/matrix.hpp"

namespace statetrace {

inline constexpr int kModelFormatVersion = 1;

/// One stacked-LSTM layer. Gate rows of w_x / w_h / b are packed in four
/// blocks of hidden_dim in the fixed order [input, forget, candidate, output].
struct LstmLayerParams {
    std::size_t input_dim = 0;
    std::size_t hidden_dim = 0;
    Matrix w_x;             // 4H x D
    Matrix w_h;             // 4H x H
    std::vector<double> b;  // 4H
};

/// Per-channel affine input transform fitted on the training split and
/// stored with the model; empty vectors mean identity.
struct ChannelNormalization {
    std::vector<double> mean;
    std::vector<double> stddev;

    bool is_identity() const { return mean.empty(); }
};

/// Stacked LSTM plus linear output head predicting the next profile from
/// history.
struct ForecastModel {
    int format_version = kModelFormatVersion;
    std::size_t input_dim = 0;  // K
    std::vector<LstmLayerParams> layers;
    Matrix w_out;                 // K x H_last
    std::vector<double> b_out;    // K
    ChannelNormalization normalization;
};

inline void validate_model(const ForecastModel& model) {
    detail::require(model.input_dim >= 1, "model: input_dim must be >= 1");
    detail::require(!model.layers.empty(), "model: need at least one layer");
    std::size_t expected_input = model.input_dim;
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        const auto& p = model.layers[l];
        detail::require(p.input_dim == expected_input,
                        "model: layer " + std::to_string(l) + " input_dim mismatch");
        detail::require(p.hidden_dim >= 1, "model: hidden_dim must be >= 1");
        detail::require(p.w_x.rows() == 4 * p.hidden_dim && p.w_x.cols() == p.input_dim,
                        "model: w_x shape mismatch");
        detail::require(p.w_h.rows() == 4 * p.hidden_dim && p.w_h.cols() == p.hidden_dim,
                        "model: w_h shape mismatch");
        detail::require(p.b.size() == 4 * p.hidden_dim, "model: bias length mismatch");
        detail::require(p.w_x.all_finite() && p.w_h.all_finite(), "model: non-finite weight");
        expected_input = p.hidden_dim;
    }
    detail::require(model.w_out.rows() == model.input_dim &&
                        model.w_out.cols() == model.layers.back().hidden_dim,
                    "model: w_out shape mismatch");
    detail::require(model.b_out.size() == model.input_dim, "model: b_out length mismatch");
    detail::require(model.w_out.all_finite(), "model: non-finite weight");
    if (!model.normalization.is_identity()) {
        detail::require(model.normalization.mean.size() == model.input_dim &&
                            model.normalization.stddev.size() == model.input_dim,
                        "model: normalization statistics length mismatch");
    }
}

/// (x - mean) / std per channel with the model's stored statistics.
inline TimeCourses apply_normalization(const ForecastModel& model, const TimeCourses& tc) {
    if (model.normalization.is_identity()) {
        return tc;
    }
    detail::require(tc.channels() == model.input_dim, "normalize: channel count mismatch");
    TimeCourses out = tc;
    for (std::size_t t = 0; t < out.length(); ++t) {
        double* row = out.data.row(t);
        for (std::size_t c = 0; c < out.channels(); ++c) {
            row[c] = (row[c] - model.normalization.mean[c]) / model.normalization.stddev[c];
        }
    }
    return out;
}

/// Hidden and cell vectors for every layer.
struct LstmState {
    std::vector<std::vector<double>> h;
    std::vector<std::vector<double>> c;

    static LstmState zeros(const ForecastModel& model) {
        LstmState s;
        for (const auto& layer : model.layers) {
            s.h.emplace_back(layer.hidden_dim, 0.0);
            s.c.emplace_back(layer.hidden_dim, 0.0);
        }
        return s;
    }
};

namespace detail {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// One LSTM cell step. On return `z` holds the post-activation gate values
/// in [i, f, g, o] block order, and c/h the new cell and hidden vectors.
inline void lstm_cell_step(const LstmLayerParams& p, const double* x, const double* h_prev,
                           const double* c_prev, std::vector<double>& z, std::vector<double>& c,
                           std::vector<double>& tanh_c, std::vector<double>& h) {
    const std::size_t hdim = p.hidden_dim;
    z.assign(p.b.begin(), p.b.end());
    matvec_add(p.w_x, x, z.data());
    matvec_add(p.w_h, h_prev, z.data());
    double* gi = z.data();
    double* gf = z.data() + hdim;
    double* gg = z.data() + 2 * hdim;
    double* go = z.data() + 3 * hdim;
    for (std::size_t j = 0; j < hdim; ++j) {
        gi[j] = sigmoid(gi[j]);
        gf[j] = sigmoid(gf[j]);
        gg[j] = std::tanh(gg[j]);
        go[j] = sigmoid(go[j]);
    }
    c.resize(hdim);
    tanh_c.resize(hdim);
    h.resize(hdim);
    for (std::size_t j = 0; j < hdim; ++j) {
        c[j] = gf[j] * c_prev[j] + gi[j] * gg[j];
        tanh_c[j] = std::tanh(c[j]);
        h[j] = go[j] * tanh_c[j];
    }
}

}  // namespace detail

struct ForwardResult {
    Matrix predictions;     // (T-1) x K; row t-2 (1-based t = 2..T) is the profile for t
    LstmState final_state;  // per-layer h, c after the last input step
};

/// Teacher-forced one-step-ahead pass: row t of `predictions` depends only on
/// input rows 0..t (strict causality). States start at zero.
inline ForwardResult lstm_forward(const ForecastModel& model, const TimeCourses& sequence) {
    validate_model(model);
    detail::require(sequence.channels() == model.input_dim,
                    "lstm_forward: channel count mismatch");
    detail::require(sequence.length() >= 2, "lstm_forward: need at least 2 time points");

    const std::size_t steps = sequence.length() - 1;
    const std::size_t n_layers = model.layers.size();
    ForwardResult result;
    result.predictions = Matrix(steps, model.input_dim);
    result.final_state = LstmState::zeros(model);

    std::vector<double> z;
    std::vector<std::vector<double>> new_c(n_layers), new_tanh_c(n_layers), new_h(n_layers);
    for (std::size_t t = 0; t < steps; ++t) {
        const double* x = sequence.data.row(t);
        for (std::size_t l = 0; l < n_layers; ++l) {
            detail::lstm_cell_step(model.layers[l], x, result.final_state.h[l].data(),
                                   result.final_state.c[l].data(), z, new_c[l], new_tanh_c[l],
                                   new_h[l]);
            result.final_state.c[l] = new_c[l];
            result.final_state.h[l] = new_h[l];
            x = result.final_state.h[l].data();
        }
        double* pred = result.predictions.row(t);
        for (std::size_t k = 0; k < model.input_dim; ++k) {
            pred[k] = model.b_out[k];
        }
        detail::matvec_add(model.w_out, result.final_state.h[n_layers - 1].data(), pred);
    }
    return result;
}

/// Predictions only, identical to lstm_forward's prediction output.
inline Matrix predict_profiles(const ForecastModel& model, const TimeCourses& sequence) {
    return lstm_forward(model, sequence).predictions;
}

/// Mean over time of the squared Euclidean distance between predicted and
/// real profiles: (1 / (T-1)) * sum_t ||U(t,.) - Upred(t,.)||^2.
inline double sequence_loss(const Matrix& predictions, const TimeCourses& sequence) {
    detail::require(predictions.rows() == sequence.length() - 1 &&
                        predictions.cols() == sequence.channels(),
                    "sequence_loss: prediction shape mismatch");
    const std::size_t steps = predictions.rows();
    double total = 0.0;
    for (std::size_t t = 0; t < steps; ++t) {
        const double* pred = predictions.row(t);
        const double* target = sequence.data.row(t + 1);
        for (std::size_t k = 0; k < predictions.cols(); ++k) {
            const double d = target[k] - pred[k];
            total += d * d;
        }
    }
    return total / static_cast<double>(steps);
}

}  // namespace statetrace
