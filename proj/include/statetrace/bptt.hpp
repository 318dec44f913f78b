#pragma once

#include <cstddef>
#include <vector>

#include "statetrace/lstm.hpp"
#include "statetrace/matrix.hpp"

namespace statetrace {

struct LayerGradients {
    Matrix w_x;
    Matrix w_h;
    std::vector<double> b;
};

/// Gradient tensors mirroring ForecastModel parameter shapes.
struct ModelGradients {
    std::vector<LayerGradients> layers;
    Matrix w_out;
    std::vector<double> b_out;

    static ModelGradients zeros_like(const ForecastModel& model) {
        ModelGradients g;
        for (const auto& p : model.layers) {
            g.layers.push_back({Matrix(4 * p.hidden_dim, p.input_dim),
                                Matrix(4 * p.hidden_dim, p.hidden_dim),
                                std::vector<double>(4 * p.hidden_dim, 0.0)});
        }
        g.w_out = Matrix(model.w_out.rows(), model.w_out.cols());
        g.b_out.assign(model.b_out.size(), 0.0);
        return g;
    }
};

/// Flat views over every parameter/gradient tensor, in the documented model
/// order: per layer w_x, w_h, b; then w_out, b_out. Initialization, Adam and
/// serialization all iterate in this order.
inline std::vector<std::vector<double>*> tensor_views(ForecastModel& m) {
    std::vector<std::vector<double>*> views;
    for (auto& p : m.layers) {
        views.push_back(&p.w_x.values());
        views.push_back(&p.w_h.values());
        views.push_back(&p.b);
    }
    views.push_back(&m.w_out.values());
    views.push_back(&m.b_out);
    return views;
}

inline std::vector<std::vector<double>*> tensor_views(ModelGradients& g) {
    std::vector<std::vector<double>*> views;
    for (auto& l : g.layers) {
        views.push_back(&l.w_x.values());
        views.push_back(&l.w_h.values());
        views.push_back(&l.b);
    }
    views.push_back(&g.w_out.values());
    views.push_back(&g.b_out);
    return views;
}

inline double gradient_global_norm(ModelGradients& g) {
    double ss = 0.0;
    for (auto* t : tensor_views(g)) {
        for (double v : *t) {
            ss += v * v;
        }
    }
    return std::sqrt(ss);
}

inline void scale_gradients(ModelGradients& g, double factor) {
    for (auto* t : tensor_views(g)) {
        for (double& v : *t) {
            v *= factor;
        }
    }
}

inline void accumulate_gradients(ModelGradients& into, ModelGradients& from) {
    auto a = tensor_views(into);
    auto b = tensor_views(from);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < a[i]->size(); ++j) {
            (*a[i])[j] += (*b[i])[j];
        }
    }
}

struct GradientResult {
    ModelGradients gradients;
    double loss = 0.0;  // sequence_loss of the same pass
};

/// Backpropagation through time for sequence_loss. The sequence is processed
/// in consecutive windows of `bptt_window` steps; hidden and cell states carry
/// forward across window boundaries but gradients do not flow back past them,
/// so windows >= T-1 give the exact full-sequence gradient.
inline GradientResult compute_gradients(const ForecastModel& model, const TimeCourses& sequence,
                                        std::size_t bptt_window) {
    validate_model(model);
    detail::require(sequence.channels() == model.input_dim,
                    "compute_gradients: channel count mismatch");
    detail::require(sequence.length() >= 2, "compute_gradients: need at least 2 time points");
    detail::require(bptt_window >= 1, "compute_gradients: bptt_window must be >= 1");

    const std::size_t steps = sequence.length() - 1;
    const std::size_t n_layers = model.layers.size();
    const std::size_t k_out = model.input_dim;
    const double loss_scale = 2.0 / static_cast<double>(steps);

    GradientResult result;
    result.gradients = ModelGradients::zeros_like(model);
    ModelGradients& grads = result.gradients;

    // States carried across windows (treated as constants by the backward pass).
    LstmState carry = LstmState::zeros(model);

    // Per-window caches, indexed [step][layer].
    const std::size_t max_window = std::min(bptt_window, steps);
    std::vector<std::vector<std::vector<double>>> gates(max_window),
        cells(max_window), tanh_cells(max_window), hiddens(max_window);
    for (std::size_t s = 0; s < max_window; ++s) {
        gates[s].resize(n_layers);
        cells[s].resize(n_layers);
        tanh_cells[s].resize(n_layers);
        hiddens[s].resize(n_layers);
    }
    Matrix residuals(max_window, k_out);  // prediction - target, unscaled

    // Backward scratch.
    std::vector<std::vector<double>> dh_rec(n_layers), dc_rec(n_layers), d_from_above(n_layers);
    std::vector<double> dz;

    for (std::size_t w0 = 0; w0 < steps; w0 += max_window) {
        const std::size_t w1 = std::min(w0 + max_window, steps);
        const std::size_t wlen = w1 - w0;

        // Forward through the window, caching activations.
        for (std::size_t s = 0; s < wlen; ++s) {
            const std::size_t t = w0 + s;
            const double* x = sequence.data.row(t);
            for (std::size_t l = 0; l < n_layers; ++l) {
                const std::vector<double>& h_prev = (s == 0) ? carry.h[l] : hiddens[s - 1][l];
                const std::vector<double>& c_prev = (s == 0) ? carry.c[l] : cells[s - 1][l];
                detail::lstm_cell_step(model.layers[l], x, h_prev.data(), c_prev.data(),
                                       gates[s][l], cells[s][l], tanh_cells[s][l], hiddens[s][l]);
                x = hiddens[s][l].data();
            }
            double* resid = residuals.row(s);
            const double* target = sequence.data.row(t + 1);
            for (std::size_t k = 0; k < k_out; ++k) {
                resid[k] = model.b_out[k] - target[k];
            }
            detail::matvec_add(model.w_out, hiddens[s][n_layers - 1].data(), resid);
            for (std::size_t k = 0; k < k_out; ++k) {
                result.loss += resid[k] * resid[k];
            }
        }

        // Backward through the window.
        for (std::size_t l = 0; l < n_layers; ++l) {
            dh_rec[l].assign(model.layers[l].hidden_dim, 0.0);
            dc_rec[l].assign(model.layers[l].hidden_dim, 0.0);
        }
        for (std::size_t s = wlen; s-- > 0;) {
            const std::size_t t = w0 + s;

            // Output head.
            std::vector<double> dy(k_out);
            const double* resid = residuals.row(s);
            for (std::size_t k = 0; k < k_out; ++k) {
                dy[k] = loss_scale * resid[k];
            }
            detail::outer_add(grads.w_out, dy.data(), hiddens[s][n_layers - 1].data());
            for (std::size_t k = 0; k < k_out; ++k) {
                grads.b_out[k] += dy[k];
            }
            d_from_above[n_layers - 1].assign(model.layers[n_layers - 1].hidden_dim, 0.0);
            detail::matvec_transpose_add(model.w_out, dy.data(),
                                         d_from_above[n_layers - 1].data());

            for (std::size_t l = n_layers; l-- > 0;) {
                const auto& p = model.layers[l];
                const std::size_t hdim = p.hidden_dim;
                const double* gi = gates[s][l].data();
                const double* gf = gi + hdim;
                const double* gg = gi + 2 * hdim;
                const double* go = gi + 3 * hdim;
                const double* tc = tanh_cells[s][l].data();
                const std::vector<double>& c_prev = (s == 0) ? carry.c[l] : cells[s - 1][l];
                const std::vector<double>& h_prev = (s == 0) ? carry.h[l] : hiddens[s - 1][l];

                dz.assign(4 * hdim, 0.0);
                double* dzi = dz.data();
                double* dzf = dz.data() + hdim;
                double* dzg = dz.data() + 2 * hdim;
                double* dzo = dz.data() + 3 * hdim;
                for (std::size_t j = 0; j < hdim; ++j) {
                    const double dh = dh_rec[l][j] + d_from_above[l][j];
                    const double dc = dc_rec[l][j] + dh * go[j] * (1.0 - tc[j] * tc[j]);
                    const double d_o = dh * tc[j];
                    const double d_i = dc * gg[j];
                    const double d_g = dc * gi[j];
                    const double d_f = dc * c_prev[j];
                    dzi[j] = d_i * gi[j] * (1.0 - gi[j]);
                    dzf[j] = d_f * gf[j] * (1.0 - gf[j]);
                    dzg[j] = d_g * (1.0 - gg[j] * gg[j]);
                    dzo[j] = d_o * go[j] * (1.0 - go[j]);
                    dc_rec[l][j] = dc * gf[j];  // flows to step s-1
                }

                const double* x_in =
                    (l == 0) ? sequence.data.row(t) : hiddens[s][l - 1].data();
                detail::outer_add(grads.layers[l].w_x, dz.data(), x_in);
                detail::outer_add(grads.layers[l].w_h, dz.data(), h_prev.data());
                for (std::size_t j = 0; j < 4 * hdim; ++j) {
                    grads.layers[l].b[j] += dz[j];
                }
                dh_rec[l].assign(hdim, 0.0);
                detail::matvec_transpose_add(p.w_h, dz.data(), dh_rec[l].data());
                if (l > 0) {
                    d_from_above[l - 1].assign(model.layers[l - 1].hidden_dim, 0.0);
                    detail::matvec_transpose_add(p.w_x, dz.data(), d_from_above[l - 1].data());
                }
            }
        }

        carry.h = hiddens[wlen - 1];
        carry.c = cells[wlen - 1];
    }

    result.loss /= static_cast<double>(steps);
    return result;
}

}  // namespace statetrace
