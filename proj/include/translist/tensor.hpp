// Copyright 2026 The translist Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//
// Reverse-mode autodiff on row-major float64 matrices: exactly the kernels
// the encoder needs, a tape recording them in topological order, a
// bias-corrected adaptive-moment optimizer, and a finite-difference
// gradient checker.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "translist/errors.hpp"

namespace translist {

struct Tensor {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Tensor() = default;
    Tensor(int r, int c, double fill = 0.0)
        : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, fill) {}

    static Tensor row(std::vector<double> values) {
        Tensor t;
        t.rows = 1;
        t.cols = static_cast<int>(values.size());
        t.data = std::move(values);
        return t;
    }
    static Tensor scalar(double v) { return row({v}); }

    double& at(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
    double at(int i, int j) const { return data[static_cast<std::size_t>(i) * cols + j]; }
    std::size_t size() const { return data.size(); }
    bool same_shape(const Tensor& o) const { return rows == o.rows && cols == o.cols; }
    std::string shape_str() const {
        return std::to_string(rows) + "x" + std::to_string(cols);
    }
    bool all_finite() const {
        for (double v : data)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

namespace detail {

inline void require(bool ok, const std::string& kernel, const Tensor& a, const Tensor& b) {
    if (!ok)
        throw ShapeError(kernel + ": incompatible shapes " + a.shape_str() + " and " +
                         b.shape_str());
}

inline void require(bool ok, const std::string& kernel, const Tensor& a) {
    if (!ok) throw ShapeError(kernel + ": bad shape " + a.shape_str());
}

// C += A * B, inner loop over contiguous rows of B.
inline void matmul_acc(const Tensor& a, const Tensor& b, Tensor& c) {
    for (int i = 0; i < a.rows; ++i) {
        const double* arow = &a.data[static_cast<std::size_t>(i) * a.cols];
        double* crow = &c.data[static_cast<std::size_t>(i) * c.cols];
        for (int k = 0; k < a.cols; ++k) {
            double av = arow[k];
            if (av == 0.0) continue;
            const double* brow = &b.data[static_cast<std::size_t>(k) * b.cols];
            for (int j = 0; j < b.cols; ++j) crow[j] += av * brow[j];
        }
    }
}

// C += A * B^T
inline void matmul_nt_acc(const Tensor& a, const Tensor& b, Tensor& c) {
    for (int i = 0; i < a.rows; ++i) {
        const double* arow = &a.data[static_cast<std::size_t>(i) * a.cols];
        double* crow = &c.data[static_cast<std::size_t>(i) * c.cols];
        for (int j = 0; j < b.rows; ++j) {
            const double* brow = &b.data[static_cast<std::size_t>(j) * b.cols];
            double acc = 0.0;
            for (int k = 0; k < a.cols; ++k) acc += arow[k] * brow[k];
            crow[j] += acc;
        }
    }
}

// C += A^T * B
inline void matmul_tn_acc(const Tensor& a, const Tensor& b, Tensor& c) {
    for (int k = 0; k < a.rows; ++k) {
        const double* arow = &a.data[static_cast<std::size_t>(k) * a.cols];
        const double* brow = &b.data[static_cast<std::size_t>(k) * b.cols];
        for (int i = 0; i < a.cols; ++i) {
            double av = arow[i];
            if (av == 0.0) continue;
            double* crow = &c.data[static_cast<std::size_t>(i) * c.cols];
            for (int j = 0; j < b.cols; ++j) crow[j] += av * brow[j];
        }
    }
}

}  // namespace detail

using VarId = int;

// Records primitive operations in creation order; creation order is
// topological, so backward() replays the records once, last to first.
// Nodes live in a deque, so references returned by value()/grad() stay
// valid as the tape grows.
class Tape {
public:
    struct Node {
        Tensor value;
        Tensor grad;
        bool requires_grad = false;
        std::function<void(Tape&)> backward;
    };

    const Tensor& value(VarId id) const { return nodes_[id].value; }
    Tensor& grad(VarId id) { return nodes_[id].grad; }
    std::size_t size() const { return nodes_.size(); }
    int mask_fallbacks() const { return mask_fallbacks_; }

    VarId leaf(Tensor v, bool requires_grad = false) {
        return push(std::move(v), requires_grad, nullptr);
    }
    VarId constant(Tensor v) { return leaf(std::move(v), false); }

    VarId add(VarId a, VarId b) {
        const Tensor &va = value(a), &vb = value(b);
        detail::require(va.same_shape(vb), "add", va, vb);
        Tensor out = va;
        for (std::size_t i = 0; i < out.size(); ++i) out.data[i] += vb.data[i];
        return push(std::move(out), grad_needed({a, b}), [a, b](Tape& t) {
            const Tensor& g = t.grad(t.cursor_);
            t.accumulate(a, g);
            t.accumulate(b, g);
        });
    }

    // a (R x C) + bias (1 x C) broadcast over rows
    VarId add_rowvec(VarId a, VarId bias) {
        const Tensor &va = value(a), &vb = value(bias);
        detail::require(vb.rows == 1 && vb.cols == va.cols, "add_rowvec", va, vb);
        Tensor out = va;
        for (int i = 0; i < out.rows; ++i)
            for (int j = 0; j < out.cols; ++j) out.at(i, j) += vb.at(0, j);
        return push(std::move(out), grad_needed({a, bias}), [a, bias](Tape& t) {
            const Tensor& g = t.grad(t.cursor_);
            t.accumulate(a, g);
            if (t.needs_grad(bias)) {
                Tensor gb(1, g.cols);
                for (int i = 0; i < g.rows; ++i)
                    for (int j = 0; j < g.cols; ++j) gb.at(0, j) += g.at(i, j);
                t.accumulate(bias, gb);
            }
        });
    }

    VarId mul(VarId a, VarId b) {
        const Tensor &va = value(a), &vb = value(b);
        detail::require(va.same_shape(vb), "mul", va, vb);
        Tensor out = va;
        for (std::size_t i = 0; i < out.size(); ++i) out.data[i] *= vb.data[i];
        return push(std::move(out), grad_needed({a, b}), [a, b](Tape& t) {
            const Tensor& g = t.grad(t.cursor_);
            if (t.needs_grad(a)) {
                Tensor ga = g;
                for (std::size_t i = 0; i < ga.size(); ++i)
                    ga.data[i] *= t.value(b).data[i];
                t.accumulate(a, ga);
            }
            if (t.needs_grad(b)) {
                Tensor gb = g;
                for (std::size_t i = 0; i < gb.size(); ++i)
                    gb.data[i] *= t.value(a).data[i];
                t.accumulate(b, gb);
            }
        });
    }

    VarId scale(VarId a, double c) {
        Tensor out = value(a);
        for (double& v : out.data) v *= c;
        return push(std::move(out), grad_needed({a}), [a, c](Tape& t) {
            Tensor ga = t.grad(t.cursor_);
            for (double& v : ga.data) v *= c;
            t.accumulate(a, ga);
        });
    }

    // a * s where s is a 1x1 variable (learnable scalar)
    VarId scale_by(VarId a, VarId s) {
        const Tensor &va = value(a), &vs = value(s);
        detail::require(vs.rows == 1 && vs.cols == 1, "scale_by", vs);
        double sv = vs.data[0];
        Tensor out = va;
        for (double& v : out.data) v *= sv;
        return push(std::move(out), grad_needed({a, s}), [a, s](Tape& t) {
            const Tensor& g = t.grad(t.cursor_);
            double sv = t.value(s).data[0];
            Tensor ga = g;
            for (double& v : ga.data) v *= sv;
            t.accumulate(a, ga);
            double acc = 0.0;
            const Tensor& va = t.value(a);
            for (std::size_t i = 0; i < g.size(); ++i) acc += g.data[i] * va.data[i];
            t.accumulate(s, Tensor::scalar(acc));
        });
    }

    VarId matmul(VarId a, VarId b) {
        const Tensor &va = value(a), &vb = value(b);
        detail::require(va.cols == vb.rows, "matmul", va, vb);
        Tensor out(va.rows, vb.cols);
        detail::matmul_acc(va, vb, out);
        return push(std::move(out), grad_needed({a, b}), [a, b](Tape& t) {
            const Tensor& g = t.grad(t.cursor_);
            if (t.needs_grad(a)) {
                Tensor ga(t.value(a).rows, t.value(a).cols);
                detail::matmul_nt_acc(g, t.value(b), ga);
                t.accumulate(a, ga);
            }
            if (t.needs_grad(b)) {
                Tensor gb(t.value(b).rows, t.value(b).cols);
                detail::matmul_tn_acc(t.value(a), g, gb);
                t.accumulate(b, gb);
            }
        });
    }

    VarId transpose(VarId a) {
        const Tensor& va = value(a);
        Tensor out(va.cols, va.rows);
        for (int i = 0; i < va.rows; ++i)
            for (int j = 0; j < va.cols; ++j) out.at(j, i) = va.at(i, j);
        return push(std::move(out), grad_needed({a}), [a](Tape& t) {
            const Tensor& g = t.grad(t.cursor_);
            Tensor ga(g.cols, g.rows);
            for (int i = 0; i < g.rows; ++i)
                for (int j = 0; j < g.cols; ++j) ga.at(j, i) = g.at(i, j);
            t.accumulate(a, ga);
        });
    }

    VarId concat_cols(const std::vector<VarId>& ids) {
        detail::require(!ids.empty(), "concat_cols", Tensor());
        int rows = value(ids[0]).rows, cols = 0;
        for (VarId id : ids) {
            detail::require(value(id).rows == rows, "concat_cols", value(ids[0]), value(id));
            cols += value(id).cols;
        }
        Tensor out(rows, cols);
        int off = 0;
        for (VarId id : ids) {
            const Tensor& v = value(id);
            for (int i = 0; i < rows; ++i)
                for (int j = 0; j < v.cols; ++j) out.at(i, off + j) = v.at(i, j);
            off += v.cols;
        }
        std::vector<VarId> deps = ids;
        return push(std::move(out), grad_needed(deps), [deps](Tape& t) {
            const Tensor& g = t.grad(t.cursor_);
            int off = 0;
            for (VarId id : deps) {
                const Tensor& v = t.value(id);
                Tensor gi(v.rows, v.cols);
                for (int i = 0; i < v.rows; ++i)
                    for (int j = 0; j < v.cols; ++j) gi.at(i, j) = g.at(i, off + j);
                t.accumulate(id, gi);
                off += v.cols;
            }
        });
    }

    VarId concat_rows(const std::vector<VarId>& ids) {
        detail::require(!ids.empty(), "concat_rows", Tensor());
        int cols = value(ids[0]).cols, rows = 0;
        for (VarId id : ids) {
            detail::require(value(id).cols == cols, "concat_rows", value(ids[0]), value(id));
            rows += value(id).rows;
        }
        Tensor out(rows, cols);
        int off = 0;
        for (VarId id : ids) {
            const Tensor& v = value(id);
            for (int i = 0; i < v.rows; ++i)
                for (int j = 0; j < cols; ++j) out.at(off + i, j) = v.at(i, j);
            off += v.rows;
        }
        std::vector<VarId> deps = ids;
        return push(std::move(out), grad_needed(deps), [deps](Tape& t) {
            const Tensor& g = t.grad(t.cursor_);
            int off = 0;
            for (VarId id : deps) {
                const Tensor& v = t.value(id);
                Tensor gi(v.rows, v.cols);
                for (int i = 0; i < v.rows; ++i)
                    for (int j = 0; j < v.cols; ++j) gi.at(i, j) = g.at(off + i, j);
                t.accumulate(id, gi);
                off += v.rows;
            }
        });
    }

    VarId slice_rows(VarId a, int start, int len) {
        const Tensor& va = value(a);
        detail::require(start >= 0 && len >= 0 && start + len <= va.rows, "slice_rows", va);
        Tensor out(len, va.cols);
        for (int i = 0; i < len; ++i)
            for (int j = 0; j < va.cols; ++j) out.at(i, j) = va.at(start + i, j);
        return push(std::move(out), grad_needed({a}), [a, start](Tape& t) {
            const Tensor& g = t.grad(t.cursor_);
            Tensor ga(t.value(a).rows, t.value(a).cols);
            for (int i = 0; i < g.rows; ++i)
                for (int j = 0; j < g.cols; ++j) ga.at(start + i, j) = g.at(i, j);
            t.accumulate(a, ga);
        });
    }

    // Sum of all elements, a 1x1 result.
    VarId sum(VarId a) {
        double acc = 0.0;
        for (double v : value(a).data) acc += v;
        return push(Tensor::scalar(acc), grad_needed({a}), [a](Tape& t) {
            double g = t.grad(t.cursor_).data[0];
            t.accumulate(a, Tensor(t.value(a).rows, t.value(a).cols, g));
        });
    }

    VarId relu(VarId a) {
        Tensor out = value(a);
        for (double& v : out.data) v = v > 0.0 ? v : 0.0;
        return push(std::move(out), grad_needed({a}), [a](Tape& t) {
            const Tensor& g = t.grad(t.cursor_);
            Tensor ga = g;
            const Tensor& va = t.value(a);
            for (std::size_t i = 0; i < ga.size(); ++i)
                if (va.data[i] <= 0.0) ga.data[i] = 0.0;
            t.accumulate(a, ga);
        });
    }

    VarId logistic(VarId a) {
        Tensor out = value(a);
        for (double& v : out.data) v = 1.0 / (1.0 + std::exp(-v));
        VarId id = push(std::move(out), grad_needed({a}), nullptr);
        nodes_[id].backward = [a, id](Tape& t) {
            const Tensor& g = t.grad(id);
            const Tensor& y = t.value(id);
            Tensor ga = g;
            for (std::size_t i = 0; i < ga.size(); ++i)
                ga.data[i] *= y.data[i] * (1.0 - y.data[i]);
            t.accumulate(a, ga);
        };
        return id;
    }

    VarId softmax_rows(VarId a) {
        Tensor out = value(a);
        for (int i = 0; i < out.rows; ++i) {
            double mx = out.at(i, 0);
            for (int j = 1; j < out.cols; ++j) mx = std::max(mx, out.at(i, j));
            double sum = 0.0;
            for (int j = 0; j < out.cols; ++j) {
                out.at(i, j) = std::exp(out.at(i, j) - mx);
                sum += out.at(i, j);
            }
            for (int j = 0; j < out.cols; ++j) out.at(i, j) /= sum;
        }
        VarId id = push(std::move(out), grad_needed({a}), nullptr);
        nodes_[id].backward = [a, id](Tape& t) {
            const Tensor& g = t.grad(id);
            const Tensor& y = t.value(id);
            Tensor ga(g.rows, g.cols);
            for (int i = 0; i < g.rows; ++i) {
                double dot = 0.0;
                for (int j = 0; j < g.cols; ++j) dot += g.at(i, j) * y.at(i, j);
                for (int j = 0; j < g.cols; ++j)
                    ga.at(i, j) = y.at(i, j) * (g.at(i, j) - dot);
            }
            t.accumulate(a, ga);
        };
        return id;
    }

    // alpha_ij = m_ij exp(e_ij) / sum_k m_ik exp(e_ik), stabilized by the
    // row maximum of e over the support of m. A row whose denominator is
    // zero (possible only with an injected hard mask) falls back to the
    // plain softmax row and bumps the fallback counter.
    VarId masked_softmax_rows(VarId e, VarId m) {
        const Tensor &ve = value(e), &vm = value(m);
        detail::require(ve.same_shape(vm), "masked_softmax_rows", ve, vm);
        Tensor out(ve.rows, ve.cols);
        Tensor expv(ve.rows, ve.cols);      // exp(e - rowmax), saved for backward
        std::vector<char> fallback(ve.rows, 0);
        for (int i = 0; i < ve.rows; ++i) {
            double mx = -std::numeric_limits<double>::infinity();
            for (int j = 0; j < ve.cols; ++j)
                if (vm.at(i, j) > 0.0) mx = std::max(mx, ve.at(i, j));
            if (mx == -std::numeric_limits<double>::infinity()) {
                // all-zero mask row
                fallback[i] = 1;
                ++mask_fallbacks_;
                double fm = ve.at(i, 0);
                for (int j = 1; j < ve.cols; ++j) fm = std::max(fm, ve.at(i, j));
                double sum = 0.0;
                for (int j = 0; j < ve.cols; ++j) {
                    expv.at(i, j) = std::exp(ve.at(i, j) - fm);
                    sum += expv.at(i, j);
                }
                for (int j = 0; j < ve.cols; ++j) out.at(i, j) = expv.at(i, j) / sum;
                continue;
            }
            double sum = 0.0;
            for (int j = 0; j < ve.cols; ++j) {
                expv.at(i, j) = std::exp(ve.at(i, j) - mx);
                sum += vm.at(i, j) * expv.at(i, j);
            }
            for (int j = 0; j < ve.cols; ++j)
                out.at(i, j) = vm.at(i, j) * expv.at(i, j) / sum;
        }
        VarId id = push(std::move(out), grad_needed({e, m}), nullptr);
        auto saved_exp = std::make_shared<Tensor>(std::move(expv));
        auto saved_fb = std::make_shared<std::vector<char>>(std::move(fallback));
        nodes_[id].backward = [e, m, id, saved_exp, saved_fb](Tape& t) {
            const Tensor& g = t.grad(id);
            const Tensor& y = t.value(id);
            const Tensor& vm = t.value(m);
            Tensor ge(g.rows, g.cols), gm(g.rows, g.cols);
            for (int i = 0; i < g.rows; ++i) {
                double dot = 0.0;
                for (int j = 0; j < g.cols; ++j) dot += g.at(i, j) * y.at(i, j);
                if ((*saved_fb)[i]) {
                    for (int j = 0; j < g.cols; ++j)
                        ge.at(i, j) = y.at(i, j) * (g.at(i, j) - dot);
                    continue;
                }
                // denominator r_i = sum_k m exp; recover via y = m exp / r
                double r = 0.0;
                for (int j = 0; j < g.cols; ++j)
                    r += vm.at(i, j) * saved_exp->at(i, j);
                for (int j = 0; j < g.cols; ++j) {
                    ge.at(i, j) = y.at(i, j) * (g.at(i, j) - dot);
                    gm.at(i, j) = saved_exp->at(i, j) / r * (g.at(i, j) - dot);
                }
            }
            t.accumulate(e, ge);
            t.accumulate(m, gm);
        };
        return id;
    }

    // Per-row normalization with learnable gain/shift (1 x C each).
    VarId layer_norm(VarId x, VarId gamma, VarId beta, double eps = 1e-5) {
        const Tensor &vx = value(x), &vg = value(gamma), &vb = value(beta);
        detail::require(vg.rows == 1 && vg.cols == vx.cols, "layer_norm", vx, vg);
        detail::require(vb.rows == 1 && vb.cols == vx.cols, "layer_norm", vx, vb);
        int C = vx.cols;
        Tensor out(vx.rows, C), xhat(vx.rows, C);
        std::vector<double> inv_sigma(vx.rows);
        for (int i = 0; i < vx.rows; ++i) {
            double mu = 0.0;
            for (int j = 0; j < C; ++j) mu += vx.at(i, j);
            mu /= C;
            double var = 0.0;
            for (int j = 0; j < C; ++j) {
                double d = vx.at(i, j) - mu;
                var += d * d;
            }
            var /= C;
            double is = 1.0 / std::sqrt(var + eps);
            inv_sigma[i] = is;
            for (int j = 0; j < C; ++j) {
                xhat.at(i, j) = (vx.at(i, j) - mu) * is;
                out.at(i, j) = vg.at(0, j) * xhat.at(i, j) + vb.at(0, j);
            }
        }
        VarId id = push(std::move(out), grad_needed({x, gamma, beta}), nullptr);
        auto saved_xhat = std::make_shared<Tensor>(std::move(xhat));
        auto saved_is = std::make_shared<std::vector<double>>(std::move(inv_sigma));
        nodes_[id].backward = [x, gamma, beta, id, saved_xhat, saved_is](Tape& t) {
            const Tensor& g = t.grad(id);
            const Tensor& vg = t.value(gamma);
            int C = g.cols;
            Tensor gx(g.rows, C), ggamma(1, C), gbeta(1, C);
            for (int i = 0; i < g.rows; ++i) {
                double mean_dxhat = 0.0, mean_dxhat_xhat = 0.0;
                for (int j = 0; j < C; ++j) {
                    double dxh = g.at(i, j) * vg.at(0, j);
                    mean_dxhat += dxh;
                    mean_dxhat_xhat += dxh * saved_xhat->at(i, j);
                    ggamma.at(0, j) += g.at(i, j) * saved_xhat->at(i, j);
                    gbeta.at(0, j) += g.at(i, j);
                }
                mean_dxhat /= C;
                mean_dxhat_xhat /= C;
                for (int j = 0; j < C; ++j) {
                    double dxh = g.at(i, j) * vg.at(0, j);
                    gx.at(i, j) = (*saved_is)[i] *
                                  (dxh - mean_dxhat - saved_xhat->at(i, j) * mean_dxhat_xhat);
                }
            }
            t.accumulate(x, gx);
            t.accumulate(gamma, ggamma);
            t.accumulate(beta, gbeta);
        };
        return id;
    }

    // Gather rows of `table` by index; backward scatters additively, so
    // repeated ids accumulate.
    VarId embedding_rows(VarId table, const std::vector<int>& ids) {
        const Tensor& vt = value(table);
        Tensor out(static_cast<int>(ids.size()), vt.cols);
        for (std::size_t i = 0; i < ids.size(); ++i) {
            detail::require(ids[i] >= 0 && ids[i] < vt.rows, "embedding_rows", vt);
            for (int j = 0; j < vt.cols; ++j)
                out.at(static_cast<int>(i), j) = vt.at(ids[i], j);
        }
        auto saved_ids = std::make_shared<std::vector<int>>(ids);
        return push(std::move(out), grad_needed({table}), [table, saved_ids](Tape& t) {
            const Tensor& g = t.grad(t.cursor_);
            Tensor gt(t.value(table).rows, t.value(table).cols);
            for (std::size_t i = 0; i < saved_ids->size(); ++i)
                for (int j = 0; j < g.cols; ++j)
                    gt.at((*saved_ids)[i], j) += g.at(static_cast<int>(i), j);
            t.accumulate(table, gt);
        });
    }

    // Inverted dropout with the mask drawn from `rng`; callers only insert
    // this op in training mode, so evaluation never consumes the stream.
    VarId dropout(VarId a, double rate, std::mt19937_64& rng) {
        detail::require(rate >= 0.0 && rate < 1.0, "dropout", value(a));
        Tensor out = value(a);
        auto mask = std::make_shared<Tensor>(out.rows, out.cols);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        double keep = 1.0 - rate;
        for (std::size_t i = 0; i < out.size(); ++i) {
            mask->data[i] = uni(rng) < keep ? 1.0 / keep : 0.0;
            out.data[i] *= mask->data[i];
        }
        return push(std::move(out), grad_needed({a}), [a, mask](Tape& t) {
            const Tensor& g = t.grad(t.cursor_);
            Tensor ga = g;
            for (std::size_t i = 0; i < ga.size(); ++i) ga.data[i] *= mask->data[i];
            t.accumulate(a, ga);
        });
    }

    // Sum over rows of -log softmax(row)[target]; a 1x1 result.
    VarId cross_entropy_sum(VarId logits, const std::vector<int>& targets) {
        const Tensor& vl = value(logits);
        detail::require(static_cast<int>(targets.size()) == vl.rows, "cross_entropy_sum",
                        vl);
        auto probs = std::make_shared<Tensor>(vl.rows, vl.cols);
        double loss = 0.0;
        for (int i = 0; i < vl.rows; ++i) {
            detail::require(targets[i] >= 0 && targets[i] < vl.cols, "cross_entropy_sum",
                            vl);
            double mx = vl.at(i, 0);
            for (int j = 1; j < vl.cols; ++j) mx = std::max(mx, vl.at(i, j));
            double sum = 0.0;
            for (int j = 0; j < vl.cols; ++j) {
                probs->at(i, j) = std::exp(vl.at(i, j) - mx);
                sum += probs->at(i, j);
            }
            for (int j = 0; j < vl.cols; ++j) probs->at(i, j) /= sum;
            loss += -(vl.at(i, targets[i]) - mx - std::log(sum));
        }
        auto saved_targets = std::make_shared<std::vector<int>>(targets);
        return push(Tensor::scalar(loss), grad_needed({logits}),
                    [logits, probs, saved_targets](Tape& t) {
                        double gs = t.grad(t.cursor_).data[0];
                        Tensor gl = *probs;
                        for (std::size_t i = 0; i < saved_targets->size(); ++i)
                            gl.at(static_cast<int>(i), (*saved_targets)[i]) -= 1.0;
                        for (double& v : gl.data) v *= gs;
                        t.accumulate(logits, gl);
                    });
    }

    // out(i, j) = scale * <q_i, s_{i*n+j}> for q (n x d) against the
    // flattened pairwise table s (n*n x d).
    VarId pair_dot(VarId q, VarId s, double scale) {
        const Tensor &vq = value(q), &vs = value(s);
        int n = vq.rows, d = vq.cols;
        detail::require(vs.rows == n * n && vs.cols == d, "pair_dot", vq, vs);
        Tensor out(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double acc = 0.0;
                const double* qr = &vq.data[static_cast<std::size_t>(i) * d];
                const double* sr = &vs.data[(static_cast<std::size_t>(i) * n + j) * d];
                for (int k = 0; k < d; ++k) acc += qr[k] * sr[k];
                out.at(i, j) = scale * acc;
            }
        return push(std::move(out), grad_needed({q, s}), [q, s, scale](Tape& t) {
            const Tensor& g = t.grad(t.cursor_);
            const Tensor &vq = t.value(q), &vs = t.value(s);
            int n = vq.rows, d = vq.cols;
            Tensor gq(n, d);
            bool need_s = t.needs_grad(s);
            Tensor gs(need_s ? n * n : 0, need_s ? d : 0);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double gij = scale * g.at(i, j);
                    if (gij == 0.0) continue;
                    const double* sr = &vs.data[(static_cast<std::size_t>(i) * n + j) * d];
                    double* qr = &gq.data[static_cast<std::size_t>(i) * d];
                    for (int k = 0; k < d; ++k) qr[k] += gij * sr[k];
                    if (need_s) {
                        const double* qv = &vq.data[static_cast<std::size_t>(i) * d];
                        double* gr = &gs.data[(static_cast<std::size_t>(i) * n + j) * d];
                        for (int k = 0; k < d; ++k) gr[k] += gij * qv[k];
                    }
                }
            t.accumulate(q, gq);
            if (need_s) t.accumulate(s, gs);
        });
    }

    // Seeds d(loss)/d(loss) = seed and replays the tape backwards.
    void backward(VarId loss, double seed = 1.0) {
        detail::require(value(loss).rows == 1 && value(loss).cols == 1, "backward",
                        value(loss));
        ensure_grad(loss).data[0] += seed;
        for (int i = static_cast<int>(nodes_.size()) - 1; i >= 0; --i) {
            Node& n = nodes_[i];
            if (!n.backward || n.grad.size() == 0) continue;
            cursor_ = i;
            n.backward(*this);
        }
    }

    // true when gradient flows into `id` (a grad leaf or downstream of one)
    bool needs_grad(VarId id) const { return nodes_[id].requires_grad; }

    void accumulate(VarId id, const Tensor& g) {
        if (!nodes_[id].requires_grad) return;
        Tensor& dst = ensure_grad(id);
        for (std::size_t i = 0; i < g.size(); ++i) dst.data[i] += g.data[i];
    }

private:
    VarId push(Tensor value, bool requires_grad, std::function<void(Tape&)> backward) {
        Node n;
        n.value = std::move(value);
        n.requires_grad = requires_grad;
        n.backward = std::move(backward);
        nodes_.push_back(std::move(n));
        return static_cast<VarId>(nodes_.size()) - 1;
    }

    bool grad_needed(const std::vector<VarId>& deps) const {
        for (VarId d : deps)
            if (nodes_[d].requires_grad) return true;
        return false;
    }

    Tensor& ensure_grad(VarId id) {
        Node& n = nodes_[id];
        if (n.grad.size() == 0) n.grad = Tensor(n.value.rows, n.value.cols);
        return n.grad;
    }

    std::deque<Node> nodes_;
    int cursor_ = -1;
    int mask_fallbacks_ = 0;
};

// A named parameter: value plus accumulated gradient plus optimizer moments.
struct Param {
    std::string name;
    Tensor value;
    Tensor grad;
    Tensor m, v;

    explicit Param(std::string n, Tensor val) : name(std::move(n)), value(std::move(val)) {
        grad = Tensor(value.rows, value.cols);
        m = Tensor(value.rows, value.cols);
        v = Tensor(value.rows, value.cols);
    }
    void zero_grad() { std::fill(grad.data.begin(), grad.data.end(), 0.0); }
};

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Bias-corrected adaptive-moment update over every parameter's accumulated
// gradient; increments and uses a shared step count.
inline void adam_step(std::vector<Param*>& params, const AdamConfig& cfg, long& step) {
    ++step;
    double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
    double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
    for (Param* p : params) {
        if (!p->grad.all_finite())
            throw NonFiniteError("non-finite gradient in parameter '" + p->name + "'");
        for (std::size_t i = 0; i < p->value.size(); ++i) {
            double g = p->grad.data[i];
            p->m.data[i] = cfg.beta1 * p->m.data[i] + (1.0 - cfg.beta1) * g;
            p->v.data[i] = cfg.beta2 * p->v.data[i] + (1.0 - cfg.beta2) * g * g;
            double mhat = p->m.data[i] / bc1;
            double vhat = p->v.data[i] / bc2;
            p->value.data[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
        }
        p->zero_grad();
    }
}

struct GradCheckEntry {
    std::string param;
    int index = -1;
    double analytic = 0.0;
    double numeric = 0.0;
    double rel_err = 0.0;
};

struct GradCheckReport {
    double max_rel_err = 0.0;
    GradCheckEntry worst;
};

// Central-difference check of d(loss)/d(param) for every element of every
// parameter. `loss_fn(accumulate)` must return the scalar loss and, when
// `accumulate` is true, add gradients into each Param::grad. The relative
// error uses a small floor so near-zero gradient components are judged on
// absolute error.
inline GradCheckReport grad_check(std::vector<Param*>& params,
                                  const std::function<double(bool)>& loss_fn,
                                  double h = 1e-5) {
    for (Param* p : params) p->zero_grad();
    loss_fn(true);
    std::vector<Tensor> analytic;
    analytic.reserve(params.size());
    for (Param* p : params) {
        analytic.push_back(p->grad);
        p->zero_grad();
    }
    GradCheckReport report;
    for (std::size_t pi = 0; pi < params.size(); ++pi) {
        Param* p = params[pi];
        for (std::size_t i = 0; i < p->value.size(); ++i) {
            double orig = p->value.data[i];
            p->value.data[i] = orig + h;
            double lp = loss_fn(false);
            p->value.data[i] = orig - h;
            double lm = loss_fn(false);
            p->value.data[i] = orig;
            double numeric = (lp - lm) / (2.0 * h);
            double a = analytic[pi].data[i];
            double denom = std::max({std::fabs(a), std::fabs(numeric), 1e-3});
            double rel = std::fabs(a - numeric) / denom;
            if (rel > report.max_rel_err) {
                report.max_rel_err = rel;
                report.worst = {p->name, static_cast<int>(i), a, numeric, rel};
            }
        }
    }
    return report;
}

}  // namespace translist
