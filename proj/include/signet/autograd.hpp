#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "signet/kernels.hpp"
#include "signet/tensor.hpp"

namespace signet::ag {

/// Dynamic computation graph. Nodes are created by the op methods; backward()
/// sweeps them in reverse creation order, which is a valid topological order
/// because an op can only reference earlier nodes. Gradients of nodes bound to
/// a ParameterT are accumulated into the parameter at the end of the sweep.
/// All op kernels are deterministic, so repeated runs are bit-identical.
template <typename T>
class GraphT {
public:
    struct Var {
        int32_t id = -1;
        bool valid() const { return id >= 0; }
    };

    Var leaf(TensorT<T> v) {
        nodes_.push_back(Node{std::move(v), {}, nullptr, nullptr});
        return Var{static_cast<int32_t>(nodes_.size() - 1)};
    }

    /// Leaf sharing the parameter's current value; after backward() the node
    /// gradient is added into p.grad (single-writer accumulation).
    Var param(ParameterT<T>& p) {
        Var v = leaf(p.value);
        nodes_[v.id].bound = &p;
        return v;
    }

    const TensorT<T>& value(Var v) const { return nodes_.at(v.id).value; }
    const TensorT<T>& grad(Var v) const { return nodes_.at(v.id).grad; }
    size_t size() const { return nodes_.size(); }

    // ---- primitive ops ----

    Var matmul(Var a, Var b) {
        TensorT<T> out = kernels::matmul(value(a), value(b));
        return make(std::move(out), [a, b](GraphT& g, const Node& n) {
            g.nodes_[a.id].grad_add(kernels::matmul(n.grad, g.value(b), false, true));
            g.nodes_[b.id].grad_add(kernels::matmul(g.value(a), n.grad, true, false));
        });
    }

    Var add(Var a, Var b) {
        const auto& x = value(a);
        const auto& y = value(b);
        if (!x.same_shape(y)) {
            throw ShapeError("add shape mismatch: " + x.shape_str() + " vs " + y.shape_str());
        }
        TensorT<T> out(x.shape());
        for (int64_t i = 0; i < x.numel(); ++i) out.at(i) = x.at(i) + y.at(i);
        return make(std::move(out), [a, b](GraphT& g, const Node& n) {
            g.nodes_[a.id].grad_add(n.grad);
            g.nodes_[b.id].grad_add(n.grad);
        });
    }

    Var mul(Var a, Var b) {
        const auto& x = value(a);
        const auto& y = value(b);
        if (!x.same_shape(y)) {
            throw ShapeError("mul shape mismatch: " + x.shape_str() + " vs " + y.shape_str());
        }
        TensorT<T> out(x.shape());
        for (int64_t i = 0; i < x.numel(); ++i) out.at(i) = x.at(i) * y.at(i);
        return make(std::move(out), [a, b](GraphT& g, const Node& n) {
            auto& na = g.nodes_[a.id];
            auto& nb = g.nodes_[b.id];
            na.ensure_grad();
            nb.ensure_grad();
            for (int64_t i = 0; i < n.grad.numel(); ++i) {
                na.grad.at(i) += n.grad.at(i) * g.value(b).at(i);
                nb.grad.at(i) += n.grad.at(i) * g.value(a).at(i);
            }
        });
    }

    Var scale(Var a, T c) {
        const auto& x = value(a);
        TensorT<T> out(x.shape());
        for (int64_t i = 0; i < x.numel(); ++i) out.at(i) = x.at(i) * c;
        return make(std::move(out), [a, c](GraphT& g, const Node& n) {
            auto& na = g.nodes_[a.id];
            na.ensure_grad();
            for (int64_t i = 0; i < n.grad.numel(); ++i) na.grad.at(i) += n.grad.at(i) * c;
        });
    }

    /// x[m×n] + b broadcast over rows (b has n elements).
    Var add_rowbias(Var x, Var b) {
        const auto& xv = value(x);
        const auto& bv = value(b);
        const int64_t n = xv.cols();
        if (bv.numel() != n) {
            throw ShapeError("row bias length " + std::to_string(bv.numel()) +
                             " does not match columns " + std::to_string(n));
        }
        TensorT<T> out(xv.shape());
        const int64_t rows = xv.rows();
        for (int64_t r = 0; r < rows; ++r) {
            for (int64_t j = 0; j < n; ++j) out.at(r * n + j) = xv.at(r * n + j) + bv.at(j);
        }
        return make(std::move(out), [x, b, rows, n](GraphT& g, const Node& node) {
            g.nodes_[x.id].grad_add(node.grad);
            auto& nb = g.nodes_[b.id];
            nb.ensure_grad();
            for (int64_t r = 0; r < rows; ++r) {
                for (int64_t j = 0; j < n; ++j) nb.grad.at(j) += node.grad.at(r * n + j);
            }
        });
    }

    Var transpose(Var x) {
        const auto& xv = value(x);
        if (xv.rank() != 2) throw ShapeError("transpose expects rank 2, got " + xv.shape_str());
        const int64_t m = xv.dim(0), n = xv.dim(1);
        TensorT<T> out({n, m});
        for (int64_t i = 0; i < m; ++i) {
            for (int64_t j = 0; j < n; ++j) out.at(j, i) = xv.at(i, j);
        }
        return make(std::move(out), [x, m, n](GraphT& g, const Node& node) {
            auto& nx = g.nodes_[x.id];
            nx.ensure_grad();
            for (int64_t i = 0; i < m; ++i) {
                for (int64_t j = 0; j < n; ++j) nx.grad.at(i * n + j) += node.grad.at(j * m + i);
            }
        });
    }

    /// Softmax along the last axis.
    Var softmax_rows(Var x) {
        TensorT<T> out = kernels::softmax(value(x), -1);
        return make(std::move(out), [x](GraphT& g, const Node& n) {
            g.nodes_[x.id].grad_add(kernels::softmax_backward(n.grad, n.value, -1));
        });
    }

    Var layer_norm(Var x, Var gain, Var bias, T eps) {
        TensorT<T> out = kernels::layer_norm(value(x), value(gain), value(bias), eps);
        return make(std::move(out), [x, gain, bias, eps](GraphT& g, const Node& n) {
            TensorT<T> dx, dgain, dbias;
            kernels::layer_norm_backward(n.grad, g.value(x), g.value(gain), eps, dx, dgain, dbias);
            g.nodes_[x.id].grad_add(dx);
            g.nodes_[gain.id].grad_add(dgain.reshaped(g.value(gain).shape()));
            g.nodes_[bias.id].grad_add(dbias.reshaped(g.value(bias).shape()));
        });
    }

    Var gelu(Var x, kernels::Gelu variant) {
        TensorT<T> out = kernels::gelu(value(x), variant);
        return make(std::move(out), [x, variant](GraphT& g, const Node& n) {
            g.nodes_[x.id].grad_add(kernels::gelu_backward(n.grad, g.value(x), variant));
        });
    }

    Var slice_cols(Var x, int64_t c0, int64_t c1) {
        const auto& xv = value(x);
        const int64_t n = xv.cols();
        if (c0 < 0 || c1 > n || c0 >= c1) {
            throw BoundsError("slice_cols [" + std::to_string(c0) + "," + std::to_string(c1) +
                              ") out of range for " + std::to_string(n) + " columns");
        }
        const int64_t rows = xv.rows();
        const int64_t w = c1 - c0;
        TensorT<T> out({rows, w});
        for (int64_t r = 0; r < rows; ++r) {
            for (int64_t j = 0; j < w; ++j) out.at(r, j) = xv.at(r * n + c0 + j);
        }
        return make(std::move(out), [x, c0, w, n, rows](GraphT& g, const Node& node) {
            auto& nx = g.nodes_[x.id];
            nx.ensure_grad();
            for (int64_t r = 0; r < rows; ++r) {
                for (int64_t j = 0; j < w; ++j) {
                    nx.grad.at(r * n + c0 + j) += node.grad.at(r * w + j);
                }
            }
        });
    }

    Var concat_cols(const std::vector<Var>& xs) {
        if (xs.empty()) throw ShapeError("concat_cols of zero tensors");
        const int64_t rows = value(xs[0]).rows();
        int64_t total = 0;
        for (Var v : xs) {
            if (value(v).rows() != rows) throw ShapeError("concat_cols row mismatch");
            total += value(v).cols();
        }
        TensorT<T> out({rows, total});
        int64_t off = 0;
        for (Var v : xs) {
            const auto& xv = value(v);
            const int64_t w = xv.cols();
            for (int64_t r = 0; r < rows; ++r) {
                for (int64_t j = 0; j < w; ++j) out.at(r, off + j) = xv.at(r, j);
            }
            off += w;
        }
        auto parts = std::make_shared<std::vector<Var>>(xs);
        return make(std::move(out), [parts, rows, total](GraphT& g, const Node& node) {
            int64_t off = 0;
            for (Var v : *parts) {
                auto& nx = g.nodes_[v.id];
                nx.ensure_grad();
                const int64_t w = g.value(v).cols();
                for (int64_t r = 0; r < rows; ++r) {
                    for (int64_t j = 0; j < w; ++j) {
                        nx.grad.at(r * w + j) += node.grad.at(r * total + off + j);
                    }
                }
                off += w;
            }
        });
    }

    Var gather_rows(Var x, std::vector<int64_t> idx) {
        const auto& xv = value(x);
        const int64_t n = xv.cols();
        const int64_t rows = xv.rows();
        TensorT<T> out({static_cast<int64_t>(idx.size()), n});
        for (size_t r = 0; r < idx.size(); ++r) {
            if (idx[r] < 0 || idx[r] >= rows) {
                throw BoundsError("gather_rows index " + std::to_string(idx[r]) +
                                  " out of range for " + std::to_string(rows) + " rows");
            }
            for (int64_t j = 0; j < n; ++j) out.at(r * n + j) = xv.at(idx[r] * n + j);
        }
        auto map = std::make_shared<std::vector<int64_t>>(std::move(idx));
        return make(std::move(out), [x, map, n](GraphT& g, const Node& node) {
            auto& nx = g.nodes_[x.id];
            nx.ensure_grad();
            for (size_t r = 0; r < map->size(); ++r) {
                for (int64_t j = 0; j < n; ++j) {
                    nx.grad.at((*map)[r] * n + j) += node.grad.at(static_cast<int64_t>(r) * n + j);
                }
            }
        });
    }

    Var concat_rows(const std::vector<Var>& xs) {
        if (xs.empty()) throw ShapeError("concat_rows of zero tensors");
        const int64_t n = value(xs[0]).cols();
        int64_t rows = 0;
        for (Var v : xs) {
            if (value(v).cols() != n) throw ShapeError("concat_rows column mismatch");
            rows += value(v).rows();
        }
        TensorT<T> out({rows, n});
        int64_t off = 0;
        for (Var v : xs) {
            const auto& xv = value(v);
            for (int64_t i = 0; i < xv.numel(); ++i) out.at(off + i) = xv.at(i);
            off += xv.numel();
        }
        auto parts = std::make_shared<std::vector<Var>>(xs);
        return make(std::move(out), [parts](GraphT& g, const Node& node) {
            int64_t off = 0;
            for (Var v : *parts) {
                auto& nx = g.nodes_[v.id];
                nx.ensure_grad();
                for (int64_t i = 0; i < g.value(v).numel(); ++i) {
                    nx.grad.at(i) += node.grad.at(off + i);
                }
                off += g.value(v).numel();
            }
        });
    }

    /// Column-wise mean over rows -> [1 x n].
    Var mean_rows(Var x) {
        const auto& xv = value(x);
        const int64_t n = xv.cols();
        const int64_t rows = xv.rows();
        TensorT<T> out({1, n});
        for (int64_t r = 0; r < rows; ++r) {
            for (int64_t j = 0; j < n; ++j) out.at(j) += xv.at(r * n + j);
        }
        for (int64_t j = 0; j < n; ++j) out.at(j) /= T(rows);
        return make(std::move(out), [x, rows, n](GraphT& g, const Node& node) {
            auto& nx = g.nodes_[x.id];
            nx.ensure_grad();
            for (int64_t r = 0; r < rows; ++r) {
                for (int64_t j = 0; j < n; ++j) {
                    nx.grad.at(r * n + j) += node.grad.at(j) / T(rows);
                }
            }
        });
    }

    /// Arbitrary flat-index selection: out.data[i] = x.data[map[i]].
    /// Used for patch/tubelet extraction; backward scatter-adds.
    Var gather_flat(Var x, std::shared_ptr<const std::vector<int64_t>> map,
                    std::vector<int64_t> out_shape) {
        const auto& xv = value(x);
        TensorT<T> out(std::move(out_shape));
        if (out.numel() != static_cast<int64_t>(map->size())) {
            throw ShapeError("gather_flat map length does not match output shape");
        }
        for (size_t i = 0; i < map->size(); ++i) {
            out.at(static_cast<int64_t>(i)) = xv.at((*map)[i]);
        }
        return make(std::move(out), [x, map](GraphT& g, const Node& node) {
            auto& nx = g.nodes_[x.id];
            nx.ensure_grad();
            for (size_t i = 0; i < map->size(); ++i) {
                nx.grad.at((*map)[i]) += node.grad.at(static_cast<int64_t>(i));
            }
        });
    }

    Var sum_all(Var x) {
        const auto& xv = value(x);
        T s = T(0);
        for (int64_t i = 0; i < xv.numel(); ++i) s += xv.at(i);
        TensorT<T> out({1, 1});
        out.at(0) = s;
        return make(std::move(out), [x](GraphT& g, const Node& node) {
            auto& nx = g.nodes_[x.id];
            nx.ensure_grad();
            for (int64_t i = 0; i < nx.grad.numel(); ++i) nx.grad.at(i) += node.grad.at(0);
        });
    }

    /// Mean cross-entropy of logit rows against integer targets.
    /// loss = mean_r(logsumexp(x_r) - x_r[target_r]); d logits = (softmax - onehot)/m.
    Var cross_entropy(Var logits, std::vector<int64_t> targets) {
        const auto& xv = value(logits);
        const int64_t k = xv.cols();
        const int64_t m = xv.rows();
        if (static_cast<int64_t>(targets.size()) != m) {
            throw ShapeError("cross_entropy: " + std::to_string(targets.size()) +
                             " targets for " + std::to_string(m) + " logit rows");
        }
        for (int64_t t : targets) {
            if (t < 0 || t >= k) {
                throw BoundsError("cross_entropy target " + std::to_string(t) +
                                  " out of range for " + std::to_string(k) + " classes");
            }
        }
        TensorT<T> probs = kernels::softmax(xv, -1);
        T loss = T(0);
        for (int64_t r = 0; r < m; ++r) {
            T mx = xv.at(r, 0);
            for (int64_t j = 1; j < k; ++j) mx = std::max(mx, xv.at(r, j));
            T lse = T(0);
            for (int64_t j = 0; j < k; ++j) lse += std::exp(xv.at(r, j) - mx);
            loss += mx + std::log(lse) - xv.at(r, targets[r]);
        }
        loss /= T(m);
        TensorT<T> out({1, 1});
        out.at(0) = loss;
        auto tgt = std::make_shared<std::vector<int64_t>>(std::move(targets));
        auto pr = std::make_shared<TensorT<T>>(std::move(probs));
        return make(std::move(out), [logits, tgt, pr, m, k](GraphT& g, const Node& node) {
            auto& nx = g.nodes_[logits.id];
            nx.ensure_grad();
            const T go = node.grad.at(0) / T(m);
            for (int64_t r = 0; r < m; ++r) {
                for (int64_t j = 0; j < k; ++j) {
                    const T onehot = (j == (*tgt)[r]) ? T(1) : T(0);
                    nx.grad.at(r * k + j) += go * (pr->at(r, j) - onehot);
                }
            }
        });
    }

    /// MSE restricted to rows with mask != 0, averaged over masked elements only.
    Var mse_masked_rows(Var pred, TensorT<T> target, std::vector<uint8_t> row_mask) {
        const auto& pv = value(pred);
        if (!pv.same_shape(target)) {
            throw ShapeError("mse target shape " + target.shape_str() + " vs pred " +
                             pv.shape_str());
        }
        const int64_t n = pv.cols();
        const int64_t rows = pv.rows();
        if (static_cast<int64_t>(row_mask.size()) != rows) {
            throw ShapeError("mse row mask length mismatch");
        }
        int64_t masked = 0;
        for (uint8_t f : row_mask) masked += (f != 0);
        if (masked == 0) throw ValidationError("mse over empty masked set is undefined");
        T loss = T(0);
        for (int64_t r = 0; r < rows; ++r) {
            if (!row_mask[r]) continue;
            for (int64_t j = 0; j < n; ++j) {
                const T d = pv.at(r * n + j) - target.at(r * n + j);
                loss += d * d;
            }
        }
        const T denom = T(masked) * T(n);
        loss /= denom;
        TensorT<T> out({1, 1});
        out.at(0) = loss;
        auto tg = std::make_shared<TensorT<T>>(std::move(target));
        auto mk = std::make_shared<std::vector<uint8_t>>(std::move(row_mask));
        return make(std::move(out), [pred, tg, mk, rows, n, denom](GraphT& g, const Node& node) {
            auto& nx = g.nodes_[pred.id];
            nx.ensure_grad();
            const T go = node.grad.at(0);
            for (int64_t r = 0; r < rows; ++r) {
                if (!(*mk)[r]) continue;
                for (int64_t j = 0; j < n; ++j) {
                    const T d = g.value(pred).at(r * n + j) - tg->at(r * n + j);
                    nx.grad.at(r * n + j) += go * T(2) * d / denom;
                }
            }
        });
    }

    /// Reverse sweep from a scalar loss node.
    void backward(Var loss) {
        auto& ln = nodes_.at(loss.id);
        if (ln.value.numel() != 1) {
            throw ShapeError("backward seed must be scalar, got " + ln.value.shape_str());
        }
        ln.ensure_grad();
        ln.grad.at(0) = T(1);
        for (int32_t i = loss.id; i >= 0; --i) {
            Node& n = nodes_[i];
            if (n.back && n.grad.numel() > 0) n.back(*this, n);
        }
        for (Node& n : nodes_) {
            if (n.bound != nullptr && n.grad.numel() > 0) {
                for (int64_t i = 0; i < n.grad.numel(); ++i) {
                    n.bound->grad.at(i) += n.grad.at(i);
                }
            }
        }
    }

private:
    struct Node {
        TensorT<T> value;
        TensorT<T> grad;  // empty until needed
        std::function<void(GraphT&, const Node&)> back;
        ParameterT<T>* bound = nullptr;

        void ensure_grad() {
            if (grad.numel() == 0) grad = TensorT<T>(value.shape());
        }
        void grad_add(const TensorT<T>& g) {
            ensure_grad();
            for (int64_t i = 0; i < grad.numel(); ++i) grad.at(i) += g.at(i);
        }
    };

    Var make(TensorT<T> value, std::function<void(GraphT&, const Node&)> back) {
        nodes_.push_back(Node{std::move(value), {}, std::move(back), nullptr});
        return Var{static_cast<int32_t>(nodes_.size() - 1)};
    }

    std::vector<Node> nodes_;
};

using Graph = GraphT<float>;
using Graph64 = GraphT<double>;

}  // namespace signet::ag
