#include "seq2form/tape.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace s2f {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

Var Tape::push(Tensor value, std::function<void(Tape&)> back) {
    Node n;
    n.value = std::move(value);
    n.back = std::move(back);
    nodes_.push_back(std::move(n));
    return Var{static_cast<std::int32_t>(nodes_.size() - 1)};
}

const Tape::Node& Tape::node(Var v) const {
    check(v, "node");
    return nodes_[static_cast<std::size_t>(v.idx)];
}

void Tape::check(Var v, const char* op) const {
    if (!v.valid() || static_cast<std::size_t>(v.idx) >= nodes_.size()) {
        throw std::invalid_argument(std::string(op) + ": invalid tape handle");
    }
}

Var Tape::param(Tensor& t) {
    auto it = leased_.find(&t);
    if (it != leased_.end()) return Var{it->second};
    Var v = push(t, nullptr);
    nodes_.back().leased = &t;
    leased_.emplace(&t, v.idx);
    return v;
}

Var Tape::input(const Tensor& t) { return push(t, nullptr); }

Var Tape::input(std::vector<double> v) {
    Shape s{static_cast<int>(v.size())};
    return push(Tensor(std::move(s), std::move(v)), nullptr);
}

Var Tape::input(Shape shape, std::vector<double> v) {
    return push(Tensor(std::move(shape), std::move(v)), nullptr);
}

const Tensor& Tape::val(Var v) const { return node(v).value; }

std::span<const double> Tape::values(Var v) const { return node(v).value.values; }

double Tape::scalar(Var v) const {
    const Tensor& t = node(v).value;
    require(t.size() == 1, "scalar: node is not a scalar, shape " + shape_str(t.shape));
    return t.values[0];
}

std::span<const double> Tape::grad_of(Var v) const { return node(v).grad; }

Var Tape::add(Var a, Var b) {
    check(a, "add");
    check(b, "add");
    const Tensor& ta = val(a);
    const Tensor& tb = val(b);
    require(ta.shape == tb.shape,
            "add: shape mismatch " + shape_str(ta.shape) + " vs " + shape_str(tb.shape));
    Tensor out(ta.shape);
    for (std::size_t i = 0; i < out.values.size(); ++i)
        out.values[i] = ta.values[i] + tb.values[i];
    int ia = a.idx, ib = b.idx;
    Var ov = push(std::move(out), nullptr);
    int io = ov.idx;
    nodes_[static_cast<std::size_t>(io)].back = [ia, ib, io](Tape& t) {
        const auto& go = t.g(io);
        auto& ga = t.g(ia);
        auto& gb = t.g(ib);
        for (std::size_t i = 0; i < go.size(); ++i) {
            ga[i] += go[i];
            gb[i] += go[i];
        }
    };
    return ov;
}

Var Tape::sub(Var a, Var b) {
    check(a, "sub");
    check(b, "sub");
    const Tensor& ta = val(a);
    const Tensor& tb = val(b);
    require(ta.shape == tb.shape,
            "sub: shape mismatch " + shape_str(ta.shape) + " vs " + shape_str(tb.shape));
    Tensor out(ta.shape);
    for (std::size_t i = 0; i < out.values.size(); ++i)
        out.values[i] = ta.values[i] - tb.values[i];
    int ia = a.idx, ib = b.idx;
    Var ov = push(std::move(out), nullptr);
    int io = ov.idx;
    nodes_[static_cast<std::size_t>(io)].back = [ia, ib, io](Tape& t) {
        const auto& go = t.g(io);
        auto& ga = t.g(ia);
        auto& gb = t.g(ib);
        for (std::size_t i = 0; i < go.size(); ++i) {
            ga[i] += go[i];
            gb[i] -= go[i];
        }
    };
    return ov;
}

Var Tape::mul(Var a, Var b) {
    check(a, "mul");
    check(b, "mul");
    const Tensor& ta = val(a);
    const Tensor& tb = val(b);
    require(ta.shape == tb.shape,
            "mul: shape mismatch " + shape_str(ta.shape) + " vs " + shape_str(tb.shape));
    Tensor out(ta.shape);
    for (std::size_t i = 0; i < out.values.size(); ++i)
        out.values[i] = ta.values[i] * tb.values[i];
    int ia = a.idx, ib = b.idx;
    Var ov = push(std::move(out), nullptr);
    int io = ov.idx;
    nodes_[static_cast<std::size_t>(io)].back = [ia, ib, io](Tape& t) {
        const auto& go = t.g(io);
        const auto& va = t.v(ia);
        const auto& vb = t.v(ib);
        auto& ga = t.g(ia);
        auto& gb = t.g(ib);
        for (std::size_t i = 0; i < go.size(); ++i) {
            ga[i] += go[i] * vb[i];
            gb[i] += go[i] * va[i];
        }
    };
    return ov;
}

Var Tape::affine(Var a, double scale, double shift) {
    check(a, "affine");
    const Tensor& ta = val(a);
    Tensor out(ta.shape);
    for (std::size_t i = 0; i < out.values.size(); ++i)
        out.values[i] = scale * ta.values[i] + shift;
    int ia = a.idx;
    Var ov = push(std::move(out), nullptr);
    int io = ov.idx;
    nodes_[static_cast<std::size_t>(io)].back = [ia, io, scale](Tape& t) {
        const auto& go = t.g(io);
        auto& ga = t.g(ia);
        for (std::size_t i = 0; i < go.size(); ++i) ga[i] += scale * go[i];
    };
    return ov;
}

Var Tape::sigmoid(Var a) {
    check(a, "sigmoid");
    const Tensor& ta = val(a);
    Tensor out(ta.shape);
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        double x = ta.values[i];
        // Branch keeps exp() argument nonpositive for both signs.
        out.values[i] = x >= 0.0 ? 1.0 / (1.0 + std::exp(-x))
                                 : std::exp(x) / (1.0 + std::exp(x));
    }
    int ia = a.idx;
    Var ov = push(std::move(out), nullptr);
    int io = ov.idx;
    nodes_[static_cast<std::size_t>(io)].back = [ia, io](Tape& t) {
        const auto& go = t.g(io);
        const auto& vo = t.v(io);
        auto& ga = t.g(ia);
        for (std::size_t i = 0; i < go.size(); ++i) ga[i] += go[i] * vo[i] * (1.0 - vo[i]);
    };
    return ov;
}

Var Tape::tanh(Var a) {
    check(a, "tanh");
    const Tensor& ta = val(a);
    Tensor out(ta.shape);
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = std::tanh(ta.values[i]);
    int ia = a.idx;
    Var ov = push(std::move(out), nullptr);
    int io = ov.idx;
    nodes_[static_cast<std::size_t>(io)].back = [ia, io](Tape& t) {
        const auto& go = t.g(io);
        const auto& vo = t.v(io);
        auto& ga = t.g(ia);
        for (std::size_t i = 0; i < go.size(); ++i) ga[i] += go[i] * (1.0 - vo[i] * vo[i]);
    };
    return ov;
}

Var Tape::softmax(Var a) {
    check(a, "softmax");
    const Tensor& ta = val(a);
    require(ta.rank() == 1, "softmax: expects a vector, got " + shape_str(ta.shape));
    Tensor out(ta.shape, s2f::softmax(ta.values));
    int ia = a.idx;
    Var ov = push(std::move(out), nullptr);
    int io = ov.idx;
    nodes_[static_cast<std::size_t>(io)].back = [ia, io](Tape& t) {
        const auto& go = t.g(io);
        const auto& p = t.v(io);
        auto& ga = t.g(ia);
        double inner = 0.0;
        for (std::size_t i = 0; i < go.size(); ++i) inner += go[i] * p[i];
        for (std::size_t i = 0; i < go.size(); ++i) ga[i] += p[i] * (go[i] - inner);
    };
    return ov;
}

Var Tape::sum(Var a) {
    check(a, "sum");
    const Tensor& ta = val(a);
    double total = 0.0;
    for (double x : ta.values) total += x;
    int ia = a.idx;
    Var ov = push(Tensor(Shape{1}, {total}), nullptr);
    int io = ov.idx;
    nodes_[static_cast<std::size_t>(io)].back = [ia, io](Tape& t) {
        double go = t.g(io)[0];
        auto& ga = t.g(ia);
        for (double& g : ga) g += go;
    };
    return ov;
}

Var Tape::dot(Var a, Var b) {
    check(a, "dot");
    check(b, "dot");
    const Tensor& ta = val(a);
    const Tensor& tb = val(b);
    require(ta.rank() == 1 && tb.rank() == 1 && ta.size() == tb.size(),
            "dot: expects equal-length vectors, got " + shape_str(ta.shape) + " and " +
                shape_str(tb.shape));
    double total = 0.0;
    for (std::size_t i = 0; i < ta.values.size(); ++i) total += ta.values[i] * tb.values[i];
    int ia = a.idx, ib = b.idx;
    Var ov = push(Tensor(Shape{1}, {total}), nullptr);
    int io = ov.idx;
    nodes_[static_cast<std::size_t>(io)].back = [ia, ib, io](Tape& t) {
        double go = t.g(io)[0];
        const auto& va = t.v(ia);
        const auto& vb = t.v(ib);
        auto& ga = t.g(ia);
        auto& gb = t.g(ib);
        for (std::size_t i = 0; i < va.size(); ++i) {
            ga[i] += go * vb[i];
            gb[i] += go * va[i];
        }
    };
    return ov;
}

Var Tape::logsumexp(Var a) {
    check(a, "logsumexp");
    const Tensor& ta = val(a);
    require(ta.rank() == 1, "logsumexp: expects a vector, got " + shape_str(ta.shape));
    double lse = s2f::logsumexp(ta.values);
    int ia = a.idx;
    Var ov = push(Tensor(Shape{1}, {lse}), nullptr);
    int io = ov.idx;
    nodes_[static_cast<std::size_t>(io)].back = [ia, io](Tape& t) {
        double go = t.g(io)[0];
        double lse = t.v(io)[0];
        const auto& va = t.v(ia);
        auto& ga = t.g(ia);
        for (std::size_t i = 0; i < va.size(); ++i) ga[i] += go * std::exp(va[i] - lse);
    };
    return ov;
}

Var Tape::logsumexp_subset(Var a, std::vector<int> idxs) {
    check(a, "logsumexp_subset");
    const Tensor& ta = val(a);
    require(ta.rank() == 1, "logsumexp_subset: expects a vector");
    require(!idxs.empty(), "logsumexp_subset: empty index set");
    std::vector<double> selected;
    selected.reserve(idxs.size());
    for (int i : idxs) {
        require(i >= 0 && i < static_cast<int>(ta.values.size()),
                "logsumexp_subset: index " + std::to_string(i) + " out of range");
        selected.push_back(ta.values[static_cast<std::size_t>(i)]);
    }
    double lse = s2f::logsumexp(selected);
    int ia = a.idx;
    Var ov = push(Tensor(Shape{1}, {lse}), nullptr);
    int io = ov.idx;
    nodes_[static_cast<std::size_t>(io)].aux = std::move(idxs);
    nodes_[static_cast<std::size_t>(io)].back = [ia, io](Tape& t) {
        double go = t.g(io)[0];
        double lse = t.v(io)[0];
        const auto& va = t.v(ia);
        const auto& aux = t.nodes_[static_cast<std::size_t>(io)].aux;
        auto& ga = t.g(ia);
        for (int i : aux) {
            auto ui = static_cast<std::size_t>(i);
            ga[ui] += go * std::exp(va[ui] - lse);
        }
    };
    return ov;
}

Var Tape::matmul(Var a, Var b) {
    check(a, "matmul");
    check(b, "matmul");
    const Tensor& ta = val(a);
    const Tensor& tb = val(b);
    require(ta.rank() == 2 && tb.rank() == 2 && ta.dim(1) == tb.dim(0),
            "matmul: incompatible shapes " + shape_str(ta.shape) + " and " + shape_str(tb.shape));
    int m = ta.dim(0), k = ta.dim(1), n = tb.dim(1);
    Tensor out(Shape{m, n});
    for (int i = 0; i < m; ++i) {
        for (int p = 0; p < k; ++p) {
            double aip = ta.at(i, p);
            if (aip == 0.0) continue;
            for (int j = 0; j < n; ++j) out.at(i, j) += aip * tb.at(p, j);
        }
    }
    int ia = a.idx, ib = b.idx;
    Var ov = push(std::move(out), nullptr);
    int io = ov.idx;
    nodes_[static_cast<std::size_t>(io)].back = [ia, ib, io, m, k, n](Tape& t) {
        const auto& go = t.g(io);
        const auto& va = t.v(ia);
        const auto& vb = t.v(ib);
        auto& ga = t.g(ia);
        auto& gb = t.g(ib);
        // dA += G·Bᵀ ; dB += Aᵀ·G
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < n; ++j) {
                double gij = go[static_cast<std::size_t>(i) * n + j];
                if (gij == 0.0) continue;
                for (int p = 0; p < k; ++p) {
                    ga[static_cast<std::size_t>(i) * k + p] += gij * vb[static_cast<std::size_t>(p) * n + j];
                    gb[static_cast<std::size_t>(p) * n + j] += gij * va[static_cast<std::size_t>(i) * k + p];
                }
            }
        }
    };
    return ov;
}

Var Tape::matvec(Var w, Var x) {
    check(w, "matvec");
    check(x, "matvec");
    const Tensor& tw = val(w);
    const Tensor& tx = val(x);
    require(tw.rank() == 2 && tx.rank() == 1 && tw.dim(1) == static_cast<int>(tx.size()),
            "matvec: incompatible shapes " + shape_str(tw.shape) + " and " + shape_str(tx.shape));
    int r = tw.dim(0), c = tw.dim(1);
    Tensor out(Shape{r});
    for (int i = 0; i < r; ++i) {
        double acc = 0.0;
        const double* wrow = tw.values.data() + static_cast<std::size_t>(i) * c;
        for (int j = 0; j < c; ++j) acc += wrow[j] * tx.values[static_cast<std::size_t>(j)];
        out.values[static_cast<std::size_t>(i)] = acc;
    }
    int iw = w.idx, ix = x.idx;
    Var ov = push(std::move(out), nullptr);
    int io = ov.idx;
    nodes_[static_cast<std::size_t>(io)].back = [iw, ix, io, r, c](Tape& t) {
        const auto& go = t.g(io);
        const auto& vw = t.v(iw);
        const auto& vx = t.v(ix);
        auto& gw = t.g(iw);
        auto& gx = t.g(ix);
        for (int i = 0; i < r; ++i) {
            double gi = go[static_cast<std::size_t>(i)];
            if (gi == 0.0) continue;
            const double* wrow = vw.data() + static_cast<std::size_t>(i) * c;
            double* gwrow = gw.data() + static_cast<std::size_t>(i) * c;
            for (int j = 0; j < c; ++j) {
                gwrow[j] += gi * vx[static_cast<std::size_t>(j)];
                gx[static_cast<std::size_t>(j)] += gi * wrow[j];
            }
        }
    };
    return ov;
}

Var Tape::matvec_t(Var w, Var x) {
    check(w, "matvec_t");
    check(x, "matvec_t");
    const Tensor& tw = val(w);
    const Tensor& tx = val(x);
    require(tw.rank() == 2 && tx.rank() == 1 && tw.dim(0) == static_cast<int>(tx.size()),
            "matvec_t: incompatible shapes " + shape_str(tw.shape) + " and " + shape_str(tx.shape));
    int r = tw.dim(0), c = tw.dim(1);
    Tensor out(Shape{c});
    for (int i = 0; i < r; ++i) {
        double xi = tx.values[static_cast<std::size_t>(i)];
        if (xi == 0.0) continue;
        const double* wrow = tw.values.data() + static_cast<std::size_t>(i) * c;
        for (int j = 0; j < c; ++j) out.values[static_cast<std::size_t>(j)] += xi * wrow[j];
    }
    int iw = w.idx, ix = x.idx;
    Var ov = push(std::move(out), nullptr);
    int io = ov.idx;
    nodes_[static_cast<std::size_t>(io)].back = [iw, ix, io, r, c](Tape& t) {
        const auto& go = t.g(io);
        const auto& vw = t.v(iw);
        const auto& vx = t.v(ix);
        auto& gw = t.g(iw);
        auto& gx = t.g(ix);
        // y = Wᵀx: dW[i,:] += x[i]·g ; dx[i] += W[i,:]·g
        for (int i = 0; i < r; ++i) {
            const double* wrow = vw.data() + static_cast<std::size_t>(i) * c;
            double* gwrow = gw.data() + static_cast<std::size_t>(i) * c;
            double xi = vx[static_cast<std::size_t>(i)];
            double acc = 0.0;
            for (int j = 0; j < c; ++j) {
                double gj = go[static_cast<std::size_t>(j)];
                gwrow[j] += xi * gj;
                acc += wrow[j] * gj;
            }
            gx[static_cast<std::size_t>(i)] += acc;
        }
    };
    return ov;
}

Var Tape::row(Var m, int r) {
    check(m, "row");
    const Tensor& tm = val(m);
    require(tm.rank() == 2, "row: expects a matrix, got " + shape_str(tm.shape));
    require(r >= 0 && r < tm.dim(0),
            "row: index " + std::to_string(r) + " out of range for " + shape_str(tm.shape));
    int c = tm.dim(1);
    Tensor out(Shape{c});
    for (int j = 0; j < c; ++j) out.values[static_cast<std::size_t>(j)] = tm.at(r, j);
    int im = m.idx;
    Var ov = push(std::move(out), nullptr);
    int io = ov.idx;
    nodes_[static_cast<std::size_t>(io)].back = [im, io, r, c](Tape& t) {
        const auto& go = t.g(io);
        auto& gm = t.g(im);
        double* grow = gm.data() + static_cast<std::size_t>(r) * c;
        for (int j = 0; j < c; ++j) grow[j] += go[static_cast<std::size_t>(j)];
    };
    return ov;
}

Var Tape::concat(std::span<const Var> parts) {
    require(!parts.empty(), "concat: no parts");
    int total = 0;
    for (Var p : parts) {
        check(p, "concat");
        require(val(p).rank() == 1, "concat: expects vectors");
        total += static_cast<int>(val(p).size());
    }
    Tensor out(Shape{total});
    std::vector<int> aux;  // [idx0, len0, idx1, len1, ...]
    int off = 0;
    for (Var p : parts) {
        const auto& pv = val(p).values;
        for (std::size_t i = 0; i < pv.size(); ++i)
            out.values[static_cast<std::size_t>(off) + i] = pv[i];
        aux.push_back(p.idx);
        aux.push_back(static_cast<int>(pv.size()));
        off += static_cast<int>(pv.size());
    }
    Var ov = push(std::move(out), nullptr);
    int io = ov.idx;
    nodes_[static_cast<std::size_t>(io)].aux = std::move(aux);
    nodes_[static_cast<std::size_t>(io)].back = [io](Tape& t) {
        const auto& go = t.g(io);
        const auto& aux = t.nodes_[static_cast<std::size_t>(io)].aux;
        std::size_t off = 0;
        for (std::size_t k = 0; k + 1 < aux.size(); k += 2) {
            auto& gp = t.g(aux[k]);
            auto len = static_cast<std::size_t>(aux[k + 1]);
            for (std::size_t i = 0; i < len; ++i) gp[i] += go[off + i];
            off += len;
        }
    };
    return ov;
}

Var Tape::concat(std::initializer_list<Var> parts) {
    std::vector<Var> v(parts);
    return concat(std::span<const Var>(v));
}

Var Tape::slice(Var a, int offset, int len) {
    check(a, "slice");
    const Tensor& ta = val(a);
    require(ta.rank() == 1, "slice: expects a vector");
    require(offset >= 0 && len > 0 && offset + len <= static_cast<int>(ta.size()),
            "slice: [" + std::to_string(offset) + "," + std::to_string(offset + len) +
                ") out of range for length " + std::to_string(ta.size()));
    Tensor out(Shape{len});
    for (int i = 0; i < len; ++i)
        out.values[static_cast<std::size_t>(i)] = ta.values[static_cast<std::size_t>(offset + i)];
    int ia = a.idx;
    Var ov = push(std::move(out), nullptr);
    int io = ov.idx;
    nodes_[static_cast<std::size_t>(io)].back = [ia, io, offset, len](Tape& t) {
        const auto& go = t.g(io);
        auto& ga = t.g(ia);
        for (int i = 0; i < len; ++i) ga[static_cast<std::size_t>(offset + i)] += go[static_cast<std::size_t>(i)];
    };
    return ov;
}

Var Tape::stack_rows(std::span<const Var> rows) {
    require(!rows.empty(), "stack_rows: no rows");
    int cols = -1;
    for (Var r : rows) {
        check(r, "stack_rows");
        require(val(r).rank() == 1, "stack_rows: expects vectors");
        if (cols < 0) cols = static_cast<int>(val(r).size());
        require(static_cast<int>(val(r).size()) == cols, "stack_rows: ragged rows");
    }
    int m = static_cast<int>(rows.size());
    Tensor out(Shape{m, cols});
    std::vector<int> aux;
    for (int i = 0; i < m; ++i) {
        const auto& rv = val(rows[static_cast<std::size_t>(i)]).values;
        for (int j = 0; j < cols; ++j) out.at(i, j) = rv[static_cast<std::size_t>(j)];
        aux.push_back(rows[static_cast<std::size_t>(i)].idx);
    }
    Var ov = push(std::move(out), nullptr);
    int io = ov.idx;
    nodes_[static_cast<std::size_t>(io)].aux = std::move(aux);
    nodes_[static_cast<std::size_t>(io)].back = [io, cols](Tape& t) {
        const auto& go = t.g(io);
        const auto& aux = t.nodes_[static_cast<std::size_t>(io)].aux;
        for (std::size_t i = 0; i < aux.size(); ++i) {
            auto& gr = t.g(aux[i]);
            for (int j = 0; j < cols; ++j)
                gr[static_cast<std::size_t>(j)] += go[i * static_cast<std::size_t>(cols) + static_cast<std::size_t>(j)];
        }
    };
    return ov;
}

void Tape::backward_from(Var loss) {
    check(loss, "backward");
    const Tensor& lt = val(loss);
    if (lt.size() != 1) {
        throw std::invalid_argument("backward: loss must be a scalar, got shape " +
                                    shape_str(lt.shape));
    }
    for (auto& n : nodes_) n.grad.assign(n.value.values.size(), 0.0);
    nodes_[static_cast<std::size_t>(loss.idx)].grad[0] = 1.0;
    for (std::size_t i = nodes_.size(); i-- > 0;) {
        if (nodes_[i].back) nodes_[i].back(*this);
    }
    // Assignment semantics: parameter grads reflect exactly this loss.
    // Parameters disconnected from the loss end up with zero gradients.
    for (auto& n : nodes_) {
        if (n.leased) {
            n.leased->ensure_grad();
            n.leased->grad = n.grad;
        }
    }
}

void backward(Tape& tape, Var loss) { tape.backward_from(loss); }

}  // namespace s2f
