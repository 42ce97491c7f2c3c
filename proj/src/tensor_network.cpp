// Copyright 2026 The qrobust Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qrobust/tensor_network.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <tuple>

#include "qrobust/errors.hpp"
#include "qrobust/kernels.hpp"
#include "qrobust/lanczos.hpp"

namespace qrobust {

using RowMajor = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::int64_t Tensor::size() const {
    std::int64_t s = 1;
    for (auto d : dims) s *= d;
    return s;
}

void Tensor::validate() const {
    if (dims.size() != labels.size()) throw DimensionError("tensor rank and label count differ");
    for (auto d : dims)
        if (d < 1) throw DimensionError("tensor axis of size < 1");
    if (static_cast<std::int64_t>(data.size()) != size()) throw DimensionError("tensor data length mismatch");
    std::set<int> seen(labels.begin(), labels.end());
    if (seen.size() != labels.size()) throw DimensionError("tensor repeats an axis label");
}

void TensorNetwork::validate() const {
    std::map<int, std::vector<std::int64_t>> holders;
    for (const auto& t : nodes) {
        t.validate();
        for (std::size_t i = 0; i < t.labels.size(); ++i) holders[t.labels[i]].push_back(t.dims[i]);
    }
    std::set<int> open;
    for (const auto& [label, ds] : holders) {
        if (ds.size() > 2) throw DimensionError("label " + std::to_string(label) + " is shared by more than two nodes");
        if (ds.size() == 2 && ds[0] != ds[1]) throw DimensionError("edge joins axes of different size");
        if (ds.size() == 1) open.insert(label);
    }
    std::set<int> declared(output_labels.begin(), output_labels.end());
    declared.insert(input_labels.begin(), input_labels.end());
    if (declared != open) throw DimensionError("open axes do not match the declared input and output groups");
    if (static_cast<int>(output_labels.size()) != n_qubits || static_cast<int>(input_labels.size()) != n_qubits)
        throw DimensionError("open axis groups must have one leg per qubit");
}

namespace {

Tensor local_tensor(const ComplexMatrix& op, const std::vector<int>& out_labels, const std::vector<int>& in_labels,
                    bool conjugate, int kraus_label = -1, const std::vector<ComplexMatrix>* kraus = nullptr) {
    Tensor t;
    const std::int64_t d = op.rows();
    const std::size_t k_count = kraus ? kraus->size() : 1;
    if (kraus) {
        t.dims.push_back(static_cast<std::int64_t>(k_count));
        t.labels.push_back(kraus_label);
    }
    for (int l : out_labels) {
        t.dims.push_back(2);
        t.labels.push_back(l);
    }
    for (int l : in_labels) {
        t.dims.push_back(2);
        t.labels.push_back(l);
    }
    t.data.resize(k_count * static_cast<std::size_t>(d * d));
    std::size_t pos = 0;
    for (std::size_t j = 0; j < k_count; ++j) {
        const ComplexMatrix& m = kraus ? (*kraus)[j] : op;
        for (std::int64_t r = 0; r < d; ++r)
            for (std::int64_t c = 0; c < d; ++c) t.data[pos++] = conjugate ? std::conj(m(r, c)) : m(r, c);
    }
    return t;
}

}  // namespace

TensorNetwork build_heisenberg_tn(const QmlModel& model, const std::vector<std::size_t>& subset) {
    const int n = model.n_qubits();
    TensorNetwork tn;
    tn.n_qubits = n;
    int next_label = 0;
    std::vector<int> ket(static_cast<std::size_t>(n)), bra(static_cast<std::size_t>(n));
    for (int q = 0; q < n; ++q) bra[static_cast<std::size_t>(q)] = next_label++;
    for (int q = 0; q < n; ++q) ket[static_cast<std::size_t>(q)] = next_label++;
    tn.output_labels = bra;
    tn.input_labels = ket;
    std::vector<bool> touched(static_cast<std::size_t>(n), false);

    for (const auto& inst : model.circuit().instructions()) {
        const auto& qs = targets_of(inst);
        std::vector<int> ket_in, bra_in, ket_out, bra_out;
        for (int q : qs) {
            const auto u = static_cast<std::size_t>(q);
            ket_in.push_back(ket[u]);
            bra_in.push_back(bra[u]);
            ket[u] = next_label++;
            bra[u] = next_label++;
            ket_out.push_back(ket[u]);
            bra_out.push_back(bra[u]);
            touched[u] = true;
        }
        if (const auto* g = std::get_if<Gate>(&inst)) {
            tn.nodes.push_back(local_tensor(g->matrix, ket_out, ket_in, false));
            tn.nodes.push_back(local_tensor(g->matrix, bra_out, bra_in, true));
        } else {
            const auto& site = std::get<NoiseSite>(inst);
            const auto& kraus = site.channel.kraus();
            const int kl = next_label++;
            tn.nodes.push_back(local_tensor(kraus.front(), ket_out, ket_in, false, kl, &kraus));
            tn.nodes.push_back(local_tensor(kraus.front(), bra_out, bra_in, true, kl, &kraus));
        }
    }

    const auto& meas = model.measurement();
    const auto& measured = meas.measured_qubits();
    std::vector<int> m_bra, m_ket;
    for (int q : measured) {
        m_bra.push_back(bra[static_cast<std::size_t>(q)]);
        m_ket.push_back(ket[static_cast<std::size_t>(q)]);
    }
    tn.nodes.push_back(local_tensor(meas.local_subset_operator(subset), m_bra, m_ket, false));

    // Unmeasured wires close with the identity: join the two copies, or
    // place an explicit identity when nothing acted on the wire.
    std::map<int, int> rename;
    for (int q = 0; q < n; ++q) {
        if (std::find(measured.begin(), measured.end(), q) != measured.end()) continue;
        const auto u = static_cast<std::size_t>(q);
        if (!touched[u]) {
            tn.nodes.push_back(local_tensor(ComplexMatrix::Identity(2, 2), {bra[u]}, {ket[u]}, false));
        } else {
            rename[bra[u]] = ket[u];
        }
    }
    if (!rename.empty())
        for (auto& t : tn.nodes)
            for (auto& l : t.labels)
                if (auto it = rename.find(l); it != rename.end()) l = it->second;
    return tn;
}

namespace {

struct Shape {
    std::vector<std::int64_t> dims;
    std::vector<int> labels;
    double size() const {
        double s = 1.0;
        for (auto d : dims) s *= static_cast<double>(d);
        return s;
    }
};

struct PairCost {
    Shape result;
    double size;
    double flops;
    std::vector<int> shared;
};

PairCost pair_cost(const Shape& a, const Shape& b) {
    PairCost c;
    double shared = 1.0;
    for (std::size_t i = 0; i < a.labels.size(); ++i) {
        auto it = std::find(b.labels.begin(), b.labels.end(), a.labels[i]);
        if (it != b.labels.end()) {
            c.shared.push_back(a.labels[i]);
            shared *= static_cast<double>(a.dims[i]);
        } else {
            c.result.labels.push_back(a.labels[i]);
            c.result.dims.push_back(a.dims[i]);
        }
    }
    for (std::size_t i = 0; i < b.labels.size(); ++i) {
        if (std::find(a.labels.begin(), a.labels.end(), b.labels[i]) == a.labels.end()) {
            c.result.labels.push_back(b.labels[i]);
            c.result.dims.push_back(b.dims[i]);
        }
    }
    c.size = c.result.size();
    c.flops = c.size * shared;
    return c;
}

std::vector<Shape> shapes_of(const std::vector<Tensor>& nodes) {
    std::vector<Shape> s;
    s.reserve(nodes.size());
    for (const auto& t : nodes) s.push_back({t.dims, t.labels});
    return s;
}

}  // namespace

ContractionOrder greedy_order(const std::vector<Tensor>& nodes, const std::vector<int>& open_labels) {
    (void)open_labels;  // open axes are simply never shared, so they need no special casing
    std::vector<Shape> slots = shapes_of(nodes);
    std::set<int> active;
    ContractionOrder order;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        active.insert(static_cast<int>(i));
        order.peak_elements = std::max(order.peak_elements, static_cast<std::size_t>(slots[i].size()));
    }
    std::map<int, std::set<int>> holders;
    for (std::size_t i = 0; i < slots.size(); ++i)
        for (int l : slots[i].labels) holders[l].insert(static_cast<int>(i));

    while (active.size() > 1) {
        std::set<std::pair<int, int>> candidates;
        for (const auto& [label, hs] : holders) {
            if (hs.size() != 2) continue;
            candidates.insert({*hs.begin(), *hs.rbegin()});
        }
        int best_a = -1, best_b = -1;
        PairCost best;
        if (!candidates.empty()) {
            for (const auto& [a, b] : candidates) {
                PairCost c = pair_cost(slots[static_cast<std::size_t>(a)], slots[static_cast<std::size_t>(b)]);
                if (best_a < 0 || std::tie(c.size, c.flops) < std::tie(best.size, best.flops)) {
                    best = std::move(c);
                    best_a = a;
                    best_b = b;
                }
            }
        } else {
            // Disconnected components: join the two smallest.
            std::vector<int> by_size(active.begin(), active.end());
            std::stable_sort(by_size.begin(), by_size.end(), [&](int x, int y) {
                return slots[static_cast<std::size_t>(x)].size() < slots[static_cast<std::size_t>(y)].size();
            });
            best_a = std::min(by_size[0], by_size[1]);
            best_b = std::max(by_size[0], by_size[1]);
            best = pair_cost(slots[static_cast<std::size_t>(best_a)], slots[static_cast<std::size_t>(best_b)]);
        }
        const int id = static_cast<int>(slots.size());
        for (int l : slots[static_cast<std::size_t>(best_a)].labels) holders[l].erase(best_a);
        for (int l : slots[static_cast<std::size_t>(best_b)].labels) holders[l].erase(best_b);
        for (int l : best.shared) holders.erase(l);
        for (int l : best.result.labels) holders[l].insert(id);
        active.erase(best_a);
        active.erase(best_b);
        active.insert(id);
        order.steps.emplace_back(best_a, best_b);
        order.flops += best.flops;
        order.peak_elements = std::max(order.peak_elements, static_cast<std::size_t>(best.size));
        slots.push_back(std::move(best.result));
    }
    return order;
}

ContractionOrder evaluate_order(const std::vector<Tensor>& nodes, const std::vector<std::pair<int, int>>& steps) {
    std::vector<Shape> slots = shapes_of(nodes);
    ContractionOrder order;
    order.steps = steps;
    for (const auto& s : slots) order.peak_elements = std::max(order.peak_elements, static_cast<std::size_t>(s.size()));
    for (const auto& [a, b] : steps) {
        PairCost c = pair_cost(slots.at(static_cast<std::size_t>(a)), slots.at(static_cast<std::size_t>(b)));
        order.flops += c.flops;
        order.peak_elements = std::max(order.peak_elements, static_cast<std::size_t>(c.size));
        slots.push_back(std::move(c.result));
    }
    return order;
}

namespace {

struct Layout {
    std::vector<int> perm;
    bool needed;
};

// Axis order that puts `front` labels first (in the given order) followed
// by the rest, or the rest followed by `back`.
Layout layout(const std::vector<int>& labels, const std::vector<int>& shared, bool shared_last) {
    std::vector<int> free_axes, shared_axes;
    for (int s : shared)
        shared_axes.push_back(static_cast<int>(std::find(labels.begin(), labels.end(), s) - labels.begin()));
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (std::find(shared.begin(), shared.end(), labels[i]) == shared.end()) free_axes.push_back(static_cast<int>(i));
    Layout l;
    if (shared_last) {
        l.perm = free_axes;
        l.perm.insert(l.perm.end(), shared_axes.begin(), shared_axes.end());
    } else {
        l.perm = shared_axes;
        l.perm.insert(l.perm.end(), free_axes.begin(), free_axes.end());
    }
    l.needed = false;
    for (std::size_t i = 0; i < l.perm.size(); ++i)
        if (l.perm[i] != static_cast<int>(i)) l.needed = true;
    return l;
}

void gemm(const Complex* a, const Complex* b, Complex* out, Eigen::Index m, Eigen::Index k, Eigen::Index n) {
    Eigen::Map<const RowMajor> ma(a, m, k);
    Eigen::Map<const RowMajor> mb(b, k, n);
    Eigen::Map<RowMajor> mo(out, m, n);
    mo.noalias() = ma * mb;
}

std::int64_t product(const std::vector<std::int64_t>& d, std::size_t from, std::size_t to) {
    std::int64_t p = 1;
    for (std::size_t i = from; i < to; ++i) p *= d[i];
    return p;
}

}  // namespace

Tensor contract(const std::vector<Tensor>& nodes, const std::vector<std::pair<int, int>>& steps,
                const std::vector<int>& final_labels) {
    if (nodes.empty()) throw InputError("contract: empty network");
    std::vector<Tensor> slots(nodes.begin(), nodes.end());
    std::vector<bool> used(slots.size(), false);
    for (const auto& [a, b] : steps) {
        if (a == b || used.at(static_cast<std::size_t>(a)) || used.at(static_cast<std::size_t>(b)))
            throw InputError("contract: invalid contraction step");
        Tensor& ta = slots[static_cast<std::size_t>(a)];
        Tensor& tb = slots[static_cast<std::size_t>(b)];
        const PairCost c = pair_cost({ta.dims, ta.labels}, {tb.dims, tb.labels});
        const Layout la = layout(ta.labels, c.shared, true);
        const Layout lb = layout(tb.labels, c.shared, false);
        std::vector<Complex> pa, pb;
        const Complex* da = ta.data.data();
        const Complex* db = tb.data.data();
        if (la.needed) {
            pa.resize(ta.data.size());
            kernels::permute(ta.data, ta.dims, la.perm, pa);
            da = pa.data();
        }
        if (lb.needed) {
            pb.resize(tb.data.size());
            kernels::permute(tb.data, tb.dims, lb.perm, pb);
            db = pb.data();
        }
        const std::size_t a_free = ta.labels.size() - c.shared.size();
        std::vector<std::int64_t> pdims_a;
        for (int p : la.perm) pdims_a.push_back(ta.dims[static_cast<std::size_t>(p)]);
        const Eigen::Index m = product(pdims_a, 0, a_free);
        const Eigen::Index k = product(pdims_a, a_free, pdims_a.size());
        const Eigen::Index n = tb.size() / std::max<std::int64_t>(k, 1);
        Tensor out;
        out.dims = c.result.dims;
        out.labels = c.result.labels;
        out.data.resize(static_cast<std::size_t>(m * n));
        gemm(da, db, out.data.data(), m, k, n);
        used[static_cast<std::size_t>(a)] = used[static_cast<std::size_t>(b)] = true;
        ta.data.clear();
        ta.data.shrink_to_fit();
        tb.data.clear();
        tb.data.shrink_to_fit();
        slots.push_back(std::move(out));
        used.push_back(false);
    }
    std::size_t remaining = 0, last = 0;
    for (std::size_t i = 0; i < slots.size(); ++i)
        if (!used[i]) {
            ++remaining;
            last = i;
        }
    if (remaining != 1) throw InputError("contract: order leaves " + std::to_string(remaining) + " tensors");
    Tensor& r = slots[last];
    if (final_labels.size() != r.labels.size()) throw InputError("contract: final label list does not match");
    std::vector<int> perm;
    for (int l : final_labels) {
        auto it = std::find(r.labels.begin(), r.labels.end(), l);
        if (it == r.labels.end()) throw InputError("contract: final label missing");
        perm.push_back(static_cast<int>(it - r.labels.begin()));
    }
    Tensor out;
    out.labels = final_labels;
    for (int p : perm) out.dims.push_back(r.dims[static_cast<std::size_t>(p)]);
    out.data.resize(r.data.size());
    kernels::permute(r.data, r.dims, perm, out.data);
    return out;
}

ComplexMatrix contract_dense(const TensorNetwork& tn) {
    tn.validate();
    std::vector<int> open = tn.output_labels;
    open.insert(open.end(), tn.input_labels.begin(), tn.input_labels.end());
    const ContractionOrder order = greedy_order(tn.nodes, open);
    const Tensor t = contract(tn.nodes, order.steps, open);
    const Eigen::Index d = dim_of(tn.n_qubits);
    ComplexMatrix m(d, d);
    for (Eigen::Index r = 0; r < d; ++r)
        for (Eigen::Index c = 0; c < d; ++c) m(r, c) = t.data[static_cast<std::size_t>(r * d + c)];
    return m;
}

MatfreeOperator::MatfreeOperator(TensorNetwork tn) : tn_(std::move(tn)) {
    tn_.validate();
    shapes_ = tn_.nodes;
    Tensor vec;
    vec.labels = tn_.input_labels;
    vec.dims.assign(tn_.input_labels.size(), 2);
    shapes_.push_back(std::move(vec));
    order_ = greedy_order(shapes_, tn_.output_labels);

    // Record the permutations and GEMM shapes once.
    std::vector<Shape> slots = shapes_of(shapes_);
    for (const auto& [a, b] : order_.steps) {
        const Shape& sa = slots[static_cast<std::size_t>(a)];
        const Shape& sb = slots[static_cast<std::size_t>(b)];
        PairCost c = pair_cost(sa, sb);
        const Layout la = layout(sa.labels, c.shared, true);
        const Layout lb = layout(sb.labels, c.shared, false);
        Step st{a, b, la.perm, lb.perm, la.needed, lb.needed, 0, 0, 0};
        std::vector<std::int64_t> pdims_a;
        for (int p : la.perm) pdims_a.push_back(sa.dims[static_cast<std::size_t>(p)]);
        const std::size_t a_free = sa.labels.size() - c.shared.size();
        st.m = product(pdims_a, 0, a_free);
        st.k = product(pdims_a, a_free, pdims_a.size());
        st.n = static_cast<Eigen::Index>(sb.size()) / std::max<Eigen::Index>(st.k, 1);
        plan_.push_back(std::move(st));
        slots.push_back(std::move(c.result));
    }
    for (const auto& s : slots) slot_dims_.push_back(s.dims);
    const Shape& last = slots.back();
    for (int l : tn_.output_labels) {
        auto it = std::find(last.labels.begin(), last.labels.end(), l);
        if (it == last.labels.end()) throw InputError("matfree: output leg lost during planning");
        final_perm_.push_back(static_cast<int>(it - last.labels.begin()));
    }
    for (std::size_t i = 0; i < final_perm_.size(); ++i)
        if (final_perm_[i] != static_cast<int>(i)) final_permute_ = true;
}

ComplexVector MatfreeOperator::apply(const ComplexVector& v) const {
    if (v.size() != dim()) throw DimensionError("matfree_apply: vector length does not match 2^n");
    const std::size_t n_inputs = shapes_.size();
    std::vector<std::vector<Complex>> owned(n_inputs + plan_.size());
    auto data_of = [&](int slot) -> std::span<const Complex> {
        const auto s = static_cast<std::size_t>(slot);
        if (s + 1 < n_inputs) return tn_.nodes[s].data;
        if (s + 1 == n_inputs) return {v.data(), static_cast<std::size_t>(v.size())};
        return owned[s];
    };
    std::vector<Complex> pa, pb;
    for (std::size_t i = 0; i < plan_.size(); ++i) {
        const Step& st = plan_[i];
        std::span<const Complex> da = data_of(st.a);
        std::span<const Complex> db = data_of(st.b);
        if (st.permute_a) {
            pa.resize(da.size());
            kernels::permute(da, slot_dims_[static_cast<std::size_t>(st.a)], st.perm_a, pa);
            da = pa;
        }
        if (st.permute_b) {
            pb.resize(db.size());
            kernels::permute(db, slot_dims_[static_cast<std::size_t>(st.b)], st.perm_b, pb);
            db = pb;
        }
        auto& out = owned[n_inputs + i];
        out.resize(static_cast<std::size_t>(st.m * st.n));
        gemm(da.data(), db.data(), out.data(), st.m, st.k, st.n);
        if (static_cast<std::size_t>(st.a) >= n_inputs) std::vector<Complex>().swap(owned[static_cast<std::size_t>(st.a)]);
        if (static_cast<std::size_t>(st.b) >= n_inputs) std::vector<Complex>().swap(owned[static_cast<std::size_t>(st.b)]);
    }
    ComplexVector result(dim());
    const std::span<const Complex> last = plan_.empty() ? data_of(0) : std::span<const Complex>(owned.back());
    std::span<Complex> dst(result.data(), static_cast<std::size_t>(result.size()));
    if (final_permute_) {
        kernels::permute(last, slot_dims_.back(), final_perm_, dst);
    } else {
        std::copy(last.begin(), last.end(), dst.begin());
    }
    return result;
}

ComplexVector matfree_apply(const TensorNetwork& tn, const ComplexVector& v) { return MatfreeOperator(tn).apply(v); }

LipschitzResult lipschitz_tn(const QmlModel& model, const TnOptions& opts) {
    const auto subsets = label_subsets(model.measurement().size());
    LipschitzResult best;
    best.engine = "tn";
    best.k_star = -1.0;
    ContractionStats stats;
    LanczosOptions lo;
    lo.tol = opts.tol;
    lo.max_iter = opts.max_iter;
    lo.restart_dim = opts.restart_dim;
    lo.seed = opts.seed;
    for (const auto& s : subsets) {
        const MatfreeOperator op(build_heisenberg_tn(model, s));
        stats.nodes = std::max(stats.nodes, op.network().nodes.size() + 1);
        stats.steps = std::max(stats.steps, op.steps());
        stats.peak_elements = std::max(stats.peak_elements, op.peak_elements());
        stats.flops = std::max(stats.flops, op.flops());
        const LanczosResult r = lanczos_extremes([&op](const ComplexVector& v) { return op.apply(v); }, op.dim(), lo);
        stats.matvecs += static_cast<std::size_t>(r.matvecs);
        stats.lanczos_restarts += static_cast<std::size_t>(r.restarts);
        stats.max_residual = std::max({stats.max_residual, r.residual_min, r.residual_max});
        const double gap = r.lambda_max - r.lambda_min;
        if (gap > best.k_star) {
            best.k_star = gap;
            best.witness_subset = s;
            best.kernel = {r.v_max, r.v_min, r.lambda_max, r.lambda_min};
        }
    }
    best.k_star = std::max(0.0, best.k_star);
    best.stats = stats;
    return best;
}

}  // namespace qrobust
