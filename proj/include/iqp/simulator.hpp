#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "iqp/bits.hpp"
#include "iqp/errors.hpp"
#include "iqp/rng.hpp"

namespace iqp {

// Statevectors above this qubit count are refused by default (16 MB of
// amplitudes at 20 qubits); the cap exists because this simulator is the
// ground-truth oracle, not a production prover.
inline constexpr std::size_t kDefaultQubitCap = 20;

struct State {
    std::size_t n = 0;
    std::vector<std::complex<double>> amplitudes;  // bit j of the index is qubit j
};

using SampleBatch = std::vector<BitVector>;

namespace detail {

inline std::uint64_t to_mask(const BitVector& v) {
    std::uint64_t m = 0;
    for (std::size_t j = 0; j < v.size(); ++j)
        if (v.get(j)) m |= 1ull << j;
    return m;
}

inline BitVector from_mask(std::uint64_t m, std::size_t n) {
    BitVector v(n);
    for (std::size_t j = 0; j < n; ++j)
        if ((m >> j) & 1) v.set(j, true);
    return v;
}

// e^{iθ X_p} = cos θ·I + i sin θ·X_p acts on the orbit pairs x ↔ x⊕p.
inline void apply_xrotation(std::vector<std::complex<double>>& amp, std::uint64_t p, double theta) {
    double c = std::cos(theta), s = std::sin(theta);
    if (p == 0) {
        std::complex<double> phase(c, s);
        for (auto& a : amp) a *= phase;
        return;
    }
    std::complex<double> is(0.0, s);
    for (std::uint64_t x = 0; x < amp.size(); ++x) {
        std::uint64_t y = x ^ p;
        if (x >= y) continue;
        auto a = amp[x], b = amp[y];
        amp[x] = c * a + is * b;
        amp[y] = c * b + is * a;
    }
}

inline void apply_cnot(std::vector<std::complex<double>>& amp, std::size_t control, std::size_t target) {
    std::uint64_t cm = 1ull << control, tm = 1ull << target;
    for (std::uint64_t x = 0; x < amp.size(); ++x)
        if ((x & cm) && !(x & tm)) std::swap(amp[x], amp[x | tm]);
}

}  // namespace detail

inline State statevector(const BitMatrix& h, double theta,
                         std::size_t qubit_cap = kDefaultQubitCap) {
    std::size_t n = h.cols();
    if (n > qubit_cap) throw resource_error("statevector: qubit count exceeds the cap");
    State st{n, std::vector<std::complex<double>>(1ull << n, 0.0)};
    st.amplitudes[0] = 1.0;
    for (std::size_t r = 0; r < h.rows(); ++r)
        detail::apply_xrotation(st.amplitudes, detail::to_mask(h.row(r)), theta);
    return st;
}

inline double exact_correlation(const BitMatrix& h, const BitVector& s, double theta,
                                std::size_t qubit_cap = kDefaultQubitCap) {
    if (s.size() != h.cols())
        throw std::invalid_argument("exact_correlation: s length must equal cols(H)");
    State st = statevector(h, theta, qubit_cap);
    std::uint64_t smask = detail::to_mask(s);
    double acc = 0.0;
    for (std::uint64_t x = 0; x < st.amplitudes.size(); ++x) {
        double w = std::norm(st.amplitudes[x]);
        acc += (std::popcount(x & smask) & 1) ? -w : w;
    }
    return acc;
}

inline SampleBatch sample_outcomes(const BitMatrix& h, double theta, std::size_t count, Rng& rng,
                                   std::size_t qubit_cap = kDefaultQubitCap) {
    State st = statevector(h, theta, qubit_cap);
    std::vector<double> cdf(st.amplitudes.size());
    double acc = 0.0;
    for (std::uint64_t x = 0; x < st.amplitudes.size(); ++x) {
        acc += std::norm(st.amplitudes[x]);
        cdf[x] = acc;
    }
    SampleBatch out;
    out.reserve(count);
    for (std::size_t t = 0; t < count; ++t) {
        double u = rng.real() * acc;
        std::uint64_t x = static_cast<std::uint64_t>(
            std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        if (x == cdf.size()) --x;  // guard the u = acc edge
        out.push_back(detail::from_mask(x, st.n));
    }
    return out;
}

struct CnotGate {
    std::size_t control = 0;
    std::size_t target = 0;
};

struct Layer {
    enum class Kind { Cnot, Rot };
    Kind kind = Kind::Rot;
    std::vector<CnotGate> cnots;      // Kind::Cnot — gates applied in order
    std::vector<std::size_t> qubits;  // Kind::Rot — rotation targets
    double theta = 0.0;               // Kind::Rot
};

// Layered form of U_{H,θ}|0^n⟩ plus the classical output map: measure the
// layered circuit to get y, then report post·y. The map folds together the
// column normalization of H and the trailing basis-change layer, neither of
// which needs quantum gates.
struct CompiledCircuit {
    std::size_t n = 0;
    std::vector<Layer> layers;
    BitMatrix post;
};

namespace detail {

// CNOT list whose composite action on basis labels is x ↦ W·x, from plain
// Gaussian elimination: each row operation row_t ^= row_c is the gate
// CNOT(control = c, target = t), and the elimination order reverses into
// application order.
inline std::vector<CnotGate> synthesize_cnots(const BitMatrix& w) {
    std::size_t n = w.rows();
    BitMatrix m = w;
    std::vector<CnotGate> ops;
    auto xor_row = [&](std::size_t t, std::size_t c) {
        for (std::size_t j = 0; j < n; ++j)
            if (m.get(c, j)) m.set(t, j, !m.get(t, j));
        ops.push_back({c, t});
    };
    for (std::size_t col = 0; col < n; ++col) {
        if (!m.get(col, col)) {
            std::size_t r = col + 1;
            while (r < n && !m.get(r, col)) ++r;
            if (r == n) throw std::logic_error("synthesize_cnots: matrix is singular");
            xor_row(col, r);
        }
        for (std::size_t r = 0; r < n; ++r)
            if (r != col && m.get(r, col)) xor_row(r, col);
    }
    std::reverse(ops.begin(), ops.end());
    return ops;
}

}  // namespace detail

// Rewrites U_{H,θ} as rotation rounds separated by CNOT basis changes (plus
// the classical post map). Rows are first normalized to (I_n; H̄) using the
// first-fit independent row block; the remaining rows are partitioned
// greedily, each group ℓ contributing a basis change V_ℓ and a rotation round
// on its first k_ℓ qubits. Since C_{V_1}^{-1} fixes |0^n⟩ the leading CNOT
// layer is dropped, and the final C_{V_t} moves into the output map.
inline CompiledCircuit compile(const BitMatrix& h, double theta) {
    std::size_t n = h.cols(), m = h.rows();

    detail::RowSpan basis_span;
    std::vector<BitVector> basis_rows;
    std::vector<std::size_t> rest;
    for (std::size_t r = 0; r < m; ++r) {
        if (basis_span.size() < n && basis_span.try_add(h.row(r)))
            basis_rows.push_back(h.row(r));
        else
            rest.push_back(r);
    }
    if (basis_rows.size() < n) throw std::invalid_argument("compile: H must have full column rank");

    BitMatrix a = BitMatrix::from_rows(basis_rows);
    auto q = a.inverse();
    if (!q.has_value()) throw std::logic_error("compile: basis block not invertible");
    BitMatrix qt = q->transposed();

    // Greedy first-fit partition of the normalized leftover rows.
    std::vector<std::vector<BitVector>> groups;
    std::vector<detail::RowSpan> spans;
    for (std::size_t r : rest) {
        BitVector v = qt.mul(h.row(r));
        if (v.none()) continue;  // zero row: only a global phase e^{iθ}, no gate needed
        std::size_t g = 0;
        while (g < groups.size() && !spans[g].try_add(v)) ++g;
        if (g == groups.size()) {
            groups.emplace_back();
            spans.emplace_back();
            spans.back().try_add(v);
        }
        groups[g].push_back(v);
    }

    CompiledCircuit out{n, {}, BitMatrix::identity(n)};
    Layer first{Layer::Kind::Rot, {}, {}, theta};
    for (std::size_t j = 0; j < n; ++j) first.qubits.push_back(j);
    out.layers.push_back(std::move(first));

    BitMatrix v_prev = BitMatrix::identity(n);
    for (const auto& group : groups) {
        // V_ℓ: first k columns are the group rows, completed with the unit
        // vectors on non-pivot coordinates (always independent of the group,
        // and they keep the basis-change circuits small).
        std::vector<BitVector> cols = group;
        detail::RowSpan span;
        for (const auto& c : cols) span.try_add(c);
        for (std::size_t j = 0; j < n && cols.size() < n; ++j)
            if (!span.covers_pivot(j)) cols.push_back(BitVector::unit(n, j));
        BitMatrix v = BitMatrix::from_cols(cols);
        auto vinv = v.inverse();
        if (!vinv.has_value()) throw std::logic_error("compile: group basis not invertible");

        Layer cnot{Layer::Kind::Cnot, detail::synthesize_cnots(vinv->mul(v_prev)), {}, 0.0};
        if (!cnot.cnots.empty()) out.layers.push_back(std::move(cnot));
        Layer rot{Layer::Kind::Rot, {}, {}, theta};
        for (std::size_t j = 0; j < group.size(); ++j) rot.qubits.push_back(j);
        out.layers.push_back(std::move(rot));
        v_prev = v;
    }

    out.post = a.transposed().mul(v_prev);  // Q^{-T}·V_t with Q = A^{-1}
    return out;
}

// Runs the layered circuit on |0^n⟩ and folds the output map back into the
// amplitude labels, so the result is directly comparable to statevector()
// (up to the global phase of any zero rows dropped during compilation).
inline State simulate_compiled(const CompiledCircuit& c,
                               std::size_t qubit_cap = kDefaultQubitCap) {
    if (c.n > qubit_cap) throw resource_error("simulate_compiled: qubit count exceeds the cap");
    State st{c.n, std::vector<std::complex<double>>(1ull << c.n, 0.0)};
    st.amplitudes[0] = 1.0;
    for (const auto& layer : c.layers) {
        if (layer.kind == Layer::Kind::Rot) {
            for (auto qb : layer.qubits) detail::apply_xrotation(st.amplitudes, 1ull << qb, layer.theta);
        } else {
            for (const auto& g : layer.cnots) detail::apply_cnot(st.amplitudes, g.control, g.target);
        }
    }
    // Express the state in the output basis by applying the classical map.
    std::vector<std::complex<double>> mapped(st.amplitudes.size());
    for (std::uint64_t y = 0; y < st.amplitudes.size(); ++y) {
        std::uint64_t x = detail::to_mask(c.post.mul(detail::from_mask(y, c.n)));
        mapped[x] = st.amplitudes[y];
    }
    st.amplitudes = std::move(mapped);
    return st;
}

// One layer per line: `CNOT c1>t1 c2>t2 …` / `ROT theta q1 q2 …`, 1-based.
inline std::string dump_circuit(const CompiledCircuit& c) {
    std::ostringstream os;
    for (const auto& layer : c.layers) {
        if (layer.kind == Layer::Kind::Cnot) {
            os << "CNOT";
            for (const auto& g : layer.cnots) os << ' ' << g.control + 1 << '>' << g.target + 1;
        } else {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.17g", layer.theta);
            os << "ROT " << buf;
            for (auto qb : layer.qubits) os << ' ' << qb + 1;
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace iqp
