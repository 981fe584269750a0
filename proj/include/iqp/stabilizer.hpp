#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "iqp/bits.hpp"
#include "iqp/codes.hpp"
#include "iqp/errors.hpp"

namespace iqp {

// Stabilizer tableau of U_H |0^n> for an m×n generator matrix H at θ = π/8.
// Generator j acts as X on the support of x_part row j, Z on qubit j, and
// carries sign (−1)^{phases[j]}.
struct StabTableau {
    BitMatrix x_part;  // n×n, equals H^T H
    BitMatrix z_part;  // n×n identity
    BitVector phases;  // phase bit per generator
};

inline StabTableau iqp_tableau(const BitMatrix& h) {
    std::size_t n = h.cols();
    StabTableau t{h.gram(), BitMatrix::identity(n), BitVector(n)};
    for (std::size_t j = 0; j < n; ++j) {
        unsigned w = weight_mod4(h.col(j));
        if (w == 2 || w == 3) t.phases.set(j, true);
    }
    return t;
}

// The correlation ⟨Z_s⟩, held symbolically: sign ∈ {−1, 0, +1} together with
// the exponent g, so the exact value sign·2^{−g/2} never passes through a
// lossy float until a caller asks for one.
struct Correlation {
    int sign = 0;
    std::size_t g = 0;

    bool zero() const { return sign == 0; }
    double value() const { return zero() ? 0.0 : sign * std::exp2(-0.5 * static_cast<double>(g)); }
};

// Quadratic form over Z4 evaluated on 0/1 inputs:
//   Q(x) = Σ_i linear[i]·x_i + 2·Σ_{i<j} coupling(i,j)·x_i·x_j  (mod 4).
// The coupling matrix is symmetric and its diagonal is ignored.
struct QuadFormZ4 {
    std::size_t t = 0;
    std::vector<unsigned> linear;
    BitMatrix coupling;
};

// Σ_x i^{Q(x)} is either zero or exactly 2^{k/2}·ω^octant with ω = e^{iπ/4};
// k and octant always share parity.
struct GaussSum {
    bool zero = false;
    std::size_t k = 0;
    unsigned octant = 0;
};

// Evaluates Σ_{x ∈ F2^t} i^{Q(x)} by eliminating one or two variables at a
// time, so the cost is polynomial in t instead of 2^t. Writing u for the
// parity of the variables coupled to x_i, the sum over x_i of
// i^{w_i x_i + 2 x_i u} splits into three cases:
//   - no couplings: a constant factor 1 + i^{w_i} (zero when w_i = 2);
//   - w_i odd: a factor √2·ω^{±1} times i^{±u}, and expanding the parity u as
//     a Z4 form shifts the coupled linear terms and toggles their couplings;
//   - w_i even: the factor 2·[u = w_i/2] forces a parity constraint, resolved
//     by substituting a pivot variable x_p = w_i/2 ⊕ parity(rest) and
//     eliminating both i and p.
// Both expansions use parity(x_T) ≡ Σ_{j∈T} x_j + 2·Σ_{j<k∈T} x_j x_k (mod 4).
inline GaussSum gauss_sum(const QuadFormZ4& form) {
    std::size_t t = form.t;
    if (form.linear.size() != t || form.coupling.rows() != t || form.coupling.cols() != t)
        throw std::invalid_argument("gauss_sum: inconsistent form dimensions");

    std::vector<unsigned> w(t);
    for (std::size_t i = 0; i < t; ++i) w[i] = form.linear[i] & 3;
    std::vector<BitVector> b;
    b.reserve(t);
    for (std::size_t i = 0; i < t; ++i) b.push_back(form.coupling.row(i));
    BitVector active = BitVector::ones(t);

    auto for_set = [t](const BitVector& mask, auto&& fn) {
        for (std::size_t j = 0; j < t; ++j)
            if (mask.get(j)) fn(j);
    };

    std::size_t k = 0;
    unsigned oct = 0;
    for (std::size_t i = 0; i < t; ++i) {
        if (!active.get(i)) continue;
        active.set(i, false);
        BitVector tset = b[i] & active;
        if (tset.none()) {
            switch (w[i]) {
                case 0: k += 2; break;
                case 1: k += 1; oct += 1; break;
                case 2: return GaussSum{true, 0, 0};
                case 3: k += 1; oct += 7; break;
            }
        } else if (w[i] & 1) {
            // 1 + i^{w_i}(−1)^u = √2·ω^{±1}·i^{c·u} with c = ∓1 mod 4.
            unsigned c;
            if (w[i] == 1) {
                oct += 1;
                c = 3;
            } else {
                oct += 7;
                c = 1;
            }
            k += 1;
            for_set(tset, [&](std::size_t j) {
                w[j] = (w[j] + c) & 3;
                b[j] ^= tset;  // pairwise toggles within T; the diagonal is ignored
            });
        } else {
            // 1 + (−1)^{l0 + u} restricts to parity(x_T) = l0 and doubles.
            bool l0 = (w[i] == 2);
            k += 2;
            std::size_t p = tset.first_set();
            active.set(p, false);
            BitVector rest = tset;  // T' = T \ {p}
            rest.set(p, false);
            BitVector pc = b[p] & active;  // pivot couplings P, minus i and p
            unsigned wp = w[p];

            // Substitute x_p = l0 ⊕ parity(x_{T'}) into w_p·x_p + 2·x_p·Σ_P x_k.
            oct += 2 * ((wp * (l0 ? 1u : 0u)) & 3u);
            for_set(rest, [&](std::size_t j) { w[j] = (w[j] + wp) & 3; });
            if (wp & 1)
                for_set(rest, [&](std::size_t j) { b[j] ^= rest; });
            if ((wp & 1) && l0)
                for_set(rest, [&](std::size_t j) { w[j] = (w[j] + 2) & 3; });
            if (l0)
                for_set(pc, [&](std::size_t j) { w[j] = (w[j] + 2) & 3; });
            BitVector both = rest & pc;
            for_set(both, [&](std::size_t j) { w[j] = (w[j] + 2) & 3; });
            for_set(rest, [&](std::size_t j) { b[j] ^= pc; });
            for_set(pc, [&](std::size_t j) { b[j] ^= rest; });
        }
        oct &= 7;
    }
    return GaussSum{false, k, oct};
}

// Signed correlation from the H_s block alone:
//   ⟨Z_s⟩ = 2^{−m1/2} · Σ_{a ∈ C⊥} i^{|a|},
// where C is the column space of H_s and m1 its row count. Writing a = Kx over
// a kernel basis K of H_s^T turns |a| mod 4 into a QuadFormZ4 with
// linear[i] = |k_i| mod 4 and coupling(i,j) = k_i·k_j.
inline Correlation correlation_from_dual(const BitMatrix& hs) {
    std::size_t m1 = hs.rows();
    if (!hs.solve(BitVector::ones(m1)).has_value())
        throw no_secret_error("correlation_from_dual: all-ones vector not in the column space");

    BitMatrix kb = hs.transposed().kernel_basis();
    std::size_t t = kb.cols();
    QuadFormZ4 form{t, std::vector<unsigned>(t), BitMatrix(t, t)};
    for (std::size_t i = 0; i < t; ++i) {
        form.linear[i] = weight_mod4(kb.col(i));
        for (std::size_t j = i + 1; j < t; ++j)
            if (kb.col(i).dot(kb.col(j))) {
                form.coupling.set(i, j, true);
                form.coupling.set(j, i, true);
            }
    }

    GaussSum gs = gauss_sum(form);
    if (gs.zero) return Correlation{0, hs.gram().rank()};
    // The sum is a real number, so the octant can only be 0 or 4.
    if (gs.octant % 4 != 0 || gs.k > m1)
        throw std::logic_error("correlation_from_dual: non-real Gauss sum");
    return Correlation{gs.octant == 0 ? +1 : -1, m1 - gs.k};
}

// ⟨Z_s⟩ for the full program: only rows with odd overlap against s matter.
inline Correlation correlation(const BitMatrix& h, const BitVector& s) {
    if (s.size() != h.cols())
        throw std::invalid_argument("correlation: s length must equal cols(H)");
    if (s.none()) throw std::invalid_argument("correlation: s must be nonzero");
    BitMatrix hs = h.rows_where(h.mul(s));
    if (hs.rows() == 0) return Correlation{+1, 0};
    return correlation_from_dual(hs);
}

// Minimum number of distinct generators whose product has full X support —
// equal to the rank of the Gram matrix of H_s, which is also the overlap
// exponent: |⟨0|U_{H_s, π/4}|0⟩| = 2^{−g/2} when nonzero.
inline std::size_t min_generator_distance(const BitMatrix& hs) { return hs.gram().rank(); }

}  // namespace iqp
