#pragma once

// Coding-theory layer: the quadratic-residue generator block, classification
// of the self-dual intersection D_s = C_s ∩ C_s⊥, and the randomized samplers
// for doubly-even generator matrices D and their companion matrices F.
//
// Conventions: a "code" is the column space of a generator matrix; generator
// matrices carry one generator per column throughout.

#include <cstddef>
#include <optional>
#include <vector>

#include "bits.hpp"
#include "errors.hpp"
#include "rng.hpp"

namespace iqp {

enum class DualClass { DoublyEven, UnbiasedEven };

struct CodeProfile {
    std::size_t dim_c = 0;      // dim C_s (= g + d)
    std::size_t dim_d = 0;      // dim D_s
    std::size_t gram_rank = 0;  // g = dim C_s - dim D_s
    DualClass dual_class = DualClass::UnbiasedEven;
};

inline unsigned weight_mod4(const BitVector& v) { return static_cast<unsigned>(v.weight() & 3u); }

inline bool is_prime(std::size_t q) {
    if (q < 2) return false;
    for (std::size_t f = 2; f * f <= q; ++f)
        if (q % f == 0) return false;
    return true;
}

// q×((q+3)/2) generator block of the quadratic-residue scheme: an all-ones
// column followed by (q+1)/2 cyclic rotations of the residue indicator
// (bit i set iff i+1 is a nonzero quadratic residue mod q).
inline BitMatrix qrc_generator(std::size_t q) {
    if (!is_prime(q) || (q + 1) % 8 != 0)
        throw std::invalid_argument("qrc_generator: q must be prime with q+1 divisible by 8");
    BitVector indicator(q);
    for (std::size_t j = 1; j < q; ++j) indicator.set((j * j) % q - 1, true);
    std::size_t ncols = (q + 3) / 2;
    BitMatrix m(q, ncols);
    for (std::size_t i = 0; i < q; ++i) m.set(i, 0, true);
    for (std::size_t j = 1; j < ncols; ++j)
        for (std::size_t i = 0; i < q; ++i)
            if (indicator.get((i + q - (j - 1)) % q)) m.set(i, j, true);
    return m;
}

// Basis (as columns) of D_s = C_s ∩ C_s⊥ for C_s = colspace(H_s). A vector of
// C_s lies in the dual iff it is H_s·k for k in ker(H_s^T H_s), so D_s is the
// image of the Gram kernel.
inline BitMatrix self_dual_intersection_basis(const BitMatrix& hs) {
    BitMatrix ker = hs.gram().kernel_basis();
    std::vector<BitVector> images;
    for (std::size_t j = 0; j < ker.cols(); ++j) images.push_back(hs.mul(ker.col(j)));
    if (images.empty()) return BitMatrix(hs.rows(), 0);
    return BitMatrix::from_rows(images).row_basis().transposed();
}

// Ranks and dual-class of H_s per the dichotomy: D_s is doubly even exactly
// when every basis vector has weight 0 mod 4 and the basis is self-orthogonal
// (the latter holds by construction of D_s; checked anyway), and an unbiased
// even code otherwise.
inline CodeProfile classify_self_dual_intersection(const BitMatrix& hs) {
    if (!hs.solve(BitVector::ones(hs.rows())).has_value())
        throw no_secret_error("classify_self_dual_intersection: all-ones not in the column space");
    CodeProfile p;
    p.dim_c = hs.rank();
    p.gram_rank = hs.gram().rank();
    p.dim_d = p.dim_c - p.gram_rank;
    BitMatrix dbasis = self_dual_intersection_basis(hs);
    bool doubly_even = true;
    for (std::size_t j = 0; j < dbasis.cols() && doubly_even; ++j) {
        if (weight_mod4(dbasis.col(j)) != 0) doubly_even = false;
        for (std::size_t k = j + 1; k < dbasis.cols() && doubly_even; ++k)
            if (dbasis.col(j).dot(dbasis.col(k))) doubly_even = false;
    }
    p.dual_class = doubly_even ? DualClass::DoublyEven : DualClass::UnbiasedEven;
    return p;
}

// Uniform draw from particular + span(columns of kernel).
inline BitVector sample_affine(const BitVector& particular, const BitMatrix& kernel, Rng& rng) {
    BitVector v = particular;
    for (std::size_t j = 0; j < kernel.cols(); ++j)
        if (rng.bit()) v ^= kernel.col(j);
    return v;
}

struct LinearConstraint {
    BitVector w;
    bool target = false;  // require x·w = target
};

namespace detail {

// Is x in the column space of M?
inline bool in_colspace(const BitMatrix& m, const BitVector& x) {
    return m.solve(x).has_value();
}

}  // namespace detail

// Uniform draw of x = ambient·y subject to x·wᵢ = tᵢ for every constraint and,
// when `excluded` has at least one column, x ∉ span(excluded). Returns absent
// exactly when the constrained set is empty (the emptiness test is exact).
// An empty `excluded` excludes nothing — not even the zero vector.
inline std::optional<BitVector> sample_subspace_with_constraints(const BitMatrix& ambient,
                                                                 const BitMatrix& excluded,
                                                                 const std::vector<LinearConstraint>& constraints,
                                                                 Rng& rng) {
    std::size_t K = ambient.cols();
    // Constraints in ambient coordinates: row c of the system is (w·a_1, …, w·a_K).
    BitMatrix sys(constraints.size(), K);
    BitVector targets(constraints.size());
    for (std::size_t c = 0; c < constraints.size(); ++c) {
        for (std::size_t j = 0; j < K; ++j)
            if (constraints[c].w.dot(ambient.col(j))) sys.set(c, j, true);
        targets.set(c, constraints[c].target);
    }
    auto y0 = sys.solve(targets);
    if (!y0.has_value()) return std::nullopt;
    BitMatrix yker = sys.kernel_basis();

    bool has_exclusion = excluded.cols() > 0;
    if (has_exclusion) {
        // The whole coset lies in span(excluded) iff the particular point and
        // every kernel direction map into it.
        bool contained = detail::in_colspace(excluded, ambient.mul(*y0));
        for (std::size_t j = 0; contained && j < yker.cols(); ++j)
            contained = detail::in_colspace(excluded, ambient.mul(*y0 ^ yker.col(j)));
        if (contained) return std::nullopt;
    }
    for (int tries = 0; tries < 4096; ++tries) {
        BitVector x = ambient.mul(sample_affine(*y0, yker, rng));
        if (!has_exclusion || !detail::in_colspace(excluded, x)) return x;
    }
    throw construction_error("sample_subspace_with_constraints: rejection loop failed to terminate");
}

// Uniform-ish draw of a weight ≡ 0 (mod 4) vector from the constrained set of
// sample_subspace_with_constraints. Constraints must be homogeneous (target 0)
// so that sums of two solutions remain solutions — the two-stage repair draws
// an even-parity a1 and, when |a1| ≡ 2 (mod 4), a companion a2 orthogonal to
// a1 and outside span(excluded, a1); then a2 or a1+a2 has weight 0 mod 4.
inline std::optional<BitVector> sample_weight_multiple4(const BitMatrix& ambient,
                                                        const BitMatrix& excluded,
                                                        std::vector<LinearConstraint> constraints,
                                                        Rng& rng) {
    for (const auto& c : constraints)
        if (c.target) throw std::invalid_argument("sample_weight_multiple4: constraints must be homogeneous");
    std::size_t n = ambient.rows();
    constraints.push_back({BitVector::ones(n), false});  // even parity is necessary for weight 0 mod 4

    for (int attempt = 0; attempt < 16; ++attempt) {
        auto a1 = sample_subspace_with_constraints(ambient, excluded, constraints, rng);
        if (!a1.has_value()) return std::nullopt;  // not even an even-parity vector exists
        if (weight_mod4(*a1) == 0) return a1;

        auto cons2 = constraints;
        cons2.push_back({*a1, false});
        BitMatrix excl2 = excluded.cols() == 0
                              ? BitMatrix::from_cols({*a1})
                              : BitMatrix::hstack(excluded, BitMatrix::from_cols({*a1}));
        auto a2 = sample_subspace_with_constraints(ambient, excl2, cons2, rng);
        if (!a2.has_value()) continue;  // this a1 is not repairable; redraw
        return weight_mod4(*a2) == 0 ? *a2 : (*a1 ^ *a2);
    }
    return std::nullopt;
}

// m1×d' generator matrix of a doubly-even, self-orthogonal code: independent
// pairwise-orthogonal columns of weight ≡ 0 (mod 4). d' = d except in the two
// extremal regimes (d = m1/2 self-dual and d = (m1-1)/2) where the final
// column may not exist and d' = d-1 is returned. If the all-ones vector lands
// in the span it is moved to column 0. `force_all_ones_first` seeds column 0
// with the all-ones vector (requires m1 ≡ 0 mod 4).
inline BitMatrix sample_doubly_even(std::size_t m1, std::size_t d, Rng& rng,
                                    bool force_all_ones_first = false) {
    if (d > 0 && (m1 < 4 || d > m1 / 2))
        throw std::invalid_argument("sample_doubly_even: need m1 >= 4 and d <= m1/2");
    if (force_all_ones_first && m1 % 4 != 0)
        throw std::invalid_argument("sample_doubly_even: all-ones has weight m1 != 0 mod 4");

    std::vector<BitVector> cols;
    if (force_all_ones_first && d > 0) cols.push_back(BitVector::ones(m1));

    BitMatrix identity = BitMatrix::identity(m1);
    while (cols.size() < d) {
        BitMatrix ambient = cols.empty() ? identity : BitMatrix::from_rows(cols).kernel_basis();
        BitMatrix excluded = cols.empty() ? BitMatrix(m1, 0) : BitMatrix::from_cols(cols);
        std::optional<BitVector> c;
        // The first generator is only constrained away from zero, which the
        // exclusion set cannot express; rejection handles it.
        for (int z = 0; z < 64; ++z) {
            c = sample_weight_multiple4(ambient, excluded, {}, rng);
            if (!c.has_value() || c->any()) break;
        }
        if (!c.has_value() || c->none()) break;  // extremal case: settle for d-1 generators
        cols.push_back(std::move(*c));
    }

    BitMatrix dmat = cols.empty() ? BitMatrix(m1, 0) : BitMatrix::from_cols(cols);
    auto combo = dmat.cols() ? dmat.solve(BitVector::ones(m1)) : std::nullopt;
    if (combo.has_value()) {
        std::size_t i = combo->first_set();  // coefficient-1 generator: replaceable by the sum
        dmat.set_col(i, BitVector::ones(m1));
        if (i != 0) {
            BitVector c0 = dmat.col(0);
            dmat.set_col(0, BitVector::ones(m1));
            dmat.set_col(i, c0);
        }
    }
    return dmat;
}

// m1×g companion matrix F with D^T F = 0, rank(F^T F) = g, F^T F in standard
// form, and the all-ones vector in span(D, F). Standard form of F^T F:
//   diag(1, J, …, J)   for odd m1 (column 0 is all-ones),
//   diag(I2, J, …, J)  for even m1 with all-ones outside span(D),
//   diag(J, …, J)      for even m1 with all-ones inside span(D),
// where J = antidiag(1,1).
inline BitMatrix sample_F(std::size_t m1, std::size_t g, const BitMatrix& D, Rng& rng) {
    std::size_t d = D.cols();
    if (g + 2 * d > m1)
        throw std::invalid_argument("sample_F: need g + 2·cols(D) <= m1");
    if ((m1 - g) % 2 != 0)
        throw std::invalid_argument("sample_F: need g = m1 mod 2");

    bool ones_in_d = d > 0 && D.solve(BitVector::ones(m1)).has_value();
    if (g == 0) {
        if (!ones_in_d)
            throw std::invalid_argument("sample_F: g = 0 requires all-ones in span(D)");
        return BitMatrix(m1, 0);
    }

    auto ambient_for = [&](const std::vector<BitVector>& fcols) {
        std::vector<BitVector> rows = D.cols_as_vectors();
        for (const auto& c : fcols) rows.push_back(c);
        if (rows.empty()) return BitMatrix::identity(m1);
        return BitMatrix::from_rows(rows).kernel_basis();
    };
    auto excluded_with = [&](const std::vector<BitVector>& extra) {
        // Seed with the zero vector so the draws below stay nonzero even when
        // D is empty (a zero generator would make F^T F singular).
        std::vector<BitVector> cols{BitVector(m1)};
        for (const auto& c : D.cols_as_vectors()) cols.push_back(c);
        for (const auto& c : extra) cols.push_back(c);
        return BitMatrix::from_cols(cols);
    };
    auto draw = [&](const BitMatrix& ambient, const BitMatrix& excluded,
                    const std::vector<LinearConstraint>& cons) {
        auto v = sample_subspace_with_constraints(ambient, excluded, cons, rng);
        if (!v.has_value()) throw construction_error("sample_F: constrained sample space is empty");
        return *v;
    };

    std::vector<BitVector> f;
    BitMatrix ambient0 = ambient_for({});
    if (m1 % 2 == 1) {
        f.push_back(BitVector::ones(m1));  // odd weight: contributes the 1×1 block
    } else if (!ones_in_d) {
        BitVector c2 = draw(ambient0, excluded_with({}), {{BitVector::ones(m1), true}});
        f.push_back(BitVector::ones(m1) ^ c2);  // c1·c1 = c2·c2 = 1, c1·c2 = 0: I2 block
        f.push_back(c2);
    } else {
        BitVector c1 = draw(ambient0, excluded_with({}), {});
        BitVector c2 = draw(ambient0, excluded_with({c1}), {{c1, true}});
        f.push_back(c1);  // both even parity here: J block
        f.push_back(c2);
    }
    while (f.size() < g) {
        BitMatrix ambient = ambient_for(f);
        BitVector a = draw(ambient, excluded_with({}), {});
        BitVector b = draw(ambient, excluded_with({a}), {{a, true}});
        f.push_back(a);
        f.push_back(b);
    }
    return BitMatrix::from_cols(f);
}

}  // namespace iqp
