#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "iqp/bits.hpp"
#include "iqp/codes.hpp"
#include "iqp/errors.hpp"
#include "iqp/rng.hpp"
#include "iqp/stabilizer.hpp"

namespace iqp {

inline constexpr std::size_t kDefaultLambda = 50;
inline constexpr int kRetryBudget = 64;

enum class SchemeKind { Stabilizer, Qrc, Hardened };

struct SchemeMeta {
    std::size_t n = 0, m = 0, g = 0;
    std::size_t m1 = 0, d = 0;  // rows of H_s; dim of the self-dual intersection
    SchemeKind scheme = SchemeKind::Stabilizer;
    std::size_t lambda = kDefaultLambda;
    std::uint64_t seed = 0;
    std::size_t q = 0;                          // Qrc only
    std::size_t m0 = 0, d0 = 0, sparsity = 0;   // Hardened only
};

// Row permutation and column transform used to hide the block structure;
// output row i of the public matrix is input row row_perm[i].
struct ObfuscationTrace {
    std::vector<std::size_t> row_perm;
    BitMatrix q;
};

struct Instance {
    BitMatrix h;
    BitVector s;
    SchemeMeta meta;
    std::optional<ObfuscationTrace> trace;  // retained only on request
};

// ---------------------------------------------------------------------------
// Parameter validation

struct ParamCheck {
    std::string name;
    bool ok = false;
};

struct ParamReport {
    std::vector<ParamCheck> checks;
    bool family_ok = true;   // the five feasibility constraints on (n, m, g, m1, d)
    bool regime_ok = true;   // the security inequalities involving λ
    bool radical_ok = true;  // m2 ≥ n − g
};

inline ParamReport check_params(const SchemeMeta& meta) {
    long long n = static_cast<long long>(meta.n), m = static_cast<long long>(meta.m);
    long long g = static_cast<long long>(meta.g), m1 = static_cast<long long>(meta.m1);
    long long d = static_cast<long long>(meta.d), lambda = static_cast<long long>(meta.lambda);
    long long r = g + d;

    ParamReport rep;
    auto family = [&](std::string name, bool ok) {
        rep.checks.push_back({std::move(name), ok});
        rep.family_ok = rep.family_ok && ok;
    };
    auto regime = [&](std::string name, bool ok) {
        rep.checks.push_back({std::move(name), ok});
        rep.regime_ok = rep.regime_ok && ok;
    };

    family("g + d <= n", g + d <= n);
    family("0 < m1 <= m", 0 < m1 && m1 <= m);
    family("n - g - d <= m - m1", n - g - d <= m - m1);
    family("g + 2d <= m1", g + 2 * d <= m1);
    family("m1 = g (mod 2)", (m1 - g) % 2 == 0);

    regime("m1 <= n - 2*lambda + r", m1 <= n - 2 * lambda + r);
    regime("m1 + n - r <= m", m1 + n - r <= m);
    regime("m <= 2*(n - lambda)", m <= 2 * (n - lambda));

    bool rad = m - m1 >= n - g;
    rep.checks.push_back({"m - m1 >= n - g", rad});
    rep.radical_ok = rad;
    return rep;
}

namespace detail {

// Feasible (m1, d) splits. The g = 0 refinements come from the construction
// itself: the all-ones vector must be a codeword of a doubly-even code, which
// forces d ≥ 1 and m1 ≡ 0 (mod 4).
inline std::vector<std::pair<std::size_t, std::size_t>> feasible_splits(
    std::size_t n, std::size_t m, std::size_t g, std::size_t lambda, bool enforce_regime,
    bool require_radical_guard) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    long long nn = static_cast<long long>(n), mm = static_cast<long long>(m);
    long long gg = static_cast<long long>(g), ll = static_cast<long long>(lambda);
    if (enforce_regime && mm > 2 * (nn - ll)) return out;
    for (long long m1 = 1; m1 <= mm; ++m1) {
        if ((m1 - gg) % 2 != 0) continue;
        if (g == 0 && m1 % 4 != 0) continue;
        if (require_radical_guard && mm - m1 < nn - gg) continue;
        for (long long d = (g == 0 ? 1 : 0); gg + 2 * d <= m1 && gg + d <= nn; ++d) {
            if (d > 0 && m1 < 4) continue;  // no doubly-even generator fits
            long long r = gg + d;
            if (nn - r > mm - m1) continue;
            if (enforce_regime && (m1 > nn - 2 * ll + r || m1 + nn - r > mm)) continue;
            out.emplace_back(static_cast<std::size_t>(m1), static_cast<std::size_t>(d));
        }
    }
    return out;
}

}  // namespace detail

// Uniform draw over the feasible (m1, d) region, security regime included.
inline SchemeMeta sample_params(std::size_t n, std::size_t m, std::size_t g, std::size_t lambda,
                                Rng& rng) {
    long long nn = static_cast<long long>(n), mm = static_cast<long long>(m);
    long long ll = static_cast<long long>(lambda);
    if (mm > 2 * (nn - ll))
        throw std::invalid_argument("sample_params: infeasible, violates m <= 2*(n - lambda)");
    auto splits = detail::feasible_splits(n, m, g, lambda, true, false);
    if (splits.empty())
        throw std::invalid_argument(
            "sample_params: infeasible, no (m1, d) satisfies the family and regime constraints");
    auto [m1, d] = splits[rng.index(splits.size())];
    SchemeMeta meta;
    meta.n = n;
    meta.m = m;
    meta.g = g;
    meta.m1 = m1;
    meta.d = d;
    meta.lambda = lambda;
    meta.seed = rng.seed();
    return meta;
}

// ---------------------------------------------------------------------------
// Obfuscation

struct Obfuscated {
    BitMatrix h;
    BitVector s;
    ObfuscationTrace trace;
};

inline Obfuscated obfuscate(const BitMatrix& h, const BitVector& s, Rng& rng) {
    std::size_t m = h.rows(), n = h.cols();
    std::vector<std::size_t> perm(m);
    for (std::size_t i = 0; i < m; ++i) perm[i] = i;
    for (std::size_t i = m; i > 1; --i) std::swap(perm[i - 1], perm[rng.index(i)]);

    BitMatrix q = BitMatrix::random_invertible(n, rng);
    auto qinv = q.inverse();
    if (!qinv.has_value()) throw std::logic_error("obfuscate: invertible draw failed");

    BitMatrix hq = h.mul(q);
    std::vector<BitVector> rows;
    rows.reserve(m);
    for (std::size_t i = 0; i < m; ++i) rows.push_back(hq.row(perm[i]));
    return Obfuscated{BitMatrix::from_rows(rows), qinv->mul(s), ObfuscationTrace{std::move(perm), q}};
}

// ---------------------------------------------------------------------------
// Shared construction pieces

namespace detail {

// Uniform secret from the affine solution set of H_s·s = all-ones.
inline BitVector sample_secret(const BitMatrix& hs, Rng& rng) {
    auto s0 = hs.solve(BitVector::ones(hs.rows()));
    if (!s0.has_value()) throw construction_error("construct: H_s does not admit a secret");
    return sample_affine(*s0, hs.kernel_basis(), rng);
}

// m2 rows orthogonal to s, the earliest of which raise rank(H_s ; R_s) to n.
inline std::vector<BitVector> sample_orthogonal_rows(const BitMatrix& hs, const BitVector& s,
                                                     std::size_t m2, Rng& rng) {
    std::size_t n = s.size();
    BitMatrix sperp = BitMatrix::from_rows({s}).kernel_basis();

    RowSpan span;
    for (std::size_t i = 0; i < hs.rows(); ++i) span.try_add(hs.row(i));
    std::size_t need = n - span.size();
    if (m2 < need) throw std::invalid_argument("construct: m2 too small to complete the rank");

    std::vector<BitVector> rows;
    rows.reserve(m2);
    std::size_t attempts = 4 * need;
    while (rows.size() < need) {
        if (attempts-- == 0) throw construction_error("construct: rank completion budget exhausted");
        BitVector cand = sperp.mul(BitVector::random(sperp.cols(), rng));
        if (span.try_add(cand)) rows.push_back(cand);
    }
    while (rows.size() < m2) rows.push_back(sperp.mul(BitVector::random(sperp.cols(), rng)));
    return rows;
}

// Doubly-even D with exactly d generators (the sampler may fall one short in
// the extremal regime; retry within budget).
inline BitMatrix sample_full_d(std::size_t m1, std::size_t d, bool force_ones, Rng& rng) {
    for (int budget = kRetryBudget; budget > 0; --budget) {
        BitMatrix dm = sample_doubly_even(m1, d, rng, force_ones);
        if (dm.cols() == d) return dm;
    }
    throw construction_error("construct: doubly-even sampling kept falling short of d generators");
}

inline Instance assemble(BitMatrix h0, BitVector s0, SchemeMeta meta, bool keep_trace, Rng& rng) {
    Obfuscated ob = obfuscate(h0, s0, rng);
    Instance inst{std::move(ob.h), std::move(ob.s), meta, std::nullopt};
    if (keep_trace) inst.trace = std::move(ob.trace);
    return inst;
}

}  // namespace detail

struct ConstructOptions {
    bool keep_trace = false;
    // Postselect rank(B, C) = n − g on the unobfuscated layout, closing the
    // kernel-of-the-Gram-matrix route to the secret. Requires m2 ≥ n − g.
    bool guard_radical = false;
    // Fixed (m1, d) split instead of a sampled one.
    std::optional<std::pair<std::size_t, std::size_t>> forced_split;
};

inline Instance stabilizer_construct(std::size_t n, std::size_t m, std::size_t g,
                                     std::size_t lambda, Rng& rng,
                                     const ConstructOptions& opt = {}) {
    SchemeMeta meta;
    meta.n = n;
    meta.m = m;
    meta.g = g;
    meta.lambda = lambda;
    meta.seed = rng.seed();
    meta.scheme = SchemeKind::Stabilizer;

    std::vector<std::pair<std::size_t, std::size_t>> splits;
    if (opt.forced_split.has_value()) {
        meta.m1 = opt.forced_split->first;
        meta.d = opt.forced_split->second;
        if (!check_params(meta).family_ok)
            throw std::invalid_argument("stabilizer_construct: forced (m1, d) split is infeasible");
    } else {
        // Prefer splits inside the security regime; fall back to plain
        // feasibility so that small test shapes remain constructible.
        splits = detail::feasible_splits(n, m, g, lambda, true, opt.guard_radical);
        if (splits.empty()) splits = detail::feasible_splits(n, m, g, lambda, false, opt.guard_radical);
        if (splits.empty())
            throw std::invalid_argument("stabilizer_construct: no feasible (m1, d) split");
    }

    for (int budget = kRetryBudget; budget > 0; --budget) {
        // A fresh split each attempt: a few splits sit right at the edge of
        // the doubly-even existence bound and fail persistently, so pinning
        // one draw for the whole budget can starve the loop.
        if (!splits.empty()) {
            auto [m1, d] = splits[rng.index(splits.size())];
            meta.m1 = m1;
            meta.d = d;
        }
        std::size_t r = g + meta.d;
        try {
            BitMatrix dm = detail::sample_full_d(meta.m1, meta.d, g == 0, rng);
            BitMatrix f = sample_F(meta.m1, g, dm, rng);
            BitMatrix hs = BitMatrix::hstack(BitMatrix::hstack(f, dm), BitMatrix(meta.m1, n - r));
            BitVector s = detail::sample_secret(hs, rng);
            auto rs = detail::sample_orthogonal_rows(hs, s, m - meta.m1, rng);

            if (opt.guard_radical && BitMatrix::from_rows(rs).col_slice(g, n).rank() != n - g)
                continue;

            BitMatrix h0 = hs;
            for (const auto& row : rs) h0.append_row(row);
            return detail::assemble(std::move(h0), std::move(s), meta, opt.keep_trace, rng);
        } catch (const construction_error&) {
            continue;  // unlucky draw somewhere in the pipeline; spin again
        }
    }
    throw construction_error("stabilizer_construct: postselection budget exhausted");
}

// Appends n2 zero columns, extends the secret arbitrarily on them, and mixes
// with a random column basis change; the generated code is unchanged.
inline std::pair<BitMatrix, BitVector> add_column_redundancy(const BitMatrix& hs,
                                                             const BitVector& s, std::size_t n2,
                                                             Rng& rng) {
    if (hs.mul(s) != BitVector::ones(hs.rows()))
        throw std::invalid_argument("add_column_redundancy: H_s·s must be all-ones");
    BitMatrix padded = BitMatrix::hstack(hs, BitMatrix(hs.rows(), n2));
    BitVector ext(s.size() + n2);
    for (std::size_t j = 0; j < s.size(); ++j) ext.set(j, s.get(j));
    for (std::size_t j = 0; j < n2; ++j) ext.set(s.size() + j, rng.bit());

    BitMatrix q = BitMatrix::random_invertible(ext.size(), rng);
    auto qinv = q.inverse();
    if (!qinv.has_value()) throw std::logic_error("add_column_redundancy: invertible draw failed");
    return {padded.mul(q), qinv->mul(ext)};
}

inline Instance qrc_construct(std::size_t q, std::size_t n, std::size_t m, std::size_t lambda,
                              Rng& rng, const ConstructOptions& opt = {}) {
    BitMatrix base = qrc_generator(q);  // q×(q+3)/2, rank (q+1)/2
    std::size_t r = (q + 1) / 2;
    if (n < r) throw std::invalid_argument("qrc_construct: need n >= (q+1)/2");
    if (m < q + (n - r)) throw std::invalid_argument("qrc_construct: need m >= q + n - (q+1)/2");

    if (n == r) {
        // No room for the dependent all-ones column; the rotations alone
        // generate the same code.
        BitMatrix trimmed = base.col_slice(1, base.cols());
        if (trimmed.rank() != r) throw std::logic_error("qrc_construct: unexpected column dependency");
        base = trimmed;
    }

    auto s0 = base.solve(BitVector::ones(q));
    if (!s0.has_value()) throw std::logic_error("qrc_construct: all-ones left the column space");

    SchemeMeta meta;
    meta.n = n;
    meta.m = m;
    meta.g = 1;
    meta.m1 = q;
    meta.d = r - 1;
    meta.lambda = lambda;
    meta.seed = rng.seed();
    meta.scheme = SchemeKind::Qrc;
    meta.q = q;

    for (int budget = kRetryBudget; budget > 0; --budget) {
        try {
            auto [hs, s] = add_column_redundancy(base, *s0, n - base.cols(), rng);
            auto rs = detail::sample_orthogonal_rows(hs, s, m - q, rng);
            BitMatrix h0 = hs;
            for (const auto& row : rs) h0.append_row(row);
            return detail::assemble(std::move(h0), std::move(s), meta, opt.keep_trace, rng);
        } catch (const construction_error&) {
            continue;
        }
    }
    throw construction_error("qrc_construct: rank completion budget exhausted");
}

inline Instance hardened_construct(std::size_t n, std::size_t m, std::size_t g, std::size_t m1,
                                   std::size_t d, std::size_t m0, std::size_t d0,
                                   std::size_t sparsity, Rng& rng,
                                   const ConstructOptions& opt = {}) {
    if (m0 == 0 || m1 % m0 != 0)
        throw std::invalid_argument("hardened_construct: m0 must divide m1");
    std::size_t k = m1 / m0;
    if (d0 * k < d) throw std::invalid_argument("hardened_construct: need d0·(m1/m0) >= d");
    if (sparsity == 0) throw std::invalid_argument("hardened_construct: sparsity must be >= 1");

    SchemeMeta meta;
    meta.n = n;
    meta.m = m;
    meta.g = g;
    meta.m1 = m1;
    meta.d = d;
    meta.lambda = kDefaultLambda;
    meta.seed = rng.seed();
    meta.scheme = SchemeKind::Hardened;
    meta.m0 = m0;
    meta.d0 = d0;
    meta.sparsity = sparsity;
    if (!check_params(meta).family_ok)
        throw std::invalid_argument("hardened_construct: infeasible (n, m, g, m1, d)");

    std::size_t r = g + d, m2 = m - m1;
    if (m2 < n - g)
        throw std::invalid_argument("hardened_construct: the rank postselection needs m2 >= n - g");

    for (int budget = kRetryBudget; budget > 0; --budget) {
        // D = E_c·K_in: block-diagonal doubly-even generators hit with a full
        // column rank inner code, so D stays doubly even but spreads out.
        std::vector<BitVector> ecols;
        for (std::size_t b = 0; b < k; ++b) {
            BitMatrix db = detail::sample_full_d(m0, d0, false, rng);
            for (std::size_t j = 0; j < d0; ++j) {
                BitVector col(m1);
                for (std::size_t i = 0; i < m0; ++i)
                    if (db.get(i, j)) col.set(b * m0 + i, true);
                ecols.push_back(col);
            }
        }
        BitMatrix ec = BitMatrix::from_cols(ecols);
        BitMatrix kin = BitMatrix::random(d0 * k, d, rng);
        if (kin.rank() != d) continue;
        BitMatrix dm = ec.mul(kin);

        BitMatrix f;
        try {
            f = sample_F(m1, g, dm, rng);
        } catch (const construction_error&) {
            continue;
        }
        BitMatrix hs = BitMatrix::hstack(BitMatrix::hstack(f, dm), BitMatrix(m1, n - r));
        BitVector s = detail::sample_secret(hs, rng);

        // R_s = (A, B, C): sparse rows on the first r columns, random C, then
        // one column touched by the secret absorbs the parity residual.
        BitMatrix r1(m2, r);
        for (std::size_t i = 0; i < m2; ++i)
            for (std::size_t t = 0; t < sparsity; ++t) r1.set(i, rng.index(r), true);
        BitMatrix c = BitMatrix::random(m2, n - r, rng);

        BitVector s_fd(r);
        for (std::size_t j = 0; j < r; ++j) s_fd.set(j, s.get(j));
        BitVector s_tail(n - r);
        for (std::size_t j = r; j < n; ++j) s_tail.set(j - r, s.get(j));
        BitVector residual = r1.mul(s_fd) ^ c.mul(s_tail);
        std::size_t fix = s_fd.first_set();  // exists: H_s·s = 1 forces support on (F, D)
        for (std::size_t i = 0; i < m2; ++i)
            if (residual.get(i)) r1.set(i, fix, !r1.get(i, fix));

        BitMatrix bc = BitMatrix::hstack(r1.col_slice(g, r), c);
        if (bc.rank() != n - g) continue;

        BitMatrix h0 = hs;
        BitMatrix rs = BitMatrix::hstack(r1, c);
        for (std::size_t i = 0; i < m2; ++i) h0.append_row(rs.row(i));
        return detail::assemble(std::move(h0), std::move(s), meta, opt.keep_trace, rng);
    }
    throw construction_error("hardened_construct: postselection budget exhausted");
}

// ---------------------------------------------------------------------------
// White-box access for tests

struct BlockLayout {
    BitMatrix f, d, z;  // H_s = (F, D, 0)
    BitMatrix a, b, c;  // R_s = (A, B, C)
    BitVector s;        // pre-obfuscation secret
};

inline BlockLayout unobfuscated_layout(const Instance& inst) {
    if (!inst.trace.has_value())
        throw unavailable_error("unobfuscated_layout: obfuscation trace was not retained");
    const auto& tr = *inst.trace;
    auto qinv = tr.q.inverse();
    if (!qinv.has_value()) throw std::logic_error("unobfuscated_layout: trace Q not invertible");

    // Undo H = P·H0·Q.
    std::vector<BitVector> rows(inst.h.rows(), BitVector(inst.h.cols()));
    for (std::size_t i = 0; i < inst.h.rows(); ++i) rows[tr.row_perm[i]] = inst.h.row(i);
    BitVector s0 = tr.q.mul(inst.s);

    std::size_t g = inst.meta.g, m1 = inst.meta.m1;
    std::size_t r = g + inst.meta.d, n = inst.meta.n;
    BitMatrix top =
        BitMatrix::from_rows(std::vector<BitVector>(rows.begin(), rows.begin() + m1)).mul(*qinv);
    BitMatrix bottom(0, n);
    if (rows.size() > m1)
        bottom = BitMatrix::from_rows(std::vector<BitVector>(rows.begin() + m1, rows.end())).mul(*qinv);
    return BlockLayout{top.col_slice(0, g),    top.col_slice(g, r),    top.col_slice(r, n),
                       bottom.col_slice(0, g), bottom.col_slice(g, r), bottom.col_slice(r, n),
                       std::move(s0)};
}

}  // namespace iqp
