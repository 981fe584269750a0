#pragma once

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "iqp/bits.hpp"
#include "iqp/codes.hpp"
#include "iqp/errors.hpp"
#include "iqp/rng.hpp"

namespace iqp {

using SampleBatch = std::vector<BitVector>;

// Hook for confirming a candidate out of band (e.g. by sampling against the
// verifier). Returning true stops the search; without one, attacks keep
// collecting candidates until the budget runs out.
using SecretValidator = std::function<bool(const BitVector&)>;

struct AttackConfig {
    std::size_t check_budget = std::size_t{1} << 15;  // max property checks overall
    std::size_t g_threshold = 1;                      // attacker's guess for g
    std::size_t d_resample_budget = 64;               // max probe vectors d
    std::size_t codeword_samples = 32;                // weight probes per QRC check
    std::uint64_t seed = 0;
};

struct RoundRecord {
    std::size_t dim = 0;     // dimension of the kernel explored this round
    std::size_t checks = 0;  // property checks consumed this round
    bool found = false;
};

struct AttackReport {
    std::vector<BitVector> candidates;
    std::size_t checks_used = 0;
    std::vector<std::size_t> kernel_dims_seen;
    std::vector<RoundRecord> rounds;
    bool success = false;  // a validator confirmed a candidate
    double wall_time = 0.0;
};

// Line-oriented report: one line per round, then the first candidate or FAIL.
inline std::string attack_report_text(const AttackReport& rep) {
    std::ostringstream out;
    for (std::size_t i = 0; i < rep.rounds.size(); ++i) {
        const auto& r = rep.rounds[i];
        out << "round=" << (i + 1) << " dim=" << r.dim << " checks=" << r.checks
            << " found=" << (r.found ? 1 : 0) << '\n';
    }
    if (rep.candidates.empty())
        out << "FAIL\n";
    else
        out << "SECRET " << rep.candidates.front().to_string() << '\n';
    return out.str();
}

namespace detail {

class Stopwatch {
public:
    double elapsed() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline void validate(const AttackConfig& cfg) {
    if (cfg.check_budget == 0 || cfg.d_resample_budget == 0)
        throw std::invalid_argument("attack: budgets must be >= 1");
}

// Rank-and-class check used against stabilizer instances: a plausible secret
// selects rows whose Gram matrix has low rank and a doubly-even self-dual
// intersection.
inline bool stabilizer_property(const BitMatrix& hs, std::size_t g_threshold) {
    if (hs.rows() == 0) return false;
    CodeProfile prof = classify_self_dual_intersection(hs);
    return prof.gram_rank <= g_threshold && prof.dual_class == DualClass::DoublyEven;
}

// Weight probe used against quadratic-residue instances: sampled codewords of
// the selected rows must have weight 0 or 3 mod 4.
inline bool qrc_property(const BitMatrix& hs, std::size_t samples, Rng& rng) {
    if (hs.rows() == 0) return false;
    for (std::size_t i = 0; i < samples; ++i) {
        unsigned w = weight_mod4(hs.mul(BitVector::random(hs.cols(), rng)));
        if (w == 1 || w == 2) return false;
    }
    return true;
}

// Walks the nonzero span of the kernel columns in Gray-code order so each
// candidate differs from its predecessor by one basis vector, keeping the
// selected-rows indicator H·s_i up to date incrementally. Every vector that
// passes the property lands in `out`; returns true (stop everything) only
// when the external validator confirms one.
template <typename Property>
bool gray_scan(const BitMatrix& h, const BitMatrix& kernel, std::size_t budget, RoundRecord& rec,
               std::vector<BitVector>& out, Property&& accept, const SecretValidator& validator) {
    std::size_t t = kernel.cols();
    if (t == 0) return false;
    std::vector<BitVector> basis = kernel.cols_as_vectors();
    std::vector<BitVector> images;
    images.reserve(t);
    for (const auto& v : basis) images.push_back(h.mul(v));

    BitVector cand(h.cols());
    BitVector marks(h.rows());
    for (std::uint64_t i = 1; budget > 0; ++i, --budget) {
        if (t < 64 && i >= (std::uint64_t{1} << t)) break;
        std::size_t flip = static_cast<std::size_t>(std::countr_zero(i));
        cand ^= basis[flip];
        marks ^= images[flip];
        ++rec.checks;
        if (accept(h.rows_where(marks))) {
            rec.found = true;
            if (std::find(out.begin(), out.end(), cand) == out.end()) out.push_back(cand);
            if (validator && validator(cand)) return true;
        }
    }
    return false;
}

}  // namespace detail

// Kernel search over random probes d: the secret lies in ker(gram(H_d)) with
// probability 2^{-g}, so enumerate those kernels and property-check every
// vector, accumulating the ones that look like secrets until a validator
// confirms one or the budget runs out.
inline AttackReport extract_secret_linearity(const BitMatrix& h, const AttackConfig& cfg,
                                             const SecretValidator& validator = {}) {
    detail::validate(cfg);
    detail::Stopwatch clock;
    Rng rng(cfg.seed);
    AttackReport rep;
    for (std::size_t round = 0; round < cfg.d_resample_budget && rep.checks_used < cfg.check_budget;
         ++round) {
        BitVector d = BitVector::random(h.cols(), rng);
        BitMatrix kb = h.rows_where(h.mul(d)).gram().kernel_basis();
        RoundRecord rec;
        rec.dim = kb.cols();
        rep.kernel_dims_seen.push_back(rec.dim);
        bool confirmed =
            detail::gray_scan(h, kb, cfg.check_budget - rep.checks_used, rec, rep.candidates,
                              [&](const BitMatrix& hs) {
                                  return detail::stabilizer_property(hs, cfg.g_threshold);
                              },
                              validator);
        rep.checks_used += rec.checks;
        rep.rounds.push_back(rec);
        if (confirmed) {
            rep.success = true;
            break;
        }
    }
    rep.wall_time = clock.elapsed();
    return rep;
}

// Original formulation: l probe pairs (d, e_j) give linear equations
// RowSum(H_{d,e_j})·s = 0 whose kernel is searched with the weight probe.
inline AttackReport km_extract(const BitMatrix& h, std::size_t l, const AttackConfig& cfg,
                               const SecretValidator& validator = {}) {
    detail::validate(cfg);
    detail::Stopwatch clock;
    Rng rng(cfg.seed);
    AttackReport rep;
    for (std::size_t round = 0; round < cfg.d_resample_budget && rep.checks_used < cfg.check_budget;
         ++round) {
        BitVector d = BitVector::random(h.cols(), rng);
        BitMatrix hd = h.rows_where(h.mul(d));
        BitMatrix gd = hd.gram();

        std::vector<BitVector> mrows;
        mrows.reserve(l);
        for (std::size_t j = 0; j < l; ++j) {
            BitVector e = BitVector::random(h.cols(), rng);
            BitMatrix hde = hd.rows_where(hd.mul(e));
            BitVector mj(h.cols());
            for (std::size_t i = 0; i < hde.rows(); ++i) mj ^= hde.row(i);
            // The rows of M are guaranteed to lie in the row space of G_d.
            if (!gd.solve(mj).has_value())
                throw std::logic_error("km_extract: equation left the row space of G_d");
            mrows.push_back(std::move(mj));
        }
        BitMatrix m = mrows.empty() ? BitMatrix(0, h.cols()) : BitMatrix::from_rows(mrows);

        BitMatrix kb = m.kernel_basis();
        RoundRecord rec;
        rec.dim = kb.cols();
        rep.kernel_dims_seen.push_back(rec.dim);
        bool confirmed =
            detail::gray_scan(h, kb, cfg.check_budget - rep.checks_used, rec, rep.candidates,
                              [&](const BitMatrix& hs) {
                                  return detail::qrc_property(hs, cfg.codeword_samples, rng);
                              },
                              validator);
        rep.checks_used += rec.checks;
        rep.rounds.push_back(rec);
        if (confirmed) {
            rep.success = true;
            break;
        }
    }
    rep.wall_time = clock.elapsed();
    return rep;
}

// Structural attack on instances with a large ker(H^T H): kernel vectors v
// with H·v doubly even mark rows of H_s, whose joint support S turns
// H·s = 1_S into a solvable system for the secret.
inline AttackReport radical_attack(const BitMatrix& h) {
    detail::Stopwatch clock;
    AttackReport rep;
    BitMatrix kb = h.gram().kernel_basis();
    RoundRecord rec;
    rec.dim = kb.cols();
    rep.kernel_dims_seen.push_back(rec.dim);

    BitVector support(h.rows());
    for (const auto& v : kb.cols_as_vectors()) {
        ++rec.checks;
        BitVector hv = h.mul(v);
        if (hv.any() && weight_mod4(hv) == 0) support |= hv;
    }
    rep.checks_used = rec.checks;

    if (support.any()) {
        auto s = h.solve(support);
        if (s.has_value() && s->any()) {
            rec.found = true;
            rep.candidates.push_back(*s);
        }
    }
    rep.rounds.push_back(rec);
    rep.wall_time = clock.elapsed();
    return rep;
}

// Row-deletion attack: kernel vectors of a decimated H touch only deleted
// rows, and over many rounds their supports accumulate the R_s row indices;
// the secret then solves H·s = 1 on the complement.
inline AttackReport hammings_razor(const BitMatrix& h, double p, std::size_t rounds, Rng& rng) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("hammings_razor: need 0 < p < 1");
    detail::Stopwatch clock;
    AttackReport rep;
    std::size_t m = h.rows();
    std::size_t remove = static_cast<std::size_t>(p * static_cast<double>(m));

    std::vector<std::size_t> order(m);
    for (std::size_t i = 0; i < m; ++i) order[i] = i;

    BitVector support(m);
    for (std::size_t round = 0; round < rounds; ++round) {
        for (std::size_t i = m; i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);
        BitVector keep = BitVector::ones(m);
        for (std::size_t i = 0; i < remove; ++i) keep.set(order[i], false);

        BitMatrix kb = h.rows_where(keep).kernel_basis();
        RoundRecord rec;
        rec.dim = kb.cols();
        rep.kernel_dims_seen.push_back(rec.dim);
        for (const auto& v : kb.cols_as_vectors()) {
            ++rec.checks;
            support |= h.mul(v);
        }
        rep.checks_used += rec.checks;
        rep.rounds.push_back(rec);
    }

    auto s = h.solve(BitVector::ones(m) ^ support);
    if (s.has_value() && s->any()) {
        rep.candidates.push_back(*s);
        if (!rep.rounds.empty()) rep.rounds.back().found = true;
    }
    rep.wall_time = clock.elapsed();
    return rep;
}

inline constexpr double kRazorSweepGrid[] = {0.05, 0.10, 0.15, 0.20, 0.25,
                                             0.30, 0.35, 0.40, 0.45, 0.50};

// One support-accumulation run occasionally gets poisoned by a rank drop on
// the H_s side, so the sweep makes two independent passes over the grid.
inline constexpr std::size_t kRazorSweepPasses = 2;

// Sweep variant used when no removal fraction is given: try every fraction on
// the default grid and pool the candidates each one produces.
inline AttackReport hammings_razor(const BitMatrix& h, std::size_t rounds, Rng& rng) {
    detail::Stopwatch clock;
    AttackReport rep;
    for (std::size_t pass = 0; pass < kRazorSweepPasses; ++pass) {
        for (double p : kRazorSweepGrid) {
            AttackReport one = hammings_razor(h, p, rounds, rng);
            rep.checks_used += one.checks_used;
            rep.kernel_dims_seen.insert(rep.kernel_dims_seen.end(), one.kernel_dims_seen.begin(),
                                        one.kernel_dims_seen.end());
            rep.rounds.insert(rep.rounds.end(), one.rounds.begin(), one.rounds.end());
            for (auto& c : one.candidates)
                if (std::find(rep.candidates.begin(), rep.candidates.end(), c) ==
                    rep.candidates.end())
                    rep.candidates.push_back(std::move(c));
        }
    }
    rep.wall_time = clock.elapsed();
    return rep;
}

// Diagnostic for the removal-fraction threshold: with the columns split at
// `split`, reports how often each side of the decimated matrix acquires a
// nontrivial kernel as p grows. The attack needs a fraction where only the
// right side does.
struct RazorSweepPoint {
    double p = 0.0;
    double left_rate = 0.0;   // fraction of rounds with ker(H1') nontrivial
    double right_rate = 0.0;  // fraction of rounds with ker(H2') nontrivial
};

inline std::vector<RazorSweepPoint> razor_threshold_sweep(const BitMatrix& h, std::size_t split,
                                                          std::size_t rounds, Rng& rng) {
    if (split > h.cols()) throw std::invalid_argument("razor_threshold_sweep: bad split");
    std::size_t m = h.rows();
    std::vector<std::size_t> order(m);
    for (std::size_t i = 0; i < m; ++i) order[i] = i;

    std::vector<RazorSweepPoint> table;
    for (double p : kRazorSweepGrid) {
        std::size_t remove = static_cast<std::size_t>(p * static_cast<double>(m));
        RazorSweepPoint pt;
        pt.p = p;
        for (std::size_t round = 0; round < rounds; ++round) {
            for (std::size_t i = m; i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);
            BitVector keep = BitVector::ones(m);
            for (std::size_t i = 0; i < remove; ++i) keep.set(order[i], false);
            BitMatrix hp = h.rows_where(keep);
            pt.left_rate += hp.col_slice(0, split).kernel_basis().cols() > 0 ? 1.0 : 0.0;
            pt.right_rate += hp.col_slice(split, h.cols()).kernel_basis().cols() > 0 ? 1.0 : 0.0;
        }
        pt.left_rate /= static_cast<double>(rounds);
        pt.right_rate /= static_cast<double>(rounds);
        table.push_back(pt);
    }
    return table;
}

// Variant that only explores kernels no larger than the dimension threshold,
// betting on statistical fluctuations of dim ker(G_d).
inline AttackReport lazy_linearity(const BitMatrix& h, std::size_t dim_threshold,
                                   const AttackConfig& cfg, const SecretValidator& validator = {}) {
    detail::validate(cfg);
    detail::Stopwatch clock;
    Rng rng(cfg.seed);
    AttackReport rep;
    for (std::size_t round = 0; round < cfg.d_resample_budget && rep.checks_used < cfg.check_budget;
         ++round) {
        BitVector d = BitVector::random(h.cols(), rng);
        BitMatrix kb = h.rows_where(h.mul(d)).gram().kernel_basis();
        RoundRecord rec;
        rec.dim = kb.cols();
        rep.kernel_dims_seen.push_back(rec.dim);
        bool confirmed = false;
        if (rec.dim <= dim_threshold) {
            confirmed =
                detail::gray_scan(h, kb, cfg.check_budget - rep.checks_used, rec, rep.candidates,
                                  [&](const BitMatrix& hs) {
                                      return detail::stabilizer_property(hs, cfg.g_threshold);
                                  },
                                  validator);
            rep.checks_used += rec.checks;
        }
        rep.rounds.push_back(rec);
        if (confirmed) {
            rep.success = true;
            break;
        }
    }
    rep.wall_time = clock.elapsed();
    return rep;
}

// Expected number of d-resamples before dim ker(G_d) drops to the threshold:
// 2^g draws per good d, divided by the Gaussian tail probability of the dip,
// with mean lambda1 = n - m/2 and deviation sqrt(m)/2.
inline double expected_iterations(std::size_t g, double lambda1, std::size_t m, double threshold) {
    double sigma = std::sqrt(static_cast<double>(m)) / 2.0;
    double tail = 0.5 * std::erfc((lambda1 - threshold) / (sigma * std::numbers::sqrt2));
    return std::exp2(static_cast<double>(g)) / tail;
}

// Intersects the kernels of k independent probes before searching; the secret
// survives all k with probability 2^{-gk}, but the intersection shrinks fast.
inline AttackReport double_meyer(const BitMatrix& h, std::size_t k, const AttackConfig& cfg,
                                 const SecretValidator& validator = {}) {
    if (k == 0) throw std::invalid_argument("double_meyer: need k >= 1");
    detail::validate(cfg);
    detail::Stopwatch clock;
    Rng rng(cfg.seed);
    AttackReport rep;
    for (std::size_t round = 0; round < cfg.d_resample_budget && rep.checks_used < cfg.check_budget;
         ++round) {
        std::vector<BitVector> grams;
        for (std::size_t j = 0; j < k; ++j) {
            BitVector d = BitVector::random(h.cols(), rng);
            BitMatrix gd = h.rows_where(h.mul(d)).gram();
            for (std::size_t i = 0; i < gd.rows(); ++i) grams.push_back(gd.row(i));
        }
        BitMatrix kb = BitMatrix::from_rows(grams).kernel_basis();
        RoundRecord rec;
        rec.dim = kb.cols();
        rep.kernel_dims_seen.push_back(rec.dim);
        bool confirmed =
            detail::gray_scan(h, kb, cfg.check_budget - rep.checks_used, rec, rep.candidates,
                              [&](const BitMatrix& hs) {
                                  return detail::stabilizer_property(hs, cfg.g_threshold);
                              },
                              validator);
        rep.checks_used += rec.checks;
        rep.rounds.push_back(rec);
        if (confirmed) {
            rep.success = true;
            break;
        }
    }
    rep.wall_time = clock.elapsed();
    return rep;
}

// ---------------------------------------------------------------------------
// Classical sampling strategies

// Uniform over the hyperplane x·s' = 0 with probability beta, uniform over
// its complement otherwise.
inline SampleBatch naive_sample(const BitVector& s_prime, double corr, std::size_t T, Rng& rng) {
    if (std::abs(corr) > 1.0) throw std::invalid_argument("naive_sample: |corr| must be <= 1");
    if (s_prime.none()) throw std::invalid_argument("naive_sample: candidate must be nonzero");
    double beta = (corr + 1.0) / 2.0;
    BitMatrix sperp = BitMatrix::from_rows({s_prime}).kernel_basis();
    BitVector offset = BitVector::unit(s_prime.size(), s_prime.first_set());

    SampleBatch batch;
    batch.reserve(T);
    for (std::size_t i = 0; i < T; ++i) {
        BitVector x = sperp.mul(BitVector::random(sperp.cols(), rng));
        if (rng.real() >= beta) x ^= offset;
        batch.push_back(std::move(x));
    }
    return batch;
}

// Row-space sampler: draws x = H^T·w with the parity of w on the H_{s'} rows
// fixed to 0 with probability beta. Samples stay inside rowspace(H), which is
// what makes equivalent secrets pass where naive sampling fails.
inline SampleBatch sample_by_rows(const BitMatrix& h, const BitVector& s_prime, double corr,
                                  std::size_t T, Rng& rng) {
    if (std::abs(corr) > 1.0) throw std::invalid_argument("sample_by_rows: |corr| must be <= 1");
    BitVector marks = h.mul(s_prime);
    if (marks.none()) throw std::invalid_argument("sample_by_rows: candidate selects no rows");
    double beta = (corr + 1.0) / 2.0;
    std::size_t pivot = marks.first_set();

    SampleBatch batch;
    batch.reserve(T);
    for (std::size_t i = 0; i < T; ++i) {
        BitVector w = BitVector::random(h.rows(), rng);
        bool want = rng.real() >= beta;  // parity of w on the marked rows
        if ((w & marks).parity() != want) w.flip(pivot);
        batch.push_back(h.mul_left(w));
    }
    return batch;
}

// Mixture sampler for several candidates at once. Biases must be sorted in
// descending order; the mixture draws x with S·x equal to a staircase target,
// arranged so the estimator along candidate i comes out at corrs[i].
inline SampleBatch multi_secret_sample(const std::vector<BitVector>& candidates,
                                       const std::vector<double>& corrs, std::size_t T, Rng& rng) {
    std::size_t t = candidates.size();
    if (t == 0 || corrs.size() != t)
        throw std::invalid_argument("multi_secret_sample: need matching nonempty lists");
    for (double c : corrs)
        if (std::abs(c) > 1.0) throw std::invalid_argument("multi_secret_sample: |corr| must be <= 1");
    for (std::size_t i = 0; i + 1 < t; ++i)
        if (corrs[i] < corrs[i + 1])
            throw std::invalid_argument("multi_secret_sample: biases must be sorted descending");

    BitMatrix smat = BitMatrix::from_rows(candidates);
    if (smat.rank() != t)
        throw unsupported_error("multi_secret_sample: candidates must be linearly independent");
    BitMatrix kernel = smat.kernel_basis();

    // Staircase mixture over t+1 groups: group j draws x violating exactly the
    // last j candidates (target 0^{t-j} 1^j). Solving sum_{j >= t-i} w_j =
    // 1 - beta_i gives w_0 = beta_{t-1}, w_j = beta_{t-j-1} - beta_{t-j}, and
    // w_t = 1 - beta_0, so candidate i sees its own bias exactly.
    std::vector<double> beta(t);
    for (std::size_t i = 0; i < t; ++i) beta[i] = (corrs[i] + 1.0) / 2.0;
    std::vector<double> cumulative;
    std::vector<BitVector> offsets;
    double acc = 0.0;
    for (std::size_t j = 0; j <= t; ++j) {
        if (j == 0)
            acc += beta[t - 1];
        else if (j == t)
            acc += 1.0 - beta[0];
        else
            acc += beta[t - j - 1] - beta[t - j];
        BitVector target(t);
        for (std::size_t i = t - j; i < t; ++i) target.set(i, true);
        auto x0 = smat.solve(target);
        if (!x0.has_value()) throw std::logic_error("multi_secret_sample: staircase unsolvable");
        cumulative.push_back(acc);
        offsets.push_back(*x0);
    }
    cumulative.back() = 1.0;  // guard against rounding

    SampleBatch batch;
    batch.reserve(T);
    for (std::size_t i = 0; i < T; ++i) {
        double u = rng.real();
        std::size_t j = 0;
        while (j + 1 < cumulative.size() && u >= cumulative[j]) ++j;
        BitVector x = offsets[j] ^ kernel.mul(BitVector::random(kernel.cols(), rng));
        batch.push_back(std::move(x));
    }
    return batch;
}

// ---------------------------------------------------------------------------
// Probe statistics

struct GoodDStat {
    double frequency = 0.0;  // how often G_s·d vanished
    std::size_t trials = 0;
    bool identity_ok = true;  // G_s·d = G_d·s held on every trial
};

inline GoodDStat good_d_probability_check(const BitMatrix& h, const BitVector& s,
                                          std::size_t trials, Rng& rng) {
    if (trials == 0) throw std::invalid_argument("good_d_probability_check: trials must be >= 1");
    BitMatrix gs = h.rows_where(h.mul(s)).gram();
    GoodDStat stat;
    stat.trials = trials;
    std::size_t good = 0;
    for (std::size_t i = 0; i < trials; ++i) {
        BitVector d = BitVector::random(h.cols(), rng);
        BitVector lhs = gs.mul(d);
        BitVector rhs = h.rows_where(h.mul(d)).gram().mul(s);
        if (lhs != rhs) stat.identity_ok = false;
        if (lhs.none()) ++good;
    }
    stat.frequency = static_cast<double>(good) / static_cast<double>(trials);
    return stat;
}

}  // namespace iqp
