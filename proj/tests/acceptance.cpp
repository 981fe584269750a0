// Acceptance gate: one pass/fail line per criterion, exit 0 only if all hold.
// Tolerances are pinned here, not configurable; every run is deterministic.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "iqp/attacks.hpp"
#include "iqp/bits.hpp"
#include "iqp/codes.hpp"
#include "iqp/protocol.hpp"
#include "iqp/rng.hpp"
#include "iqp/scheme.hpp"
#include "iqp/simulator.hpp"
#include "iqp/stabilizer.hpp"

using namespace iqp;

namespace {

constexpr double kTheta = kProgramAngle;
constexpr double kOracleTol = 1e-9;

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

int failures = 0;

void report(int index, const char* label, bool ok, const std::string& detail) {
    std::printf("%s criterion %2d: %s (%s)\n", ok ? "PASS" : "FAIL", index, label,
                detail.c_str());
    if (!ok) ++failures;
}

std::string fmtd(const char* spec, double v) {
    char buf[96];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

// ---------------------------------------------------------------------------
// 1. Symbolic correlation against the dense-statevector oracle.

void criterion_oracle_equivalence() {
    Timer timer;
    Rng rng(600100);
    int trials = 0, agree = 0;
    for (; trials < 250; ++trials) {
        std::size_t n = 1 + rng.index(10), m = 1 + rng.index(20);
        BitMatrix h = BitMatrix::random(m, n, rng);
        BitVector s = BitVector::random(n, rng);
        while (s.none()) s = BitVector::random(n, rng);
        double brute = exact_correlation(h, s, kTheta);
        if (std::abs(brute - correlation(h, s).value()) < kOracleTol) ++agree;
    }
    double secs = timer.seconds();
    report(1, "symbolic correlation matches the statevector oracle",
           agree == trials && secs < 60.0,
           std::to_string(agree) + "/" + std::to_string(trials) + " within 1e-9, " +
               fmtd("%.1f", secs) + " s");
}

// ---------------------------------------------------------------------------
// 2. Quadratic-residue ground truth at q = 7.

void criterion_qrc_ground_truth() {
    Rng rng(600200);
    Instance inst = qrc_construct(7, 5, 14, 50, rng);
    Correlation corr = correlation(inst.h, inst.s);
    bool symbolic_ok = corr.sign == +1 && corr.g == 1;
    double brute = exact_correlation(inst.h, inst.s, kTheta);
    bool brute_ok = std::abs(brute - 1.0 / std::sqrt(2.0)) < kOracleTol;
    std::string bias = fmtd("%.3f", bias_of(corr.value()));
    bool bias_ok = bias == "0.854";
    report(2, "qrc q=7 correlation is +1/sqrt(2) with bias 0.854",
           symbolic_ok && brute_ok && bias_ok,
           "sign=" + std::to_string(corr.sign) + " g=" + std::to_string(corr.g) +
               " brute=" + fmtd("%.12f", brute) + " bias=" + bias);
}

// ---------------------------------------------------------------------------
// 3. Family membership and the pre-obfuscation standard form.

std::pair<BitMatrix, BitMatrix> split_rows(const Instance& inst) {
    BitVector marks = inst.h.mul(inst.s);
    std::vector<BitVector> hs, rs;
    for (std::size_t i = 0; i < inst.h.rows(); ++i)
        (marks.get(i) ? hs : rs).push_back(inst.h.row(i));
    std::size_t n = inst.h.cols();
    return {hs.empty() ? BitMatrix(0, n) : BitMatrix::from_rows(hs),
            rs.empty() ? BitMatrix(0, n) : BitMatrix::from_rows(rs)};
}

BitMatrix expected_standard_form(std::size_t m1, std::size_t g, bool ones_in_d) {
    BitMatrix form(g, g);
    std::size_t start = 0;
    if (m1 % 2 == 1) {
        form.set(0, 0, true);
        start = 1;
    } else if (!ones_in_d) {
        form.set(0, 0, true);
        form.set(1, 1, true);
        start = 2;
    }
    for (std::size_t j = start; j + 1 < g; j += 2) {
        form.set(j, j + 1, true);
        form.set(j + 1, j, true);
    }
    return form;
}

bool family_member_ok(const Instance& inst) {
    const auto& meta = inst.meta;
    if (inst.h.rows() != meta.m || inst.h.cols() != meta.n) return false;
    if (inst.s.size() != meta.n || inst.h.rank() != meta.n) return false;

    auto [hs, rs] = split_rows(inst);
    if (hs.rows() != meta.m1 || rs.rows() != meta.m - meta.m1) return false;

    CodeProfile prof = classify_self_dual_intersection(hs);
    if (prof.dual_class != DualClass::DoublyEven) return false;
    if (prof.gram_rank != meta.g || prof.dim_d != meta.d) return false;
    if (prof.dim_c != meta.g + meta.d) return false;

    Correlation corr = correlation(inst.h, inst.s);
    if (corr.zero() || corr.g != meta.g) return false;
    return std::abs(std::abs(corr.value()) - std::exp2(-0.5 * double(meta.g))) < 1e-12;
}

bool layout_ok(const Instance& inst) {
    BlockLayout lay = unobfuscated_layout(inst);
    const auto& meta = inst.meta;
    std::size_t r = meta.g + meta.d;
    if (lay.f.cols() != meta.g || lay.d.cols() != meta.d || !lay.z.is_zero()) return false;

    BitMatrix gram = BitMatrix::hstack(lay.f, lay.d).gram();
    BitMatrix ftf = lay.f.gram();
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j)
            if (gram.get(i, j) != (i < meta.g && j < meta.g ? ftf.get(i, j) : false))
                return false;

    bool ones_in_d = lay.d.solve(BitVector::ones(meta.m1)).has_value();
    if (!(ftf == expected_standard_form(meta.m1, meta.g, ones_in_d))) return false;
    if (lay.c.rank() != meta.n - r) return false;

    const auto& tr = *inst.trace;
    BitMatrix h0 = BitMatrix::vstack(BitMatrix::hstack(BitMatrix::hstack(lay.f, lay.d), lay.z),
                                     BitMatrix::hstack(BitMatrix::hstack(lay.a, lay.b), lay.c));
    BitMatrix h0q = h0.mul(tr.q);
    for (std::size_t i = 0; i < inst.h.rows(); ++i)
        if (!(inst.h.row(i) == h0q.row(tr.row_perm[i]))) return false;
    if (!(tr.q.mul(inst.s) == lay.s)) return false;
    return h0.mul(lay.s).weight() == meta.m1;
}

void criterion_family_membership() {
    struct Shape {
        std::size_t n, m, g, lambda;
    };
    int bad = 0, total = 0;
    for (Shape shape : {Shape{40, 60, 2, 10}, Shape{115, 200, 3, 15}})
        for (int i = 0; i < 100; ++i, ++total) {
            Rng rng(600300 + 1000 * static_cast<int>(shape.n) + i);
            ConstructOptions opt;
            opt.keep_trace = true;
            Instance inst = stabilizer_construct(shape.n, shape.m, shape.g, shape.lambda, rng, opt);
            if (!family_member_ok(inst) || !layout_ok(inst)) ++bad;
        }
    report(3, "constructed instances satisfy the family definition and standard form", bad == 0,
           std::to_string(total - bad) + "/" + std::to_string(total) + " clean");
}

// ---------------------------------------------------------------------------
// 4. Kernel-dimension lower bound across the n sweep.

void criterion_kernel_bound() {
    bool ok = true;
    std::string worst;
    double worst_gap = 1e9;
    for (std::size_t g : {std::size_t{1}, std::size_t{3}})
        for (std::size_t n = 35; n <= 55; n += 2) {
            double sum = 0;
            for (int i = 0; i < 100; ++i) {
                Rng rng(600400 + 10000 * static_cast<int>(g) + 100 * static_cast<int>(n) + i);
                Instance inst = stabilizer_construct(n, 60, g, 1, rng);
                BitVector d = BitVector::random(inst.h.cols(), rng);
                sum += static_cast<double>(
                    inst.h.rows_where(inst.h.mul(d)).gram().kernel_basis().cols());
            }
            double mean = sum / 100.0;
            double bound = static_cast<double>(n) - 30.0 - 1.0;
            if (mean < bound) ok = false;
            if (mean - bound < worst_gap) {
                worst_gap = mean - bound;
                worst = "g=" + std::to_string(g) + " n=" + std::to_string(n) + " mean=" +
                        fmtd("%.2f", mean) + " bound=" + fmtd("%.0f", bound);
            }
        }
    report(4, "mean dim ker(G_d) clears n - m/2 - 1 at every sweep point", ok,
           "tightest point: " + worst);
}

// ---------------------------------------------------------------------------
// 5. Attack phase transition.

bool linearity_recovers(const Instance& inst, std::uint64_t seed, std::size_t g_threshold) {
    AttackConfig cfg;
    cfg.check_budget = std::size_t{1} << 12;
    cfg.g_threshold = g_threshold;
    cfg.seed = seed;
    AttackReport rep = extract_secret_linearity(inst.h, cfg);
    for (const auto& cand : rep.candidates)
        if (cand == inst.s) return true;
    return false;
}

void criterion_phase_transition() {
    Timer timer;
    int qrc_hits = 0;
    for (int i = 0; i < 50; ++i) {
        Rng rng(600500 + i);
        Instance inst = qrc_construct(7, 5, 14, 12, rng);
        if (linearity_recovers(inst, 600600 + i, 1)) ++qrc_hits;
    }
    bool ok = qrc_hits >= 45;
    std::string detail = "qrc hits " + std::to_string(qrc_hits) + "/50";

    for (std::size_t n : {std::size_t{46}, std::size_t{50}, std::size_t{54}}) {
        int hits = 0;
        for (int i = 0; i < 50; ++i) {
            Rng rng(600700 + 100 * static_cast<int>(n) + i);
            Instance inst = stabilizer_construct(n, 60, 5, 12, rng);
            if (linearity_recovers(inst, 600800 + 100 * n + i, 5)) ++hits;
        }
        if (hits > 1) ok = false;  // 0.02 of 50 seeds
        detail += ", n=" + std::to_string(n) + " hits " + std::to_string(hits) + "/50";
    }
    double secs = timer.seconds();
    ok = ok && secs < 600.0;
    report(5, "linearity attack succeeds on qrc and stalls in the secure regime", ok,
           detail + ", " + fmtd("%.0f", secs) + " s");
}

// ---------------------------------------------------------------------------
// 6. Good-d probability and the Gram identity.

void criterion_good_d() {
    bool ok = true;
    std::string detail;
    for (std::size_t g : {std::size_t{1}, std::size_t{2}, std::size_t{3}}) {
        Rng rng(600900 + g);
        Instance inst = stabilizer_construct(20, 40, g, 1, rng);
        GoodDStat stat = good_d_probability_check(inst.h, inst.s, 2000, rng);
        double p = std::exp2(-static_cast<double>(g));
        double sigma = std::sqrt(p * (1.0 - p) / 2000.0);
        bool in_band = std::abs(stat.frequency - p) <= 3.0 * sigma;
        ok = ok && in_band && stat.identity_ok;
        if (!detail.empty()) detail += ", ";
        detail += "g=" + std::to_string(g) + " freq=" + fmtd("%.4f", stat.frequency) +
                  (stat.identity_ok ? "" : " identity-broken");
    }
    report(6, "frequency of good d within 3 sigma of 2^-g; Gram identity exact", ok, detail);
}

// ---------------------------------------------------------------------------
// 7. End-to-end protocol verdicts.

void criterion_protocol() {
    const std::size_t samples = 4000;
    const double tol = 3.0 / std::sqrt(static_cast<double>(samples));
    int honest_accept = 0, uniform_reject = 0, cheat_reject = 0;
    for (int i = 0; i < 100; ++i) {
        Rng build(601000 + i);
        Instance inst = stabilizer_construct(10, 20, 2, 1, build);

        Rng r1(601100 + i), r2(601200 + i), r3(601300 + i);
        if (run_protocol(inst, HonestSim{}, samples, tol, r1).accept) ++honest_accept;
        if (!run_protocol(inst, UniformRandom{}, samples, tol, r2).accept) ++uniform_reject;

        BitVector wrong = inst.s;
        wrong.flip(0);
        if (wrong.none()) wrong.flip(1);
        if (!run_protocol(inst, NaiveCheat{wrong}, samples, tol, r3).accept) ++cheat_reject;
    }
    report(7, "honest prover accepted; uniform and wrong-secret provers rejected",
           honest_accept >= 99 && uniform_reject >= 99 && cheat_reject >= 99,
           "honest " + std::to_string(honest_accept) + "/100, uniform-reject " +
               std::to_string(uniform_reject) + "/100, cheat-reject " +
               std::to_string(cheat_reject) + "/100");
}

// ---------------------------------------------------------------------------
// 8. Countermeasures: radical attack and Hamming's razor.

bool found_secret(const AttackReport& rep, const BitVector& s) {
    for (const auto& cand : rep.candidates)
        if (cand == s) return true;
    return false;
}

void criterion_countermeasures() {
    int radical_open = 0, radical_guarded = 0;
    for (int i = 0; i < 50; ++i) {
        Rng r1(601400 + i);
        ConstructOptions open;
        open.forced_split = {{56, 12}};  // m2 = 44 < n - g = 56: radical surface stays open
        Instance vuln = stabilizer_construct(60, 100, 4, 1, r1, open);
        if (found_secret(radical_attack(vuln.h), vuln.s)) ++radical_open;

        Rng r2(601500 + i);
        ConstructOptions guard;
        guard.guard_radical = true;
        Instance safe = stabilizer_construct(60, 100, 4, 1, r2, guard);
        if (found_secret(radical_attack(safe.h), safe.s)) ++radical_guarded;
    }

    int razor_dense = 0, razor_hardened = 0;
    for (int i = 0; i < 50; ++i) {
        Rng r1(601600 + i);
        ConstructOptions dense;
        dense.forced_split = {{40, 15}};
        Instance plain = stabilizer_construct(60, 100, 4, 1, r1, dense);
        Rng a1(601700 + i);
        if (found_secret(hammings_razor(plain.h, 32, a1), plain.s)) ++razor_dense;

        Rng r2(601800 + i);
        Instance hard = hardened_construct(60, 100, 4, 40, 15, 8, 3, 1, r2);
        Rng a2(601900 + i);
        if (found_secret(hammings_razor(hard.h, 32, a2), hard.s)) ++razor_hardened;
    }

    bool ok = radical_open >= 45 && radical_guarded <= 1 && razor_dense >= 45 &&
              razor_hardened <= 2;
    report(8, "radical and razor attacks break open instances, not hardened ones", ok,
           "radical " + std::to_string(radical_open) + "/50 open vs " +
               std::to_string(radical_guarded) + "/50 guarded; razor " +
               std::to_string(razor_dense) + "/50 dense vs " + std::to_string(razor_hardened) +
               "/50 hardened");
}

// ---------------------------------------------------------------------------
// 9. Compiled circuits against direct statevectors.

double phase_aligned_distance(const State& a, const State& b) {
    std::size_t pivot = 0;
    for (std::size_t i = 1; i < a.amplitudes.size(); ++i)
        if (std::abs(a.amplitudes[i]) > std::abs(a.amplitudes[pivot])) pivot = i;
    if (std::abs(b.amplitudes[pivot]) < 1e-12) return 1.0;
    std::complex<double> phase = a.amplitudes[pivot] / b.amplitudes[pivot];
    double worst = std::abs(std::abs(phase) - 1.0);
    for (std::size_t i = 0; i < a.amplitudes.size(); ++i)
        worst = std::max(worst, std::abs(a.amplitudes[i] - phase * b.amplitudes[i]));
    return worst;
}

void criterion_compilation() {
    Rng rng(602000);
    int good = 0, trials = 100;
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        std::size_t n = 1 + rng.index(10);
        std::size_t m = n + rng.index(11);
        BitMatrix h = BitMatrix::random(m, n, rng);
        while (h.rank() != n) h = BitMatrix::random(m, n, rng);
        State direct = statevector(h, kTheta);
        State via = simulate_compiled(compile(h, kTheta));
        double dist = phase_aligned_distance(direct, via);
        worst = std::max(worst, dist);
        if (dist < kOracleTol) ++good;
    }
    report(9, "compiled circuits reproduce statevectors up to global phase", good == trials,
           std::to_string(good) + "/" + std::to_string(trials) + ", worst distance " +
               fmtd("%.2e", worst));
}

// ---------------------------------------------------------------------------
// 10. Gauss sums against exhaustive enumeration.

std::pair<long long, long long> form_sum_by_enumeration(const QuadFormZ4& f) {
    long long re = 0, im = 0;
    for (std::uint64_t x = 0; x < (std::uint64_t{1} << f.t); ++x) {
        unsigned q = 0;
        for (std::size_t i = 0; i < f.t; ++i) {
            if (!((x >> i) & 1)) continue;
            q += f.linear[i];
            for (std::size_t j = i + 1; j < f.t; ++j)
                if (((x >> j) & 1) && f.coupling.get(i, j)) q += 2;
        }
        switch (q & 3) {
            case 0: ++re; break;
            case 1: ++im; break;
            case 2: --re; break;
            case 3: --im; break;
        }
    }
    return {re, im};
}

std::pair<long long, long long> as_gaussian(const GaussSum& g) {
    if (g.zero) return {0, 0};
    long long h = 1ll << (g.k / 2);
    switch (g.octant) {
        case 0: return {h, 0};
        case 1: return {h, h};
        case 2: return {0, h};
        case 3: return {-h, h};
        case 4: return {-h, 0};
        case 5: return {-h, -h};
        case 6: return {0, -h};
        default: return {h, -h};
    }
}

void criterion_gauss_sum() {
    Rng rng(602100);
    int agree = 0, trials = 500;
    for (int t = 0; t < trials; ++t) {
        std::size_t dim = rng.index(17);
        QuadFormZ4 f{dim, std::vector<unsigned>(dim), BitMatrix(dim, dim)};
        for (std::size_t i = 0; i < dim; ++i) {
            f.linear[i] = static_cast<unsigned>(rng.index(4));
            for (std::size_t j = i + 1; j < dim; ++j)
                if (rng.bit()) {
                    f.coupling.set(i, j, true);
                    f.coupling.set(j, i, true);
                }
        }
        if (as_gaussian(gauss_sum(f)) == form_sum_by_enumeration(f)) ++agree;
    }
    report(10, "closed-form Gauss sums equal exhaustive enumeration", agree == trials,
           std::to_string(agree) + "/" + std::to_string(trials) + " exact");
}

}  // namespace

int main() {
    Timer total;
    criterion_oracle_equivalence();
    criterion_qrc_ground_truth();
    criterion_family_membership();
    criterion_kernel_bound();
    criterion_phase_transition();
    criterion_good_d();
    criterion_protocol();
    criterion_countermeasures();
    criterion_compilation();
    criterion_gauss_sum();
    std::printf("%s: %d/10 criteria passed in %.1f s\n", failures == 0 ? "ACCEPTED" : "REJECTED",
                10 - failures, total.seconds());
    return failures == 0 ? 0 : 1;
}
