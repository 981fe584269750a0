#include <catch2/catch_amalgamated.hpp>

#include "iqp/stabilizer.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

using namespace iqp;

namespace {

BitMatrix from_strings(const std::vector<std::string>& rows) {
    std::vector<BitVector> rs;
    for (const auto& s : rows) rs.push_back(BitVector::from_string(s));
    return BitMatrix::from_rows(rs);
}

// Exhaustive oracle: evaluate Σ_x i^{Q(x)} term by term as a Gaussian integer.
std::pair<long long, long long> form_sum_by_enumeration(const QuadFormZ4& f) {
    long long re = 0, im = 0;
    for (std::uint64_t x = 0; x < (1ull << f.t); ++x) {
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
    REQUIRE(g.k % 2 == g.octant % 2);
    long long h = 1ll << (g.k / 2);  // k odd: 2^{k/2}·ω^odd has entries ±2^{(k−1)/2}
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

QuadFormZ4 make_form(std::size_t t, const std::vector<unsigned>& w,
                     const std::vector<std::pair<std::size_t, std::size_t>>& couplings) {
    QuadFormZ4 f{t, w, BitMatrix(t, t)};
    for (auto [i, j] : couplings) {
        f.coupling.set(i, j, true);
        f.coupling.set(j, i, true);
    }
    return f;
}

// Statevector of Π_p e^{iθ X_p} |0^n⟩; bit j of the index is qubit j.
std::vector<std::complex<double>> program_state(const BitMatrix& h, double theta) {
    std::size_t n = h.cols();
    std::vector<std::complex<double>> sv(1ull << n, 0.0);
    sv[0] = 1.0;
    double c = std::cos(theta), s = std::sin(theta);
    std::complex<double> is(0.0, s);
    for (std::size_t r = 0; r < h.rows(); ++r) {
        std::uint64_t p = 0;
        for (std::size_t j = 0; j < n; ++j)
            if (h.get(r, j)) p |= 1ull << j;
        if (p == 0) {
            for (auto& a : sv) a *= std::complex<double>(c, s);
            continue;
        }
        for (std::uint64_t x = 0; x < sv.size(); ++x) {
            std::uint64_t y = x ^ p;
            if (x >= y) continue;
            auto a = sv[x], b = sv[y];
            sv[x] = c * a + is * b;
            sv[y] = c * b + is * a;
        }
    }
    return sv;
}

double correlation_by_statevector(const BitMatrix& h, const BitVector& s) {
    auto sv = program_state(h, std::numbers::pi / 8);
    std::uint64_t smask = 0;
    for (std::size_t j = 0; j < s.size(); ++j)
        if (s.get(j)) smask |= 1ull << j;
    double acc = 0;
    for (std::uint64_t x = 0; x < sv.size(); ++x)
        acc += (std::popcount(x & smask) & 1 ? -1.0 : 1.0) * std::norm(sv[x]);
    return acc;
}

BitMatrix qrc7() {
    return from_strings({"11000", "11100", "10110", "11011", "10101", "10010", "10001"});
}

}  // namespace

TEST_CASE("gauss_sum worked examples", "[stabilizer]") {
    REQUIRE(as_gaussian(gauss_sum(make_form(0, {}, {}))) == std::pair{1ll, 0ll});
    REQUIRE(gauss_sum(make_form(1, {2}, {})).zero);
    // Q = x1 + x2 + 2x1x2 sums to 2 + 2i = 2^{3/2}·ω.
    REQUIRE(as_gaussian(gauss_sum(make_form(2, {1, 1}, {{0, 1}}))) == std::pair{2ll, 2ll});
    // Q = 2x1x2 sums to 2.
    REQUIRE(as_gaussian(gauss_sum(make_form(2, {0, 0}, {{0, 1}}))) == std::pair{2ll, 0ll});
    // Q = 2x1 + x2 + 2(x1x2 + x1x3 + x2x3) sums to 2 + 2i.
    REQUIRE(as_gaussian(gauss_sum(make_form(3, {2, 1, 0}, {{0, 1}, {0, 2}, {1, 2}}))) ==
            std::pair{2ll, 2ll});
}

TEST_CASE("gauss_sum equals exhaustive enumeration", "[stabilizer]") {
    Rng rng(3001);
    for (int trial = 0; trial < 500; ++trial) {
        std::size_t t = rng.index(17);
        QuadFormZ4 f{t, std::vector<unsigned>(t), BitMatrix(t, t)};
        for (std::size_t i = 0; i < t; ++i) {
            f.linear[i] = static_cast<unsigned>(rng.index(4));
            for (std::size_t j = i + 1; j < t; ++j)
                if (rng.bit()) {
                    f.coupling.set(i, j, true);
                    f.coupling.set(j, i, true);
                }
        }
        GaussSum gs = gauss_sum(f);
        REQUIRE(as_gaussian(gs) == form_sum_by_enumeration(f));
    }
}

TEST_CASE("tableau examples", "[stabilizer]") {
    StabTableau q = iqp_tableau(qrc7());
    REQUIRE(q.x_part.rows() == 5);
    for (std::size_t a = 0; a < 5; ++a)
        for (std::size_t b = 0; b < 5; ++b) REQUIRE(q.x_part.get(a, b));
    REQUIRE(q.z_part == BitMatrix::identity(5));
    REQUIRE(q.phases == BitVector::ones(5));

    StabTableau z = iqp_tableau(BitMatrix(4, 3));
    REQUIRE(z.x_part.is_zero());
    REQUIRE(z.phases.none());

    StabTableau e = iqp_tableau(from_strings({"110", "010", "100"}));
    REQUIRE_FALSE(e.x_part.get(0, 0));  // column 1 has weight 2
    REQUIRE(e.phases.get(0));
    REQUIRE_FALSE(e.x_part.get(1, 1));
    REQUIRE(e.phases.get(1));
    REQUIRE_FALSE(e.x_part.get(2, 2));
    REQUIRE_FALSE(e.phases.get(2));
}

TEST_CASE("tableau generators commute", "[stabilizer]") {
    Rng rng(3100);
    for (int trial = 0; trial < 50; ++trial) {
        std::size_t m = 1 + rng.index(16), n = 1 + rng.index(9);
        StabTableau t = iqp_tableau(BitMatrix::random(m, n, rng));
        REQUIRE(t.x_part == t.x_part.transposed());
        // Symplectic product of generators a and b: x_a·z_b + z_a·x_b.
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                REQUIRE((t.x_part.get(a, b) ^ t.x_part.get(b, a)) == false);
    }
}

TEST_CASE("correlation examples", "[stabilizer]") {
    Correlation q = correlation(qrc7(), BitVector::from_string("10000"));
    REQUIRE(q.sign == +1);
    REQUIRE(q.g == 1);
    REQUIRE(std::abs(q.value() - 1.0 / std::sqrt(2.0)) < 1e-12);

    // No row has odd overlap with s, so the circuit acts trivially on Z_s.
    Correlation triv = correlation(from_strings({"11", "00"}), BitVector::from_string("11"));
    REQUIRE(triv.sign == +1);
    REQUIRE(triv.g == 0);
    REQUIRE(triv.value() == 1.0);

    Correlation z = correlation(from_strings({"1", "1"}), BitVector::from_string("1"));
    REQUIRE(z.zero());
    REQUIRE(z.value() == 0.0);

    REQUIRE_THROWS_AS(correlation(qrc7(), BitVector(5)), std::invalid_argument);
    REQUIRE_THROWS_AS(correlation(qrc7(), BitVector::ones(4)), std::invalid_argument);
}

TEST_CASE("correlation_from_dual examples", "[stabilizer]") {
    Correlation one = correlation_from_dual(from_strings({"1"}));
    REQUIRE(one.sign == +1);
    REQUIRE(one.g == 1);

    REQUIRE(correlation_from_dual(from_strings({"1", "1"})).zero());

    Correlation q = correlation_from_dual(qrc7());
    REQUIRE(q.sign == +1);
    REQUIRE(q.g == 1);

    // Dual spanned by (1,1,0,0) and (0,1,1,0): sum 1 − 1 − 1 − 1 = −2 = 2·ω^4.
    Correlation neg = correlation_from_dual(from_strings({"10", "10", "10", "01"}));
    REQUIRE(neg.sign == -1);
    REQUIRE(neg.g == 2);
    REQUIRE(std::abs(neg.value() + 0.5) < 1e-12);

    REQUIRE_THROWS_AS(correlation_from_dual(from_strings({"1", "0"})), no_secret_error);
}

TEST_CASE("correlation matches the statevector oracle", "[stabilizer]") {
    Rng rng(3200);
    int zeros = 0, negatives = 0;
    for (int trial = 0; trial < 150; ++trial) {
        std::size_t n = 1 + rng.index(8), m = 1 + rng.index(16);
        BitMatrix h = BitMatrix::random(m, n, rng);
        BitVector s = BitVector::random(n, rng);
        while (s.none()) s = BitVector::random(n, rng);
        Correlation c = correlation(h, s);
        REQUIRE(std::abs(c.value() - correlation_by_statevector(h, s)) < 1e-9);
        zeros += c.zero();
        negatives += c.sign < 0;
    }
    REQUIRE(zeros > 0);
    REQUIRE(negatives > 0);  // the sign path is genuinely exercised
}

TEST_CASE("correlation magnitude is 0 or 2^{-g/2} and matches the code class", "[stabilizer]") {
    Rng rng(3300);
    for (int trial = 0; trial < 150; ++trial) {
        std::size_t n = 1 + rng.index(8), m = 1 + rng.index(20);
        BitMatrix h = BitMatrix::random(m, n, rng);
        BitVector s = BitVector::random(n, rng);
        while (s.none()) s = BitVector::random(n, rng);
        Correlation c = correlation(h, s);
        BitMatrix hs = h.rows_where(h.mul(s));
        if (hs.rows() == 0) {
            REQUIRE(c.value() == 1.0);
            continue;
        }
        CodeProfile prof = classify_self_dual_intersection(hs);
        if (prof.dual_class == DualClass::UnbiasedEven) {
            REQUIRE(c.zero());
        } else {
            REQUIRE_FALSE(c.zero());
            REQUIRE(c.g == prof.gram_rank);
            REQUIRE(std::abs(std::abs(c.value()) - std::exp2(-0.5 * double(c.g))) < 1e-15);
        }
    }
}

TEST_CASE("correlation is invariant under column operations and row shuffles", "[stabilizer]") {
    Rng rng(3400);
    for (int trial = 0; trial < 60; ++trial) {
        std::size_t n = 2 + rng.index(7), m = 1 + rng.index(16);
        BitMatrix h = BitMatrix::random(m, n, rng);
        BitVector s = BitVector::random(n, rng);
        while (s.none()) s = BitVector::random(n, rng);
        Correlation base = correlation(h, s);

        BitMatrix q = BitMatrix::random_invertible(n, rng);
        auto qinv = q.inverse();
        REQUIRE(qinv.has_value());
        Correlation cong = correlation(h.mul(q), qinv->mul(s));
        REQUIRE(cong.sign == base.sign);
        REQUIRE(cong.g == base.g);

        std::vector<std::size_t> perm(m);
        for (std::size_t i = 0; i < m; ++i) perm[i] = i;
        for (std::size_t i = m; i > 1; --i) std::swap(perm[i - 1], perm[rng.index(i)]);
        std::vector<BitVector> shuffled;
        for (std::size_t i = 0; i < m; ++i) shuffled.push_back(h.row(perm[i]));
        Correlation permd = correlation(BitMatrix::from_rows(shuffled), s);
        REQUIRE(permd.sign == base.sign);
        REQUIRE(permd.g == base.g);
    }
}

TEST_CASE("min_generator_distance", "[stabilizer]") {
    REQUIRE(min_generator_distance(qrc7()) == 1);
    REQUIRE(min_generator_distance(from_strings({"1", "1"})) == 0);

    // Overlap identity: |⟨0|U_{H_s, π/4}|0⟩| = 2^{−g/2} whenever it is nonzero.
    Rng rng(3500);
    int nonzero = 0;
    for (int trial = 0; trial < 80; ++trial) {
        std::size_t n = 1 + rng.index(8), m = 1 + rng.index(12);
        BitMatrix hs = BitMatrix::random(m, n, rng);
        double amp = std::abs(program_state(hs, std::numbers::pi / 4)[0]);
        if (amp < 1e-9) continue;
        ++nonzero;
        REQUIRE(std::abs(amp - std::exp2(-0.5 * double(min_generator_distance(hs)))) < 1e-9);
    }
    REQUIRE(nonzero > 10);
}
