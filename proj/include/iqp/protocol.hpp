#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <type_traits>
#include <variant>

#include "iqp/attacks.hpp"
#include "iqp/bits.hpp"
#include "iqp/errors.hpp"
#include "iqp/rng.hpp"
#include "iqp/scheme.hpp"
#include "iqp/simulator.hpp"
#include "iqp/stabilizer.hpp"

namespace iqp {

// Every X-program in the scheme rotates by the same angle.
inline constexpr double kProgramAngle = std::numbers::pi / 8;

struct Verdict {
    double estimate = 0.0;
    double ideal = 0.0;
    double tolerance = 0.0;
    std::size_t samples_used = 0;
    bool accept = false;
};

// Empirical correlation (1/T)·Σ (−1)^{x_i·s}.
inline double estimate_correlation(const SampleBatch& batch, const BitVector& s) {
    if (batch.empty()) throw std::invalid_argument("estimate_correlation: need at least one sample");
    double acc = 0.0;
    for (const auto& x : batch) {
        if (x.size() != s.size())
            throw std::invalid_argument("estimate_correlation: sample length must match secret");
        acc += x.dot(s) ? -1.0 : 1.0;
    }
    return acc / static_cast<double>(batch.size());
}

// Three standard errors of the estimator: wide enough that an honest prover
// rarely fails, narrow enough that an uncorrelated batch rarely passes.
inline double default_tolerance(std::size_t samples) {
    if (samples == 0) throw std::invalid_argument("default_tolerance: need at least one sample");
    return 3.0 / std::sqrt(static_cast<double>(samples));
}

inline Verdict verify(const SampleBatch& batch, const BitVector& s, double ideal,
                      double tolerance) {
    Verdict v;
    v.estimate = estimate_correlation(batch, s);
    v.ideal = ideal;
    v.tolerance = tolerance;
    v.samples_used = batch.size();
    v.accept = std::abs(v.estimate - v.ideal) <= tolerance;
    return v;
}

// Canonical entry point: the ideal value stays symbolic until this comparison.
inline Verdict verify(const SampleBatch& batch, const BitVector& s, const Correlation& ideal,
                      double tolerance) {
    return verify(batch, s, ideal.value(), tolerance);
}

// Probability of a sample orthogonal to the secret.
inline double bias_of(double corr) { return (corr + 1.0) / 2.0; }

// ---------------------------------------------------------------------------
// Provers

// Samples the genuine output distribution via the statevector simulator.
struct HonestSim {
    std::size_t qubit_cap = kDefaultQubitCap;
};

// Classical cheater drawing from the hyperplane mixture of its candidate.
struct NaiveCheat {
    BitVector candidate;
};

// Classical cheater drawing from the row space of the public matrix.
struct RowCheat {
    BitVector candidate;
};

// Baseline that ignores the instance entirely.
struct UniformRandom {};

using Prover = std::variant<HonestSim, NaiveCheat, RowCheat, UniformRandom>;

// One full protocol round: the chosen prover produces T samples for the
// public matrix, then the verifier scores them against the true secret and
// the symbolic ideal correlation.
inline Verdict run_protocol(const Instance& inst, const Prover& prover, std::size_t samples,
                            double tolerance, Rng& rng) {
    Correlation ideal = correlation_from_dual(inst.h.rows_where(inst.h.mul(inst.s)));
    SampleBatch batch = std::visit(
        [&](const auto& p) -> SampleBatch {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, HonestSim>) {
                return sample_outcomes(inst.h, kProgramAngle, samples, rng, p.qubit_cap);
            } else if constexpr (std::is_same_v<P, NaiveCheat>) {
                return naive_sample(p.candidate, ideal.value(), samples, rng);
            } else if constexpr (std::is_same_v<P, RowCheat>) {
                return sample_by_rows(inst.h, p.candidate, ideal.value(), samples, rng);
            } else {
                SampleBatch out;
                out.reserve(samples);
                for (std::size_t i = 0; i < samples; ++i)
                    out.push_back(BitVector::random(inst.h.cols(), rng));
                return out;
            }
        },
        prover);
    return verify(batch, inst.s, ideal, tolerance);
}

}  // namespace iqp
