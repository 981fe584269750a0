// Command-line driver: generate challenge bundles, verify sample files,
// run the classical attacks, simulate honest provers, and reproduce the
// benchmark tables as TSV.
//
// Exit codes
//   0  success (verify: ACCEPT)
//   1  verify: REJECT; infeasible parameters; general failure
//   2  malformed input file (message carries a 1-based line number);
//      unknown attack method; inconsistent public/private pair
//   3  instance exceeds the simulator qubit cap

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "iqp/attacks.hpp"
#include "iqp/bits.hpp"
#include "iqp/errors.hpp"
#include "iqp/io.hpp"
#include "iqp/protocol.hpp"
#include "iqp/rng.hpp"
#include "iqp/scheme.hpp"
#include "iqp/simulator.hpp"
#include "iqp/stabilizer.hpp"

namespace {

namespace fs = std::filesystem;

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

iqp::BitMatrix load_public(const std::string& path) {
    return iqp::parse_instance(iqp::read_text_file(path));
}

iqp::SecretRecord load_secret(const std::string& path) {
    return iqp::parse_secret(iqp::read_text_file(path));
}

// Recompute the symbolic correlation of the pair (H, s) from scratch; the
// sidecar record is advisory only.
iqp::Correlation pair_correlation(const iqp::BitMatrix& h, const iqp::BitVector& s) {
    if (s.size() != h.cols())
        throw iqp::no_secret_error("secret length does not match the public matrix");
    iqp::BitVector marks = h.mul(s);
    if (marks.none())
        throw iqp::no_secret_error("secret selects no rows of the public matrix");
    return iqp::correlation_from_dual(h.rows_where(marks));
}

// ---------------------------------------------------------------------------
// Worker pool for cmd_bench. IQP_THREADS beats the --threads flag; 0 = auto.

std::size_t resolve_workers(std::size_t flag_value, std::size_t unit_count) {
    std::size_t workers = flag_value;
    if (const char* env = std::getenv("IQP_THREADS")) {
        char* end = nullptr;
        unsigned long v = std::strtoul(env, &end, 10);
        if (end != nullptr && *end == '\0' && v > 0) workers = v;
    }
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    return std::min(std::max<std::size_t>(workers, 1), std::max<std::size_t>(unit_count, 1));
}

void parallel_units(std::size_t count, std::size_t workers,
                    const std::function<void(std::size_t)>& body) {
    if (workers <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex err_mu;
    std::exception_ptr err;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mu);
                    if (!err) err = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

// ---------------------------------------------------------------------------
// generate

struct GenerateArgs {
    std::string scheme;
    std::size_t n = 0, m = 0, g = 1, q = 0;
    std::size_t lambda = iqp::kDefaultLambda;
    std::size_t m1 = 0, d = 0, m0 = 0, d0 = 0, sparsity = 3;
    bool guard_radical = false;
    std::uint64_t seed = 0;
    bool seed_given = false, m1_given = false, d_given = false;
    bool m0_given = false, d0_given = false, q_given = false;
    std::string out = "challenge";
};

int cmd_generate(const GenerateArgs& a) {
    iqp::Rng rng = a.seed_given ? iqp::Rng(a.seed) : iqp::Rng::from_entropy();

    iqp::ConstructOptions opt;
    opt.guard_radical = a.guard_radical;
    if (a.m1_given != a.d_given && a.scheme == "stabilizer") {
        std::cerr << "error: --m1 and -d must be given together\n";
        return 1;
    }
    if (a.m1_given && a.d_given) opt.forced_split = std::make_pair(a.m1, a.d);

    iqp::Instance inst;
    if (a.scheme == "stabilizer") {
        inst = iqp::stabilizer_construct(a.n, a.m, a.g, a.lambda, rng, opt);
    } else if (a.scheme == "qrc") {
        if (!a.q_given) {
            std::cerr << "error: --scheme qrc requires -q\n";
            return 1;
        }
        inst = iqp::qrc_construct(a.q, a.n, a.m, a.lambda, rng, opt);
    } else if (a.scheme == "hardened") {
        if (!(a.m1_given && a.d_given && a.m0_given && a.d0_given)) {
            std::cerr << "error: --scheme hardened requires --m1, -d, --m0 and --d0\n";
            return 1;
        }
        inst = iqp::hardened_construct(a.n, a.m, a.g, a.m1, a.d, a.m0, a.d0, a.sparsity, rng, opt);
    } else {
        std::cerr << "error: unknown scheme '" << a.scheme << "'\n";
        return 1;
    }

    iqp::ParamReport report = iqp::check_params(inst.meta);
    std::string failed;
    for (const auto& c : report.checks)
        if (!c.ok) failed += (failed.empty() ? "" : "; ") + c.name;
    if (!failed.empty())
        std::cerr << "warning: security parameter checks failed: " << failed << "\n";

    iqp::Correlation corr = pair_correlation(inst.h, inst.s);

    fs::path pub = a.out + ".pub", key = a.out + ".key", man = a.out + ".manifest";
    iqp::write_text_file(pub, iqp::serialize_instance(inst.h));
    iqp::write_text_file(key, iqp::serialize_secret(inst.s, corr));
    iqp::write_text_file(man, iqp::manifest_text(inst.meta));
    std::cout << "wrote " << pub.string() << "\n"
              << "wrote " << key.string() << "\n"
              << "wrote " << man.string() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// verify

int cmd_verify(const std::string& pub, const std::string& key, const std::string& samples,
               double tol, bool tol_given) {
    iqp::BitMatrix h = load_public(pub);
    iqp::SecretRecord rec = load_secret(key);
    iqp::SampleBatch batch = iqp::parse_samples(iqp::read_text_file(samples));

    iqp::Correlation ideal = pair_correlation(h, rec.s);
    double tolerance = tol_given ? tol : iqp::default_tolerance(batch.size());
    iqp::Verdict v = iqp::verify(batch, rec.s, ideal, tolerance);
    std::cout << "estimate=" << fmt("%.6f", v.estimate) << " ideal=" << fmt("%.6f", v.ideal)
              << " tolerance=" << fmt("%.6f", v.tolerance) << " samples=" << v.samples_used
              << "\n"
              << (v.accept ? "ACCEPT" : "REJECT") << "\n";
    return v.accept ? 0 : 1;
}

// ---------------------------------------------------------------------------
// attack

struct AttackArgs {
    std::string pub, method;
    std::size_t budget = std::size_t{1} << 15;
    std::size_t rounds = 64;
    std::size_t g_threshold = 1;
    std::size_t codeword_samples = 32;
    std::size_t km_pairs = 8;
    std::size_t meyer_k = 2;
    std::size_t dim_threshold = 0;
    bool dim_given = false;
    double razor_p = 0.0;
    bool razor_p_given = false;
    std::size_t razor_rounds = 32;
    std::size_t samples = 4096;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string report, emit;
};

int cmd_attack(const AttackArgs& a) {
    static const char* kMethods[] = {"linearity", "km", "radical", "hamming", "lazy",
                                     "double-meyer"};
    bool known = false;
    for (const char* name : kMethods) known = known || a.method == name;
    if (!known) {
        std::cerr << "error: unknown attack method '" << a.method << "'\n";
        return 2;
    }

    iqp::BitMatrix h = load_public(a.pub);
    std::uint64_t seed = a.seed_given ? a.seed : iqp::Rng::from_entropy().seed();

    iqp::AttackConfig cfg;
    cfg.check_budget = a.budget;
    cfg.g_threshold = a.g_threshold;
    cfg.d_resample_budget = a.rounds;
    cfg.codeword_samples = a.codeword_samples;
    cfg.seed = seed;

    // Self-check a candidate using only the public matrix: predict its
    // correlation, draw samples for it, and require the estimate to land
    // within the verifier's default tolerance of the prediction.
    iqp::Rng check_rng(iqp::mix64(seed ^ 0xd1b54a32d192ed03ULL));
    auto self_check = [&](const iqp::BitVector& cand) -> bool {
        if (cand.none() || h.mul(cand).none()) return false;
        iqp::Correlation corr;
        try {
            corr = pair_correlation(h, cand);
        } catch (const iqp::no_secret_error&) {
            return false;
        }
        if (corr.zero()) return false;
        iqp::SampleBatch batch = iqp::sample_by_rows(h, cand, corr.value(), a.samples, check_rng);
        double est = iqp::estimate_correlation(batch, cand);
        return std::abs(est - corr.value()) <= iqp::default_tolerance(a.samples);
    };

    iqp::AttackReport rep;
    if (a.method == "linearity") {
        rep = iqp::extract_secret_linearity(h, cfg, self_check);
    } else if (a.method == "km") {
        rep = iqp::km_extract(h, a.km_pairs, cfg, self_check);
    } else if (a.method == "lazy") {
        std::size_t threshold = a.dim_given ? a.dim_threshold : a.g_threshold;
        rep = iqp::lazy_linearity(h, threshold, cfg, self_check);
    } else if (a.method == "double-meyer") {
        rep = iqp::double_meyer(h, a.meyer_k, cfg, self_check);
    } else if (a.method == "radical") {
        rep = iqp::radical_attack(h);
    } else {  // hamming
        iqp::Rng rng(seed);
        rep = a.razor_p_given ? iqp::hammings_razor(h, a.razor_p, a.razor_rounds, rng)
                              : iqp::hammings_razor(h, a.razor_rounds, rng);
    }

    // Kernel-search methods stop on a confirmed candidate (then it is the
    // last one recorded); the structural methods are screened afterwards.
    std::optional<iqp::BitVector> winner;
    if (rep.success) {
        winner = rep.candidates.back();
    } else if (a.method == "radical" || a.method == "hamming") {
        for (const auto& cand : rep.candidates)
            if (self_check(cand)) {
                rep.success = true;
                winner = cand;
                break;
            }
    }

    std::string report_path = a.report.empty() ? a.pub + ".report" : a.report;
    iqp::write_text_file(report_path, iqp::attack_report_text(rep));
    std::cerr << "report written to " << report_path << "\n";

    if (winner.has_value()) {
        if (!a.emit.empty()) {
            iqp::Correlation corr = pair_correlation(h, *winner);
            iqp::SampleBatch batch =
                iqp::sample_by_rows(h, *winner, corr.value(), a.samples, check_rng);
            iqp::write_text_file(a.emit, iqp::serialize_samples(batch));
            std::cerr << "samples written to " << a.emit << "\n";
        }
        std::cout << "SECRET " << winner->to_string() << "\n";
    } else {
        std::cout << "FAIL\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// simulate

int cmd_simulate(const std::string& pub, const std::string& key, std::size_t count,
                 std::size_t cap, std::uint64_t seed, bool seed_given, std::string out) {
    iqp::BitMatrix h = load_public(pub);
    iqp::Rng rng = seed_given ? iqp::Rng(seed) : iqp::Rng::from_entropy();
    iqp::SampleBatch batch = iqp::sample_outcomes(h, iqp::kProgramAngle, count, rng, cap);

    if (out.empty()) out = fs::path(pub).replace_extension(".samples").string();
    iqp::write_text_file(out, iqp::serialize_samples(batch));
    std::cout << "wrote " << out << " (" << batch.size() << " samples, seed=" << rng.seed()
              << ")\n";

    if (!key.empty()) {
        iqp::SecretRecord rec = load_secret(key);
        std::cout << "estimate=" << fmt("%.6f", iqp::estimate_correlation(batch, rec.s)) << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// compile / correlation

int cmd_compile(const std::string& pub, const std::string& out) {
    iqp::BitMatrix h = load_public(pub);
    iqp::CompiledCircuit c = iqp::compile(h, iqp::kProgramAngle);
    std::string text = iqp::dump_circuit(c);
    if (out.empty())
        std::cout << text;
    else {
        iqp::write_text_file(out, text);
        std::cout << "wrote " << out << "\n";
    }
    return 0;
}

int cmd_correlation(const std::string& pub, const std::string& key) {
    iqp::BitMatrix h = load_public(pub);
    iqp::SecretRecord rec = load_secret(key);
    iqp::Correlation corr = pair_correlation(h, rec.s);
    if (!(corr.sign == rec.corr.sign && corr.g == rec.corr.g))
        std::cerr << "warning: sidecar correlation record disagrees with recomputation\n";
    std::cout << "g=" << corr.g << " sign=" << (corr.sign >= 0 ? "+1" : "-1")
              << " value=" << fmt("%.17g", corr.value())
              << " bias=" << fmt("%.3f", iqp::bias_of(corr.value())) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// bench

struct BenchArgs {
    std::string figure;
    std::size_t n = 40, m = 60, g = 2, q = 7;
    std::size_t n_from = 0, n_to = 0, n_step = 2;
    bool n_from_given = false, n_to_given = false;
    bool g_given = false, lambda_given = false;
    std::size_t lambda = 1;
    std::size_t seeds = 100;
    std::size_t trials = 500;
    std::size_t budget = std::size_t{1} << 12;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::size_t threads = 0;
};

std::size_t probe_kernel_dim(const iqp::BitMatrix& h, iqp::Rng& rng) {
    iqp::BitVector d = iqp::BitVector::random(h.cols(), rng);
    return h.rows_where(h.mul(d)).gram().kernel_basis().cols();
}

std::uint64_t unit_seed(std::uint64_t base, std::size_t unit) {
    return iqp::mix64(base + 0x100003ULL * (unit + 1));
}

int cmd_bench(const BenchArgs& a) {
    std::uint64_t base = a.seed_given ? a.seed : iqp::Rng::from_entropy().seed();
    std::ostream& out = std::cout;

    if (a.figure == "fig2a") {
        // Mean dim ker(G_d) against n for g in {1, 3}; the lower bound is
        // n - m/2 from the rank argument.
        std::size_t n_lo = a.n_from_given ? a.n_from : 35;
        std::size_t n_hi = a.n_to_given ? a.n_to : 55;
        struct Row {
            std::size_t g, n;
            double mean, bound;
        };
        std::vector<Row> rows;
        for (std::size_t g : {std::size_t{1}, std::size_t{3}})
            for (std::size_t n = n_lo; n <= n_hi; n += a.n_step) rows.push_back({g, n, 0, 0});
        parallel_units(rows.size(), resolve_workers(a.threads, rows.size()), [&](std::size_t u) {
            Row& r = rows[u];
            double sum = 0;
            for (std::size_t i = 0; i < a.seeds; ++i) {
                iqp::Rng rng(unit_seed(base, u) + i);
                iqp::Instance inst = iqp::stabilizer_construct(r.n, a.m, r.g, a.lambda, rng);
                sum += static_cast<double>(probe_kernel_dim(inst.h, rng));
            }
            r.mean = sum / static_cast<double>(a.seeds);
            r.bound = static_cast<double>(r.n) - static_cast<double>(a.m) / 2.0;
        });
        out << "# g\tn\tmean_dim\tlower_bound\n";
        for (const Row& r : rows)
            out << r.g << "\t" << r.n << "\t" << fmt("%.3f", r.mean) << "\t"
                << fmt("%.1f", r.bound) << "\n";
        return 0;
    }

    if (a.figure == "fig2b") {
        // Linearity-attack success rate against n at fixed m; the rate drops
        // to zero once n - m/2 clears the attacker's dimension budget.
        std::size_t n_lo = a.n_from_given ? a.n_from : 34;
        std::size_t n_hi = a.n_to_given ? a.n_to : 54;
        std::size_t g = a.g_given ? a.g : 5;
        std::size_t lambda = a.lambda_given ? a.lambda : 12;
        struct Row {
            std::size_t n;
            double rate;
        };
        std::vector<Row> rows;
        for (std::size_t n = n_lo; n <= n_hi; n += a.n_step) rows.push_back({n, 0});
        parallel_units(rows.size(), resolve_workers(a.threads, rows.size()), [&](std::size_t u) {
            Row& r = rows[u];
            std::size_t hits = 0;
            for (std::size_t i = 0; i < a.seeds; ++i) {
                iqp::Rng rng(unit_seed(base, u) + i);
                iqp::Instance inst = iqp::stabilizer_construct(r.n, a.m, g, lambda, rng);
                iqp::AttackConfig cfg;
                cfg.check_budget = a.budget;
                cfg.g_threshold = g;
                cfg.seed = unit_seed(base, u) + 7919 * i;
                iqp::AttackReport rep = iqp::extract_secret_linearity(inst.h, cfg);
                for (const auto& cand : rep.candidates)
                    if (cand == inst.s) {
                        ++hits;
                        break;
                    }
            }
            r.rate = static_cast<double>(hits) / static_cast<double>(a.seeds);
        });
        out << "# n\tsuccess_rate\n";
        for (const Row& r : rows) out << r.n << "\t" << fmt("%.3f", r.rate) << "\n";
        return 0;
    }

    if (a.figure == "fig3a") {
        // Mean dim ker(G_d) for quadratic-residue instances at the fully
        // extended corner n = r + q, m = 2q, where the expected dimension
        // equals the code dimension r = n - m/2.
        struct Row {
            std::size_t q, n, m;
            double mean, expected;
        };
        std::vector<Row> rows;
        for (std::size_t q : {std::size_t{7}, std::size_t{23}, std::size_t{31}}) {
            std::size_t r0 = (q + 1) / 2;
            rows.push_back({q, r0 + q, 2 * q, 0, static_cast<double>(r0)});
        }
        parallel_units(rows.size(), resolve_workers(a.threads, rows.size()), [&](std::size_t u) {
            Row& r = rows[u];
            double sum = 0;
            for (std::size_t i = 0; i < a.seeds; ++i) {
                iqp::Rng rng(unit_seed(base, u) + i);
                iqp::Instance inst = iqp::qrc_construct(r.q, r.n, r.m, a.lambda, rng);
                sum += static_cast<double>(probe_kernel_dim(inst.h, rng));
            }
            r.mean = sum / static_cast<double>(a.seeds);
        });
        out << "# q\tn\tm\tmean_dim\texpected\n";
        for (const Row& r : rows)
            out << r.q << "\t" << r.n << "\t" << r.m << "\t" << fmt("%.3f", r.mean) << "\t"
                << fmt("%.1f", r.expected) << "\n";
        return 0;
    }

    if (a.figure == "fig3b") {
        // Linearity-attack success rate against n at m = 2q, n from r to
        // r + q. The rate collapses once 2^{n - q} clears the check budget,
        // so the drop sits at n = q + log2(budget).
        std::size_t q = a.q, m = 2 * a.q;
        std::size_t n_lo = a.n_from_given ? a.n_from : (q + 1) / 2;
        std::size_t n_hi = a.n_to_given ? a.n_to : (q + 1) / 2 + q;
        struct Row {
            std::size_t n;
            double rate;
        };
        std::vector<Row> rows;
        for (std::size_t n = n_lo; n <= n_hi; n += a.n_step) rows.push_back({n, 0});
        parallel_units(rows.size(), resolve_workers(a.threads, rows.size()), [&](std::size_t u) {
            Row& r = rows[u];
            std::size_t hits = 0;
            for (std::size_t i = 0; i < a.seeds; ++i) {
                iqp::Rng rng(unit_seed(base, u) + i);
                iqp::Instance inst = iqp::qrc_construct(q, r.n, m, a.lambda, rng);
                iqp::AttackConfig cfg;
                cfg.check_budget = a.budget;
                cfg.g_threshold = 1;
                cfg.seed = unit_seed(base, u) + 7919 * i;
                iqp::AttackReport rep = iqp::extract_secret_linearity(inst.h, cfg);
                for (const auto& cand : rep.candidates)
                    if (cand == inst.s) {
                        ++hits;
                        break;
                    }
            }
            r.rate = static_cast<double>(hits) / static_cast<double>(a.seeds);
        });
        out << "# n\tsuccess_rate\n";
        for (const Row& r : rows) out << r.n << "\t" << fmt("%.3f", r.rate) << "\n";
        return 0;
    }

    if (a.figure == "kernel") {
        // Histogram of dim ker(G_d) at one (n, m, g) point.
        std::vector<std::size_t> dims(a.seeds);
        parallel_units(a.seeds, resolve_workers(a.threads, a.seeds), [&](std::size_t i) {
            iqp::Rng rng(unit_seed(base, i));
            iqp::Instance inst = iqp::stabilizer_construct(a.n, a.m, a.g, a.lambda, rng);
            dims[i] = probe_kernel_dim(inst.h, rng);
        });
        std::map<std::size_t, std::size_t> hist;
        for (std::size_t d : dims) ++hist[d];
        out << "# dim\tcount\n";
        for (const auto& [dim, count] : hist) out << dim << "\t" << count << "\n";
        return 0;
    }

    if (a.figure == "good-d") {
        // Frequency of G_s·d = 0 for random d against the 2^{-g} prediction,
        // plus the G_s·d = G_d·s identity.
        struct Row {
            std::size_t g;
            double freq = 0;
            bool identity = true;
        };
        std::vector<Row> rows = {{1}, {2}, {3}};
        parallel_units(rows.size(), resolve_workers(a.threads, rows.size()), [&](std::size_t u) {
            Row& r = rows[u];
            double sum = 0;
            for (std::size_t i = 0; i < a.seeds; ++i) {
                iqp::Rng rng(unit_seed(base, u) + i);
                iqp::Instance inst = iqp::stabilizer_construct(20, 40, r.g, 1, rng);
                iqp::GoodDStat stat =
                    iqp::good_d_probability_check(inst.h, inst.s, a.trials, rng);
                sum += stat.frequency;
                r.identity = r.identity && stat.identity_ok;
            }
            r.freq = sum / static_cast<double>(a.seeds);
        });
        out << "# g\tfrequency\texpected\tidentity_ok\n";
        for (const Row& r : rows)
            out << r.g << "\t" << fmt("%.4f", r.freq) << "\t"
                << fmt("%.4f", std::exp2(-static_cast<double>(r.g))) << "\t"
                << (r.identity ? 1 : 0) << "\n";
        return 0;
    }

    std::cerr << "error: unknown figure '" << a.figure << "'\n";
    return 1;
}

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const iqp::parse_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const iqp::resource_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const iqp::no_secret_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"IQP challenge toolkit: instance generation, verification, attacks"};
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* cgen = app.add_subcommand("generate", "Create a challenge bundle (.pub/.key/.manifest)");
    cgen->add_option("--scheme", gen.scheme, "stabilizer | qrc | hardened")->required();
    cgen->add_option("-n", gen.n, "columns (qubits)")->required();
    cgen->add_option("-m", gen.m, "rows (gates)")->required();
    cgen->add_option("-g", gen.g, "codimension of the hidden code (default 1)");
    auto* gq = cgen->add_option("-q", gen.q, "quadratic-residue prime (qrc only)");
    cgen->add_option("--lambda", gen.lambda, "security margin (default 50)");
    auto* gm1 = cgen->add_option("--m1", gen.m1, "rows of the secret block (forces the split)");
    auto* gd = cgen->add_option("-d", gen.d, "dimension of the self-dual intersection");
    auto* gm0 = cgen->add_option("--m0", gen.m0, "hardened: rows per inner block");
    auto* gd0 = cgen->add_option("--d0", gen.d0, "hardened: intersection dim per inner block");
    cgen->add_option("--sparsity", gen.sparsity, "hardened: row weight of the outer blocks");
    cgen->add_flag("--guard-radical", gen.guard_radical,
                   "postselect against the radical attack (needs m - m1 >= n - g)");
    auto* gseed = cgen->add_option("--seed", gen.seed, "RNG seed (default: OS entropy)");
    cgen->add_option("-o,--out", gen.out, "output path prefix (default 'challenge')");

    std::string vpub, vkey, vsamples;
    double vtol = 0.0;
    auto* cver = app.add_subcommand("verify", "Check a sample file against a challenge");
    cver->add_option("public", vpub, "public matrix file")->required();
    cver->add_option("key", vkey, "secret sidecar file")->required();
    cver->add_option("samples", vsamples, "sample file to score")->required();
    auto* vtolopt = cver->add_option("--tol", vtol, "acceptance tolerance (default 3/sqrt(T))");
    std::uint64_t vseed = 0;
    cver->add_option("--seed", vseed, "accepted for uniformity; verification is deterministic");

    AttackArgs atk;
    auto* catk = app.add_subcommand("attack", "Run a classical attack on a public matrix");
    catk->add_option("public", atk.pub, "public matrix file")->required();
    catk->add_option("--method", atk.method,
                     "linearity | km | radical | hamming | lazy | double-meyer")
        ->required();
    catk->add_option("--budget", atk.budget, "max property checks (default 32768)");
    catk->add_option("--rounds", atk.rounds, "max probe vectors d (default 64)");
    catk->add_option("--g-threshold", atk.g_threshold, "attacker's guess for g (default 1)");
    catk->add_option("--codeword-samples", atk.codeword_samples,
                     "weight probes per dual check (default 32)");
    catk->add_option("-l,--pairs", atk.km_pairs, "km: probe pairs per round (default 8)");
    catk->add_option("-k", atk.meyer_k, "double-meyer: kernels intersected (default 2)");
    auto* adim = catk->add_option("--dim-threshold", atk.dim_threshold,
                                  "lazy: explore kernels up to this dim (default --g-threshold)");
    auto* ap = catk->add_option("-p", atk.razor_p, "hamming: row-removal fraction in (0,1); "
                                                   "omit to sweep the built-in grid");
    catk->add_option("--razor-rounds", atk.razor_rounds,
                     "hamming: random restarts per fraction (default 32)");
    catk->add_option("-T,--samples", atk.samples, "self-check/emitted sample count (default 4096)");
    auto* aseed = catk->add_option("--seed", atk.seed, "RNG seed (default: OS entropy)");
    catk->add_option("--report", atk.report, "report path (default <public>.report)");
    catk->add_option("--emit", atk.emit, "write samples for a validated candidate here");

    std::string spub, skey, sout;
    std::size_t scount = 4000, scap = iqp::kDefaultQubitCap;
    std::uint64_t sseed = 0;
    auto* csim = app.add_subcommand("simulate", "Sample the honest output distribution");
    csim->add_option("public", spub, "public matrix file")->required();
    csim->add_option("-T,--samples", scount, "number of samples (default 4000)");
    csim->add_option("--cap", scap, "qubit cap for dense simulation (default 20)");
    auto* sseedopt = csim->add_option("--seed", sseed, "RNG seed (default: OS entropy)");
    csim->add_option("-o,--out", sout, "output file (default <public stem>.samples)");
    csim->add_option("--key", skey, "secret sidecar: also print the estimate along s");

    BenchArgs ben;
    auto* cben = app.add_subcommand("bench", "Emit benchmark tables as TSV");
    cben->add_option("--figure", ben.figure, "fig2a | fig2b | fig3a | fig3b | kernel | good-d")
        ->required();
    cben->add_option("-n", ben.n, "columns for 'kernel' (default 40)");
    cben->add_option("-m", ben.m, "rows (default 60)");
    auto* bg = cben->add_option("-g", ben.g, "code codimension (default 2; fig2b: 5)");
    cben->add_option("-q", ben.q, "fig3b: quadratic-residue prime (default 7)");
    auto* bfrom = cben->add_option("--n-from", ben.n_from, "sweep start");
    auto* bto = cben->add_option("--n-to", ben.n_to, "sweep end (inclusive)");
    cben->add_option("--n-step", ben.n_step, "sweep step (default 2)");
    auto* blam = cben->add_option("--lambda", ben.lambda,
                                  "security margin (default 1 at desk scale; fig2b: 12)");
    cben->add_option("--seeds", ben.seeds, "instances per grid point (default 100)");
    cben->add_option("--trials", ben.trials, "probes per instance for good-d (default 500)");
    cben->add_option("--budget", ben.budget, "attack check budget (default 4096)");
    auto* bseed = cben->add_option("--seed", ben.seed, "base seed (default: OS entropy)");
    cben->add_option("--threads", ben.threads, "worker count (IQP_THREADS overrides; 0 = auto)");

    std::string cpub, cout_path;
    std::uint64_t cseed = 0;
    auto* ccom = app.add_subcommand("compile", "Lower a public matrix to a gate list");
    ccom->add_option("public", cpub, "public matrix file")->required();
    ccom->add_option("-o,--out", cout_path, "output file (default stdout)");
    ccom->add_option("--seed", cseed, "accepted for uniformity; compilation is deterministic");

    std::string rpub, rkey;
    std::uint64_t rseed = 0;
    auto* ccor = app.add_subcommand("correlation", "Print the symbolic correlation of a bundle");
    ccor->add_option("public", rpub, "public matrix file")->required();
    ccor->add_option("key", rkey, "secret sidecar file")->required();
    ccor->add_option("--seed", rseed, "accepted for uniformity; the value is deterministic");

    CLI11_PARSE(app, argc, argv);

    if (cgen->parsed()) {
        gen.seed_given = gseed->count() > 0;
        gen.m1_given = gm1->count() > 0;
        gen.d_given = gd->count() > 0;
        gen.m0_given = gm0->count() > 0;
        gen.d0_given = gd0->count() > 0;
        gen.q_given = gq->count() > 0;
        return guarded([&] { return cmd_generate(gen); });
    }
    if (cver->parsed())
        return guarded([&] { return cmd_verify(vpub, vkey, vsamples, vtol, vtolopt->count() > 0); });
    if (catk->parsed()) {
        atk.seed_given = aseed->count() > 0;
        atk.dim_given = adim->count() > 0;
        atk.razor_p_given = ap->count() > 0;
        return guarded([&] { return cmd_attack(atk); });
    }
    if (csim->parsed())
        return guarded([&] {
            return cmd_simulate(spub, skey, scount, scap, sseed, sseedopt->count() > 0, sout);
        });
    if (cben->parsed()) {
        ben.seed_given = bseed->count() > 0;
        ben.n_from_given = bfrom->count() > 0;
        ben.n_to_given = bto->count() > 0;
        ben.g_given = bg->count() > 0;
        ben.lambda_given = blam->count() > 0;
        return guarded([&] { return cmd_bench(ben); });
    }
    if (ccom->parsed()) return guarded([&] { return cmd_compile(cpub, cout_path); });
    if (ccor->parsed()) return guarded([&] { return cmd_correlation(rpub, rkey); });
    return 1;
}
