// mixdisc: generate, evaluate, scale and bound matrix tuples from the
// command line. Subcommands: gen, exact, scale, estimate, experiment.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "mixdisc/mixdisc.hpp"
#include "mixdisc/io.hpp"

namespace {

using namespace mixdisc;

constexpr int kExitError = 1;
constexpr int kExitParse = 2;
constexpr int kExitNoConvergence = 3;
constexpr int kExitPropertyViolation = 4;

unsigned worker_count() {
    if (const char* env = std::getenv("MIXDISC_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1 && v <= 256) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

std::string fmt(double v) { return detail::format_double(v); }

// ---------------------------------------------------------------------------
// gen / exact / scale / estimate
// ---------------------------------------------------------------------------

int cmd_gen(std::uint64_t n, double alpha, std::uint64_t seed, const std::string& out) {
    const MatrixTuple t = random_tuple(n, alpha, seed);
    TupleMetadata meta;
    meta.seed = seed;
    meta.alpha_target = alpha;
    meta.description = "generated by mixdisc gen";
    save_tuple_file(out, t, meta);
    std::cout << "wrote " << out << " (n=" << n << ", alpha<=" << fmt(alpha) << ")\n";
    return 0;
}

int cmd_exact(const std::string& in) {
    const TupleFile file = load_tuple_file(in, &std::cerr);
    const unsigned threads = worker_count();
    const ExactValue v = mixed_discriminant(file.tuple, threads, threads);
    std::cout << "{\"log_abs\": " << (v.sign == 0 ? "null" : fmt(v.log_abs))
              << ", \"sign\": " << v.sign << ", \"value\": " << fmt(v.value) << "}\n";
    if (v.overflow_warning)
        std::cerr << "warning: an intermediate determinant exceeded 1e280\n";
    return 0;
}

int cmd_scale(const std::string& in, double tol, int max_iter, const std::string& out) {
    const TupleFile file = load_tuple_file(in, &std::cerr);
    SolverConfig cfg;
    cfg.trace_tol = tol;
    cfg.max_iterations = max_iter;

    const ConditionReport before = alpha_of(file.tuple);
    const ScalingResult r = scale_to_doubly_stochastic(file.tuple, cfg);
    const ConditionReport after = alpha_of(r.scaled);

    std::ostringstream os;
    os << "{\"n\": " << file.tuple.size()
       << ", \"alpha_input\": " << fmt(before.alpha)
       << ", \"alpha_scaled\": " << fmt(after.alpha)
       << ", \"iterations\": " << r.iterations
       << ", \"residual\": " << fmt(r.residual)
       << ", \"log_det_T\": " << fmt(r.log_det_T) << ", \"xi\": [";
    for (std::size_t i = 0; i < r.xi.size(); ++i)
        os << (i ? ", " : "") << fmt(r.xi[i]);
    os << "], \"tau\": [";
    for (std::size_t i = 0; i < r.tau.size(); ++i)
        os << (i ? ", " : "") << fmt(r.tau[i]);
    os << "]}";
    std::cout << os.str() << "\n";

    if (!out.empty()) {
        TupleMetadata meta;
        meta.description = "scaled to doubly stochastic form by mixdisc scale";
        save_tuple_file(out, r.scaled, meta);
    }
    return 0;
}

int cmd_estimate(const std::string& in, double tol, int max_iter, bool check_exact) {
    const TupleFile file = load_tuple_file(in, &std::cerr);
    SolverConfig cfg;
    cfg.trace_tol = tol;
    cfg.max_iterations = max_iter;

    // estimate() scales internally; rerun the solver here only to surface its
    // iteration diagnostics next to the bounds.
    const ScalingResult r = scale_to_doubly_stochastic(file.tuple, cfg);
    const DiscriminantEstimate e = estimate(file.tuple, cfg);

    std::ostringstream os;
    os << "{\"n\": " << e.n
       << ", \"log_lower\": " << fmt(e.log_lower)
       << ", \"log_upper\": " << fmt(e.log_upper)
       << ", \"log_correction\": " << fmt(e.log_correction)
       << ", \"alpha_input\": " << fmt(e.alpha_input)
       << ", \"alpha_scaled\": " << fmt(e.alpha_scaled)
       << ", \"iterations\": " << r.iterations
       << ", \"residual\": " << fmt(r.residual);

    bool sandwich_ok = true;
    if (check_exact) {
        const ExactValue v = mixed_discriminant(file.tuple);
        sandwich_ok = v.sign == 1 && v.log_abs >= e.log_lower - 1e-8 &&
                      v.log_abs <= e.log_upper + 1e-8;
        os << ", \"log_exact\": " << (v.sign == 0 ? "null" : fmt(v.log_abs))
           << ", \"sandwich_ok\": " << (sandwich_ok ? "true" : "false");
    }
    os << "}";
    std::cout << os.str() << "\n";
    return sandwich_ok ? 0 : kExitPropertyViolation;
}

// ---------------------------------------------------------------------------
// experiment
// ---------------------------------------------------------------------------

struct ExperimentRecord {
    std::size_t n = 0;
    double alpha_input = 0.0;
    double alpha_scaled = 0.0;
    std::optional<double> log_exact;
    std::optional<double> log_lower;
    std::optional<double> log_upper;
    int iterations = 0;
    double residual = 0.0;
    double wall_time_ms = 0.0;
    bool pass = false;
    std::string note;
};

ExperimentRecord run_lemma22(Rng& rng) {
    ExperimentRecord rec;
    rec.n = 3 + rng.uniform_int(0, 4); // exact-oracle scale
    const double alpha = rng.uniform(1.0, 3.0);
    const MatrixTuple t = normalize_trace_sum(random_tuple(rec.n, alpha, rng.bits()));
    const ExactValue before = mixed_discriminant(t);
    const ScalingResult r = scale_to_doubly_stochastic(t);
    const ExactValue after = mixed_discriminant(r.scaled);
    rec.alpha_input = alpha_of(t).alpha;
    rec.alpha_scaled = alpha_of(r.scaled).alpha;
    rec.log_lower = before.log_abs;
    rec.log_upper = after.log_abs;
    rec.iterations = r.iterations;
    rec.residual = r.residual;
    rec.pass = after.value >= before.value * (1.0 - 1e-8);
    if (!rec.pass) rec.note = "D decreased under scaling";
    return rec;
}

ExperimentRecord run_lemma24(Rng& rng, std::size_t index) {
    ExperimentRecord rec;
    rec.n = 10 + rng.uniform_int(0, 30); // scaling-only scale
    constexpr double targets[] = {1.0, 1.5, 2.0, 3.0};
    const double alpha = targets[index % 4];
    const MatrixTuple t = random_tuple(rec.n, alpha, rng.bits());
    rec.alpha_input = alpha_of(t).alpha;
    const ScalingResult r = scale_to_doubly_stochastic(t);
    rec.alpha_scaled = alpha_of(r.scaled).alpha;
    rec.iterations = r.iterations;
    rec.residual = r.residual;
    rec.log_lower = std::log(rec.alpha_scaled);
    rec.log_upper = 4.0 * std::log(rec.alpha_input);
    rec.pass = rec.alpha_scaled <= std::pow(rec.alpha_input, 4) * (1.0 + 1e-6);
    if (!rec.pass) rec.note = "scaled conditioning exceeded alpha^4";
    return rec;
}

ExperimentRecord run_lemma25(Rng& rng) {
    ExperimentRecord rec;
    rec.n = 3 + rng.uniform_int(0, 4);
    const double alpha = rng.uniform(1.0, 3.0);
    const MatrixTuple t = random_tuple(rec.n, alpha, rng.bits());
    const std::vector<double> u = rng.unit_vector(rec.n);

    std::vector<SymMatrix> with_rank_one(t.begin(), t.end());
    with_rank_one[rec.n - 1] = SymMatrix::outer(u);
    const ExactValue full = mixed_discriminant(MatrixTuple(std::move(with_rank_one)));
    const MatrixTuple restricted = restrict_tuple(t, u);
    const ExactValue rest = mixed_discriminant(restricted);

    rec.alpha_input = alpha_of(t).alpha;
    rec.alpha_scaled = alpha_of(restricted).alpha;
    rec.log_exact = full.log_abs;
    rec.log_lower = rest.log_abs - 1e-8;
    rec.log_upper = rest.log_abs + 1e-8;
    rec.pass = std::abs(full.value - rest.value) <=
               1e-8 * std::max(std::abs(rest.value), 1e-300);
    if (!rec.pass) rec.note = "restriction identity violated";
    return rec;
}

ExperimentRecord run_lemma26(Rng& rng) {
    ExperimentRecord rec;
    rec.n = 10 + rng.uniform_int(0, 40);
    const double alpha_target = rng.uniform(1.0, 4.0);
    Rng eigen_rng(rng.bits());
    const Matrix frame = eigen_rng.orthogonal(rec.n);
    std::vector<double> spectrum(rec.n);
    for (double& v : spectrum) v = eigen_rng.uniform(1.0, alpha_target);
    SymMatrix q = congruence(SymMatrix::diagonal(spectrum), frame.transposed());
    q *= 1.0 / q.trace();

    const EigenDecomposition d = eigen_decompose(q);
    const double alpha = d.eigenvalues.back() / d.eigenvalues.front();
    const SymMatrix hat = restrict_form(q, hyperplane_basis(rng.unit_vector(rec.n)));
    const EigenDecomposition dh = eigen_decompose(hat);
    const double tr_hat = hat.trace();

    // Linear trace values for this suite, not logs.
    rec.alpha_input = alpha;
    rec.alpha_scaled = dh.eigenvalues.back() / dh.eigenvalues.front();
    rec.log_exact = tr_hat;
    rec.log_lower = 1.0 - alpha / double(rec.n);
    rec.log_upper = 1.0 - 1.0 / (alpha * double(rec.n));
    rec.pass = tr_hat >= *rec.log_lower - 1e-10 && tr_hat <= *rec.log_upper + 1e-10;
    if (!rec.pass) rec.note = "restricted trace left the conditioning window";
    return rec;
}

ExperimentRecord run_thm14(Rng& rng) {
    ExperimentRecord rec;
    rec.n = 3 + rng.uniform_int(0, 6);
    const double alpha = rng.uniform(1.0, 2.0);
    const MatrixTuple t = random_tuple(rec.n, alpha, rng.bits());
    rec.alpha_input = alpha_of(t).alpha;
    const ScalingResult r = scale_to_doubly_stochastic(t);
    rec.alpha_scaled = alpha_of(r.scaled).alpha;
    rec.iterations = r.iterations;
    rec.residual = r.residual;

    const ExactValue v = mixed_discriminant(r.scaled);
    rec.log_exact = v.log_abs;
    rec.log_lower = bapat_lower(rec.n);
    rec.log_upper = conditioned_upper(rec.n, rec.alpha_scaled);
    rec.pass = v.sign == 1 && v.log_abs <= *rec.log_upper + 1e-8;
    if (!rec.pass) rec.note = "concentration upper bound violated";
    return rec;
}

ExperimentRecord run_sandwich(Rng& rng) {
    ExperimentRecord rec;
    rec.n = 3 + rng.uniform_int(0, 6);
    const double alpha = rng.uniform(1.0, 2.0);
    const MatrixTuple t = random_tuple(rec.n, alpha, rng.bits());
    const ScalingResult r = scale_to_doubly_stochastic(t);
    const DiscriminantEstimate e = estimate(t);
    const ExactValue v = mixed_discriminant(t);

    rec.alpha_input = e.alpha_input;
    rec.alpha_scaled = e.alpha_scaled;
    rec.iterations = r.iterations;
    rec.residual = r.residual;
    rec.log_exact = v.log_abs;
    rec.log_lower = e.log_lower;
    rec.log_upper = e.log_upper;
    rec.pass = v.sign == 1 && v.log_abs >= e.log_lower - 1e-8 &&
               v.log_abs <= e.log_upper + 1e-8;
    if (!rec.pass) rec.note = "exact value escaped the estimate interval";
    return rec;
}

ExperimentRecord run_permanent(Rng& rng) {
    ExperimentRecord rec;
    rec.n = 4 + rng.uniform_int(0, 5);
    // Random positive matrix, embedded and scaled: the scaled tuple stays
    // diagonal, so its rows form a doubly stochastic matrix.
    Matrix a(rec.n, rec.n);
    for (std::size_t i = 0; i < rec.n; ++i)
        for (std::size_t j = 0; j < rec.n; ++j) a(i, j) = rng.uniform(0.2, 1.0);
    const MatrixTuple t = from_matrix_rows(a);
    rec.alpha_input = alpha_of(t).alpha;
    const ScalingResult r = scale_to_doubly_stochastic(t);
    rec.iterations = r.iterations;
    rec.residual = r.residual;

    const Matrix b = diagonal_rows(r.scaled);
    double max_entry = 0.0;
    for (std::size_t i = 0; i < rec.n; ++i)
        for (std::size_t j = 0; j < rec.n; ++j) max_entry = std::max(max_entry, b(i, j));
    const double alpha = std::max(1.0, max_entry * double(rec.n)) + 1e-12;
    rec.alpha_scaled = alpha;

    const auto [lo, hi] = permanent_sandwich(b, alpha);
    const double log_per = std::log(permanent_ryser(b));
    rec.log_exact = log_per;
    rec.log_lower = lo;
    rec.log_upper = hi;
    rec.pass = log_per >= lo - 1e-8 && log_per <= hi + 1e-10;
    if (!rec.pass) rec.note = "permanent escaped the sandwich";
    return rec;
}

ExperimentRecord run_row(const std::string& suite, std::uint64_t seed, std::size_t index) {
    Rng rng(seed + index);
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentRecord rec;
    try {
        if (suite == "lemma22") rec = run_lemma22(rng);
        else if (suite == "lemma24") rec = run_lemma24(rng, index);
        else if (suite == "lemma25") rec = run_lemma25(rng);
        else if (suite == "lemma26") rec = run_lemma26(rng);
        else if (suite == "thm14") rec = run_thm14(rng);
        else if (suite == "sandwich") rec = run_sandwich(rng);
        else rec = run_permanent(rng);
    } catch (const std::exception& e) {
        rec.pass = false;
        rec.note = e.what();
    }
    rec.wall_time_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - t0)
                           .count();
    return rec;
}

int cmd_experiment(const std::string& suite, std::size_t reps, std::uint64_t seed,
                   const std::string& out_csv) {
    static const std::vector<std::string> known{
        "lemma22", "lemma24", "lemma25", "lemma26", "thm14", "sandwich", "permanent"};
    if (std::find(known.begin(), known.end(), suite) == known.end())
        throw UnknownSuite(suite);

    std::vector<ExperimentRecord> rows(reps);
    if (reps > 0) {
        std::atomic<std::size_t> next{0};
        const unsigned workers =
            std::min<unsigned>(worker_count(), static_cast<unsigned>(reps));
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= reps) return;
                    rows[i] = run_row(suite, seed, i);
                }
            });
        for (std::thread& th : pool) th.join();
    }

    std::ofstream csv(out_csv, std::ios::binary);
    if (!csv) throw IoError("cannot open for writing: " + out_csv);
    csv << "n,alpha_input,alpha_scaled,log_exact,log_lower,log_upper,"
           "iterations,residual,wall_time_ms\n";
    std::size_t failures = 0;
    for (const ExperimentRecord& r : rows) {
        auto opt = [](const std::optional<double>& v) {
            return v ? fmt(*v) : std::string();
        };
        csv << r.n << ',' << fmt(r.alpha_input) << ',' << fmt(r.alpha_scaled) << ','
            << opt(r.log_exact) << ',' << opt(r.log_lower) << ',' << opt(r.log_upper)
            << ',' << r.iterations << ',' << fmt(r.residual) << ','
            << fmt(r.wall_time_ms) << '\n';
        if (!r.pass) {
            ++failures;
            std::cerr << "row failed: " << (r.note.empty() ? "inequality violated" : r.note)
                      << "\n";
        }
    }
    if (!csv) throw IoError("write failed: " + out_csv);

    std::cout << "suite=" << suite << " reps=" << reps << " pass=" << (reps - failures)
              << " fail=" << failures << "\n";
    return failures == 0 ? 0 : kExitPropertyViolation;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"mixed discriminants: exact values, doubly stochastic scaling, "
                 "certified bounds"};
    app.require_subcommand(1);

    auto* gen = app.add_subcommand("gen", "generate a random conditioned tuple file");
    std::uint64_t gen_n = 4;
    double gen_alpha = 2.0;
    std::uint64_t gen_seed = 1;
    std::string gen_out;
    gen->add_option("--n", gen_n, "tuple size / matrix dimension")
        ->check(CLI::PositiveNumber);
    gen->add_option("--alpha", gen_alpha, "conditioning target (>= 1)");
    gen->add_option("--seed", gen_seed, "random seed");
    gen->add_option("--out", gen_out, "output tuple file")->required();

    auto* exact = app.add_subcommand("exact", "exact mixed discriminant of a tuple file");
    std::string exact_in;
    exact->add_option("input", exact_in, "tuple file")->required();

    auto* scale = app.add_subcommand("scale", "scale a tuple to doubly stochastic form");
    std::string scale_in, scale_out;
    double scale_tol = 1e-10;
    int scale_iters = 500;
    scale->add_option("input", scale_in, "tuple file")->required();
    scale->add_option("--tol", scale_tol, "trace residual tolerance");
    scale->add_option("--max-iter", scale_iters, "iteration cap");
    scale->add_option("--out", scale_out, "write the scaled tuple here");

    auto* est = app.add_subcommand("estimate", "certified bounds on ln D of a tuple file");
    std::string est_in;
    double est_tol = 1e-10;
    int est_iters = 500;
    bool est_check = false;
    est->add_option("input", est_in, "tuple file")->required();
    est->add_option("--tol", est_tol, "trace residual tolerance");
    est->add_option("--max-iter", est_iters, "iteration cap");
    est->add_flag("--check-exact", est_check,
                  "also compute the exact value (n <= 20) and verify the bracket");

    auto* exp = app.add_subcommand(
        "experiment",
        "seeded repetition suites; one CSV row per repetition.\n"
        "Suites: lemma22 (scaling does not decrease D), lemma24 (conditioning at "
        "most 4th-powers under scaling), lemma25 (hyperplane restriction "
        "identity), lemma26 (restricted trace window; CSV columns hold linear "
        "traces), thm14 (concentration upper bound on scaled tuples), sandwich "
        "(estimate brackets the exact value), permanent (doubly stochastic "
        "permanent sandwich).\n"
        "CSV columns, fixed: n,alpha_input,alpha_scaled,log_exact,log_lower,"
        "log_upper,iterations,residual,wall_time_ms. log_exact is empty when a "
        "suite has no exact value.\n"
        "MIXDISC_THREADS overrides the worker pool size (default: all cores).");
    std::string exp_suite, exp_out = "experiment.csv";
    std::size_t exp_reps = 50;
    std::uint64_t exp_seed = 12345;
    exp->add_option("--suite", exp_suite, "suite name")->required();
    exp->add_option("--reps", exp_reps, "number of repetitions");
    exp->add_option("--seed", exp_seed, "base seed; row i uses seed+i");
    exp->add_option("--out", exp_out, "output CSV path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_gen(gen_n, gen_alpha, gen_seed, gen_out);
        if (exact->parsed()) return cmd_exact(exact_in);
        if (scale->parsed()) return cmd_scale(scale_in, scale_tol, scale_iters, scale_out);
        if (est->parsed()) return cmd_estimate(est_in, est_tol, est_iters, est_check);
        if (exp->parsed()) return cmd_experiment(exp_suite, exp_reps, exp_seed, exp_out);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const NoConvergence& e) {
        std::ostringstream os;
        os << "{\"error\": \"no_convergence\", \"residual\": " << fmt(e.residual)
           << ", \"iterations\": " << e.iterations << ", \"best_xi\": [";
        for (std::size_t i = 0; i < e.best_xi.size(); ++i)
            os << (i ? ", " : "") << fmt(e.best_xi[i]);
        os << "]}";
        std::cout << os.str() << "\n";
        std::cerr << "no convergence: " << e.what() << "\n";
        return kExitNoConvergence;
    } catch (const PropertyViolation& e) {
        std::cerr << "property violation: " << e.what() << "\n";
        return kExitPropertyViolation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return 0;
}
