#include "mkex/cryptanalysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "mkex/error.hpp"

namespace mkex {

namespace {

std::size_t effective_degree(std::size_t degree, std::size_t n) {
    return degree == 0 ? n : degree;
}

} // namespace

LinearSystem build_system(const CMatrix& u, const CMatrix& v, const CMatrix& a_pub,
                          std::size_t degree) {
    if (degree < 1) throw Error("shape", "attack degree must be >= 1");
    const auto [w1, w2] = canonical_order(u, v);
    const std::size_t n = w1.n();
    const std::vector<CMatrix> pu = normalized_powers(w1, degree);
    const std::vector<CMatrix> pv = normalized_powers(w2, degree);

    LinearSystem sys;
    sys.n = n;
    sys.degree = degree;
    sys.basis.reserve(degree * degree);
    for (std::size_t m = 0; m < degree; ++m) {
        for (std::size_t k = 0; k < degree; ++k) {
            const CMatrix product = mat_mul(pu[m], pv[k]);
            sys.basis.emplace_back(product.data().begin(), product.data().end());
        }
    }
    sys.target.assign(a_pub.data().begin(), a_pub.data().end());
    return sys;
}

namespace {

// Lower-triangular LL^H factor of a Hermitian positive-definite matrix. The
// systems here are D^2 x D^2 with D <= 64, so a textbook O(k^3) routine is
// plenty. Returns false when a pivot is non-positive or non-finite.
struct CholeskyFactor {
    std::vector<Cplx> l; // column-major, lower triangle
    std::size_t k = 0;
    double diag_min = 0.0;
    double diag_max = 0.0;

    Cplx& at(std::size_t r, std::size_t c) { return l[c * k + r]; }
    const Cplx& at(std::size_t r, std::size_t c) const { return l[c * k + r]; }

    bool factor(std::vector<Cplx> gram, std::size_t size) {
        l = std::move(gram);
        k = size;
        for (std::size_t j = 0; j < k; ++j) {
            double d = at(j, j).re;
            for (std::size_t p = 0; p < j; ++p) d -= abs2(at(j, p));
            if (!(d > 0.0) || !std::isfinite(d)) return false;
            const double root = std::sqrt(d);
            at(j, j) = {root, 0.0};
            diag_min = (j == 0) ? root : std::min(diag_min, root);
            diag_max = (j == 0) ? root : std::max(diag_max, root);
            for (std::size_t i = j + 1; i < k; ++i) {
                Cplx sum = at(i, j);
                for (std::size_t p = 0; p < j; ++p) sum = sum - at(i, p) * conj(at(j, p));
                at(i, j) = sum / root;
            }
        }
        return true;
    }

    std::vector<Cplx> solve(const std::vector<Cplx>& rhs) const {
        std::vector<Cplx> y(k);
        for (std::size_t i = 0; i < k; ++i) {
            Cplx sum = rhs[i];
            for (std::size_t p = 0; p < i; ++p) sum = sum - at(i, p) * y[p];
            y[i] = sum / at(i, i).re;
        }
        std::vector<Cplx> x(k);
        for (std::size_t ii = k; ii-- > 0;) {
            Cplx sum = y[ii];
            for (std::size_t p = ii + 1; p < k; ++p) sum = sum - conj(at(p, ii)) * x[p];
            x[ii] = sum / at(ii, ii).re;
        }
        return x;
    }
};

} // namespace

LsqSolution solve_least_squares(const LinearSystem& sys, double ridge) {
    const std::size_t k = sys.basis.size();
    const std::size_t rows = sys.target.size();
    if (k == 0) throw Error("shape", "linear system has no columns");
    for (const auto& column : sys.basis) {
        if (column.size() != rows) throw Error("shape", "basis column length mismatch");
    }

    // Gram = Psi^H Psi, rhs = Psi^H target
    std::vector<Cplx> gram(k * k);
    std::vector<Cplx> rhs(k);
    double trace = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        for (std::size_t i = j; i < k; ++i) {
            Cplx sum{};
            for (std::size_t r = 0; r < rows; ++r) {
                sum += conj(sys.basis[i][r]) * sys.basis[j][r];
            }
            gram[j * k + i] = sum;
            gram[i * k + j] = conj(sum);
        }
        trace += gram[j * k + j].re;
        Cplx sum{};
        for (std::size_t r = 0; r < rows; ++r) sum += conj(sys.basis[j][r]) * sys.target[r];
        rhs[j] = sum;
    }

    double lambda = ridge >= 0.0 ? ridge : 1e-12 * trace / static_cast<double>(k);

    LsqSolution out;
    for (int tries = 0; tries <= 3; ++tries) {
        std::vector<Cplx> regularized = gram;
        for (std::size_t j = 0; j < k; ++j) regularized[j * k + j].re += lambda;
        CholeskyFactor chol;
        if (chol.factor(std::move(regularized), k)) {
            out.alpha = chol.solve(rhs);

            // The ridge shifts the solution away from the true least-squares
            // one; refine against the unregularized normal matrix, with the
            // ridged factor as preconditioner. On consistent systems this
            // removes the bias down to rounding level.
            auto gram_mul = [&](const std::vector<Cplx>& x) {
                std::vector<Cplx> y(k);
                for (std::size_t j = 0; j < k; ++j) {
                    for (std::size_t i = 0; i < k; ++i) y[i] += gram[j * k + i] * x[j];
                }
                return y;
            };
            for (int step = 0; step < 3; ++step) {
                const std::vector<Cplx> gx = gram_mul(out.alpha);
                std::vector<Cplx> resid(k);
                double rnorm = 0.0;
                for (std::size_t i = 0; i < k; ++i) {
                    resid[i] = rhs[i] - gx[i];
                    rnorm += abs2(resid[i]);
                }
                if (rnorm == 0.0) break;
                const std::vector<Cplx> dx = chol.solve(resid);
                bool finite = true;
                for (std::size_t i = 0; i < k; ++i) {
                    out.alpha[i] += dx[i];
                    finite = finite && is_finite(out.alpha[i]);
                }
                if (!finite)
                    throw Error("singular", "refinement diverged to non-finite coefficients");
            }

            out.ridge_used = lambda;
            out.cond_estimate = chol.diag_min > 0.0 ? (chol.diag_max / chol.diag_min) *
                                                          (chol.diag_max / chol.diag_min)
                                                    : 0.0;
            double res2 = 0.0;
            for (std::size_t r = 0; r < rows; ++r) {
                Cplx fit{};
                for (std::size_t j = 0; j < k; ++j) fit += out.alpha[j] * sys.basis[j][r];
                res2 += abs2(fit - sys.target[r]);
            }
            out.residual = std::sqrt(res2);
            return out;
        }
        lambda *= 10.0;
    }
    throw Error("singular", "normal equations stayed indefinite after ridge escalation");
}

CMatrix recover_secret(const CMatrix& u, const CMatrix& v, const CMatrix& b_pub,
                       std::span<const Cplx> alpha, std::size_t degree) {
    if (degree < 1) throw Error("shape", "attack degree must be >= 1");
    if (alpha.size() != degree * degree)
        throw Error("shape", "alpha length does not match degree^2");
    const auto [w1, w2] = canonical_order(u, v);
    if (b_pub.n() != w1.n()) throw Error("shape", "peer public key has mismatched dimensions");

    const std::vector<CMatrix> pu = normalized_powers(w1, degree);
    const std::vector<CMatrix> pv = normalized_powers(w2, degree);

    CMatrix s_eve(w1.n());
    for (std::size_t m = 0; m < degree; ++m) {
        const CMatrix left = mat_mul(pu[m], b_pub);
        for (std::size_t k = 0; k < degree; ++k) {
            add_scaled(s_eve, alpha[m * degree + k], mat_mul(left, pv[k]));
        }
    }
    return s_eve;
}

namespace {

struct Instance {
    CMatrix u;
    CMatrix v;
    CMatrix a_pub;
    CMatrix b_pub;
    CMatrix secret;
    SharedSecret secret_bytes;
};

Instance make_exchange_instance(SeededStream& stream, std::size_t n) {
    SeededStream alice = stream.derive("alice");
    SeededStream bob = stream.derive("bob");
    const KeyPair ka = generate_keys(alice, n);
    const KeyPair kb = generate_keys(bob, n);
    const CMatrix a_pub = compute_public_key(ka.priv, ka.matrix_key, kb.matrix_key);
    const CMatrix b_pub = compute_public_key(kb.priv, ka.matrix_key, kb.matrix_key);
    CMatrix secret = compute_secret_matrix(ka.priv, ka.matrix_key, kb.matrix_key, b_pub);
    SharedSecret bytes = extract_secret(secret);
    return {ka.matrix_key, kb.matrix_key, a_pub, b_pub, std::move(secret), std::move(bytes)};
}

// Private keys with a single nonzero coefficient at a position <= max_degree,
// so the planted solution lies inside the attacker's basis exactly.
PrivateKey make_planted_key(SeededStream& stream, std::size_t max_degree) {
    auto vec = [&](std::size_t position) {
        std::vector<Cplx> coeffs(position, Cplx{});
        double re = 0.0, im = 0.0;
        while (re == 0.0 && im == 0.0) {
            re = stream.symmetric_double();
            im = stream.symmetric_double();
        }
        coeffs[position - 1] = {re, im};
        return coeffs;
    };
    const std::size_t p1 = 1 + stream.next_u31() % max_degree;
    const std::size_t p2 = 1 + stream.next_u31() % max_degree;
    return {vec(p1), vec(p2)};
}

Instance make_planted_instance(SeededStream& stream, std::size_t n, std::size_t degree) {
    SeededStream alice = stream.derive("alice");
    SeededStream bob = stream.derive("bob");
    const PrivateKey pa = make_planted_key(alice, degree);
    const CMatrix u = gen_matrix_public_key(alice, n);
    const KeyPair kb = generate_keys(bob, n);
    const CMatrix a_pub = compute_public_key(pa, u, kb.matrix_key);
    const CMatrix b_pub = compute_public_key(kb.priv, u, kb.matrix_key);
    CMatrix secret = compute_secret_matrix(pa, u, kb.matrix_key, b_pub);
    SharedSecret bytes = extract_secret(secret);
    return {u, kb.matrix_key, a_pub, b_pub, std::move(secret), std::move(bytes)};
}

} // namespace

AttackSummary attack_report(std::size_t trials, std::size_t n, std::size_t degree,
                            const SeededStream& base, AttackMode mode) {
    const std::size_t d = effective_degree(degree, n);
    AttackSummary summary;
    summary.n = n;
    summary.degree = d;
    summary.trials.reserve(trials);

    for (std::size_t i = 0; i < trials; ++i) {
        SeededStream trial_stream = base.derive("trial-" + std::to_string(i));
        const Instance inst = (mode == AttackMode::planted)
                                  ? make_planted_instance(trial_stream, n, d)
                                  : make_exchange_instance(trial_stream, n);

        const LinearSystem sys = build_system(inst.u, inst.v, inst.a_pub, d);
        const LsqSolution sol = solve_least_squares(sys);
        const CMatrix s_eve = recover_secret(inst.u, inst.v, inst.b_pub, sol.alpha, d);

        CMatrix diff = s_eve;
        add_scaled(diff, Cplx{-1.0, 0.0}, inst.secret);
        const double denom = frobenius_norm(inst.secret);

        AttackTrial trial;
        trial.index = i;
        trial.residual = sol.residual;
        trial.cond_estimate = sol.cond_estimate;
        trial.relative_error = denom > 0.0 ? frobenius_norm(diff) / denom : 0.0;
        trial.exact_key = secrets_equal(extract_secret(s_eve), inst.secret_bytes);
        trial.approx_match = trial.relative_error <= 1e-6;
        summary.trials.push_back(trial);

        if (trial.exact_key) ++summary.exact_hits;
        if (trial.approx_match) ++summary.approx_hits;
    }

    auto median_of = [](std::vector<double> values) {
        if (values.empty()) return 0.0;
        std::sort(values.begin(), values.end());
        const std::size_t mid = values.size() / 2;
        return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
    };
    std::vector<double> residuals, conds;
    for (const auto& t : summary.trials) {
        residuals.push_back(t.residual);
        conds.push_back(t.cond_estimate);
    }
    summary.median_residual = median_of(std::move(residuals));
    summary.median_cond = median_of(std::move(conds));
    return summary;
}

std::string format_attack_table(const AttackSummary& summary) {
    std::ostringstream out;
    char line[160];
    const std::size_t count = summary.trials.size();
    out << "Linearization attack summary\n";
    out << "----------------------------\n";
    std::snprintf(line, sizeof(line), "%-24s %zu\n", "trials", count);
    out << line;
    std::snprintf(line, sizeof(line), "%-24s %zu\n", "matrix size n", summary.n);
    out << line;
    std::snprintf(line, sizeof(line), "%-24s %zu\n", "attack degree D", summary.degree);
    out << line;
    if (count > 0) {
        std::snprintf(line, sizeof(line), "%-24s %zu/%zu (%.1f%%)\n", "exact key recovery",
                      summary.exact_hits, count, 100.0 * summary.exact_hits / count);
        out << line;
        std::snprintf(line, sizeof(line), "%-24s %zu/%zu (%.1f%%)\n", "within 1e-6 relative",
                      summary.approx_hits, count, 100.0 * summary.approx_hits / count);
        out << line;
        std::snprintf(line, sizeof(line), "%-24s %.3e\n", "median residual",
                      summary.median_residual);
        out << line;
        std::snprintf(line, sizeof(line), "%-24s %.3e\n", "median cond estimate",
                      summary.median_cond);
        out << line;
    }
    return out.str();
}

std::string attack_csv(const AttackSummary& summary) {
    std::ostringstream out;
    out << "trial,residual,relative_error,cond_estimate,exact_key,approx_match\n";
    char line[160];
    for (const auto& t : summary.trials) {
        std::snprintf(line, sizeof(line), "%zu,%.17g,%.17g,%.17g,%d,%d\n", t.index, t.residual,
                      t.relative_error, t.cond_estimate, t.exact_key ? 1 : 0,
                      t.approx_match ? 1 : 0);
        out << line;
    }
    return out.str();
}

} // namespace mkex
