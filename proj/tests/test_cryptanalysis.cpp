#include <doctest.h>

#include <cmath>
#include <sstream>

#include "mkex/cryptanalysis.hpp"
#include "mkex/error.hpp"
#include "mkex/keycodec.hpp"
#include "oracles.hpp"

using namespace mkex;

namespace {

struct Exchange {
    CMatrix u;
    CMatrix v;
    CMatrix a_pub;
    CMatrix b_pub;
    CMatrix secret;
};

Exchange make_exchange(SeededStream& s, std::size_t n) {
    auto alice = s.derive("alice");
    auto bob = s.derive("bob");
    const KeyPair ka = generate_keys(alice, n);
    const KeyPair kb = generate_keys(bob, n);
    const CMatrix a_pub = compute_public_key(ka.priv, ka.matrix_key, kb.matrix_key);
    const CMatrix b_pub = compute_public_key(kb.priv, ka.matrix_key, kb.matrix_key);
    CMatrix secret = compute_secret_matrix(ka.priv, ka.matrix_key, kb.matrix_key, b_pub);
    return {ka.matrix_key, kb.matrix_key, a_pub, b_pub, std::move(secret)};
}

double vec_norm(const std::vector<Cplx>& v) {
    double sum = 0.0;
    for (const Cplx& e : v) sum += abs2(e);
    return std::sqrt(sum);
}

} // namespace

TEST_CASE("degree-1 system has the single product column") {
    auto s = oracle::test_stream(0x40);
    const CMatrix u = oracle::random_matrix(s, 2);
    const CMatrix v = oracle::random_matrix(s, 2);
    const CMatrix a = oracle::random_matrix(s, 2);

    const LinearSystem sys = build_system(u, v, a, 1);
    REQUIRE(sys.basis.size() == 1);
    REQUIRE(sys.basis[0].size() == 4);

    const auto [w1, w2] = canonical_order(u, v);
    const CMatrix expected =
        oracle::naive_mat_mul(oracle::naive_power_normalized(w1, 1),
                              oracle::naive_power_normalized(w2, 1));
    for (std::size_t idx = 0; idx < 4; ++idx) {
        CHECK(std::abs(sys.basis[0][idx].re - expected.data()[idx].re) <= 1e-12);
        CHECK(std::abs(sys.basis[0][idx].im - expected.data()[idx].im) <= 1e-12);
    }
    // target is vec(A) in column-major order
    for (std::size_t idx = 0; idx < 4; ++idx) CHECK(sys.target[idx] == a.data()[idx]);
}

TEST_CASE("basis columns have at most unit norm") {
    auto s = oracle::test_stream(0x41);
    const Exchange ex = make_exchange(s, 4);
    const LinearSystem sys = build_system(ex.u, ex.v, ex.a_pub, 4);
    REQUIRE(sys.basis.size() == 16);
    for (const auto& column : sys.basis) {
        CHECK(vec_norm(column) <= 1.0 + 1e-12);
    }
}

TEST_CASE("planted single-product target is solved exactly") {
    auto s = oracle::test_stream(0x42);
    const CMatrix u = oracle::random_matrix(s, 2);
    const CMatrix v = oracle::random_matrix(s, 2);
    const auto [w1, w2] = canonical_order(u, v);
    const CMatrix planted = mat_mul(normalized_powers(w1, 1)[0], normalized_powers(w2, 1)[0]);

    const LinearSystem sys = build_system(u, v, planted, 1);
    const LsqSolution sol = solve_least_squares(sys);
    CHECK(sol.residual <= 1e-12);
    CHECK(std::abs(sol.alpha[0].re - 1.0) <= 1e-10);
    CHECK(std::abs(sol.alpha[0].im) <= 1e-10);
}

TEST_CASE("orthogonal target yields zero coefficients") {
    auto s = oracle::test_stream(0x43);
    const CMatrix m = oracle::random_matrix(s, 2);

    LinearSystem sys;
    sys.n = 2;
    sys.degree = 1;
    sys.basis.push_back({m.data()[0], m.data()[1], m.data()[2], m.data()[3]});
    // <psi, t> = conj(psi0)*t0 + conj(psi1)*t1 = 0 by construction
    sys.target = {Cplx{0, 0} - conj(m.data()[1]), conj(m.data()[0]), {0, 0}, {0, 0}};

    const LsqSolution sol = solve_least_squares(sys);
    CHECK(std::abs(sol.alpha[0].re) <= 1e-10);
    CHECK(std::abs(sol.alpha[0].im) <= 1e-10);
    CHECK(sol.residual == doctest::Approx(vec_norm(sys.target)).epsilon(1e-10));
}

TEST_CASE("all-zero system is reported singular") {
    LinearSystem sys;
    sys.n = 2;
    sys.degree = 1;
    sys.basis.push_back(std::vector<Cplx>(4));
    sys.target = std::vector<Cplx>(4);
    CHECK_THROWS_WITH_AS(solve_least_squares(sys), doctest::Contains("singular"), Error);
}

TEST_CASE("protocol instances solve to small residuals at degree n") {
    auto s = oracle::test_stream(0x44);
    int good = 0;
    for (int i = 0; i < 20; ++i) {
        auto trial = s.derive("t" + std::to_string(i));
        const Exchange ex = make_exchange(trial, 4);
        const LinearSystem sys = build_system(ex.u, ex.v, ex.a_pub, 4);
        const LsqSolution sol = solve_least_squares(sys);
        double target_norm = 0.0;
        for (const Cplx& e : sys.target) target_norm += abs2(e);
        target_norm = std::sqrt(target_norm);
        if (sol.residual <= 1e-8 * target_norm) ++good;
    }
    CHECK(good >= 16); // >= 80%
}

TEST_CASE("recovered secret matches planted instances to machine precision") {
    const SeededStream base = oracle::test_stream(0x45);
    const AttackSummary summary = attack_report(10, 4, 4, base, AttackMode::planted);
    CHECK(summary.exact_hits == 10);
    for (const AttackTrial& t : summary.trials) {
        CHECK(t.relative_error <= 1e-10);
        CHECK(t.residual <= 1e-10);
    }
}

TEST_CASE("zero peer public key recovers a zero secret") {
    auto s = oracle::test_stream(0x46);
    const Exchange ex = make_exchange(s, 3);
    const LinearSystem sys = build_system(ex.u, ex.v, ex.a_pub, 3);
    const LsqSolution sol = solve_least_squares(sys);
    const CMatrix s_eve = recover_secret(ex.u, ex.v, CMatrix(3), sol.alpha, 3);
    for (const Cplx& e : s_eve.data()) CHECK(e == Cplx{0.0, 0.0});
}

TEST_CASE("recover_secret validates shapes") {
    auto s = oracle::test_stream(0x47);
    const Exchange ex = make_exchange(s, 3);
    std::vector<Cplx> alpha(4);
    CHECK_THROWS_WITH_AS(recover_secret(ex.u, ex.v, ex.b_pub, alpha, 3),
                         doctest::Contains("shape"), Error);
    CHECK_THROWS_WITH_AS(recover_secret(ex.u, ex.v, CMatrix(4), alpha, 2),
                         doctest::Contains("shape"), Error);
}

TEST_CASE("attack succeeds on most random exchanges") {
    const SeededStream base = oracle::test_stream(0x48);
    const AttackSummary summary = attack_report(20, 4, 4, base);
    CHECK(summary.approx_hits >= 16);
    CHECK(summary.trials.size() == 20);
}

TEST_CASE("solved-to-residual implies recovered-to-tolerance") {
    // the commutation argument behind the reconstruction, checked numerically
    const SeededStream base = oracle::test_stream(0x49);
    const AttackSummary summary = attack_report(15, 4, 0, base);
    for (const AttackTrial& t : summary.trials) {
        if (t.residual <= 1e-10) CHECK(t.relative_error <= 1e-8);
    }
}

TEST_CASE("residuals do not grow with degree") {
    auto s = oracle::test_stream(0x4a);
    for (int i = 0; i < 5; ++i) {
        auto trial = s.derive("mono" + std::to_string(i));
        const Exchange ex = make_exchange(trial, 4);
        double previous = std::numeric_limits<double>::infinity();
        for (std::size_t d = 1; d <= 4; ++d) {
            const LsqSolution sol =
                solve_least_squares(build_system(ex.u, ex.v, ex.a_pub, d));
            CHECK(sol.residual <= previous + 1e-10);
            previous = sol.residual;
        }
    }
}

TEST_CASE("empty report and formatting") {
    const SeededStream base = oracle::test_stream(0x4b);
    const AttackSummary empty = attack_report(0, 4, 4, base);
    CHECK(empty.trials.empty());
    CHECK(empty.exact_hits == 0);
    CHECK(format_attack_table(empty).find("trials") != std::string::npos);

    const AttackSummary small = attack_report(3, 4, 4, base);
    const std::string table = format_attack_table(small);
    CHECK(table.find("exact key recovery") != std::string::npos);
    CHECK(table.find("median residual") != std::string::npos);

    const std::string csv = attack_csv(small);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4); // header + 3 rows
}
