#include "mkex/cli.hpp"

#include <algorithm>
#include <string_view>
#include <vector>

#include "mkex/bytes.hpp"
#include "mkex/cryptanalysis.hpp"
#include "mkex/hash.hpp"
#include "mkex/keycodec.hpp"
#include "mkex/net.hpp"
#include "mkex/protocol.hpp"
#include "mkex/wire.hpp"

#include <fstream>

namespace mkex::cli {

namespace {

void check_n(std::size_t n) {
    if (n < 2 || n > 64) throw Error("format", "n must be in [2, 64]");
}

void section(std::ostream& out, std::string_view title) {
    out << title << "\n" << std::string(title.size(), '-') << "\n";
}

void hex_block(std::ostream& out, std::string_view label,
               std::span<const std::uint8_t> bytes) {
    out << "\nHex representation of " << label << ", " << bytes.size() << " bytes\n";
    out << hex_dump(bytes) << "\n";
}

// Appendix-style view of a secret: the 2*n^2 extracted integers, two per
// matrix entry, then the byte dump.
void secret_block(std::ostream& out, std::string_view owner, std::string_view label,
                  const SharedSecret& secret) {
    section(out, std::string(owner) + ": secret key " + std::string(label));
    out << "2*N*N = " << secret.bytes.size() / 4 << " unsigned integers on 4 bytes\n";
    for (std::size_t off = 0; off + 8 <= secret.bytes.size(); off += 8) {
        const std::uint32_t re = load_u32_le(std::span(secret.bytes).subspan(off, 4));
        const std::uint32_t im = load_u32_le(std::span(secret.bytes).subspan(off + 4, 4));
        out << re << "\t" << im << "\n";
    }
    hex_block(out, label, secret.bytes);
}

KeyFile matrix_file(KeyKind kind, const CMatrix& m) {
    return KeyFile{kind, m.n(), 0, 0, encode_matrix(m)};
}

KeyFile private_file(std::size_t n, const PrivateKey& priv) {
    std::vector<std::uint8_t> payload = encode_coeffs(priv.a);
    const std::vector<std::uint8_t> tail = encode_coeffs(priv.a_tilde);
    payload.insert(payload.end(), tail.begin(), tail.end());
    return KeyFile{KeyKind::private_coeffs, n, priv.a.size(), priv.a_tilde.size(),
                   std::move(payload)};
}

PrivateKey private_from_file(const KeyFile& file) {
    if (file.kind != KeyKind::private_coeffs)
        throw Error("format", "expected a private-coeffs key file");
    const std::vector<Cplx> all = decode_coeffs(file.payload);
    PrivateKey priv;
    priv.a.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(file.m1));
    priv.a_tilde.assign(all.begin() + static_cast<std::ptrdiff_t>(file.m1), all.end());
    return priv;
}

CMatrix matrix_from_file(const KeyFile& file) {
    if (file.kind != KeyKind::matrix_pubkey && file.kind != KeyKind::pubkey)
        throw Error("format", "expected a matrix key file");
    return decode_matrix(file.n, file.payload);
}

} // namespace

SeededStream stream_from_config(const Config& config) {
    if (config.seed_hex.empty()) return SeededStream::from_os_entropy();
    const std::vector<std::uint8_t> bytes = hex_parse(config.seed_hex);
    if (bytes.size() != 32) throw Error("format", "--seed must be 64 hex characters");
    SeededStream::Seed seed{};
    std::copy(bytes.begin(), bytes.end(), seed.begin());
    return SeededStream(seed);
}

int exit_code_for(const Error& error) {
    const std::string& code = error.code();
    if (code == "agreement-failure") return 2;
    if (code == "io" || code == "protocol" || code == "negotiation") return 3;
    return 1;
}

int cmd_keygen(const Config& config, std::ostream& out) {
    check_n(config.n);
    SeededStream stream = stream_from_config(config);
    const KeyPair keys = generate_keys(stream, config.n);

    section(out, "Private key");
    out << "M1 = " << keys.priv.a.size() << " complex numbers\n";
    out << "M2 = " << keys.priv.a_tilde.size() << " complex numbers\n";
    const KeyFile priv = private_file(config.n, keys.priv);
    hex_block(out, "private coefficients", priv.payload);

    section(out, "Matrix public key");
    out << "N*N = " << keys.matrix_key.size() << " complex numbers\n";
    const KeyFile pub = matrix_file(KeyKind::matrix_pubkey, keys.matrix_key);
    hex_block(out, "matrix key", pub.payload);

    const std::string priv_path = config.out_prefix + ".priv.mkx";
    const std::string pub_path = config.out_prefix + ".pub.mkx";
    save_key_file(priv_path, priv);
    save_key_file(pub_path, pub);
    out << "Wrote " << priv_path << "\n";
    out << "Wrote " << pub_path << "\n";
    return 0;
}

int cmd_pub(const Config& config, std::ostream& out) {
    const KeyFile priv_file = load_key_file(config.key_path);
    const PrivateKey priv = private_from_file(priv_file);
    const CMatrix u = matrix_from_file(load_key_file(config.u_path));
    const CMatrix v = matrix_from_file(load_key_file(config.v_path));

    const CMatrix pub = compute_public_key(priv, u, v);
    section(out, "Public key");
    out << "N*N = " << pub.size() << " complex numbers\n";
    const KeyFile file = matrix_file(KeyKind::pubkey, pub);
    hex_block(out, "public key", file.payload);

    const std::string path = config.out_prefix + ".pubkey.mkx";
    save_key_file(path, file);
    out << "Wrote " << path << "\n";
    return 0;
}

int cmd_secret(const Config& config, std::ostream& out) {
    const PrivateKey priv = private_from_file(load_key_file(config.key_path));
    const CMatrix u = matrix_from_file(load_key_file(config.u_path));
    const CMatrix v = matrix_from_file(load_key_file(config.v_path));
    const CMatrix peer_pub = matrix_from_file(load_key_file(config.peer_pub_path));

    const CMatrix secret_matrix = compute_secret_matrix(priv, u, v, peer_pub);
    const SharedSecret secret = extract_secret(secret_matrix);
    secret_block(out, "Party", "S", secret);

    const std::string path = config.out_prefix + ".secret.mkx";
    save_key_file(path, KeyFile{KeyKind::secret, u.n(), 0, 0, secret.bytes});
    out << "Wrote " << path << "\n";
    return 0;
}

int cmd_exchange(const Config& config, std::ostream& out) {
    check_n(config.n);
    const std::size_t n = config.n;
    SeededStream base = stream_from_config(config);
    SeededStream alice_stream = base.derive("alice");
    SeededStream bob_stream = base.derive("bob");

    section(out, "Dimension of matrices");
    out << "N = " << n << "\tNN = " << n * n << "\n\n";
    section(out, "Length of the secret key");
    out << "K = " << n * n * 8 << "\n\n";

    const KeyPair alice = generate_keys(alice_stream, n);
    const KeyPair bob = generate_keys(bob_stream, n);

    section(out, "Alice: private key a");
    out << "M1 = " << alice.priv.a.size() << " complex numbers\n";
    hex_block(out, "a", encode_coeffs(alice.priv.a));
    section(out, "Alice: private key aa");
    out << "M2 = " << alice.priv.a_tilde.size() << " complex numbers\n";
    hex_block(out, "aa", encode_coeffs(alice.priv.a_tilde));

    section(out, "Bob: private key b");
    out << "J1 = " << bob.priv.a.size() << " complex numbers\n";
    hex_block(out, "b", encode_coeffs(bob.priv.a));
    section(out, "Bob: private key bb");
    out << "J2 = " << bob.priv.a_tilde.size() << " complex numbers\n";
    hex_block(out, "bb", encode_coeffs(bob.priv.a_tilde));

    section(out, "Alice: matrix public key U");
    out << "N*N = " << alice.matrix_key.size() << " complex numbers\n";
    hex_block(out, "U", encode_matrix(alice.matrix_key));
    section(out, "Bob: matrix public key V");
    out << "N*N = " << bob.matrix_key.size() << " complex numbers\n";
    hex_block(out, "V", encode_matrix(bob.matrix_key));

    const CMatrix a_pub = compute_public_key(alice.priv, alice.matrix_key, bob.matrix_key);
    const CMatrix b_pub = compute_public_key(bob.priv, alice.matrix_key, bob.matrix_key);

    section(out, "Alice: public key A");
    out << "N*N = " << a_pub.size() << " complex numbers\n";
    hex_block(out, "A", encode_matrix(a_pub));
    section(out, "Bob: public key B");
    out << "N*N = " << b_pub.size() << " complex numbers\n";
    hex_block(out, "B", encode_matrix(b_pub));

    // Test-only fault injection: Alice computes with a sign-flipped copy of
    // B, so the two secret matrices disagree by construction.
    CMatrix b_for_alice = b_pub;
    if (config.corrupt) b_for_alice.data()[0].re = -b_for_alice.data()[0].re;

    const CMatrix sa_matrix =
        compute_secret_matrix(alice.priv, alice.matrix_key, bob.matrix_key, b_for_alice);
    const CMatrix sb_matrix =
        compute_secret_matrix(bob.priv, alice.matrix_key, bob.matrix_key, a_pub);
    const SharedSecret sa = extract_secret(sa_matrix);
    const SharedSecret sb = extract_secret(sb_matrix);

    secret_block(out, "Alice", "Sa", sa);
    secret_block(out, "Bob", "Sb", sb);

    if (!config.dump_prefix.empty()) {
        save_key_file(config.dump_prefix + ".U.mkx",
                      matrix_file(KeyKind::matrix_pubkey, alice.matrix_key));
        save_key_file(config.dump_prefix + ".V.mkx",
                      matrix_file(KeyKind::matrix_pubkey, bob.matrix_key));
        save_key_file(config.dump_prefix + ".A.mkx", matrix_file(KeyKind::pubkey, a_pub));
        save_key_file(config.dump_prefix + ".B.mkx", matrix_file(KeyKind::pubkey, b_pub));
        save_key_file(config.dump_prefix + ".Sa.mkx", KeyFile{KeyKind::secret, n, 0, 0, sa.bytes});
        save_key_file(config.dump_prefix + ".Sb.mkx", KeyFile{KeyKind::secret, n, 0, 0, sb.bytes});
    }

    section(out, "Check the secret keys");
    const bool match = secrets_equal(sa, sb);
    out << "Result: " << (match ? "Sa = Sb" : "Sa != Sb") << "\n";
    return match ? 0 : 2;
}

int cmd_serve(const Config& config, std::ostream& out) {
    check_n(config.n);
    HandshakeOptions options{config.n, config.retries};
    Server server(config.addr, config.port, options, stream_from_config(config));
    out << "Listening on " << config.addr << ":" << server.port() << "\n";

    int exit_code = 0;
    auto report = [&](const SessionOutcome& o) {
        if (o.result) {
            out << "session " << o.index << ": secret agreed, "
                << o.result->secret.bytes.size() << " bytes\n";
            out << hex_dump(o.result->secret.bytes);
        } else {
            out << "session " << o.index << ": failed (" << o.error_code << ")\n";
            if (exit_code == 0) exit_code = exit_code_for(Error(o.error_code, o.error_message));
        }
    };

    if (config.concurrent && config.max_sessions > 0) {
        for (const auto& o : server.serve_many(config.max_sessions, true)) report(o);
        return exit_code;
    }
    std::size_t served = 0;
    while (config.max_sessions == 0 || served < config.max_sessions) {
        report(server.serve_one());
        ++served;
    }
    return exit_code;
}

int cmd_connect(const Config& config, std::ostream& out) {
    check_n(config.n);
    SeededStream stream = stream_from_config(config);
    HandshakeOptions options{config.n, config.retries};
    const HandshakeResult result =
        connect_and_handshake(config.addr, config.port, stream, options);
    out << "Shared secret, " << result.secret.bytes.size() << " bytes (attempt "
        << result.attempts << ")\n";
    out << hex_dump(result.secret.bytes);
    return 0;
}

int cmd_attack(const Config& config, std::ostream& out) {
    if (config.trials > 0) {
        check_n(config.n);
        const SeededStream base = stream_from_config(config);
        const AttackSummary summary =
            attack_report(config.trials, config.n, config.degree, base);
        out << format_attack_table(summary);
        if (!config.csv_path.empty()) {
            std::ofstream csv(config.csv_path, std::ios::binary);
            if (!csv) throw Error("io", "cannot open '" + config.csv_path + "'");
            csv << attack_csv(summary);
        }
        return 0;
    }

    const CMatrix u = matrix_from_file(load_key_file(config.u_path));
    const CMatrix v = matrix_from_file(load_key_file(config.v_path));
    const CMatrix a_pub = matrix_from_file(load_key_file(config.a_path));
    const CMatrix b_pub = matrix_from_file(load_key_file(config.b_path));
    const std::size_t degree = config.degree == 0 ? u.n() : config.degree;

    const LinearSystem sys = build_system(u, v, a_pub, degree);
    const LsqSolution sol = solve_least_squares(sys);
    const CMatrix s_eve = recover_secret(u, v, b_pub, sol.alpha, degree);
    const SharedSecret recovered = extract_secret(s_eve);

    section(out, "Linearization attack");
    out << "degree D = " << degree << "\n";
    char line[64];
    std::snprintf(line, sizeof(line), "residual = %.6e\n", sol.residual);
    out << line;
    std::snprintf(line, sizeof(line), "cond estimate = %.6e\n", sol.cond_estimate);
    out << line;
    secret_block(out, "Eve", "S_eve", recovered);

    if (!config.expect_path.empty()) {
        const KeyFile expected = load_key_file(config.expect_path);
        if (expected.kind != KeyKind::secret)
            throw Error("format", "--expect requires a secret key file");
        const bool match = expected.payload == recovered.bytes;
        out << "Recovered key matches expected secret: " << (match ? "yes" : "no") << "\n";
    }
    return 0;
}

int cmd_verify_vectors(const Config&, std::ostream& out) {
    std::size_t failures = 0;
    auto check = [&](std::string_view name, bool ok) {
        out << (ok ? "ok   " : "FAIL ") << name << "\n";
        if (!ok) ++failures;
    };

    check("encode c1", hex_dump(encode_cplx({0.8689850983830614, -0.8548606934416402})) ==
                           "ea8748d6b9ceeb3f9df71ed0045bebbf\n");
    check("encode c2", hex_dump(encode_cplx({-0.2856153551337328, -0.08363623851402902})) ==
                           "4c3a62a08547d2bf309f2d3d2f69b5bf\n");
    check("encode c3", hex_dump(encode_cplx({0.3368737329532423, 0.5243043640910983})) ==
                           "68997ad8568fd53fa67b1df219c7e03f\n");
    const Cplx back = decode_cplx(encode_cplx({0.8689850983830614, -0.8548606934416402}));
    check("decode inverse",
          back.re == 0.8689850983830614 && back.im == -0.8548606934416402);
    {
        std::array<std::uint8_t, 4> le{};
        store_u32_le(3532271144u, le);
        check("secret integer bytes", hex_dump(le) == "282e8ad2\n");
    }
    check("significand 1.5", significand_u32(1.5) == 2147483647u);
    check("significand -1.5", significand_u32(-1.5) == 2147483647u);
    check("significand 1.0", significand_u32(1.0) == 0u);
    check("sha256 abc",
          hex_dump(sha256(as_bytes("abc"))) ==
              "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad\n");

    out << (failures == 0 ? "All golden vectors verified.\n"
                          : "Golden vector verification FAILED.\n");
    return failures == 0 ? 0 : 1;
}

} // namespace mkex::cli
