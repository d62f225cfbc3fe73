#include <CLI11.hpp>

#include <iostream>

#include "mkex/cli.hpp"

namespace {

void add_seed_flag(CLI::App* app, mkex::cli::Config& config) {
    app->add_option("--seed", config.seed_hex,
                    "Deterministic seed, 64 hex chars (default: OS entropy)");
}

void add_n_flag(CLI::App* app, mkex::cli::Config& config) {
    app->add_option("--n", config.n, "Matrix side length, 2..64")->capture_default_str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Matrix-polynomial key exchange toolkit"};
    app.require_subcommand(1);

    mkex::cli::Config config;

    auto* keygen = app.add_subcommand("keygen", "Generate a private key and a matrix public key");
    add_n_flag(keygen, config);
    add_seed_flag(keygen, config);
    keygen->add_option("--out", config.out_prefix, "Output file prefix")->capture_default_str();

    auto* pub = app.add_subcommand("pub", "Compute the published key A from key files");
    pub->add_option("--key", config.key_path, "Private key file (.mkx)")->required();
    pub->add_option("--u", config.u_path, "First matrix public key file")->required();
    pub->add_option("--v", config.v_path, "Second matrix public key file")->required();
    pub->add_option("--out", config.out_prefix, "Output file prefix")->capture_default_str();

    auto* secret = app.add_subcommand("secret", "Derive the shared secret from key files");
    secret->add_option("--key", config.key_path, "Private key file (.mkx)")->required();
    secret->add_option("--u", config.u_path, "First matrix public key file")->required();
    secret->add_option("--v", config.v_path, "Second matrix public key file")->required();
    secret->add_option("--peer-pub", config.peer_pub_path, "Peer public key file")->required();
    secret->add_option("--out", config.out_prefix, "Output file prefix")->capture_default_str();

    auto* exchange = app.add_subcommand("exchange", "Run a full two-party exchange in-process");
    add_n_flag(exchange, config);
    add_seed_flag(exchange, config);
    exchange->add_option("--dump", config.dump_prefix, "Write U/V/A/B/Sa/Sb key files");
    exchange->add_flag("--corrupt", config.corrupt, "Force a key mismatch (test only)");

    auto* serve = app.add_subcommand("serve", "Accept handshakes over TCP");
    add_n_flag(serve, config);
    add_seed_flag(serve, config);
    serve->add_option("--addr", config.addr, "Bind address")->capture_default_str();
    serve->add_option("--port", config.port, "Listen port")->capture_default_str();
    serve->add_option("--retries", config.retries, "Retries per session")->capture_default_str();
    serve->add_option("--max-sessions", config.max_sessions, "Sessions to serve, 0 = forever")
        ->capture_default_str();
    serve->add_flag("--concurrent", config.concurrent, "Handle sessions on separate threads");

    auto* connect = app.add_subcommand("connect", "Run a handshake against a server");
    add_n_flag(connect, config);
    add_seed_flag(connect, config);
    connect->add_option("--addr", config.addr, "Server address")->capture_default_str();
    connect->add_option("--port", config.port, "Server port")->capture_default_str();
    connect->add_option("--retries", config.retries, "Handshake retries")->capture_default_str();

    auto* attack = app.add_subcommand("attack", "Linearization attack on public values");
    add_n_flag(attack, config);
    add_seed_flag(attack, config);
    attack->add_option("--degree", config.degree, "Attack degree D (0 = n)");
    attack->add_option("--trials", config.trials, "Attack this many fresh random exchanges");
    attack->add_option("--csv", config.csv_path, "Write per-trial results as CSV");
    attack->add_option("--u", config.u_path, "Matrix public key U file");
    attack->add_option("--v", config.v_path, "Matrix public key V file");
    attack->add_option("--a", config.a_path, "Public key A file");
    attack->add_option("--b", config.b_path, "Public key B file");
    attack->add_option("--expect", config.expect_path, "True secret file to compare against");

    auto* verify = app.add_subcommand("verify-vectors", "Check built-in golden vectors");
    (void)verify;

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand(keygen)) return mkex::cli::cmd_keygen(config, std::cout);
        if (app.got_subcommand(pub)) return mkex::cli::cmd_pub(config, std::cout);
        if (app.got_subcommand(secret)) return mkex::cli::cmd_secret(config, std::cout);
        if (app.got_subcommand(exchange)) return mkex::cli::cmd_exchange(config, std::cout);
        if (app.got_subcommand(serve)) return mkex::cli::cmd_serve(config, std::cout);
        if (app.got_subcommand(connect)) return mkex::cli::cmd_connect(config, std::cout);
        if (app.got_subcommand(attack)) return mkex::cli::cmd_attack(config, std::cout);
        if (app.got_subcommand(verify)) return mkex::cli::cmd_verify_vectors(config, std::cout);
    } catch (const mkex::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return mkex::cli::exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
