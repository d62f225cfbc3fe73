#pragma once

#include <cstdint>
#include <ostream>
#include <string>

#include "mkex/error.hpp"
#include "mkex/randgen.hpp"

namespace mkex::cli {

struct Config {
    std::size_t n = 4;
    std::string seed_hex;                // 64 hex chars; empty = OS entropy
    std::string out_prefix = "mkex";
    std::string addr = "127.0.0.1";
    std::uint16_t port = 19787;
    std::size_t degree = 0;              // attack degree, 0 = n
    std::size_t trials = 0;
    int retries = 3;
    std::string csv_path;
    bool corrupt = false;                // test-only: force a key mismatch
    std::string dump_prefix;             // exchange: write U/V/A/B/Sa/Sb files
    std::size_t max_sessions = 1;
    bool concurrent = false;
    std::string key_path;
    std::string u_path;
    std::string v_path;
    std::string a_path;
    std::string b_path;
    std::string peer_pub_path;
    std::string expect_path;
};

// "format" on a malformed --seed value.
SeededStream stream_from_config(const Config& config);

// 1 usage/config, 2 agreement-failure, 3 io/protocol/negotiation.
int exit_code_for(const Error& error);

int cmd_keygen(const Config& config, std::ostream& out);
int cmd_pub(const Config& config, std::ostream& out);
int cmd_secret(const Config& config, std::ostream& out);
int cmd_exchange(const Config& config, std::ostream& out);
int cmd_serve(const Config& config, std::ostream& out);
int cmd_connect(const Config& config, std::ostream& out);
int cmd_attack(const Config& config, std::ostream& out);
int cmd_verify_vectors(const Config& config, std::ostream& out);

} // namespace mkex::cli
