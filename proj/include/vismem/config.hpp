#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vismem/encoder.hpp"

namespace vismem {

// Flat key-value config with dotted section keys. Unknown keys are rejected so
// typos fail loudly before any stage runs.
struct RunConfig {
    struct Memory {
        int n = 100;
        double gamma_w = 5.0;
        double gamma_r = 5.0;
        std::uint64_t seed = 7;
    } memory;

    EncoderSpec encoder;

    struct ShortTerm {
        int max_epochs = 10;
        double acc_threshold = 0.98;
        int patience = 3;
    } short_term;

    struct Eval {
        std::vector<double> deltas{1.0, 2.0, 3.0};
        int category_threshold = 1;
        int stride = 1;
        bool pessimistic_ties = false;
    } eval;

    struct Paths {
        std::string input;
        std::string output;
        std::string memory_in;
        std::string memory_out;
        std::string density_out;
        std::string labels;
    } paths;
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

// Validates ranges (dims >= 1, rates > 0, deltas >= 1, ...).
void validate_config(const RunConfig& cfg);

// Every key in a fixed order; parse_config_text(dump_config(c)) reproduces c.
std::string dump_config(const RunConfig& cfg);

}  // namespace vismem
