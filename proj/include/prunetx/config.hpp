#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace prunetx {

// Plain key=value experiment configuration. Command-line flags override file
// values; serialize() and parse round-trip losslessly.
struct ExperimentConfig {
    std::string modulation = "qpsk";  // qpsk | qam16
    std::vector<double> alpha = {0.35};
    int D = 3;
    int osf = 16;
    std::vector<double> eta = {0.0};
    double split = 0.5;
    std::vector<double> es_n0_db = {0.0};
    std::int64_t n_symbols = 1'000'000;
    std::vector<std::uint64_t> seeds = {1};
    std::string method = "lower_bound";  // lower_bound | full | high_snr
    int window = 32;
    std::string out = "out.csv";

    static ExperimentConfig parse_file(const std::string& path);
    void apply(const std::string& key, const std::string& value);
    std::string serialize() const;
    void validate() const;  // throws ConfigError naming the offending field

    bool operator==(const ExperimentConfig&) const = default;
};

std::string fmt_double(double v);  // shortest round-trip decimal
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace prunetx
