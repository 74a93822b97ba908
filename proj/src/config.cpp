#include "prunetx/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "prunetx/errors.hpp"

namespace prunetx {

std::string fmt_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& s) {
    const std::string v = trim(s);
    double out = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
        throw ConfigError("field '" + key + "': bad number '" + v + "'");
    return out;
}

std::int64_t parse_int(const std::string& key, const std::string& s) {
    const std::string v = trim(s);
    std::int64_t out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
        throw ConfigError("field '" + key + "': bad integer '" + v + "'");
    return out;
}

std::uint64_t parse_uint(const std::string& key, const std::string& s) {
    const std::string v = trim(s);
    std::uint64_t out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
        throw ConfigError("field '" + key + "': bad unsigned integer '" + v + "'");
    return out;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) parts.push_back(item);
    return parts;
}

template <typename T, typename Parse>
std::vector<T> parse_list(const std::string& key, const std::string& s, Parse parse) {
    std::vector<T> out;
    for (const auto& part : split_list(s)) out.push_back(parse(key, part));
    if (out.empty()) throw ConfigError("field '" + key + "': empty list");
    return out;
}

template <typename T>
std::string join(const std::vector<T>& v, std::string (*fmt)(T)) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out.push_back(',');
        out += fmt(v[i]);
    }
    return out;
}

std::string fmt_u64(std::uint64_t v) { return std::to_string(v); }

}  // namespace

void ExperimentConfig::apply(const std::string& key, const std::string& value) {
    if (key == "modulation") modulation = trim(value);
    else if (key == "alpha") alpha = parse_list<double>(key, value, parse_double);
    else if (key == "D") D = static_cast<int>(parse_int(key, value));
    else if (key == "osf") osf = static_cast<int>(parse_int(key, value));
    else if (key == "eta") eta = parse_list<double>(key, value, parse_double);
    else if (key == "split") split = parse_double(key, value);
    else if (key == "es_n0_db") es_n0_db = parse_list<double>(key, value, parse_double);
    else if (key == "n_symbols") n_symbols = parse_int(key, value);
    else if (key == "seeds") seeds = parse_list<std::uint64_t>(key, value, parse_uint);
    else if (key == "method") method = trim(value);
    else if (key == "window") window = static_cast<int>(parse_int(key, value));
    else if (key == "out") out = trim(value);
    else throw ConfigError("unknown config key '" + key + "'");
}

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    ExperimentConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        const std::size_t pos = s.find('=');
        if (pos == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + " is not key = value");
        cfg.apply(trim(s.substr(0, pos)), s.substr(pos + 1));
    }
    return cfg;
}

std::string ExperimentConfig::serialize() const {
    std::string s;
    s += "modulation = " + modulation + "\n";
    s += "alpha = " + join(alpha, +[](double v) { return fmt_double(v); }) + "\n";
    s += "D = " + std::to_string(D) + "\n";
    s += "osf = " + std::to_string(osf) + "\n";
    s += "eta = " + join(eta, +[](double v) { return fmt_double(v); }) + "\n";
    s += "split = " + fmt_double(split) + "\n";
    s += "es_n0_db = " + join(es_n0_db, +[](double v) { return fmt_double(v); }) + "\n";
    s += "n_symbols = " + std::to_string(n_symbols) + "\n";
    s += "seeds = " + join(seeds, &fmt_u64) + "\n";
    s += "method = " + method + "\n";
    s += "window = " + std::to_string(window) + "\n";
    s += "out = " + out + "\n";
    return s;
}

void ExperimentConfig::validate() const {
    if (modulation != "qpsk" && modulation != "qam16")
        throw ConfigError("field 'modulation': expected qpsk or qam16, got '" + modulation + "'");
    for (double a : alpha)
        if (!(a >= 0.0 && a <= 1.0)) throw ConfigError("field 'alpha': must be in [0,1]");
    if (D < 1) throw ConfigError("field 'D': must be a positive integer");
    if (osf < 2) throw ConfigError("field 'osf': must be >= 2");
    for (double e : eta)
        if (!(e >= 0.0 && e < 1.0)) throw ConfigError("field 'eta': must be in [0,1)");
    if (!(split >= 0.0 && split <= 1.0)) throw ConfigError("field 'split': must be in [0,1]");
    if (n_symbols < 1) throw ConfigError("field 'n_symbols': must be positive");
    if (seeds.empty()) throw ConfigError("field 'seeds': must not be empty");
    if (method != "lower_bound" && method != "full" && method != "high_snr")
        throw ConfigError("field 'method': expected lower_bound, full or high_snr, got '" +
                          method + "'");
    if (window < 0) throw ConfigError("field 'window': must be >= 0");
    if (out.empty()) throw ConfigError("field 'out': must not be empty");
}

}  // namespace prunetx
