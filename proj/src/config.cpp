#include "vismem/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "vismem/errors.hpp"

namespace vismem {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

long parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        long x = std::stol(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (...) {
        throw ConfigError("bad integer for " + key + ": '" + v + "'");
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    try {
        // stoull wraps negatives silently; reject them up front
        if (!v.empty() && v[0] == '-') throw std::invalid_argument(v);
        std::size_t used = 0;
        std::uint64_t x = std::stoull(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (...) {
        throw ConfigError("bad seed for " + key + ": '" + v + "'");
    }
}

double parse_real(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (...) {
        throw ConfigError("bad number for " + key + ": '" + v + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("bad boolean for " + key + ": '" + v + "'");
}

std::vector<double> parse_real_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::istringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) throw ConfigError("empty element in list for " + key);
        out.push_back(parse_real(key, item));
    }
    if (out.empty()) throw ConfigError("empty list for " + key);
    return out;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream is(text);
    std::string line;
    long lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        std::string::size_type hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        std::string::size_type eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + " has no '='");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));

        if (key == "memory.n") cfg.memory.n = static_cast<int>(parse_int(key, val));
        else if (key == "memory.gamma_w") cfg.memory.gamma_w = parse_real(key, val);
        else if (key == "memory.gamma_r") cfg.memory.gamma_r = parse_real(key, val);
        else if (key == "memory.seed") cfg.memory.seed = parse_u64(key, val);
        else if (key == "encoder.kind") {
            if (val == "baseline-filter-bank")
                cfg.encoder.kind = EncoderSpec::Kind::baseline_filter_bank;
            else if (val == "external-features")
                cfg.encoder.kind = EncoderSpec::Kind::external_features;
            else
                throw ConfigError("unknown encoder.kind '" + val + "'");
        }
        else if (key == "encoder.c") cfg.encoder.c = static_cast<int>(parse_int(key, val));
        else if (key == "encoder.h") cfg.encoder.h = static_cast<int>(parse_int(key, val));
        else if (key == "encoder.w") cfg.encoder.w = static_cast<int>(parse_int(key, val));
        else if (key == "encoder.seed") cfg.encoder.seed = parse_u64(key, val);
        else if (key == "encoder.resize_w")
            cfg.encoder.resize_w = static_cast<int>(parse_int(key, val));
        else if (key == "encoder.resize_h")
            cfg.encoder.resize_h = static_cast<int>(parse_int(key, val));
        else if (key == "short_term.max_epochs")
            cfg.short_term.max_epochs = static_cast<int>(parse_int(key, val));
        else if (key == "short_term.acc_threshold")
            cfg.short_term.acc_threshold = parse_real(key, val);
        else if (key == "short_term.patience")
            cfg.short_term.patience = static_cast<int>(parse_int(key, val));
        else if (key == "eval.deltas") cfg.eval.deltas = parse_real_list(key, val);
        else if (key == "eval.category_threshold")
            cfg.eval.category_threshold = static_cast<int>(parse_int(key, val));
        else if (key == "eval.stride") cfg.eval.stride = static_cast<int>(parse_int(key, val));
        else if (key == "eval.pessimistic_ties")
            cfg.eval.pessimistic_ties = parse_bool(key, val);
        else if (key == "paths.input") cfg.paths.input = val;
        else if (key == "paths.output") cfg.paths.output = val;
        else if (key == "paths.memory_in") cfg.paths.memory_in = val;
        else if (key == "paths.memory_out") cfg.paths.memory_out = val;
        else if (key == "paths.density_out") cfg.paths.density_out = val;
        else if (key == "paths.labels") cfg.paths.labels = val;
        else throw ConfigError("unknown config key '" + key + "'");
    }
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config: " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_config_text(ss.str());
}

void validate_config(const RunConfig& cfg) {
    if (cfg.memory.n < 1) throw ConfigError("memory.n must be >= 1");
    if (!(cfg.memory.gamma_w > 0.0)) throw ConfigError("memory.gamma_w must be > 0");
    if (!(cfg.memory.gamma_r > 0.0)) throw ConfigError("memory.gamma_r must be > 0");
    if (cfg.encoder.c < 1 || cfg.encoder.h < 1 || cfg.encoder.w < 1)
        throw ConfigError("encoder dims must be >= 1");
    if (cfg.encoder.resize_w < 5 || cfg.encoder.resize_h < 5)
        throw ConfigError("encoder resize target below kernel size");
    if (cfg.encoder.h > cfg.encoder.resize_h || cfg.encoder.w > cfg.encoder.resize_w)
        throw ConfigError("encoder pooled dims exceed resize target");
    if (cfg.short_term.max_epochs < 1) throw ConfigError("short_term.max_epochs must be >= 1");
    if (cfg.short_term.patience < 1) throw ConfigError("short_term.patience must be >= 1");
    if (cfg.eval.deltas.empty()) throw ConfigError("eval.deltas must be nonempty");
    for (double d : cfg.eval.deltas)
        if (d < 1.0) throw ConfigError("eval.deltas entries must be >= 1");
    if (cfg.eval.category_threshold < 1)
        throw ConfigError("eval.category_threshold must be >= 1");
    if (cfg.eval.stride < 1) throw ConfigError("eval.stride must be >= 1");
}

std::string dump_config(const RunConfig& cfg) {
    std::ostringstream os;
    char buf[64];
    auto real = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    os << "memory.n = " << cfg.memory.n << '\n';
    os << "memory.gamma_w = " << real(cfg.memory.gamma_w) << '\n';
    os << "memory.gamma_r = " << real(cfg.memory.gamma_r) << '\n';
    os << "memory.seed = " << cfg.memory.seed << '\n';
    os << "encoder.kind = "
       << (cfg.encoder.kind == EncoderSpec::Kind::baseline_filter_bank
               ? "baseline-filter-bank"
               : "external-features")
       << '\n';
    os << "encoder.c = " << cfg.encoder.c << '\n';
    os << "encoder.h = " << cfg.encoder.h << '\n';
    os << "encoder.w = " << cfg.encoder.w << '\n';
    os << "encoder.seed = " << cfg.encoder.seed << '\n';
    os << "encoder.resize_w = " << cfg.encoder.resize_w << '\n';
    os << "encoder.resize_h = " << cfg.encoder.resize_h << '\n';
    os << "short_term.max_epochs = " << cfg.short_term.max_epochs << '\n';
    os << "short_term.acc_threshold = " << real(cfg.short_term.acc_threshold) << '\n';
    os << "short_term.patience = " << cfg.short_term.patience << '\n';
    os << "eval.deltas = ";
    for (std::size_t i = 0; i < cfg.eval.deltas.size(); ++i) {
        if (i) os << ',';
        os << real(cfg.eval.deltas[i]);
    }
    os << '\n';
    os << "eval.category_threshold = " << cfg.eval.category_threshold << '\n';
    os << "eval.stride = " << cfg.eval.stride << '\n';
    os << "eval.pessimistic_ties = " << (cfg.eval.pessimistic_ties ? "true" : "false")
       << '\n';
    if (!cfg.paths.input.empty()) os << "paths.input = " << cfg.paths.input << '\n';
    if (!cfg.paths.output.empty()) os << "paths.output = " << cfg.paths.output << '\n';
    if (!cfg.paths.memory_in.empty())
        os << "paths.memory_in = " << cfg.paths.memory_in << '\n';
    if (!cfg.paths.memory_out.empty())
        os << "paths.memory_out = " << cfg.paths.memory_out << '\n';
    if (!cfg.paths.density_out.empty())
        os << "paths.density_out = " << cfg.paths.density_out << '\n';
    if (!cfg.paths.labels.empty()) os << "paths.labels = " << cfg.paths.labels << '\n';
    return os.str();
}

}  // namespace vismem
