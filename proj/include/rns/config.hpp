#pragma once

// Experiment configuration: a small TOML-style reader (tables, scalars,
// arrays, comments) plus the schema mapping tables onto system descriptors,
// base processes, and run parameters. Numeric parameters accept exact
// rational strings "p/q" so that exactness survives configuration.

#include "rns/base_process.hpp"
#include "rns/system.hpp"

#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace rns {

struct config_error : std::runtime_error {
    config_error(int line_, const std::string& msg)
        : std::runtime_error("config:" + std::to_string(line_) + ": " + msg), line(line_) {}
    int line;
};

struct TomlValue {
    enum class Kind : std::uint8_t { Integer, Float, String, Boolean, Array };
    Kind kind = Kind::Integer;
    long long int_v = 0;
    double float_v = 0.0;
    std::string str_v;
    bool bool_v = false;
    std::vector<TomlValue> array_v;
    int line = 0;
};

using TomlTable = std::map<std::string, TomlValue>;

struct TomlDoc {
    std::map<std::string, TomlTable> tables;
    std::map<std::string, int> table_lines;
};

namespace toml_detail {

inline void skip_ws(const std::string& s, std::size_t& i) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
}

inline TomlValue parse_value(const std::string& s, std::size_t& i, int line);

inline TomlValue parse_scalar(const std::string& s, std::size_t& i, int line) {
    TomlValue v;
    v.line = line;
    skip_ws(s, i);
    if (i >= s.size()) throw config_error(line, "missing value");
    if (s[i] == '"') {
        ++i;
        std::string out;
        while (i < s.size() && s[i] != '"') {
            if (s[i] == '\\' && i + 1 < s.size()) ++i;
            out.push_back(s[i++]);
        }
        if (i >= s.size()) throw config_error(line, "unterminated string");
        ++i;
        v.kind = TomlValue::Kind::String;
        v.str_v = std::move(out);
        return v;
    }
    std::size_t start = i;
    while (i < s.size() && s[i] != ',' && s[i] != ']' && s[i] != '#') ++i;
    std::string tok = s.substr(start, i - start);
    while (!tok.empty() && (tok.back() == ' ' || tok.back() == '\t')) tok.pop_back();
    if (tok.empty()) throw config_error(line, "missing value");
    if (tok == "true" || tok == "false") {
        v.kind = TomlValue::Kind::Boolean;
        v.bool_v = tok == "true";
        return v;
    }
    if (tok.find_first_of(".eE") != std::string::npos &&
        tok.find_first_not_of("+-0123456789.eE") == std::string::npos) {
        try {
            v.float_v = std::stod(tok);
        } catch (...) {
            throw config_error(line, "bad number '" + tok + "'");
        }
        v.kind = TomlValue::Kind::Float;
        return v;
    }
    if (tok.find_first_not_of("+-0123456789") == std::string::npos) {
        try {
            v.int_v = std::stoll(tok);
        } catch (...) {
            throw config_error(line, "bad integer '" + tok + "'");
        }
        v.kind = TomlValue::Kind::Integer;
        return v;
    }
    throw config_error(line, "unrecognized value '" + tok + "'");
}

inline TomlValue parse_value(const std::string& s, std::size_t& i, int line) {
    skip_ws(s, i);
    if (i < s.size() && s[i] == '[') {
        TomlValue v;
        v.kind = TomlValue::Kind::Array;
        v.line = line;
        ++i;
        for (;;) {
            skip_ws(s, i);
            if (i < s.size() && s[i] == ']') {
                ++i;
                break;
            }
            v.array_v.push_back(parse_value(s, i, line));
            skip_ws(s, i);
            if (i < s.size() && s[i] == ',') {
                ++i;
                continue;
            }
            if (i < s.size() && s[i] == ']') {
                ++i;
                break;
            }
            throw config_error(line, "expected ',' or ']' in array");
        }
        return v;
    }
    return parse_scalar(s, i, line);
}

}  // namespace toml_detail

inline TomlDoc parse_toml(const std::string& text) {
    TomlDoc doc;
    std::istringstream in(text);
    std::string raw;
    std::string current;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        // strip comment (strings in this schema never contain '#')
        std::string s = raw;
        if (const auto pos = s.find('#'); pos != std::string::npos) s = s.substr(0, pos);
        std::size_t i = 0;
        toml_detail::skip_ws(s, i);
        if (i >= s.size() || s[i] == '\r') continue;
        if (s[i] == '[') {
            const auto close = s.find(']', i);
            if (close == std::string::npos) throw config_error(line, "unterminated table header");
            current = s.substr(i + 1, close - i - 1);
            if (current.empty()) throw config_error(line, "empty table name");
            doc.tables[current];
            doc.table_lines.emplace(current, line);
            continue;
        }
        const auto eq = s.find('=', i);
        if (eq == std::string::npos) throw config_error(line, "expected 'key = value'");
        std::string key = s.substr(i, eq - i);
        while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
        if (key.empty()) throw config_error(line, "empty key");
        if (current.empty()) throw config_error(line, "key outside of a [table]");
        std::size_t vi = eq + 1;
        TomlValue v = toml_detail::parse_value(s, vi, line);
        toml_detail::skip_ws(s, vi);
        if (vi < s.size() && s[vi] != '\r')
            throw config_error(line, "trailing characters after value");
        doc.tables[current][key] = std::move(v);
    }
    return doc;
}

// ---------------------------------------------------------------------------
// schema
// ---------------------------------------------------------------------------

enum class BackendChoice : std::uint8_t { Rational, Float };
enum class AmbiguityPolicy : std::uint8_t { Error, Escalate };
enum class OutputFormat : std::uint8_t { Csv, Json };

struct BaseSpecConfig {
    BaseKind kind = BaseKind::Singleton;
    std::vector<long long> symbols;
    std::vector<mpq_class> weights;
    long long singleton_symbol = 0;

    BaseProcess build() const {
        switch (kind) {
            case BaseKind::Bernoulli: return BaseProcess::bernoulli(symbols, weights);
            case BaseKind::Periodic: return BaseProcess::periodic(symbols);
            case BaseKind::Singleton: return BaseProcess::singleton(singleton_symbol);
        }
        throw std::logic_error("BaseSpecConfig: bad kind");
    }
};

struct RunConfig {
    long n = 1000;
    long trials = 100;
    std::uint64_t seed = 0;
    bool seed_set = false;
    unsigned precision_digits = 64;
    BackendChoice backend = BackendChoice::Rational;
    AmbiguityPolicy ambiguity = AmbiguityPolicy::Error;
    long escalate_max_bits = 16384;
    long s_cap = 0;  // 0 = automatic
    double sigma = 0.0;
    bool sigma_set = false;
    long cells_cap = 64;
    long oracle_level = 5;
    long trial = 0;
    unsigned threads = 1;
};

struct OutputConfig {
    std::string dir = "out";
    OutputFormat format = OutputFormat::Csv;
};

struct ExperimentConfig {
    SystemDescriptor system_t;
    std::optional<SystemDescriptor> system_s;
    BaseSpecConfig base_t;
    BaseSpecConfig base_s;
    RunConfig run;
    OutputConfig output;
    std::string raw_text;  // echoed into every report
};

namespace config_detail {

inline const TomlValue& require(const TomlTable& t, const std::string& key, int table_line) {
    const auto it = t.find(key);
    if (it == t.end()) throw config_error(table_line, "missing key '" + key + "'");
    return it->second;
}

inline long long as_int(const TomlValue& v, const std::string& key) {
    if (v.kind != TomlValue::Kind::Integer)
        throw config_error(v.line, "'" + key + "' must be an integer");
    return v.int_v;
}

inline std::string as_string(const TomlValue& v, const std::string& key) {
    if (v.kind != TomlValue::Kind::String)
        throw config_error(v.line, "'" + key + "' must be a string");
    return v.str_v;
}

inline mpq_class parse_mpq(const std::string& s, int line) {
    try {
        mpq_class q;
        if (q.set_str(s, 10) != 0) throw std::invalid_argument("parse");
        q.canonicalize();
        return q;
    } catch (...) {
        throw config_error(line, "bad rational '" + s + "' (expected \"p/q\")");
    }
}

// rational-valued entry: integer, float (exact double value), or "p/q" string
inline mpq_class as_mpq(const TomlValue& v, const std::string& key) {
    switch (v.kind) {
        case TomlValue::Kind::Integer: return mpq_class(static_cast<long>(v.int_v));
        case TomlValue::Kind::Float: return mpq_class(v.float_v);
        case TomlValue::Kind::String: return parse_mpq(v.str_v, v.line);
        default: throw config_error(v.line, "'" + key + "' must be a number or \"p/q\"");
    }
}

inline BetaSpec as_beta(const TomlValue& v, const std::string& key) {
    if (v.kind == TomlValue::Kind::String && v.str_v == "golden_ratio")
        return BetaSpec::golden_ratio();
    if (v.kind == TomlValue::Kind::Float) return BetaSpec::double_value(v.float_v);
    return BetaSpec::exact_value(as_mpq(v, key));
}

inline std::vector<TomlValue> as_array(const TomlValue& v, const std::string& key) {
    if (v.kind != TomlValue::Kind::Array)
        throw config_error(v.line, "'" + key + "' must be an array");
    return v.array_v;
}

inline SystemDescriptor parse_system(const TomlTable& t, int table_line) {
    const std::string kind = as_string(require(t, "kind", table_line), "kind");
    try {
        if (kind == "integer_base") {
            std::vector<long> bases;
            for (const auto& b : as_array(require(t, "bases", table_line), "bases"))
                bases.push_back(static_cast<long>(as_int(b, "bases")));
            return SystemDescriptor::integer_base(std::move(bases));
        }
        if (kind == "gls") {
            std::vector<mpq_class> sizes;
            for (const auto& q : as_array(require(t, "sizes", table_line), "sizes"))
                sizes.push_back(as_mpq(q, "sizes"));
            std::vector<int> orient;
            if (const auto it = t.find("orientations"); it != t.end())
                for (const auto& o : as_array(it->second, "orientations"))
                    orient.push_back(static_cast<int>(as_int(o, "orientations")));
            return SystemDescriptor::gls(std::move(sizes), std::move(orient));
        }
        if (kind == "beta") return SystemDescriptor::beta(as_beta(require(t, "beta", table_line), "beta"));
        if (kind == "gauss") return SystemDescriptor::gauss();
        if (kind == "renyi") return SystemDescriptor::renyi();
        if (kind == "gauss_renyi") return SystemDescriptor::gauss_renyi();
        if (kind == "beta_family") {
            std::vector<BetaSpec> word;
            for (const auto& b : as_array(require(t, "word", table_line), "word"))
                word.push_back(as_beta(b, "word"));
            return SystemDescriptor::beta_family(std::move(word));
        }
    } catch (const config_error&) {
        throw;
    } catch (const std::exception& e) {
        throw config_error(table_line, e.what());
    }
    throw config_error(table_line, "unknown system kind '" + kind + "'");
}

inline BaseSpecConfig parse_base(const TomlTable& t, int table_line,
                                 const SystemDescriptor& sys) {
    BaseSpecConfig out;
    const std::string kind = as_string(require(t, "kind", table_line), "kind");
    const auto default_symbols = sys.symbols();
    try {
        if (kind == "bernoulli") {
            out.kind = BaseKind::Bernoulli;
            if (const auto it = t.find("symbols"); it != t.end())
                for (const auto& s : as_array(it->second, "symbols"))
                    out.symbols.push_back(as_int(s, "symbols"));
            else
                out.symbols = default_symbols;
            for (const auto& w : as_array(require(t, "weights", table_line), "weights"))
                out.weights.push_back(as_mpq(w, "weights"));
        } else if (kind == "periodic") {
            out.kind = BaseKind::Periodic;
            if (const auto it = t.find("word"); it != t.end())
                for (const auto& s : as_array(it->second, "word"))
                    out.symbols.push_back(as_int(s, "word"));
            else
                out.symbols = default_symbols;
        } else if (kind == "singleton") {
            out.kind = BaseKind::Singleton;
            if (const auto it = t.find("symbol"); it != t.end())
                out.singleton_symbol = as_int(it->second, "symbol");
            else if (default_symbols.size() == 1)
                out.singleton_symbol = default_symbols[0];
            else
                throw config_error(table_line, "singleton base needs an explicit 'symbol'");
        } else {
            throw config_error(table_line, "unknown base kind '" + kind + "'");
        }
        out.build();  // validate eagerly
        // every referenced symbol must belong to the system
        const auto accepted = sys.symbols();
        auto known = [&accepted](long long s) {
            for (long long a : accepted)
                if (a == s) return true;
            return false;
        };
        if (out.kind == BaseKind::Singleton) {
            if (!known(out.singleton_symbol))
                throw config_error(table_line, "base symbol not accepted by the system");
        } else {
            for (long long s : out.symbols)
                if (!known(s)) throw config_error(table_line, "base symbol not accepted by the system");
        }
    } catch (const config_error&) {
        throw;
    } catch (const std::exception& e) {
        throw config_error(table_line, e.what());
    }
    return out;
}

}  // namespace config_detail

inline ExperimentConfig parse_config(const std::string& text) {
    const TomlDoc doc = parse_toml(text);
    auto table_line = [&](const std::string& name) {
        const auto it = doc.table_lines.find(name);
        return it == doc.table_lines.end() ? 0 : it->second;
    };
    const auto sys_t_it = doc.tables.find("system_t");
    if (sys_t_it == doc.tables.end()) throw config_error(0, "missing [system_t] table");
    ExperimentConfig cfg;
    cfg.raw_text = text;
    cfg.system_t = config_detail::parse_system(sys_t_it->second, table_line("system_t"));
    if (const auto it = doc.tables.find("system_s"); it != doc.tables.end())
        cfg.system_s = config_detail::parse_system(it->second, table_line("system_s"));

    if (const auto it = doc.tables.find("base_t"); it != doc.tables.end())
        cfg.base_t = config_detail::parse_base(it->second, table_line("base_t"), cfg.system_t);
    else if (cfg.system_t.deterministic()) {
        cfg.base_t.kind = BaseKind::Singleton;
        cfg.base_t.singleton_symbol = cfg.system_t.symbols()[0];
    } else {
        throw config_error(0, "missing [base_t] table for a random system");
    }
    if (cfg.system_s) {
        if (const auto it = doc.tables.find("base_s"); it != doc.tables.end())
            cfg.base_s = config_detail::parse_base(it->second, table_line("base_s"), *cfg.system_s);
        else if (cfg.system_s->deterministic()) {
            cfg.base_s.kind = BaseKind::Singleton;
            cfg.base_s.singleton_symbol = cfg.system_s->symbols()[0];
        } else {
            throw config_error(0, "missing [base_s] table for a random system");
        }
    }

    const auto run_it = doc.tables.find("run");
    if (run_it == doc.tables.end()) throw config_error(0, "missing [run] table");
    const TomlTable& run = run_it->second;
    const int run_line = table_line("run");
    using config_detail::as_int;
    using config_detail::as_string;
    cfg.run.n = static_cast<long>(as_int(config_detail::require(run, "n", run_line), "n"));
    if (cfg.run.n < 1) throw config_error(run_line, "'n' must be >= 1");
    if (const auto it = run.find("trials"); it != run.end()) {
        cfg.run.trials = static_cast<long>(as_int(it->second, "trials"));
        if (cfg.run.trials < 1) throw config_error(it->second.line, "'trials' must be >= 1");
    }
    if (const auto it = run.find("seed"); it != run.end()) {
        cfg.run.seed = static_cast<std::uint64_t>(as_int(it->second, "seed"));
        cfg.run.seed_set = true;
    } else {
        throw config_error(run_line, "missing 'seed' (no wall-clock default)");
    }
    if (const auto it = run.find("precision_digits"); it != run.end()) {
        const long long p = as_int(it->second, "precision_digits");
        if (p < 1) throw config_error(it->second.line, "'precision_digits' must be >= 1");
        cfg.run.precision_digits = static_cast<unsigned>(p);
    }
    if (const auto it = run.find("backend"); it != run.end()) {
        const std::string b = as_string(it->second, "backend");
        if (b == "rational")
            cfg.run.backend = BackendChoice::Rational;
        else if (b == "float")
            cfg.run.backend = BackendChoice::Float;
        else
            throw config_error(it->second.line, "backend must be \"rational\" or \"float\"");
    }
    if (const auto it = run.find("ambiguity"); it != run.end()) {
        const std::string a = as_string(it->second, "ambiguity");
        if (a == "error")
            cfg.run.ambiguity = AmbiguityPolicy::Error;
        else if (a == "escalate")
            cfg.run.ambiguity = AmbiguityPolicy::Escalate;
        else
            throw config_error(it->second.line, "ambiguity must be \"error\" or \"escalate\"");
    }
    if (const auto it = run.find("escalate_max_bits"); it != run.end())
        cfg.run.escalate_max_bits = static_cast<long>(as_int(it->second, "escalate_max_bits"));
    if (const auto it = run.find("s_cap"); it != run.end())
        cfg.run.s_cap = static_cast<long>(as_int(it->second, "s_cap"));
    if (const auto it = run.find("sigma"); it != run.end()) {
        cfg.run.sigma = config_detail::as_mpq(it->second, "sigma").get_d();
        cfg.run.sigma_set = true;
    }
    if (const auto it = run.find("cells_cap"); it != run.end())
        cfg.run.cells_cap = static_cast<long>(as_int(it->second, "cells_cap"));
    if (const auto it = run.find("oracle_level"); it != run.end())
        cfg.run.oracle_level = static_cast<long>(as_int(it->second, "oracle_level"));
    if (const auto it = run.find("trial"); it != run.end())
        cfg.run.trial = static_cast<long>(as_int(it->second, "trial"));
    if (const auto it = run.find("threads"); it != run.end())
        cfg.run.threads = static_cast<unsigned>(as_int(it->second, "threads"));

    if (const auto it = doc.tables.find("output"); it != doc.tables.end()) {
        if (const auto d = it->second.find("dir"); d != it->second.end())
            cfg.output.dir = as_string(d->second, "dir");
        if (const auto f = it->second.find("format"); f != it->second.end()) {
            const std::string fmt = as_string(f->second, "format");
            if (fmt == "csv")
                cfg.output.format = OutputFormat::Csv;
            else if (fmt == "json")
                cfg.output.format = OutputFormat::Json;
            else
                throw config_error(f->second.line, "format must be \"csv\" or \"json\"");
        }
    }
    return cfg;
}

}  // namespace rns
