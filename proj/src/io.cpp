#include "hartogs/io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hartogs/errors.hpp"

namespace hartogs {

void RunConfig::validate() const {
    if (radial_cells < 1) throw ConfigError("config: radial_cells must be >= 1");
    if (angular_count < 4) throw ConfigError("config: angular_count must be >= 4");
    if (!(eps_min > 0.0 && eps_min < 1.0)) throw ConfigError("config: eps_min must lie in (0,1)");
    if (!(grading > 0.0 && grading < 1.0)) throw ConfigError("config: grading must lie in (0,1)");
    if (format != "json" && format != "csv")
        throw ConfigError("config: format must be 'json' or 'csv'");
}

namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace

std::string RunConfig::fingerprint() const {
    std::string canon = "radial_cells=" + std::to_string(radial_cells) +
                        ";angular_count=" + std::to_string(angular_count) +
                        ";eps_min=" + format_double(eps_min) + ";grading=" +
                        format_double(grading) + ";seed=" + std::to_string(seed) +
                        ";output=" + output + ";format=" + format;
    return hex64(fnv1a(canon));
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();

    RunConfig cfg;
    bool blank = true;
    for (unsigned char c : text)
        if (!std::isspace(c)) {
            blank = false;
            break;
        }
    if (blank) return cfg;  // empty file keeps every default

    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: parse error: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config: top level must be an object");

    auto want_int = [&](const nlohmann::json& v, const char* k) {
        if (!v.is_number_integer()) throw ConfigError(std::string("config: ") + k + " must be an integer");
        return v.get<long long>();
    };
    auto want_num = [&](const nlohmann::json& v, const char* k) {
        if (!v.is_number()) throw ConfigError(std::string("config: ") + k + " must be a number");
        return v.get<double>();
    };
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        const std::string& k = it.key();
        const nlohmann::json& v = it.value();
        if (k == "radial_cells")
            cfg.radial_cells = static_cast<int>(want_int(v, "radial_cells"));
        else if (k == "angular_count")
            cfg.angular_count = static_cast<int>(want_int(v, "angular_count"));
        else if (k == "eps_min")
            cfg.eps_min = want_num(v, "eps_min");
        else if (k == "grading")
            cfg.grading = want_num(v, "grading");
        else if (k == "seed") {
            if (!v.is_number_integer() || v.get<long long>() < 0)
                throw ConfigError("config: seed must be a nonnegative integer");
            cfg.seed = v.get<std::uint64_t>();
        } else if (k == "output") {
            if (!v.is_string()) throw ConfigError("config: output must be a string");
            cfg.output = v.get<std::string>();
        } else if (k == "format") {
            if (!v.is_string()) throw ConfigError("config: format must be a string");
            cfg.format = v.get<std::string>();
        } else {
            throw ConfigError("config: unknown key '" + k + "'");
        }
    }
    cfg.validate();
    return cfg;
}

std::string format_double(double v) {
    if (!std::isfinite(v)) throw EvaluationError("format_double: non-finite value");
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// JsonWriter
// ---------------------------------------------------------------------------

void JsonWriter::before_value() {
    if (key_pending_) {
        key_pending_ = false;
        return;
    }
    if (!has_items_.empty()) {
        if (has_items_.back()) out_ += ',';
        has_items_.back() = true;
    }
}

JsonWriter& JsonWriter::begin_object() {
    before_value();
    out_ += '{';
    has_items_.push_back(false);
    ++depth_;
    return *this;
}

JsonWriter& JsonWriter::end_object() {
    out_ += '}';
    has_items_.pop_back();
    --depth_;
    return *this;
}

JsonWriter& JsonWriter::begin_array() {
    before_value();
    out_ += '[';
    has_items_.push_back(false);
    ++depth_;
    return *this;
}

JsonWriter& JsonWriter::end_array() {
    out_ += ']';
    has_items_.pop_back();
    --depth_;
    return *this;
}

namespace {
std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}
}  // namespace

JsonWriter& JsonWriter::key(const std::string& k) {
    if (has_items_.empty()) throw ConfigError("JsonWriter: key outside object");
    if (has_items_.back()) out_ += ',';
    has_items_.back() = true;
    out_ += '"';
    out_ += json_escape(k);
    out_ += "\":";
    key_pending_ = true;
    return *this;
}

JsonWriter& JsonWriter::value_string(const std::string& s) {
    before_value();
    out_ += '"';
    out_ += json_escape(s);
    out_ += '"';
    return *this;
}

JsonWriter& JsonWriter::value_double(double v) {
    before_value();
    out_ += format_double(v);
    return *this;
}

JsonWriter& JsonWriter::value_int(long long v) {
    before_value();
    out_ += std::to_string(v);
    return *this;
}

JsonWriter& JsonWriter::value_uint(std::uint64_t v) {
    before_value();
    out_ += std::to_string(v);
    return *this;
}

JsonWriter& JsonWriter::value_bool(bool v) {
    before_value();
    out_ += v ? "true" : "false";
    return *this;
}

JsonWriter& JsonWriter::value_raw(const std::string& token) {
    before_value();
    out_ += token;
    return *this;
}

JsonWriter& JsonWriter::field(const std::string& k, const Rat& q) {
    key(k).begin_object();
    key("num").value_raw(rat_to_string(numerator(q)));
    key("den").value_raw(rat_to_string(denominator(q)));
    return end_object();
}

// ---------------------------------------------------------------------------
// CsvWriter
// ---------------------------------------------------------------------------

namespace {
std::string csv_cell(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}
}  // namespace

CsvWriter::CsvWriter(std::vector<std::string> header) : width_(header.size()) {
    if (header.empty()) throw ConfigError("CsvWriter: empty header");
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) out_ += ',';
        out_ += csv_cell(header[i]);
    }
    out_ += '\n';
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != width_) throw ConfigError("CsvWriter: row width mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out_ += ',';
        out_ += csv_cell(cells[i]);
    }
    out_ += '\n';
}

// ---------------------------------------------------------------------------
// Point and expression parsing
// ---------------------------------------------------------------------------

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        std::string tok = text.substr(pos, comma == std::string::npos ? comma : comma - pos);
        std::size_t used = 0;
        double v;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            throw ConfigError("cannot parse number '" + tok + "'");
        }
        while (used < tok.size() && std::isspace(static_cast<unsigned char>(tok[used]))) ++used;
        if (used != tok.size()) throw ConfigError("cannot parse number '" + tok + "'");
        out.push_back(v);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

cd parse_point_1c(const std::string& text) {
    std::vector<double> v = parse_double_list(text);
    if (v.size() != 2) throw ConfigError("point must be 're,im', got '" + text + "'");
    return {v[0], v[1]};
}

Point2 parse_point_2c(const std::string& text) {
    std::vector<double> v = parse_double_list(text);
    if (v.size() != 4)
        throw ConfigError("point must be 'z1re,z1im,z2re,z2im', got '" + text + "'");
    return {{v[0], v[1]}, {v[2], v[3]}};
}

namespace {

struct ExprParser {
    const std::string& s;
    std::size_t pos = 0;

    explicit ExprParser(const std::string& text) : s(text) {}

    void skip() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eat(char c) {
        skip();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& what) {
        throw ConfigError("expression: " + what + " at position " + std::to_string(pos) +
                          " in '" + s + "'");
    }

    long long integer() {
        skip();
        std::size_t start = pos;
        if (pos < s.size() && (s[pos] == '-' || s[pos] == '+')) ++pos;
        std::size_t digits = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos == digits) fail("expected integer");
        return std::stoll(s.substr(start, pos - start));
    }

    SymbolicFunction pow_fn(const SymbolicFunction& base, long long e) {
        if (e >= 0) {
            SymbolicFunction acc = SymbolicFunction::constant(GaussianRational{Rat(1), Rat(0)});
            for (long long i = 0; i < e; ++i) acc = acc * base;
            return acc;
        }
        if (base.terms().size() != 1)
            fail("negative power needs a single-monomial base");
        const Monomial& m = base.terms()[0];
        GaussianRational one{Rat(1), Rat(0)};
        Monomial inv{one / m.coeff, -m.a, -m.b, -m.c, -m.d};
        SymbolicFunction ibase{{inv}};
        SymbolicFunction acc = SymbolicFunction::constant(one);
        for (long long i = 0; i < -e; ++i) acc = acc * ibase;
        return acc;
    }

    SymbolicFunction atom() {
        skip();
        if (pos >= s.size()) fail("unexpected end");
        char c = s[pos];
        if (c == '(') {
            ++pos;
            SymbolicFunction inner = expr();
            if (!eat(')')) fail("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            long long num = integer();
            Rat q(num);
            if (eat('/')) {
                long long den = integer();
                if (den == 0) fail("zero denominator");
                q /= den;
            }
            return SymbolicFunction::constant(GaussianRational{q, Rat(0)});
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = pos;
            while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])))) ++pos;
            std::string name = s.substr(start, pos - start);
            GaussianRational one{Rat(1), Rat(0)};
            if (name == "i") return SymbolicFunction::constant(GaussianRational{Rat(0), Rat(1)});
            if (name == "z1") return SymbolicFunction::monomial(one, 1, 0, 0, 0);
            if (name == "z2" || name == "w") return SymbolicFunction::monomial(one, 0, 1, 0, 0);
            if (name == "z1b") return SymbolicFunction::monomial(one, 0, 0, 1, 0);
            if (name == "z2b" || name == "wb") return SymbolicFunction::monomial(one, 0, 0, 0, 1);
            fail("unknown symbol '" + name + "'");
        }
        fail("unexpected character");
    }

    SymbolicFunction factor() {
        SymbolicFunction base = atom();
        skip();
        if (eat('^')) return pow_fn(base, integer());
        return base;
    }

    SymbolicFunction term() {
        SymbolicFunction acc = factor();
        for (;;) {
            skip();
            if (eat('*'))
                acc = acc * factor();
            else
                return acc;
        }
    }

    SymbolicFunction expr() {
        skip();
        bool neg = false;
        if (eat('-')) neg = true;
        SymbolicFunction acc = term();
        if (neg) acc = acc.scaled(GaussianRational{Rat(-1), Rat(0)});
        for (;;) {
            skip();
            if (eat('+'))
                acc = acc + term();
            else if (eat('-'))
                acc = acc - term();
            else
                return acc;
        }
    }
};

}  // namespace

SymbolicFunction parse_function(const std::string& text) {
    ExprParser p(text);
    SymbolicFunction f = p.expr();
    p.skip();
    if (p.pos != text.size())
        throw ConfigError("expression: trailing input at position " + std::to_string(p.pos) +
                          " in '" + text + "'");
    return f;
}

}  // namespace hartogs
