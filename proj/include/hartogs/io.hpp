#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "hartogs/kernels.hpp"
#include "hartogs/rational.hpp"
#include "hartogs/symbolic.hpp"

namespace hartogs {

struct RunConfig {
    int radial_cells = 48;
    int angular_count = 96;
    double eps_min = 1e-5;
    double grading = 0.5;
    std::uint64_t seed = 0;
    std::string output;           // empty writes to stdout
    std::string format = "json";  // json | csv

    void validate() const;  // throws ConfigError
    std::string fingerprint() const;
};

// Missing or unreadable file -> ConfigError. Empty or whitespace-only file
// -> all defaults. Unknown keys, wrong types, or out-of-range values ->
// ConfigError with the offending key.
RunConfig load_config(const std::string& path);

// %.17g rendering used for every float in every output; rejects non-finite
// values so no report can contain inf/nan tokens.
std::string format_double(double v);

// Streaming JSON builder with insertion-ordered keys. All numbers go
// through format_double or exact integer spelling, so equal inputs produce
// byte-identical documents.
class JsonWriter {
  public:
    JsonWriter& begin_object();
    JsonWriter& end_object();
    JsonWriter& begin_array();
    JsonWriter& end_array();
    JsonWriter& key(const std::string& k);
    JsonWriter& value_string(const std::string& s);
    JsonWriter& value_double(double v);
    JsonWriter& value_int(long long v);
    JsonWriter& value_uint(std::uint64_t v);
    JsonWriter& value_bool(bool v);
    JsonWriter& value_raw(const std::string& token);  // preformatted number

    // field helpers: key + value
    JsonWriter& field(const std::string& k, const std::string& v) {
        return key(k).value_string(v);
    }
    // without this, string literals would fall into the bool overload
    JsonWriter& field(const std::string& k, const char* v) {
        return key(k).value_string(v);
    }
    JsonWriter& field(const std::string& k, double v) { return key(k).value_double(v); }
    JsonWriter& field(const std::string& k, int v) {
        return key(k).value_int(static_cast<long long>(v));
    }
    JsonWriter& field(const std::string& k, std::uint64_t v) { return key(k).value_uint(v); }
    JsonWriter& field(const std::string& k, bool v) { return key(k).value_bool(v); }
    // exact rational as {num, den} integer tokens
    JsonWriter& field(const std::string& k, const Rat& q);

    const std::string& str() const { return out_; }
    bool complete() const { return depth_ == 0 && !out_.empty(); }

  private:
    void before_value();
    std::string out_;
    std::vector<bool> has_items_;  // per open container
    int depth_ = 0;
    bool key_pending_ = false;
};

// Minimal CSV emitter with a fixed header; cells containing separators are
// quoted. Floats must be preformatted with format_double.
class CsvWriter {
  public:
    explicit CsvWriter(std::vector<std::string> header);
    void row(const std::vector<std::string>& cells);
    const std::string& str() const { return out_; }

  private:
    std::string out_;
    std::size_t width_;
};

// "re,im"
cd parse_point_1c(const std::string& text);
// "z1re,z1im,z2re,z2im"
Point2 parse_point_2c(const std::string& text);
std::vector<double> parse_double_list(const std::string& text);

// Symbolic function expressions:
//   expr   := ['-'] term (('+'|'-') term)*
//   term   := factor ('*' factor)*
//   factor := atom ['^' ['-'] integer]
//   atom   := rational | 'i' | variable | '(' expr ')'
//   rational := integer ['/' integer]
//   variable := z1 | z2 | z1b | z2b | w | wb
// w/wb alias the second slot (punctured-disc variable). Negative powers need
// a single-monomial base. Example: "1/2*z2^-1 + 3*z1*z2b^2".
SymbolicFunction parse_function(const std::string& text);

}  // namespace hartogs
