#include "plateau/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

namespace plateau {

ConfigError::ConfigError(const std::string& message, std::string source, int line, int column)
    : std::runtime_error([&] {
          std::ostringstream os;
          os << source << ':' << line << ':' << column << ": " << message;
          return os.str();
      }()),
      message_(message),
      source_(std::move(source)),
      line_(line),
      column_(column) {}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

bool valid_key(std::string_view key) {
    return !key.empty() && std::all_of(key.begin(), key.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
    });
}

std::string normalize_key(std::string_view key) {
    std::string k(key);
    std::replace(k.begin(), k.end(), '-', '_');
    return k;
}

// Value text after '=': quoted string, [list], or bare text up to a comment.
// Returns the unquoted text; `offset` is the 0-based column of the value.
std::string parse_value(std::string_view line, std::size_t offset, const std::string& source, int line_no) {
    std::string_view rest = line.substr(offset);
    std::size_t lead = 0;
    while (lead < rest.size() && std::isspace(static_cast<unsigned char>(rest[lead]))) {
        ++lead;
    }
    rest.remove_prefix(lead);
    const int col = static_cast<int>(offset + lead) + 1;
    auto fail = [&](const std::string& m, int c) { throw ConfigError(m, source, line_no, c); };
    auto tail_ok = [&](std::string_view tail, int c) {
        tail = trim(tail);
        if (!tail.empty() && tail.front() != '#') {
            fail("unexpected text after value", c);
        }
    };
    if (rest.empty() || rest.front() == '#') {
        fail("missing value", col);
    }
    if (rest.front() == '"' || rest.front() == '\'') {
        const char quote = rest.front();
        const auto end = rest.find(quote, 1);
        if (end == std::string_view::npos) {
            fail("unterminated string", col);
        }
        tail_ok(rest.substr(end + 1), col + static_cast<int>(end) + 1);
        return std::string(rest.substr(1, end - 1));
    }
    if (rest.front() == '[') {
        const auto end = rest.find(']');
        if (end == std::string_view::npos) {
            fail("unterminated list", col);
        }
        tail_ok(rest.substr(end + 1), col + static_cast<int>(end) + 1);
        std::string out;
        std::string_view body = rest.substr(1, end - 1);
        std::size_t start = 0;
        while (start <= body.size()) {
            auto comma = body.find(',', start);
            if (comma == std::string_view::npos) {
                comma = body.size();
            }
            auto item = trim(body.substr(start, comma - start));
            if (item.size() >= 2 && (item.front() == '"' || item.front() == '\'') && item.back() == item.front()) {
                item = item.substr(1, item.size() - 2);
            }
            if (!item.empty()) {
                if (!out.empty()) {
                    out += ',';
                }
                out += item;
            }
            start = comma + 1;
        }
        return out;
    }
    const auto hash = rest.find('#');
    return std::string(trim(rest.substr(0, hash)));
}

double to_double(std::string_view text, bool& ok) {
    text = trim(text);
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    ok = res.ec == std::errc() && res.ptr == text.data() + text.size() && !text.empty();
    return v;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        out.push_back(trim(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return out;
}

}  // namespace

std::vector<double> parse_number_list(std::string_view text) {
    std::vector<double> out;
    text = trim(text);
    if (text.size() >= 2 && text.front() == '[' && text.back() == ']') {
        text = trim(text.substr(1, text.size() - 2));
    }
    if (text.empty()) {
        return out;
    }
    for (auto item : split(text, ',')) {
        bool ok = false;
        const double v = to_double(item, ok);
        if (!ok) {
            throw std::invalid_argument("not a number: '" + std::string(item) + "'");
        }
        out.push_back(v);
    }
    return out;
}

RawConfig parse_config_text(std::string_view text, const std::string& source) {
    RawConfig raw;
    int line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        std::string_view line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        ++line_no;
        start = end + 1;
        const auto body = trim(line);
        if (body.empty() || body.front() == '#') {
            continue;
        }
        const auto key_col = static_cast<int>(line.find(body.front())) + 1;
        if (body.front() == '[') {
            throw ConfigError("tables are not supported; use flat key = value lines", source, line_no, key_col);
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("expected key = value", source, line_no, key_col);
        }
        const auto key = trim(line.substr(0, eq));
        if (!valid_key(key)) {
            throw ConfigError("invalid key '" + std::string(key) + "'", source, line_no, key_col);
        }
        RawValue v;
        v.text = parse_value(line, eq + 1, source, line_no);
        v.source = source;
        v.line = line_no;
        std::size_t lead = eq + 1;
        while (lead < line.size() && std::isspace(static_cast<unsigned char>(line[lead]))) {
            ++lead;
        }
        v.column = static_cast<int>(lead) + 1;
        raw[normalize_key(key)] = std::move(v);
        if (end == text.size()) {
            break;
        }
    }
    return raw;
}

void apply_override(RawConfig& raw, std::string_view assignment, const std::string& source, int column) {
    std::string_view a = assignment;
    int offset = 0;
    if (a.substr(0, 2) == "--") {
        a.remove_prefix(2);
        offset = 2;
    }
    const auto eq = a.find('=');
    if (eq == std::string_view::npos) {
        throw ConfigError("expected --key=value", source, 1, column);
    }
    const auto key = a.substr(0, eq);
    if (!valid_key(key)) {
        throw ConfigError("invalid key '" + std::string(key) + "'", source, 1, column);
    }
    RawValue v;
    v.text = std::string(trim(a.substr(eq + 1)));
    v.source = source;
    v.line = 1;
    v.column = column + offset + static_cast<int>(eq) + 1;
    raw[normalize_key(key)] = std::move(v);
}

Domain parse_domain(std::string_view preset, int n_r, int n_phi) {
    preset = trim(preset);
    const auto space = preset.find_first_of(" \t:");
    const auto kind = preset.substr(0, space);
    const auto args_text = space == std::string_view::npos ? std::string_view{} : trim(preset.substr(space + 1));
    auto need = [&](std::size_t count) {
        const auto values = parse_number_list(args_text);
        if (values.size() != count) {
            throw std::invalid_argument("domain '" + std::string(kind) + "' takes " + std::to_string(count) +
                                        " parameter(s)");
        }
        for (double v : values) {
            if (!std::isfinite(v)) {
                throw std::invalid_argument("domain parameters must be finite");
            }
        }
        return values;
    };
    auto positive = [](double v, const char* what) {
        if (!(v > 0.0)) {
            throw std::invalid_argument(std::string(what) + " must be positive");
        }
    };
    if (kind == "disk") {
        const auto v = need(1);
        positive(v[0], "disk radius");
        return Domain::disk(v[0], n_r, n_phi);
    }
    if (kind == "ellipse") {
        const auto v = need(2);
        positive(v[0], "ellipse semi-axis");
        positive(v[1], "ellipse semi-axis");
        return Domain::ellipse(v[0], v[1], n_r, n_phi);
    }
    if (kind == "star") {
        const auto v = need(3);
        positive(v[0], "star base radius");
        if (v[2] < 1.0 || v[2] != std::floor(v[2])) {
            throw std::invalid_argument("star mode must be a positive integer");
        }
        return Domain::star(v[0], v[1], static_cast<int>(v[2]), n_r, n_phi);
    }
    if (kind == "interval") {
        const auto v = need(1);
        positive(v[0], "interval half-width");
        return Domain::interval(v[0], n_r);
    }
    if (kind == "fourier") {
        const auto parts = split(args_text, ';');
        if (parts.size() > 2 || parts[0].empty()) {
            throw std::invalid_argument("fourier domain takes 'a0,a1,...[;b1,b2,...]'");
        }
        auto cos_coeffs = parse_number_list(parts[0]);
        std::vector<double> sin_coeffs;
        if (parts.size() == 2) {
            sin_coeffs = parse_number_list(parts[1]);
            sin_coeffs.insert(sin_coeffs.begin(), 0.0);
        }
        const double base = cos_coeffs[0];
        return Domain{2, RadialProfile::fourier(std::move(cos_coeffs), std::move(sin_coeffs)), base, n_r, n_phi};
    }
    throw std::invalid_argument("unknown domain preset '" + std::string(kind) +
                                "' (disk, ellipse, star, interval, fourier)");
}

ContinuationSchedule parse_schedule(std::string_view text, ContinuationSchedule s) {
    for (auto part : split(text, ';')) {
        if (part.empty()) {
            continue;
        }
        const auto eq = part.find('=');
        if (eq == std::string_view::npos) {
            throw std::invalid_argument("schedule parts look like name=v1,v2,...");
        }
        const auto name = trim(part.substr(0, eq));
        const auto values = parse_number_list(part.substr(eq + 1));
        if (name == "t") {
            s.t_steps = values;
        } else if (name == "theta") {
            s.theta_steps = values;
        } else if (name == "eps" || name == "epsilon") {
            s.epsilon_steps = values;
        } else if (name == "bisections") {
            if (values.size() != 1 || values[0] != std::floor(values[0])) {
                throw std::invalid_argument("bisections takes one integer");
            }
            s.max_bisections = static_cast<int>(values[0]);
        } else {
            throw std::invalid_argument("unknown schedule ladder '" + std::string(name) + "'");
        }
    }
    s.validate();
    return s;
}

Domain RunConfig::make_domain() const { return parse_domain(domain, n_r, n_phi); }

CurvatureSpec RunConfig::make_spec() const { return parse_curvature(f, make_domain().dim); }

ContinuationSchedule RunConfig::make_schedule(const Domain& d, const CurvatureSpec& spec) const {
    auto defaults = ContinuationSchedule::defaults(d, spec);
    return schedule.empty() ? defaults : parse_schedule(schedule, defaults);
}

RunConfig build_config(const RawConfig& raw) {
    static const std::vector<std::string> known = {"domain", "f",    "sigma",       "grid",        "schedule",
                                                   "out",    "seed", "exec",        "sweep_sigma", "sweep_theta",
                                                   "oracle_radius",  "oracle_grids"};
    for (const auto& [key, v] : raw) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw ConfigError("unknown key '" + key + "'", v.source, v.line, v.column);
        }
    }
    RunConfig c;
    auto fail = [](const RawValue& v, const std::string& m) { throw ConfigError(m, v.source, v.line, v.column); };
    auto number = [&](const RawValue& v, const char* name) {
        bool ok = false;
        const double x = to_double(v.text, ok);
        if (!ok) {
            fail(v, std::string(name) + " must be a number, got '" + v.text + "'");
        }
        return x;
    };
    auto list = [&](const RawValue& v) {
        try {
            return parse_number_list(v.text);
        } catch (const std::exception& e) {
            fail(v, e.what());
        }
        return std::vector<double>{};
    };
    if (auto it = raw.find("sigma"); it != raw.end()) {
        c.sigma = number(it->second, "sigma");
        if (!(c.sigma > 0.0 && c.sigma < 1.0)) {
            fail(it->second, "sigma must lie in (0,1)");
        }
    }
    if (auto it = raw.find("grid"); it != raw.end()) {
        const auto v = list(it->second);
        if (v.empty() || v.size() > 2 || v[0] != std::floor(v[0]) || (v.size() == 2 && v[1] != std::floor(v[1]))) {
            fail(it->second, "grid takes NR or NR,NPHI (integers)");
        }
        c.n_r = static_cast<int>(v[0]);
        c.n_phi = v.size() == 2 ? static_cast<int>(v[1]) : 2 * c.n_r;
    }
    if (auto it = raw.find("domain"); it != raw.end()) {
        c.domain = it->second.text;
    }
    Domain d;
    try {
        d = c.make_domain();
        d.validate();
    } catch (const std::exception& e) {
        const auto it = raw.find("domain");
        const auto g = raw.find("grid");
        const auto& where = (std::string_view(e.what()).find("N_") != std::string_view::npos && g != raw.end())
                                ? g->second
                                : (it != raw.end() ? it->second : RawValue{c.domain, "defaults", 0, 0});
        fail(where, e.what());
    }
    if (auto it = raw.find("f"); it != raw.end()) {
        c.f = it->second.text;
    }
    CurvatureSpec spec = CurvatureSpec::mean(d.dim);
    try {
        spec = parse_curvature(c.f, d.dim);
    } catch (const std::exception& e) {
        const auto it = raw.find("f");
        fail(it != raw.end() ? it->second : RawValue{c.f, "defaults", 0, 0}, e.what());
    }
    if (auto it = raw.find("schedule"); it != raw.end()) {
        c.schedule = it->second.text;
        try {
            (void)c.make_schedule(d, spec);
        } catch (const std::exception& e) {
            fail(it->second, e.what());
        }
    }
    if (auto it = raw.find("out"); it != raw.end()) {
        if (it->second.text.empty()) {
            fail(it->second, "out must not be empty");
        }
        c.out = it->second.text;
    }
    if (auto it = raw.find("seed"); it != raw.end()) {
        const auto& t = it->second.text;
        std::uint64_t s = 0;
        const auto res = std::from_chars(t.data(), t.data() + t.size(), s);
        if (res.ec != std::errc() || res.ptr != t.data() + t.size() || t.empty()) {
            fail(it->second, "seed must be a non-negative integer");
        }
        c.seed = s;
    }
    if (auto it = raw.find("exec"); it != raw.end()) {
        if (it->second.text == "serial") {
            c.exec = Exec::serial;
        } else if (it->second.text == "openmp") {
            c.exec = Exec::openmp;
        } else {
            fail(it->second, "exec must be serial or openmp");
        }
    }
    auto sigma_list = [&](const char* key, std::vector<double>& dst, bool open_unit) {
        if (auto it = raw.find(key); it != raw.end()) {
            dst = list(it->second);
            for (double v : dst) {
                const bool ok = open_unit ? (v > 0.0 && v < 1.0) : (v >= 0.0 && v <= 1.0);
                if (!ok) {
                    fail(it->second, open_unit ? "sigma must lie in (0,1)" : "theta must lie in [0,1]");
                }
            }
        }
    };
    sigma_list("sweep_sigma", c.sweep_sigma, true);
    sigma_list("sweep_theta", c.sweep_theta, false);
    if (auto it = raw.find("oracle_radius"); it != raw.end()) {
        c.oracle_radius = number(it->second, "oracle_radius");
        if (!(c.oracle_radius > 0.0)) {
            fail(it->second, "oracle_radius must be positive");
        }
    }
    if (auto it = raw.find("oracle_grids"); it != raw.end()) {
        const auto v = list(it->second);
        if (v.size() < 3) {
            fail(it->second, "oracle_grids needs at least three grid levels");
        }
        c.oracle_grids.clear();
        for (double x : v) {
            if (x != std::floor(x) || x < 8) {
                fail(it->second, "oracle grid levels are integers N_r >= 8");
            }
            c.oracle_grids.push_back(static_cast<int>(x));
        }
    }
    return c;
}

}  // namespace plateau
