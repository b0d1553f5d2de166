#include "web4/specfile.hpp"

#include "web4/errors.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace web4 {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(int line, const std::string& msg) {
    throw WebError(ErrorKind::invalid_spec, "line " + std::to_string(line) + ": " + msg);
}

/// Strips a trailing comment that is not inside quotes.
std::string_view strip_comment(std::string_view s) {
    char quote = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        if (quote) {
            if (c == quote) quote = 0;
        } else if (c == '"' || c == '\'') {
            quote = c;
        } else if (c == '#') {
            return s.substr(0, i);
        }
    }
    return s;
}

std::string unquote(std::string_view v, int line) {
    if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') && v.back() == v.front()) {
        return std::string(v.substr(1, v.size() - 2));
    }
    if (!v.empty() && (v.front() == '"' || v.front() == '\'')) fail(line, "unterminated string");
    return std::string(v);
}

std::vector<std::string> list_items(std::string_view v, std::size_t count, int line,
                                    const std::string& key) {
    if (v.size() < 2 || v.front() != '[' || v.back() != ']') {
        fail(line, key + " must be a bracketed list like [" + std::string(count == 4 ? "0, 1, 0, 1" : "9, 9") + "]");
    }
    std::vector<std::string> items;
    std::string_view body = v.substr(1, v.size() - 2);
    while (true) {
        const auto comma = body.find(',');
        items.emplace_back(trim(body.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        body = body.substr(comma + 1);
    }
    if (items.size() != count) {
        fail(line, key + " needs " + std::to_string(count) + " entries, got " +
                       std::to_string(items.size()));
    }
    return items;
}

long parse_integer(std::string_view v, int line, const std::string& key) {
    long out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) fail(line, key + " must be an integer");
    return out;
}

Expr parse_formula(const std::string& text, int line, const std::string& key) {
    try {
        return parse(text);
    } catch (const ParseError& e) {
        fail(line, key + ": " + e.what());
    }
}

}  // namespace

SpecFile parse_spec_file(std::string_view text) {
    SpecFile out;
    std::map<std::string, std::pair<std::string, int>> entries;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        const auto line = trim(strip_comment(raw));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) fail(line_no, "expected 'key = value'");
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) fail(line_no, "missing key before '='");
        if (value.empty()) fail(line_no, "missing value for " + key);
        static const char* known[] = {"u1", "u2", "u3", "u4", "a", "domain", "grid", "order", "backend", "epsilon"};
        if (std::find(std::begin(known), std::end(known), key) == std::end(known)) {
            fail(line_no, "unknown key '" + key + "'");
        }
        if (!entries.emplace(key, std::make_pair(value, line_no)).second) {
            fail(line_no, "duplicate key '" + key + "'");
        }
    }

    for (int k = 0; k < 3; ++k) {
        const std::string key = "u" + std::to_string(k + 1);
        const auto it = entries.find(key);
        if (it == entries.end()) fail(line_no, "missing required key " + key);
        out.source_u[k] = unquote(it->second.first, it->second.second);
        out.spec.u[k] = parse_formula(out.source_u[k], it->second.second, key);
    }
    const bool has_u4 = entries.count("u4") > 0;
    const bool has_a = entries.count("a") > 0;
    if (has_u4 == has_a) fail(line_no, "exactly one of u4 or a is required");
    {
        const std::string key = has_u4 ? "u4" : "a";
        const auto& [value, line] = entries.at(key);
        out.source_fourth = unquote(value, line);
        out.spec.fourth = parse_formula(out.source_fourth, line, key);
        out.spec.fourth_kind = has_u4 ? FourthKind::potential : FourthKind::synthetic;
    }
    if (const auto it = entries.find("domain"); it != entries.end()) {
        const auto items = list_items(it->second.first, 4, it->second.second, "domain");
        for (const auto& item : items) {
            try {
                (void)rational_from_decimal(item);
            } catch (const std::invalid_argument& e) {
                fail(it->second.second, std::string("domain: ") + e.what());
            }
        }
        out.spec.domain = {items[0], items[1], items[2], items[3]};
    }
    if (const auto it = entries.find("grid"); it != entries.end()) {
        const auto items = list_items(it->second.first, 2, it->second.second, "grid");
        out.grid.nx = static_cast<int>(parse_integer(items[0], it->second.second, "grid"));
        out.grid.ny = static_cast<int>(parse_integer(items[1], it->second.second, "grid"));
        if (out.grid.nx < 1 || out.grid.ny < 1) fail(it->second.second, "grid entries must be positive");
    }
    if (const auto it = entries.find("order"); it != entries.end()) {
        out.spec.order = static_cast<int>(parse_integer(it->second.first, it->second.second, "order"));
    }
    if (const auto it = entries.find("epsilon"); it != entries.end()) {
        try {
            out.spec.epsilon = rational_from_decimal(it->second.first).get_d();
        } catch (const std::invalid_argument& e) {
            fail(it->second.second, std::string("epsilon: ") + e.what());
        }
        if (!(out.spec.epsilon > 0.0)) fail(it->second.second, "epsilon must be positive");
    }
    if (const auto it = entries.find("backend"); it != entries.end()) {
        try {
            out.spec.backend = backend_from_string(unquote(it->second.first, it->second.second));
        } catch (const std::invalid_argument& e) {
            fail(it->second.second, e.what());
        }
        out.backend_given = true;
    } else {
        out.spec.backend = out.spec.all_rational() ? Backend::rational : Backend::floating;
    }
    out.spec.validate();
    return out;
}

SpecFile load_spec_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw WebError(ErrorKind::invalid_spec, "cannot read spec file " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_spec_file(buf.str());
}

}  // namespace web4
