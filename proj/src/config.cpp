#include "netdetect/config.hpp"

#include "netdetect/errors.hpp"

#include <sstream>

namespace netdetect {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Drops a trailing `# comment` that is not inside a quoted string.
std::string strip_comment(const std::string& line) {
    bool quoted = false;
    for (std::size_t k = 0; k < line.size(); ++k) {
        if (line[k] == '"' && (k == 0 || line[k - 1] != '\\')) quoted = !quoted;
        if (line[k] == '#' && !quoted) return line.substr(0, k);
    }
    return line;
}

int bracket_balance(const std::string& s) {
    int depth = 0;
    bool quoted = false;
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (s[k] == '"' && (k == 0 || s[k - 1] != '\\')) quoted = !quoted;
        if (quoted) continue;
        if (s[k] == '[') ++depth;
        if (s[k] == ']') --depth;
    }
    return depth;
}

}  // namespace

Json parse_config_value(const std::string& text) {
    const std::string v = trim(text);
    if (v.empty()) throw InvalidArgument("empty value");
    auto parsed = Json::parse(v, nullptr, false);
    if (!parsed.is_discarded()) return parsed;
    if (v.front() == '"' || v.front() == '[') throw InvalidArgument("malformed value: " + v);
    return Json(v);
}

Json parse_config(const std::string& text) {
    Json doc = Json::object();
    doc[""] = Json::object();
    std::string section;
    std::istringstream in(text);
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']' && line.find('=') == std::string::npos) {
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty() || section.find('.') != std::string::npos || section.front() == '[') {
                throw InvalidArgument("line " + std::to_string(lineno) + ": sections are one level deep");
            }
            if (!doc.contains(section)) doc[section] = Json::object();
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw InvalidArgument("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        while (bracket_balance(value) > 0) {
            if (!std::getline(in, raw)) throw InvalidArgument("line " + std::to_string(lineno) + ": unterminated array");
            ++lineno;
            value += " " + trim(strip_comment(raw));
        }
        if (key.empty()) throw InvalidArgument("line " + std::to_string(lineno) + ": missing key");
        if (doc[section].contains(key)) {
            throw InvalidArgument("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        }
        try {
            doc[section][key] = parse_config_value(value);
        } catch (const InvalidArgument& e) {
            throw InvalidArgument("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return doc;
}

std::string render_config(const Json& doc) {
    std::ostringstream os;
    auto emit = [&](const Json& table) {
        for (const auto& [key, value] : table.items()) os << key << " = " << value.dump() << '\n';
    };
    if (doc.contains("")) emit(doc.at(""));
    for (const auto& [name, table] : doc.items()) {
        if (name.empty()) continue;
        os << '\n' << '[' << name << "]\n";
        emit(table);
    }
    return os.str();
}

}  // namespace netdetect
