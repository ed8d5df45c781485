#include <fstream>
#include <sstream>

#include "tabmax/errors.hpp"
#include "tabmax/string_analysis.hpp"

namespace tabmax {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

IndicatorConfig load_indicator_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config file");

    IndicatorConfig cfg = IndicatorConfig::defaults();
    std::string section;
    std::string line;
    int line_no = 0;
    bool constants_cleared = false;

    auto set_for = [&cfg](const std::string& name) -> std::set<std::string>* {
        if (name == "sql_keywords") return &cfg.sql_keywords;
        if (name == "ps_keywords") return &cfg.ps_keywords;
        if (name == "suspicious_keywords") return &cfg.suspicious_keywords;
        if (name == "suspicious_apis") return &cfg.suspicious_apis;
        if (name == "content_types") return &cfg.content_types;
        return nullptr;
    };

    std::set<std::string> seen_sections;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[' && line.back() == ']') {
            section = trim(line.substr(1, line.size() - 2));
            if (section != "constants" && section != "options" && !set_for(section)) {
                throw ConfigError(path + ":" + std::to_string(line_no) +
                                  ": unknown section [" + section + "]");
            }
            // A section named in the file replaces the built-in default set.
            if (auto* set = set_for(section); set && !seen_sections.count(section)) set->clear();
            if (section == "constants" && !constants_cleared) {
                cfg.known_constants.clear();
                constants_cleared = true;
            }
            seen_sections.insert(section);
            continue;
        }
        if (section.empty()) {
            throw ConfigError(path + ":" + std::to_string(line_no) + ": entry before any [section]");
        }

        if (section == "constants") {
            std::size_t eq = line.find('=');
            if (eq == std::string::npos) {
                throw ConfigError(path + ":" + std::to_string(line_no) + ": expected name=hexvalue");
            }
            std::string name = trim(line.substr(0, eq));
            std::string value = trim(line.substr(eq + 1));
            try {
                cfg.known_constants.emplace_back(name, std::stoull(value, nullptr, 16));
            } catch (const std::exception&) {
                throw ConfigError(path + ":" + std::to_string(line_no) + ": bad hex value '" +
                                  value + "'");
            }
        } else if (section == "options") {
            std::size_t eq = line.find('=');
            if (eq == std::string::npos) {
                throw ConfigError(path + ":" + std::to_string(line_no) + ": expected key=value");
            }
            std::string key = trim(line.substr(0, eq));
            std::string value = trim(line.substr(eq + 1));
            try {
                if (key == "min_string_len") {
                    cfg.min_string_len = std::stoul(value);
                } else if (key == "min_base64_len") {
                    cfg.min_base64_len = std::stoul(value);
                } else if (key == "sql_baseline") {
                    cfg.sql_baseline_path = value;
                } else if (key == "ps1_baseline") {
                    cfg.ps1_baseline_path = value;
                } else {
                    throw ConfigError(path + ":" + std::to_string(line_no) + ": unknown option '" +
                                      key + "'");
                }
            } catch (const ConfigError&) {
                throw;
            } catch (const std::exception&) {
                throw ConfigError(path + ":" + std::to_string(line_no) + ": bad numeric value '" +
                                  value + "'");
            }
        } else {
            set_for(section)->insert(line);
        }
    }

    if (cfg.min_string_len < 1) cfg.min_string_len = 1;
    return cfg;
}

}  // namespace tabmax
