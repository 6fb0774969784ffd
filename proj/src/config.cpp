#include "gssl/config.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace gssl {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& text, const std::string& what) {
    size_t used = 0;
    double v;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument(what + ": not a number: '" + text + "'");
    }
    if (used != text.size()) throw std::invalid_argument(what + ": not a number: '" + text + "'");
    return v;
}

}  // namespace

bool ConfigFile::has(const std::string& section, const std::string& key) const {
    auto it = sections_.find(section);
    return it != sections_.end() && it->second.count(key) > 0;
}

const std::string& ConfigFile::get(const std::string& section, const std::string& key) const {
    auto it = sections_.find(section);
    if (it == sections_.end() || !it->second.count(key))
        throw std::out_of_range("config: missing key '" + key + "' in section [" + section + "]");
    return it->second.at(key);
}

double ConfigFile::get_double(const std::string& section, const std::string& key) const {
    return parse_double(get(section, key), "config key '" + key + "'");
}

long long ConfigFile::get_int(const std::string& section, const std::string& key) const {
    double v = get_double(section, key);
    long long i = static_cast<long long>(std::llround(v));
    if (std::abs(v - static_cast<double>(i)) > 1e-9)
        throw std::invalid_argument("config key '" + key + "': expected an integer, got '" +
                                    get(section, key) + "'");
    return i;
}

ConfigFile load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    ConfigFile cfg;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                         ": unterminated section header");
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected 'key = value'");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        // Inline comments: values never legitimately contain '#' or ';'.
        size_t cut = value.find_first_of("#;");
        if (cut != std::string::npos) value = trim(value.substr(0, cut));
        if (key.empty())
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": empty key");
        cfg.sections()[section][key] = value;
    }
    return cfg;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    if (trim(text).empty()) return out;  // blank input is an explicit empty list
    size_t start = 0;
    while (true) {
        size_t comma = text.find(',', start);
        std::string cell =
            trim(comma == std::string::npos ? text.substr(start) : text.substr(start, comma - start));
        if (cell.empty())
            throw std::invalid_argument("list entry: empty cell in '" + text + "'");
        out.push_back(parse_double(cell, "list entry"));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

std::vector<double> parse_grid(const std::string& text) {
    size_t c1 = text.find(':');
    if (c1 == std::string::npos) return {parse_double(trim(text), "grid value")};
    size_t c2 = text.find(':', c1 + 1);
    if (c2 == std::string::npos)
        throw std::invalid_argument("grid '" + text + "': expected start:stop:step or a value");
    double start = parse_double(trim(text.substr(0, c1)), "grid start");
    double stop = parse_double(trim(text.substr(c1 + 1, c2 - c1 - 1)), "grid stop");
    double step = parse_double(trim(text.substr(c2 + 1)), "grid step");
    if (step <= 0.0) throw std::invalid_argument("grid '" + text + "': step must be positive");
    if (stop < start) throw std::invalid_argument("grid '" + text + "': stop below start");
    std::vector<double> out;
    // i*step avoids accumulating addition error; the half-step slack keeps
    // the endpoint when it lands on the grid up to rounding.
    for (int i = 0;; ++i) {
        double v = start + i * step;
        if (v > stop + step * 1e-9) break;
        out.push_back(v);
    }
    return out;
}

MixtureModel model_from_config(const ConfigFile& cfg, const std::string& section,
                               const MixtureModel* base) {
    MixtureModel m;
    if (base) {
        m = *base;
    } else {
        m = opposite_means_model(100, 1.0, Eigen::MatrixXd::Identity(100, 100), 2.0, 10.0);
    }
    bool p_changed = false;
    if (cfg.has(section, "p")) {
        int p = static_cast<int>(cfg.get_int(section, "p"));
        if (p < 1) throw std::invalid_argument("config: p must be >= 1");
        p_changed = p != m.p;
        m.p = p;
    }
    if (p_changed) {
        // Dimension changed: dependent defaults are re-derived unless the
        // section overrides them below.
        double entry = std::abs(m.mu1.size() ? m.mu1.cwiseAbs().maxCoeff() : 1.0);
        m.mu1 = Eigen::VectorXd::Zero(m.p);
        m.mu1(0) = -entry;
        m.mu2 = -m.mu1;
        m.C1 = Eigen::MatrixXd::Identity(m.p, m.p);
        m.C2 = m.C1;
    }
    if (cfg.has(section, "rho1")) {
        m.rho1 = cfg.get_double(section, "rho1");
        m.rho2 = 1.0 - m.rho1;
    }
    if (cfg.has(section, "mu")) {
        const std::string& spec = cfg.get(section, "mu");
        Eigen::VectorXd mu2 = Eigen::VectorXd::Zero(m.p);
        if (spec.rfind("opposite:", 0) == 0) {
            mu2(0) = parse_double(spec.substr(9), "mu");
        } else {
            std::vector<double> vals = parse_double_list(spec);
            if (static_cast<int>(vals.size()) > m.p)
                throw std::invalid_argument("config: mu has more entries than p");
            for (size_t i = 0; i < vals.size(); ++i) mu2(static_cast<int>(i)) = vals[i];
        }
        m.mu2 = mu2;
        m.mu1 = -mu2;
    }
    if (cfg.has(section, "C")) {
        const std::string& spec = cfg.get(section, "C");
        if (spec == "identity") {
            m.C1 = Eigen::MatrixXd::Identity(m.p, m.p);
        } else if (spec.rfind("toeplitz:", 0) == 0) {
            m.C1 = toeplitz_covariance(m.p, parse_double(spec.substr(9), "C"));
        } else {
            throw std::invalid_argument("config: C must be 'identity' or 'toeplitz:<r>', got '" +
                                        spec + "'");
        }
        m.C2 = m.C1;
    }
    if (cfg.has(section, "c_l")) m.c_l = cfg.get_double(section, "c_l");
    if (cfg.has(section, "c_u")) m.c_u = cfg.get_double(section, "c_u");
    m.validate();
    return m;
}

KernelFunction kernel_from_config(const ConfigFile& cfg, const std::string& section,
                                  const KernelFunction& base) {
    if (!cfg.has(section, "kernel")) return base;
    return KernelFunction::by_name(cfg.get(section, "kernel"));
}

SbmSpec sbm_from_config(const ConfigFile& cfg, const std::string& section, const SbmSpec& base) {
    SbmSpec s = base;
    if (cfg.has(section, "n")) s.n = static_cast<int>(cfg.get_int(section, "n"));
    if (cfg.has(section, "n1")) s.n1 = static_cast<int>(cfg.get_int(section, "n1"));
    if (cfg.has(section, "q_in")) s.q_in = cfg.get_double(section, "q_in");
    if (cfg.has(section, "q_out")) s.q_out = cfg.get_double(section, "q_out");
    if (cfg.has(section, "r_values")) s.r_values = parse_double_list(cfg.get(section, "r_values"));
    if (cfg.has(section, "r_probs")) s.r_probs = parse_double_list(cfg.get(section, "r_probs"));
    s.validate();
    return s;
}

}  // namespace gssl
