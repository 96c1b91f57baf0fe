// config.hpp — key-value config files with [sections], model loading/saving,
// matrix CSV serialization ("re,im" pairs, row-major)

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "sbl/errors.hpp"
#include "sbl/model.hpp"

namespace sbl {

class ConfigFile {
public:
    using Section = std::map<std::string, std::string>;

    static ConfigFile parse_string(const std::string& text) {
        ConfigFile cfg;
        std::istringstream in(text);
        std::string line, section;
        while (std::getline(in, line)) {
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[' && line.back() == ']') {
                section = trim(line.substr(1, line.size() - 2));
                cfg.sections_[section];
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError("config line without '=': " + line);
            cfg.sections_[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
        }
        return cfg;
    }

    static ConfigFile parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file: " + path);
        std::ostringstream ss;
        ss << in.rdbuf();
        return parse_string(ss.str());
    }

    bool has(const std::string& section, const std::string& key) const {
        auto s = sections_.find(section);
        return s != sections_.end() && s->second.count(key) > 0;
    }

    std::string get_string(const std::string& section, const std::string& key) const {
        auto s = sections_.find(section);
        if (s == sections_.end() || !s->second.count(key))
            throw ConfigError("missing config key [" + section + "] " + key);
        std::string v = s->second.at(key);
        if (v.size() >= 2 && v.front() == '"' && v.back() == '"')
            v = v.substr(1, v.size() - 2);
        return v;
    }

    double get_double(const std::string& section, const std::string& key) const {
        return std::stod(get_string(section, key));
    }

    double get_double_or(const std::string& section, const std::string& key,
                         double fallback) const {
        return has(section, key) ? get_double(section, key) : fallback;
    }

    long get_int(const std::string& section, const std::string& key) const {
        return std::stol(get_string(section, key));
    }

    long get_int_or(const std::string& section, const std::string& key, long fallback) const {
        return has(section, key) ? get_int(section, key) : fallback;
    }

    std::string get_string_or(const std::string& section, const std::string& key,
                              const std::string& fallback) const {
        return has(section, key) ? get_string(section, key) : fallback;
    }

    // [a, b, c] or bare comma-separated numbers
    std::vector<double> get_list(const std::string& section, const std::string& key) const {
        std::string v = get_string(section, key);
        if (!v.empty() && v.front() == '[') v = v.substr(1, v.size() - 2);
        std::vector<double> out;
        std::istringstream ss(v);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            tok = trim(tok);
            if (!tok.empty()) out.push_back(std::stod(tok));
        }
        return out;
    }

    void set(const std::string& section, const std::string& key, const std::string& value) {
        sections_[section][key] = value;
    }

    std::string serialize() const {
        std::ostringstream out;
        for (const auto& [name, sec] : sections_) {
            out << "[" << name << "]\n";
            for (const auto& [k, v] : sec) out << k << " = " << v << "\n";
            out << "\n";
        }
        return out.str();
    }

    const std::map<std::string, Section>& sections() const { return sections_; }

private:
    static std::string trim(const std::string& s) {
        const auto b = s.find_first_not_of(" \t\r\n");
        if (b == std::string::npos) return "";
        const auto e = s.find_last_not_of(" \t\r\n");
        return s.substr(b, e - b + 1);
    }

    std::map<std::string, Section> sections_;
};

// --------------------------- matrix CSV round-trip ----------------------------

// Row-major CSV of "re,im" pairs: row i is re(i,0),im(i,0),re(i,1),im(i,1),...
inline std::string matrix_to_csv(const Eigen::MatrixXcd& m) {
    std::ostringstream out;
    out.precision(17);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out << ",";
            out << m(i, j).real() << "," << m(i, j).imag();
        }
        out << "\n";
    }
    return out.str();
}

inline Eigen::MatrixXcd matrix_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::vector<Complex>> rows;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        std::vector<double> vals;
        std::istringstream ls(line);
        std::string tok;
        while (std::getline(ls, tok, ',')) vals.push_back(std::stod(tok));
        if (vals.size() % 2 != 0)
            throw ConfigError("matrix CSV row has an odd number of fields");
        std::vector<Complex> row;
        for (std::size_t k = 0; k < vals.size(); k += 2)
            row.emplace_back(vals[k], vals[k + 1]);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ConfigError("matrix CSV is empty");
    Eigen::MatrixXcd m(rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows[0].size())
            throw ConfigError("matrix CSV rows have unequal lengths");
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
    return m;
}

// ------------------------------ model config ----------------------------------

// Sections: [system] eigenvalues, degeneracy_tol, optional eigenbasis (path);
// [coupling] matrix (inline, ';' between rows) or path; [density] kind +
// parameters; [dynamics] lambda, kappa_re, kappa_im, alpha.
inline SpinBosonModel model_from_config(const ConfigFile& cfg,
                                        const std::string& base_dir = ".") {
    auto levels = cfg.get_list("system", "eigenvalues");
    SystemSpec sys = SystemSpec::from_levels(levels,
                                             cfg.get_double_or("system", "degeneracy_tol", 1e-9));
    if (cfg.has("system", "eigenbasis")) {
        std::ifstream in(base_dir + "/" + cfg.get_string("system", "eigenbasis"));
        if (!in) throw ConfigError("cannot open eigenbasis file");
        std::ostringstream ss;
        ss << in.rdbuf();
        sys.eigenbasis = matrix_from_csv(ss.str());
        sys.validate();
    }

    CouplingMatrix coupling;
    if (cfg.has("coupling", "matrix")) {
        std::string lit = cfg.get_string("coupling", "matrix");
        for (auto& c : lit)
            if (c == ';') c = '\n';
        coupling.entries = matrix_from_csv(lit);
    } else {
        std::ifstream in(base_dir + "/" + cfg.get_string("coupling", "path"));
        if (!in) throw ConfigError("cannot open coupling matrix file");
        std::ostringstream ss;
        ss << in.rdbuf();
        coupling.entries = matrix_from_csv(ss.str());
    }

    const std::string kind = cfg.get_string("density", "kind");
    SpectralDensity density = SpectralDensity::zero();
    if (kind == "analytic") {
        density = SpectralDensity::analytic(cfg.get_double("density", "gamma"),
                                            cfg.get_double("density", "omega_c"),
                                            cfg.get_double("density", "amplitude"),
                                            cfg.get_double_or("density", "omega_max", 0.0));
    } else if (kind == "tabulated") {
        std::ifstream in(base_dir + "/" + cfg.get_string("density", "path"));
        if (!in) throw ConfigError("cannot open density table");
        std::vector<double> grid, values;
        double w, j;
        char comma;
        std::string line;
        while (std::getline(in, line)) {
            std::istringstream ls(line);
            if (ls >> w >> comma >> j) {
                grid.push_back(w);
                values.push_back(j);
            }
        }
        density = SpectralDensity::tabulated(std::move(grid), std::move(values));
    } else if (kind == "zero") {
        density = SpectralDensity::zero(cfg.get_double_or("density", "omega_max", 1.0));
    } else {
        throw ConfigError("unknown density kind: " + kind);
    }

    return build_model(std::move(sys), std::move(coupling), std::move(density),
                       cfg.get_double("dynamics", "lambda"),
                       Complex(cfg.get_double_or("dynamics", "kappa_re", 0.0),
                               cfg.get_double_or("dynamics", "kappa_im", 0.0)),
                       cfg.get_double_or("dynamics", "alpha", 1.0));
}

inline ConfigFile model_to_config(const SpinBosonModel& m) {
    ConfigFile cfg;
    std::ostringstream lv;
    lv.precision(17);
    lv << "[";
    for (int i = 0; i < m.dim(); ++i) lv << (i ? ", " : "") << m.system.eigenvalues[i];
    lv << "]";
    cfg.set("system", "eigenvalues", lv.str());
    std::ostringstream tol;
    tol.precision(17);
    tol << m.system.degeneracy_tol;
    cfg.set("system", "degeneracy_tol", tol.str());

    std::string csv = matrix_to_csv(m.coupling.entries);
    for (auto& c : csv)
        if (c == '\n') c = ';';
    if (!csv.empty() && csv.back() == ';') csv.pop_back();
    cfg.set("coupling", "matrix", csv);

    std::ostringstream num;
    num.precision(17);
    if (m.density.is_analytic()) {
        cfg.set("density", "kind", "analytic");
        num << m.density.gamma();
        cfg.set("density", "gamma", num.str());
        num.str("");
        num << m.density.omega_c();
        cfg.set("density", "omega_c", num.str());
        num.str("");
        num << m.density.amplitude();
        cfg.set("density", "amplitude", num.str());
        num.str("");
        num << m.density.omega_max();
        cfg.set("density", "omega_max", num.str());
    } else {
        cfg.set("density", "kind", "zero");
        num << m.density.omega_max();
        cfg.set("density", "omega_max", num.str());
    }

    num.str("");
    num << m.lambda;
    cfg.set("dynamics", "lambda", num.str());
    num.str("");
    num << m.kappa.real();
    cfg.set("dynamics", "kappa_re", num.str());
    num.str("");
    num << m.kappa.imag();
    cfg.set("dynamics", "kappa_im", num.str());
    num.str("");
    num << m.alpha;
    cfg.set("dynamics", "alpha", num.str());
    return cfg;
}

} // namespace sbl
