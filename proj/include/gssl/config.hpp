#pragma once
#include <map>
#include <string>
#include <vector>

#include "gssl/datagen.hpp"
#include "gssl/kernel.hpp"
#include "gssl/model.hpp"

namespace gssl {

/**
 * Plain-text configuration: `key = value` lines grouped under `[section]`
 * headers, with `#`/`;` comments.  Keys before any header land in the ""
 * section.  Sections are conventionally named after presets so one file can
 * adjust several experiments.
 */
class ConfigFile {
public:
    ConfigFile() = default;

    bool has(const std::string& section, const std::string& key) const;
    /// Raw string value; throws std::out_of_range when missing.
    const std::string& get(const std::string& section, const std::string& key) const;
    double get_double(const std::string& section, const std::string& key) const;
    long long get_int(const std::string& section, const std::string& key) const;

    const std::map<std::string, std::map<std::string, std::string>>& sections() const {
        return sections_;
    }
    std::map<std::string, std::map<std::string, std::string>>& sections() { return sections_; }

private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
};

/// Parses a config file; malformed lines raise errors naming the line number.
ConfigFile load_config_file(const std::string& path);

/**
 * Builds a mixture model from a config section.  Recognized keys:
 *   p        dimension (int)
 *   rho1     class-1 prior
 *   mu       either a comma-separated literal vector for mu2 (mu1 = -mu2),
 *            or "opposite:<v>" for mu2 = v*e_1
 *   C        "identity" or "toeplitz:<r>"
 *   c_l, c_u sample-to-dimension ratios
 * Unspecified keys keep the values of `base` (or of a default balanced
 * model when base is null).  The result is validated.
 */
MixtureModel model_from_config(const ConfigFile& cfg, const std::string& section,
                               const MixtureModel* base = nullptr);

/// Reads the "kernel" key ("gaussian" | "linear"); falls back to `base`.
KernelFunction kernel_from_config(const ConfigFile& cfg, const std::string& section,
                                  const KernelFunction& base);

/**
 * Builds an SBM spec from a section.  Keys: n, n1, q_in, q_out,
 * r_values / r_probs (comma-separated lists).  Missing keys keep `base`.
 */
SbmSpec sbm_from_config(const ConfigFile& cfg, const std::string& section, const SbmSpec& base);

/// Comma-separated list of doubles ("0.3,0.5,1").
std::vector<double> parse_double_list(const std::string& text);

/// "a:b:step" inclusive grid, or a single value "v".
std::vector<double> parse_grid(const std::string& text);

}  // namespace gssl
