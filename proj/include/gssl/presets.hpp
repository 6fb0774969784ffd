#pragma once
#include <string>
#include <vector>

#include "gssl/datagen.hpp"
#include "gssl/kernel.hpp"
#include "gssl/model.hpp"

namespace gssl {

/**
 * Named experiment setups so that every benchmark in the documentation is
 * runnable by name.  A preset is one of three kinds:
 *   - mixture:   Gaussian mixture model + kernel (theory + Monte Carlo),
 *   - isotropic: family of identity-covariance models indexed by ||mu||^2
 *                (fixed-point accuracy comparisons),
 *   - sbm:       stochastic block model graph benchmark.
 */
struct Preset {
    enum class Kind { mixture, isotropic, sbm };

    std::string name;
    Kind kind = Kind::mixture;

    // kind == mixture
    MixtureModel model;
    KernelFunction kernel = KernelFunction::gaussian();

    // kind == isotropic: one curve per squared mean norm, shared c_l
    std::vector<double> mu_norm_sq;
    double c_l = 0.5;

    // kind == sbm
    SbmSpec sbm;
    double nl_ratio = 0.05;
};

/// Throws std::invalid_argument for unknown names.
Preset preset_by_name(const std::string& name);

std::vector<std::string> preset_names();

}  // namespace gssl
