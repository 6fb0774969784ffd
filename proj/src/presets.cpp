#include "gssl/presets.hpp"

#include <stdexcept>

namespace gssl {

namespace {

Preset mixture_preset(std::string name, Eigen::MatrixXd C, double c_l, double c_u) {
    Preset p;
    p.name = std::move(name);
    p.kind = Preset::Kind::mixture;
    // Two balanced classes at +/- e_1, squared mean separation 4.
    p.model = opposite_means_model(100, 1.0, std::move(C), c_l, c_u);
    p.kernel = KernelFunction::gaussian();
    return p;
}

}  // namespace

Preset preset_by_name(const std::string& name) {
    const int p = 100;
    if (name == "fig2-left") return mixture_preset(name, Eigen::MatrixXd::Identity(p, p), 2.0, 10.0);
    if (name == "fig2-right") return mixture_preset(name, toeplitz_covariance(p, 0.1), 2.0, 10.0);
    if (name == "fig1-left") return mixture_preset(name, toeplitz_covariance(p, 0.1), 1.0, 8.0);
    if (name == "fig1-right") return mixture_preset(name, toeplitz_covariance(p, 0.1), 4.0, 8.0);
    if (name == "fig8") {
        Preset pr;
        pr.name = name;
        pr.kind = Preset::Kind::isotropic;
        pr.mu_norm_sq = {2.0, 4.0 / 3.0, 1.0};
        pr.c_l = 0.5;
        return pr;
    }
    if (name == "table1-case1" || name == "table1-case2") {
        Preset pr;
        pr.name = name;
        pr.kind = Preset::Kind::sbm;
        pr.sbm.n = 1000;
        pr.nl_ratio = 1.0 / 20.0;
        if (name == "table1-case1") {
            pr.sbm.q_in = 14.0 / pr.sbm.n;
            pr.sbm.q_out = 7.0 / pr.sbm.n;
        } else {
            pr.sbm.q_in = 35.0 / pr.sbm.n;
            pr.sbm.q_out = 15.0 / pr.sbm.n;
            pr.sbm.r_values = {0.3, 0.5, 1.0};
            pr.sbm.r_probs = {0.25, 0.5, 0.25};
        }
        return pr;
    }
    std::string names;
    for (const auto& n : preset_names()) names += (names.empty() ? "" : ", ") + n;
    throw std::invalid_argument("unknown preset '" + name + "' (available: " + names + ")");
}

std::vector<std::string> preset_names() {
    return {"fig1-left", "fig1-right", "fig2-left", "fig2-right",
            "fig8",      "table1-case1", "table1-case2"};
}

}  // namespace gssl
