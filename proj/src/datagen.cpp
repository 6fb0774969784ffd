#include "gssl/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "gssl/rng.hpp"

namespace gssl {

namespace {

Eigen::MatrixXd clamped_sqrt(const Eigen::MatrixXd& C) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("covariance square root: eigendecomposition failed");
    const Eigen::ArrayXd lam = es.eigenvalues().array().max(1e-12);
    return es.eigenvectors() * lam.sqrt().matrix().asDiagonal() * es.eigenvectors().transpose();
}

template <typename T>
void fisher_yates(std::vector<T>& v, PhiloxRng& rng) {
    for (size_t i = v.size(); i > 1; --i)
        std::swap(v[i - 1], v[rng.uniform_below(static_cast<uint64_t>(i))]);
}

/// Make sure both classes appear among the first n_l entries of `order`
/// (indices into y) whenever the whole sample carries both.
void stratify_prefix(std::vector<int>& order, const std::vector<int>& y, int n_l) {
    if (n_l <= 0 || n_l >= static_cast<int>(order.size())) return;
    const int first = y[order[0]];
    bool mixed = false;
    for (int i = 1; i < n_l && !mixed; ++i) mixed = y[order[i]] != first;
    if (mixed) return;
    for (size_t j = n_l; j < order.size(); ++j) {
        if (y[order[j]] != first) {
            std::swap(order[n_l - 1], order[j]);
            return;
        }
    }
}

}  // namespace

MixtureSampler::MixtureSampler(const MixtureModel& model) : model_(model) {
    model_.validate();
    sqrt1_ = clamped_sqrt(model_.C1);
    sqrt2_ = model_.homoscedastic(0.0) ? sqrt1_ : clamped_sqrt(model_.C2);
}

SplitDataset MixtureSampler::sample(int n, uint64_t seed) const {
    if (n < 2) throw std::invalid_argument("sample_mixture: need n >= 2");
    const int n_l = model_.n_labeled();
    if (n_l < 1 || n_l >= n)
        throw std::invalid_argument("sample_mixture: labeled prefix " + std::to_string(n_l) +
                                    " incompatible with n = " + std::to_string(n));
    const int p = model_.p;
    PhiloxRng rng(seed);

    std::vector<int> y(n);
    for (int i = 0; i < n; ++i) y[i] = rng.uniform() < model_.rho1 ? -1 : 1;

    // order is exchangeable already; the explicit shuffle makes the labeled
    // prefix a uniformly random subset regardless of how y was produced
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    fisher_yates(order, rng);
    stratify_prefix(order, y, n_l);

    SplitDataset out;
    out.n_l = n_l;
    out.y.resize(n);
    out.X.resize(n, p);
    Eigen::VectorXd z(p);
    for (int row = 0; row < n; ++row) {
        const int cls = y[order[row]];
        out.y[row] = cls;
        for (int j = 0; j < p; ++j) z(j) = rng.normal();
        if (cls < 0)
            out.X.row(row) = (model_.mu1 + sqrt1_ * z).transpose();
        else
            out.X.row(row) = (model_.mu2 + sqrt2_ * z).transpose();
    }
    return out;
}

SplitDataset sample_mixture(const MixtureModel& model, int n, uint64_t seed) {
    return MixtureSampler(model).sample(n, seed);
}

void SbmSpec::validate() const {
    if (n < 2) throw std::invalid_argument("SBM: need n >= 2");
    const int k1 = n1 < 0 ? n / 2 : n1;
    if (k1 < 1 || k1 >= n) throw std::invalid_argument("SBM: class sizes must be positive");
    if (!(0.0 <= q_out && q_out <= q_in && q_in <= 1.0))
        throw std::invalid_argument("SBM: need 0 <= q_out <= q_in <= 1");
    if (r_values.size() != r_probs.size())
        throw std::invalid_argument("SBM: degree law values/probabilities length mismatch");
    if (!r_values.empty()) {
        double total = 0.0;
        for (double pr : r_probs) {
            if (pr < 0.0) throw std::invalid_argument("SBM: negative degree-law probability");
            total += pr;
        }
        if (std::abs(total - 1.0) > 1e-9)
            throw std::invalid_argument("SBM: degree-law probabilities must sum to 1");
        for (double r : r_values)
            if (!(r > 0.0 && r <= 1.0))
                throw std::invalid_argument("SBM: degree factors must lie in (0, 1]");
    }
}

SbmSample sample_sbm(const SbmSpec& spec, int n_l, uint64_t seed) {
    spec.validate();
    const int n = spec.n;
    if (n_l < 0 || n_l >= n)
        throw std::invalid_argument("sample_sbm: labeled prefix must satisfy 0 <= n_l < n");
    const int n1 = spec.n1 < 0 ? n / 2 : spec.n1;
    PhiloxRng rng(seed);

    // degree factors
    Eigen::VectorXd r = Eigen::VectorXd::Ones(n);
    if (!spec.r_values.empty()) {
        for (int i = 0; i < n; ++i) {
            double u = rng.uniform();
            size_t k = 0;
            while (k + 1 < spec.r_values.size() && u >= spec.r_probs[k]) {
                u -= spec.r_probs[k];
                ++k;
            }
            r(i) = spec.r_values[k];
        }
    }

    // class labels in generation order: first n1 vertices class -1
    std::vector<int> cls(n);
    for (int i = 0; i < n; ++i) cls[i] = i < n1 ? -1 : 1;

    std::vector<Eigen::Triplet<double>> edges;
    edges.reserve(static_cast<size_t>(1.2 * spec.q_in * n * n / 2.0) + 64);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double base = cls[i] == cls[j] ? spec.q_in : spec.q_out;
            if (rng.uniform() < r(i) * r(j) * base) {
                edges.emplace_back(i, j, 1.0);
                edges.emplace_back(j, i, 1.0);
            }
        }
    }

    // stratified labeled prefix: proportional share of each class, then the
    // remaining vertices in random order
    std::vector<int> pool1, pool2;
    for (int i = 0; i < n; ++i) (cls[i] < 0 ? pool1 : pool2).push_back(i);
    fisher_yates(pool1, rng);
    fisher_yates(pool2, rng);

    std::vector<int> order;
    order.reserve(n);
    if (n_l > 0) {
        int l1 = static_cast<int>(std::lround(double(n_l) * n1 / double(n)));
        l1 = std::clamp(l1, n_l == 1 ? 0 : 1, std::min(n_l, static_cast<int>(pool1.size())));
        const int l2 = n_l - l1;
        if (l2 > static_cast<int>(pool2.size()))
            throw std::invalid_argument("sample_sbm: labeled prefix larger than class 2");
        order.insert(order.end(), pool1.begin(), pool1.begin() + l1);
        order.insert(order.end(), pool2.begin(), pool2.begin() + l2);
        std::vector<int> rest(pool1.begin() + l1, pool1.end());
        rest.insert(rest.end(), pool2.begin() + l2, pool2.end());
        fisher_yates(rest, rng);
        // labeled block itself shuffled so classes are interleaved
        fisher_yates(order, rng);
        order.insert(order.end(), rest.begin(), rest.end());
    } else {
        order.insert(order.end(), pool1.begin(), pool1.end());
        order.insert(order.end(), pool2.begin(), pool2.end());
        fisher_yates(order, rng);
    }

    // new position of original vertex v
    std::vector<int> pos(n);
    for (int newi = 0; newi < n; ++newi) pos[order[newi]] = newi;

    Eigen::SparseMatrix<double> W(n, n);
    for (auto& t : edges) t = {pos[t.row()], pos[t.col()], 1.0};
    W.setFromTriplets(edges.begin(), edges.end());

    SbmSample out;
    out.graph = make_graph(W);
    out.n_l = n_l;
    out.y.resize(n);
    out.r.resize(n);
    for (int v = 0; v < n; ++v) {
        out.y[pos[v]] = cls[v];
        out.r(pos[v]) = r(v);
    }
    return out;
}

SplitDataset load_features_csv(const std::string& path, int n_l, int labels_column,
                               std::optional<uint64_t> shuffle_seed) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);

    std::vector<std::vector<double>> rows;
    std::string line;
    int row_no = 0;
    while (std::getline(in, line)) {
        ++row_no;
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                size_t used = 0;
                row.push_back(std::stod(cell, &used));
                while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used])))
                    ++used;
                if (used != cell.size()) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw std::runtime_error(path + ": non-numeric cell '" + cell + "' in row " +
                                         std::to_string(row_no));
            }
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw std::runtime_error(path + ": ragged row " + std::to_string(row_no) + " (" +
                                     std::to_string(row.size()) + " cells, expected " +
                                     std::to_string(rows.front().size()) + ")");
        rows.push_back(std::move(row));
    }
    const int n = static_cast<int>(rows.size());
    if (n == 0) throw std::runtime_error(path + ": no data rows");
    const int width = static_cast<int>(rows.front().size());
    if (labels_column >= width)
        throw std::invalid_argument(path + ": labels column " + std::to_string(labels_column) +
                                    " out of range for " + std::to_string(width) + " columns");
    if (n_l < 0 || n_l >= n)
        throw std::invalid_argument("load_features_csv: need 0 <= n_l < n; got n_l = " +
                                    std::to_string(n_l) + ", n = " + std::to_string(n));

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    if (shuffle_seed) {
        PhiloxRng rng(*shuffle_seed);
        fisher_yates(order, rng);
    }

    SplitDataset out;
    out.n_l = n_l;
    const int p = labels_column >= 0 ? width - 1 : width;
    if (p < 1) throw std::runtime_error(path + ": no feature columns left");
    out.X.resize(n, p);
    if (labels_column >= 0) out.y.resize(n);
    for (int i = 0; i < n; ++i) {
        const auto& row = rows[order[i]];
        int c = 0;
        for (int j = 0; j < width; ++j) {
            if (j == labels_column) {
                const double v = row[j];
                if (v != std::floor(v))
                    throw std::runtime_error(path + ": non-integer label in row " +
                                             std::to_string(order[i] + 1));
                out.y[i] = static_cast<int>(v);
            } else {
                out.X(i, c++) = row[j];
            }
        }
    }
    return out;
}

void write_features_csv(const SplitDataset& data, const std::string& path, bool include_labels) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out.precision(17);
    const bool labels = include_labels && !data.y.empty();
    for (Eigen::Index i = 0; i < data.X.rows(); ++i) {
        for (Eigen::Index j = 0; j < data.X.cols(); ++j) {
            if (j) out << ',';
            out << data.X(i, j);
        }
        if (labels) out << ',' << data.y[static_cast<size_t>(i)];
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failure on " + path);
}

}  // namespace gssl
