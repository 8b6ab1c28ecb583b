#include "epochgd/problems.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <memory>
#include <sstream>

#include "epochgd/errors.hpp"
#include "epochgd/projections.hpp"

namespace epochgd {

namespace {

Vec zeros_or(const Vec& v, int dim) {
    if (v.empty()) return Vec(static_cast<std::size_t>(dim), 0.0);
    if (v.size() != static_cast<std::size_t>(dim))
        throw DimensionMismatch(v.size(), static_cast<std::size_t>(dim));
    return v;
}

}  // namespace

Problem make_quadratic(const QuadraticConfig& config) {
    if (config.dim < 1) throw ZeroDimension();
    if (!(config.a > 0.0)) throw NonPositiveConstant("a");
    if (!(config.domain_radius > 0.0)) throw NonPositiveConstant("domain_radius");
    if (config.noise_sigma < 0.0) throw NonPositiveConstant("noise_sigma");
    if (config.noise_cap < 0.0) throw NonPositiveConstant("noise_cap");
    if (config.noise_sigma > 0.0 && !(config.noise_cap > 0.0))
        throw ConfigError("noise_sigma > 0 requires a positive noise_cap");

    const Vec x_star = zeros_or(config.x_star, config.dim);
    const Vec center = zeros_or(config.domain_center, config.dim);
    const double R = config.domain_radius;
    if (dist(x_star, center) > R) throw OptimumOutsideDomain();

    const double diam = 2.0 * R;
    const double m_floor = config.a * diam * diam;
    const double g_floor = 2.0 * config.a * diam + config.noise_cap;
    ProblemSpec spec;
    spec.dim = config.dim;
    spec.lambda_hk = config.a;
    spec.M = config.M == 0.0 ? m_floor : config.M;
    spec.G = config.G == 0.0 ? g_floor : config.G;
    if (spec.M < m_floor * (1.0 - 1e-12))
        throw ConfigError("M understates the value range a(2R)^2");
    if (spec.G < g_floor * (1.0 - 1e-12))
        throw ConfigError("G understates the gradient bound 2a(2R) + noise_cap");

    Problem p;
    p.spec = validate_problem(spec);
    p.domain = make_ball_domain(BallSpec{center, R});
    p.optimum = Optimum{x_star, 0.0};

    const double a = config.a;
    p.value = [a, x_star](const Vec& x) { return a * dist_sq(x, x_star); };
    p.subgradient_into = [a, x_star](const Vec& x, Vec& g) {
        require_same_dim(x, x_star);
        g.resize(x.size());
        for (std::size_t i = 0; i < x.size(); ++i)
            g[i] = 2.0 * a * (x[i] - x_star[i]);
    };

    const double sigma = config.noise_sigma;
    const double cap = config.noise_cap;
    if (sigma == 0.0) {
        p.stochastic_subgradient_into = [a, x_star](const Vec& x, Rng&, Vec& g) {
            require_same_dim(x, x_star);
            g.resize(x.size());
            for (std::size_t i = 0; i < x.size(); ++i)
                g[i] = 2.0 * a * (x[i] - x_star[i]);
        };
    } else {
        p.stochastic_subgradient_into = [a, x_star, sigma, cap](const Vec& x,
                                                                Rng& rng, Vec& g) {
            require_same_dim(x, x_star);
            const std::size_t d = x.size();
            g.resize(d);
            thread_local Vec zeta;
            zeta.resize(d);
            // rejection-resampled spherical noise, hard-capped at ||zeta|| <= cap
            int attempts = 0;
            do {
                for (double& z : zeta) z = sigma * rng.normal();
                if (++attempts > 100000)
                    throw ConfigError("noise_cap rejects nearly all noise draws");
            } while (norm(zeta) > cap);
            for (std::size_t i = 0; i < d; ++i)
                g[i] = 2.0 * a * (x[i] - x_star[i]) + zeta[i];
        };
    }
    return p;
}

Dataset parse_libsvm(std::istream& in) {
    Dataset ds;
    std::string line;
    long long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::string token;
        if (!(ss >> token)) continue;  // blank line

        std::size_t pos = 0;
        double label_value = 0.0;
        try {
            label_value = std::stod(token, &pos);
        } catch (const std::exception&) {
            throw ParseError(line_no, "cannot parse label '" + token + "'");
        }
        if (pos != token.size())
            throw ParseError(line_no, "cannot parse label '" + token + "'");
        int label;
        if (label_value == 1.0)
            label = +1;
        else if (label_value == -1.0 || label_value == 0.0)
            label = -1;  // 0/1 files map 0 to -1
        else
            throw NonBinaryLabel(line_no, token);

        SparseRow row;
        int prev_index = 0;
        while (ss >> token) {
            const auto colon = token.find(':');
            if (colon == std::string::npos || colon == 0 || colon + 1 == token.size())
                throw ParseError(line_no, "expected <index>:<value>, got '" + token + "'");
            int index = 0;
            double value = 0.0;
            try {
                index = std::stoi(token.substr(0, colon), &pos);
                if (pos != colon) throw std::invalid_argument("");
                value = std::stod(token.substr(colon + 1), &pos);
                if (pos != token.size() - colon - 1) throw std::invalid_argument("");
            } catch (const std::exception&) {
                throw ParseError(line_no, "expected <index>:<value>, got '" + token + "'");
            }
            if (index < 1) throw ParseError(line_no, "feature indices are 1-based");
            if (index <= prev_index)
                throw ParseError(line_no, "feature indices must be strictly increasing");
            prev_index = index;
            row.index.push_back(index - 1);
            row.value.push_back(value);
            ds.dim = std::max(ds.dim, index);
        }
        ds.rows.push_back(std::move(row));
        ds.labels.push_back(label);
        ++ds.m;
    }
    return ds;
}

Dataset load_libsvm(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open dataset: " + path);
    return parse_libsvm(in);
}

Dataset make_toy_separable() {
    Dataset ds;
    ds.m = 4;
    ds.dim = 2;
    ds.rows = {SparseRow{{0}, {1.0}}, SparseRow{{1}, {1.0}},
               SparseRow{{0}, {-1.0}}, SparseRow{{1}, {-1.0}}};
    ds.labels = {+1, +1, -1, -1};
    return ds;
}

namespace {

double sparse_dot(const SparseRow& row, const Vec& w) {
    double s = 0.0;
    for (std::size_t j = 0; j < row.index.size(); ++j)
        s += row.value[j] * w[static_cast<std::size_t>(row.index[j])];
    return s;
}

}  // namespace

Problem make_svm(const Dataset& dataset, double lambda_reg, double R_w) {
    if (dataset.m == 0) throw EmptyDataset();
    if (!(lambda_reg > 0.0)) throw NonPositiveConstant("lambda_reg");
    if (!(R_w > 0.0)) throw NonPositiveConstant("R_w");

    const int dim = std::max(dataset.dim, 1);
    double R_x = 0.0;
    for (const SparseRow& row : dataset.rows) {
        double s = 0.0;
        for (double v : row.value) s += v * v;
        R_x = std::max(R_x, std::sqrt(s));
    }

    ProblemSpec spec;
    spec.dim = dim;
    spec.lambda_hk = lambda_reg / 2.0;
    spec.G = lambda_reg * R_w + R_x;
    spec.M = (lambda_reg / 2.0) * R_w * R_w + 1.0 + R_x * R_w;  // safe over-estimate

    auto data = std::make_shared<const Dataset>(dataset);
    const double lam = lambda_reg;
    const double inv_m = 1.0 / static_cast<double>(dataset.m);

    Problem p;
    p.spec = validate_problem(spec);
    p.domain = make_ball_domain(BallSpec{Vec(static_cast<std::size_t>(dim), 0.0), R_w});

    p.value = [data, lam, inv_m](const Vec& w) {
        double hinge = 0.0;
        for (int i = 0; i < data->m; ++i) {
            const double margin =
                static_cast<double>(data->labels[static_cast<std::size_t>(i)]) *
                sparse_dot(data->rows[static_cast<std::size_t>(i)], w);
            hinge += std::max(0.0, 1.0 - margin);
        }
        return 0.5 * lam * norm_sq(w) + inv_m * hinge;
    };

    p.subgradient_into = [data, lam, inv_m](const Vec& w, Vec& g) {
        g.resize(w.size());
        for (std::size_t i = 0; i < w.size(); ++i) g[i] = lam * w[i];
        for (int i = 0; i < data->m; ++i) {
            const SparseRow& row = data->rows[static_cast<std::size_t>(i)];
            const double y = static_cast<double>(data->labels[static_cast<std::size_t>(i)]);
            if (y * sparse_dot(row, w) < 1.0) {
                for (std::size_t j = 0; j < row.index.size(); ++j)
                    g[static_cast<std::size_t>(row.index[j])] -=
                        inv_m * y * row.value[j];
            }
        }
    };

    p.stochastic_subgradient_into = [data, lam](const Vec& w, Rng& rng, Vec& g) {
        g.resize(w.size());
        for (std::size_t i = 0; i < w.size(); ++i) g[i] = lam * w[i];
        const std::size_t i = rng.uniform_index(static_cast<std::size_t>(data->m));
        const SparseRow& row = data->rows[i];
        const double y = static_cast<double>(data->labels[i]);
        if (y * sparse_dot(row, w) < 1.0) {
            for (std::size_t j = 0; j < row.index.size(); ++j)
                g[static_cast<std::size_t>(row.index[j])] -= y * row.value[j];
        }
    };

    return p;
}

ReferenceResult solve_reference(const Problem& problem, long long iterations) {
    if (iterations < 1) throw NonPositiveConstant("iterations");
    const double mu = 2.0 * problem.spec.lambda_hk;
    const std::size_t d = static_cast<std::size_t>(problem.domain.dim);

    Vec x(d, 0.0), g(d), step(d), next(d), avg(d, 0.0);
    problem.domain.project_into(Vec(d, 0.0), x);
    for (long long t = 1; t <= iterations; ++t) {
        for (std::size_t i = 0; i < d; ++i) avg[i] += x[i];
        problem.subgradient_into(x, g);
        const double eta = 1.0 / (mu * static_cast<double>(t));
        for (std::size_t i = 0; i < d; ++i) step[i] = x[i] - eta * g[i];
        problem.domain.project_into(step, next);
        x.swap(next);
    }
    for (double& v : avg) v /= static_cast<double>(iterations);

    ReferenceResult result;
    result.x = std::move(avg);
    result.f = problem.value(result.x);
    const double T = static_cast<double>(iterations);
    result.certified_gap =
        problem.spec.G * problem.spec.G * (1.0 + std::log(T)) / (2.0 * mu * T);
    result.iterations = iterations;
    return result;
}

ReferenceResult reference_optimum(Problem& problem, double tol,
                                  long long max_budget) {
    if (!(tol > 0.0)) throw NonPositiveConstant("tol");
    if (max_budget < 1) throw NonPositiveConstant("max_budget");

    const double mu = 2.0 * problem.spec.lambda_hk;
    const double g2 = problem.spec.G * problem.spec.G;
    auto certificate = [&](double T) { return g2 * (1.0 + std::log(T)) / (2.0 * mu * T); };

    // fixed-point iteration for the smallest certified budget
    double T = std::max(1.0, g2 / (2.0 * mu * tol));
    for (int i = 0; i < 64; ++i) T = std::max(1.0, g2 * (1.0 + std::log(T)) / (2.0 * mu * tol));
    long long budget = static_cast<long long>(std::ceil(T));
    while (budget >= 1 && certificate(static_cast<double>(budget)) > tol) budget *= 2;

    if (budget > max_budget) {
        const double best = certificate(static_cast<double>(max_budget));
        if (best > tol) throw ToleranceNotCertified(tol, best);
        budget = max_budget;
    }

    ReferenceResult result = solve_reference(problem, budget);
    if (!problem.optimum) problem.optimum = Optimum{result.x, result.f};
    return result;
}

}  // namespace epochgd
