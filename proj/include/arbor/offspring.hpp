#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "arbor/common.hpp"

namespace arbor {

enum class OffspringKind { table, geometric, poisson, powerlaw, weights };

// Offspring law of a Bienayme model, or a weight sequence for simply
// generated trees. Parametric pmfs are truncated at a cap; the mass dropped
// by truncation must be below 1e-9 and the remainder is renormalised.
class OffspringDistribution {
public:
    static constexpr Index kDefaultCap = 1'000'000;
    static constexpr double kMaxTailMass = 1e-9;

    // pmf(k) = p (1-p)^k on {0, 1, ...}.
    static OffspringDistribution geometric(double p, Index cap = kDefaultCap) {
        if (!(p > 0.0 && p <= 1.0)) throw InvalidDistribution("geometric: need p in (0,1]");
        OffspringDistribution d(OffspringKind::geometric);
        d.param_ = p;
        d.cap_ = cap;
        d.label_ = "geometric(" + trim_number(p) + ")";
        d.validate_tail();
        return d;
    }

    static OffspringDistribution poisson(double lambda, Index cap = kDefaultCap) {
        if (!(lambda > 0.0)) throw InvalidDistribution("poisson: need lambda > 0");
        OffspringDistribution d(OffspringKind::poisson);
        d.param_ = lambda;
        d.cap_ = cap;
        d.label_ = "poisson(" + trim_number(lambda) + ")";
        d.validate_tail();
        return d;
    }

    // pmf(k) proportional to max(k,1)^(-beta) on {0, ..., cap}; subcritical
    // for beta = 3, the condensation showcase.
    static OffspringDistribution powerlaw(double beta, Index cap = kDefaultCap) {
        if (!(beta > 2.0)) throw InvalidDistribution("powerlaw: need beta > 2");
        OffspringDistribution d(OffspringKind::powerlaw);
        d.param_ = beta;
        d.cap_ = cap;
        d.label_ = "powerlaw(" + trim_number(beta) + ")";
        d.validate_tail();
        return d;
    }

    static OffspringDistribution table(std::vector<double> pmf) {
        if (pmf.empty()) throw InvalidDistribution("table: empty pmf");
        double total = 0.0;
        for (double p : pmf) {
            if (p < 0.0 || !std::isfinite(p)) throw InvalidDistribution("table: bad pmf entry");
            total += p;
        }
        if (std::abs(total - 1.0) > 1e-12) {
            throw InvalidDistribution("table: pmf must sum to 1 within 1e-12");
        }
        OffspringDistribution d(OffspringKind::table);
        d.table_ = std::move(pmf);
        d.cap_ = static_cast<Index>(d.table_.size()) - 1;
        d.label_ = "table";
        return d;
    }

    // Non-negative weights with w_0 > 0, not necessarily summable. The
    // optional tilt is a pmf equivalent in the sense w_k = c theta^k mu(k).
    static OffspringDistribution weight_sequence(
        std::vector<double> w,
        std::optional<OffspringDistribution> tilt = std::nullopt) {
        if (w.empty() || w[0] <= 0.0) throw InvalidDistribution("weights: need w_0 > 0");
        for (double x : w) {
            if (x < 0.0 || !std::isfinite(x)) throw InvalidDistribution("weights: bad entry");
        }
        OffspringDistribution d(OffspringKind::weights);
        d.table_ = std::move(w);
        d.cap_ = static_cast<Index>(d.table_.size()) - 1;
        d.label_ = "weights";
        if (tilt) {
            if (!tilt->is_pmf()) throw InvalidDistribution("weights: tilt must be a pmf");
            d.validate_tilt(*tilt);
            d.tilt_ = std::make_shared<OffspringDistribution>(std::move(*tilt));
        }
        return d;
    }

    OffspringKind kind() const { return kind_; }
    bool is_pmf() const { return kind_ != OffspringKind::weights; }
    Index cap() const { return cap_; }
    const std::string& label() const { return label_; }

    const std::vector<double>& raw_weights() const {
        if (kind_ != OffspringKind::weights) throw InvalidDistribution("not a weight sequence");
        return table_;
    }

    const OffspringDistribution* tilt() const { return tilt_.get(); }

    // Truncated, renormalised pmf on {0, ..., limit}; trailing zeros trimmed.
    // Parametric kinds extend analytically past their declared cap, so the
    // effective cap when sampling at size n is max(cap, n) as documented.
    std::vector<double> pmf_table(Index limit) const {
        if (!is_pmf()) throw InvalidDistribution("pmf_table: weight sequences have no pmf");
        if (limit < 0) throw InvalidDistribution("pmf_table: negative limit");
        std::vector<double> pmf = raw_pmf(limit);
        while (pmf.size() > 1 && pmf.back() == 0.0) pmf.pop_back();
        double total = 0.0;
        for (double p : pmf) total += p;
        if (total <= 0.0) throw InvalidDistribution("pmf_table: zero mass");
        for (double& p : pmf) p /= total;
        return pmf;
    }

private:
    explicit OffspringDistribution(OffspringKind k) : kind_(k) {}

    std::vector<double> raw_pmf(Index limit) const {
        const Index m = kind_ == OffspringKind::table
                            ? std::min(limit, static_cast<Index>(table_.size()) - 1)
                            : limit;
        std::vector<double> pmf(static_cast<std::size_t>(m) + 1, 0.0);
        switch (kind_) {
            case OffspringKind::geometric: {
                const double p = param_;
                double mass = p;
                for (Index k = 0; k <= m; ++k) {
                    pmf[static_cast<std::size_t>(k)] = mass;
                    mass *= (1.0 - p);
                }
                break;
            }
            case OffspringKind::poisson: {
                const double lambda = param_;
                double log_mass = -lambda;
                for (Index k = 0; k <= m; ++k) {
                    pmf[static_cast<std::size_t>(k)] = std::exp(log_mass);
                    log_mass += std::log(lambda) - std::log(static_cast<double>(k + 1));
                }
                break;
            }
            case OffspringKind::powerlaw: {
                const double beta = param_;
                pmf[0] = 1.0;
                for (Index k = 1; k <= m; ++k) {
                    pmf[static_cast<std::size_t>(k)] = std::pow(static_cast<double>(k), -beta);
                }
                break;
            }
            case OffspringKind::table: {
                for (Index k = 0; k <= m && k < static_cast<Index>(table_.size()); ++k) {
                    pmf[static_cast<std::size_t>(k)] = table_[static_cast<std::size_t>(k)];
                }
                break;
            }
            case OffspringKind::weights:
                throw InvalidDistribution("raw_pmf: weights");
        }
        return pmf;
    }

    void validate_tail() const {
        // Dropped tail mass at the declared cap, relative to the total.
        double tail = 0.0;
        switch (kind_) {
            case OffspringKind::geometric:
                tail = std::pow(1.0 - param_, static_cast<double>(cap_) + 1.0);
                break;
            case OffspringKind::poisson: {
                // crude but safe: Chernoff-style bound for lambda << cap
                const double lambda = param_;
                if (cap_ < 4 * lambda + 64) {
                    throw InvalidDistribution("poisson: cap too small for tail control");
                }
                double log_tail = -lambda + static_cast<double>(cap_) * (1.0 + std::log(lambda) -
                                  std::log(static_cast<double>(cap_)));
                tail = std::exp(log_tail);
                break;
            }
            case OffspringKind::powerlaw:
                // sum_{k > K} k^-beta <= K^(1-beta)/(beta-1); total >= pmf(0) = 1
                tail = std::pow(static_cast<double>(cap_), 1.0 - param_) / (param_ - 1.0);
                break;
            default:
                return;
        }
        if (!(tail < kMaxTailMass)) {
            throw InvalidDistribution("truncation cap folds tail mass >= 1e-9");
        }
    }

    void validate_tilt(const OffspringDistribution& mu) const {
        // w_k / mu(k) must equal c theta^k: log-ratios affine in k.
        const auto pmf = mu.pmf_table(static_cast<Index>(table_.size()) - 1);
        double log_c = 0.0, log_theta = 0.0;
        int anchors = 0;
        Index first = -1;
        for (Index k = 0; k < static_cast<Index>(table_.size()); ++k) {
            const double w = table_[static_cast<std::size_t>(k)];
            const double m = k < static_cast<Index>(pmf.size()) ? pmf[static_cast<std::size_t>(k)] : 0.0;
            if ((w == 0.0) != (m == 0.0)) {
                throw InvalidDistribution("tilt: support mismatch with weight sequence");
            }
            if (w == 0.0) continue;
            const double log_ratio = std::log(w) - std::log(m);
            if (anchors == 0) {
                log_c = log_ratio;
                first = k;
                anchors = 1;
            } else if (anchors == 1) {
                log_theta = (log_ratio - log_c) / static_cast<double>(k - first);
                anchors = 2;
            } else {
                const double expect = log_c + log_theta * static_cast<double>(k - first);
                if (std::abs(log_ratio - expect) > 1e-7) {
                    throw InvalidDistribution("tilt: weights are not c*theta^k*mu(k)");
                }
            }
        }
    }

    static std::string trim_number(double x) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%g", x);
        return buf;
    }

    OffspringKind kind_;
    double param_ = 0.0;
    Index cap_ = kDefaultCap;
    std::vector<double> table_;
    std::shared_ptr<OffspringDistribution> tilt_;
    std::string label_;
};

}  // namespace arbor
