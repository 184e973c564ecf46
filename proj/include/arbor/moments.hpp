#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "arbor/common.hpp"
#include "arbor/walk.hpp"

namespace arbor {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

namespace detail {

// Visits every set partition of {0, ..., r-1} as a restricted-growth
// block-assignment vector.
template <class F>
void for_each_set_partition(int r, F&& visit) {
    std::vector<int> assign(static_cast<std::size_t>(r), 0);
    auto rec = [&](auto&& self, int i, int used) -> void {
        if (i == r) {
            visit(assign);
            return;
        }
        for (int b = 0; b <= used; ++b) {
            assign[static_cast<std::size_t>(i)] = b;
            self(self, i + 1, std::max(used, b + 1));
        }
    };
    rec(rec, 1, 1);
}

inline BigInt factorial(int k) {
    BigInt f = 1;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

}  // namespace detail

// mu_{alpha_1,...,alpha_r} = sum over distinct index tuples of prod b_{i_j}^{alpha_j},
// computed by Moebius inversion over set partitions of the power sums
// p_k = sum_i b_i^k, never by the naive r-fold loop:
//   mu_alpha = sum_{partitions P} prod_{B in P} (-1)^{|B|-1} (|B|-1)! p_{sum_B alpha}.
template <class Number>
Number moment_of(const std::vector<Number>& jumps, const std::vector<int>& alphas) {
    const int r = static_cast<int>(alphas.size());
    if (r == 0) throw Error("moment: empty exponent list");
    int alpha_sum = 0;
    for (int a : alphas) {
        if (a < 1) throw Error("moment: exponents must be positive");
        alpha_sum += a;
    }
    std::vector<Number> power_sum(static_cast<std::size_t>(alpha_sum) + 1, Number(0));
    for (const Number& b : jumps) {
        Number p = b;
        for (int k = 1; k <= alpha_sum; ++k) {
            power_sum[static_cast<std::size_t>(k)] += p;
            p *= b;
        }
    }
    Number total(0);
    detail::for_each_set_partition(r, [&](const std::vector<int>& assign) {
        int blocks = 0;
        for (int a : assign) blocks = std::max(blocks, a + 1);
        std::vector<int> block_alpha(static_cast<std::size_t>(blocks), 0);
        std::vector<int> block_size(static_cast<std::size_t>(blocks), 0);
        for (int i = 0; i < r; ++i) {
            block_alpha[static_cast<std::size_t>(assign[static_cast<std::size_t>(i)])] +=
                alphas[static_cast<std::size_t>(i)];
            ++block_size[static_cast<std::size_t>(assign[static_cast<std::size_t>(i)])];
        }
        Number term(1);
        bool negative = false;
        for (int b = 0; b < blocks; ++b) {
            const int size = block_size[static_cast<std::size_t>(b)];
            if (size % 2 == 0) negative = !negative;
            term *= Number(detail::factorial(size - 1));
            term *= power_sum[static_cast<std::size_t>(block_alpha[static_cast<std::size_t>(b)])];
        }
        if (negative) total -= term; else total += term;
    });
    return total;
}

inline BigInt moment(const JumpSequence& b, const std::vector<int>& alphas) {
    std::vector<BigInt> jumps(b.jumps.begin(), b.jumps.end());
    return moment_of(jumps, alphas);
}

inline BigRat moment(const std::vector<BigRat>& jumps, const std::vector<int>& alphas) {
    return moment_of(jumps, alphas);
}

// Centered jump sequence b~_i = b_i + 1/n kept as exact integer numerators
// over the common denominator n.
struct CenteredJumps {
    std::vector<long long> numerators;
    long long denominator = 1;

    static CenteredJumps of_type(const TypeSequence& type) {
        const JumpSequence b = JumpSequence::of_type(type);
        const long long n = static_cast<long long>(b.length());
        CenteredJumps c;
        c.denominator = n;
        c.numerators.reserve(b.jumps.size());
        for (long long j : b.jumps) c.numerators.push_back(j * n + 1);
        return c;
    }

    static CenteredJumps of_zero_sum(const JumpSequence& b) {
        if (b.sum() != 0) throw InvalidJumpSequence("centered jumps: sequence must sum to 0");
        CenteredJumps c;
        c.denominator = 1;
        c.numerators = b.jumps;
        return c;
    }

    long long sum_numerators() const {
        long long s = 0;
        for (long long v : numerators) s += v;
        return s;
    }

    double sigma() const {
        double s = 0.0;
        for (long long v : numerators) s += static_cast<double>(v) * static_cast<double>(v);
        return std::sqrt(s) / static_cast<double>(denominator);
    }
};

}  // namespace arbor
