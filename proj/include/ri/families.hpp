#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "ri/kfunc.hpp"
#include "ri/spaces.hpp"
#include "ri/sv.hpp"

namespace ri {

/// Deterministic generator for test families.  All randomness flows through a
/// 64-bit state with explicit arithmetic, so identical seeds give identical
/// families on any platform.
class FamilyGen {
public:
    explicit FamilyGen(std::uint64_t seed) : state_(seed ^ 0x9e3779b97f4a7c15ull) {
        next();
        next();
    }

    std::uint64_t next() {
        // splitmix64
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double log_uniform(double lo, double hi) {
        return std::exp(uniform(std::log(lo), std::log(hi)));
    }
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(next() % n); }

    /// Random non-increasing staircase.  shape: 0 = generic staircase,
    /// 1 = sparse (few far-apart pieces), 2 = geometric decay.
    DecreasingProfile profile(int shape, double support_lo = 1e-3, double support_hi = 1e3) {
        std::vector<double> edges, values;
        if (shape == 1) {
            const int k = 2 + static_cast<int>(index(3));
            double e = log_uniform(support_lo, support_lo * 10.0);
            double v = log_uniform(0.5, 50.0);
            for (int i = 0; i < k; ++i) {
                edges.push_back(e);
                values.push_back(v);
                e *= log_uniform(5.0, 50.0);
                v *= uniform(0.02, 0.3);
                if (e > support_hi) break;
            }
        } else if (shape == 2) {
            const int k = 6 + static_cast<int>(index(5));
            const double ratio = uniform(0.2, 0.7);
            double e = log_uniform(support_lo, support_lo * 4.0);
            double v = log_uniform(1.0, 20.0);
            const double step = std::pow(support_hi / e, 1.0 / k);
            for (int i = 0; i < k; ++i) {
                edges.push_back(e);
                values.push_back(v);
                e *= step * uniform(0.8, 1.2);
                v *= ratio;
            }
        } else {
            const int k = 3 + static_cast<int>(index(6));
            double e = log_uniform(support_lo, support_lo * 10.0);
            double v = log_uniform(0.5, 20.0);
            for (int i = 0; i < k; ++i) {
                edges.push_back(e);
                values.push_back(v);
                e *= log_uniform(1.5, 12.0);
                v *= uniform(0.1, 0.9);
                if (e > support_hi) break;
            }
        }
        return DecreasingProfile(std::move(edges), std::move(values));
    }

    std::vector<DecreasingProfile> profile_family(int count, double support_lo = 1e-3,
                                                  double support_hi = 1e3) {
        std::vector<DecreasingProfile> out;
        for (int i = 0; i < count; ++i) out.push_back(profile(i % 3, support_lo, support_hi));
        return out;
    }

    /// Weighted couple; ordered = true forces w0 <= w1 so that K saturates
    /// by t = 1 (the A1-inside-A0 regime).
    DiscreteCouple couple(std::size_t dim, bool ordered = false) {
        DiscreteCouple c;
        c.w0.resize(dim);
        c.w1.resize(dim);
        for (std::size_t i = 0; i < dim; ++i) {
            if (ordered) {
                c.w1[i] = log_uniform(1.0, 1e3);
                c.w0[i] = c.w1[i] * log_uniform(1e-4, 1.0);
            } else {
                c.w0[i] = log_uniform(1e-2, 1e2);
                c.w1[i] = log_uniform(1e-2, 1e2);
            }
        }
        return c;
    }

    std::vector<double> vector_f(std::size_t dim, int shape = 0) {
        std::vector<double> f(dim, 0.0);
        if (shape == 1) {
            const std::size_t nz = 1 + index(std::max<std::size_t>(1, dim / 4));
            for (std::size_t k = 0; k < nz; ++k) f[index(dim)] = log_uniform(0.1, 10.0);
        } else if (shape == 2) {
            double v = log_uniform(0.5, 5.0);
            const double ratio = uniform(0.3, 0.8);
            for (std::size_t i = 0; i < dim; ++i) {
                f[i] = v;
                v *= ratio;
            }
        } else {
            for (std::size_t i = 0; i < dim; ++i) f[i] = log_uniform(0.05, 20.0);
        }
        return f;
    }

    std::vector<std::vector<double>> vector_family(std::size_t dim, int count) {
        std::vector<std::vector<double>> out;
        for (int i = 0; i < count; ++i) out.push_back(vector_f(dim, i % 3));
        return out;
    }

    /// Random closed-form SV expression of bounded depth.
    Sv sv(int depth = 2) {
        const std::size_t kind = index(depth > 0 ? 7 : 4);
        switch (kind) {
            case 0: return Sv::constant(log_uniform(0.25, 4.0));
            case 1: return Sv::log_pow(uniform(-2.0, 2.0));
            case 2: return Sv::log_log_pow(uniform(-1.5, 1.5));
            case 3: return Sv::broken_log_pow(uniform(-2.0, 2.0), uniform(-2.0, 2.0));
            case 4: return sv(depth - 1) * sv(depth - 1);
            case 5: return sv(depth - 1).pow(uniform(-1.5, 1.5));
            default: return sv(depth - 1).recip_arg();
        }
    }

    /// Random full-mode descriptor (for structural tests such as swap).
    SpaceDescriptor descriptor() {
        const double idxs[4] = {0.7, 1.0, 2.0, kInf};
        const std::size_t kind = index(4);
        if (kind == 0) return make_endpoint(static_cast<int>(index(2)));
        if (kind == 1)
            return make_standard(uniform(0.05, 0.95), idxs[index(4)], sv());
        if (kind == 2)
            return make_llim(uniform(0.05, 0.95), idxs[index(4)], sv(), idxs[index(4)], sv());
        return make_rlim(uniform(0.05, 0.95), idxs[index(4)], sv(), idxs[index(4)], sv());
    }

private:
    std::uint64_t state_;
};

}  // namespace ri
