#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "obscost/precision.hpp"
#include "obscost/quadrature.hpp"

namespace obscost {

// Scalar coefficient on [0,X]: constant, polynomial in x, or a tabulated
// sample set with linear interpolation.
class Coefficient {
  public:
    static Coefficient constant(Real c) {
        Coefficient k;
        k.kind_ = Kind::Constant;
        k.poly_ = {std::move(c)};
        return k;
    }
    static Coefficient polynomial(RVec coeffs_ascending) {
        if (coeffs_ascending.empty())
            throw validation_error("Coefficient::polynomial: empty coefficient list");
        Coefficient k;
        k.kind_ = Kind::Polynomial;
        k.poly_ = std::move(coeffs_ascending);
        return k;
    }
    static Coefficient table(RVec x, RVec y) {
        if (x.size() != y.size() || x.size() < 2)
            throw validation_error("Coefficient::table: need >= 2 samples of equal length");
        for (std::size_t i = 0; i + 1 < x.size(); ++i)
            if (!(x[i] < x[i + 1])) throw validation_error("Coefficient::table: x not increasing");
        Coefficient k;
        k.kind_ = Kind::Table;
        k.tx_ = std::move(x);
        k.ty_ = std::move(y);
        return k;
    }

    Real operator()(const Real& x) const {
        switch (kind_) {
            case Kind::Constant:
                return poly_[0];
            case Kind::Polynomial: {
                Real acc = poly_.back();
                for (std::size_t i = poly_.size() - 1; i-- > 0;) acc = acc * x + poly_[i];
                return acc;
            }
            case Kind::Table: {
                if (x <= tx_.front()) return ty_.front();
                if (x >= tx_.back()) return ty_.back();
                std::size_t lo = 0, hi = tx_.size() - 1;
                while (hi - lo > 1) {
                    std::size_t mid = (lo + hi) / 2;
                    if (tx_[mid] <= x)
                        lo = mid;
                    else
                        hi = mid;
                }
                Real w = (x - tx_[lo]) / (tx_[hi] - tx_[lo]);
                return ty_[lo] + w * (ty_[hi] - ty_[lo]);
            }
        }
        throw error("Coefficient: bad kind");
    }

    bool is_constant() const { return kind_ == Kind::Constant; }

  private:
    enum class Kind { Constant, Polynomial, Table };
    Kind kind_ = Kind::Constant;
    RVec poly_;
    RVec tx_, ty_;
};

// (Af)(x) = (p f')' + q f on [0,X] with separated conditions
// a0 f(0) + b0 f'(0) = 0 and a1 f(X) + b1 f'(X) = 0, a_i^2+b_i^2 = 1.
struct SturmLiouvilleProblem {
    Real X;
    Coefficient p = Coefficient::constant(Real(1.0));
    Coefficient q = Coefficient::constant(Real(0.0));
    Real a0 = Real(1.0), b0 = Real(0.0);
    Real a1 = Real(1.0), b1 = Real(0.0);

    void validate() const {
        if (!(X > Real(0.0))) throw validation_error("SturmLiouvilleProblem: X must be > 0");
        Real n0 = a0 * a0 + b0 * b0 - Real(1.0);
        Real n1 = a1 * a1 + b1 * b1 - Real(1.0);
        Real tol = pow2(-48);
        if (abs(n0) > tol || abs(n1) > tol)
            throw validation_error("SturmLiouvilleProblem: boundary data not normalized");
    }
};

enum class BasisKind {
    DirichletSine,            // e_n = sqrt(2/X) sin(n pi x / X)
    NeumannDirichletCosine,   // e_n = sqrt(2/X) cos((n-1/2) pi x / X)
    Numeric,
};

// Eigenvalues/eigenfunctions of -A, lambda_1 < lambda_2 < ..., L^2-orthonormal
// on [0,X]. Grid samples are uniform including both endpoints.
struct SpectralBasis {
    BasisKind kind = BasisKind::Numeric;
    Real length;            // X
    RVec eigenvalues;       // lambda_n (positive type: -A e_n = lambda_n e_n)
    RVec grid;
    std::vector<RVec> samples;
    RVec value_at_0, value_at_X;
    RVec deriv_at_0, deriv_at_X;
    Real weighted_length;    // L = int_0^X sqrt(p)
    // Liouville length int_0^X p^{-1/2}: the scale in the eigenvalue
    // asymptotics lambda_n ~ (pi/asymptotic_length)^2 (n+nu)^2 for the
    // operator (p f')' + q f on plain L^2. Coincides with weighted_length
    // when p == 1.
    Real asymptotic_length;
    Real shift_index;        // nu in the asymptotic law

    std::size_t size() const { return eigenvalues.size(); }

    // omega_n = sqrt(max(lambda_n,0)); the frequency used by window rules.
    Real omega(std::size_t n) const {
        const Real& l = eigenvalues.at(n - 1);
        return l.sign() > 0 ? sqrt(l) : Real(0.0);
    }

    // Pointwise evaluation: closed form when available, else linear
    // interpolation of the stored samples.
    Real eval(std::size_t n, const Real& x) const {
        Real amp = sqrt(Real(2.0) / length);
        Real pi = Real::pi();
        switch (kind) {
            case BasisKind::DirichletSine:
                return amp * sin(Real(static_cast<long>(n)) * pi * x / length);
            case BasisKind::NeumannDirichletCosine:
                return amp * cos((Real(static_cast<long>(n)) - Real(0.5)) * pi * x / length);
            case BasisKind::Numeric: {
                const RVec& u = samples.at(n - 1);
                std::size_t m = u.size() - 1;
                Real pos = x / length * Real(static_cast<long>(m));
                long i = std::max(0L, std::min(static_cast<long>(m) - 1, pos.to_long()));
                Real w = pos - Real(i);
                return u[i] + w * (u[i + 1] - u[i]);
            }
        }
        throw error("SpectralBasis: bad kind");
    }

    // Trace weight d^k e_n at the given endpoint (0 = left, 1 = right).
    Real trace_weight(std::size_t n, int endpoint, int k) const {
        if (k == 0) return endpoint == 0 ? value_at_0.at(n - 1) : value_at_X.at(n - 1);
        if (k == 1) return endpoint == 0 ? deriv_at_0.at(n - 1) : deriv_at_X.at(n - 1);
        throw validation_error("trace_weight: derivative order must be 0 or 1");
    }
};

inline SpectralBasis dirichlet_laplacian_basis(const Real& length, std::size_t n_modes,
                                               std::size_t grid_points = 257) {
    if (!(length > Real(0.0))) throw validation_error("dirichlet_laplacian_basis: length must be > 0");
    if (n_modes < 1) throw validation_error("dirichlet_laplacian_basis: n_modes must be >= 1");
    SpectralBasis b;
    b.kind = BasisKind::DirichletSine;
    b.length = length;
    b.weighted_length = length;
    b.asymptotic_length = length;
    b.shift_index = Real(0.0);
    Real pi = Real::pi();
    Real amp = sqrt(Real(2.0) / length);
    b.grid.resize(grid_points);
    for (std::size_t i = 0; i < grid_points; ++i)
        b.grid[i] = length * Real(static_cast<long>(i)) / Real(static_cast<long>(grid_points - 1));
    for (std::size_t n = 1; n <= n_modes; ++n) {
        Real w = Real(static_cast<long>(n)) * pi / length;
        b.eigenvalues.push_back(w * w);
        b.value_at_0.push_back(Real(0.0));
        b.value_at_X.push_back(Real(0.0));
        b.deriv_at_0.push_back(amp * w);
        // e_n'(X) = (-1)^n sqrt(2/X) (n pi / X)
        b.deriv_at_X.push_back((n % 2 == 0 ? amp : -amp) * w);
        RVec row(grid_points);
        for (std::size_t i = 0; i < grid_points; ++i) row[i] = amp * sin(w * b.grid[i]);
        b.samples.push_back(std::move(row));
    }
    return b;
}

// Modes with e'(0) = 0, e(X) = 0: the even half of a twofold segment.
inline SpectralBasis neumann_dirichlet_basis(const Real& length, std::size_t n_modes,
                                             std::size_t grid_points = 257) {
    if (!(length > Real(0.0))) throw validation_error("neumann_dirichlet_basis: length must be > 0");
    if (n_modes < 1) throw validation_error("neumann_dirichlet_basis: n_modes must be >= 1");
    SpectralBasis b;
    b.kind = BasisKind::NeumannDirichletCosine;
    b.length = length;
    b.weighted_length = length;
    b.asymptotic_length = length;
    b.shift_index = Real(-0.5);
    Real pi = Real::pi();
    Real amp = sqrt(Real(2.0) / length);
    b.grid.resize(grid_points);
    for (std::size_t i = 0; i < grid_points; ++i)
        b.grid[i] = length * Real(static_cast<long>(i)) / Real(static_cast<long>(grid_points - 1));
    for (std::size_t n = 1; n <= n_modes; ++n) {
        Real w = (Real(static_cast<long>(n)) - Real(0.5)) * pi / length;
        b.eigenvalues.push_back(w * w);
        b.value_at_0.push_back(amp);
        b.value_at_X.push_back(Real(0.0));
        b.deriv_at_0.push_back(Real(0.0));
        // e_n'(X) = -amp w sin((n-1/2)pi) = amp w (-1)^n
        b.deriv_at_X.push_back((n % 2 == 0 ? amp : -amp) * w);
        RVec row(grid_points);
        for (std::size_t i = 0; i < grid_points; ++i) row[i] = amp * cos(w * b.grid[i]);
        b.samples.push_back(std::move(row));
    }
    return b;
}

inline Real weighted_length(const SturmLiouvilleProblem& prob,
                            PrecisionContext ctx = PrecisionContext{}) {
    prob.validate();
    PrecisionScope scope{ctx};
    auto f = [&](const Real& x) { return sqrt(prob.p(x)); };
    return integrate_auto(f, Real(0.0), prob.X, pow2(-ctx.bits + 16), ctx);
}

namespace detail {

inline Real normalize_phase(Real th) {
    Real pi = Real::pi();
    while (th.sign() < 0) th += pi;
    while (th >= pi) th -= pi;
    return th;
}

// Scaled Pruefer phase: u = (r/sqrt(S)) sin(theta), p u' = r sqrt(S) cos(theta),
// theta' = (S/p) cos^2(theta) + ((q+lambda)/S) sin^2(theta).
// With S ~ sqrt(lambda) the phase speed is nearly constant, so RK4 stays
// accurate uniformly in the mode index (exact for p=1, q=0 up to rounding).
// For fixed S, theta(X; lambda) is strictly increasing in lambda.
struct PrueferIntegrator {
    RVec pv, qv;     // p,q at the 2N+1 half-step points
    Real X, p0, pX, a0, b0, a1, b1;
    std::size_t steps;
    long bits;

    PrueferIntegrator(const SturmLiouvilleProblem& prob, std::size_t n_steps, long work_bits)
        : steps(n_steps), bits(work_bits) {
        PrecisionScope scope{PrecisionContext{bits}};
        X = reduced(prob.X, bits);
        a0 = reduced(prob.a0, bits);
        b0 = reduced(prob.b0, bits);
        a1 = reduced(prob.a1, bits);
        b1 = reduced(prob.b1, bits);
        pv.resize(2 * steps + 1);
        qv.resize(2 * steps + 1);
        for (std::size_t i = 0; i <= 2 * steps; ++i) {
            Real x = X * Real(static_cast<long>(i)) / Real(static_cast<long>(2 * steps));
            pv[i] = reduced(prob.p(x), bits);
            qv[i] = reduced(prob.q(x), bits);
            if (!(pv[i] > Real(0.0)))
                throw validation_error("solve_sturm_liouville: p must be positive on [0,X]");
        }
        p0 = pv.front();
        pX = pv.back();
    }

    // theta(X) - (phi_star + (n-1) pi); zero exactly at lambda_n.
    Real phase_miss(const Real& lambda_in, const Real& scale_in, std::size_t n) const {
        PrecisionScope scope{PrecisionContext{bits}};
        Real lambda = reduced(lambda_in, bits);
        Real S = reduced(scale_in, bits);
        Real pi = Real::pi();
        Real theta = normalize_phase(atan2(-S * b0, p0 * a0));
        Real phi_star = normalize_phase(atan2(-S * b1, pX * a1));
        if (phi_star.is_zero()) phi_star = pi;
        Real h = X / Real(static_cast<long>(steps));
        auto f = [&](std::size_t half_idx, const Real& th) {
            Real s, c;
            sin_cos(th, s, c);
            return (S / pv[half_idx]) * c * c + ((qv[half_idx] + lambda) / S) * s * s;
        };
        for (std::size_t i = 0; i < steps; ++i) {
            Real k1 = f(2 * i, theta);
            Real k2 = f(2 * i + 1, theta + Real(0.5) * h * k1);
            Real k3 = f(2 * i + 1, theta + Real(0.5) * h * k2);
            Real k4 = f(2 * i + 2, theta + h * k3);
            theta += h / Real(6.0) * (k1 + Real(2.0) * k2 + Real(2.0) * k3 + k4);
        }
        return theta - phi_star - pi * Real(static_cast<long>(n) - 1);
    }

    // Integrate (u, v = p u') at a fixed lambda; returns u on the full step
    // grid plus endpoint derivatives.
    struct Shot {
        RVec u;       // steps+1 samples
        Real du0, duX, u0, uX;
    };

    Shot integrate_mode(const Real& lambda, const Real& u0, const Real& du0) const {
        Real h = X / Real(static_cast<long>(steps));
        Real u = u0, v = pv[0] * du0;
        Shot shot;
        shot.u.resize(steps + 1);
        shot.u[0] = u;
        auto fu = [&](std::size_t hi, const Real& vv) { return vv / pv[hi]; };
        auto fv = [&](std::size_t hi, const Real& uu) { return -(qv[hi] + lambda) * uu; };
        for (std::size_t i = 0; i < steps; ++i) {
            Real ku1 = fu(2 * i, v), kv1 = fv(2 * i, u);
            Real u2 = u + Real(0.5) * h * ku1, v2 = v + Real(0.5) * h * kv1;
            Real ku2 = fu(2 * i + 1, v2), kv2 = fv(2 * i + 1, u2);
            Real u3 = u + Real(0.5) * h * ku2, v3 = v + Real(0.5) * h * kv2;
            Real ku3 = fu(2 * i + 1, v3), kv3 = fv(2 * i + 1, u3);
            Real u4 = u + h * ku3, v4 = v + h * kv3;
            Real ku4 = fu(2 * i + 2, v4), kv4 = fv(2 * i + 2, u4);
            u += h / Real(6.0) * (ku1 + Real(2.0) * ku2 + Real(2.0) * ku3 + ku4);
            v += h / Real(6.0) * (kv1 + Real(2.0) * kv2 + Real(2.0) * kv3 + kv4);
            shot.u[i + 1] = u;
        }
        shot.u0 = u0;
        shot.du0 = du0;
        shot.uX = u;
        shot.duX = v / pv[2 * steps];
        return shot;
    }
};

}  // namespace detail

// Shooting solver: bracket each eigenvalue with the monotone phase map at a
// low working precision, then polish by secant at full precision, with a
// Richardson step between two integration grids to cancel the RK4 bias.
inline SpectralBasis solve_sturm_liouville(const SturmLiouvilleProblem& prob, std::size_t n_modes,
                                           std::size_t grid_points = 513,
                                           PrecisionContext ctx = PrecisionContext{}) {
    prob.validate();
    if (n_modes < 1) throw validation_error("solve_sturm_liouville: n_modes must be >= 1");
    if (grid_points < 8 * n_modes + 17)
        throw numeric_error("solve_sturm_liouville: grid too coarse for requested modes (need >= 16 points per wavelength)");
    PrecisionScope scope{ctx};

    Real pi = Real::pi();
    Real L = weighted_length(prob, ctx);
    auto inv_sqrt_p = [&](const Real& x) { return Real(1.0) / sqrt(prob.p(x)); };
    Real ell = integrate_auto(inv_sqrt_p, Real(0.0), prob.X, pow2(-ctx.bits + 16), ctx);

    std::size_t steps = 1;
    while (steps < std::max<std::size_t>(2048, 2 * (grid_points - 1))) steps *= 2;
    detail::PrueferIntegrator fine(prob, steps, ctx.bits);
    detail::PrueferIntegrator half(prob, steps / 2, ctx.bits);
    detail::PrueferIntegrator fine2x(prob, 2 * steps, ctx.bits);
    detail::PrueferIntegrator rough(prob, steps / 2, 96);

    // q may shift the spectrum down; scan from below the asymptotic guess.
    auto guess = [&](std::size_t n) {
        return pi * pi / (ell * ell) * pow(Real(static_cast<long>(n)), 2);
    };
    Real q_max = prob.q(Real(0.0));
    for (int i = 1; i <= 16; ++i) {
        Real qi = prob.q(prob.X * Real(i) / Real(16));
        if (qi > q_max) q_max = qi;
    }

    SpectralBasis basis;
    basis.kind = BasisKind::Numeric;
    basis.length = prob.X;
    basis.weighted_length = L;
    basis.asymptotic_length = ell;
    basis.grid.resize(grid_points);
    for (std::size_t i = 0; i < grid_points; ++i)
        basis.grid[i] = prob.X * Real(static_cast<long>(i)) / Real(static_cast<long>(grid_points - 1));

    for (std::size_t n = 1; n <= n_modes; ++n) {
        // Per-mode fixed phase scale ~ sqrt(lambda_n); keeps RK4 uniformly
        // accurate while preserving monotonicity of the phase in lambda.
        Real scale = sqrt(max(Real(1.0), guess(n) + q_max + Real(1.0)));
        auto miss = [&](const detail::PrueferIntegrator& integ, const Real& lam) {
            return integ.phase_miss(lam, scale, n);
        };
        auto polish = [&](const detail::PrueferIntegrator& integ, Real a, Real b) {
            Real fa = miss(integ, a), fb = miss(integ, b);
            for (int it = 0; it < 40 && !(fb - fa).is_zero(); ++it) {
                Real c = b - fb * (b - a) / (fb - fa);
                if (c == b || c == a) break;
                a = b;
                fa = fb;
                b = c;
                fb = miss(integ, b);
                if (abs(b - a) <= abs(b) * pow2(-integ.bits + 8) + pow2(-integ.bits)) break;
            }
            return b;
        };
        // Bracket at low precision; the phase is increasing in lambda.
        Real lo = -abs(q_max) - Real(1.0);
        Real hi = guess(n) + abs(q_max) + Real(10.0);
        while (miss(rough, hi).sign() < 0) hi = hi * Real(2.0) + Real(10.0);
        while (miss(rough, lo).sign() > 0) lo = lo * Real(2.0) - Real(10.0);
        for (int it = 0; it < 24; ++it) {
            Real mid = (lo + hi) * Real(0.5);
            if (miss(rough, mid).sign() > 0)
                hi = mid;
            else
                lo = mid;
        }
        Real lam_r = polish(rough, lo, hi);
        Real lam_c = polish(half, lam_r - pow2(-20), lam_r + pow2(-21));
        Real lam_f = polish(fine, lam_c - pow2(-24), lam_c + pow2(-25));
        // RK4 is 4th order; Richardson across the two full-precision grids.
        Real lam = lam_f + (lam_f - lam_c) / Real(15.0);
        basis.eigenvalues.push_back(lam);
    }

    for (std::size_t n = 1; n + 1 <= basis.eigenvalues.size(); ++n)
        if (basis.eigenvalues[n] - basis.eigenvalues[n - 1] <
            pow2(-ctx.bits / 4) * (abs(basis.eigenvalues[n]) + Real(1.0)))
            throw numeric_error("solve_sturm_liouville: nearly degenerate eigenvalues");

    // Eigenfunctions: shoot (u, pu') from the left boundary data on two grids,
    // Richardson-extrapolate the samples, normalize by Simpson; deterministic
    // sign via e'(0) > 0, falling back to e(0) > 0.
    for (std::size_t n = 1; n <= n_modes; ++n) {
        Real u0 = -prob.b0, du0 = prob.a0;
        auto s1 = fine.integrate_mode(basis.eigenvalues[n - 1], u0, du0);
        auto s2 = fine2x.integrate_mode(basis.eigenvalues[n - 1], u0, du0);
        RVec u(steps + 1);
        for (std::size_t i = 0; i <= steps; ++i)
            u[i] = s2.u[2 * i] + (s2.u[2 * i] - s1.u[i]) / Real(15.0);
        Real duX = s2.duX + (s2.duX - s1.duX) / Real(15.0);

        Real h = prob.X / Real(static_cast<long>(steps));
        Real acc = u[0] * u[0] + u[steps] * u[steps];
        for (std::size_t i = 1; i < steps; ++i)
            acc += Real((i % 2 == 1) ? 4.0 : 2.0) * u[i] * u[i];
        Real nrm = sqrt(acc * h / Real(3.0));

        Real amp = Real(1.0) / nrm;
        bool flip = (du0.sign() < 0) || (du0.is_zero() && u0.sign() < 0);
        if (flip) amp = -amp;
        RVec row(grid_points);
        if (steps % (grid_points - 1) == 0) {
            std::size_t stride = steps / (grid_points - 1);
            for (std::size_t i = 0; i < grid_points; ++i) row[i] = u[i * stride] * amp;
        } else {
            for (std::size_t i = 0; i < grid_points; ++i) {
                Real pos = Real(static_cast<long>(i)) / Real(static_cast<long>(grid_points - 1)) *
                           Real(static_cast<long>(steps));
                long i0 = std::max(0L, std::min(static_cast<long>(steps) - 1, pos.to_long()));
                Real w = pos - Real(i0);
                row[i] = (u[i0] + w * (u[i0 + 1] - u[i0])) * amp;
            }
        }
        basis.samples.push_back(std::move(row));
        basis.value_at_0.push_back(u0 * amp);
        basis.value_at_X.push_back(s2.uX * amp);
        basis.deriv_at_0.push_back(du0 * amp);
        basis.deriv_at_X.push_back(duX * amp);
    }

    // nu from the top half: mean of sqrt(lambda_n) ell / pi - n.
    {
        Real acc;
        long cnt = 0;
        for (std::size_t n = (n_modes + 1) / 2; n <= n_modes; ++n) {
            const Real& lam = basis.eigenvalues[n - 1];
            if (lam.sign() <= 0) continue;
            acc += sqrt(lam) * ell / pi - Real(static_cast<long>(n));
            ++cnt;
        }
        basis.shift_index = cnt ? acc / Real(cnt) : Real(0.0);
    }
    return basis;
}

// max_n |lambda_n - (pi/L)^2 (n+nu)^2|: the asymptotic-consistency diagnostic.
inline Real asymptotic_residual(const SpectralBasis& b) {
    Real pi = Real::pi();
    Real worst;
    for (std::size_t n = 1; n <= b.size(); ++n) {
        Real pred = pow(pi / b.asymptotic_length, 2) *
                    pow(Real(static_cast<long>(n)) + b.shift_index, 2);
        Real r = abs(b.eigenvalues[n - 1] - pred);
        if (r > worst) worst = r;
    }
    return worst;
}

// Discrete L2 Gram defect of the stored samples (composite Simpson).
inline Real orthonormality_defect(const SpectralBasis& b) {
    std::size_t m = b.grid.size();
    if (m < 3 || b.samples.empty()) return Real(0.0);
    std::size_t intervals = m - 1;
    Real h = b.grid[1] - b.grid[0];
    Real worst;
    for (std::size_t i = 0; i < b.size(); ++i)
        for (std::size_t j = i; j < b.size(); ++j) {
            Real acc = b.samples[i][0] * b.samples[j][0] +
                       b.samples[i][intervals] * b.samples[j][intervals];
            for (std::size_t k = 1; k < intervals; ++k) {
                Real w = (k % 2 == 1) ? Real(4.0) : Real(2.0);
                acc += w * b.samples[i][k] * b.samples[j][k];
            }
            acc = acc * h / Real(3.0);
            Real d = (i == j) ? abs(acc - Real(1.0)) : abs(acc);
            if (d > worst) worst = d;
        }
    return worst;
}

}  // namespace obscost
