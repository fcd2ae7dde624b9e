#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "obscost/precision.hpp"

namespace obscost {

// Dense Hermitian matrix, row-major full storage. set() mirrors the
// conjugate entry so entries[j][k] == conj(entries[k][j]) holds exactly.
class HermitianMatrix {
  public:
    explicit HermitianMatrix(std::size_t n) : n_(n), a_(n * n) {
        if (n == 0) throw validation_error("HermitianMatrix: order must be >= 1");
    }

    // Raw row-major entries, not symmetrized; eig_hermitian validates.
    static HermitianMatrix from_entries(std::size_t n, CVec entries) {
        if (entries.size() != n * n)
            throw validation_error("HermitianMatrix::from_entries: size mismatch");
        HermitianMatrix m(n);
        m.a_ = std::move(entries);
        return m;
    }

    std::size_t order() const { return n_; }

    const Complex& at(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

    void set(std::size_t i, std::size_t j, Complex z) {
        if (i == j) z.im = Real(0.0);
        a_[i * n_ + j] = z;
        if (i != j) a_[j * n_ + i] = conj(z);
    }

    Real frobenius() const {
        Real s;
        for (const auto& z : a_) s += norm2(z);
        return sqrt(s);
    }

    Real trace() const {
        Real s;
        for (std::size_t i = 0; i < n_; ++i) s += at(i, i).re;
        return s;
    }

    // Largest |a_ij - conj(a_ji)|; zero when built through set().
    Real hermiticity_defect() const {
        Real worst;
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = i; j < n_; ++j) {
                Real d = abs(at(i, j) - conj(at(j, i)));
                if (d > worst) worst = d;
            }
        return worst;
    }

    CVec apply(const CVec& x) const {
        CVec y(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            Complex s;
            for (std::size_t j = 0; j < n_; ++j) s += at(i, j) * x[j];
            y[i] = s;
        }
        return y;
    }

  private:
    std::size_t n_;
    CVec a_;
};

struct EigenDecomposition {
    RVec values;                    // ascending
    std::vector<CVec> vectors;     // vectors[k] is the unit eigenvector of values[k]
};

// Cyclic Jacobi for complex Hermitian matrices. A 2x2 pivot (p,q) with
// a_pq = r e^{i phi} is reduced to the real case by the phase diag(1, e^{-i phi})
// and annihilated with the stable tangent formula t = sgn(tau)/(|tau| + sqrt(1+tau^2)),
// tau = (a_qq - a_pp)/(2r). Robust at any precision; adequate for orders <= ~200.
inline EigenDecomposition eig_hermitian(const HermitianMatrix& m, PrecisionContext ctx) {
    PrecisionScope scope{ctx};
    const std::size_t n = m.order();

    Real fro = m.frobenius();
    Real herm_tol = (fro + Real(1.0)) * pow2(-ctx.bits + 6);
    if (m.hermiticity_defect() > herm_tol)
        throw validation_error("eig_hermitian: input is not Hermitian");

    // Work on copies at context precision.
    std::vector<CVec> a(n, CVec(n)), v(n, CVec(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            a[i][j] = m.at(i, j);
            v[i][j] = Complex(i == j ? 1.0 : 0.0);
        }

    Real thresh = fro * pow2(-ctx.bits + 4) + pow2(-4 * ctx.bits);
    const int max_sweeps = 64;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        Real off;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                Real r2 = norm2(a[p][q]);
                off += r2;
            }
        off = sqrt(Real(2.0) * off);
        if (off <= thresh) break;
        if (sweep == max_sweeps - 1) throw numeric_error("eig_hermitian: Jacobi did not converge");

        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                Real r = abs(a[p][q]);
                if (!(r > thresh / Real(static_cast<long>(n * n)))) continue;
                Complex e = a[p][q] / r;      // e^{i phi}
                Real tau = (a[q][q].re - a[p][p].re) / (Real(2.0) * r);
                Real t;
                if (tau.is_zero()) {
                    t = Real(1.0);
                } else {
                    Real den = abs(tau) + hypot(Real(1.0), tau);
                    t = (tau.sign() > 0 ? Real(1.0) : Real(-1.0)) / den;
                }
                Real c = Real(1.0) / hypot(Real(1.0), t);
                Real s = t * c;
                // U = [[c, s],[-s conj(e), c conj(e)]] on coordinates (p,q);
                // the phase diag(1, conj(e)) makes the pivot real, the real
                // rotation annihilates it.
                Complex se = s * e;
                Complex sec = s * conj(e);
                Complex ce = c * e;
                Complex cec = c * conj(e);

                // A <- A U  (columns p,q), V <- V U.
                for (std::size_t i = 0; i < n; ++i) {
                    Complex aip = a[i][p], aiq = a[i][q];
                    a[i][p] = c * aip - sec * aiq;
                    a[i][q] = s * aip + cec * aiq;
                    Complex vip = v[i][p], viq = v[i][q];
                    v[i][p] = c * vip - sec * viq;
                    v[i][q] = s * vip + cec * viq;
                }
                // A <- U^H A  (rows p,q).
                for (std::size_t j = 0; j < n; ++j) {
                    Complex apj = a[p][j], aqj = a[q][j];
                    a[p][j] = c * apj - se * aqj;
                    a[q][j] = s * apj + ce * aqj;
                }
                a[p][q] = Complex(0.0);
                a[q][p] = Complex(0.0);
                a[p][p].im = Real(0.0);
                a[q][q].im = Real(0.0);
            }
    }

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::sort(perm.begin(), perm.end(),
              [&](std::size_t i, std::size_t j) { return a[i][i].re < a[j][j].re; });

    EigenDecomposition dec;
    dec.values.reserve(n);
    dec.vectors.assign(n, CVec(n));
    for (std::size_t k = 0; k < n; ++k) {
        dec.values.push_back(a[perm[k]][perm[k]].re);
        for (std::size_t i = 0; i < n; ++i) dec.vectors[k][i] = v[i][perm[k]];
    }
    return dec;
}

// Solve H x = b for Hermitian positive definite H through the spectral
// decomposition; throws when the smallest eigenvalue is not resolvable at the
// working precision (the caller sees a degenerate-Gramian failure).
inline CVec solve_hermitian_spd(const HermitianMatrix& h, const CVec& b, PrecisionContext ctx,
                                const EigenDecomposition* pre = nullptr) {
    PrecisionScope scope{ctx};
    EigenDecomposition local;
    if (!pre) {
        local = eig_hermitian(h, ctx);
        pre = &local;
    }
    const auto& dec = *pre;
    std::size_t n = h.order();
    Real lmax = dec.values.back();
    Real floor_tol = lmax * pow2(-ctx.bits + 24);
    if (!(dec.values.front() > floor_tol))
        throw numeric_error("solve_hermitian_spd: matrix numerically singular at this precision");
    CVec x(n);
    for (std::size_t k = 0; k < n; ++k) {
        Complex proj;
        for (std::size_t i = 0; i < n; ++i) proj += conj(dec.vectors[k][i]) * b[i];
        Complex scale = proj / dec.values[k];
        for (std::size_t i = 0; i < n; ++i) x[i] += scale * dec.vectors[k][i];
    }
    return x;
}

}  // namespace obscost
