#include <gtest/gtest.h>

#include <random>

#include "obscost/linalg.hpp"
#include "obscost/precision.hpp"
#include "obscost/quadrature.hpp"

using namespace obscost;

namespace {

HermitianMatrix random_hermitian(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    HermitianMatrix m(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            if (i == j)
                m.set(i, j, Complex(u(rng)));
            else
                m.set(i, j, Complex(u(rng), u(rng)));
        }
    return m;
}

// || M - V diag(lambda) V^H ||_F relative to ||M||_F.
Real reconstruction_error(const HermitianMatrix& m, const EigenDecomposition& dec) {
    std::size_t n = m.order();
    Real err;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            Complex s;
            for (std::size_t k = 0; k < n; ++k)
                s += dec.values[k] * dec.vectors[k][i] * conj(dec.vectors[k][j]);
            err += norm2(s - m.at(i, j));
        }
    return sqrt(err) / m.frobenius();
}

Real max_offdiag_gram(const EigenDecomposition& dec) {
    std::size_t n = dec.values.size();
    Real worst;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            Complex s;
            for (std::size_t i = 0; i < n; ++i) s += conj(dec.vectors[a][i]) * dec.vectors[b][i];
            if (a == b) s -= Complex(1.0);
            Real v = abs(s);
            if (v > worst) worst = v;
        }
    return worst;
}

}  // namespace

TEST(Real, ArithmeticAndPrecision) {
    PrecisionContext ctx{256};
    PrecisionScope scope{ctx};
    Real a(1.0), b(3.0);
    Real third = a / b;
    EXPECT_EQ(third.precision(), 256);
    // 1/3 rounds, but 3 * (1/3) is within one ulp of 1.
    EXPECT_LE(abs(b * third - a), pow2(-250));
    EXPECT_LT(Real(2.0), Real(3.0));
    EXPECT_EQ((Real(2.0) + Real(2.0)), Real(4.0));
}

TEST(Real, Reproducible) {
    PrecisionScope scope{PrecisionContext{256}};
    Real x = exp(sqrt(Real(2.0)) * Real::pi());
    Real y = exp(sqrt(Real(2.0)) * Real::pi());
    EXPECT_EQ(x, y);
    EXPECT_EQ(x.str(), y.str());
}

TEST(Complex, Basics) {
    PrecisionScope scope{PrecisionContext{128}};
    Complex z(3.0, 4.0);
    EXPECT_EQ(abs(z), Real(5.0));
    Complex w = z / z;
    EXPECT_LE(abs(w - Complex(1.0)), pow2(-120));
    Complex r = expi(Real::pi() / Real(2.0));
    EXPECT_LE(abs(r - Complex(0.0, 1.0)), pow2(-120));
}

TEST(EigHermitian, IdentityOrder3) {
    PrecisionContext ctx{256};
    HermitianMatrix m(3);
    for (int i = 0; i < 3; ++i) m.set(i, i, Complex(1.0));
    auto dec = eig_hermitian(m, ctx);
    for (int i = 0; i < 3; ++i) EXPECT_LE(abs(dec.values[i] - Real(1.0)), pow2(-250));
}

TEST(EigHermitian, DiagonalAscending) {
    PrecisionContext ctx{256};
    HermitianMatrix m(2);
    m.set(0, 0, Complex(2.0));
    m.set(1, 1, Complex(-1.0));
    auto dec = eig_hermitian(m, ctx);
    EXPECT_EQ(dec.values[0], Real(-1.0));
    EXPECT_EQ(dec.values[1], Real(2.0));
}

TEST(EigHermitian, RandomRoundTrip256Bits) {
    PrecisionContext ctx{256};
    auto m = random_hermitian(8, 20240817u);
    auto dec = eig_hermitian(m, ctx);
    EXPECT_LE(reconstruction_error(m, dec), pow2(-200));
    EXPECT_LE(max_offdiag_gram(dec), pow2(-200));
    for (std::size_t k = 0; k + 1 < 8; ++k) EXPECT_LE(dec.values[k], dec.values[k + 1]);
}

TEST(EigHermitian, TraceMatchesEigenvalueSum) {
    PrecisionContext ctx{256};
    auto m = random_hermitian(10, 7u);
    auto dec = eig_hermitian(m, ctx);
    Real sum;
    for (const auto& v : dec.values) sum += v;
    EXPECT_LE(abs(sum - m.trace()), pow2(-128) * m.frobenius());
}

TEST(EigHermitian, ResidualPerPair) {
    PrecisionContext ctx{256};
    auto m = random_hermitian(6, 99u);
    auto dec = eig_hermitian(m, ctx);
    Real bound = pow2(-128) * m.frobenius();
    for (std::size_t k = 0; k < 6; ++k) {
        CVec mv = m.apply(dec.vectors[k]);
        Real r;
        for (std::size_t i = 0; i < 6; ++i) r += norm2(mv[i] - dec.values[k] * dec.vectors[k][i]);
        EXPECT_LE(sqrt(r), bound);
    }
}

TEST(EigHermitian, DoublingBitsNeverWorsens) {
    auto m64 = random_hermitian(6, 5u);
    auto d1 = eig_hermitian(m64, PrecisionContext{128});
    auto d2 = eig_hermitian(m64, PrecisionContext{256});
    Real e1 = reconstruction_error(m64, d1);
    Real e2 = reconstruction_error(m64, d2);
    EXPECT_LE(e2, e1);
}

TEST(EigHermitian, RejectsNonHermitian) {
    PrecisionContext ctx{128};
    PrecisionScope scope{ctx};
    CVec e{Complex(1.0), Complex(0.5, 0.25), Complex(0.5, -0.26), Complex(2.0)};
    auto broken = HermitianMatrix::from_entries(2, std::move(e));
    EXPECT_GT(broken.hermiticity_defect(), Real(0.0));
    EXPECT_THROW(eig_hermitian(broken, ctx), validation_error);

    HermitianMatrix m(2);
    m.set(0, 0, Complex(1.0));
    m.set(1, 1, Complex(2.0));
    m.set(0, 1, Complex(0.5, 0.25));
    EXPECT_EQ(m.hermiticity_defect(), Real(0.0));
    EXPECT_EQ(eig_hermitian(m, ctx).values.size(), 2u);
}

TEST(GaussLegendre, PolynomialExactness) {
    PrecisionContext ctx{256};
    auto f = [](const Real& x) { return x * x; };
    Real v = gauss_legendre(f, Real(0.0), Real(1.0), 2, ctx);
    EXPECT_LE(abs(v - Real(1.0) / Real(3.0)), pow2(-250));
}

TEST(GaussLegendre, SinSquaredPiHalf) {
    PrecisionContext ctx{256};
    PrecisionScope scope{ctx};
    auto f = [](const Real& x) {
        Real s = sin(x);
        return s * s;
    };
    Real v = gauss_legendre(f, Real(0.0), Real::pi(), 64, ctx);
    Real target = Real::pi() / Real(2.0);
    // >= 60 decimal digits
    EXPECT_LE(abs(v - target) / target, Real(1e-60));
}

TEST(GaussLegendre, ConstantIntegral) {
    PrecisionContext ctx{128};
    auto f = [](const Real&) { return Real(1.0); };
    Real v = gauss_legendre(f, Real(-1.0), Real(1.0), 4, ctx);
    EXPECT_LE(abs(v - Real(2.0)), pow2(-120));
}

TEST(GaussLegendre, RejectsZeroNodes) {
    PrecisionContext ctx{128};
    auto f = [](const Real& x) { return x; };
    EXPECT_THROW(gauss_legendre(f, Real(0.0), Real(1.0), 0, ctx), validation_error);
}

TEST(GaussLegendre, DoubledNodesAgreeOnAnalytic) {
    PrecisionContext ctx{256};
    PrecisionScope scope{ctx};
    auto f = [](const Real& x) { return exp(-x * x) * cos(Real(3.0) * x); };
    Real a(-2.0), b(2.0);
    Real v64 = gauss_legendre(f, a, b, 64, ctx);
    Real v128 = gauss_legendre(f, a, b, 128, ctx);
    EXPECT_LE(abs(v64 - v128), Real(1e-60));
}

TEST(GaussLegendre, AutoAndPanelsAgree) {
    PrecisionContext ctx{256};
    PrecisionScope scope{ctx};
    auto f = [](const Real& x) { return cos(Real(40.0) * x) * exp(x); };
    Real a(0.0), b(3.0);
    Real v1 = integrate_auto(f, a, b, Real(1e-50), ctx);
    Real v2 = integrate_panels(f, a, b, Real(1e-50), ctx);
    EXPECT_LE(abs(v1 - v2), Real(1e-45));
}

TEST(GaussLegendre, ComplexIntegrand) {
    PrecisionContext ctx{256};
    PrecisionScope scope{ctx};
    // integral_0^1 e^{i w t} dt = (e^{i w} - 1)/(i w)
    Real w(7.0);
    auto f = [&](const Real& t) { return expi(w * t); };
    Complex v = integrate_auto(f, Real(0.0), Real(1.0), Real(1e-60), ctx);
    Complex expected = (expi(w) - Complex(1.0)) / Complex(Real(0.0), w);
    EXPECT_LE(abs(v - expected), Real(1e-55));
}
