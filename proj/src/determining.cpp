#include "pdm/determining.hpp"

#include "pdm/errors.hpp"

namespace pdm {

namespace {

using Grad = std::array<Expr, 3>;

Grad gradient(const Expr& e) {
    return {differentiate(e, 1), differentiate(e, 2), differentiate(e, 3)};
}

/// d[a][b][c] = mu^{ab}_c
Rank3 tensor_gradient(const KillingTensor& mu) {
    Rank3 d{};
    for (int a = 0; a < 3; ++a)
        for (int b = a; b < 3; ++b)
            for (int c = 0; c < 3; ++c) {
                d[a][b][c] = differentiate(mu[a][b], c + 1);
                d[b][a][c] = d[a][b][c];
            }
    return d;
}

Grad divergence(const Rank3& d) {
    Grad v;
    for (int a = 0; a < 3; ++a) v[a] = d[a][0][0] + d[a][1][1] + d[a][2][2];
    return v;
}

Rank3 cyclic_sum(const Rank3& q) {
    Rank3 s{};
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            for (int c = 0; c < 3; ++c) s[a][b][c] = q[a][b][c] + q[b][c][a] + q[c][a][b];
    return s;
}

}  // namespace

bool is_zero(const Vec3Expr& v) { return v[0].is_zero() && v[1].is_zero() && v[2].is_zero(); }

Vec3Expr residual_m1(const Expr& f, const KillingTensor& mu) {
    const Rank3 d = tensor_gradient(mu);
    const Grad fg = gradient(f);
    Vec3Expr out;
    for (int a = 0; a < 3; ++a) {
        Expr s, t;
        for (int n = 0; n < 3; ++n) {
            s += d[n][n][a] + Expr(2) * d[n][a][n];
            t += mu[a][n] * fg[n];
        }
        out[a] = s * f - Expr(5) * t;
    }
    return out;
}

Vec3Expr residual_m2(const Expr& f, const Expr& V, const KillingTensor& mu, const Expr& eta) {
    const Grad vg = gradient(V), eg = gradient(eta);
    Vec3Expr out;
    for (int a = 0; a < 3; ++a) {
        Expr s;
        for (int b = 0; b < 3; ++b) s += mu[a][b] * vg[b];
        out[a] = s - f * eg[a];
    }
    return out;
}

Vec3Expr anomaly(const Expr& f, const KillingTensor& mu) {
    const Grad div = divergence(tensor_gradient(mu));
    const Grad fg = gradient(f);
    std::array<Grad, 3> f2;  // f_ab
    for (int a = 0; a < 3; ++a) f2[a] = gradient(fg[a]);
    std::array<Grad, 3> ddiv;  // d_b (div mu)_a
    for (int a = 0; a < 3; ++a) ddiv[a] = gradient(div[a]);
    Vec3Expr out;
    for (int a = 0; a < 3; ++a) {
        Expr lap;
        for (int b = 0; b < 3; ++b) lap += differentiate(ddiv[a][b], b + 1);
        Expr e = f * lap;
        for (int b = 0; b < 3; ++b) {
            e += fg[b] * ddiv[a][b] - f2[a][b] * div[b];
            for (int c = 0; c < 3; ++c) {
                if (mu[b][c].is_zero()) continue;
                e -= mu[b][c] * differentiate(f2[a][b], c + 1);
            }
        }
        out[a] = e;
    }
    return out;
}

Vec3Expr residual_m2_completed(const Expr& f, const Expr& V, const KillingTensor& mu, const Expr& eta) {
    Vec3Expr m2 = residual_m2(f, V, mu, eta);
    const Vec3Expr r = anomaly(f, mu);
    for (int a = 0; a < 3; ++a) m2[a] += Expr::rational(1, 2) * r[a];
    return m2;
}

TrilinearTensors qabc(const Expr& f, const KillingTensor& mu) {
    const Rank3 d = tensor_gradient(mu);
    const Grad fg = gradient(f);
    TrilinearTensors t;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            for (int c = 0; c < 3; ++c) {
                Expr e = (mu[a][c] * fg[b] - d[a][b][c]) * f;
                if (a == b) {
                    for (int n = 0; n < 3; ++n) e += mu[a][n] * fg[n] - d[a][n][n] * f;
                }
                t.q[a][b][c] = e;
            }
    t.cyclic = cyclic_sum(t.q);
    return t;
}

TrilinearTensors qabc_corrected(const Expr& f, const KillingTensor& mu) {
    const Rank3 d = tensor_gradient(mu);
    const Grad fg = gradient(f);
    TrilinearTensors t;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            for (int c = 0; c < 3; ++c) {
                Expr e = f * d[a][b][c];
                if (a == b)
                    for (int n = 0; n < 3; ++n) e -= mu[c][n] * fg[n];
                t.q[a][b][c] = e;
            }
    t.cyclic = cyclic_sum(t.q);
    return t;
}

DiffOp integral_commutator(const Expr& f, const Expr& V, const KillingTensor& mu, const Expr& eta) {
    return commutator(hamiltonian(f, V), from_second_order(mu, eta));
}

DeterminingResidual check_all(const Expr& f, const Expr& V, const KillingTensor& mu, const Expr& eta,
                              bool waive_m0) {
    if (f.is_zero()) throw InvalidParams("f must be nonzero");
    DeterminingResidual r;
    r.m0_waived = waive_m0;
    if (!waive_m0) {
        r.m0 = conformal_killing_residual(mu);
        r.m0_zero = is_zero(r.m0);
    }
    r.m1 = residual_m1(f, mu);
    r.m2 = residual_m2(f, V, mu, eta);
    r.anomaly = anomaly(f, mu);
    for (int a = 0; a < 3; ++a) r.m2_completed[a] = r.m2[a] + Expr::rational(1, 2) * r.anomaly[a];
    r.m1_zero = is_zero(r.m1);
    r.m2_printed_zero = is_zero(r.m2);
    r.m2_zero = is_zero(r.m2_completed);
    r.commutator_zero = integral_commutator(f, V, mu, eta).is_zero();
    const bool equations = r.m0_zero && r.m1_zero && r.m2_zero;
    r.printed_all_zero = r.m0_zero && r.m1_zero && r.m2_printed_zero;
    if (!is_zero(r.anomaly))
        r.warnings.push_back("potential condition carries a nonzero f-dependent anomaly term");
    bool waiver_misused = false;
    if (waive_m0 && !r.commutator_zero) {
        r.m0 = conformal_killing_residual(mu);
        if (!is_zero(r.m0)) {
            waiver_misused = true;
            r.m0_zero = false;
            r.printed_all_zero = false;
            r.warnings.push_back("conformal Killing condition was waived but mu does not satisfy it");
        }
    }
    if (equations != r.commutator_zero && !waiver_misused)
        throw InternalError("determining equations disagree with the direct commutator");
    r.all_zero = r.commutator_zero;
    return r;
}

}  // namespace pdm
