#include "pdm/killing.hpp"

#include "pdm/errors.hpp"

namespace pdm {

namespace {

int eps(int a, int b, int c) {
    if (a == b || b == c || a == c) return 0;
    return ((a == 0 && b == 1) || (a == 1 && b == 2) || (a == 2 && b == 0)) ? 1 : -1;
}

Expr q(const mpq_class& v) { return Expr(Gauss(v)); }
Expr X(int a) { return Expr::x(a + 1); }
int delta(int a, int b) { return a == b ? 1 : 0; }

void validate_traceless(const Mat3& m, const char* name) {
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            if (m[a][b] != m[b][a]) throw InvalidParams(std::string(name) + " is not symmetric");
    if (m[0][0] + m[1][1] + m[2][2] != 0) throw InvalidParams(std::string(name) + " is not traceless");
}

Expr dot(const Vec3& v) {
    Expr s;
    for (int c = 0; c < 3; ++c)
        if (v[c] != 0) s += q(v[c]) * X(c);
    return s;
}

/// lambda^{cd} x^c x^d
Expr quad(const Mat3& m) {
    Expr s;
    for (int c = 0; c < 3; ++c)
        for (int d = 0; d < 3; ++d)
            if (m[c][d] != 0) s += q(m[c][d]) * X(c) * X(d);
    return s;
}

/// lambda^{ac} x^c
Expr row(const Mat3& m, int a) {
    Expr s;
    for (int c = 0; c < 3; ++c)
        if (m[a][c] != 0) s += q(m[a][c]) * X(c);
    return s;
}

bool zero_vec(const Vec3& v) { return v[0] == 0 && v[1] == 0 && v[2] == 0; }
bool zero_mat(const Mat3& m) {
    for (const auto& r : m)
        for (const auto& e : r)
            if (e != 0) return false;
    return true;
}

}  // namespace

KillingParams KillingParams::only(int family, KillingVariant v) {
    KillingParams p;
    for (auto& w : p.weights) w = 0;
    p.weights[static_cast<std::size_t>(family)] = 1;
    p.variant = v;
    return p;
}

KillingTensor operator+(const KillingTensor& a, const KillingTensor& b) {
    KillingTensor t;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) t[i][j] = a[i][j] + b[i][j];
    return t;
}

KillingTensor scale(const KillingTensor& a, const Expr& c) {
    KillingTensor t;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) t[i][j] = c * a[i][j];
    return t;
}

KillingTensor family_tensor(int m, const KillingParams& p) {
    const bool corrected = p.variant == KillingVariant::Corrected;
    const Expr r2(Poly::r_squared());
    KillingTensor mu{};
    auto each = [&](auto fn) {
        for (int a = 0; a < 3; ++a)
            for (int b = a; b < 3; ++b) {
                mu[a][b] = fn(a, b);
                mu[b][a] = mu[a][b];
            }
    };
    switch (m) {
        case 0:
            each([&](int a, int b) { return a == b ? p.g : Expr(); });
            break;
        case 1:
            each([&](int a, int b) { return q(p.lambda1[a][b]); });
            break;
        case 2: {
            const Vec3& tv = corrected ? p.lambda2 : p.mu2_trace_vector;
            const Expr tr = dot(tv);
            each([&](int a, int b) {
                Expr e = q(p.lambda2[a]) * X(b) + q(p.lambda2[b]) * X(a);
                if (a == b) e -= Expr(2) * tr;
                return e;
            });
            break;
        }
        case 3:
            each([&](int a, int b) {
                Expr e;
                for (int c = 0; c < 3; ++c)
                    for (int d = 0; d < 3; ++d) {
                        const int s1 = eps(a, c, d), s2 = eps(b, c, d);
                        const mpq_class coef = s1 * p.lambda3[c][b] + s2 * p.lambda3[c][a];
                        if (coef != 0) e += q(coef) * X(d);
                    }
                return e;
            });
            break;
        case 4:
            each([&](int a, int b) {
                Expr e;
                for (int c = 0; c < 3; ++c)
                    for (int d = 0; d < 3; ++d) {
                        if (p.lambda4[d] == 0) continue;
                        Expr t;
                        if (eps(b, c, d)) t += Expr(eps(b, c, d)) * X(a);
                        if (eps(a, c, d)) t += Expr(eps(a, c, d)) * X(b);
                        e += t * X(c) * q(p.lambda4[d]);
                    }
                return e;
            });
            break;
        case 5:
            each([&](int a, int b) {
                Expr e = q(p.k) * X(a) * X(b);
                if (a == b) e += (Expr(1) - q(p.k)) * r2;
                return e;
            });
            break;
        case 6: {
            const Mat3& l5 = corrected ? p.lambda6 : p.lambda5;
            const Expr qq = quad(p.lambda6);
            each([&](int a, int b) {
                Expr e = q(p.lambda6[a][b]) * r2 - X(a) * row(p.lambda6, b) - X(b) * row(l5, a);
                if (a == b) e -= qq;
                return e;
            });
            break;
        }
        case 7: {
            const Expr lx = dot(p.lambda7);
            each([&](int a, int b) {
                Expr e = (X(a) * q(p.lambda7[b]) + X(b) * q(p.lambda7[a])) * r2 - Expr(4) * X(a) * X(b) * lx;
                if (a == b) e += lx * r2;
                return e;
            });
            break;
        }
        case 8:
            each([&](int a, int b) {
                Expr e;
                for (int c = 0; c < 3; ++c) {
                    for (int d = 0; d < 3; ++d) {
                        Expr t;
                        if (eps(b, c, d)) t += Expr(eps(b, c, d)) * X(a);
                        if (eps(a, c, d)) t += Expr(eps(a, c, d)) * X(b);
                        if (t.is_zero()) continue;
                        e += Expr(2) * t * X(c) * row(p.lambda8, d);
                    }
                    mpq_class coef = 0;
                    for (int k = 0; k < 3; ++k) coef += eps(a, c, k) * p.lambda8[b][k] + eps(b, c, k) * p.lambda8[a][k];
                    if (coef != 0) e -= q(coef) * X(c) * r2;
                }
                return e;
            });
            break;
        case 9: {
            const Expr qq = quad(p.lambda9);
            each([&](int a, int b) {
                Expr e = q(p.lambda9[a][b]) * r2 * r2 -
                         Expr(2) * (X(a) * row(p.lambda9, b) + X(b) * row(p.lambda9, a)) * r2 +
                         (Expr(4) * X(a) * X(b) + Expr(delta(a, b)) * r2) * qq;
                if (a == b) e += qq * r2;
                return e;
            });
            break;
        }
        default:
            throw InvalidParams("family index must be 0..9");
    }
    return mu;
}

KillingTensor build(const KillingParams& p) {
    validate_traceless(p.lambda1, "lambda1");
    validate_traceless(p.lambda3, "lambda3");
    validate_traceless(p.lambda6, "lambda6");
    validate_traceless(p.lambda8, "lambda8");
    validate_traceless(p.lambda9, "lambda9");
    if (p.variant == KillingVariant::Printed) validate_traceless(p.lambda5, "lambda5");
    KillingTensor mu{};
    for (int m = 0; m < 10; ++m) {
        const mpq_class& w = p.weights[static_cast<std::size_t>(m)];
        if (w == 0) continue;
        // skip families whose slots are all zero (except mu_5, which is affine in k)
        if ((m == 0 && p.g.is_zero()) || (m == 1 && zero_mat(p.lambda1)) ||
            (m == 2 && zero_vec(p.lambda2) && (p.variant == KillingVariant::Corrected || zero_vec(p.mu2_trace_vector))) ||
            (m == 3 && zero_mat(p.lambda3)) || (m == 4 && zero_vec(p.lambda4)) ||
            (m == 6 && zero_mat(p.lambda6) && (p.variant == KillingVariant::Corrected || zero_mat(p.lambda5))) ||
            (m == 7 && zero_vec(p.lambda7)) || (m == 8 && zero_mat(p.lambda8)) || (m == 9 && zero_mat(p.lambda9)))
            continue;
        mu = mu + scale(family_tensor(m, p), q(w));
    }
    return mu;
}

std::optional<int> family_degree(int m) {
    static const int deg[10] = {-1, 0, 1, 1, 2, 2, 2, 3, 3, 4};
    if (m <= 0 || m > 9) return std::nullopt;
    return deg[m];
}

Rank3 conformal_killing_residual(const KillingTensor& mu) {
    // d[a][b][c] = d mu^{ab} / d x_c
    Rank3 d{};
    for (int a = 0; a < 3; ++a)
        for (int b = a; b < 3; ++b)
            for (int c = 0; c < 3; ++c) {
                d[a][b][c] = differentiate(mu[a][b], c + 1);
                d[b][a][c] = d[a][b][c];
            }
    std::array<Expr, 3> v;  // mu^{nn}_c + 2 mu^{cn}_n
    for (int c = 0; c < 3; ++c) {
        Expr s;
        for (int n = 0; n < 3; ++n) s += d[n][n][c] + Expr(2) * d[c][n][n];
        v[c] = s;
    }
    Rank3 res{};
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            for (int c = 0; c < 3; ++c) {
                Expr e = Expr(5) * (d[a][b][c] + d[a][c][b] + d[b][c][a]);
                if (a == b) e -= v[c];
                if (b == c) e -= v[a];
                if (a == c) e -= v[b];
                res[a][b][c] = e;
            }
    return res;
}

bool is_zero(const Rank3& t) {
    for (const auto& p : t)
        for (const auto& r : p)
            for (const auto& e : r)
                if (!e.is_zero()) return false;
    return true;
}

bool is_zero(const KillingTensor& t) {
    for (const auto& r : t)
        for (const auto& e : r)
            if (!e.is_zero()) return false;
    return true;
}

std::optional<int> homogeneity_degree(const KillingTensor& mu) {
    std::optional<int> deg;
    for (int a = 0; a < 3; ++a)
        for (int b = a; b < 3; ++b) {
            const Expr& e = mu[a][b];
            if (e.is_zero()) continue;
            Expr euler;
            for (int c = 1; c <= 3; ++c) euler += Expr::x(c) * differentiate(e, c);
            const Expr ratio = euler / e;
            if (!ratio.is_constant() || !ratio.constant_value().is_real()) return std::nullopt;
            const mpq_class n = ratio.constant_value().re();
            if (n.get_den() != 1) return std::nullopt;
            const int ni = static_cast<int>(n.get_num().get_si());
            if (deg && *deg != ni) return std::nullopt;
            deg = ni;
        }
    return deg;
}

const std::array<Mat3, 5>& traceless_basis() {
    static const std::array<Mat3, 5> basis = [] {
        std::array<Mat3, 5> b{};
        b[0][0][0] = 1;
        b[0][2][2] = -1;
        b[1][1][1] = 1;
        b[1][2][2] = -1;
        b[2][0][1] = b[2][1][0] = 1;
        b[3][0][2] = b[3][2][0] = 1;
        b[4][1][2] = b[4][2][1] = 1;
        return b;
    }();
    return basis;
}

namespace {
mpq_class small_rational(std::mt19937_64& rng) {
    std::uniform_int_distribution<long> num(-5, 5), den(1, 3);
    mpq_class v(num(rng), den(rng));
    v.canonicalize();
    return v;
}
}  // namespace

Mat3 random_traceless(std::mt19937_64& rng) {
    Mat3 m{};
    for (const auto& b : traceless_basis()) {
        const mpq_class c = small_rational(rng);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) m[i][j] += c * b[i][j];
    }
    return m;
}

Vec3 random_vector(std::mt19937_64& rng) { return {small_rational(rng), small_rational(rng), small_rational(rng)}; }

void randomize_family(KillingParams& p, int m, std::mt19937_64& rng) {
    switch (m) {
        case 1: p.lambda1 = random_traceless(rng); break;
        case 2:
            p.lambda2 = random_vector(rng);
            p.mu2_trace_vector = random_vector(rng);
            break;
        case 3: p.lambda3 = random_traceless(rng); break;
        case 4: p.lambda4 = random_vector(rng); break;
        case 5: p.k = small_rational(rng); break;
        case 6:
            p.lambda6 = random_traceless(rng);
            p.lambda5 = random_traceless(rng);
            break;
        case 7: p.lambda7 = random_vector(rng); break;
        case 8: p.lambda8 = random_traceless(rng); break;
        case 9: p.lambda9 = random_traceless(rng); break;
        default: break;
    }
}

}  // namespace pdm
