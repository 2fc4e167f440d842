#include "qapkit/numeric_kak.hpp"

#include "qapkit/gf2.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>

#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace qapkit {

namespace {

constexpr double kPi = 3.14159265358979323846;

double fro(const CMat &M) { return M.norm(); }

CMat identity(int N) { return CMat::Identity(N, N); }

void require_square(const CMat &U, const char *who) {
    if (U.rows() != U.cols() || U.rows() == 0) throw DimensionError(std::string(who) + ": matrix must be square");
}

void require_unitary(const CMat &U, const char *who, double tol = 1e-8) {
    require_square(U, who);
    double r = fro(U.adjoint() * U - identity(int(U.rows())));
    if (r > tol) throw NumericFailure(std::string(who) + ": input is not unitary", r);
}

// U = phase * Us with det Us = 1.
cplx special_phase(const CMat &U) {
    cplx d = U.determinant();
    return std::pow(d, 1.0 / double(U.rows()));
}

// Orthogonal eigenvectors diagonalizing the commuting real symmetric pair
// (Re W, Im W) of a complex symmetric normal matrix W.
Eigen::MatrixXd simultaneous_real_eigvecs(const CMat &W, double t) {
    Eigen::MatrixXd S = W.real() + t * W.imag();
    S = 0.5 * (S + S.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
    return es.eigenvectors();
}

// Unitary eigenvectors of a normal matrix through the commuting Hermitian
// pair (M + M^dagger)/2 and (M - M^dagger)/2i.
CMat normal_eigvecs(const CMat &M, double t, Eigen::VectorXd *keys = nullptr) {
    CMat H = 0.5 * (M + M.adjoint()) + t * (M - M.adjoint()) / cplx(0, 2);
    H = 0.5 * (H + H.adjoint());
    Eigen::SelfAdjointEigenSolver<CMat> es(H);
    if (keys) *keys = es.eigenvalues();
    return es.eigenvectors();
}

double seeded_shear(std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> u(0.37, 1.73);
    return u(rng);
}

// Principal logarithm of a unitary matrix (eigenphases in (-pi, pi]).
CMat principal_log(const CMat &M, double *residual = nullptr) {
    const int N = int(M.rows());
    Eigen::ComplexEigenSolver<CMat> es(M);
    CMat V = es.eigenvectors();
    // Re-orthonormalize eigenvectors of the normal matrix.
    Eigen::HouseholderQR<CMat> qr(V);
    CMat Qv = qr.householderQ();
    CMat D = Qv.adjoint() * M * Qv;
    CMat L = CMat::Zero(N, N);
    for (int j = 0; j < N; ++j) L(j, j) = cplx(0, std::arg(D(j, j)));
    if (residual) {
        CMat off = D;
        off.diagonal().setZero();
        *residual = fro(off);
    }
    return Qv * L * Qv.adjoint();
}

}  // namespace

// ------------------------------------------------------------------ metrics

CMat metric_matrix(CartanType type, int N, int m) {
    CMat M = CMat::Zero(N, N);
    switch (type) {
        case CartanType::AI:
            return identity(N);
        case CartanType::AII: {
            if (N % 2) throw DimensionError("metric AII needs even N");
            int h = N / 2;
            M.block(0, h, h, h) = identity(h);
            M.block(h, 0, h, h) = -identity(h);
            return M;
        }
        case CartanType::AIII: {
            if (m < 0) m = N / 2;
            if (m > N) throw DimensionError("metric AIII: m exceeds N");
            for (int j = 0; j < N; ++j) M(j, j) = j < m ? 1.0 : -1.0;
            return M;
        }
        default:
            throw std::invalid_argument("metric_matrix: untyped");
    }
}

double metric_residual(const CMat &K, CartanType type, int m) {
    const int N = int(K.rows());
    CMat I = identity(N);
    switch (type) {
        case CartanType::AI:
            return fro(K * K.transpose() - I);
        case CartanType::AII: {
            CMat J = metric_matrix(type, N);
            return fro(K * J * K.transpose() * J.transpose() - I);
        }
        case CartanType::AIII: {
            CMat Imn = metric_matrix(type, N, m);
            return fro(K * Imn * K.adjoint() * Imn - I);
        }
        default:
            throw std::invalid_argument("metric_residual: untyped");
    }
}

// --------------------------------------------------------------------- Haar

CMat haar_unitary(int N, std::mt19937_64 &rng) {
    std::normal_distribution<double> nd(0.0, 1.0);
    CMat Z(N, N);
    for (int j = 0; j < N; ++j) {
        for (int i = 0; i < N; ++i) {
            double re = nd(rng), im = nd(rng);
            Z(i, j) = cplx(re, im);
        }
    }
    Eigen::HouseholderQR<CMat> qr(Z);
    CMat Q = qr.householderQ();
    CMat R = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < N; ++j) {
        cplx d = R(j, j);
        double a = std::abs(d);
        if (a > 0) Q.col(j) *= d / a;
    }
    return Q;
}

CMat haar_special_unitary(int N, std::mt19937_64 &rng) {
    CMat U = haar_unitary(N, rng);
    return U / special_phase(U);
}

// -------------------------------------------------------------- AI: spectral

KAKResult kak_ai(const CMat &U0, const KAKOptions &opt) {
    require_unitary(U0, "kak_ai");
    const int N = int(U0.rows());
    KAKResult res;
    res.type = CartanType::AI;
    res.phase = special_phase(U0);
    const CMat U = U0 / res.phase;
    const CMat W = U * U.transpose();
    std::mt19937_64 rng(opt.seed);
    double best = 1e300;
    for (int attempt = 1; attempt <= opt.max_attempts; ++attempt) {
        Eigen::MatrixXd O = simultaneous_real_eigvecs(W, seeded_shear(rng));
        if (O.determinant() < 0) O.col(0) *= -1.0;
        CMat Oc = O.cast<cplx>();
        CMat D2 = Oc.transpose() * W * Oc;
        CMat off = D2;
        off.diagonal().setZero();
        double offn = fro(off);
        // Square roots with unit product.
        Eigen::VectorXd psi(N);
        for (int j = 0; j < N; ++j) psi(j) = 0.5 * std::arg(D2(j, j));
        CMat A = CMat::Zero(N, N);
        cplx det(1, 0);
        for (int j = 0; j < N; ++j) {
            A(j, j) = std::polar(1.0, psi(j));
            det *= A(j, j);
        }
        if (det.real() < 0) A(0, 0) = -A(0, 0);
        CMat K1 = A.adjoint() * Oc.transpose() * U;
        double rec = fro(U - Oc * A * K1);
        double m1 = metric_residual(K1, CartanType::AI);
        double worst = std::max({offn, rec, m1});
        if (worst < best) {
            best = worst;
            res.K0 = Oc;
            res.A = A * res.phase;
            res.K1 = K1;
            res.attempts = attempt;
        }
        if (worst < opt.tol * 0.01) break;
    }
    res.recomposition = fro(U0 - res.K0 * res.A * res.K1);
    res.metric_k0 = metric_residual(res.K0, CartanType::AI);
    res.metric_k1 = metric_residual(res.K1, CartanType::AI);
    if (std::max(res.metric_k0, res.metric_k1) > opt.tol) {
        throw NumericFailure("kak_ai: metric tolerance not reached", std::max(res.metric_k0, res.metric_k1));
    }
    return res;
}

// ----------------------------------------------------------- AII: symplectic

KAKResult kak_aii(const CMat &U0, const KAKOptions &opt) {
    require_unitary(U0, "kak_aii");
    const int N = int(U0.rows());
    if (N % 2) throw DimensionError("kak_aii: N must be even");
    const int h = N / 2;
    KAKResult res;
    res.type = CartanType::AII;
    res.phase = special_phase(U0);
    const CMat U = U0 / res.phase;
    const CMat J = metric_matrix(CartanType::AII, N);
    const CMat M = U * J * U.transpose() * J.transpose();
    auto tau = [&](const Eigen::VectorXcd &v) -> Eigen::VectorXcd { return J * v.conjugate(); };
    std::mt19937_64 rng(opt.seed);
    double best = 1e300;
    for (int attempt = 1; attempt <= opt.max_attempts; ++attempt) {
        Eigen::VectorXd keys;
        CMat E = normal_eigvecs(M, seeded_shear(rng), &keys);
        // Cluster by eigenvalue of the Hermitian key matrix.
        std::vector<std::vector<int>> clusters;
        for (int j = 0; j < N; ++j) {
            if (j == 0 || std::abs(keys(j) - keys(j - 1)) > 1e-7) clusters.emplace_back();
            clusters.back().push_back(j);
        }
        std::vector<Eigen::VectorXcd> S;  // chosen v_j and tau v_j (orthonormal)
        CMat V(N, h);
        int filled = 0;
        bool bad = false;
        for (const auto &cl : clusters) {
            if (cl.size() % 2) {
                bad = true;
                break;
            }
            for (size_t pick = 0; pick < cl.size() / 2; ++pick) {
                Eigen::VectorXcd bestv;
                double bestn = -1;
                for (int j : cl) {
                    Eigen::VectorXcd x = E.col(j);
                    for (const auto &s : S) x -= s * s.dot(x);
                    double nx = x.norm();
                    if (nx > bestn) {
                        bestn = nx;
                        bestv = x;
                    }
                }
                Eigen::VectorXcd v = bestv / bestn;
                Eigen::VectorXcd tv = tau(v);
                for (const auto &s : S) tv -= s * s.dot(tv);  // numerical cleanup only
                tv.normalize();
                S.push_back(v);
                S.push_back(tv);
                if (filled < h) V.col(filled++) = v;
            }
        }
        if (bad || filled != h) continue;
        CMat K0(N, N);
        K0.leftCols(h) = V;
        K0.rightCols(h) = -J * V.conjugate();
        CMat D2 = K0.adjoint() * M * K0;
        CMat a = CMat::Zero(h, h);
        cplx det(1, 0);
        for (int j = 0; j < h; ++j) {
            a(j, j) = std::polar(1.0, 0.5 * std::arg(D2(j, j)));
            det *= a(j, j);
        }
        if (det.real() < 0) a(0, 0) = -a(0, 0);
        CMat A = CMat::Zero(N, N);
        A.topLeftCorner(h, h) = a;
        A.bottomRightCorner(h, h) = a;
        CMat K1 = A.adjoint() * K0.adjoint() * U;
        double rec = fro(U - K0 * A * K1);
        double worst = std::max({rec, metric_residual(K0, CartanType::AII), metric_residual(K1, CartanType::AII)});
        if (worst < best) {
            best = worst;
            res.K0 = K0;
            res.A = A * res.phase;
            res.K1 = K1;
            res.attempts = attempt;
        }
        if (worst < opt.tol * 0.01) break;
    }
    if (res.K0.size() == 0) throw NumericFailure("kak_aii: no quaternionic eigenbasis found", 1.0);
    res.recomposition = fro(U0 - res.K0 * res.A * res.K1);
    res.metric_k0 = metric_residual(res.K0, CartanType::AII);
    res.metric_k1 = metric_residual(res.K1, CartanType::AII);
    if (std::max(res.metric_k0, res.metric_k1) > opt.tol) {
        throw NumericFailure("kak_aii: metric tolerance not reached", std::max(res.metric_k0, res.metric_k1));
    }
    return res;
}

// --------------------------------------------------------- AIII: cosine-sine

KAKResult kak_aiii(const CMat &U0, int m, int n, const KAKOptions &opt) {
    require_unitary(U0, "kak_aiii");
    const int N = int(U0.rows());
    if (m < 0 || n < 0 || m + n != N) throw DimensionError("kak_aiii: m + n must equal N");
    KAKResult res;
    res.type = CartanType::AIII;
    res.m = m;
    res.n = n;
    res.phase = special_phase(U0);
    const CMat U = U0 / res.phase;
    if (m == 0 || n == 0) {
        res.K0 = U;
        res.A = identity(N) * res.phase;
        res.K1 = identity(N);
    } else if (m < n) {
        // Swap the blocks, factor with (n, m), swap back.
        CMat F = CMat::Zero(N, N);
        for (int j = 0; j < n; ++j) F(j, m + j) = 1;
        for (int j = 0; j < m; ++j) F(n + j, j) = 1;
        KAKResult sw = kak_aiii(F * U * F.adjoint(), n, m, opt);
        res.K0 = F.adjoint() * sw.K0 * F;
        res.A = F.adjoint() * sw.A * F * res.phase;
        res.K1 = F.adjoint() * sw.K1 * F;
    } else {
        CMat x11 = U.block(0, 0, m, m), x12 = U.block(0, m, m, n);
        CMat x21 = U.block(m, 0, n, m), x22 = U.block(m, m, n, n);
        std::vector<double> theta(static_cast<size_t>(n), 0.0);
        CMat u1(m, m), u2(n, n), v1t(m, m), v2t(n, n);
        lapack_int info = LAPACKE_zuncsd(LAPACK_COL_MAJOR, 'Y', 'Y', 'Y', 'Y', 'N', 'D', N, m, m, x11.data(), m,
                                         x12.data(), m, x21.data(), n, x22.data(), n, theta.data(), u1.data(), m,
                                         u2.data(), n, v1t.data(), m, v2t.data(), n);
        if (info != 0) throw NumericFailure("kak_aiii: zuncsd failed with info " + std::to_string(info), 1.0);
        // The LAPACK middle factor pairs top row m-n+j with bottom row j as
        // [[c, -s], [s, c]]; B maps the pair (j, m+j) layout [[c, is], [is, c]]
        // onto it.
        CMat B = CMat::Zero(N, N);
        for (int j = 0; j < n; ++j) B(m - n + j, j) = 1;
        for (int k = 0; k < m - n; ++k) B(k, n + k) = 1;
        for (int j = 0; j < n; ++j) B(m + j, m + j) = cplx(0, -1);
        CMat L = CMat::Zero(N, N), R = CMat::Zero(N, N);
        L.block(0, 0, m, m) = u1;
        L.block(m, m, n, n) = u2;
        R.block(0, 0, m, m) = v1t;
        R.block(m, m, n, n) = v2t;
        CMat A = identity(N);
        for (int j = 0; j < n; ++j) {
            double c = std::cos(theta[size_t(j)]), s = std::sin(theta[size_t(j)]);
            A(j, j) = c;
            A(m + j, m + j) = c;
            A(j, m + j) = cplx(0, s);
            A(m + j, j) = cplx(0, s);
        }
        CMat K0 = L * B, K1 = B.adjoint() * R;
        cplx d0 = K0.determinant();
        cplx c = std::pow(d0, -1.0 / double(N));
        res.K0 = K0 * c;
        res.K1 = K1 / c;
        res.A = A * res.phase;
    }
    res.recomposition = fro(U0 - res.K0 * res.A * res.K1);
    res.metric_k0 = metric_residual(res.K0, CartanType::AIII, m);
    res.metric_k1 = metric_residual(res.K1, CartanType::AIII, m);
    if (std::max(res.metric_k0, res.metric_k1) > opt.tol) {
        throw NumericFailure("kak_aiii: metric tolerance not reached", std::max(res.metric_k0, res.metric_k1));
    }
    return res;
}

KAKResult kak(const CMat &U, CartanType type, int m, int n, const KAKOptions &opt) {
    switch (type) {
        case CartanType::AI:
            return kak_ai(U, opt);
        case CartanType::AII:
            return kak_aii(U, opt);
        case CartanType::AIII: {
            const int N = int(U.rows());
            if (m < 0) m = N / 2;
            if (n < 0) n = N - m;
            return kak_aiii(U, m, n, opt);
        }
        default:
            throw std::invalid_argument("kak: untyped");
    }
}

// ------------------------------------------------------------ Pauli helpers

const CMat &pauli_matrix(int p, uint64_t label) {
    static std::mutex mu;
    static std::map<int, std::vector<CMat>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(p);
    if (it == cache.end()) {
        if (p > kMaxMatrixQubits) throw CapacityError("pauli_matrix: p too large for matrices");
        std::vector<CMat> all;
        for (uint64_t x = 0; x < (uint64_t(1) << (2 * p)); ++x) all.push_back(matrix_of(Spinor::from_label(p, x)));
        it = cache.emplace(p, std::move(all)).first;
    }
    return it->second.at(label);
}

std::vector<double> pauli_coefficients(const CMat &X, int p) {
    const uint64_t count = uint64_t(1) << (2 * p);
    const double N = double(X.rows());
    std::vector<double> y(count);
    CMat Xt = X.transpose();
    for (uint64_t g = 0; g < count; ++g) {
        cplx tr = pauli_matrix(p, g).cwiseProduct(Xt).sum();  // Tr(P_g X)
        y[g] = (tr / cplx(0, N)).real();
    }
    return y;
}

CMat expm_skew(const CMat &X) {
    CMat H = X / cplx(0, 1);
    H = 0.5 * (H + H.adjoint());
    Eigen::SelfAdjointEigenSolver<CMat> es(H);
    Eigen::VectorXcd ph(H.rows());
    for (int j = 0; j < H.rows(); ++j) ph(j) = std::polar(1.0, es.eigenvalues()(j));
    return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

// ------------------------------------------------------------ conjugators

uint64_t CliffordConjugator::apply(uint64_t x) const {
    for (uint64_t g : transvections) {
        if (omega(x, g, p)) x ^= g;
    }
    return x;
}

namespace {

CMat transvection_unitary(int p, uint64_t g) {
    const CMat &P = pauli_matrix(p, g);
    const int N = int(P.rows());
    return (identity(N) + cplx(0, 1) * P) / std::sqrt(2.0);
}

// Transvections sending x to z while fixing every label in `keep`
// (all of which commute with x and z).
std::vector<uint64_t> transvections_to(int p, uint64_t x, uint64_t z, const std::vector<uint64_t> &keep) {
    if (x == z) return {};
    auto fixes = [&](uint64_t g) {
        return std::all_of(keep.begin(), keep.end(), [&](uint64_t k) { return omega(g, k, p) == 0; });
    };
    if (omega(x, z, p) && fixes(x ^ z)) return {x ^ z};
    const uint64_t count = uint64_t(1) << (2 * p);
    for (uint64_t w = 1; w < count; ++w) {
        if (!omega(x, w, p) || !omega(z, w, p)) continue;
        if (!fixes(x ^ w) || !fixes(w ^ z)) continue;
        return {x ^ w, w ^ z};
    }
    throw InternalConsistencyError("transvections_to: no symplectic path");
}

CliffordConjugator assemble(int p, std::vector<uint64_t> tv) {
    CliffordConjugator cc;
    cc.p = p;
    cc.transvections = std::move(tv);
    const int N = 1 << p;
    cc.Q = identity(N);
    for (uint64_t g : cc.transvections) cc.Q = transvection_unitary(p, g) * cc.Q;
    return cc;
}

}  // namespace

CliffordConjugator clifford_mapping(int p, uint64_t from, uint64_t to) {
    if (!from || !to) throw std::invalid_argument("clifford_mapping: identity label");
    return assemble(p, transvections_to(p, from, to, {}));
}

CliffordConjugator synthesize_conjugator(const BiSubalgebra &C) {
    const int p = C.p();
    if (!is_cartan(C)) throw PreconditionError("synthesize_conjugator: not a Cartan subalgebra");
    std::vector<uint64_t> tv, fixed;
    CliffordConjugator partial;
    partial.p = p;
    const auto &basis = C.basis();
    for (size_t j = 0; j < basis.size(); ++j) {
        uint64_t z = uint64_t(1) << (2 * p - 1 - j);  // Z on qubit j
        uint64_t x = partial.apply(basis[j]);
        auto step = transvections_to(p, x, z, fixed);
        for (uint64_t g : step) partial.transvections.push_back(g);
        fixed.push_back(z);
    }
    CliffordConjugator cc = assemble(p, partial.transvections);
    for (uint64_t c : C.elements()) {
        uint64_t img = cc.apply(c);
        if (img & ((uint64_t(1) << p) - 1)) throw InternalConsistencyError("synthesize_conjugator: image not diagonal");
    }
    return cc;
}

CMat apply_involution(const PauliInvolution &inv, const CMat &U, int p) {
    const CMat &P = pauli_matrix(p, inv.h);
    return inv.conj ? CMat(P * U.conjugate() * P) : CMat(P * U * P);
}

IntrinsicFrame intrinsic_frame(const PauliInvolution &inv, int p, const KAKOptions &opt) {
    const int N = 1 << p;
    IntrinsicFrame fr;
    if (!inv.conj) {
        if (inv.h == 0) throw PreconditionError("intrinsic_frame: trivial inner involution");
        fr.type = CartanType::AIII;
        fr.Q = clifford_mapping(p, inv.h, uint64_t(1) << (2 * p - 1)).Q;
        return fr;
    }
    const CMat &W = pauli_matrix(p, inv.h);
    const bool symmetric = fro(W - W.transpose()) < 1e-12;
    std::mt19937_64 rng(opt.seed ^ 0x9e3779b97f4a7c15ULL);
    CMat V;
    if (symmetric) {
        fr.type = CartanType::AI;
        for (int attempt = 0; attempt < opt.max_attempts; ++attempt) {
            Eigen::MatrixXd O = simultaneous_real_eigvecs(W, seeded_shear(rng));
            CMat Oc = O.cast<cplx>();
            CMat D = Oc.transpose() * W * Oc;
            CMat s = CMat::Zero(N, N);
            for (int j = 0; j < N; ++j) s(j, j) = std::polar(1.0, 0.5 * std::arg(D(j, j)));
            V = Oc * s;
            if (fro(V * V.transpose() - W) < 1e-12) break;
        }
    } else {
        fr.type = CartanType::AII;
        const int h = N / 2;
        std::vector<Eigen::VectorXcd> S;
        V = CMat(N, N);
        for (int k = 0; k < h; ++k) {
            Eigen::VectorXcd best;
            double bn = -1;
            for (int e = 0; e < N; ++e) {
                Eigen::VectorXcd x = Eigen::VectorXcd::Unit(N, e);
                for (const auto &s : S) x -= s * s.dot(x);
                if (x.norm() > bn) {
                    bn = x.norm();
                    best = x;
                }
            }
            Eigen::VectorXcd a = best / bn;
            Eigen::VectorXcd b = -W * a.conjugate();
            S.push_back(a);
            S.push_back(b);
            V.col(k) = a;
            V.col(h + k) = b;
        }
    }
    CMat Q = V.adjoint();
    Q *= std::pow(Q.determinant(), -1.0 / double(N));
    fr.Q = Q;
    return fr;
}

// ----------------------------------------------------- generic subgroup KAK

namespace {

// Offsets of the target abelian subspace inside the Pauli frame of a: sign
// vectors v_g with Q P_g Q^dagger = diag(v_g).
struct TorusFrame {
    CMat Q;
    std::vector<Eigen::VectorXd> signs;
};

TorusFrame torus_frame(int p, const std::vector<uint64_t> &a_labels) {
    BiSubalgebra span(p, a_labels);
    BiSubalgebra C = extend_to_cartan(span);
    CliffordConjugator cc = synthesize_conjugator(C);
    TorusFrame tf;
    tf.Q = cc.Q;
    for (uint64_t g : a_labels) {
        CMat D = cc.Q * pauli_matrix(p, g) * cc.Q.adjoint();
        tf.signs.push_back(D.diagonal().real());
    }
    return tf;
}

// Square root A in exp(a) of a torus element D (A^2 = D); returns false when
// the phases cannot be brought into the span of a by 2 pi shifts.
bool torus_sqrt(const CMat &D, const TorusFrame &tf, CMat &A, double &residual) {
    const int N = int(D.rows());
    CMat Dd = tf.Q * D * tf.Q.adjoint();
    Eigen::VectorXd phi(N);
    for (int j = 0; j < N; ++j) phi(j) = std::arg(Dd(j, j));
    // Orthonormal basis of V_a (sign vectors of distinct Z-strings are orthogonal).
    std::vector<Eigen::VectorXd> basis;
    for (const auto &s : tf.signs) basis.push_back(s / std::sqrt(double(N)));
    auto project = [&](const Eigen::VectorXd &v) {
        Eigen::VectorXd out = Eigen::VectorXd::Zero(N);
        for (const auto &b : basis) out += b * b.dot(v);
        return out;
    };
    double best = 1e300;
    Eigen::VectorXd bestpsi;
    int bestw = 1 << 30;
    // Integer shifts n in {-1,0,1}^N, scanned in lexicographic order.
    std::vector<int> nvec(size_t(N), -1);
    const long total = long(std::pow(3.0, N));
    for (long code = 0; code < total; ++code) {
        long c = code;
        int w = 0;
        Eigen::VectorXd v = phi;
        for (int j = 0; j < N; ++j) {
            int nj = int(c % 3) - 1;
            c /= 3;
            v(j) += 2 * kPi * nj;
            w += std::abs(nj);
        }
        Eigen::VectorXd pv = project(v);
        double r = (v - pv).norm();
        if (r < best - 1e-9 || (std::abs(r - best) <= 1e-9 && w < bestw)) {
            best = r;
            bestw = w;
            bestpsi = pv;
        }
    }
    residual = best;
    if (bestpsi.size() == 0) return false;
    Eigen::VectorXcd half(N);
    for (int j = 0; j < N; ++j) half(j) = std::polar(1.0, 0.5 * bestpsi(j));
    A = tf.Q.adjoint() * half.asDiagonal() * tf.Q;
    return best < 1e-7;
}

// Order-two elements of the torus exp(a). In the frame, exp(a) is
// diag(exp(i pi B c)) with B the sign vectors as columns; its two-torsion is
// L / 2L for the lattice L = {c : B c in Z^N}. L is computed as d / N with
// d in {d in Z^r : beta_j . d = 0 mod N for every row beta_j of B}, one row
// congruence at a time by unimodular reduction of the basis.
std::vector<CMat> torus_involutions(const TorusFrame &tf) {
    const int N = int(tf.Q.rows());
    const int r = int(tf.signs.size());
    if (r == 0 || r > 16) return {};
    using IVec = std::vector<int64_t>;
    std::vector<IVec> basis(size_t(r), IVec(size_t(r), 0));
    for (int i = 0; i < r; ++i) basis[size_t(i)][size_t(i)] = 1;
    auto mod = [N](int64_t x) { return ((x % N) + N) % N; };
    for (int j = 0; j < N; ++j) {
        auto value = [&](const IVec &d) {
            int64_t v = 0;
            for (int g = 0; g < r; ++g) v += int64_t(std::lround(tf.signs[size_t(g)](j))) * d[size_t(g)];
            return mod(v);
        };
        // Euclid on the residues: afterwards only basis[0] has a nonzero residue.
        while (true) {
            int piv = -1;
            int64_t pv = 0;
            for (int i = 0; i < r; ++i) {
                int64_t v = value(basis[size_t(i)]);
                if (v != 0 && (piv < 0 || v < pv)) {
                    piv = i;
                    pv = v;
                }
            }
            if (piv < 0) break;
            std::swap(basis[0], basis[size_t(piv)]);
            bool reduced = false;
            for (int i = 1; i < r; ++i) {
                int64_t v = value(basis[size_t(i)]);
                if (v == 0) continue;
                int64_t q = v / pv;
                for (int g = 0; g < r; ++g) basis[size_t(i)][size_t(g)] -= q * basis[0][size_t(g)];
                reduced = true;
            }
            if (!reduced) {
                int64_t mult = N / std::gcd(pv, int64_t(N));
                for (auto &x : basis[0]) x *= mult;
                break;
            }
        }
    }
    std::vector<CMat> out;
    for (uint64_t mask = 0; mask < (uint64_t(1) << r); ++mask) {
        Eigen::VectorXd c = Eigen::VectorXd::Zero(r);
        for (int i = 0; i < r; ++i) {
            if ((mask >> i) & 1) {
                for (int g = 0; g < r; ++g) c(g) += double(basis[size_t(i)][size_t(g)]) / N;
            }
        }
        Eigen::VectorXcd d(N);
        for (int j = 0; j < N; ++j) {
            double n = 0;
            for (int g = 0; g < r; ++g) n += tf.signs[size_t(g)](j) * c(g);
            d(j) = (std::lround(n) % 2 == 0) ? 1.0 : -1.0;
        }
        out.push_back(tf.Q.adjoint() * d.asDiagonal() * tf.Q);
    }
    return out;
}

}  // namespace

double identity_component_defect(const CMat &K, int p, const std::vector<uint64_t> &t_labels) {
    double lres = 0;
    CMat L = principal_log(K, &lres);
    auto y = pauli_coefficients(L, p);
    std::vector<char> in_t(y.size(), 0);
    for (uint64_t g : t_labels) in_t[g] = 1;
    double d = 0;
    for (size_t g = 0; g < y.size(); ++g) {
        if (!in_t[g]) d += y[g] * y[g];
    }
    return std::sqrt(d) + lres;
}

SubgroupKAK kak_in_subgroup(const CMat &K, int p, const std::vector<PauliInvolution> &involutions,
                            const std::vector<uint64_t> &t_labels, const std::vector<uint64_t> &a_labels,
                            const KAKOptions &opt) {
    if (involutions.empty()) throw std::invalid_argument("kak_in_subgroup: no involution");
    if (a_labels.empty()) throw PreconditionError("kak_in_subgroup: empty abelian subalgebra");
    const int N = 1 << p;
    require_square(K, "kak_in_subgroup");
    if (K.rows() != N) throw DimensionError("kak_in_subgroup: dimension mismatch");
    const PauliInvolution &theta = involutions.back();
    std::mt19937_64 rng(opt.seed);

    // M = K theta(K)^{-1} = k A^2 k^{-1} is sought with k in exp(t); the
    // conjugated D = k^{-1} M k must lie in the commutative algebra spanned
    // by the Pauli group generated by a. Working on M directly (rather than
    // its logarithm) keeps eigenvalues at -1 harmless.
    const CMat M = K * apply_involution(theta, K, p).adjoint();
    const uint64_t count = uint64_t(1) << (2 * p);
    auto group = gf2::span_elements(gf2::rref(a_labels));
    std::vector<char> in_group(count, 0);
    for (uint64_t g : group) in_group[g] = 1;
    std::vector<uint64_t> off;  // residual coordinates
    for (uint64_t g = 1; g < count; ++g) {
        if (!in_group[g]) off.push_back(g);
    }
    const int nt = int(t_labels.size());
    std::vector<CMat> T;
    for (uint64_t g : t_labels) T.push_back(cplx(0, 1) * pauli_matrix(p, g));

    auto residual_of = [&](const CMat &Y) {
        Eigen::VectorXd r(Eigen::Index(2 * off.size()));
        CMat Yt = Y.transpose();
        for (size_t i = 0; i < off.size(); ++i) {
            cplx c = pauli_matrix(p, off[i]).cwiseProduct(Yt).sum() / double(N);
            r(Eigen::Index(2 * i)) = c.real();
            r(Eigen::Index(2 * i + 1)) = c.imag();
        }
        return r;
    };

    const double target = 1e-14;
    TorusFrame tf = torus_frame(p, a_labels);

    SubgroupKAK out;
    double best_score = 1e300;
    std::normal_distribution<double> nd(0.0, 1.0);
    for (int attempt = 0; attempt < std::max(1, opt.max_attempts) * 2; ++attempt) {
        CMat k = identity(N);
        if (attempt > 0 && nt > 0) {
            CMat G = CMat::Zero(N, N);
            for (int i = 0; i < nt; ++i) G += nd(rng) * T[size_t(i)];
            k = expm_skew(G);
        }
        double mu = 1e-3;
        int it = 0;
        CMat D = k.adjoint() * M * k;
        Eigen::VectorXd r = residual_of(D);
        for (; it < 400 && r.norm() > target && nt > 0; ++it) {
            Eigen::MatrixXd Jm(r.size(), nt);
            for (int i = 0; i < nt; ++i) {
                CMat dD = D * T[size_t(i)] - T[size_t(i)] * D;  // derivative of exp(-dT) D exp(dT)
                Jm.col(i) = residual_of(dD);
            }
            Eigen::MatrixXd JtJ = Jm.transpose() * Jm;
            Eigen::VectorXd g = Jm.transpose() * r;
            bool accepted = false;
            for (int tries = 0; tries < 30 && !accepted; ++tries) {
                Eigen::MatrixXd Aug = JtJ;
                Aug.diagonal().array() += mu * (1.0 + JtJ.diagonal().array());
                Eigen::VectorXd delta = -Aug.ldlt().solve(g);
                CMat G = CMat::Zero(N, N);
                for (int i = 0; i < nt; ++i) G += delta(i) * T[size_t(i)];
                CMat kn = k * expm_skew(G);
                CMat Dn = kn.adjoint() * M * kn;
                Eigen::VectorXd rn = residual_of(Dn);
                if (rn.norm() < r.norm()) {
                    k = kn;
                    D = Dn;
                    r = rn;
                    mu = std::max(mu / 5.0, 1e-15);
                    accepted = true;
                } else {
                    mu *= 8.0;
                }
            }
            if (!accepted) break;
        }
        out.iterations += it;
        if (r.norm() > 1e-10) continue;
        CMat A;
        double lat = 0;
        if (!torus_sqrt(D, tf, A, lat)) continue;
        CMat K1 = A.adjoint() * k.adjoint() * K;
        // Pick the square root of D that puts K1 in the identity component.
        double comp = identity_component_defect(K1, p, t_labels);
        if (comp > 1e-8) {
            for (const CMat &f : torus_involutions(tf)) {
                CMat K1f = f * K1;
                double cf = identity_component_defect(K1f, p, t_labels);
                if (cf < comp) {
                    comp = cf;
                    K1 = K1f;
                    A = A * f;
                }
                if (comp <= 1e-8) break;
            }
        }
        double cons = 0;
        for (const auto &inv : involutions) {
            cons = std::max(cons, fro(apply_involution(inv, K1, p) - K1));
            cons = std::max(cons, fro(apply_involution(inv, k, p) - k));
        }
        double rec = fro(K - k * A * K1);
        double score = std::max(cons, rec);
        if (score < best_score) {
            best_score = score;
            out.K0 = k;
            out.A = A;
            out.K1 = K1;
            out.recomposition = rec;
            out.constraint = cons;
            out.component_defect = comp;
            out.attempts = attempt + 1;
        }
        if (score < opt.tol * 0.01) break;
    }
    if (out.K0.size() == 0) {
        throw NumericFailure("kak_in_subgroup: no factorization found", best_score > 1e299 ? 1.0 : best_score);
    }
    return out;
}


// ------------------------------------------------------------ factor tree

std::string FactorTree::index_string(int l, size_t j) {
    std::string s;
    for (int b = l - 1; b >= 0; --b) s.push_back(((j >> b) & 1) ? '1' : '0');
    return s;
}

CMat FactorTree::recompose() const {
    if (K.empty()) return CMat();
    std::vector<CMat> cur = K.back();
    for (int l = int(K.size()) - 1; l >= 1; --l) {
        std::vector<CMat> up(cur.size() / 2);
        for (size_t j = 0; j < up.size(); ++j) up[j] = cur[2 * j] * A[size_t(l - 1)][j] * cur[2 * j + 1];
        cur = std::move(up);
    }
    return cur.front();
}

double FactorTree::recomposition_residual() const {
    if (K.size() != size_t(depth + 1) || K.back().size() != (size_t(1) << depth)) return 1e300;
    return fro(root - recompose());
}

double FactorTree::max_constraint_residual() const {
    double m = 0;
    for (const auto &lvl : node_constraint) {
        for (double v : lvl) m = std::max(m, v);
    }
    return m;
}

size_t FactorTree::a_factor_count() const {
    size_t c = 0;
    for (const auto &l : A) c += l.size();
    return c;
}

FactorTree factorize_sequence(const CMat &U, const DecompositionSequence &seq, const KAKOptions &opt) {
    const QAPartition &P = *seq.partition;
    const int p = P.p();
    const int N = 1 << p;
    require_unitary(U, "factorize_sequence");
    if (U.rows() != N) throw DimensionError("factorize_sequence: dimension mismatch");
    FactorTree tree;
    tree.p = p;
    tree.depth = seq.length();
    tree.root = U;
    tree.K.push_back({U});
    tree.node_constraint.push_back({0.0});
    std::vector<PauliInvolution> invs;
    for (int l = 1; l <= seq.length(); ++l) {
        Decomposition D = seq.level(l);
        invs.push_back(involution_of(P, seq.forms[size_t(l - 1)]));
        TypeDecision td = decide_type(D);
        std::string ts;
        for (CartanType t : td.admissible) ts += (ts.empty() ? "" : "|") + type_name(t);
        tree.level_types.push_back(ts);
        std::vector<CMat> nextK, levelA;
        std::vector<double> cons;
        try {
            if (l == 1) {
                IntrinsicFrame fr = intrinsic_frame(invs[0], p, opt);
                KAKResult r = kak(fr.Q * U * fr.Q.adjoint(), fr.type, N / 2, N / 2, opt);
                CMat K0 = fr.Q.adjoint() * r.K0 * fr.Q;
                CMat A = fr.Q.adjoint() * r.A * fr.Q;
                CMat K1 = fr.Q.adjoint() * r.K1 * fr.Q;
                nextK = {K0, K1};
                levelA = {A};
            } else {
                std::vector<uint64_t> a = maximal_abelian_in_p(D).generators;
                std::vector<uint64_t> t = D.t_generators();
                KAKOptions o = opt;
                for (size_t j = 0; j < tree.K.back().size(); ++j) {
                    o.seed = opt.seed + 7919 * uint64_t(l) + j;
                    SubgroupKAK s = kak_in_subgroup(tree.K.back()[j], p, invs, t, a, o);
                    nextK.push_back(s.K0);
                    nextK.push_back(s.K1);
                    levelA.push_back(s.A);
                }
            }
        } catch (const std::exception &e) {
            tree.ok = false;
            tree.failed_level = l;
            tree.failure = e.what();
            return tree;
        }
        for (const CMat &Kn : nextK) {
            double c = 0;
            for (const auto &inv : invs) c = std::max(c, fro(apply_involution(inv, Kn, p) - Kn));
            cons.push_back(c);
        }
        tree.K.push_back(std::move(nextK));
        tree.A.push_back(std::move(levelA));
        tree.node_constraint.push_back(std::move(cons));
    }
    tree.ok = tree.recomposition_residual() < 1e-7 && tree.max_constraint_residual() < opt.tol;
    if (!tree.ok) tree.failure = "residuals above tolerance";
    return tree;
}

// ------------------------------------------------------------ Weyl trick

namespace {

// Real least-squares residual of X against the real span of `basis`.
double real_span_residual(const CMat &X, const std::vector<CMat> &basis) {
    const Eigen::Index n2 = X.size();
    if (basis.empty()) return fro(X);
    Eigen::MatrixXd B(2 * n2, Eigen::Index(basis.size()));
    for (size_t j = 0; j < basis.size(); ++j) {
        Eigen::Map<const Eigen::VectorXcd> v(basis[j].data(), n2);
        B.col(Eigen::Index(j)) << v.real(), v.imag();
    }
    Eigen::Map<const Eigen::VectorXcd> x(X.data(), n2);
    Eigen::VectorXd xv(2 * n2);
    xv << x.real(), x.imag();
    Eigen::VectorXd c = B.colPivHouseholderQr().solve(xv);
    return (B * c - xv).norm();
}

}  // namespace

WeylCheck weyl_trick_matrices(const std::vector<CMat> &t_basis, const std::vector<CMat> &p_basis) {
    if (t_basis.empty() || p_basis.empty()) throw PreconditionError("weyl_trick: not a decomposition (empty t or p)");
    std::vector<CMat> ip;
    for (const CMat &X : p_basis) ip.push_back(cplx(0, 1) * X);
    WeylCheck w;
    const double tol = 1e-9;
    auto bracket = [](const CMat &a, const CMat &b) { return CMat(a * b - b * a); };
    for (size_t i = 0; i < t_basis.size(); ++i) {
        for (size_t j = i + 1; j < t_basis.size(); ++j) {
            double r = real_span_residual(bracket(t_basis[i], t_basis[j]), t_basis);
            w.max_violation = std::max(w.max_violation, r);
            if (r > tol) w.tt = false;
        }
        for (const CMat &Y : ip) {
            double r = real_span_residual(bracket(t_basis[i], Y), ip);
            w.max_violation = std::max(w.max_violation, r);
            if (r > tol) w.tp = false;
        }
    }
    for (size_t i = 0; i < ip.size(); ++i) {
        for (size_t j = i + 1; j < ip.size(); ++j) {
            double r = real_span_residual(bracket(ip[i], ip[j]), t_basis);
            w.max_violation = std::max(w.max_violation, r);
            if (r > tol) w.pp = false;
        }
    }
    return w;
}

WeylCheck weyl_trick(const Decomposition &D) {
    const int p = D.source->p();
    std::vector<CMat> t, q;
    for (uint64_t g : D.t_generators()) t.push_back(cplx(0, 1) * pauli_matrix(p, g));
    for (uint64_t g : D.p_generators()) q.push_back(cplx(0, 1) * pauli_matrix(p, g));
    return weyl_trick_matrices(t, q);
}

WeylCheck weyl_trick(const DividedDecomposition &D) {
    const int N = D.div->N();
    std::vector<CMat> t, q;
    for (const auto &g : D.t_generators()) t.push_back(cplx(0, 1) * matrix_of(g, N));
    for (const auto &g : D.p_generators()) q.push_back(cplx(0, 1) * matrix_of(g, N));
    return weyl_trick_matrices(t, q);
}

// ------------------------------------------------------------- matrix I/O

std::string format_complex(cplx z) {
    std::ostringstream os;
    os << std::setprecision(17) << z.real() << (z.imag() < 0 || std::signbit(z.imag()) ? "-" : "+")
       << std::abs(z.imag()) << "i";
    return os.str();
}

cplx parse_complex(const std::string &s0) {
    std::string s;
    for (char c : s0) {
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    }
    if (s.empty()) throw std::invalid_argument("parse_complex: empty literal");
    auto num = [&](const std::string &t) -> double {
        if (t.empty() || t == "+") return 1.0;
        if (t == "-") return -1.0;
        size_t pos = 0;
        double v = std::stod(t, &pos);
        if (pos != t.size()) throw std::invalid_argument("parse_complex: bad literal '" + s0 + "'");
        return v;
    };
    if (s.back() != 'i' && s.back() != 'j') return {num(s), 0.0};
    std::string body = s.substr(0, s.size() - 1);
    // Split at the last sign that is not part of an exponent.
    size_t split = std::string::npos;
    for (size_t k = body.size(); k-- > 1;) {
        if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
            split = k;
            break;
        }
    }
    if (split == std::string::npos) return {0.0, num(body)};
    return {num(body.substr(0, split)), num(body.substr(split))};
}

CMat read_matrix(std::istream &in) {
    long N = 0;
    if (!(in >> N) || N <= 0) throw std::invalid_argument("read_matrix: missing dimension");
    CMat M(N, N);
    for (long i = 0; i < N; ++i) {
        for (long j = 0; j < N; ++j) {
            std::string tok;
            if (!(in >> tok)) throw std::invalid_argument("read_matrix: truncated matrix");
            M(i, j) = parse_complex(tok);
        }
    }
    return M;
}

CMat read_matrix_file(const std::string &path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("read_matrix_file: cannot open " + path);
    return read_matrix(f);
}

void write_matrix(std::ostream &out, const CMat &M) {
    out << M.rows() << "\n";
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        for (Eigen::Index j = 0; j < M.cols(); ++j) out << (j ? " " : "") << format_complex(M(i, j));
        out << "\n";
    }
}

}  // namespace qapkit
