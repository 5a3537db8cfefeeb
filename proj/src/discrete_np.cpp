#include "elastonp/discrete_np.hpp"

#include <cmath>
#include <numbers>

namespace elastonp {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

// Quadrature weights for the periodic log kernel: with n equispaced nodes,
// integral of ln(4 sin^2((t_i - t)/2)) f(t) dt ~= sum_j R[(i-j) mod n] f(t_j).
VecX log_weights(int n) {
    const int half = n / 2;
    VecX r(n);
    for (int d = 0; d < n; ++d) {
        const double th = kTwoPi * d / n;
        double s = 0.0;
        for (int m = 1; m < half; ++m) s += std::cos(m * th) / m;
        r[d] = -(2.0 * kTwoPi / n) * s -
               (2.0 * kTwoPi / (n * static_cast<double>(n))) * std::cos(half * th);
    }
    return r;
}

// Circulant weights for the Cauchy kernel cot((s - t_i)/2) / 2: exact on trig
// polynomials below the Nyquist mode (whose odd symbol is set to zero; the NP
// matrices are dealiased at that mode separately).
VecX cot_weights(int n) {
    const int half = n / 2;
    VecX c(n);
    for (int d = 0; d < n; ++d) {
        const double th = kTwoPi * d / n;
        double s = 0.0;
        for (int m = 1; m < half; ++m) s += std::sin(m * th);
        c[d] = -(kTwoPi / n) * s;
    }
    return c;
}

// Smooth remainder of the log kernel: ln( |x_i - x_j| / (2 |sin((w_i-w_j)/2)|) ),
// with diagonal limit ln(speed_i).
double log_smooth_part(const BoundaryCurve& c, int i, int j) {
    if (i == j) return std::log(c.speed(i));
    const double dist = (c.node(i) - c.node(j)).norm();
    const double s = 2.0 * std::abs(std::sin(0.5 * (c.parameter(i) - c.parameter(j))));
    return std::log(dist / s);
}

// r_hat r_hat^T with tangential diagonal limit.
Mat2 unit_outer(const BoundaryCurve& c, int i, int j) {
    if (i == j) {
        const Vec2 t = c.tangent(i);
        return t * t.transpose();
    }
    const Vec2 r = c.node(i) - c.node(j);
    return (r * r.transpose()) / r.squaredNorm();
}

// Projector onto parameter modes |m| <= keep (per scalar component).
MatX mode_projector(int n, int keep) {
    MatX p = MatX::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double s = 1.0;
            for (int m = 1; m <= keep; ++m) s += 2.0 * std::cos(m * kTwoPi * (i - j) / n);
            s /= n;
            p(2 * i, 2 * j) += s;
            p(2 * i + 1, 2 * j + 1) += s;
        }
    }
    return p;
}

// Trigonometric interpolation matrix from an n-node grid to the 2n-node grid
// (per scalar component). Columns are the coarse cardinal functions with the
// Nyquist cosine halved.
MatX coarse_to_fine(int n) {
    const int nf = 2 * n;
    const int half = n / 2;
    MatX e(nf, n);
    for (int i = 0; i < nf; ++i) {
        for (int j = 0; j < n; ++j) {
            const double d = kTwoPi * i / nf - kTwoPi * j / n;
            double s = 1.0;
            for (int m = 1; m < half; ++m) s += 2.0 * std::cos(m * d);
            s += std::cos(half * d);
            e(i, j) = s / n;
        }
    }
    return e;
}
}  // namespace

double DiscreteNP::pairing(const VecX& a, const VecX& b) const {
    double s = 0.0;
    for (int k = 0; k < curve.size(); ++k)
        s += curve.weight(k) * (a[2 * k] * b[2 * k] + a[2 * k + 1] * b[2 * k + 1]);
    return s;
}

double DiscreteNP::star_product(const VecX& a, const VecX& b) const {
    return a.dot(gram * b);
}

Vec2 DiscreteNP::psi_field(int j, const Vec2& x) const {
    // raw rigid motions: (1,0), (0,1), (y,-x)
    const Vec2 r0(1.0, 0.0), r1(0.0, 1.0), r2(x[1], -x[0]);
    return psi_coeff(0, j) * r0 + psi_coeff(1, j) * r1 + psi_coeff(2, j) * r2;
}

namespace {
struct RawOperators {
    MatX single_layer, np, np_adjoint;
};

// Nystrom matrices on one grid. The log part of S uses the periodic
// log-weight correction. The Cauchy part subtracts the pole: the integrand
// (kernel times arclength factor) behaves like Res * cot((s - t)/2)/2 near
// the diagonal with
//   Res = +- k1w J / (2 pi)  (source/target side),
// and the analytic remainder has diagonal value
//   +- k1w cross(n, gamma'') J / (4 pi |gamma'|).
// The cot factor gets exact circulant weights, remainders plain trapezoid.
RawOperators assemble_raw(const LameParams& params, const BoundaryCurve& curve) {
    const int n = curve.size();
    const int dim = 2 * n;
    const double h = curve.step();
    const double a1 = params.alpha1(), a2 = params.alpha2();
    const double k1w = -params.mu / (2.0 * params.mu + params.lambda);

    RawOperators out{MatX::Zero(dim, dim), MatX::Zero(dim, dim), MatX::Zero(dim, dim)};
    const VecX logw = log_weights(n);
    const VecX cotw = cot_weights(n);
    const Mat2 jrot = (Mat2() << 0.0, 1.0, -1.0, 0.0).finished();

    parallel_for(n, [&](int i) {
        const double cross_i = curve.normal(i)[0] * curve.second(i)[1] -
                               curve.normal(i)[1] * curve.second(i)[0];
        const Mat2 res_k = k1w / kTwoPi * jrot;        // source-side pole strength
        const Mat2 res_ks = -k1w / kTwoPi * jrot;      // target-side pole strength
        for (int j = 0; j < n; ++j) {
            const double wj = curve.weight(j);

            // --- single layer ---
            const double lg = 0.5 * logw[(i - j + n) % n] + h * log_smooth_part(curve, i, j);
            Mat2 sblk = (a1 / kTwoPi) * lg * curve.speed(j) * Mat2::Identity() -
                        (a2 / kTwoPi) * wj * unit_outer(curve, i, j);
            out.single_layer.block<2, 2>(2 * i, 2 * j) = sblk;

            // --- NP operators: bounded kernel part, plain trapezoid ---
            Mat2 kreg, ksreg;
            if (i == j) {
                kreg = ksreg =
                    traction_regular_diagonal(params, curve.diag_curvature(i), curve.tangent(i));
            } else {
                kreg = kernel_split(params, curve.node(i), curve.node(j), curve.normal(j)).k2_part;
                // adjoint kernel: displacement x-y, normal at the target i
                const Vec2 d = curve.node(i) - curve.node(j);
                const Vec2& nx = curve.normal(i);
                const double r2 = d.squaredNorm(), dn = d.dot(nx);
                ksreg = -k1w * dn / (kTwoPi * r2) * Mat2::Identity() +
                        (2.0 * (params.mu + params.lambda) / (2.0 * params.mu + params.lambda)) *
                            dn / (kTwoPi * r2 * r2) * (d * d.transpose());
            }

            // --- Cauchy part: cot circulant on the pole + trapezoid remainder ---
            Mat2 c_k, c_ks;  // remainder values (integrand incl. arclength factor)
            if (i == j) {
                c_k = k1w * cross_i / (2.0 * kTwoPi * curve.speed(i)) * jrot;
                c_ks = -c_k;
            } else {
                const double cothalf =
                    0.5 / std::tan(0.5 * (curve.parameter(j) - curve.parameter(i)));
                const Vec2 d = curve.node(j) - curve.node(i);  // source-side orientation
                const double r2 = d.squaredNorm();
                const Vec2& ny = curve.normal(j);
                c_k = k1w * curve.speed(j) / (kTwoPi * r2) *
                          (ny * d.transpose() - d * ny.transpose()) -
                      cothalf * res_k;
                const Vec2& nx = curve.normal(i);
                c_ks = k1w * curve.speed(j) / (kTwoPi * r2) *
                           (nx * (-d).transpose() - (-d) * nx.transpose()) -
                       cothalf * res_ks;
            }
            const double cw = cotw[(i - j + n) % n];

            // K acts on traces through the transposed traction matrix (the
            // generalized double-layer kernel); the rigid-motion identity
            // K f = f/2 selects this orientation, and K* below is then its
            // duality adjoint. Bounded parts are symmetric, so only the
            // Cauchy pieces feel the transpose.
            out.np.block<2, 2>(2 * i, 2 * j) =
                wj * kreg.transpose() + (cw * res_k + h * c_k).transpose();
            out.np_adjoint.block<2, 2>(2 * i, 2 * j) = wj * ksreg + cw * res_ks + h * c_ks;
        }
    });
    return out;
}
}  // namespace

DiscreteNP assemble(const LameParams& params, const BoundaryCurve& curve) {
    const int n = curve.size();
    const int dim = 2 * n;

    DiscreteNP out{params, curve, MatX(), MatX(), MatX(), MatX(), MatX(),
                   Eigen::LLT<MatX>(), MatX(), Eigen::Matrix3d::Zero(), MatX()};

    // Assemble on a twice-refined grid and compress in the Galerkin sense,
    // A_c = W_c^{-1} E^T W_f A_f E with E the trigonometric interpolation:
    // each quadrature rule is exact only on roughly half of its own grid's
    // band, so the refined band covers the coarse one fully. The Galerkin
    // form keeps W_c A_c exactly symmetric whenever W_f A_f is, which the
    // gram construction needs.
    {
        const BoundaryCurve fine = curve.refined(2 * n);
        const RawOperators raw = assemble_raw(params, fine);
        const MatX e1 = coarse_to_fine(n);
        MatX interp = MatX::Zero(4 * n, dim);  // per-component expansion
        for (int i = 0; i < 2 * n; ++i)
            for (int j = 0; j < n; ++j) {
                interp(2 * i, 2 * j) = e1(i, j);
                interp(2 * i + 1, 2 * j + 1) = e1(i, j);
            }
        VecX wf(4 * n), wc_inv(dim);
        for (int i = 0; i < 2 * n; ++i) wf[2 * i] = wf[2 * i + 1] = fine.weight(i);
        for (int i = 0; i < n; ++i)
            wc_inv[2 * i] = wc_inv[2 * i + 1] = 1.0 / curve.weight(i);
        const MatX lift = wf.asDiagonal() * interp;  // W_f E
        auto compress = [&](const MatX& a_fine) {
            return MatX(wc_inv.asDiagonal() * (lift.transpose() * (a_fine * interp)));
        };
        out.single_layer = compress(raw.single_layer);
        out.np = compress(raw.np);
        out.np_adjoint = compress(raw.np_adjoint);
    }

    // --- rigid motion traces, orthonormal under the duality pairing ---
    MatX raw(dim, 3);
    for (int k = 0; k < n; ++k) {
        raw(2 * k, 0) = 1.0;
        raw(2 * k + 1, 0) = 0.0;
        raw(2 * k, 1) = 0.0;
        raw(2 * k + 1, 1) = 1.0;
        raw(2 * k, 2) = curve.node(k)[1];
        raw(2 * k + 1, 2) = -curve.node(k)[0];
    }
    out.psi_basis = MatX(dim, 3);
    Eigen::Matrix3d coef = Eigen::Matrix3d::Identity();
    for (int j = 0; j < 3; ++j) {
        VecX v = raw.col(j);
        Eigen::Vector3d cj = Eigen::Vector3d::Zero();
        cj[j] = 1.0;
        for (int i = 0; i < j; ++i) {
            const double pr = out.pairing(out.psi_basis.col(i), raw.col(j));
            v -= pr * out.psi_basis.col(i);
            cj -= pr * coef.col(i);
        }
        const double nrm = std::sqrt(out.pairing(v, v));
        if (!(nrm > 0.0)) throw std::runtime_error("assemble: degenerate rigid motion basis");
        out.psi_basis.col(j) = v / nrm;
        coef.col(j) = cj / nrm;
    }
    out.psi_coeff = coef;

    // --- W basis: bordered solve of (1/2 I - K*) phi~ = (-1/2 I + K*) f on the
    //     complement of the rigid-motion traces ---
    MatX big = MatX::Zero(dim + 3, dim + 3);
    big.topLeftCorner(dim, dim) = 0.5 * MatX::Identity(dim, dim) - out.np_adjoint;
    MatX wf(dim, 3);  // duality-weighted traces
    for (int j = 0; j < 3; ++j)
        for (int k = 0; k < n; ++k) {
            wf(2 * k, j) = curve.weight(k) * out.psi_basis(2 * k, j);
            wf(2 * k + 1, j) = curve.weight(k) * out.psi_basis(2 * k + 1, j);
        }
    big.topRightCorner(dim, 3) = out.psi_basis;
    big.bottomLeftCorner(3, dim) = wf.transpose();
    Eigen::PartialPivLU<MatX> biglu(big);
    out.w_basis = MatX(dim, 3);
    for (int j = 0; j < 3; ++j) {
        VecX rhs = VecX::Zero(dim + 3);
        rhs.head(dim) = (-0.5 * MatX::Identity(dim, dim) + out.np_adjoint) * out.psi_basis.col(j);
        VecX sol = biglu.solve(rhs);
        out.w_basis.col(j) = sol.head(dim) + out.psi_basis.col(j);
    }

    // --- S~ and the gram matrix ---
    // S~[phi] = S[phi'] - sum_j <phi, f^(j)> f^(j), phi' = phi - sum <phi,f^(j)> phi^(j).
    out.single_layer_psi = out.single_layer * (MatX::Identity(dim, dim) - out.w_basis * wf.transpose()) -
                           out.psi_basis * wf.transpose();

    MatX wdiag = MatX::Zero(dim, dim);
    for (int k = 0; k < n; ++k) {
        wdiag(2 * k, 2 * k) = curve.weight(k);
        wdiag(2 * k + 1, 2 * k + 1) = curve.weight(k);
    }
    MatX g = -wdiag * out.single_layer_psi;
    out.gram_asymmetry = (g - g.transpose()).norm() / g.norm();
    if (out.gram_asymmetry > 1e-4)
        throw std::runtime_error("assemble: gram matrix asymmetry " +
                                 std::to_string(out.gram_asymmetry) + " exceeds tolerance");
    out.gram = 0.5 * (g + g.transpose());
    out.gram_chol.compute(out.gram);
    if (out.gram_chol.info() != Eigen::Success)
        throw std::runtime_error(
            "assemble: gram matrix not positive definite (mesh too coarse or "
            "single-layer nullspace)");

    // Identity diagnostics live on the de-aliased band (modes <= 2/3 of
    // Nyquist): nodal Nystrom on curves with non-constant speed carries an
    // n-independent leakage at the band edge, while the resolved band is
    // spectrally consistent.
    {
        const MatX proj = mode_projector(n, n / 3);
        MatX gk = proj * (out.gram * out.np_adjoint) * proj;
        out.self_adjoint_asymmetry = (gk - gk.transpose()).norm() / gk.norm();
    }

    return out;
}

MatX build_w_basis(const DiscreteNP& np) { return np.w_basis; }

SpectrumResult symmetrized_spectrum(const DiscreteNP& np, double accumulation_window) {
    const int dim = 2 * np.curve.size();
    MatX gk = np.gram * np.np_adjoint;
    MatX hsym = 0.5 * (gk + gk.transpose());

    // Cholesky congruence to a standard symmetric problem.
    MatX l = np.gram_chol.matrixL();
    MatX b = l.triangularView<Eigen::Lower>().solve(hsym);
    b = l.triangularView<Eigen::Lower>().solve(b.transpose()).transpose();
    Eigen::SelfAdjointEigenSolver<MatX> es(0.5 * (b + b.transpose()));
    if (es.info() != Eigen::Success)
        throw std::runtime_error("symmetrized_spectrum: eigensolver failed to converge");

    SpectrumResult r;
    r.eigenvalues = es.eigenvalues();
    r.eigenvectors = l.transpose().triangularView<Eigen::Upper>().solve(es.eigenvectors());
    r.accumulation_window = accumulation_window;
    const double k0 = np.params.k0();
    for (int i = 0; i < dim; ++i) {
        const double v = r.eigenvalues[i];
        if (std::abs(v - k0) < accumulation_window) ++r.count_near_plus_k0;
        if (std::abs(v + k0) < accumulation_window) ++r.count_near_minus_k0;
    }

    // 1/2-cluster tolerance: 10x the median gap among the top eigenvalues.
    const int m = std::min(12, dim - 1);
    std::vector<double> gaps;
    for (int i = dim - m; i < dim; ++i)
        gaps.push_back(r.eigenvalues[i] - r.eigenvalues[i - 1]);
    std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
    r.half_tolerance = std::max(10.0 * gaps[gaps.size() / 2], 1e-9);
    for (int i = 0; i < dim; ++i)
        if (std::abs(r.eigenvalues[i] - 0.5) < r.half_tolerance) ++r.half_multiplicity;
    return r;
}

double plemelj_residual(const DiscreteNP& np) {
    const int n = np.curve.size();
    const MatX proj = mode_projector(n, n / 3);
    const MatX comm =
        proj * (np.single_layer_psi * np.np_adjoint - np.np * np.single_layer_psi) * proj;
    return comm.norm() / np.single_layer_psi.norm();
}

TrigInterpolant::TrigInterpolant(const VecX& nodal, int n_nodes) : n_(n_nodes) {
    const int half = n_ / 2;
    cos_coef_ = MatX::Zero(half + 1, 2);
    sin_coef_ = MatX::Zero(half + 1, 2);
    for (int m = 0; m <= half; ++m) {
        for (int k = 0; k < n_; ++k) {
            const double t = kTwoPi * k / n_;
            for (int c = 0; c < 2; ++c) {
                cos_coef_(m, c) += nodal[2 * k + c] * std::cos(m * t);
                sin_coef_(m, c) += nodal[2 * k + c] * std::sin(m * t);
            }
        }
    }
    cos_coef_ *= 2.0 / n_;
    sin_coef_ *= 2.0 / n_;
    cos_coef_.row(0) *= 0.5;
    cos_coef_.row(half) *= 0.5;  // Nyquist term halved
    sin_coef_.row(half).setZero();
}

Vec2 TrigInterpolant::operator()(double t) const {
    const int half = n_ / 2;
    Vec2 v = Vec2::Zero();
    for (int m = 0; m <= half; ++m) {
        const double cm = std::cos(m * t), sm = std::sin(m * t);
        v[0] += cos_coef_(m, 0) * cm + sin_coef_(m, 0) * sm;
        v[1] += cos_coef_(m, 1) * cm + sin_coef_(m, 1) * sm;
    }
    return v;
}

namespace {
struct FineQuadrature {
    std::vector<Vec2> node;
    std::vector<Vec2> value;  // density * weight at fine nodes
};

FineQuadrature upsampled(const DiscreteNP& np, const VecX& density, int upsample) {
    const int nf = np.curve.size() * std::max(1, upsample);
    const TrigInterpolant interp(density, np.curve.size());
    const auto& par = np.curve.parametrization();
    FineQuadrature q;
    q.node.resize(nf);
    q.value.resize(nf);
    const double hf = kTwoPi / nf;
    for (int k = 0; k < nf; ++k) {
        const double t = hf * k;
        q.node[k] = par.position(t);
        q.value[k] = interp(t) * par.derivative(t).norm() * hf;
    }
    return q;
}
}  // namespace

Vec2 single_layer_offsurface(const DiscreteNP& np, const VecX& density, const Vec2& x,
                             int upsample) {
    const FineQuadrature q = upsampled(np, density, upsample);
    Vec2 s = Vec2::Zero();
    for (size_t k = 0; k < q.node.size(); ++k)
        s += kelvin_matrix(np.params, x, q.node[k]) * q.value[k];
    return s;
}

Vec2 single_layer_traction_offsurface(const DiscreteNP& np, const VecX& density, const Vec2& x,
                                      const Vec2& n_dir, int upsample) {
    const FineQuadrature q = upsampled(np, density, upsample);
    Vec2 s = Vec2::Zero();
    for (size_t k = 0; k < q.node.size(); ++k)
        s += adjoint_traction_kernel(np.params, x, q.node[k], n_dir) * q.value[k];
    return s;
}

JumpReport jump_relation_check(const DiscreteNP& np, const VecX& density,
                               std::span<const double> offsets) {
    if (offsets.size() != 3)
        throw std::invalid_argument("jump_relation_check: need 3 offsets with ratio 2");
    const int n = np.curve.size();
    const VecX plus = 0.5 * density + np.np_adjoint * density;
    const VecX minus = -0.5 * density + np.np_adjoint * density;

    // Upsample enough that the nearest offset is resolved: the fine-grid error
    // decays like exp(-n_fine * t / max_speed).
    const double tmin = offsets[2];
    double max_speed = 0.0;
    for (int k = 0; k < n; ++k) max_speed = std::max(max_speed, np.curve.speed(k));
    const int needed = static_cast<int>(std::ceil(28.0 * max_speed / tmin));
    int upsample = 8;
    while (upsample * n < needed && upsample < 512) upsample *= 2;
    const FineQuadrature q = upsampled(np, density, upsample);

    VecX err_plus(n), err_minus(n);
    std::vector<char> bad(n, 0);
    parallel_for(n, [&](int k) {
        const Vec2& x0 = np.curve.node(k);
        const Vec2& nk = np.curve.normal(k);
        for (int side = 0; side < 2; ++side) {
            const double sgn = side == 0 ? 1.0 : -1.0;
            std::array<Vec2, 3> v;
            for (int t = 0; t < 3; ++t) {
                const Vec2 x = x0 + sgn * offsets[t] * nk;
                Vec2 s = Vec2::Zero();
                for (size_t m = 0; m < q.node.size(); ++m)
                    s += adjoint_traction_kernel(np.params, x, q.node[m], nk) * q.value[m];
                v[t] = s;
            }
            // quadratic Richardson with offset ratio 2
            const Vec2 a1 = 2.0 * v[1] - v[0];
            const Vec2 a2 = 2.0 * v[2] - v[1];
            const Vec2 lim = (4.0 * a2 - a1) / 3.0;
            if ((a2 - a1).norm() > 0.5 * (v[1] - v[0]).norm() + 1e-10 * v[0].norm() + 1e-12)
                bad[k] = 1;
            const Vec2 ref(side == 0 ? plus[2 * k] : minus[2 * k],
                           side == 0 ? plus[2 * k + 1] : minus[2 * k + 1]);
            (side == 0 ? err_plus[k] : err_minus[k]) = (lim - ref).norm();
        }
    });
    JumpReport rep;
    rep.max_error_plus = err_plus.maxCoeff();
    rep.max_error_minus = err_minus.maxCoeff();
    for (int k = 0; k < n; ++k)
        if (bad[k]) rep.richardson_converged = false;
    return rep;
}

}  // namespace elastonp
