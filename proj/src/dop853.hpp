#pragma once

// Dormand-Prince 8(5,3) stepper over a fixed number of complex components,
// with the 6th-order dense output of the reduced interpolant. Coefficients from
// Hairer, Norsett and Wanner, "Solving ODEs I".

#include <algorithm>
#include <array>
#include <cmath>

#include "pvc/types.hpp"

namespace pvc::detail {

template <std::size_t N>
using CVec = std::array<cplx, N>;

struct Dop853Coeffs {
    static constexpr double c2 = 0.05260015195876773187856, c3 = 0.07890022793815159781784,
                            c4 = 0.11835034190722739672676, c5 = 0.28164965809277260327324,
                            c6 = 0.33333333333333333333333, c7 = 0.25, c8 = 0.30769230769230769230769,
                            c9 = 0.65128205128205128205128, c10 = 0.6, c11 = 0.85714285714285714285714;
    static constexpr double b1 = 0.05429373411656876223805, b6 = 4.45031289275240888144114,
                            b7 = 1.89151789931450038304282, b8 = -5.80120396001058478146721,
                            b9 = 0.31116436695781989440892, b10 = -0.15216094966251607855618,
                            b11 = 0.20136540080403034837478, b12 = 0.04471061572777259051769;
    static constexpr double bhh1 = 0.24409448818897637795276, bhh2 = 0.73384668828161185734136,
                            bhh3 = 0.02205882352941176470588;
    static constexpr double er1 = 0.01312004499419488073250, er6 = -1.22515644637620444072057,
                            er7 = -0.49575894965725019152141, er8 = 1.66437718245498653696153,
                            er9 = -0.35032884874997368168865, er10 = 0.33417911871301747902973,
                            er11 = 0.08192320648511571246571, er12 = -0.02235530786388629525884;
    static constexpr double a21 = 0.05260015195876773187856, a31 = 0.01972505698453789945446,
                            a32 = 0.05917517095361369836338, a41 = 0.02958758547680684918169,
                            a43 = 0.08876275643042054754507, a51 = 0.24136513415926668550237,
                            a53 = -0.88454947932828608534486, a54 = 0.92483400326179200311574,
                            a61 = 0.03703703703703703703704, a64 = 0.17082860872947387127960,
                            a65 = 0.12546768756682242501669, a71 = 0.037109375,
                            a74 = 0.17025221101954403931498, a75 = 0.06021653898045596068502,
                            a76 = -0.017578125, a81 = 0.03709200011850479271088,
                            a84 = 0.17038392571223999381021, a85 = 0.10726203044637328465181,
                            a86 = -0.01531943774862440175279, a87 = 0.00827378916381402288758,
                            a91 = 0.62411095871607571711443, a94 = -3.36089262944694129406857,
                            a95 = -0.86821934684172600681819, a96 = 27.5920996994467083049416,
                            a97 = 20.1540675504778934086187, a98 = -43.4898841810699588477366,
                            a101 = 0.47766253643826436589043, a104 = -2.48811461997166764192642,
                            a105 = -0.59029082683684299637145, a106 = 21.2300514481811942347289,
                            a107 = 15.2792336328824235832597, a108 = -33.2882109689848629194453,
                            a109 = -0.02033120170850862613582, a111 = -0.93714243008598732571704,
                            a114 = 5.18637242884406370830024, a115 = 1.09143734899672957818500,
                            a116 = -8.14978701074692612513997, a117 = -18.5200656599969598641566,
                            a118 = 22.7394870993505042818970, a119 = 2.49360555267965238987089,
                            a1110 = -3.04676447189821950038237, a121 = 2.27331014751653820792360,
                            a124 = -10.5344954667372501984067, a125 = -2.00087205822486249909676,
                            a126 = -17.9589318631187989172766, a127 = 27.9488845294199600508500,
                            a128 = -2.85899827713502369474066, a129 = -8.87285693353062954433549,
                            a1210 = 12.3605671757943030647266, a1211 = 0.64339274601576353035597;
    // reduced-order dense output
    static constexpr double d41 = -5.40685903845352664250302, d46 = 367.268892700041893590281,
                            d47 = 154.609958204083905482676, d48 = -505.920283865412564024766,
                            d49 = 15.5975154819608130688200, d410 = -26.1936204184402805956691,
                            d411 = -0.74003512364122230844721, d412 = 1.11776539319431476294221,
                            d413 = -0.33333333333333333333333;
    static constexpr double d51 = 6.51987095363079615048119, d56 = -1066.34956011730205278592,
                            d57 = -351.864047514639508625601, d58 = 1363.51955696662884408368,
                            d59 = -112.727669432657582669864, d510 = 159.796191868560289612921,
                            d511 = -2.13865100308788816220259, d512 = -3.75569172113289760348584,
                            d513 = 7.0;
    static constexpr double d61 = 10.4698004763293477204238, d66 = -1380.01473607038123167155,
                            d67 = -531.219827862514074379012, d68 = 1866.98964341870892451324,
                            d69 = -53.3302605020547902574560, d610 = 82.4147560258671369782481,
                            d611 = 7.38443654502992069572676, d612 = 0.41729908012587751149843,
                            d613 = -3.11111111111111111111111;
    static constexpr double d71 = -16.6338582677165354330709, d76 = 4516.16568914956011730205,
                            d77 = 1393.85185384057776465219, d78 = -5687.52042419481539670071,
                            d79 = 473.965563750151263163661, d710 = -661.810776942355889724311,
                            d711 = -18.0180473354013232598119;
};

/// Result of one attempted step.
struct StepAttempt {
    bool accepted;
    double err;  // scaled error norm (<= 1 when accepted)
};

/// `F` is callable as f(const CVec<N>& y, CVec<N>& dy). The error scale for
/// complex component j is atol + rtol * max(|y_j|, |y_new_j|).
template <std::size_t N, class F>
class Dop853 {
public:
    using Vec = CVec<N>;

    Dop853(F f, double rtol, double atol) : f_(std::move(f)), rtol_(rtol), atol_(atol) {}

    /// Per-component absolute-only error scale (for angle-like components).
    void set_absolute(std::size_t i, bool on) { absolute_[i] = on; }
    /// Adds delta to component i of the current state (e.g. rewrapping an angle).
    void shift(std::size_t i, cplx delta) { y_[i] += delta; }

    void init(const Vec& y) {
        y_ = y;
        f_(y_, k1_);
        ++evals_;
    }

    const Vec& y() const { return y_; }
    const Vec& dy() const { return k1_; }
    std::size_t evaluations() const { return evals_; }

    /// Initial step magnitude following Hairer's heuristic (order 8).
    double initial_step(double dir, double hmax) {
        double dnf = 0, dny = 0;
        for (std::size_t i = 0; i < N; ++i) {
            const double sk = absolute_[i] ? rtol_ : atol_ + rtol_ * std::abs(y_[i]);
            dnf += std::norm(k1_[i]) / (sk * sk);
            dny += std::norm(y_[i]) / (sk * sk);
        }
        double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
        h = std::min(h, hmax);
        Vec yt, k2;
        for (std::size_t i = 0; i < N; ++i) yt[i] = y_[i] + dir * h * k1_[i];
        f_(yt, k2);
        ++evals_;
        double der2 = 0;
        for (std::size_t i = 0; i < N; ++i) {
            const double sk = absolute_[i] ? rtol_ : atol_ + rtol_ * std::abs(y_[i]);
            der2 += std::norm(k2[i] - k1_[i]) / (sk * sk);
        }
        der2 = std::sqrt(der2) / h;
        const double der12 = std::max(der2, std::sqrt(dnf));
        const double h1 = der12 > 1e-15 ? std::pow(0.01 / der12, 1.0 / 8) : std::max(1e-6, h * 1e-3);
        return std::min({100 * h, h1, hmax});
    }

    /// Attempts a step of signed size h. On acceptance the state advances and
    /// the dense-output polynomial covers the step. May throw whatever f throws,
    /// in which case the state is unchanged.
    StepAttempt attempt(double h) {
        using C = Dop853Coeffs;
        Vec k2, k3, k4, k5, k6, k7, k8, k9, k10, yt, ynew;
        auto stage = [&](Vec& out, auto&& comb) {
            for (std::size_t i = 0; i < N; ++i) yt[i] = y_[i] + h * comb(i);
            f_(yt, out);
            ++evals_;
        };
        const Vec& k1 = k1_;
        stage(k2, [&](std::size_t i) { return C::a21 * k1[i]; });
        stage(k3, [&](std::size_t i) { return C::a31 * k1[i] + C::a32 * k2[i]; });
        stage(k4, [&](std::size_t i) { return C::a41 * k1[i] + C::a43 * k3[i]; });
        stage(k5, [&](std::size_t i) { return C::a51 * k1[i] + C::a53 * k3[i] + C::a54 * k4[i]; });
        stage(k6, [&](std::size_t i) { return C::a61 * k1[i] + C::a64 * k4[i] + C::a65 * k5[i]; });
        stage(k7, [&](std::size_t i) { return C::a71 * k1[i] + C::a74 * k4[i] + C::a75 * k5[i] + C::a76 * k6[i]; });
        stage(k8, [&](std::size_t i) {
            return C::a81 * k1[i] + C::a84 * k4[i] + C::a85 * k5[i] + C::a86 * k6[i] + C::a87 * k7[i];
        });
        stage(k9, [&](std::size_t i) {
            return C::a91 * k1[i] + C::a94 * k4[i] + C::a95 * k5[i] + C::a96 * k6[i] + C::a97 * k7[i] +
                   C::a98 * k8[i];
        });
        stage(k10, [&](std::size_t i) {
            return C::a101 * k1[i] + C::a104 * k4[i] + C::a105 * k5[i] + C::a106 * k6[i] + C::a107 * k7[i] +
                   C::a108 * k8[i] + C::a109 * k9[i];
        });
        Vec k11, k12;
        stage(k11, [&](std::size_t i) {
            return C::a111 * k1[i] + C::a114 * k4[i] + C::a115 * k5[i] + C::a116 * k6[i] + C::a117 * k7[i] +
                   C::a118 * k8[i] + C::a119 * k9[i] + C::a1110 * k10[i];
        });
        stage(k12, [&](std::size_t i) {
            return C::a121 * k1[i] + C::a124 * k4[i] + C::a125 * k5[i] + C::a126 * k6[i] + C::a127 * k7[i] +
                   C::a128 * k8[i] + C::a129 * k9[i] + C::a1210 * k10[i] + C::a1211 * k11[i];
        });
        Vec incr;
        for (std::size_t i = 0; i < N; ++i) {
            incr[i] = C::b1 * k1[i] + C::b6 * k6[i] + C::b7 * k7[i] + C::b8 * k8[i] + C::b9 * k9[i] +
                      C::b10 * k10[i] + C::b11 * k11[i] + C::b12 * k12[i];
            ynew[i] = y_[i] + h * incr[i];
        }

        double err = 0, err2 = 0;
        for (std::size_t i = 0; i < N; ++i) {
            const double sk = absolute_[i] ? rtol_ : atol_ + rtol_ * std::max(std::abs(y_[i]), std::abs(ynew[i]));
            const cplx e2 = incr[i] - C::bhh1 * k1[i] - C::bhh2 * k9[i] - C::bhh3 * k12[i];
            const cplx e = C::er1 * k1[i] + C::er6 * k6[i] + C::er7 * k7[i] + C::er8 * k8[i] + C::er9 * k9[i] +
                           C::er10 * k10[i] + C::er11 * k11[i] + C::er12 * k12[i];
            err2 += std::norm(e2) / (sk * sk);
            err += std::norm(e) / (sk * sk);
        }
        double deno = err + 0.01 * err2;
        if (deno <= 0.0) deno = 1.0;
        err = std::abs(h) * err / std::sqrt(deno * 2.0 * N);
        if (!std::isfinite(err)) err = std::numeric_limits<double>::infinity();
        if (err > 1.0) return {false, err};

        Vec knew;
        f_(ynew, knew);
        ++evals_;
        for (std::size_t i = 0; i < N; ++i) {
            r1_[i] = y_[i];
            const cplx ydiff = ynew[i] - y_[i];
            r2_[i] = ydiff;
            const cplx bspl = h * k1[i] - ydiff;
            r3_[i] = bspl;
            r4_[i] = ydiff - h * knew[i] - bspl;
            r5_[i] = h * (C::d41 * k1[i] + C::d46 * k6[i] + C::d47 * k7[i] + C::d48 * k8[i] + C::d49 * k9[i] +
                          C::d410 * k10[i] + C::d411 * k11[i] + C::d412 * k12[i] + C::d413 * knew[i]);
            r6_[i] = h * (C::d51 * k1[i] + C::d56 * k6[i] + C::d57 * k7[i] + C::d58 * k8[i] + C::d59 * k9[i] +
                          C::d510 * k10[i] + C::d511 * k11[i] + C::d512 * k12[i] + C::d513 * knew[i]);
            r7_[i] = h * (C::d61 * k1[i] + C::d66 * k6[i] + C::d67 * k7[i] + C::d68 * k8[i] + C::d69 * k9[i] +
                          C::d610 * k10[i] + C::d611 * k11[i] + C::d612 * k12[i] + C::d613 * knew[i]);
            r8_[i] = h * (C::d71 * k1[i] + C::d76 * k6[i] + C::d77 * k7[i] + C::d78 * k8[i] + C::d79 * k9[i] +
                          C::d710 * k10[i] + C::d711 * k11[i]);
        }
        y_ = ynew;
        k1_ = knew;
        return {true, err};
    }

    /// Dense output at fraction s in [0, 1] of the last accepted step.
    Vec dense(double s) const {
        if (s >= 1.0) return y_;
        const double s1 = 1.0 - s;
        Vec x;
        for (std::size_t i = 0; i < N; ++i)
            x[i] = r1_[i] +
                   s * (r2_[i] + s1 * (r3_[i] + s * (r4_[i] + s1 * (r5_[i] + s * (r6_[i] + s1 * (r7_[i] + s * r8_[i]))))));
        return x;
    }

private:
    F f_;
    double rtol_, atol_;
    Vec y_{}, k1_{};
    Vec r1_{}, r2_{}, r3_{}, r4_{}, r5_{}, r6_{}, r7_{}, r8_{};
    std::size_t evals_ = 0;
    std::array<bool, N> absolute_{};
};

}  // namespace pvc::detail
