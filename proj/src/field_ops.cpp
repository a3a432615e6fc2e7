#include "sedlab/field_ops.hpp"

#include <cmath>

#include "sedlab/errors.hpp"

namespace sedlab {

namespace {
const std::complex<double> kI(0.0, 1.0);

double norm3(const std::array<double, 3>& v) {
    return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
}

double dot3(const std::array<double, 3>& a, const std::array<double, 3>& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
}  // namespace

ModeLabel make_mode_label(const std::array<double, 3>& k,
                          const std::array<double, 3>& polarization,
                          double omega, double c) {
    if (!(omega > 0.0) || !(c > 0.0)) {
        throw NonPositiveInput("mode label needs omega > 0 and c > 0");
    }
    const double kmag = norm3(k);
    if (std::abs(kmag - omega / c) > 1e-12 * (omega / c)) {
        throw InvariantViolation("|k| != omega/c");
    }
    if (std::abs(norm3(polarization) - 1.0) > 1e-12) {
        throw InvariantViolation("polarization is not a unit vector");
    }
    if (std::abs(dot3(k, polarization)) > 1e-12 * kmag) {
        throw InvariantViolation("polarization not transverse to k");
    }
    return ModeLabel{k, polarization, omega};
}

ModeLabel default_mode_label(double omega, double c) {
    return make_mode_label({0.0, 0.0, omega / c}, {1.0, 0.0, 0.0}, omega, c);
}

QuadraturePair build_quadrature_matrices(const PhysicalScale& scale, double omega,
                                         Eigen::Index n) {
    if (n < 2) throw DimensionTooSmall("need N >= 2");
    if (!(omega > 0.0)) throw NonPositiveInput("omega must be > 0");

    QuadraturePair qp;
    qp.dim = n;
    qp.q = ComplexMatrix::Zero(n, n);
    qp.p = ComplexMatrix::Zero(n, n);
    const double q0 = std::sqrt(scale.hbar / (2.0 * omega));
    for (Eigen::Index m = 0; m + 1 < n; ++m) {
        const double qv = q0 * std::sqrt(static_cast<double>(m + 1));
        qp.q(m, m + 1) = qv;            // q_{m,m+1}, real positive convention
        qp.q(m + 1, m) = qv;
        // p_{nn'} = -i omega_{n'n} q_{nn'}: omega_{m+1,m} = +omega
        qp.p(m, m + 1) = -kI * omega * qv;
        qp.p(m + 1, m) = kI * omega * qv;
    }
    return qp;
}

double quadrature_constraint_residual(const QuadraturePair& qp, double omega) {
    double worst = 0.0;
    for (Eigen::Index m = 0; m < qp.dim; ++m) {
        if (m + 1 < qp.dim) {
            worst = std::max(worst,
                             std::abs(omega * qp.q(m, m + 1) - kI * qp.p(m, m + 1)));
        }
        if (m > 0) {
            worst = std::max(worst,
                             std::abs(omega * qp.q(m, m - 1) + kI * qp.p(m, m - 1)));
        }
    }
    // entries outside the two couplings must vanish
    for (Eigen::Index r = 0; r < qp.dim; ++r) {
        for (Eigen::Index c = 0; c < qp.dim; ++c) {
            if (c == r + 1 || c + 1 == r) continue;
            worst = std::max(worst, std::abs(qp.q(r, c)));
            worst = std::max(worst, std::abs(qp.p(r, c)));
        }
    }
    return worst;
}

LadderPair ladder_from_quadratures(const QuadraturePair& qp,
                                   const PhysicalScale& scale,
                                   const ModeLabel& label) {
    const double omega = label.omega;
    const double residual = quadrature_constraint_residual(qp, omega);
    if (residual > 1e-10) {
        throw InconsistentInputs("quadrature constraint residual " +
                                 std::to_string(residual) + " > 1e-10");
    }
    LadderPair lp;
    lp.dim = qp.dim;
    lp.label = label;
    lp.scale = scale;
    const double norm = 1.0 / std::sqrt(2.0 * scale.hbar * omega);
    lp.a = norm * (omega * qp.q + kI * qp.p);
    lp.adag = norm * (omega * qp.q - kI * qp.p);
    return lp;
}

LadderPair ladder_from_quadratures(const QuadraturePair& qp,
                                   const PhysicalScale& scale, double omega) {
    return ladder_from_quadratures(qp, scale, default_mode_label(omega, scale.c));
}

LadderPair make_ladder(const PhysicalScale& scale, const ModeLabel& label,
                       Eigen::Index n) {
    return ladder_from_quadratures(build_quadrature_matrices(scale, label.omega, n),
                                   scale, label);
}

MultimodeReport multimode_commutators(const std::vector<LadderPair>& pairs) {
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        for (std::size_t j = i + 1; j < pairs.size(); ++j) {
            if (pairs[i].label == pairs[j].label) {
                throw DuplicateLabels("modes " + std::to_string(i) + " and " +
                                      std::to_string(j) + " share a label");
            }
        }
    }
    Eigen::Index total = 0;
    for (const auto& p : pairs) total += p.dim;

    // assemble block-diagonal a_i embeddings and verify blockwise
    ComplexMatrix zero = ComplexMatrix::Zero(total, total);
    std::vector<ComplexMatrix> a_big(pairs.size(), zero);
    Eigen::Index off = 0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        a_big[i].block(off, off, pairs[i].dim, pairs[i].dim) = pairs[i].a;
        off += pairs[i].dim;
    }

    MultimodeReport rep;
    rep.n_modes = static_cast<Eigen::Index>(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        for (std::size_t j = 0; j < pairs.size(); ++j) {
            const ComplexMatrix canon =
                a_big[i] * a_big[j].adjoint() - a_big[j].adjoint() * a_big[i];
            const ComplexMatrix aa = a_big[i] * a_big[j] - a_big[j] * a_big[i];
            rep.max_aa_error = std::max(rep.max_aa_error, aa.cwiseAbs().maxCoeff());
            if (i != j) {
                rep.max_cross_error =
                    std::max(rep.max_cross_error, canon.cwiseAbs().maxCoeff());
                continue;
            }
            // delta_ij identity holds on the mode's own non-edge diagonal
            Eigen::Index block_off = 0;
            for (std::size_t m = 0; m < i; ++m) block_off += pairs[m].dim;
            for (Eigen::Index r = 0; r < total; ++r) {
                for (Eigen::Index c = 0; c < total; ++c) {
                    const bool own_edge =
                        (r == c && r == block_off + pairs[i].dim - 1);
                    if (own_edge) continue;
                    const bool own_diag =
                        (r == c && r >= block_off && r < block_off + pairs[i].dim);
                    const std::complex<double> expect = own_diag ? 1.0 : 0.0;
                    rep.max_canonical_error = std::max(
                        rep.max_canonical_error, std::abs(canon(r, c) - expect));
                }
            }
        }
    }
    return rep;
}

ModeHamiltonians mode_hamiltonians(const LadderPair& pair) {
    ModeHamiltonians h;
    const double hw = pair.scale.hbar * pair.label.omega;
    h.h_absorb = hw * (pair.adag * pair.a);
    h.h_emit = hw * (pair.a * pair.adag);
    h.h_sym = 0.5 * (h.h_absorb + h.h_emit);
    return h;
}

}  // namespace sedlab
