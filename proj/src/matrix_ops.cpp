#include "sedlab/matrix_ops.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "sedlab/errors.hpp"

namespace sedlab {

namespace {
const std::complex<double> kI(0.0, 1.0);
}

void validate(const ResponseMatrices& mats, double tol) {
    const Eigen::Index n = mats.dim;
    if (n < 2) throw DimensionTooSmall("need dim >= 2");
    if (mats.x.rows() != n || mats.x.cols() != n || mats.p.rows() != n ||
        mats.p.cols() != n || mats.omega.rows() != n || mats.omega.cols() != n) {
        throw InvariantViolation("matrix shapes disagree with dim");
    }
    const double xscale = std::max(1e-300, mats.x.cwiseAbs().maxCoeff());
    const double pscale = std::max(1e-300, mats.p.cwiseAbs().maxCoeff());
    const double wscale = std::max(1e-300, mats.omega.cwiseAbs().maxCoeff());
    if ((mats.x - mats.x.adjoint()).cwiseAbs().maxCoeff() > tol * xscale) {
        throw InvariantViolation("x matrix is not Hermitian");
    }
    if ((mats.p - mats.p.adjoint()).cwiseAbs().maxCoeff() > tol * pscale) {
        throw InvariantViolation("p matrix is not Hermitian");
    }
    if ((mats.omega + mats.omega.transpose()).cwiseAbs().maxCoeff() > tol * wscale) {
        throw InvariantViolation("omega grid is not antisymmetric");
    }
    const double m = mats.scale.mass;
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < n; ++c) {
            const std::complex<double> expect = -kI * m * mats.omega(r, c) * mats.x(r, c);
            if (std::abs(mats.p(r, c) - expect) > tol * pscale) {
                throw InvariantViolation("p != -i m omega x at (" +
                                         std::to_string(r) + "," +
                                         std::to_string(c) + ")");
            }
        }
    }
}

ResponseMatrices sho_response_matrices(const PhysicalScale& scale, double omega0,
                                       Eigen::Index n) {
    if (n < 2) throw DimensionTooSmall("need N >= 2");
    if (!(omega0 > 0.0)) throw NonPositiveInput("omega0 must be > 0");

    ResponseMatrices mats;
    mats.dim = n;
    mats.scale = scale;
    mats.x = ComplexMatrix::Zero(n, n);
    mats.p = ComplexMatrix::Zero(n, n);
    mats.omega = RealMatrix::Zero(n, n);

    const double x0 = std::sqrt(scale.hbar / (2.0 * scale.mass * omega0));
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
        const double xv = x0 * std::sqrt(static_cast<double>(k + 1));
        mats.x(k, k + 1) = xv;  // x_{k,k+1}, upward neighbour
        mats.x(k + 1, k) = xv;
        mats.omega(k, k + 1) = omega0;    // omega_{k+1,k} = +omega0
        mats.omega(k + 1, k) = -omega0;   // omega_{k,k+1} = -omega0
    }
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < n; ++c) {
            mats.p(r, c) = -kI * scale.mass * mats.omega(r, c) * mats.x(r, c);
        }
    }
    return mats;
}

TrkResult trk_sum(const ResponseMatrices& mats, Eigen::Index n) {
    if (n < 0 || n >= mats.dim) {
        throw IndexOutOfRange("state " + std::to_string(n) + " outside [0, " +
                              std::to_string(mats.dim) + ")");
    }
    TrkResult r;
    for (Eigen::Index k = 0; k < mats.dim; ++k) {
        r.value += mats.omega(n, k) * std::norm(mats.x(n, k));
    }
    r.edge_deficient = (n == mats.edge_index());
    return r;
}

CommutatorReport commutator(const ResponseMatrices& mats) {
    CommutatorReport rep;
    rep.matrix = mats.x * mats.p - mats.p * mats.x;
    const Eigen::Index n = mats.dim;
    rep.diagonal_errors.resize(static_cast<std::size_t>(n));
    const std::complex<double> target = kI * mats.scale.hbar;
    for (Eigen::Index i = 0; i < n; ++i) {
        rep.diagonal_errors[static_cast<std::size_t>(i)] =
            std::abs(rep.matrix(i, i) - target);
    }
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < n; ++c) {
            if (r == c) continue;
            rep.max_offdiagonal = std::max(rep.max_offdiagonal,
                                           std::abs(rep.matrix(r, c)));
        }
    }
    rep.edge_flag = rep.diagonal_errors.back() > 1e-9 * mats.scale.hbar;
    return rep;
}

namespace {

nlohmann::json complex_matrix_to_json(const ComplexMatrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            row.push_back({m(r, c).real(), m(r, c).imag()});
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

ComplexMatrix complex_matrix_from_json(const nlohmann::json& j) {
    const auto rows = static_cast<Eigen::Index>(j.size());
    if (rows == 0) throw ConfigParseError("empty matrix");
    const auto cols = static_cast<Eigen::Index>(j.at(0).size());
    ComplexMatrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto& row = j.at(static_cast<std::size_t>(r));
        if (static_cast<Eigen::Index>(row.size()) != cols) {
            throw ConfigParseError("ragged matrix rows");
        }
        for (Eigen::Index c = 0; c < cols; ++c) {
            const auto& entry = row.at(static_cast<std::size_t>(c));
            m(r, c) = {entry.at(0).get<double>(), entry.at(1).get<double>()};
        }
    }
    return m;
}

}  // namespace

std::string to_json(const ResponseMatrices& mats) {
    nlohmann::json j;
    j["dim"] = mats.dim;
    j["x"] = complex_matrix_to_json(mats.x);
    j["p"] = complex_matrix_to_json(mats.p);
    nlohmann::json omega = nlohmann::json::array();
    for (Eigen::Index r = 0; r < mats.dim; ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < mats.dim; ++c) row.push_back(mats.omega(r, c));
        omega.push_back(std::move(row));
    }
    j["omega"] = std::move(omega);
    return j.dump(2);
}

ResponseMatrices response_matrices_from_json(const std::string& text,
                                             const PhysicalScale& scale) {
    nlohmann::json j = nlohmann::json::parse(text);
    ResponseMatrices mats;
    mats.scale = scale;
    mats.dim = j.at("dim").get<Eigen::Index>();
    mats.x = complex_matrix_from_json(j.at("x"));
    mats.p = complex_matrix_from_json(j.at("p"));
    const auto& omega = j.at("omega");
    mats.omega = RealMatrix::Zero(mats.dim, mats.dim);
    for (Eigen::Index r = 0; r < mats.dim; ++r) {
        for (Eigen::Index c = 0; c < mats.dim; ++c) {
            mats.omega(r, c) =
                omega.at(static_cast<std::size_t>(r)).at(static_cast<std::size_t>(c)).get<double>();
        }
    }
    validate(mats, 1e-9);
    return mats;
}

std::string to_json(const CommutatorReport& report) {
    nlohmann::json j;
    j["matrix"] = complex_matrix_to_json(report.matrix);
    j["diagonal_errors"] = report.diagonal_errors;
    j["edge_flag"] = report.edge_flag;
    j["max_offdiagonal"] = report.max_offdiagonal;
    return j.dump(2);
}

std::complex<double> bilinear_form(const LinearForm& f, const LinearForm& g) {
    if (f.modes != g.modes) {
        throw MismatchedModeSets("forms are defined over different mode bases");
    }
    if (f.a_coeff.size() != f.modes.size() || f.astar_coeff.size() != f.modes.size() ||
        g.a_coeff.size() != g.modes.size() || g.astar_coeff.size() != g.modes.size()) {
        throw InconsistentInputs("coefficient arrays must match the mode basis");
    }
    std::complex<double> sum = 0.0;
    for (std::size_t a = 0; a < f.modes.size(); ++a) {
        sum += f.a_coeff[a] * g.astar_coeff[a] - g.a_coeff[a] * f.astar_coeff[a];
    }
    return sum;
}

namespace {

LinearForm response_form(const ResponseMatrices& mats, Eigen::Index n, double t,
                         bool momentum) {
    if (n < 0 || n >= mats.dim) {
        throw IndexOutOfRange("state " + std::to_string(n));
    }
    LinearForm form;
    for (Eigen::Index k = 0; k < mats.dim; ++k) {
        form.modes.push_back("a_" + std::to_string(n) + "_" + std::to_string(k));
        const std::complex<double> coeff = momentum ? mats.p(n, k) : mats.x(n, k);
        const std::complex<double> phase =
            std::exp(-kI * mats.omega(n, k) * t);
        form.a_coeff.push_back(coeff * phase);
        form.astar_coeff.push_back(std::conj(coeff * phase));
    }
    return form;
}

}  // namespace

LinearForm position_form(const ResponseMatrices& mats, Eigen::Index n, double t) {
    return response_form(mats, n, t, false);
}

LinearForm momentum_form(const ResponseMatrices& mats, Eigen::Index n, double t) {
    return response_form(mats, n, t, true);
}

}  // namespace sedlab
