#include "sedlab/balance.hpp"

#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sedlab/errors.hpp"

namespace sedlab {

namespace {

void check_state(const ResponseMatrices& mats, Eigen::Index n) {
    if (n < 0 || n >= mats.dim) {
        throw IndexOutOfRange("state " + std::to_string(n));
    }
    if (n > mats.dim - 2) {
        throw EdgeState("state " + std::to_string(n) +
                        " is the truncation edge; closed forms need n <= N-2");
    }
}

double prefactor(const PhysicalScale& s) {
    return 2.0 * s.charge * s.charge / (3.0 * s.c * s.c * s.c);
}

}  // namespace

double absorbed_power(const ResponseMatrices& mats, Eigen::Index n) {
    check_state(mats, n);
    double sum = 0.0;
    for (Eigen::Index k = 0; k < mats.dim; ++k) {
        const double w = mats.omega(n, k);
        if (w == 0.0) continue;
        const double w4 = w * w * w * w;
        sum += std::norm(mats.x(n, k)) * w4 * (w > 0.0 ? 1.0 : -1.0);
    }
    return prefactor(mats.scale) * sum;
}

double radiated_power(const ResponseMatrices& mats, Eigen::Index n) {
    check_state(mats, n);
    double sum = 0.0;
    for (Eigen::Index k = 0; k < mats.dim; ++k) {
        const double w = mats.omega(n, k);
        const double w4 = w * w * w * w;
        sum += std::norm(mats.x(n, k)) * w4;
    }
    return -prefactor(mats.scale) * sum;
}

double einstein_a(const ResponseMatrices& mats, Eigen::Index n, Eigen::Index k) {
    if (n < 0 || n >= mats.dim || k < 0 || k >= mats.dim) {
        throw IndexOutOfRange("transition (" + std::to_string(n) + " -> " +
                              std::to_string(k) + ")");
    }
    const double w_kn = mats.omega(n, k);
    if (std::norm(mats.x(n, k)) == 0.0) return 0.0;  // forbidden transition
    if (!(w_kn < 0.0)) {
        throw UpwardTransition("transition " + std::to_string(n) + " -> " +
                               std::to_string(k) + " is not downward");
    }
    const double w_emit = -w_kn;  // omega_nk > 0
    const PhysicalScale& s = mats.scale;
    return 4.0 * s.charge * s.charge /
           (3.0 * s.hbar * s.c * s.c * s.c) * std::norm(mats.x(n, k)) *
           w_emit * w_emit * w_emit;
}

BalanceReport net_rate(const ResponseMatrices& mats, Eigen::Index n) {
    check_state(mats, n);
    BalanceReport rep;
    rep.state_n = n;
    rep.absorbed_power = absorbed_power(mats, n);
    rep.radiated_power = radiated_power(mats, n);

    double net = 0.0;
    for (Eigen::Index k = 0; k < mats.dim; ++k) {
        const double w_kn = mats.omega(n, k);
        if (!(w_kn < 0.0)) continue;  // only downward transitions contribute
        const double mag = std::norm(mats.x(n, k));
        if (mag == 0.0) continue;
        const double w4 = w_kn * w_kn * w_kn * w_kn;
        net -= 2.0 * prefactor(mats.scale) * mag * w4;
        TransitionContribution tc;
        tc.k = k;
        tc.omega_emit = -w_kn;
        tc.einstein_a = einstein_a(mats, n, k);
        tc.power = mats.scale.hbar * tc.omega_emit * tc.einstein_a;
        rep.per_transition.push_back(tc);
    }
    rep.net_rate = net;
    return rep;
}

std::string to_json(const BalanceReport& report) {
    nlohmann::json j;
    j["state_n"] = report.state_n;
    j["absorbed_power"] = report.absorbed_power;
    j["radiated_power"] = report.radiated_power;
    j["net_rate"] = report.net_rate;
    nlohmann::json per = nlohmann::json::array();
    for (const auto& t : report.per_transition) {
        per.push_back({{"k", t.k},
                       {"omega_emit", t.omega_emit},
                       {"einstein_a", t.einstein_a},
                       {"power", t.power}});
    }
    j["per_transition"] = std::move(per);
    return j.dump(2);
}

std::string to_table(const BalanceReport& report) {
    std::ostringstream out;
    out.precision(12);
    out << "state n = " << report.state_n << "\n"
        << "  absorbed power : " << report.absorbed_power << "\n"
        << "  radiated power : " << report.radiated_power << "\n"
        << "  net rate       : " << report.net_rate << "\n";
    if (!report.per_transition.empty()) {
        out << "  downward transitions:\n";
        out << "    k    omega_nk        A_nk            hbar*omega*A\n";
        for (const auto& t : report.per_transition) {
            out << "    " << t.k << "    " << t.omega_emit << "    "
                << t.einstein_a << "    " << t.power << "\n";
        }
    }
    return out.str();
}

BalanceComparison simulate_balance(const EnsembleSpec& spec) {
    if (spec.force.kind() != ForceModel::Kind::Harmonic) {
        throw InconsistentInputs("simulate_balance supports the SHO force only");
    }
    return compare_balance(spec, run_ensemble(spec));
}

BalanceComparison compare_balance(const EnsembleSpec& spec,
                                  const EnsembleStats& stats) {
    BalanceComparison cmp;
    const ResponseMatrices mats =
        sho_response_matrices(spec.scale, spec.scale.omega0, 3);
    cmp.closed_absorbed = absorbed_power(mats, 0);
    cmp.closed_radiated = radiated_power(mats, 0);
    cmp.absorbed = stats.window.absorbed_power;
    cmp.radiated = stats.window.radiated_power;
    cmp.net = stats.window.net_power;
    cmp.mean_H = stats.window.mean_H;
    cmp.expected_mean_H = 0.5 * spec.scale.hbar * spec.scale.omega0;
    cmp.n_traj = stats.n_traj;
    return cmp;
}

}  // namespace sedlab
