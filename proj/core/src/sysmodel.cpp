#include "crnoise/sysmodel.hpp"

#include "crnoise/errors.hpp"

#include <algorithm>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace crnoise {

namespace {

std::string fmt_g(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

void require_positive(double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw ConfigError(std::string(name) + " must be positive and finite (got " + fmt_g(value) + ")");
    }
}

void require_non_negative(double value, const char* name) {
    if (!(value >= 0.0) || !std::isfinite(value)) {
        throw ConfigError(std::string(name) + " must be non-negative and finite (got " + fmt_g(value) + ")");
    }
}

void require_inequality(double lhs, const char* expr) {
    if (!(lhs > 0.0)) {
        throw ConfigError(std::string("stiffness not positive definite: ") + expr + " > 0 violated (" + expr +
                          " = " + fmt_g(lhs) + ")");
    }
}

}  // namespace

std::string to_string(ModeLabel label) {
    switch (label) {
        case ModeLabel::in_phase: return "in_phase";
        case ModeLabel::out_of_phase: return "out_of_phase";
        case ModeLabel::degenerate: return "degenerate";
    }
    return "unknown";
}

SystemMatrices build_system(const SystemConfig& config) {
    require_positive(config.m1, "m1");
    require_positive(config.m2, "m2");
    require_positive(config.km1, "km1");
    require_positive(config.km2, "km2");
    if (!std::isfinite(config.kc)) {
        throw ConfigError("kc must be finite");
    }
    require_non_negative(config.c1, "c1");
    require_non_negative(config.c2, "c2");
    require_non_negative(config.cc, "cc");

    require_inequality(config.km1 + config.kc, "km1 + kc");
    require_inequality(config.km2 + config.kc, "km2 + kc");
    require_inequality(config.km1 + 2.0 * config.kc, "km1 + 2*kc");
    require_inequality(config.km2 + 2.0 * config.kc, "km2 + 2*kc");
    const double det = (config.km1 + config.kc) * (config.km2 + config.kc) - config.kc * config.kc;
    require_inequality(det, "det(K)");

    SystemMatrices sys;
    sys.config = config;
    sys.mass << config.m1, 0.0, 0.0, config.m2;
    sys.stiffness << config.km1 + config.kc, -config.kc, -config.kc, config.km2 + config.kc;
    sys.damping << config.c1 + config.cc, -config.cc, -config.cc, config.c2 + config.cc;

    const double km_min = std::min(config.km1, config.km2);
    if (std::abs(config.kc) / km_min > 0.1) {
        sys.warnings.push_back("|kc|/km = " + fmt_g(std::abs(config.kc) / km_min) +
                               " exceeds 0.1; weak-coupling formulas lose accuracy");
    }
    if (config.cc != config.c1 || config.cc != config.c2) {
        sys.warnings.push_back("cc differs from c1/c2: off-diagonal damping is -cc, which departs from "
                               "the printed equations of motion (they use -c)");
    }
    return sys;
}

DerivedQuantities derive(const SystemConfig& config) {
    DerivedQuantities d;
    d.k_eff = config.km1 + config.kc;
    d.m_eff = config.m1;
    d.kc = config.kc;
    d.kappa = config.kc / d.k_eff;
    d.q = config.c1 > 0.0 ? std::sqrt(d.k_eff * d.m_eff) / config.c1 : std::numeric_limits<double>::infinity();
    return d;
}

Modes mode_analysis(const SystemMatrices& system) {
    // Cholesky-based reduction (ComputeEigenvectors | Ax_lBx).
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix2> solver(system.stiffness, system.mass,
                                                             Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("generalized eigenproblem failed");
    }

    Modes modes;
    for (int i = 0; i < 2; ++i) {
        const double lambda = solver.eigenvalues()(i);
        if (!(lambda > 0.0)) {
            throw NumericalError("non-positive modal stiffness");
        }
        modes.omega[i] = std::sqrt(lambda);
        modes.freq[i] = modes.omega[i] / (2.0 * std::numbers::pi);

        Eigen::Vector2d v = solver.eigenvectors().col(i).normalized();
        if (v(0) < 0.0 || (v(0) == 0.0 && v(1) < 0.0)) {
            v = -v;
        }
        modes.shape[i] = v;

        const double k_modal = v.dot(system.stiffness * v);
        const double m_modal = v.dot(system.mass * v);
        const double c_modal = v.dot(system.damping * v);
        modes.modal_q[i] = c_modal > 0.0 ? std::sqrt(k_modal * m_modal) / c_modal
                                         : std::numeric_limits<double>::infinity();

        if (system.config.kc == 0.0) {
            modes.label[i] = ModeLabel::degenerate;
        } else {
            modes.label[i] = v(0) * v(1) >= 0.0 ? ModeLabel::in_phase : ModeLabel::out_of_phase;
        }
    }
    return modes;
}

ComplexMatrix2 receptance(const SystemMatrices& system, double freq_hz) {
    if (!(freq_hz >= 0.0) || !std::isfinite(freq_hz)) {
        throw ConfigError("frequency must be non-negative and finite");
    }
    const double w = 2.0 * std::numbers::pi * freq_hz;
    const std::complex<double> iw(0.0, w);
    const ComplexMatrix2 dyn =
        (system.stiffness - w * w * system.mass).cast<std::complex<double>>() + iw * system.damping.cast<std::complex<double>>();

    const std::complex<double> det = dyn(0, 0) * dyn(1, 1) - dyn(0, 1) * dyn(1, 0);
    const double scale = std::max(system.stiffness.cwiseAbs().maxCoeff(), w * w * system.mass.cwiseAbs().maxCoeff());
    if (std::abs(det) <= 1e-14 * scale * scale) {
        throw NumericalError("undamped resonance: dynamic stiffness is singular at " + fmt_g(freq_hz) + " Hz");
    }
    ComplexMatrix2 h;
    h << dyn(1, 1), -dyn(0, 1), -dyn(1, 0), dyn(0, 0);
    return h / det;
}

FrequencyResponse frequency_response(const SystemMatrices& system, std::span<const double> freq_hz) {
    FrequencyResponse fr;
    fr.freq_hz.assign(freq_hz.begin(), freq_hz.end());
    fr.h.reserve(freq_hz.size());
    for (double f : freq_hz) {
        fr.h.push_back(receptance(system, f));
    }
    return fr;
}

SensitivityReport sensitivity_stiffness(double delta_k, const DerivedQuantities& derived) {
    SensitivityReport r;
    r.frequency_shift = std::abs(delta_k / (2.0 * derived.k_eff));
    r.raw_frequency = std::abs(delta_k / (2.0 * derived.m_eff));
    if (derived.kc == 0.0) {
        r.degenerate = true;
        const double inf = delta_k == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
        r.ar_shift = r.eigenstate_shift = r.raw_ar = r.raw_eigenstate = inf;
        return r;
    }
    r.ar_shift = std::abs(delta_k / (2.0 * derived.kc));
    r.eigenstate_shift = std::abs(delta_k / (4.0 * derived.kc));
    r.raw_ar = r.ar_shift;
    r.raw_eigenstate = r.eigenstate_shift;
    return r;
}

SensitivityReport sensitivity_mass(double delta_m, const DerivedQuantities& derived) {
    SensitivityReport r;
    r.frequency_shift = std::abs(delta_m / (2.0 * derived.m_eff));
    if (derived.kc == 0.0) {
        r.degenerate = true;
        const double inf = delta_m == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
        r.ar_shift = r.eigenstate_shift = inf;
        return r;
    }
    const double dm = delta_m / derived.m_eff;
    r.ar_shift = std::abs(dm / (2.0 * derived.kappa));
    r.eigenstate_shift = std::abs(dm / (4.0 * derived.kappa));
    return r;
}

SystemConfig perturb_stiffness(SystemConfig config, double delta_k) {
    config.km1 += delta_k;
    return config;
}

SystemConfig perturb_mass(SystemConfig config, double delta_m) {
    config.m1 += delta_m;
    return config;
}

SystemConfig reference_config() {
    // kappa = kc / K_eff = -0.0032 with kc = -393.5 gives K_eff = 122968.75 N/m,
    // and km = K_eff - kc. Mass follows from Q = sqrt(K_eff m) / c.
    constexpr double q = 2547.0;
    constexpr double c = 0.0031;
    constexpr double kc = -393.5;
    constexpr double k_eff = kc / -0.0032;
    constexpr double km = k_eff - kc;
    constexpr double m = (q * c) * (q * c) / k_eff;

    SystemConfig cfg;
    cfg.m1 = cfg.m2 = m;
    cfg.km1 = cfg.km2 = km;
    cfg.kc = kc;
    cfg.c1 = cfg.c2 = cfg.cc = c;
    return cfg;
}

}  // namespace crnoise
