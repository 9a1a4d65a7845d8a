#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "sfa/saddles.hpp"
#include "sfa/scans.hpp"
#include "sfa/spectra.hpp"

namespace sfa {

struct FieldSpec {
    std::string type = "linear";  // linear | bicircular | fourier
    double omega = 0;
    double F0 = 0;
    double ellipticity = 0;
    double theta = pi / 4;  // bicircular mixing angle, radians
    std::vector<Harmonic> harmonics;

    FourierField build() const;
};

struct QpiConfig {
    int cutoff = 0;  // index into the cutoff list
    double r = 1;
    bool full_contrast = false;
};

struct CutoffLawConfig {
    std::vector<double> gamma;
    std::vector<double> Ip;  // a.u.; every (Ip, gamma) pair is one sample
    double c_cl = 3.1731;
};

struct MixingConfig {
    std::vector<double> theta_deg;
    int cutoff_id = 0;
};

struct MeshConfig {
    cplx lo{0.5, -0.4}, hi{3.5, 0.4};  // Omega rectangle, a.u.
    MeshOptions opt;
};

struct RunConfig {
    FieldSpec field;
    double Ip = 0;
    double grid_start = 0, grid_stop = 0, grid_step = 0;  // a.u.
    std::vector<std::string> methods{"spa", "ua", "hca"};
    PrefactorModel prefactor = PrefactorModel::unity;
    std::optional<QpiConfig> qpi;
    SolverOptions solver;
    double eta_floor = eta_floor_default;
    double eta_override = 1.0;
    std::optional<CutoffLawConfig> cutoff_law;
    std::optional<MixingConfig> mixing;
    std::optional<MeshConfig> mesh;

    std::vector<double> grid() const;
    bool wants(const std::string& method) const;
    // Fully resolved form: every quantity explicit, in a.u. or degrees.
    nlohmann::json resolved() const;
};

// Throws ConfigError on unknown keys, bad units or inconsistent values.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

// Energy given as a number (a.u.) or "<value> <unit>" with unit au | eV | orders.
double parse_energy(const nlohmann::json& v, double omega);

}  // namespace sfa
