#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sfa/classify.hpp"

namespace sfa {

enum class PrefactorModel { unity, tau_dispersion_only, short_range_s_state };

// Scalar models (unity, tau) occupy the x component of the returned vector.
struct Prefactor {
    PrefactorModel model = PrefactorModel::unity;
    double Ip = 0.5;  // binding energy of the s state

    // d(v) * Upsilon(w), with v, w the recombination and ionization velocities
    CVec2 matrix_elements(const CVec2& v) const;
};

PrefactorModel parse_prefactor(const std::string& s);
std::string to_string(PrefactorModel m);

// Principal-branch amplitude; tracking fixes the overall sign.
CVec2 spa_amplitude(const SaddleSolution& s, const Prefactor& pf);

// Continuous chain of one orbit family along omega with tracked branch signs.
struct FamilyTrack {
    int id = 0;
    std::vector<OrbitLabel> labels;
    std::vector<std::size_t> grid_index;
    std::vector<SaddleSolution> points;
    std::vector<CVec2> amplitude;
};

std::vector<FamilyTrack> family_tracks(const LabeledCloud& cloud, const AuditReport& audit,
                                       const Prefactor& pf);

struct OrbitAmplitude {
    int family;
    OrbitLabel label;
    CVec2 amplitude;
    bool included;
};

struct SpectrumLine {
    double omega = 0;
    std::vector<OrbitAmplitude> orbits;
    CVec2 spa, ua, hca;
    bool has_spa = false, has_ua = false, has_hca = false;
};

// Combined SPA with the exponentially growing member of each pair dropped past its
// Stokes point.
std::vector<SpectrumLine> spa_spectrum(const std::vector<FamilyTrack>& tracks,
                                       const AuditReport& audit,
                                       const std::vector<double>& grid);

// Two-saddle Airy uniform approximation for the pair meeting at one cutoff; returns
// one amplitude per grid index where both members exist (nullopt elsewhere).
std::vector<std::optional<CVec2>> uniform_approx(const FamilyTrack& a, const FamilyTrack& b,
                                                 std::size_t grid_size);

// Adds UA columns: UA for every energy-type pair plus SPA of the remaining families.
void add_uniform(std::vector<SpectrumLine>& lines, const std::vector<FamilyTrack>& tracks,
                 const AuditReport& audit, const std::vector<HarmonicCutoff>& cutoffs);

CVec2 hca_term(const ActionModel& m, const HarmonicCutoff& c, double omega, const Prefactor& pf);

std::vector<CVec2> hca_spectrum(const ActionModel& m, const std::vector<HarmonicCutoff>& cutoffs,
                                const std::vector<double>& grid, const Prefactor& pf);

struct QpiOptions {
    double r = 1;
    bool full_contrast = false;
};

std::vector<CVec2> hca_qpi_variant(const ActionModel& m, const HarmonicCutoff& c,
                                   const QpiOptions& q, const std::vector<double>& grid,
                                   const Prefactor& pf);

// Interference fringes of |D|^2 below the cutoff: local minima refined by golden
// section, visibility against the neighbouring maxima.
struct FringeStats {
    std::size_t minima = 0;
    double mean_visibility = 0;
    double worst_min_ratio = 0;  // max over minima of |D|^2_min / neighbouring max
};

template <class F>
FringeStats fringe_stats(F yield, double lo, double hi, double step);

inline double yield(const CVec2& d) { return std::norm(d.x) + std::norm(d.y); }

}  // namespace sfa

#include "sfa/spectra_fringes.ipp"
