#pragma once

#include <map>
#include <string>
#include <vector>

#include "sfa/saddles.hpp"

namespace sfa {

struct Separatrix {
    cplx t_hc;
    cplx delta_t_sep;
    bool degenerate = false;
    double eta = 0;
};

struct OrbitLabel {
    int strip_index = 0;
    int side = +1;
    bool outside = false;  // no cutoffs to anchor the strip partition

    auto operator<=>(const OrbitLabel& o) const {
        if (auto c = strip_index <=> o.strip_index; c != 0) return c;
        return side <=> o.side;
    }
    bool operator==(const OrbitLabel& o) const {
        return strip_index == o.strip_index && side == o.side;
    }
};

std::string to_string(const OrbitLabel& l);

inline constexpr double eta_floor_default = 1e-9;

// eta_override replaces a degenerate eta (default +1); pass -1 for the other orientation.
Separatrix separatrix(const HarmonicCutoff& c, double eta_floor = eta_floor_default,
                      double eta_override = 1.0);

struct ClassifyOptions {
    double eta_floor = eta_floor_default;
    double eta_override = 1.0;
};

OrbitLabel classify_one(const SaddleSolution& s, const std::vector<HarmonicCutoff>& cutoffs,
                        const std::vector<Separatrix>& seps);

std::vector<OrbitLabel> classify(const std::vector<SaddleSolution>& saddles,
                                 const std::vector<HarmonicCutoff>& cutoffs,
                                 const ClassifyOptions& opt = {});

struct LabeledSaddle {
    SaddleSolution s;
    OrbitLabel label;
};

// One entry per omega grid point.
using LabeledCloud = std::vector<std::vector<LabeledSaddle>>;

LabeledCloud classify_cloud(const std::vector<std::vector<SaddleSolution>>& cloud,
                            const std::vector<HarmonicCutoff>& cutoffs,
                            const ClassifyOptions& opt = {});

// Total phase S_V - omega t of a saddle.
inline cplx total_action(const SaddleSolution& s) { return s.bundle.S_V - s.omega * s.t; }

struct Family {
    std::vector<OrbitLabel> labels;
    bool touches_energy_cutoff = false;
    bool touches_threshold_cutoff = false;
};

struct ExemptStep {
    OrbitLabel label;
    double omega_lo, omega_hi;
    double jump;  // omega |dt|
};

struct PairCrossing {
    int cutoff_index;
    OrbitLabel a, b;
    bool has_stokes = false, has_anti_stokes = false;
    double omega_stokes = 0;       // Re S equal
    double omega_anti_stokes = 0;  // Im S equal
    OrbitLabel dropped;            // exponentially growing member
    bool drop_above = true;        // dropped for omega above the Stokes point
};

struct AuditReport {
    std::size_t duplicates = 0;           // (omega, label) pairs carrying > 1 saddle
    double max_jump = 0;                  // omega |dt|, excluding exempt steps
    double max_jump_raw = 0;              // including steps across exact coalescences
    std::map<OrbitLabel, double> jump_by_label;
    std::vector<ExemptStep> exempt;
    std::vector<Family> families;
    std::vector<PairCrossing> crossings;

    std::size_t energy_families() const;
};

struct AuditOptions {
    double jump_threshold = 0.15;  // units of 1/omega
    double eta_floor = eta_floor_default;
    bool refine_crossings = true;
};

AuditReport audit_orbits(const ActionModel& m, const LabeledCloud& cloud,
                         const std::vector<HarmonicCutoff>& cutoffs, const AuditOptions& opt = {});

// Omega-ordered chain of one label.
struct QuantumOrbit {
    OrbitLabel label;
    std::vector<SaddleSolution> points;
};

std::vector<QuantumOrbit> orbits_by_label(const LabeledCloud& cloud);

}  // namespace sfa
