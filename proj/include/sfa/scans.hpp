#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "sfa/classify.hpp"

namespace sfa {

// Maximum classical return energy in units of U_p for a linear monochromatic field.
double classical_cutoff_constant();
// Return kinetic energy / U_p for ionization phase phi0 (first return), 0 if none.
double classical_return_energy(double phi0);

struct CutoffLawSample {
    double Ip = 0, Up = 0, gamma = 0;
    cplx omega_hc;
    cplx F_value;
    bool ok = false;
    std::string error;
};

struct CutoffLawFit {
    double re0 = 0, re2 = 0;  // Re F = re0 + re2 g^2
    double im1 = 0, im3 = 0;  // Im F = im1 g + im3 g^3
    double rms_re = 0, rms_im = 0;
};

// First energy-type cutoff of F0 cos(wt) for given (Ip, Up); omega only sets the time unit.
CutoffLawSample cutoff_law_sample(double Ip, double Up, double c_cl, double omega = 0.0569542);

std::vector<CutoffLawSample> cutoff_law_scan(const std::vector<double>& Ip,
                                             const std::vector<double>& Up, double c_cl,
                                             int threads = 1);

CutoffLawFit fit_cutoff_law(const std::vector<CutoffLawSample>& samples);

struct TransitionEvent {
    double theta = 0;  // radians
    int cutoff_id = 0;
    double eta_before = 0, eta_after = 0;
    HarmonicCutoff cutoff;      // at the refined angle
    double coalescence = 0;     // omega |t_a - t_b| of the pair at Omega = Re Omega_hc
};

struct MixingTrack {
    std::vector<double> theta;  // radians
    std::vector<HarmonicCutoff> cutoffs;
};

struct MixingResult {
    MixingTrack track;
    std::vector<TransitionEvent> events;
};

struct MixingOptions {
    double F = 0.0754911;
    double omega = 0.0569542;
    AtomParams atom{0.79248};
    int cutoff_id = 0;  // index among energy-type cutoffs at the first angle
};

MixingResult mixing_scan(const std::vector<double>& theta_grid, const MixingOptions& opt);

double pair_coalescence(const ActionModel& m, const HarmonicCutoff& c);

// Riemann-surface mesh: vertices over a t grid with Omega = dS/dt(t, t'_s(t)).
struct MeshVertex {
    cplx omega;
    cplx wt;   // omega_0 * t
    int color;  // label index 2*strip + (side > 0)
};

struct RiemannMesh {
    std::vector<MeshVertex> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<Family> families;
    std::size_t gaps = 0;  // grid nodes where t'-tracking failed
};

struct MeshOptions {
    double re_step = 0.02;    // in omega t
    double im_step = 0.02;
    double im_extent = 2.5;   // |Im omega t| covered
    double re_margin = 0.0;   // Re omega t extension beyond the return window
};

RiemannMesh riemann_mesh(const VolkovAction& m, const std::vector<HarmonicCutoff>& cutoffs,
                         const std::vector<Family>& families, const TimeWindow& w,
                         const MeshOptions& opt = {});

int color_of(const OrbitLabel& l);
OrbitLabel label_of_color(int c);

struct CoverStats {
    int family = 0;
    double single = 0, holes = 0, overlap = 0;  // fractions of sample points
};

std::vector<CoverStats> cover_audit(const RiemannMesh& mesh, cplx lo, cplx hi, int nre = 61,
                                    int nim = 17);

void write_mesh(std::ostream& os, const RiemannMesh& mesh, double omega0);
RiemannMesh read_mesh(std::istream& is);

}  // namespace sfa
