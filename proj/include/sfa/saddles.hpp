#pragma once

#include <array>
#include <functional>
#include <vector>

#include "sfa/action.hpp"

namespace sfa {

using C2 = std::array<cplx, 2>;
using M2 = std::array<std::array<cplx, 2>, 2>;

struct SolverOptions {
    double tol = 1e-10;
    int max_iter = 60;
    int max_backtrack = 5;
    double jump_threshold = 0.15;  // in units of 1/omega
    int max_halvings = 8;
    double dedupe = 1e-6;
};

struct NewtonResult {
    C2 z;
    double residual;
    int iterations;
};

using NewtonSystem = std::function<void(const C2& z, C2& F, M2& J)>;

NewtonResult newton2(const NewtonSystem& sys, C2 guess, double tol = 1e-10, int max_iter = 60,
                     int max_backtrack = 5);

struct SaddleSolution {
    double omega = 0;
    cplx t, tp;
    CVec2 p_s;
    CVec2 velocity;  // p_s + A(t), recombination velocity
    DerivativeBundle bundle;
    double residual = 0;
    double error = 0;  // distance bound to the true root in the |dt| + |dt'| metric
};

enum class CutoffType { threshold, energy };

struct HarmonicCutoff {
    cplx t_hc, tp_hc;
    cplx omega_hc;
    cplx A_hc;
    double residual = 0;
    CutoffType type = CutoffType::energy;
    bool flip_separatrix = false;  // per-cutoff override of the principal branch
};

// Physical window, all in units of the optical phase (omega * time).
struct TimeWindow {
    double t_min = 0, t_max = 4 * pi;
    double tp_min = -pi / 2, tp_max = pi / 2;
    double tau_min = 0.02;        // minimal Re(omega tau) for saddles
    double im_t_max = 3.0;        // |Im(omega t)| bound for saddles
    double cutoff_tau_min = 0.2 * pi;
    double cutoff_im_t_max = 1.0;

    bool admits(cplx t, cplx tp, double omega) const;
    bool admits_cutoff(cplx t, cplx tp, double omega) const;
};

// Default window for a field: two cycles of return, one ionization half-cycle per
// fundamental period divided by the field's rotational symmetry order.
TimeWindow default_window(const FourierField& f);

SaddleSolution solve_saddle(const ActionModel& m, double omega, C2 guess,
                            const SolverOptions& opt = {});

std::vector<SaddleSolution> seed_saddles(const ActionModel& m, double omega0,
                                         const TimeWindow& w, const SolverOptions& opt = {});

// All physical saddles on an omega grid; seeds at every point plus propagation of
// found roots to neighbouring points until the set is stable.
std::vector<std::vector<SaddleSolution>> solve_cloud(const ActionModel& m,
                                                     const std::vector<double>& omega_grid,
                                                     const TimeWindow& w,
                                                     const SolverOptions& opt = {},
                                                     int threads = 1);

std::vector<SaddleSolution> continue_orbit(const ActionModel& m,
                                           const std::vector<double>& omega_grid,
                                           const SaddleSolution& seed,
                                           const SolverOptions& opt = {});

HarmonicCutoff solve_cutoff(const ActionModel& m, C2 guess, const SolverOptions& opt = {});

std::vector<HarmonicCutoff> find_all_cutoffs(const ActionModel& m, const TimeWindow& w,
                                             const SolverOptions& opt = {});

// Threshold/energy alternation along Re(t_hc); reported, not enforced.
bool cutoffs_alternate(const std::vector<HarmonicCutoff>& cs);

std::vector<double> omega_grid(double start, double stop, double step);

}  // namespace sfa
