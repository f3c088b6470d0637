#pragma once

#include <vector>

namespace zakmul {

// Half-open time-frequency rectangle [t_lo, t_hi) x [f_lo, f_hi).
struct TFRect {
    double t_lo, t_hi, f_lo, f_hi;

    bool contains(const TFRect& inner, double tol = 1e-12) const;
    bool interiors_overlap(const TFRect& other, double tol = 1e-12) const;
};

// One user's TF slot and information lattice. tau_shift/nu_shift are the slot centre.
struct UserAllocation {
    int user_id = 0;
    double T = 0;      // frame duration, s
    double B = 0;      // bandwidth, Hz
    double tau_p = 0;  // delay period, s
    double nu_p = 0;   // Doppler period, Hz
    int M = 0;         // delay bins per period
    int N = 0;         // Doppler bins per period
    double tau_shift = 0;
    double nu_shift = 0;

    // Derives tau_p, M, N; throws std::invalid_argument unless B*tau_p and T*nu_p are integers.
    static UserAllocation make(int id, double B, double T, double nu_p, double tau_shift = 0.0,
                               double nu_shift = 0.0);

    double delay_bin() const { return tau_p / M; }
    double doppler_bin() const { return nu_p / N; }
    TFRect rect() const;
};

struct Scenario {
    std::vector<UserAllocation> users;
    double system_T = 0;  // system time span [0, system_T)
    double system_B = 0;  // system band [-system_B/2, system_B/2)

    TFRect system_rect() const { return {0.0, system_T, -0.5 * system_B, 0.5 * system_B}; }
    const UserAllocation& user(int user_id) const;
};

bool check_crystallization(const UserAllocation& u, double tau_max, double nu_max);
bool check_disjoint(const Scenario& sc);

// Four-user layout over a 1.08 MHz x 2.5 ms system box.
//   UT-4  [0, 0.5) ms,    [-540, 180) kHz
//   UT-1  [0.5, 1.5) ms,  [-180, 180) kHz
//   UT-3  [1.5, 2.5) ms,  [-180, 180) kHz
//   UT-2  [0.5, 2.5) ms,  [180, 540) kHz
Scenario table1_scenario();

}  // namespace zakmul
