#include "zakmul/lattice.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace zakmul {

bool TFRect::contains(const TFRect& in, double tol) const {
    return in.t_lo >= t_lo - tol && in.t_hi <= t_hi + tol && in.f_lo >= f_lo - tol * 1e6 &&
           in.f_hi <= f_hi + tol * 1e6;
}

bool TFRect::interiors_overlap(const TFRect& o, double tol) const {
    const bool t_sep = t_hi <= o.t_lo + tol || o.t_hi <= t_lo + tol;
    const bool f_sep = f_hi <= o.f_lo + tol * 1e6 || o.f_hi <= f_lo + tol * 1e6;
    return !(t_sep || f_sep);
}

UserAllocation UserAllocation::make(int id, double B, double T, double nu_p, double tau_shift,
                                    double nu_shift) {
    if (!(B > 0) || !(T > 0) || !(nu_p > 0))
        throw std::invalid_argument("allocation needs B, T, nu_p > 0");
    UserAllocation u;
    u.user_id = id;
    u.B = B;
    u.T = T;
    u.nu_p = nu_p;
    u.tau_p = 1.0 / nu_p;
    const double m = B * u.tau_p;
    const double n = T * nu_p;
    u.M = static_cast<int>(std::lround(m));
    u.N = static_cast<int>(std::lround(n));
    if (std::abs(m - u.M) >= 1e-9 || std::abs(n - u.N) >= 1e-9 || u.M < 1 || u.N < 1)
        throw std::invalid_argument("user " + std::to_string(id) +
                                    ": B*tau_p and T*nu_p must be positive integers");
    u.tau_shift = tau_shift;
    u.nu_shift = nu_shift;
    return u;
}

TFRect UserAllocation::rect() const {
    return {tau_shift - 0.5 * T, tau_shift + 0.5 * T, nu_shift - 0.5 * B, nu_shift + 0.5 * B};
}

const UserAllocation& Scenario::user(int user_id) const {
    for (const auto& u : users)
        if (u.user_id == user_id) return u;
    throw std::out_of_range("no user with id " + std::to_string(user_id));
}

bool check_crystallization(const UserAllocation& u, double tau_max, double nu_max) {
    return u.tau_p > tau_max && u.nu_p > 2.0 * nu_max;
}

bool check_disjoint(const Scenario& sc) {
    const TFRect box = sc.system_rect();
    for (std::size_t a = 0; a < sc.users.size(); ++a) {
        const TFRect ra = sc.users[a].rect();
        if (!box.contains(ra)) return false;
        for (std::size_t b = a + 1; b < sc.users.size(); ++b)
            if (ra.interiors_overlap(sc.users[b].rect())) return false;
    }
    return true;
}

Scenario table1_scenario() {
    Scenario sc;
    sc.system_T = 2.5e-3;
    sc.system_B = 1.08e6;
    sc.users = {
        UserAllocation::make(1, 360e3, 1.0e-3, 15e3, 1.0e-3, 0.0),
        UserAllocation::make(2, 360e3, 2.0e-3, 15e3, 1.5e-3, 360e3),
        UserAllocation::make(3, 360e3, 1.0e-3, 30e3, 2.0e-3, 0.0),
        UserAllocation::make(4, 720e3, 0.5e-3, 30e3, 0.25e-3, -180e3),
    };
    return sc;
}

}  // namespace zakmul
