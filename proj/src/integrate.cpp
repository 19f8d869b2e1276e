#include "dyonlab/integrate.hpp"

namespace dyonlab {

EventSpec EventSpec::value_crossing(double threshold, EventDirection dir) {
    return {EventKind::value_crosses_threshold, threshold, dir};
}

EventSpec EventSpec::deriv_sign_change(EventDirection dir) {
    return {EventKind::derivative_changes_sign, 0.0, dir};
}

EventSpec EventSpec::blow_up(double threshold) {
    return {EventKind::blow_up_guard, threshold, EventDirection::up};
}

EventSpec EventSpec::ratio_crossing(double threshold, EventDirection dir) {
    return {EventKind::value_over_rho_crosses_threshold, threshold, dir};
}

double EventSpec::eval(double rho, double y, double dy) const {
    switch (kind) {
        case EventKind::value_crosses_threshold:
            return y - threshold;
        case EventKind::derivative_changes_sign:
            return dy;
        case EventKind::blow_up_guard:
            return std::abs(y) - threshold;
        case EventKind::value_over_rho_crosses_threshold:
            return y / rho - threshold;
    }
    return 0.0;
}

bool EventSpec::triggered(double g_old, double g_new) const {
    switch (direction) {
        case EventDirection::up:
            return g_old < 0.0 && g_new >= 0.0;
        case EventDirection::down:
            return g_old > 0.0 && g_new <= 0.0;
        case EventDirection::either:
            return (g_old < 0.0 && g_new >= 0.0) || (g_old > 0.0 && g_new <= 0.0);
    }
    return false;
}

}  // namespace dyonlab
