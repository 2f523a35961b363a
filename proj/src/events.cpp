#include "vortexbl/events.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vbl {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

double median(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("median of empty set");
    const size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    double m = v[mid];
    if (v.size() % 2 == 0) {
        std::nth_element(v.begin(), v.begin() + mid - 1, v.end());
        m = 0.5 * (m + v[mid - 1]);
    }
    return m;
}

/// Minimum of a profile restricted to [lo, hi], parabolically refined.
struct WindowMin {
    double x = kNan, value = std::numeric_limits<double>::infinity();
};
WindowMin window_minimum(const ArrayXd& x, const ArrayXd& f, double lo, double hi) {
    const int n = static_cast<int>(x.size());
    WindowMin m;
    int best = -1;
    for (int i = 0; i < n; ++i) {
        if (x[i] < lo || x[i] > hi) continue;
        if (f[i] < m.value) {
            m.value = f[i];
            best = i;
        }
    }
    if (best <= 0 || best >= n - 1) {
        if (best >= 0) m.x = x[best];
        return m;
    }
    // Quadratic vertex through the three nodes around the discrete minimum.
    const double a = x[best - 1] - x[best], b = x[best + 1] - x[best];
    const double g = (f[best - 1] * b * b - f[best + 1] * a * a + f[best] * (a * a - b * b)) /
                     (a * b * (b - a));
    const double h = 2.0 * (f[best - 1] * b - f[best + 1] * a - f[best] * (b - a)) /
                     (a * b * (a - b));
    if (h > 0.0) {
        m.x = x[best] - g / h;
        m.value = f[best] - 0.5 * g * g / h;
    } else {
        m.x = x[best];
    }
    return m;
}

/// Maximum location of a profile in [lo, hi], parabolically refined.
double window_argmax(const ArrayXd& x, const ArrayXd& f, double lo, double hi) {
    ArrayXd neg = -f;
    return window_minimum(x, neg, lo, hi).x;
}

/// Topographic prominence of the profile peak nearest xs within [lo, hi]:
/// height above the higher flanking minimum, walking outward until the
/// profile exceeds the peak value or the window ends.
double peak_prominence(const ArrayXd& x, const ArrayXd& f, double xs, double lo, double hi) {
    const int n = static_cast<int>(x.size());
    int k = -1;
    double closest = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        if (x[i] < lo || x[i] > hi) continue;
        const double d = std::abs(x[i] - xs);
        if (d < closest) {
            closest = d;
            k = i;
        }
    }
    if (k < 0) return 0.0;
    double left = f[k], right = f[k];
    for (int i = k - 1; i >= 0 && x[i] >= lo && f[i] <= f[k]; --i) left = std::min(left, f[i]);
    for (int i = k + 1; i < n && x[i] <= hi && f[i] <= f[k]; ++i) right = std::min(right, f[i]);
    return f[k] - std::max(left, right);
}

}  // namespace

const char* event_kind_name(EventKind k) {
    switch (k) {
        case EventKind::recirculation_onset: return "recirculation_onset";
        case EventKind::wall_shear_zero: return "wall_shear_zero";
        case EventKind::inflection_pair: return "inflection_pair";
        case EventKind::local_min_formed: return "local_min_formed";
        case EventKind::min_negative: return "min_negative";
        case EventKind::kink: return "kink";
        case EventKind::spike: return "spike";
        case EventKind::core_detected: return "core_detected";
        case EventKind::enstrophy_peak: return "enstrophy_peak";
    }
    return "unknown";
}

std::optional<EventKind> event_kind_from_name(const std::string& name) {
    for (int k = 0; k <= static_cast<int>(EventKind::enstrophy_peak); ++k)
        if (name == event_kind_name(static_cast<EventKind>(k)))
            return static_cast<EventKind>(k);
    return std::nullopt;
}

int SeriesTable::col(const std::string& name) const {
    for (size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return static_cast<int>(i);
    return -1;
}

ArrayXd SeriesTable::column(const std::string& name) const {
    const int c = col(name);
    if (c < 0) throw std::invalid_argument("series column not found: " + name);
    return data.col(c);
}

void merge_events(EventTimeline& tl, const std::vector<Event>& extra) {
    tl.events.insert(tl.events.end(), extra.begin(), extra.end());
    std::stable_sort(tl.events.begin(), tl.events.end(),
                     [](const Event& a, const Event& b) { return a.t < b.t; });
}

EventTimeline assemble_events(const SeriesTable& series, const WallHistory* walls,
                              const EventConfig& cfg) {
    std::vector<Event> ev;
    const int nrow = static_cast<int>(series.t.size());

    // --- recirculation onset: first persistent stagnation center ---
    if (series.has("stag_center")) {
        const ArrayXd sc = series.column("stag_center");
        const ArrayXd sx = series.column("stag_x");
        const ArrayXd sy = series.column("stag_y");
        for (int k = 0; k + cfg.persistence <= nrow; ++k) {
            bool hold = true;
            for (int j = 0; j < cfg.persistence; ++j)
                if (sc[k + j] < 0.5) { hold = false; break; }
            if (!hold) continue;
            Event e;
            e.kind = EventKind::recirculation_onset;
            e.t = series.t[k];
            e.x = sx[k];
            e.y = sy[k];
            ev.push_back(e);
            break;
        }
    }

    // --- wall-shear zero crossing ---
    {
        ArrayXd m, xm, tt;
        if (walls != nullptr) {
            const int np = static_cast<int>(walls->t.size());
            m.resize(np);
            xm.resize(np);
            tt.resize(np);
            for (int k = 0; k < np; ++k) {
                const WindowMin wm = window_minimum(walls->x, walls->tau[k], cfg.shear_lo, cfg.shear_hi);
                m[k] = wm.value;
                xm[k] = wm.x;
                tt[k] = walls->t[k];
            }
        } else if (series.has("tau_min")) {
            m = series.column("tau_min");
            xm = series.column("tau_min_x");
            tt = series.t;
        }
        const int np = static_cast<int>(m.size());
        for (int k = 0; k < np; ++k) {
            if (!(m[k] < 0.0)) continue;
            bool hold = true;
            for (int j = k; j < std::min(np, k + cfg.persistence); ++j)
                if (!(m[j] < 0.0)) { hold = false; break; }
            if (!hold) continue;
            Event e;
            e.kind = EventKind::wall_shear_zero;
            if (k == 0) {
                e.t = tt[0];
                e.x = xm[0];
                e.metadata = "negative_from_start";
            } else {
                const double frac = m[k - 1] / (m[k - 1] - m[k]);
                e.t = tt[k - 1] + frac * (tt[k] - tt[k - 1]);
                e.x = xm[k - 1] + frac * (xm[k] - xm[k - 1]);
            }
            ev.push_back(e);
            break;
        }
    }

    // --- wall pressure-gradient topology (NS profiles) ---
    if (walls != nullptr && walls->aux_is_dpdx) {
        const int np = static_cast<int>(walls->t.size());
        std::vector<double> gmax_x(np);
        std::vector<int> n_infl(np);
        std::vector<std::vector<double>> infl_x(np);
        std::vector<std::vector<ProfileMinimum>> mins(np);
        std::vector<double> curv(np, 0.0);
        const ArrayXd& x = walls->x;

        for (int k = 0; k < np; ++k) {
            const ArrayXd& dp = walls->aux[k];
            gmax_x[k] = window_argmax(x, dp, cfg.minima_lo, cfg.minima_hi);
            if (walls->t[k] < cfg.profile_t_lo) continue;
            for (const auto& c : profile_critical_points(x, dp, cfg.inflection_lo, gmax_x[k]))
                if (c.kind == CritKind::inflection) infl_x[k].push_back(c.x);
            n_infl[k] = static_cast<int>(infl_x[k].size());

            double amax = 0.0;
            for (int i = 0; i < x.size(); ++i)
                if (x[i] >= cfg.minima_lo && x[i] <= cfg.minima_hi)
                    amax = std::max(amax, std::abs(dp[i]));
            mins[k] = local_minima(x, dp, cfg.minima_lo, cfg.minima_hi,
                                   cfg.minima_prominence_rel * amax);

            const ArrayXd d1 = profile_derivative(x, dp);
            const ArrayXd d2 = profile_derivative(x, d1);
            for (int i = 0; i < x.size(); ++i)
                if (x[i] >= cfg.minima_lo && x[i] <= cfg.minima_hi)
                    curv[k] = std::max(curv[k], std::abs(d2[i]));
        }

        // Inflection pair: count in (inflection_lo, x of main max) rising to 2.
        // The rise must happen on scanned rows; a pair already present when
        // scanning starts is initial-condition structure, not a formation.
        for (int k = 1; k + cfg.persistence <= np; ++k) {
            if (walls->t[k - 1] < cfg.profile_t_lo || n_infl[k - 1] >= 2) continue;
            bool hold = true;
            for (int j = 0; j < cfg.persistence; ++j)
                if (n_infl[k + j] < 2) { hold = false; break; }
            if (!hold) continue;
            Event e;
            e.kind = EventKind::inflection_pair;
            e.t = walls->t[k];
            e.x = 0.5 * (infl_x[k][0] + infl_x[k][1]);
            ev.push_back(e);
            break;
        }

        // Track minima across profiles by nearest-x association.
        struct MinTrack {
            int birth = 0;
            std::vector<int> rows;
            std::vector<double> xs, vals;
            bool active = true;
        };
        std::vector<MinTrack> tracks;
        for (int k = 0; k < np; ++k) {
            std::vector<bool> claimed(mins[k].size(), false);
            for (auto& tr : tracks) {
                if (!tr.active) continue;
                int best = -1;
                double dbest = cfg.minima_match_dx;
                for (size_t c = 0; c < mins[k].size(); ++c) {
                    if (claimed[c]) continue;
                    const double d = std::abs(mins[k][c].x - tr.xs.back());
                    if (d < dbest) { dbest = d; best = static_cast<int>(c); }
                }
                if (best < 0) {
                    tr.active = false;
                    continue;
                }
                claimed[best] = true;
                tr.rows.push_back(k);
                tr.xs.push_back(mins[k][best].x);
                tr.vals.push_back(mins[k][best].value);
            }
            for (size_t c = 0; c < mins[k].size(); ++c) {
                if (claimed[c]) continue;
                MinTrack tr;
                tr.birth = k;
                tr.rows.push_back(k);
                tr.xs.push_back(mins[k][c].x);
                tr.vals.push_back(mins[k][c].value);
                tracks.push_back(std::move(tr));
            }
        }
        int k_first = np;
        for (int k = 0; k < np; ++k)
            if (walls->t[k] >= cfg.profile_t_lo) { k_first = k; break; }
        for (const auto& tr : tracks) {
            if (static_cast<int>(tr.rows.size()) < cfg.minima_persistence) continue;
            // A track alive on the first scanned row is pre-existing profile
            // structure (the standing upstream minimum, or the initial sheet),
            // not a formation.
            if (tr.birth <= k_first) continue;
            const int kb = tr.birth;
            const char* side = tr.xs.front() < gmax_x[kb] ? "upstream" : "downstream";
            Event e;
            e.kind = EventKind::local_min_formed;
            e.t = walls->t[kb];
            e.x = tr.xs.front();
            e.metadata = side;
            ev.push_back(e);
            for (size_t s = 0; s < tr.vals.size(); ++s) {
                if (!(tr.vals[s] < 0.0)) continue;
                Event en;
                en.kind = EventKind::min_negative;
                en.metadata = side;
                if (s == 0) {
                    en.t = walls->t[tr.rows[0]];
                    en.x = tr.xs[0];
                } else {
                    const double v0 = tr.vals[s - 1], v1 = tr.vals[s];
                    const double frac = v0 / (v0 - v1);
                    const double t0 = walls->t[tr.rows[s - 1]], t1 = walls->t[tr.rows[s]];
                    en.t = t0 + frac * (t1 - t0);
                    en.x = tr.xs[s - 1] + frac * (tr.xs[s] - tr.xs[s - 1]);
                }
                ev.push_back(en);
                break;
            }
        }

        // Kink: wall pressure-gradient curvature rising far above its
        // pre-interaction baseline.
        std::vector<double> base;
        for (int k = 0; k < np; ++k)
            if (walls->t[k] >= cfg.profile_t_lo && walls->t[k] <= cfg.baseline_t)
                base.push_back(curv[k]);
        if (base.size() >= 3) {
            const double b = median(base);
            for (int k = 0; k + cfg.persistence <= np; ++k) {
                bool hold = b > 0.0;
                for (int j = 0; j < cfg.persistence && hold; ++j)
                    if (curv[k + j] <= cfg.kink_factor * b) hold = false;
                if (!hold) continue;
                Event e;
                e.kind = EventKind::kink;
                e.t = walls->t[k];
                e.metadata = "dpdx_curvature";
                ev.push_back(e);
                break;
            }
        }
    }

    // --- displacement-thickness local maximum (Prandtl profiles) ---
    if (walls != nullptr && !walls->aux_is_dpdx) {
        const int np = static_cast<int>(walls->t.size());
        std::vector<double> max_x(np, kNan);
        for (int k = 0; k < np; ++k) {
            if (walls->t[k] < cfg.profile_t_lo) continue;
            double scale = 0.0;
            for (int i = 0; i < walls->x.size(); ++i)
                if (walls->x[i] >= cfg.beta_lo && walls->x[i] <= cfg.beta_hi)
                    scale = std::max(scale, std::abs(walls->aux[k][i]));
            for (const auto& c : profile_critical_points(walls->x, walls->aux[k],
                                                         cfg.beta_lo, cfg.beta_hi)) {
                if (c.kind != CritKind::maximum) continue;
                if (peak_prominence(walls->x, walls->aux[k], c.x, cfg.beta_lo, cfg.beta_hi) <
                    cfg.beta_prominence_rel * scale)
                    continue;
                max_x[k] = c.x;
                break;
            }
        }
        for (int k = 0; k + cfg.minima_persistence <= np; ++k) {
            bool hold = true;
            for (int j = 0; j < cfg.minima_persistence; ++j)
                if (std::isnan(max_x[k + j])) { hold = false; break; }
            if (!hold) continue;
            Event e;
            e.kind = EventKind::kink;
            e.t = walls->t[k];
            e.x = max_x[k];
            e.metadata = "displacement_max";
            ev.push_back(e);
            break;
        }
    }

    // --- spike: streamwise gradient far above its baseline ---
    if (series.has("max_dudx")) {
        const ArrayXd g = series.column("max_dudx");
        std::vector<double> base;
        for (int k = 0; k < nrow; ++k)
            if (series.t[k] <= cfg.baseline_t) base.push_back(g[k]);
        if (base.size() >= 3) {
            const double b = median(base);
            for (int k = 0; b > 0.0 && k + cfg.persistence <= nrow; ++k) {
                bool hold = true;
                for (int j = 0; j < cfg.persistence; ++j)
                    if (g[k + j] <= cfg.spike_factor * b) { hold = false; break; }
                if (!hold) continue;
                Event e;
                e.kind = EventKind::spike;
                e.t = series.t[k];
                if (series.has("max_dudx_x")) e.x = series.column("max_dudx_x")[k];
                ev.push_back(e);
                break;
            }
        }
    }

    // --- enstrophy peaks ---
    if (series.has("Omega")) {
        const ArrayXd om = series.column("Omega");
        for (int i : series_peaks(om, cfg.enstrophy_prominence)) {
            Event e;
            e.kind = EventKind::enstrophy_peak;
            e.t = series.t[i];
            e.metadata = "Omega=" + std::to_string(om[i]);
            ev.push_back(e);
        }
    }

    EventTimeline tl;
    merge_events(tl, ev);
    return tl;
}

std::vector<Event> core_events(const std::vector<double>& times,
                               const std::vector<const ArrayXXd*>& omega,
                               const ArrayXd& xphys, const ArrayXd& yphys,
                               const EventConfig& cfg) {
    if (times.size() != omega.size())
        throw std::invalid_argument("core_events: times/fields size mismatch");
    std::vector<Event> ev;
    for (int sign : {-1, +1}) {
        std::vector<std::vector<CoreSample>> frames(times.size());
        for (size_t k = 0; k < times.size(); ++k)
            frames[k] = find_cores(*omega[k], xphys, yphys, sign, cfg.core_rel_threshold,
                                   cfg.core_x_lo, cfg.core_x_hi, cfg.core_y_lo, cfg.core_y_hi,
                                   times[k]);
        for (const auto& tr : link_tracks(frames, cfg.core_max_jump)) {
            if (tr.samples.size() < 2) continue;
            Event e;
            e.kind = EventKind::core_detected;
            e.t = tr.samples.front().t;
            e.x = tr.samples.front().x;
            e.y = tr.samples.front().y;
            e.metadata = sign < 0 ? "negative" : "positive";
            if (tr.ambiguous) e.metadata += ",ambiguous";
            ev.push_back(e);
        }
    }
    std::sort(ev.begin(), ev.end(), [](const Event& a, const Event& b) { return a.t < b.t; });
    return ev;
}

}  // namespace vbl
