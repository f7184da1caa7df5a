#include "ladderlab/clocks.hpp"

#include <algorithm>
#include <cmath>

namespace ladderlab {

bool RegimePath::at(double t) const {
    if (t < breaks.front() || t >= breaks.back()) return false;
    auto it = std::upper_bound(breaks.begin(), breaks.end(), t);
    const auto idx = static_cast<std::size_t>(it - breaks.begin()) - 1;
    return idx < on.size() ? on[idx] : false;
}

void RegimePath::apply_window(double ws, double we) {
    ws = std::max(ws, t0());
    we = std::min(we, t1());
    if (we <= ws) return;
    std::vector<std::pair<double, bool>> segs;  // (start, value)
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double a = breaks[i], b = breaks[i + 1];
        const bool val = on[i];
        const double lo = std::max(a, ws), hi = std::min(b, we);
        if (hi <= lo) {
            segs.emplace_back(a, val);
        } else {
            if (a < lo) segs.emplace_back(a, val);
            segs.emplace_back(lo, false);
            if (hi < b) segs.emplace_back(hi, val);
        }
    }
    const double end = breaks.back();
    std::vector<double> nb;
    std::vector<bool> nv;
    for (const auto& [start, val] : segs) {
        if (!nv.empty() && nv.back() == val) continue;  // merge equal runs
        nb.push_back(start);
        nv.push_back(val);
    }
    nb.push_back(end);
    breaks = nb;
    on = nv;
}

std::optional<double> sample_next_arrival(double lambda_bar,
                                          const RegimePath& regime,
                                          RngStream& rng) {
    if (regime.t1() < regime.t0())
        throw Error("bad_interval", "regime path must have t1 >= t0");
    if (lambda_bar <= 0.0) return std::nullopt;
    const double target = rng.exponential(1.0);  // E ~ Exp(1)
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < regime.breaks.size(); ++i) {
        if (!regime.on[i]) continue;
        const double len = regime.breaks[i + 1] - regime.breaks[i];
        const double seg = lambda_bar * len;
        if (acc + seg >= target)
            return regime.breaks[i] + (target - acc) / lambda_bar;
        acc += seg;
    }
    return std::nullopt;
}

std::vector<Event> merge_event_streams(
    const std::vector<std::vector<Event>>& streams,
    const std::vector<double>& checkpoints) {
    std::vector<Event> all;
    for (const auto& s : streams) all.insert(all.end(), s.begin(), s.end());
    for (double t : checkpoints)
        all.push_back({t, EventKind::checkpoint, -1, 0.0, 0.0});
    std::stable_sort(all.begin(), all.end(), [](const Event& a, const Event& b) {
        if (a.time != b.time) return a.time < b.time;
        return a.agent < b.agent;
    });
    return all;
}

const char* event_kind_name(EventKind k) {
    switch (k) {
        case EventKind::checkpoint: return "checkpoint";
        case EventKind::opportunity: return "opportunity";
        case EventKind::disclosure: return "disclosure";
        case EventKind::relay: return "relay";
        case EventKind::clock_switch: return "clock_switch";
        case EventKind::window_start: return "window_start";
        case EventKind::window_end: return "window_end";
    }
    return "unknown";
}

}  // namespace ladderlab
