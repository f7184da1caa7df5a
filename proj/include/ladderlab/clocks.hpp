#pragma once

#include <optional>
#include <vector>

#include "ladderlab/model.hpp"
#include "ladderlab/rng.hpp"

namespace ladderlab {

// Piecewise-constant {off, on} regime over [t0, t1]: value on
// [breaks[i], breaks[i+1]) is on[i]; breaks.front() = t0, breaks.back() = t1.
struct RegimePath {
    std::vector<double> breaks;
    std::vector<bool> on;

    static RegimePath constant(double t0, double t1, bool is_on) {
        return {{t0, t1}, {is_on}};
    }
    double t0() const { return breaks.front(); }
    double t1() const { return breaks.back(); }
    bool at(double t) const;
    // intersect with an announced silence window [ws, we): regime off inside
    void apply_window(double ws, double we);
};

struct OpportunityEvent {
    int agent = 0;
    double time = 0.0;
};

struct AnnouncedWindow {
    double start = 0.0;
    double duration = 0.0;
    double end() const { return start + duration; }
};

// First jump after t0 of a Cox process with intensity lambda_bar on "on"
// segments and 0 on "off" segments, by exponential time-change inversion;
// nullopt if no jump in [t0, t1].
std::optional<double> sample_next_arrival(double lambda_bar,
                                          const RegimePath& regime,
                                          RngStream& rng);

enum class EventKind {
    checkpoint,
    opportunity,
    disclosure,
    relay,
    clock_switch,
    window_start,
    window_end
};

struct Event {
    double time = 0.0;
    EventKind kind = EventKind::checkpoint;
    int agent = -1;
    double payload = 0.0;   // disclosed content, etc.
    double payload2 = 0.0;  // origin time for disclosures/relays
};

// Globally sorted merge; ties broken by agent id (lowest first), then by
// stream order.
std::vector<Event> merge_event_streams(
    const std::vector<std::vector<Event>>& streams,
    const std::vector<double>& checkpoints);

const char* event_kind_name(EventKind k);

}  // namespace ladderlab
