#include "ladderlab/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "ladderlab/belief.hpp"
#include "ladderlab/gauss.hpp"
#include "ladderlab/reputation.hpp"

namespace ladderlab {

namespace {

constexpr std::uint64_t kStreamFundamental = 1;
constexpr std::uint64_t kStreamNews = 2;
constexpr std::uint64_t kStreamArrivalBase = 100;

struct HeldSignal {
    int origin_agent = -1;
    double origin_time = 0.0;
    double x_origin = 0.0;
    bool published = false;  // content already incorporated in m
};

bool same_signal(const HeldSignal& a, const HeldSignal& b) {
    return a.origin_agent == b.origin_agent && a.origin_time == b.origin_time;
}

}  // namespace

LadderPolicy always_disclose_policy(int agent_id) {
    LadderPolicy p;
    p.agent_id = agent_id;
    p.r_nodes = {0.0, 1.0};
    LadderRow row;
    row.disclose_left = true;
    row.full_disclosure = true;
    row.r = 0.0;
    p.rows = {row, row};
    p.rows[1].r = 1.0;
    return p;
}

LadderPolicy never_disclose_policy(int agent_id) {
    LadderPolicy p;
    p.agent_id = agent_id;
    p.r_nodes = {0.0, 1.0};
    LadderRow row;
    row.disclose_left = false;
    row.pure_inaction = true;
    row.r = 0.0;
    p.rows = {row, row};
    p.rows[1].r = 1.0;
    return p;
}

PolicyMap uniform_policies(const ScenarioConfig& config, bool disclose) {
    PolicyMap out;
    for (const auto& a : config.network.nodes) {
        if (a.is_dm()) continue;
        out[a.id] = {disclose ? always_disclose_policy(a.id)
                              : never_disclose_policy(a.id),
                     {}};
    }
    return out;
}

EventTrace simulate_once(const ScenarioConfig& config, const PolicyMap& policies,
                         std::uint64_t rep_index, const SimOptions& opts) {
    const OUParams& ou = config.ou;
    const NetworkSpec& net = config.network;
    const int dm = net.dm_id();
    const double dt = config.sim_dt();
    const double T = config.sim_horizon();

    std::vector<const AgentSpec*> actors;  // non-DM agents in scenario order
    for (const auto& a : net.nodes)
        if (!a.is_dm()) actors.push_back(&a);

    const auto deleted = [&](int id) {
        return std::find(opts.deleted_agents.begin(), opts.deleted_agents.end(),
                         id) != opts.deleted_agents.end();
    };

    for (const auto* a : actors) {
        if (deleted(a->id)) continue;
        if (!policies.count(a->id))
            throw Error("policy_missing",
                        "no policy for agent " + std::to_string(a->id));
    }

    // antithetic pairing acts on the fundamental's stream only; arrival and
    // news streams are keyed by the pair index so a pair shares them
    const std::uint64_t pair_index = rep_index / 2;
    const bool anti = (rep_index % 2) == 1;
    RngStream rng_x =
        RngStream::keyed(config.seed, pair_index, kStreamFundamental);
    rng_x.set_antithetic(anti);
    RngStream rng_news = RngStream::keyed(config.seed, pair_index, kStreamNews);
    std::map<int, RngStream> rng_arrival;
    for (const auto* a : actors)
        rng_arrival.emplace(a->id,
                            RngStream::keyed(config.seed, pair_index,
                                             kStreamArrivalBase +
                                                 static_cast<std::uint64_t>(a->id)));

    // initial state: public belief at the stationary prior, X drawn from it
    const double v_pub0 = riccati_stationary_var(ou);
    double m = ou.xbar;
    double v = v_pub0;
    double x = m + std::sqrt(v) * rng_x.gaussian();
    std::map<int, double> pi;
    std::map<int, std::vector<HeldSignal>> held;
    for (const auto* a : actors) {
        pi[a->id] = a->rep.pi0;
        held[a->id] = {};
    }
    double last_public_origin = -1.0;
    std::vector<std::pair<int, double>> delivered_keys;

    EventTrace trace;
    std::map<int, KahanSum> payoff;
    payoff[dm] = {};
    for (const auto* a : actors) payoff[a->id] = {};

    const auto record_event = [&](EventKind kind, double time, int agent,
                                  double payload = 0.0, double payload2 = 0.0) {
        if (opts.record_events)
            trace.events.push_back({time, kind, agent, payload, payload2});
    };
    const auto in_window = [&](int id, double t) {
        auto it = policies.find(id);
        if (it == policies.end()) return false;
        for (const auto& w : it->second.windows)
            if (t >= w.start && t < w.end()) return true;
        return false;
    };
    const auto window_regime = [&](int id, double a, double b) {
        RegimePath rp = RegimePath::constant(a, b, true);
        auto it = policies.find(id);
        if (it != policies.end())
            for (const auto& w : it->second.windows)
                rp.apply_window(w.start, w.end());
        return rp;
    };

    if (opts.record_events)
        for (const auto* a : actors)
            if (auto it = policies.find(a->id); it != policies.end())
                for (const auto& w : it->second.windows) {
                    record_event(EventKind::window_start, w.start, a->id);
                    record_event(EventKind::window_end, w.end(), a->id);
                }

    const auto record_path_sample = [&](double t) {
        if (!opts.record_path) return;
        PathSample s;
        s.t = t;
        s.x = x;
        s.m = m;
        s.v = v;
        for (const auto* a : actors) s.pi.push_back(pi[a->id]);
        trace.path.push_back(s);
    };
    record_path_sample(0.0);

    // advance the world over [a, b] with no discrete events inside
    const auto advance_continuous = [&](double a, double b) {
        if (b <= a) return;
        const double step = b - a;
        // payoffs: trapezoid with exact discount weights at the endpoints
        const double w0 = std::exp(-ou.rho * a), w1 = std::exp(-ou.rho * b);
        const auto flow_dm = [&](double mm, double xx) {
            const double e = mm - xx;
            return -e * e;
        };
        std::map<int, double> flow0;
        flow0[dm] = flow_dm(m, x);
        for (const auto* ag : actors) {
            if (deleted(ag->id)) continue;
            const double e = m - x - ag->bias;
            flow0[ag->id] = -ag->alpha * e * e +
                            ag->beta * rep_from_pi(ag->rep, pi[ag->id]);
        }

        // silence drift gated by the segment-start public state
        const double m_gate = m;
        for (const auto* ag : actors) {
            if (deleted(ag->id)) continue;
            bool disclosing = false;
            if (!held[ag->id].empty() && !in_window(ag->id, a)) {
                const auto& pol = policies.at(ag->id).ladder;
                disclosing =
                    pol.discloses(m_gate, rep_from_pi(ag->rep, pi[ag->id]));
            }
            pi[ag->id] = silence_drift(ag->rep, pi[ag->id], ag->lambda_bar,
                                       disclosing, step);
        }

        const double x_prev = x;
        x = ou_transition_sample(ou, x, step, rng_x);
        std::optional<double> news;
        if (ou.h > 0.0) {
            const double dw = std::sqrt(step) * rng_news.gaussian();
            news = ou.h * x_prev * step + dw;  // dZ = h X dt + dW
        }
        const BeliefState nb = filter_advance(ou, {m, v, a}, step, news);
        m = nb.m;
        v = nb.v;

        payoff[dm].add(0.5 * step * (w0 * flow0[dm] + w1 * flow_dm(m, x)));
        for (const auto* ag : actors) {
            if (deleted(ag->id)) continue;
            const double e = m - x - ag->bias;
            const double f1 =
                -ag->alpha * e * e + ag->beta * rep_from_pi(ag->rep, pi[ag->id]);
            payoff[ag->id].add(0.5 * step * (w0 * flow0[ag->id] + w1 * f1));
        }
    };

    const auto handle_opportunity = [&](const AgentSpec& ag, double t) {
        record_event(EventKind::opportunity, t, ag.id);
        auto& bag = held[ag.id];
        if (ag.role == AgentRole::expert) {
            // a jump of the expert's clock generates a fresh verifiable
            // signal and is its first disclosure opportunity
            bag.push_back({ag.id, t, x, false});
            ++trace.signals_originated;
        }
        // contents already public carry no news and no reputational credit
        bag.erase(std::remove_if(bag.begin(), bag.end(),
                                 [&](const HeldSignal& s) {
                                     return s.origin_time <= last_public_origin;
                                 }),
                  bag.end());
        if (bag.empty()) return;
        const double r_now = rep_from_pi(ag.rep, pi[ag.id]);
        const auto& pol = policies.at(ag.id).ladder;
        if (!pol.discloses(m, r_now)) return;

        const auto neighbors = net.out_neighbors(ag.id);
        if (neighbors.empty()) return;

        const bool to_dm =
            std::find(neighbors.begin(), neighbors.end(), dm) != neighbors.end();

        // the freshest held signal determines the belief jump; older contents
        // are dominated by it under the Markov fundamental
        const HeldSignal* freshest = &bag.front();
        for (const auto& s : bag)
            if (s.origin_time > freshest->origin_time) freshest = &s;

        const double m_before = m;
        if (to_dm && freshest->origin_time > last_public_origin) {
            const double delta = t - freshest->origin_time;
            m = ou_transition_mean(ou, freshest->x_origin, delta);
            v = ou_transition_var(ou, delta);
            last_public_origin = freshest->origin_time;
        }

        // reputational jump: the public observes the act of disclosure
        pi[ag.id] = disclosure_jump(ag.rep, pi[ag.id]);

        DisclosureRecord rec;
        rec.agent = ag.id;
        rec.time = t;
        rec.delay = t - freshest->origin_time;
        rec.terminal = to_dm;
        rec.m_move = m - m_before;
        trace.disclosures.push_back(rec);

        for (const auto& sig : bag) {
            if (to_dm) {
                const std::pair<int, double> key{sig.origin_agent,
                                                 sig.origin_time};
                if (std::find(delivered_keys.begin(), delivered_keys.end(),
                              key) == delivered_keys.end()) {
                    delivered_keys.push_back(key);
                    trace.deliveries.push_back(
                        {sig.origin_agent, sig.origin_time, t});
                }
            }
            record_event(to_dm ? EventKind::disclosure : EventKind::relay, t,
                         ag.id, sig.x_origin, sig.origin_time);
            for (int nb : neighbors) {
                if (nb == dm || deleted(nb)) continue;
                auto& tgt = held[nb];
                bool dup = false;
                for (const auto& h : tgt)
                    if (same_signal(h, sig)) dup = true;
                if (!dup) tgt.push_back(sig);
            }
        }
        bag.clear();
    };

    double t = 0.0;
    while (t < T - 1e-12) {
        const double seg_end = std::min(t + dt, T);
        // next arrival per agent inside the segment (regime: on outside
        // announced windows; the ladder's clock choice is on by construction)
        double cursor = t;
        while (true) {
            double best_time = seg_end;
            const AgentSpec* best_agent = nullptr;
            for (const auto* ag : actors) {
                if (deleted(ag->id) || ag->lambda_bar <= 0.0) continue;
                RegimePath rp = window_regime(ag->id, cursor, seg_end);
                auto hit = sample_next_arrival(ag->lambda_bar, rp,
                                               rng_arrival.at(ag->id));
                if (hit && *hit < best_time) {
                    best_time = *hit;
                    best_agent = ag;
                }
            }
            if (!best_agent) {
                advance_continuous(cursor, seg_end);
                break;
            }
            advance_continuous(cursor, best_time);
            handle_opportunity(*best_agent, best_time);
            cursor = best_time;
            if (cursor >= seg_end - 1e-15) break;
        }
        t = seg_end;
        record_event(EventKind::checkpoint, t, -1);
        record_path_sample(t);
    }

    for (auto& [id, acc] : payoff) trace.payoffs[id] = acc.value();
    return trace;
}

ValueReport estimate_values(const ScenarioConfig& config,
                            const PolicyMap& policies) {
    const int reps = config.sim.reps;
    const int n_pairs = std::max(1, reps / 2);
    const int total = n_pairs * 2;

    std::vector<std::map<int, double>> rep_payoffs(total);
    const int threads = std::max(1, config.sim.threads);
    std::atomic<int> next{0};
    auto worker = [&]() {
        while (true) {
            const int k = next.fetch_add(1);
            if (k >= total) return;
            EventTrace tr = simulate_once(config, policies,
                                          static_cast<std::uint64_t>(k));
            rep_payoffs[k] = tr.payoffs;
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    ValueReport out;
    out.reps = total;
    out.seed = config.seed;
    const int dm = config.network.dm_id();

    std::vector<int> ids;
    for (const auto& a : config.network.nodes) ids.push_back(a.id);

    double total_cost = 0.0;
    for (const auto& [l, c] : config.network.link_costs) total_cost += c;

    std::map<int, RunningStats> stats;
    RunningStats wstats;
    for (int p = 0; p < n_pairs; ++p) {
        double wsum = 0.0;
        for (int id : ids) {
            const double v = 0.5 * (rep_payoffs[2 * p].at(id) +
                                    rep_payoffs[2 * p + 1].at(id));
            stats[id].add(v);
            wsum += v;
        }
        wstats.add(wsum - total_cost);
    }
    for (int id : ids) {
        out.per_agent[id] = {stats[id].mean, stats[id].se};
    }
    out.v0 = out.per_agent.at(dm);
    out.welfare = {wstats.mean, wstats.se};
    return out;
}

TimingStats timing_statistics(const std::vector<EventTrace>& traces) {
    if (traces.size() < 100)
        throw Error("insufficient_traces", "timing statistics need >= 100 traces");
    TimingStats out;
    KahanSum delay_up, delay_down;
    for (const auto& tr : traces) {
        double last = -1.0;
        for (const auto& d : tr.disclosures) {
            if (!d.terminal) continue;
            ++out.n_disclosures;
            if (last >= 0.0) out.durations.push_back(d.time - last);
            last = d.time;
            if (d.m_move > 0.0) {
                delay_up.add(d.delay);
                ++out.n_up;
            } else if (d.m_move < 0.0) {
                delay_down.add(d.delay);
                ++out.n_down;
            }
        }
    }
    if (out.n_disclosures < 20)
        throw Error("insufficient_events", "fewer than 20 disclosure events");
    RunningStats rs;
    for (double d : out.durations) rs.add(d);
    out.mean_duration = rs.mean;
    out.sd_duration = rs.sd();
    out.burstiness = (out.sd_duration - out.mean_duration) /
                     (out.sd_duration + out.mean_duration);
    out.q10 = quantile(out.durations, 0.10);
    out.q50 = quantile(out.durations, 0.50);
    out.q90 = quantile(out.durations, 0.90);
    out.mean_delay_up = out.n_up > 0 ? delay_up.value() / out.n_up : 0.0;
    out.mean_delay_down = out.n_down > 0 ? delay_down.value() / out.n_down : 0.0;
    return out;
}

std::map<int, double> no_information_values(const ScenarioConfig& config) {
    const OUParams& ou = config.ou;
    // v(t) relaxes from the stationary prior (already there): v(t) = vbar
    // for h = 0; with news the public still learns, so use the Riccati
    // stationary level throughout.
    const double vbar = riccati_stationary_var(ou);
    std::map<int, double> out;
    for (const auto& a : config.network.nodes) {
        if (a.is_dm()) {
            out[a.id] = -vbar / ou.rho;
            continue;
        }
        const double r0 = rep_from_pi(a.rep, a.rep.pi0);
        out[a.id] = (-a.alpha * (vbar + a.bias * a.bias) + a.beta * r0) / ou.rho;
    }
    return out;
}

}  // namespace ladderlab
