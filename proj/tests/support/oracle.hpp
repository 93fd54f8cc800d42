#pragma once

#include <algorithm>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "tempo/model.hpp"
#include "tempo/temporal.hpp"

namespace oracle {

using namespace tempo;

struct Item {
    ActionPtr action;
    std::vector<Constant> args;
};

// Earliest times for a fixed event order: events never go back in time and an
// end waits for its entry's duration.
inline Schedule timed(const std::vector<Item>& items, const std::vector<double>& durations,
                      const std::vector<ScheduleEvent>& order) {
    Schedule s;
    for (const auto& it : items) s.entries.push_back({0.0, 0.0, it.action, it.args});
    double now = 0.0;
    for (const auto& ev : order) {
        ScheduleEntry& e = s.entries[ev.entry];
        if (ev.kind == EventKind::End) {
            now = std::max(now, e.start + durations[ev.entry]);
            e.end = now;
        } else {
            e.start = now;
            e.end = now;
        }
    }
    s.event_order = order;
    return s;
}

inline void each_interleaving(const std::vector<Item>& items, const std::function<void(std::vector<ScheduleEvent>&)>& visit) {
    const std::size_t n = items.size();
    std::vector<int> stage(n, 0);  // 0 not started, 1 running, 2 done
    std::vector<ScheduleEvent> order;
    std::size_t total = 0;
    for (const auto& it : items) total += it.action->is_durative() ? 2 : 1;
    std::function<void()> rec = [&] {
        if (order.size() == total) {
            visit(order);
            return;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (stage[i] == 2) continue;
            EventKind kind;
            if (!items[i].action->is_durative()) {
                kind = EventKind::Instant;
            } else {
                kind = stage[i] == 0 ? EventKind::Start : EventKind::End;
            }
            const int saved = stage[i];
            stage[i] = kind == EventKind::Start ? 1 : 2;
            order.push_back({i, kind});
            rec();
            order.pop_back();
            stage[i] = saved;
        }
    };
    rec();
}

// Minimum makespan over every valid interleaving of exactly `items`.
inline std::optional<double> best_interleaving(const State& initial, const std::vector<Condition>& goal,
                                               const std::vector<Item>& items, Schedule* best = nullptr) {
    std::vector<double> durations;
    for (const auto& it : items) durations.push_back(ground_action(it.action, it.args, initial)->duration_value);
    std::optional<double> out;
    each_interleaving(items, [&](std::vector<ScheduleEvent>& order) {
        Schedule s = timed(items, durations, order);
        const double m = s.makespan();
        if (out && m >= *out) return;
        if (!validate_schedule(initial, goal, s)) return;
        out = m;
        if (best) *best = std::move(s);
    });
    return out;
}

// Minimum over every sub-multiset of `items` (each used at most once).
inline std::optional<double> best_subset(const State& initial, const std::vector<Condition>& goal,
                                         const std::vector<Item>& items) {
    std::optional<double> out;
    const std::size_t n = items.size();
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        std::vector<Item> chosen;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask & (std::size_t{1} << i)) chosen.push_back(items[i]);
        }
        if (auto m = best_interleaving(initial, goal, chosen); m && (!out || *m < *out)) out = m;
    }
    return out;
}

inline std::vector<Item> items_of(const Schedule& s) {
    std::vector<Item> out;
    for (const auto& e : s.entries) out.push_back({e.action, e.args});
    return out;
}

// Positive-length overlap between two entries.
inline double overlap(const ScheduleEntry& a, const ScheduleEntry& b) {
    return std::min(a.end, b.end) - std::max(a.start, b.start);
}

}  // namespace oracle
