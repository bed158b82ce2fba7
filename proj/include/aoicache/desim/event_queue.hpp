#pragma once

#include <cstdint>
#include <queue>
#include <vector>

namespace aoicache::desim {

enum class EventKind : std::uint8_t {
    arrival,
    uplink_done,    // conventional uplink transmission finished
    downlink_done,  // delivery transmission finished (all schemes)
    update_done,    // RSUC round-robin update finished
    fetch_done,     // ReA fetch phase finished
    stop_arrivals,  // end of the arrival horizon in duration mode
};

struct Event {
    double time = 0.0;
    std::uint64_t seq = 0;
    EventKind kind = EventKind::arrival;
};

/// Pending events ordered by time; ties dispatch in insertion order.
class EventQueue {
public:
    void push(double time, EventKind kind) { heap_.push(Event{time, next_seq_++, kind}); }

    Event pop() {
        Event e = heap_.top();
        heap_.pop();
        return e;
    }

    const Event& top() const { return heap_.top(); }
    bool empty() const noexcept { return heap_.empty(); }
    std::size_t size() const noexcept { return heap_.size(); }

private:
    struct Later {
        bool operator()(const Event& a, const Event& b) const noexcept {
            if (a.time != b.time) return a.time > b.time;
            return a.seq > b.seq;
        }
    };

    std::priority_queue<Event, std::vector<Event>, Later> heap_;
    std::uint64_t next_seq_ = 0;
};

}  // namespace aoicache::desim
