#include "aoicache/desim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <exception>
#include <limits>
#include <ostream>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>

#include "aoicache/desim/event_queue.hpp"
#include "aoicache/desim/rng.hpp"
#include "aoicache/errors.hpp"

namespace aoicache::desim {

void RateProfile::validate() const {
    if (start.empty() || start.size() != rate.size()) {
        throw InvalidParameter("arrival profile needs one rate per segment start");
    }
    if (start.front() != 0.0) throw InvalidParameter("arrival profile must start at time 0");
    for (std::size_t i = 0; i < start.size(); ++i) {
        if (!(rate[i] >= 0.0) || !std::isfinite(rate[i])) {
            throw InvalidParameter("arrival profile rates must be finite and >= 0");
        }
        if (i > 0 && !(start[i] > start[i - 1])) {
            throw InvalidParameter("arrival profile times must be strictly increasing");
        }
    }
}

double RateProfile::rate_at(double t) const {
    auto it = std::upper_bound(start.begin(), start.end(), t);
    if (it == start.begin()) return rate.front();
    return rate[static_cast<std::size_t>(it - start.begin()) - 1];
}

void validate(const SimConfig& cfg) {
    validate_scheme(cfg.scheme, cfg.scenario.item_count());
    if (cfg.replications < 1) throw InvalidParameter("replications must be >= 1");
    if (cfg.divergence_bound < 1) throw InvalidParameter("divergence_bound must be >= 1");
    if (const auto* c = std::get_if<Conventional>(&cfg.scheme)) {
        if (!(c->beta > 0.0 && c->beta < 1.0)) {
            throw InvalidParameter("conventional simulation needs 0 < beta < 1");
        }
    }
    if (const auto* r = std::get_if<Rsuc>(&cfg.scheme)) {
        if (!(r->beta < 1.0)) throw InvalidParameter("RSUC simulation needs beta < 1 (no delivery bandwidth)");
    }

    if (!(cfg.stop.value > 0.0) || !std::isfinite(cfg.stop.value)) {
        throw InvalidParameter("stop value must be positive and finite");
    }
    if (cfg.stop.kind == StopRule::Kind::requests && cfg.stop.value != std::floor(cfg.stop.value)) {
        throw InvalidParameter("stop request count must be an integer");
    }
    if (!(cfg.warmup.value >= 0.0) || !std::isfinite(cfg.warmup.value)) {
        throw InvalidParameter("warmup must be finite and >= 0");
    }
    if (cfg.stop.kind == StopRule::Kind::duration) {
        const double warm =
            cfg.warmup.kind == Warmup::Kind::fraction ? cfg.warmup.value * cfg.stop.value : cfg.warmup.value;
        if (!(warm < cfg.stop.value)) throw InvalidParameter("stop must come strictly after warmup");
    }

    if (cfg.arrival_profile) {
        cfg.arrival_profile->validate();
    } else if (!(cfg.scenario.total_lambda() > 0.0)) {
        throw InvalidParameter("simulation needs lambda_total > 0");
    }
    for (std::size_t i = 1; i < cfg.bucket_edges.size(); ++i) {
        if (!(cfg.bucket_edges[i] > cfg.bucket_edges[i - 1])) {
            throw InvalidParameter("bucket edges must be strictly increasing");
        }
    }
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Job {
    std::uint32_t item = 0;
    std::uint32_t bucket = 0;
    bool measured = false;
    double arrival = 0.0;
    double gen = 0.0;
    double delivery_start = 0.0;
    double stage_enter = 0.0;
    double service = 0.0;
    double transmission = 0.0;
};

struct Station {
    const char* name = "";
    std::deque<Job> queue;
    double area = 0.0;
    double last = 0.0;
    double sojourn_sum = 0.0;
    std::uint64_t sojourn_count = 0;
};

/// Running mean/variance.
struct Welford {
    std::uint64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++n;
        const double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }
    double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
};

class Replication {
public:
    Replication(const SimConfig& cfg, unsigned rep, const RecordSink& sink)
        : cfg_(cfg),
          kind_(scheme_kind(cfg.scheme)),
          sink_(sink),
          arrivals_(derive_stream_seed(cfg.seed, rep, Stream::arrivals)),
          items_(derive_stream_seed(cfg.seed, rep, Stream::items)),
          uplink_(derive_stream_seed(cfg.seed, rep, Stream::uplink)),
          downlink_(derive_stream_seed(cfg.seed, rep, Stream::downlink)),
          updates_(derive_stream_seed(cfg.seed, rep, Stream::updates)),
          sampler_(cfg.scenario.request_prob()) {
        const auto& rates = cfg.scenario.rates();
        const std::size_t n_items = cfg.scenario.item_count();
        switch (kind_) {
            case SchemeKind::conventional: {
                const double beta = std::get<Conventional>(cfg.scheme).beta;
                mean_up_ = 1.0 / (beta * rates.r_ul());
                mean_down_ = 1.0 / ((1.0 - beta) * rates.r_dl());
                up_.name = "uplink";
                down_.name = "downlink";
                break;
            }
            case SchemeKind::rsuc: {
                const double beta = std::get<Rsuc>(cfg.scheme).beta;
                mean_up_ = beta > 0.0 ? 1.0 / (beta * rates.r_ul()) : kInf;
                mean_down_ = 1.0 / ((1.0 - beta) * rates.r_dl());
                down_.name = "downlink";
                break;
            }
            case SchemeKind::rea:
                mean_up_ = 1.0 / rates.r_ul();
                mean_down_ = 1.0 / rates.r_dl();
                update_prob_ = std::get<Rea>(cfg.scheme).update_prob;
                down_.name = "server";
                break;
        }
        deterministic_ = cfg.service == ServiceModel::deterministic;
        lambda_ = cfg.scenario.total_lambda();

        count_mode_ = cfg.stop.kind == StopRule::Kind::requests;
        if (count_mode_) {
            measure_requests_ = static_cast<std::uint64_t>(cfg.stop.value);
            if (cfg.warmup.kind == Warmup::Kind::fraction) {
                warmup_requests_ = static_cast<std::uint64_t>(std::llround(cfg.warmup.value * cfg.stop.value));
            } else {
                warm_time_ = cfg.warmup.value;
                warmup_by_time_ = true;
            }
        } else {
            stop_time_ = cfg.stop.value;
            warm_time_ = cfg.warmup.kind == Warmup::Kind::fraction ? cfg.warmup.value * cfg.stop.value
                                                                   : cfg.warmup.value;
            warmup_by_time_ = true;
        }

        gen_.assign(n_items, 0.0);
        ready_.assign(n_items, 0.0);
        last_install_.assign(n_items, -1.0);
        since_update_.assign(n_items, 0);
        seen_update_.assign(n_items, false);
        inter_update_.assign(n_items, Welford{});
        buckets_.assign(std::max<std::size_t>(cfg.bucket_edges.size(), 1), BucketSums{});
    }

    ReplicationStats run() {
        schedule_next_arrival();
        if (!count_mode_) events_.push(stop_time_, EventKind::stop_arrivals);
        if (kind_ == SchemeKind::rsuc && std::isfinite(mean_up_)) start_update();

        while (!aborted_) {
            if (arrivals_done_ && in_system_ == 0) break;
            if (events_.empty()) break;
            const Event e = events_.pop();
            now_ = e.time;
            switch (e.kind) {
                case EventKind::arrival:
                    on_arrival();
                    break;
                case EventKind::uplink_done:
                    on_uplink_done();
                    break;
                case EventKind::downlink_done:
                    on_downlink_done();
                    break;
                case EventKind::update_done:
                    on_update_done();
                    break;
                case EventKind::fetch_done:
                    on_fetch_done();
                    break;
                case EventKind::stop_arrivals:
                    if (window_open_) close_window(now_);
                    break;
            }
        }
        if (window_open_ && !window_closed_) close_window(count_mode_ ? now_ : std::min(now_, stop_time_));
        return collect();
    }

private:
    double service_time(RandomStream& rng, double mean) {
        return deterministic_ ? mean : draw_exponential(rng, mean);
    }

    double next_arrival_time() {
        const double e = draw_exponential(arrivals_, 1.0);
        if (!cfg_.arrival_profile) return now_ + e / lambda_;
        const auto& prof = *cfg_.arrival_profile;
        while (segment_ + 1 < prof.start.size() && prof.start[segment_ + 1] <= now_) ++segment_;
        double remaining = e;
        double t = now_;
        std::size_t k = segment_;
        for (;;) {
            const double r = prof.rate[k];
            const double end = k + 1 < prof.start.size() ? prof.start[k + 1] : kInf;
            if (r > 0.0) {
                const double mass = (end - t) * r;
                if (mass >= remaining) return t + remaining / r;
                remaining -= mass;
            }
            if (k + 1 >= prof.start.size()) return kInf;
            t = end;
            ++k;
        }
    }

    void schedule_next_arrival() {
        if (count_mode_ && !warmup_by_time_ && arrivals_generated_ >= warmup_requests_ + measure_requests_) {
            finish_arrivals();
            return;
        }
        if (count_mode_ && warmup_by_time_ && measured_arrivals_ >= measure_requests_) {
            finish_arrivals();
            return;
        }
        const double t = next_arrival_time();
        if (!std::isfinite(t) || (!count_mode_ && t >= stop_time_)) {
            finish_arrivals();
            return;
        }
        events_.push(t, EventKind::arrival);
    }

    void finish_arrivals() {
        arrivals_done_ = true;
        if (count_mode_ && window_open_) close_window(now_);
    }

    std::uint32_t bucket_of(double t) const {
        const auto& edges = cfg_.bucket_edges;
        if (edges.empty()) return 0;
        auto it = std::upper_bound(edges.begin(), edges.end(), t);
        if (it == edges.begin()) return 0;
        return static_cast<std::uint32_t>(it - edges.begin() - 1);
    }

    void touch(Station& st) {
        if (window_open_ && !window_closed_) st.area += static_cast<double>(st.queue.size()) * (now_ - st.last);
        st.last = now_;
    }

    void touch_system() {
        if (window_open_ && !window_closed_) sys_area_ += static_cast<double>(in_system_) * (now_ - sys_last_);
        sys_last_ = now_;
    }

    void open_window() {
        window_open_ = true;
        window_start_ = now_;
        up_.last = down_.last = sys_last_ = now_;
    }

    void close_window(double t) {
        if (window_closed_) return;
        for (Station* st : {&up_, &down_}) {
            st->area += static_cast<double>(st->queue.size()) * (t - st->last);
            st->last = t;
        }
        sys_area_ += static_cast<double>(in_system_) * (t - sys_last_);
        sys_last_ = t;
        window_closed_ = true;
        window_end_ = t;
    }

    void leave(Station& st, const Job& j) {
        if (!j.measured) return;
        st.sojourn_sum += now_ - j.stage_enter;
        ++st.sojourn_count;
    }

    bool push_job(Station& st, const Job& j) {
        touch(st);
        st.queue.push_back(j);
        max_queue_ = std::max<std::uint64_t>(max_queue_, st.queue.size());
        if (st.queue.size() > cfg_.divergence_bound) {
            std::ostringstream os;
            os << "overload: " << st.name << " queue length " << st.queue.size() << " exceeded bound "
               << cfg_.divergence_bound << " at t=" << now_;
            diagnostic_ = os.str();
            aborted_ = true;
        }
        return st.queue.size() == 1;
    }

    void on_arrival() {
        const std::uint64_t index = arrivals_generated_++;
        const bool measured = warmup_by_time_ ? now_ >= warm_time_ : index >= warmup_requests_;
        if (measured) {
            if (!window_open_) open_window();
            ++measured_arrivals_;
        }

        Job j;
        j.item = static_cast<std::uint32_t>(sampler_.draw(items_));
        j.bucket = bucket_of(now_);
        j.measured = measured;
        j.arrival = now_;
        j.stage_enter = now_;

        touch_system();
        ++in_system_;

        switch (kind_) {
            case SchemeKind::conventional:
                if (push_job(up_, j)) start_uplink();
                break;
            case SchemeKind::rsuc:
                if (push_job(down_, j)) start_downlink();
                break;
            case SchemeKind::rea:
                if (push_job(down_, j)) start_rea();
                break;
        }
        schedule_next_arrival();
    }

    // Conventional: the fetch starts when the request reaches the uplink
    // server, so that instant is the generation time of the delivered copy.
    void start_uplink() {
        Job& j = up_.queue.front();
        j.gen = now_;
        const double d = service_time(uplink_, mean_up_);
        j.service += d;
        events_.push(now_ + d, EventKind::uplink_done);
    }

    void on_uplink_done() {
        touch(up_);
        Job j = up_.queue.front();
        up_.queue.pop_front();
        leave(up_, j);
        j.stage_enter = now_;
        if (push_job(down_, j)) start_downlink();
        if (!up_.queue.empty()) start_uplink();
    }

    void start_downlink() {
        Job& j = down_.queue.front();
        j.delivery_start = now_;
        if (kind_ != SchemeKind::conventional) j.gen = gen_[j.item];  // cached copy at transmission start
        const double d = service_time(downlink_, mean_down_);
        j.service += d;
        j.transmission = d;
        events_.push(now_ + d, EventKind::downlink_done);
    }

    void on_downlink_done() {
        touch(down_);
        Job j = down_.queue.front();
        down_.queue.pop_front();
        leave(down_, j);
        complete(j);
        if (!down_.queue.empty()) {
            if (kind_ == SchemeKind::rea) {
                start_rea();
            } else {
                start_downlink();
            }
        }
    }

    // RSUC: back-to-back round-robin updates on the uplink share.
    void start_update() {
        update_start_ = now_;
        events_.push(now_ + service_time(uplink_, mean_up_), EventKind::update_done);
    }

    void on_update_done() {
        const std::size_t item = update_item_;
        gen_[item] = update_start_;
        ready_[item] = now_;
        if (last_install_[item] >= 0.0) update_intervals_.add(now_ - last_install_[item]);
        last_install_[item] = now_;
        update_item_ = (update_item_ + 1) % gen_.size();
        start_update();
    }

    // ReA: decide at service start whether to fetch a new version first.
    void start_rea() {
        Job& j = down_.queue.front();
        const std::uint32_t item = j.item;
        ++since_update_[item];
        const bool update = updates_.bernoulli(update_prob_[item]);
        if (update) {
            if (seen_update_[item]) inter_update_[item].add(static_cast<double>(since_update_[item]));
            seen_update_[item] = true;
            since_update_[item] = 0;
            j.gen = now_;
            const double d = service_time(uplink_, mean_up_);
            j.service += d;
            events_.push(now_ + d, EventKind::fetch_done);
        } else {
            j.gen = gen_[item];
            j.delivery_start = now_;
            const double d = service_time(downlink_, mean_down_);
            j.service += d;
            j.transmission = d;
            events_.push(now_ + d, EventKind::downlink_done);
        }
    }

    void on_fetch_done() {
        Job& j = down_.queue.front();
        gen_[j.item] = j.gen;
        ready_[j.item] = now_;
        j.delivery_start = now_;
        const double d = service_time(downlink_, mean_down_);
        j.service += d;
        j.transmission = d;
        events_.push(now_ + d, EventKind::downlink_done);
    }

    void complete(const Job& j) {
        touch_system();
        --in_system_;
        if (!j.measured) return;
        const double latency = now_ - j.arrival;
        const double aoi = now_ - j.gen;
        latency_sum_ += latency;
        aoi_sum_ += aoi;
        ++delivered_;
        auto& b = buckets_[j.bucket];
        b.latency_sum += latency;
        b.aoi_sum += aoi;
        ++b.count;
        if (sink_) {
            DeliveryRecord rec;
            rec.item = j.item;
            rec.arrival_time = j.arrival;
            rec.delivery_start = j.delivery_start;
            rec.delivery_complete = now_;
            rec.content_generation_time = j.gen;
            rec.service_time = j.service;
            rec.transmission_time = j.transmission;
            sink_(rec);
        }
    }

    StationStats station_stats(const char* name, double area, double sojourn_sum, std::uint64_t count) const {
        StationStats s;
        s.name = name;
        const double len = window_end_ - window_start_;
        if (len > 0.0) {
            s.mean_in_system = area / len;
            s.arrival_rate = static_cast<double>(count) / len;
        }
        if (count > 0) s.mean_sojourn = sojourn_sum / static_cast<double>(count);
        return s;
    }

    ReplicationStats collect() const {
        ReplicationStats r;
        r.delivered = delivered_;
        if (delivered_ > 0) {
            r.mean_latency = latency_sum_ / static_cast<double>(delivered_);
            r.mean_aoi = aoi_sum_ / static_cast<double>(delivered_);
        }
        r.overloaded = aborted_;
        r.diagnostic = diagnostic_;
        r.end_time = now_;
        r.max_queue_length = max_queue_;
        if (kind_ == SchemeKind::conventional) {
            r.stations.push_back(station_stats(up_.name, up_.area, up_.sojourn_sum, up_.sojourn_count));
        }
        r.stations.push_back(station_stats(down_.name, down_.area, down_.sojourn_sum, down_.sojourn_count));
        r.stations.push_back(station_stats("system", sys_area_, latency_sum_, delivered_));

        r.update_intervals = update_intervals_.n;
        r.update_interval_mean = update_intervals_.mean;
        r.update_interval_var = update_intervals_.variance();
        if (kind_ == SchemeKind::rea) {
            for (const auto& w : inter_update_) {
                r.inter_update_samples.push_back(w.n);
                r.inter_update_mean.push_back(w.mean);
            }
        }
        r.buckets = buckets_;
        return r;
    }

    const SimConfig& cfg_;
    SchemeKind kind_;
    const RecordSink& sink_;

    RandomStream arrivals_;
    RandomStream items_;
    RandomStream uplink_;
    RandomStream downlink_;
    RandomStream updates_;
    ItemSampler sampler_;
    EventQueue events_;

    double now_ = 0.0;
    double mean_up_ = 0.0;
    double mean_down_ = 0.0;
    double lambda_ = 0.0;
    bool deterministic_ = false;
    std::vector<double> update_prob_;

    bool count_mode_ = true;
    bool warmup_by_time_ = false;
    std::uint64_t warmup_requests_ = 0;
    std::uint64_t measure_requests_ = 0;
    double warm_time_ = 0.0;
    double stop_time_ = kInf;
    std::uint64_t arrivals_generated_ = 0;
    std::uint64_t measured_arrivals_ = 0;
    bool arrivals_done_ = false;
    std::size_t segment_ = 0;

    bool window_open_ = false;
    bool window_closed_ = false;
    double window_start_ = 0.0;
    double window_end_ = 0.0;

    Station up_;
    Station down_;
    std::uint64_t in_system_ = 0;
    double sys_area_ = 0.0;
    double sys_last_ = 0.0;

    std::vector<double> gen_;
    std::vector<double> ready_;

    std::size_t update_item_ = 0;
    double update_start_ = 0.0;
    std::vector<double> last_install_;
    Welford update_intervals_;

    std::vector<std::uint64_t> since_update_;
    std::vector<bool> seen_update_;
    std::vector<Welford> inter_update_;

    double latency_sum_ = 0.0;
    double aoi_sum_ = 0.0;
    std::uint64_t delivered_ = 0;
    std::vector<BucketSums> buckets_;

    bool aborted_ = false;
    std::string diagnostic_;
    std::uint64_t max_queue_ = 0;
};

struct MeanCi {
    double mean = 0.0;
    double half_width = 0.0;
};

MeanCi mean_ci(const std::vector<double>& xs) {
    MeanCi out;
    if (xs.empty()) return out;
    Welford w;
    for (double x : xs) w.add(x);
    out.mean = w.mean;
    if (xs.size() > 1) out.half_width = student_t95(xs.size() - 1) * std::sqrt(w.variance() / static_cast<double>(xs.size()));
    return out;
}

}  // namespace

double student_t95(std::size_t dof) {
    if (dof == 0) throw InvalidParameter("student t quantile needs dof >= 1");
    boost::math::students_t dist(static_cast<double>(dof));
    return boost::math::quantile(dist, 0.975);
}

ReplicationStats run_replication(const SimConfig& cfg, unsigned replication, const RecordSink& sink) {
    Replication rep(cfg, replication, sink);
    return rep.run();
}

SimResult aggregate(std::vector<ReplicationStats> reps, std::size_t bucket_count) {
    SimResult out;
    std::vector<double> lat;
    std::vector<double> aoi;
    for (const auto& r : reps) {
        if (r.overloaded && !out.overloaded) {
            out.overloaded = true;
            out.diagnostic = r.diagnostic;
        }
        out.perf.n_delivered += r.delivered;
        if (r.delivered == 0) continue;
        lat.push_back(r.mean_latency);
        aoi.push_back(r.mean_aoi);
    }
    const MeanCi l = mean_ci(lat);
    const MeanCi a = mean_ci(aoi);
    out.perf.mean_latency = l.mean;
    out.perf.latency_ci95 = l.half_width;
    out.perf.mean_aoi = a.mean;
    out.perf.aoi_ci95 = a.half_width;

    for (std::size_t b = 0; b < bucket_count; ++b) {
        std::vector<double> bl;
        std::vector<double> ba;
        PerfPoint p;
        for (const auto& r : reps) {
            if (b >= r.buckets.size() || r.buckets[b].count == 0) continue;
            const auto& s = r.buckets[b];
            bl.push_back(s.latency_sum / static_cast<double>(s.count));
            ba.push_back(s.aoi_sum / static_cast<double>(s.count));
            p.n_delivered += s.count;
        }
        const MeanCi ml = mean_ci(bl);
        const MeanCi ma = mean_ci(ba);
        p.mean_latency = ml.mean;
        p.latency_ci95 = ml.half_width;
        p.mean_aoi = ma.mean;
        p.aoi_ci95 = ma.half_width;
        out.buckets.push_back(p);
    }
    out.replications = std::move(reps);
    return out;
}

SimResult simulate_serial(const SimConfig& cfg, const RecordSink& sink) {
    validate(cfg);
    std::vector<ReplicationStats> reps;
    reps.reserve(cfg.replications);
    for (unsigned r = 0; r < cfg.replications; ++r) {
        reps.push_back(run_replication(cfg, r, r == 0 ? sink : RecordSink{}));
    }
    return aggregate(std::move(reps), cfg.bucket_edges.size());
}

SimResult simulate(const SimConfig& cfg, const RecordSink& sink) {
    validate(cfg);
    const int n = static_cast<int>(cfg.replications);
    std::vector<ReplicationStats> reps(cfg.replications);
    std::vector<std::exception_ptr> errors(cfg.replications);
    const RecordSink none;

#pragma omp parallel for schedule(dynamic, 1)
    for (int r = 0; r < n; ++r) {
        try {
            reps[r] = run_replication(cfg, static_cast<unsigned>(r), r == 0 ? sink : none);
        } catch (...) {
            errors[r] = std::current_exception();
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return aggregate(std::move(reps), cfg.bucket_edges.size());
}

RecordCsvWriter::RecordCsvWriter(std::ostream& out) : out_(&out) {
    *out_ << "item,arrival_time,delivery_start,delivery_complete,content_generation_time,latency,aoi\n";
    out_->precision(17);
}

void RecordCsvWriter::operator()(const DeliveryRecord& rec) {
    *out_ << rec.item << ',' << rec.arrival_time << ',' << rec.delivery_start << ',' << rec.delivery_complete << ','
          << rec.content_generation_time << ',' << rec.latency() << ',' << rec.aoi() << '\n';
}

}  // namespace aoicache::desim
