#pragma once

#include <cmath>
#include <deque>
#include <string>
#include <vector>

#include "circumnav/config.hpp"
#include "circumnav/controller.hpp"
#include "circumnav/errors.hpp"
#include "circumnav/estimator.hpp"
#include "circumnav/formation.hpp"
#include "circumnav/geometry.hpp"
#include "circumnav/integrate.hpp"
#include "circumnav/random.hpp"
#include "circumnav/target.hpp"

namespace circumnav {

// One logged step. Per-agent vectors are indexed by ring position (index 0 is
// the sensing agent in position 1).
struct StepRow {
    double t = 0.0;
    Vec2 c;
    double r = 0.0;
    Vec2 c_hat;
    double r_hat = 0.0;
    double r_hat_dot = 0.0;
    Vec2 c_hat_dot;
    std::vector<Vec2> p;
    std::vector<double> beta;
    std::vector<double> dc;  // true distance to centre
    std::vector<double> db;  // true distance to boundary
    std::vector<Vec2> u_raw;
    std::vector<Vec2> u_applied;
};

struct RunEvent {
    double t = 0.0;
    std::string code;
    std::string message;
};

struct RunRecord {
    SimConfig config;
    RingOrder order;
    std::vector<StepRow> steps;  // uniform grid including t = 0
    std::vector<RunEvent> events;
    std::size_t centre_clips = 0;
    std::size_t radius_clips = 0;
    std::size_t radius_floors = 0;
    std::size_t r_hat_clips = 0;
    bool invariants_ok = true;

    double dt() const { return config.dt; }

    // Flattened final state, for convergence-order studies.
    std::vector<double> final_state() const {
        std::vector<double> v;
        const StepRow& s = steps.back();
        for (const Vec2& q : s.p) { v.push_back(q.x); v.push_back(q.y); }
        v.push_back(s.c_hat.x); v.push_back(s.c_hat.y); v.push_back(s.r_hat);
        return v;
    }
};

namespace simdetail {

// State layout: [p_i (2 per agent, by agent id) | z1 z2 z3 z4 z5x z5y | rhat | chatx chaty]
struct Layout {
    std::size_t n;
    std::size_t zoff() const { return 2 * n; }
    std::size_t rhat() const { return 2 * n + 6; }
    std::size_t chat() const { return 2 * n + 7; }
    std::size_t size() const { return 2 * n + 9; }
};

struct Broadcast {
    Vec2 c_hat;
    double r_hat = 0.0;
    Vec2 c_hat_dot;
    double r_hat_dot = 0.0;
};

// Everything the control/estimation pipeline produces at one state evaluation.
struct LoopEval {
    FilterOutputs fo{};
    double r_hat_dot = 0.0;
    Vec2 c_hat_dot;
    Broadcast effective;  // what the agents actually used
    std::vector<double> beta;       // by ring position
    std::vector<Vec2> psi;          // by ring position
    std::vector<Vec2> u_raw;        // by ring position
    std::vector<Vec2> u_applied;    // by ring position
};

}  // namespace simdetail

class Simulation {
public:
    explicit Simulation(SimConfig cfg)
        : cfg_(std::move(cfg)),
          target_rng_(cfg_.seed, "target"),
          satellite_rng_(cfg_.seed, "satellite"),
          measurement_rng_(cfg_.seed, "measurement") {}

    RunRecord run() {
        init();
        const std::size_t steps = static_cast<std::size_t>(std::llround(cfg_.horizon / cfg_.dt));
        record_.steps.reserve(steps + 1);
        log_row(0.0);
        check_invariants(0.0);

        Rk4Scratch scratch;
        for (std::size_t k = 0; k < steps; ++k) {
            const double t = k * cfg_.dt;
            advance_one_step(t, scratch);
            log_row((k + 1) * cfg_.dt);
            check_invariants((k + 1) * cfg_.dt);
        }
        return std::move(record_);
    }

private:
    SimConfig cfg_;
    SeededRng target_rng_;
    SeededRng satellite_rng_;
    SeededRng measurement_rng_;

    simdetail::Layout lay_{};
    std::vector<double> y_;  // flattened ODE state
    TargetState target_;
    RingOrder order_;
    std::vector<std::size_t> position_of_;  // agent id -> ring position
    std::deque<simdetail::Broadcast> stale_queue_;
    RunRecord record_;

    void init() {
        lay_.n = cfg_.n_agents;
        target_.c = cfg_.c0;
        target_.r = cfg_.r0;

        SatelliteEstimate sat;
        if (cfg_.satellite.mode == "paper") sat = satellite_observe_paper(target_);
        else if (cfg_.satellite.mode == "gaussian") {
            sat = satellite_observe(target_, cfg_.satellite.noise_c, cfg_.satellite.noise_r,
                                    satellite_rng_, cfg_.r_floor);
        } else {
            sat = {target_.c, target_.r};
        }
        if (cfg_.satellite.c_hat0) sat.c_hat0 = *cfg_.satellite.c_hat0;
        if (cfg_.satellite.r_hat0) sat.r_hat0 = *cfg_.satellite.r_hat0;

        // Theorem hypothesis: D_hat_i(0) > r_hat(0) > 0.
        if (!(sat.r_hat0 > 0.0)) throw ValidationError("initial radius estimate must be > 0");
        for (std::size_t i = 0; i < cfg_.n_agents; ++i) {
            const double d = (cfg_.agent_positions[i] - sat.c_hat0).norm();
            if (!(d > sat.r_hat0)) {
                throw ValidationError("agent " + std::to_string(i + 1) +
                                      " starts inside the estimated circle");
            }
        }

        order_ = order_agents(cfg_.agent_positions, sat.c_hat0, 0);
        position_of_.assign(lay_.n, 0);
        for (std::size_t k = 0; k < lay_.n; ++k) position_of_[order_.agent_at(k)] = k;

        y_.assign(lay_.size(), 0.0);
        for (std::size_t i = 0; i < lay_.n; ++i) {
            y_[2 * i] = cfg_.agent_positions[i].x;
            y_[2 * i + 1] = cfg_.agent_positions[i].y;
        }
        y_[lay_.rhat()] = sat.r_hat0;
        y_[lay_.chat()] = sat.c_hat0.x;
        y_[lay_.chat() + 1] = sat.c_hat0.y;

        stale_queue_.clear();
        record_ = RunRecord{};
        record_.config = cfg_;
        record_.order = order_;
    }

    Vec2 agent_pos(std::span<const double> y, std::size_t id) const {
        return {y[2 * id], y[2 * id + 1]};
    }

    // Full pipeline evaluation at one (stage) state: measurements, estimator
    // rates, bearings, betas, control laws.
    simdetail::LoopEval evaluate(std::span<const double> y, Vec2 c_stage, double r_stage,
                                 Vec2 c_dot, double r_dot,
                                 double noise_dc, double noise_db,
                                 const simdetail::Broadcast* stale) const {
        simdetail::LoopEval ev;
        const std::size_t n = lay_.n;
        const Vec2 p1 = agent_pos(y, order_.sensing);

        EstimatorState est;
        est.filters.alpha = cfg_.alpha;
        est.filters.z1 = y[lay_.zoff() + 0];
        est.filters.z2 = y[lay_.zoff() + 1];
        est.filters.z3 = y[lay_.zoff() + 2];
        est.filters.z4 = y[lay_.zoff() + 3];
        est.filters.z5 = {y[lay_.zoff() + 4], y[lay_.zoff() + 5]};
        est.r_hat = y[lay_.rhat()];
        est.c_hat = {y[lay_.chat()], y[lay_.chat() + 1]};
        est.gamma = cfg_.gamma;

        if (cfg_.estimator_mode == EstimatorMode::adaptive) {
            Measurement m;
            const Distances d = distances(c_stage, r_stage, p1);
            m.dc = d.to_centre + noise_dc;
            m.db = d.to_boundary + noise_db;
            m.p1 = p1;
            ev.fo = filter_rhs(est.filters, m);
            ev.r_hat_dot = radius_estimator_rhs(ev.fo.v, ev.fo.eta, ev.fo.m, est.r_hat, est.gamma);
            ev.c_hat_dot = center_estimator_rhs(ev.fo.v2, ev.fo.m, ev.fo.m2, est.c_hat, est.gamma);
            if (stale) {
                ev.effective = *stale;
            } else {
                ev.effective = {est.c_hat, est.r_hat, ev.c_hat_dot, ev.r_hat_dot};
            }
        } else {
            // oracle: perfect estimates injected, filters quiescent
            ev.fo = FilterOutputs{};
            ev.r_hat_dot = 0.0;
            ev.c_hat_dot = {0.0, 0.0};
            ev.effective = {c_stage, r_stage, c_dot, 0.0};
        }

        ev.beta.resize(n);
        ev.psi.resize(n);
        ev.u_raw.resize(n);
        ev.u_applied.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            const Vec2 pk = agent_pos(y, order_.agent_at(k));
            const Vec2 pnext = agent_pos(y, order_.agent_at((k + 1) % n));
            ev.beta[k] = ccw_angle(pk - ev.effective.c_hat, pnext - ev.effective.c_hat).radians();
            ev.psi[k] = bearing(ev.effective.c_hat, pk);
        }
        for (std::size_t k = 0; k < n; ++k) {
            const Vec2 pk = agent_pos(y, order_.agent_at(k));
            const double dc_hat = (ev.effective.c_hat - pk).norm();
            ev.u_raw[k] = control_law(ev.effective.c_hat_dot, ev.effective.r_hat_dot,
                                      dc_hat, ev.effective.r_hat, ev.beta[k], ev.psi[k]);
            ev.u_applied[k] = apply_actuation(ev.u_raw[k], cfg_.controller);
        }
        return ev;
    }

    void advance_one_step(double t, Rk4Scratch& scratch) {
        TargetStepEvents tev;
        const TargetState next_target =
            step_target(target_, cfg_.script, t, cfg_.dt, target_rng_, &tev);
        if (tev.centre_clipped) ++record_.centre_clips;
        if (tev.radius_clipped) ++record_.radius_clips;
        if (tev.radius_floored) {
            ++record_.radius_floors;
            if (record_.radius_floors == 1) {
                record_.events.push_back({t, "radius_floored", "target radius floored at r_min"});
            }
        }
        const Vec2 c_dot = next_target.c_dot;
        const double r_dot = next_target.r_dot;

        double noise_dc = 0.0, noise_db = 0.0;
        if (cfg_.measurement_noise.enabled) {
            noise_dc = measurement_rng_.normal(0.0, cfg_.measurement_noise.sigma_dc);
            noise_db = measurement_rng_.normal(0.0, cfg_.measurement_noise.sigma_db);
        }

        const simdetail::Broadcast* stale = nullptr;
        simdetail::Broadcast stale_copy;
        if (cfg_.broadcast_staleness_steps > 0) {
            if (stale_queue_.empty()) {
                const auto ev0 = evaluate(y_, target_.c, target_.r, {0.0, 0.0}, 0.0, 0.0, 0.0, nullptr);
                stale_queue_.push_back(ev0.effective);
            }
            stale_copy = stale_queue_.front();
            stale = &stale_copy;
        }

        const Vec2 c_base = target_.c;
        const double r_base = target_.r;
        auto rhs = [&](double tau, std::span<const double> y, std::span<double> dy) {
            const Vec2 c_stage = c_base + c_dot * tau;
            const double r_stage = r_base + r_dot * tau;
            const auto ev = evaluate(y, c_stage, r_stage, c_dot, r_dot, noise_dc, noise_db, stale);
            for (std::size_t k = 0; k < lay_.n; ++k) {
                const std::size_t id = order_.agent_at(k);
                dy[2 * id] = ev.u_applied[k].x;
                dy[2 * id + 1] = ev.u_applied[k].y;
            }
            dy[lay_.zoff() + 0] = ev.fo.dz1;
            dy[lay_.zoff() + 1] = ev.fo.dz2;
            dy[lay_.zoff() + 2] = ev.fo.dz3;
            dy[lay_.zoff() + 3] = ev.fo.dz4;
            dy[lay_.zoff() + 4] = ev.fo.dz5.x;
            dy[lay_.zoff() + 5] = ev.fo.dz5.y;
            dy[lay_.rhat()] = ev.r_hat_dot;
            dy[lay_.chat()] = ev.c_hat_dot.x;
            dy[lay_.chat() + 1] = ev.c_hat_dot.y;
        };
        rk4_step(y_, 0.0, cfg_.dt, rhs, scratch);

        // target advances by zero-order-hold Euler (exact for the held velocity)
        target_ = next_target;

        if (y_[lay_.rhat()] < cfg_.r_floor) {
            y_[lay_.rhat()] = cfg_.r_floor;
            ++record_.r_hat_clips;
            record_.events.push_back({t + cfg_.dt, "r_hat_clipped",
                                      "radius estimate clipped at r_floor"});
        }

        if (cfg_.broadcast_staleness_steps > 0) {
            const auto ev = evaluate(y_, target_.c, target_.r, c_dot, r_dot,
                                     noise_dc, noise_db, nullptr);
            stale_queue_.push_back(ev.effective);
            while (stale_queue_.size() > cfg_.broadcast_staleness_steps) stale_queue_.pop_front();
        }
    }

    void log_row(double t) {
        const auto ev = evaluate(y_, target_.c, target_.r, target_.c_dot, target_.r_dot,
                                 0.0, 0.0, nullptr);
        StepRow row;
        row.t = t;
        row.c = target_.c;
        row.r = target_.r;
        row.c_hat = {y_[lay_.chat()], y_[lay_.chat() + 1]};
        row.r_hat = y_[lay_.rhat()];
        row.r_hat_dot = ev.r_hat_dot;
        row.c_hat_dot = ev.c_hat_dot;
        const std::size_t n = lay_.n;
        row.p.resize(n);
        row.dc.resize(n);
        row.db.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            row.p[k] = agent_pos(y_, order_.agent_at(k));
            const Distances d = distances(target_.c, target_.r, row.p[k]);
            row.dc[k] = d.to_centre;
            row.db[k] = d.to_boundary;
        }
        row.beta = ev.beta;
        row.u_raw = ev.u_raw;
        row.u_applied = ev.u_applied;
        record_.steps.push_back(std::move(row));
    }

    void fail_invariant(double t, const std::string& code, const std::string& msg) {
        record_.invariants_ok = false;
        record_.events.push_back({t, code, msg});
        if (cfg_.strict) {
            throw InvariantViolation("t=" + std::to_string(t) + " " + code + ": " + msg);
        }
    }

    void check_invariants(double t) {
        const StepRow& row = record_.steps.back();
        const std::size_t n = lay_.n;

        double sum = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            sum += row.beta[k];
            if (row.beta[k] < -1e-9) {
                fail_invariant(t, "beta_negative",
                               "beta[" + std::to_string(k + 1) + "] = " + std::to_string(row.beta[k]));
            }
        }
        if (std::abs(sum - two_pi) > 1e-6) {
            fail_invariant(t, "beta_sum",
                           "sum(beta) = " + std::to_string(sum) + " (winding broken)");
        }
        if (!(row.r_hat > 0.0)) {
            fail_invariant(t, "r_hat_nonpositive", "r_hat = " + std::to_string(row.r_hat));
        }

        // bearings stay unit-norm
        const Vec2 c_eff = (cfg_.estimator_mode == EstimatorMode::adaptive) ? row.c_hat : row.c;
        for (std::size_t k = 0; k < n; ++k) {
            const double norm = bearing(c_eff, row.p[k]).norm();
            if (std::abs(norm - 1.0) > 1e-12) {
                fail_invariant(t, "bearing_norm", "||psi|| = " + std::to_string(norm));
            }
        }

        // ring order fixed at t=0 must still describe the configuration
        const std::vector<Vec2> positions_by_id = [&] {
            std::vector<Vec2> v(n);
            for (std::size_t k = 0; k < n; ++k) v[order_.agent_at(k)] = row.p[k];
            return v;
        }();
        const RingOrder now = order_agents(positions_by_id, c_eff, order_.sensing);
        if (now.perm != order_.perm) {
            fail_invariant(t, "order_changed", "ring order no longer matches t=0 assignment");
        }
    }
};

inline RunRecord run(const SimConfig& cfg) { return Simulation(cfg).run(); }

}  // namespace circumnav
