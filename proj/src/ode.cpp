#include "mlsim/ode.hpp"

#include "mlsim/error.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace mlsim {

CompartmentState::CompartmentState(std::vector<std::string> labels, std::vector<double> values)
    : labels_(std::move(labels))
    , values_(std::move(values))
{
    if (labels_.size() != values_.size()) {
        throw Error(Errc::WrongLabels, "ode", "label count does not match value count");
    }
}

CompartmentState CompartmentState::seir(double s, double e, double i, double r)
{
    return {seir_labels(), {s, e, i, r}};
}

CompartmentState CompartmentState::fleet(double petrol, double lpg, double electric)
{
    return {fleet_labels(), {petrol, lpg, electric}};
}

double CompartmentState::total() const noexcept
{
    return std::accumulate(values_.begin(), values_.end(), 0.0);
}

bool CompartmentState::has_labels(std::span<const std::string> expected) const noexcept
{
    return std::equal(labels_.begin(), labels_.end(), expected.begin(), expected.end());
}

const std::vector<std::string>& seir_labels()
{
    static const std::vector<std::string> labels{"S", "E", "I", "R"};
    return labels;
}

const std::vector<std::string>& fleet_labels()
{
    static const std::vector<std::string> labels{"P", "L", "E"};
    return labels;
}

CompartmentModel seir_model(const SeirParams& p)
{
    return {seir_labels(), [p](std::span<const double> y, std::span<double> d) {
                const double infection = p.beta * y[2] * y[0];
                const double onset = p.sigma * y[1];
                const double recovery = p.gamma * y[2];
                d[0] = -infection;
                d[1] = infection - onset;
                d[2] = onset - recovery;
                d[3] = recovery;
            }};
}

CompartmentModel fleet_model(const FleetParams& p)
{
    return {fleet_labels(), [p](std::span<const double> y, std::span<double> d) {
                const double to_lpg = p.beta * y[0];
                const double petrol_to_electric = p.sigma * y[0];
                const double lpg_to_electric = p.gamma * y[1];
                d[0] = -(to_lpg + petrol_to_electric);
                d[1] = to_lpg - lpg_to_electric;
                d[2] = petrol_to_electric + lpg_to_electric;
            }};
}

namespace {

std::vector<double> evaluate(const CompartmentModel& model, const CompartmentState& state)
{
    if (!state.has_labels(model.labels)) {
        throw Error(Errc::WrongLabels, "ode", "state labels do not match the model");
    }
    std::vector<double> d(state.size());
    model.derivative(state.values(), d);
    return d;
}

void check_and_clamp(std::span<double> y, double t)
{
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!std::isfinite(y[i])) {
            std::ostringstream msg;
            msg << "component " << i << " became non-finite at t=" << t;
            throw Error(Errc::NonFiniteState, "ode", msg.str());
        }
        if (y[i] < 0.0) {
            if (y[i] < -kNegativeTolerance) {
                std::ostringstream msg;
                msg << "component " << i << " reached " << y[i] << " at t=" << t;
                throw Error(Errc::NegativeStateBlowup, "ode", msg.str());
            }
            y[i] = 0.0;
        }
    }
}

} // namespace

std::vector<double> seir_derivative(const CompartmentState& state, const SeirParams& params)
{
    return evaluate(seir_model(params), state);
}

std::vector<double> fleet_derivative(const CompartmentState& state, const FleetParams& params)
{
    return evaluate(fleet_model(params), state);
}

CompartmentState integrate(const CompartmentModel& model, const CompartmentState& state, double t0, double t1,
                           double dt, IntegrationTrace* trace)
{
    if (!(t1 > t0) || !(dt > 0.0) || !std::isfinite(t1) || !std::isfinite(dt)) {
        throw Error(Errc::InvalidArgument, "ode", "integrate requires t1 > t0 and dt > 0");
    }
    if (!state.has_labels(model.labels)) {
        throw Error(Errc::WrongLabels, "ode", "state labels do not match the model");
    }

    const std::size_t n = state.size();
    std::vector<double> y(state.values().begin(), state.values().end());
    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);

    // Full sub-steps land on t0 + k*dt; a final shortened step lands on t1.
    const double span = t1 - t0;
    auto full_steps = static_cast<long long>(std::floor(span / dt));
    const double snap = 1e-12 * std::max(1.0, std::abs(t1));
    if (full_steps > 0 && t0 + static_cast<double>(full_steps) * dt > t1) {
        --full_steps;
    }
    long long total_steps = full_steps;
    if (t1 - (t0 + static_cast<double>(full_steps) * dt) > snap) {
        ++total_steps;
    }
    if (total_steps == 0) {
        total_steps = 1;
    }

    if (trace) {
        trace->times.push_back(t0);
    }
    double t = t0;
    for (long long step = 1; step <= total_steps; ++step) {
        const double t_next = step == total_steps ? t1 : t0 + static_cast<double>(step) * dt;
        const double h = t_next - t;

        model.derivative(y, k1);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
        model.derivative(tmp, k2);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
        model.derivative(tmp, k3);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
        model.derivative(tmp, k4);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        check_and_clamp(y, t_next);

        t = t_next;
        if (trace) {
            trace->times.push_back(t);
        }
    }
    return {state.labels(), std::move(y)};
}

} // namespace mlsim
