#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace mlsim {

/// Labelled, nonnegative compartment values (individuals or vehicles).
class CompartmentState {
public:
    CompartmentState() = default;
    CompartmentState(std::vector<std::string> labels, std::vector<double> values);

    static CompartmentState seir(double s, double e, double i, double r);
    static CompartmentState fleet(double petrol, double lpg, double electric);

    const std::vector<std::string>& labels() const noexcept { return labels_; }
    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const { return values_.at(i); }
    double total() const noexcept;

    bool has_labels(std::span<const std::string> expected) const noexcept;

    friend bool operator==(const CompartmentState&, const CompartmentState&) = default;

private:
    std::vector<std::string> labels_;
    std::vector<double> values_;
};

struct SeirParams {
    double beta = 0.0;  // 1/(individual*tick)
    double sigma = 0.0; // E -> I, 1/tick
    double gamma = 0.0; // I -> R, 1/tick
};

struct FleetParams {
    double beta = 0.0;  // petrol -> LPG
    double sigma = 0.0; // petrol -> electric
    double gamma = 0.0; // LPG -> electric
};

using DerivativeFn = std::function<void(std::span<const double> y, std::span<double> dydt)>;

struct CompartmentModel {
    std::vector<std::string> labels;
    DerivativeFn derivative;
};

const std::vector<std::string>& seir_labels();
const std::vector<std::string>& fleet_labels();

CompartmentModel seir_model(const SeirParams& params);
CompartmentModel fleet_model(const FleetParams& params);

/// (-bIS, bIS - sE, sE - gI, gI) on absolute counts. Throws WrongLabels.
std::vector<double> seir_derivative(const CompartmentState& state, const SeirParams& params);

/// (-(b+s)P, bP - gL, sP + gL). Throws WrongLabels.
std::vector<double> fleet_derivative(const CompartmentState& state, const FleetParams& params);

/// Values in (-kNegativeTolerance, 0) after a sub-step are noise and clamp to
/// zero; anything more negative is NegativeStateBlowup.
inline constexpr double kNegativeTolerance = 1e-9;

/// Timestamps visited by an integration, for checking the bracketing rule.
struct IntegrationTrace {
    std::vector<double> times;
};

/// Classical fixed-step RK4 from t0 to t1. The last sub-step is shortened so
/// the trajectory ends exactly on t1.
CompartmentState integrate(const CompartmentModel& model, const CompartmentState& state, double t0, double t1,
                           double dt, IntegrationTrace* trace = nullptr);

} // namespace mlsim
