#include "fwmav/plant.hpp"

#include <doctest.h>

using namespace fwmav;

TEST_CASE("flapping_angle pinned values") {
    CHECK(flapping_angle(0.0, 1.0, 10.0) == 0.5);
    CHECK(flapping_angle(1.0 / 20.0, 3.7, 10.0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(flapping_angle(0.1, 1.0, 10.0) == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK_THROWS_AS(flapping_angle(0.0, 1.0, 0.0), ConfigError);
}

TEST_CASE("angle_of_attack pinned values") {
    WingKinematicsParams p;
    p.mean_aoa = 0.6;
    p.pitch_amplitude = 0.2;
    p.pitch_omega = 3.0;
    p.phase = 0.0;
    CHECK(angle_of_attack(p, 0.0) == 0.6);
    p.phase = M_PI / 2.0;
    CHECK(angle_of_attack(p, 0.0) == doctest::Approx(0.4).epsilon(1e-15));
}

TEST_CASE("kinematics match direct formula evaluation on random draws") {
    Rng rng(1001);
    for (int i = 0; i < 1000; ++i) {
        const double t = 10.0 * rng.uniform01();
        const double amp = 2.0 * rng.uniform01();
        const double f = 0.1 + 20.0 * rng.uniform01();
        const double direct = (amp / 2.0) * std::cos(M_PI * f * t);
        CHECK(flapping_angle(t, amp, f) == doctest::Approx(direct).epsilon(1e-15));

        WingKinematicsParams p;
        p.mean_aoa = rng.uniform01();
        p.pitch_amplitude = rng.uniform01();
        p.pitch_omega = 10.0 * rng.uniform01();
        p.phase = 2.0 * M_PI * rng.uniform01();
        const double st = rng.uniform01();
        const double aoa = p.mean_aoa - p.pitch_amplitude * std::sin(p.pitch_omega * st + p.phase);
        CHECK(angle_of_attack(p, st) == doctest::Approx(aoa).epsilon(1e-15));
    }
}

TEST_CASE("actuator commands clamp to the physical range") {
    const ActuatorCommand cmd(120.0, -95.0, 45.0, 90.0);
    CHECK(cmd.amplitudes[0] == 90.0);
    CHECK(cmd.amplitudes[1] == -90.0);
    CHECK(cmd.amplitudes[2] == 45.0);
    CHECK(cmd.amplitudes[3] == 90.0);
}

TEST_CASE("hover trim is an exact fixed point") {
    SurrogateParams params;
    PlantState state;
    const ActuatorCommand trim = ActuatorCommand::collective(params.hover_trim);
    for (int k = 0; k < 100; ++k) {
        state = plant_step(state, trim, params, 0.01);
        CHECK(state.v.cwiseAbs().maxCoeff() == 0.0);
        CHECK(state.omega.cwiseAbs().maxCoeff() == 0.0);
        CHECK(state.z == 0.0);
    }
    CHECK(state.t == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("amplitude asymmetries move the tabulated directions from rest") {
    SurrogateParams params;
    const double dt = 0.01;

    // take-off: all four at 90
    PlantState s = plant_step(PlantState{}, ActuatorCommand::collective(90.0), params, dt);
    CHECK(s.v[2] > 0.0);

    // roll right: wings 1,2 at 90 and 3,4 at 60
    s = plant_step(PlantState{}, ActuatorCommand(90, 90, 60, 60), params, dt);
    CHECK(s.omega[0] > 0.0);

    // roll left: wings 1,2 at 60 and 3,4 at 90
    s = plant_step(PlantState{}, ActuatorCommand(60, 60, 90, 90), params, dt);
    CHECK(s.omega[0] < 0.0);

    // pitch up: wings 1,3 at 90 and 2,4 at 60
    s = plant_step(PlantState{}, ActuatorCommand(90, 60, 90, 60), params, dt);
    CHECK(s.omega[1] > 0.0);

    // pitch down: wings 1,3 at 60 and 2,4 at 90
    s = plant_step(PlantState{}, ActuatorCommand(60, 90, 60, 90), params, dt);
    CHECK(s.omega[1] < 0.0);
}

TEST_CASE("a constant collective converges to gain/damping within 1% after 5 time constants") {
    SurrogateParams params;
    const double collective = 10.0;  // degrees above trim
    const ActuatorCommand cmd = ActuatorCommand::collective(params.hover_trim + collective);
    const double dt = 0.001;  // resolve the time constant so the ODE solution applies
    const double target = params.thrust_gain * collective / params.damping[2];
    PlantState state;
    const double horizon = 5.0 / params.damping[2];
    const int steps = static_cast<int>(std::ceil(horizon / dt));
    for (int k = 0; k < steps; ++k)
        state = plant_step(state, cmd, params, dt);
    CHECK(std::abs(state.v[2] - target) < 0.01 * std::abs(target));
}

TEST_CASE("velocities stay bounded under bounded commands") {
    SurrogateParams params;
    PlantState state;
    Rng rng(5);
    const double dt = 0.01;
    const double vz_bound = params.thrust_gain * 135.0 / params.damping[2] + 1e-9;
    for (int k = 0; k < 5000; ++k) {
        const ActuatorCommand cmd(180.0 * (rng.uniform01() - 0.5) * 2.0,
                                  180.0 * (rng.uniform01() - 0.5) * 2.0,
                                  180.0 * (rng.uniform01() - 0.5) * 2.0,
                                  180.0 * (rng.uniform01() - 0.5) * 2.0);
        state = plant_step(state, cmd, params, dt);
        REQUIRE(std::abs(state.v[2]) <= vz_bound);
        REQUIRE(state.v.allFinite());
        REQUIRE(state.omega.allFinite());
    }
}

TEST_CASE("the surrogate responds linearly to the collective") {
    SurrogateParams params;
    const double dt = 0.01;
    PlantState a, b;
    for (int k = 0; k < 200; ++k) {
        a = plant_step(a, ActuatorCommand::collective(params.hover_trim + 5.0), params, dt);
        b = plant_step(b, ActuatorCommand::collective(params.hover_trim + 10.0), params, dt);
        REQUIRE(std::abs(2.0 * a.v[2] - b.v[2]) < 1e-9);
        REQUIRE(std::abs(2.0 * a.z - b.z) < 1e-9);
    }
}

TEST_CASE("plant_step rejects a non-finite state") {
    SurrogateParams params;
    PlantState broken;
    broken.v[2] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(plant_step(broken, ActuatorCommand::collective(45.0), params, 0.01),
                    NumericError);
}

TEST_CASE("training data has the pinned row count and amplitude range") {
    SurrogateParams params;
    const IoDataset data = generate_training_data(params, 100.0, 0.01, 1);
    CHECK(data.inputs.rows() == 10001);
    CHECK(data.outputs.rows() == 10001);
    CHECK(data.inputs.minCoeff() >= -90.0);
    CHECK(data.inputs.maxCoeff() <= 90.0);
    // the sinusoids should actually sweep most of the range
    CHECK(data.inputs.minCoeff() < -85.0);
    CHECK(data.inputs.maxCoeff() > 85.0);

    const IoDataset tiny = generate_training_data(params, 1.0, 0.5, 1);
    CHECK(tiny.inputs.rows() == 3);
}

TEST_CASE("training data generation is deterministic per seed") {
    SurrogateParams params;
    params.noise_std.setConstant(0.05);
    const IoDataset a = generate_training_data(params, 2.0, 0.01, 9);
    const IoDataset b = generate_training_data(params, 2.0, 0.01, 9);
    CHECK((a.inputs.array() == b.inputs.array()).all());
    CHECK((a.outputs.array() == b.outputs.array()).all());

    const IoDataset c = generate_training_data(params, 2.0, 0.01, 10);
    CHECK((a.inputs.array() == c.inputs.array()).all());   // excitation is seed-free
    CHECK(!(a.outputs.array() == c.outputs.array()).all());  // noise is not
}

TEST_CASE("model plant integrates predicted climb rate") {
    // single always-on rule predicting vbz = collective mean - trim
    TsModel m;
    m.input_dim = 4;
    m.output_dim = 6;
    m.input_scaling = std::vector<ChannelScaling>(4, ChannelScaling{0.0, 1.0});
    TsRule r;
    r.antecedent = std::vector<GaussianMf>(4, GaussianMf{0.0, 1e6});
    r.consequent = Matrix::Zero(6, 5);
    r.consequent.row(2) << -45.0, 0.25, 0.25, 0.25, 0.25;
    m.rules = {r};

    TsModelPlant plant(m, 45.0);
    plant.reset(0);
    const double vbz = plant.step(10.0, 0.01);  // all wings at 55 -> vbz = 10
    CHECK(vbz == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(plant.altitude() == doctest::Approx(0.1).epsilon(1e-12));
}
