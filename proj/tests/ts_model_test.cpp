#include "fwmav/ts_model.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <sstream>

using namespace fwmav;

namespace {

// Hand-built 2-in/2-out model with identity scaling.
TsModel tiny_model() {
    TsModel m;
    m.input_dim = 2;
    m.output_dim = 2;
    m.input_scaling = {{0.0, 1.0}, {0.0, 1.0}};
    TsRule r1;
    r1.antecedent = {{0.0, 1.0}, {0.0, 2.0}};
    r1.consequent = Matrix(2, 3);
    r1.consequent << 1.0, 0.5, -0.25, 0.0, 2.0, 1.0;
    TsRule r2;
    r2.antecedent = {{3.0, 0.5}, {-1.0, 1.5}};
    r2.consequent = Matrix(2, 3);
    r2.consequent << -2.0, 1.0, 0.0, 4.0, -1.0, 0.5;
    m.rules = {r1, r2};
    return m;
}

IoDataset affine_dataset(Rng& rng, Index n) {
    // outputs = B + A * inputs, exactly
    Matrix a(6, 4);
    Vector b(6);
    for (Index i = 0; i < 6; ++i) {
        b[i] = rng.uniform01() - 0.5;
        for (Index j = 0; j < 4; ++j)
            a(i, j) = 2.0 * (rng.uniform01() - 0.5);
    }
    IoDataset data;
    data.dt = 0.01;
    data.inputs.resize(n, 4);
    data.outputs.resize(n, 6);
    for (Index k = 0; k < n; ++k) {
        for (Index j = 0; j < 4; ++j)
            data.inputs(k, j) = 180.0 * (rng.uniform01() - 0.5);
        data.outputs.row(k) = (a * data.inputs.row(k).transpose() + b).transpose();
    }
    return data;
}

} // namespace

TEST_CASE("mf_degree basics") {
    const GaussianMf mf{2.0, 0.7};
    CHECK(mf_degree(2.0, mf) == 1.0);
    CHECK(mf_degree(2.7, mf) == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
    Rng rng(1);
    for (int i = 0; i < 20; ++i) {
        const double a = 5.0 * rng.uniform01();
        CHECK(mf_degree(mf.center + a, mf) ==
              doctest::Approx(mf_degree(mf.center - a, mf)).epsilon(1e-15));
    }
    CHECK_THROWS_AS(mf_degree(0.0, GaussianMf{0.0, 0.0}), ConfigError);
    CHECK_THROWS_AS(mf_degree(0.0, GaussianMf{0.0, -1.0}), ConfigError);
}

TEST_CASE("fire_rules hits 1 at a rule's centers and multiplies degrees") {
    const TsModel m = tiny_model();
    Vector at_r1(2);
    at_r1 << 0.0, 0.0;
    const Vector w = fire_rules(at_r1, m);
    CHECK(w[0] == 1.0);
    CHECK(w[1] < 1.0);

    // one factor at exp(-0.5), the other at 1
    Vector x(2);
    x << 1.0, 0.0;  // one width away on channel 0 of rule 1
    CHECK(fire_rules(x, m)[0] == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));

    Rng rng(7);
    for (int i = 0; i < 50; ++i) {
        Vector u(2);
        u << 6.0 * (rng.uniform01() - 0.5), 6.0 * (rng.uniform01() - 0.5);
        const Vector got = fire_rules(u, m);
        for (size_t r = 0; r < m.rules.size(); ++r) {
            const double expect = mf_degree(u[0], m.rules[r].antecedent[0]) *
                                  mf_degree(u[1], m.rules[r].antecedent[1]);
            CHECK(got[static_cast<Index>(r)] == doctest::Approx(expect).epsilon(1e-15));
        }
    }

    Vector bad(3);
    bad.setZero();
    CHECK_THROWS_AS(fire_rules(bad, m), ConfigError);
}

TEST_CASE("infer with a single rule returns its consequent exactly") {
    TsModel m = tiny_model();
    m.rules.resize(1);
    Vector x(2);
    x << 0.4, -1.3;
    Vector xb(3);
    xb << 1.0, x[0], x[1];
    const Vector expect = m.rules[0].consequent * xb;
    CHECK((infer(x, m) - expect).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("infer averages two equally fired rules") {
    TsModel m;
    m.input_dim = 1;
    m.output_dim = 1;
    m.input_scaling = {{0.0, 1.0}};
    TsRule a, b;
    a.antecedent = {{-1.0, 1.0}};
    a.consequent = Matrix::Zero(1, 2);  // z = 0
    b.antecedent = {{1.0, 1.0}};
    b.consequent = Matrix(1, 2);
    b.consequent << 4.0, 0.0;  // z = 4
    m.rules = {a, b};
    Vector x(1);
    x << 0.0;  // equidistant
    CHECK(infer(x, m)[0] == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("infer matches the brute-force oracle") {
    const TsModel m = tiny_model();
    Rng rng(21);
    for (int i = 0; i < 100; ++i) {
        Vector x(2);
        x << 8.0 * (rng.uniform01() - 0.5), 8.0 * (rng.uniform01() - 0.5);
        const Vector got = infer(x, m);
        const Vector expect = oracles::ts_output(m, x);
        CHECK((got - expect).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("output is a convex combination of rule consequents") {
    const TsModel m = tiny_model();
    Rng rng(3);
    for (int i = 0; i < 200; ++i) {
        Vector x(2);
        x << 20.0 * (rng.uniform01() - 0.5), 20.0 * (rng.uniform01() - 0.5);
        Vector xb(3);
        xb << 1.0, x[0], x[1];
        const Vector y = infer(x, m);
        for (int k = 0; k < 2; ++k) {
            double lo = std::numeric_limits<double>::infinity(), hi = -lo;
            for (const TsRule& r : m.rules) {
                const double z = r.consequent.row(k) * xb;
                lo = std::min(lo, z);
                hi = std::max(hi, z);
            }
            CHECK(y[k] >= lo - 1e-12);
            CHECK(y[k] <= hi + 1e-12);
        }
    }
}

TEST_CASE("weighted_average is invariant to scaling all strengths") {
    Rng rng(5);
    Vector w(4);
    Matrix z(4, 3);
    for (Index i = 0; i < 4; ++i) {
        w[i] = rng.uniform_pos();
        for (Index k = 0; k < 3; ++k)
            z(i, k) = 10.0 * (rng.uniform01() - 0.5);
    }
    const Vector base = weighted_average(w, z);
    for (double s : {1e-6, 0.5, 3.0, 1e6}) {
        const Vector scaled = weighted_average(s * w, z);
        CHECK((base - scaled).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("all-zero firing falls back to the consequent mean") {
    Vector w = Vector::Zero(3);
    Matrix z(3, 1);
    z << 1.0, 2.0, 6.0;
    CHECK(weighted_average(w, z)[0] == doctest::Approx(3.0).epsilon(1e-15));

    // far from every MF the product underflows to exactly zero
    const TsModel m = tiny_model();
    Vector far(2);
    far << 1e6, -1e6;
    const Vector y = infer(far, m);
    CHECK(y.allFinite());
}

TEST_CASE("infer is continuous under tiny input perturbations") {
    Rng rng(11);
    const IoDataset data = affine_dataset(rng, 300);
    FcmConfig fcm;
    fcm.seed = 2;
    const TsModel m = identify_ts_model(data, 3, fcm);
    for (int i = 0; i < 100; ++i) {
        Vector x(4);
        for (int ch = 0; ch < 4; ++ch)
            x[ch] = 200.0 * (rng.uniform01() - 0.5);
        Vector xp = x.array() + 1e-9;
        CHECK((infer(x, m) - infer(xp, m)).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("identification recovers an exact affine map with one cluster") {
    Rng rng(13);
    const IoDataset data = affine_dataset(rng, 400);
    FcmConfig fcm;
    fcm.seed = 4;
    const TsModel m = identify_ts_model(data, 1, fcm);
    const Vector rmse = evaluate_fit(m, data);
    for (int ch = 0; ch < 6; ++ch)
        CHECK(rmse[ch] < 1e-8);
}

TEST_CASE("identification is row-order invariant given a matched initialization") {
    Rng rng(17);
    const IoDataset data = affine_dataset(rng, 40);
    const Matrix u0 = init_partition(40, 2, 31);

    std::vector<Index> perm(40);
    for (Index i = 0; i < 40; ++i)
        perm[i] = (i * 7) % 40;  // 7 and 40 are coprime
    IoDataset shuffled;
    shuffled.dt = data.dt;
    shuffled.inputs.resize(40, 4);
    shuffled.outputs.resize(40, 6);
    Matrix u0p(2, 40);
    for (Index i = 0; i < 40; ++i) {
        shuffled.inputs.row(i) = data.inputs.row(perm[i]);
        shuffled.outputs.row(i) = data.outputs.row(perm[i]);
        u0p.col(i) = u0.col(perm[i]);
    }

    FcmConfig fcm;
    const TsModel a = identify_ts_model(data, 2, fcm, {}, nullptr, &u0);
    const TsModel b = identify_ts_model(shuffled, 2, fcm, {}, nullptr, &u0p);
    Rng probe(23);
    for (int i = 0; i < 50; ++i) {
        Vector x(4);
        for (int ch = 0; ch < 4; ++ch)
            x[ch] = 180.0 * (probe.uniform01() - 0.5);
        CHECK((infer(x, a) - infer(x, b)).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("rule growth refits with more clusters until under threshold") {
    Rng rng(29);
    const IoDataset data = affine_dataset(rng, 100);
    FcmConfig fcm;
    fcm.seed = 1;
    IdentifyOptions opts;
    opts.rule_add_threshold = 1e-12;  // unreachably strict
    opts.max_clusters = 4;
    IdentifyInfo info;
    const TsModel m = identify_ts_model(data, 2, fcm, opts, &info);
    CHECK(info.clusters_used == 4);
    CHECK(m.rules.size() == 4);
}

TEST_CASE("evaluate_fit matches hand-computed RMSE") {
    Rng rng(37);
    IoDataset data = affine_dataset(rng, 400);
    FcmConfig fcm;
    const TsModel m = identify_ts_model(data, 1, fcm);

    // perfect fit -> zero vector
    const Vector zero = evaluate_fit(m, data);
    for (int ch = 0; ch < 6; ++ch)
        CHECK(zero[ch] < 1e-8);

    // constant offset on one channel -> RMSE equals |offset| there
    IoDataset shifted = data;
    shifted.outputs.col(2).array() += 0.75;
    const Vector rmse = evaluate_fit(m, shifted);
    CHECK(rmse[2] == doctest::Approx(0.75).epsilon(1e-8));

    // spreadsheet-style check on a small random case
    IoDataset noisy = data;
    for (Index k = 0; k < noisy.outputs.rows(); ++k)
        for (Index ch = 0; ch < 6; ++ch)
            noisy.outputs(k, ch) += rng.uniform01() - 0.5;
    const Vector got = evaluate_fit(m, noisy);
    for (Index ch = 0; ch < 6; ++ch) {
        double acc = 0.0;
        for (Index k = 0; k < noisy.outputs.rows(); ++k) {
            const Vector pred = infer(noisy.inputs.row(k).transpose(), m);
            const double err = pred[ch] - noisy.outputs(k, ch);
            acc += err * err;
        }
        CHECK(got[ch] ==
              doctest::Approx(std::sqrt(acc / noisy.outputs.rows())).epsilon(1e-12));
    }

    IoDataset empty;
    empty.inputs.resize(0, 4);
    empty.outputs.resize(0, 6);
    CHECK_THROWS_AS(evaluate_fit(m, empty), ConfigError);
}

TEST_CASE("model serialization round-trips bit-exactly") {
    Rng rng(41);
    const IoDataset data = affine_dataset(rng, 120);
    FcmConfig fcm;
    fcm.seed = 77;
    const TsModel m = identify_ts_model(data, 3, fcm);

    std::ostringstream first;
    save_ts_model(m, first);
    std::istringstream in(first.str());
    const TsModel back = load_ts_model(in);

    REQUIRE(back.rules.size() == m.rules.size());
    REQUIRE(back.input_dim == m.input_dim);
    for (int ch = 0; ch < m.input_dim; ++ch) {
        CHECK(back.input_scaling[ch].offset == m.input_scaling[ch].offset);
        CHECK(back.input_scaling[ch].scale == m.input_scaling[ch].scale);
    }
    for (size_t r = 0; r < m.rules.size(); ++r) {
        for (int ch = 0; ch < m.input_dim; ++ch) {
            CHECK(back.rules[r].antecedent[ch].center == m.rules[r].antecedent[ch].center);
            CHECK(back.rules[r].antecedent[ch].width == m.rules[r].antecedent[ch].width);
        }
        CHECK((back.rules[r].consequent.array() == m.rules[r].consequent.array()).all());
    }

    std::ostringstream second;
    save_ts_model(back, second);
    CHECK(first.str() == second.str());
}

TEST_CASE("model loader rejects malformed documents") {
    std::istringstream bad_header("nonsense v9\n");
    CHECK_THROWS_AS(load_ts_model(bad_header), ConfigError);

    std::istringstream truncated("fwmav-ts-model v1\ninput_dim 2\n");
    CHECK_THROWS_AS(load_ts_model(truncated), ConfigError);

    std::istringstream zero_width(
        "fwmav-ts-model v1\ninput_dim 1\noutput_dim 1\nrule_count 1\n"
        "scaling 0 1\nrule 0\nmf 0 0\nout 0 0\nend\n");
    CHECK_THROWS_AS(load_ts_model(zero_width), ConfigError);
}
