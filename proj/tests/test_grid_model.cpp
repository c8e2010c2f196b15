#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ptsvm/admittance.hpp"
#include "ptsvm/cdf.hpp"
#include "ptsvm/powerflow.hpp"
#include "ptsvm/rng.hpp"
#include "support/fixtures.hpp"

#include <algorithm>
#include <complex>

using namespace ptsvm;
using namespace ptsvm::testing;

TEST_CASE("ieee14 fixture parses to the expected shape") {
    const Network net = load_ieee14();
    CHECK(net.buses.size() == 14);
    CHECK(net.branches.size() == 20);
    CHECK(net.generators.size() == 5);
    CHECK(net.fault_eligible_lines().size() == 16);
    CHECK(net.system_MVA_base == doctest::Approx(100.0));
    CHECK(net.slack_index() == 0);
    CHECK(net.buses[1].load_P == doctest::Approx(0.217));
    CHECK(net.buses[8].shunt_B == doctest::Approx(0.19));
    CHECK(net.bus_by_id(6).kind == BusKind::PV);
    const Generator* g2 = net.generator_at_bus(2);
    REQUIRE(g2 != nullptr);
    CHECK(g2->P_gen == doctest::Approx(0.40));
    CHECK(g2->Q_max == doctest::Approx(0.50));
    CHECK(g2->Q_min == doctest::Approx(-0.40));
    // transformers 4-7, 4-9, 5-6 and the condenser winding 7-8 are not
    // fault-eligible
    for (int idx : net.fault_eligible_lines()) {
        const Branch& br = net.branches[static_cast<std::size_t>(idx)];
        const bool is_tx = (br.from == 4 && (br.to == 7 || br.to == 9)) ||
                           (br.from == 5 && br.to == 6) || (br.from == 7 && br.to == 8);
        CHECK(!is_tx);
    }
}

TEST_CASE("parse errors carry line and column information") {
    SUBCASE("empty bus section reports missing slack") {
        const std::string text =
            " 01/01/00 TEST                  100.0    0 W EMPTY\n"
            "BUS DATA FOLLOWS 0 ITEMS\n-999\n"
            "BRANCH DATA FOLLOWS 0 ITEMS\n-999\nEND OF DATA\n";
        CHECK_THROWS_WITH_AS(parse_cdf(text), doctest::Contains("missing slack bus"),
                             std::runtime_error);
    }
    SUBCASE("duplicate bus id") {
        std::string text = read_file(data_path("threebus.cdf"));
        const auto pos = text.find("\n   2 ");
        REQUIRE(pos != std::string::npos);
        text.replace(pos + 1, 4, "   1");
        CHECK_THROWS_WITH_AS(parse_cdf(text), doctest::Contains("duplicate bus id"),
                             std::runtime_error);
    }
    SUBCASE("malformed numeric field reports position") {
        std::string text = read_file(data_path("threebus.cdf"));
        const auto pos = text.find("1.0500");
        REQUIRE(pos != std::string::npos);
        text.replace(pos, 6, "1.0x00");
        try {
            parse_cdf(text);
            FAIL("expected CdfParseError");
        } catch (const CdfParseError& e) {
            CHECK(e.line() == 3);
            CHECK(e.col_begin() > 0);
            CHECK(std::string(e.what()).find("cols") != std::string::npos);
        }
    }
    SUBCASE("missing machine record in the sidecar") {
        Network net = parse_cdf(read_file(data_path("ieee14.cdf")));
        CHECK_THROWS_WITH_AS(
            merge_dynamics_sidecar(net, "bus=1 H=3 xdp=0.3 D=1 mva=100\n"),
            doctest::Contains("generator dynamic record missing"), std::runtime_error);
    }
}

TEST_CASE("write-then-parse is stable byte for byte") {
    for (const char* base : {"ieee14", "threebus"}) {
        const Network n1 = load_network(data_path(std::string(base) + ".cdf"),
                                        data_path(std::string(base) + ".dyn"));
        const std::string t1 = write_cdf(n1);
        const std::string s1 = write_dynamics_sidecar(n1);
        Network n2 = parse_cdf(t1);
        merge_dynamics_sidecar(n2, s1);
        CHECK(write_cdf(n2) == t1);
        CHECK(write_dynamics_sidecar(n2) == s1);
        REQUIRE(n2.buses.size() == n1.buses.size());
        for (std::size_t i = 0; i < n1.buses.size(); ++i) {
            CHECK(n2.buses[i].id == n1.buses[i].id);
            CHECK(n2.buses[i].kind == n1.buses[i].kind);
            CHECK(n2.buses[i].load_P == doctest::Approx(n1.buses[i].load_P).epsilon(1e-12));
            CHECK(n2.buses[i].base_kV == doctest::Approx(n1.buses[i].base_kV));
        }
        REQUIRE(n2.branches.size() == n1.branches.size());
        for (std::size_t i = 0; i < n1.branches.size(); ++i) {
            CHECK(n2.branches[i].x == doctest::Approx(n1.branches[i].x).epsilon(1e-12));
            CHECK(n2.branches[i].is_line == n1.branches[i].is_line);
            CHECK(n2.branches[i].tap == doctest::Approx(n1.branches[i].tap));
        }
        CHECK(network_fingerprint(n2) == network_fingerprint(n1));
    }
}

TEST_CASE("two-bus admittance matches single-element algebra") {
    Network net;
    net.buses.push_back(make_bus(1, BusKind::Slack, 1.0));
    net.buses.push_back(make_bus(2, BusKind::PQ, 0.0));
    net.branches.push_back(make_line(1, 2, 0.0, 0.1));

    AdmittanceMatrix y = build_admittance(net, LoadModel::Ignore);
    CHECK(std::abs(y(0, 0) - Complex(0.0, -10.0)) < 1e-12);
    CHECK(std::abs(y(0, 1) - Complex(0.0, 10.0)) < 1e-12);
    CHECK(std::abs(y(1, 0) - Complex(0.0, 10.0)) < 1e-12);
    CHECK(std::abs(y(1, 1) - Complex(0.0, -10.0)) < 1e-12);

    net.branches[0].b_charging = 0.2;
    y = build_admittance(net, LoadModel::Ignore);
    CHECK(std::abs(y(0, 0) - Complex(0.0, -9.9)) < 1e-12);
    CHECK(std::abs(y(1, 1) - Complex(0.0, -9.9)) < 1e-12);

    net.branches[0].r = 0.0;
    net.branches[0].x = 0.0;
    CHECK_THROWS_WITH_AS(build_admittance(net, LoadModel::Ignore), doctest::Contains("r = x = 0"),
                         std::runtime_error);
}

TEST_CASE("ieee14 admittance equals an independently assembled matrix") {
    const Network net = load_ieee14();
    const AdmittanceMatrix y = build_admittance(net, LoadModel::Ignore);

    // Assemble from scratch, walking branch data directly.
    const int n = 14;
    Eigen::MatrixXcd ref = Eigen::MatrixXcd::Zero(n, n);
    for (const auto& br : net.branches) {
        const int i = net.bus_index(br.from);
        const int j = net.bus_index(br.to);
        const Complex z(br.r, br.x);
        const Complex ys = 1.0 / z;
        const Complex half(0.0, br.b_charging / 2.0);
        ref(i, i) += (ys + half) / (br.tap * br.tap);
        ref(j, j) += ys + half;
        ref(i, j) -= ys / br.tap;
        ref(j, i) -= ys / br.tap;
    }
    for (int k = 0; k < n; ++k)
        ref(k, k) += Complex(net.buses[static_cast<std::size_t>(k)].shunt_G,
                             net.buses[static_cast<std::size_t>(k)].shunt_B);
    CHECK((y - ref).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("admittance symmetry and row-sum properties on random tap-1 networks") {
    Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        Network net;
        const int n = 3 + static_cast<int>(rng.next_u64() % 5);
        for (int i = 1; i <= n; ++i)
            net.buses.push_back(make_bus(i, i == 1 ? BusKind::Slack : BusKind::PQ, 1.0));
        for (int i = 2; i <= n; ++i)
            net.branches.push_back(
                make_line(i - 1, i, 0.01 + 0.05 * rng.uniform(), 0.05 + 0.3 * rng.uniform()));
        for (int extra = 0; extra < n / 2; ++extra) {
            const int a = 1 + static_cast<int>(rng.next_u64() % n);
            const int b = 1 + static_cast<int>(rng.next_u64() % n);
            if (a != b)
                net.branches.push_back(
                    make_line(a, b, 0.02 + 0.03 * rng.uniform(), 0.1 + 0.2 * rng.uniform()));
        }
        const AdmittanceMatrix y = build_admittance(net, LoadModel::Ignore);
        CHECK((y - y.transpose()).cwiseAbs().maxCoeff() < 1e-12);
        // no shunts, no charging: every row sums to zero
        for (int i = 0; i < n; ++i) CHECK(std::abs(y.row(i).sum()) < 1e-12);
    }
}

TEST_CASE("fault node insertion") {
    Network net;
    net.buses.push_back(make_bus(1, BusKind::Slack, 1.0));
    net.buses.push_back(make_bus(2, BusKind::PQ, 0.0));
    net.branches.push_back(make_line(1, 2, 0.0, 0.2, 0.05));

    SUBCASE("midpoint split") {
        const FaultedNetwork fn = insert_fault_node(net, 0, 0.5);
        CHECK(fn.net.buses.size() == 3);
        CHECK(fn.fault_bus_index == 2);
        CHECK(fn.net.branches[static_cast<std::size_t>(fn.segment_a)].x == doctest::Approx(0.1));
        CHECK(fn.net.branches[static_cast<std::size_t>(fn.segment_b)].x == doctest::Approx(0.1));
        const double total_b =
            fn.net.branches[static_cast<std::size_t>(fn.segment_a)].b_charging +
            fn.net.branches[static_cast<std::size_t>(fn.segment_b)].b_charging;
        CHECK(total_b == doctest::Approx(0.05));
    }
    SUBCASE("lambda clamps at the ends") {
        const FaultedNetwork fn = insert_fault_node(net, 0, 0.0);
        CHECK(fn.net.branches[static_cast<std::size_t>(fn.segment_a)].x == doctest::Approx(0.002));
        CHECK(fn.net.branches[static_cast<std::size_t>(fn.segment_b)].x == doctest::Approx(0.198));
    }
    SUBCASE("transformers are rejected") {
        net.branches[0].is_line = false;
        CHECK_THROWS_WITH_AS(insert_fault_node(net, 0, 0.5),
                             doctest::Contains("not fault-eligible"), std::invalid_argument);
    }
}

TEST_CASE("splitting a line does not change the power flow") {
    const Network net = load_threebus();
    const PowerFlowSolution base = solve_power_flow(net);
    for (int line : net.fault_eligible_lines()) {
        for (double lambda : {0.15, 0.5, 0.83}) {
            const FaultedNetwork fn = insert_fault_node(net, line, lambda);
            const PowerFlowSolution split = solve_power_flow(fn.net);
            for (std::size_t i = 0; i < net.buses.size(); ++i) {
                const auto k = static_cast<Eigen::Index>(i);
                CHECK(std::abs(split.V(k) - base.V(k)) < 1e-9);
                CHECK(std::abs(split.P_inj(k) - base.P_inj(k)) < 1e-9);
            }
        }
    }
}

TEST_CASE("kron reduction") {
    SUBCASE("keep-all is the identity") {
        Network net = load_threebus();
        const AdmittanceMatrix y = build_admittance(net, LoadModel::Ignore);
        const AdmittanceMatrix r = kron_reduce(y, {0, 1, 2});
        CHECK((r - y).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("three-node chain against dense block algebra") {
        Eigen::MatrixXcd y(3, 3);
        const Complex ya(0.4, -4.0), yb(0.2, -2.5), sh(0.01, 0.3);
        y.setZero();
        y(0, 0) = ya + sh;
        y(1, 1) = ya + yb + sh;
        y(2, 2) = yb + sh;
        y(0, 1) = y(1, 0) = -ya;
        y(1, 2) = y(2, 1) = -yb;
        const AdmittanceMatrix red = kron_reduce(y, {0, 2});
        // eliminate node 1 by hand
        Eigen::MatrixXcd ref(2, 2);
        ref(0, 0) = y(0, 0) - y(0, 1) * y(1, 0) / y(1, 1);
        ref(0, 1) = -y(0, 1) * y(1, 2) / y(1, 1);
        ref(1, 0) = -y(2, 1) * y(1, 0) / y(1, 1);
        ref(1, 1) = y(2, 2) - y(2, 1) * y(1, 2) / y(1, 1);
        CHECK((red - ref).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("elimination order does not matter") {
        const Network net = load_ieee14();
        const AdmittanceMatrix y = build_admittance(net, LoadModel::Ignore);
        // keep machine terminal buses via two different elimination orders
        std::vector<int> keep = {0, 1, 2, 5, 7};
        const AdmittanceMatrix direct = kron_reduce(y, keep);
        std::vector<int> stage1 = keep;
        for (int i : {3, 4, 6}) stage1.push_back(i);
        std::sort(stage1.begin(), stage1.end());
        AdmittanceMatrix partial = kron_reduce(y, stage1);
        std::vector<int> keep2;
        for (std::size_t i = 0; i < stage1.size(); ++i)
            if (std::find(keep.begin(), keep.end(), stage1[i]) != keep.end())
                keep2.push_back(static_cast<int>(i));
        const AdmittanceMatrix staged = kron_reduce(partial, keep2);
        CHECK((direct - staged).cwiseAbs().maxCoeff() < 1e-10);
    }
    SUBCASE("singular eliminated block is reported") {
        Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(2, 2);
        y(0, 0) = Complex(1.0, -5.0);
        CHECK_THROWS_WITH_AS(kron_reduce(y, {0}), doctest::Contains("singular"),
                             std::runtime_error);
    }
}
