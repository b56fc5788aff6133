#include "fbd/config.hpp"
#include "fbd/errors.hpp"
#include "fbd/io.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace fbd;
namespace fs = std::filesystem;
using io::json;

namespace {

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path tmpdir()
{
    auto d = fs::temp_directory_path() / "fbd_test_io";
    fs::create_directories(d);
    return d;
}

} // namespace

TEST_CASE("doubles round-trip with 17 digits")
{
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) CHECK(std::stod(io::format_double(v)) == v);
    CHECK(io::format_double(0.5) == "0.5");
}

TEST_CASE("csv writer")
{
    auto p = tmpdir() / "a.csv";
    {
        io::CsvWriter w(p, {"tau", "xi_star"});
        w.row({0.0, 0.1});
        CHECK_THROWS_AS(w.row({1.0}), InvalidStateError);
    }
    CHECK(slurp(p) == "tau,xi_star\n0,0.10000000000000001\n");
    CHECK_THROWS_AS(io::CsvWriter(tmpdir() / "missing" / "x.csv", {"a"}), ConfigError);
}

TEST_CASE("events schema")
{
    si::TransitionLog log;
    si::TransitionEvent e;
    e.k = 3;
    e.t_star = 100.0;
    e.u_left = 2.5;
    e.udot_before = 0.5;
    e.udot_after = 4.5;
    log.events.push_back(e);
    auto p = tmpdir() / "events.csv";
    io::write_events(p, log, 0.1);
    CHECK(slurp(p) == "k,t_star,tau_star,u_left,jump\n3,100,1,2.5,4\n");
}

TEST_CASE("config hash and metadata")
{
    json a = json::parse(R"({"b": 1, "a": [1, 2]})");
    json b = json::parse(R"({"a":[1,2],"b":1})");
    CHECK(io::config_hash(a) == io::config_hash(b));
    CHECK(io::config_hash(a).size() == 16);
    CHECK(io::config_hash(a) != io::config_hash(json::parse(R"({"b": 2, "a": [1, 2]})")));
    // 64-bit FNV-1a of "{}", offset basis cbf29ce484222325, prime 100000001b3.
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : std::string("{}")) h = (h ^ c) * 0x100000001b3ull;
    char want[17];
    std::snprintf(want, sizeof want, "%016llx", static_cast<unsigned long long>(h));
    CHECK(io::config_hash(json::object()) == want);
    auto m = io::metadata(a, "sweep", 42);
    CHECK(m["seed"] == 42);
    CHECK(m["config_hash"] == io::config_hash(a));
    CHECK(m.contains("versions"));
}

TEST_CASE("config sections")
{
    json doc = json::parse(R"({
        "potential": {"kind": "smooth-demo"},
        "initial_data": {"profile": "exp-kink", "a": 2.0, "ell": 0.5},
        "integrator": {"dt0": 0.01, "energy_guard": false},
        "eps_list": [0.1, 0.05]
    })");
    CHECK(config::potential_from_json(doc).kind() == PotentialKind::smooth_demo);
    auto p = config::profile_from_json(doc);
    CHECK(p.a == 2.0);
    CHECK(p.b == 0.25);
    auto e = config::euler_from_json(doc);
    CHECK(e.dt0 == 0.01);
    CHECK_FALSE(e.energy_guard);
    CHECK(config::eps_list_from_json(doc) == Vec{0.1, 0.05});
    CHECK(config::eps_list_from_json(json::object()).size() == 4);

    CHECK_THROWS_AS(config::euler_from_json(json::parse(R"({"integrator": {"dt": 1}})")), ConfigError);
    CHECK_THROWS_AS(config::potential_from_json(json::parse(R"({"potential": {"kind": "quartic"}})")), ConfigError);
    CHECK_THROWS_AS(config::eps_list_from_json(json::parse(R"({"eps_list": [0.1, -1]})")), ConfigError);
    CHECK_THROWS_AS(config::euler_from_json(json::parse(R"({"integrator": {"dt0": "x"}})")), ConfigError);

    auto st = config::lattice_from_json(json::parse(R"({"initial_data": {"values": [1, -1, 0.5], "first_index": -1}})"));
    CHECK(st.first_index == -1);
    CHECK(st.u.size() == 3);
    CHECK_THROWS_AS(config::lattice_from_json(json::parse(R"({"initial_data": {"values": [1, 2]}})")), ConfigError);
}

TEST_CASE("json file round-trip")
{
    auto p = tmpdir() / "r.json";
    io::write_json(p, json{{"x", 1.5}});
    CHECK(io::read_json(p)["x"] == 1.5);
    std::ofstream(tmpdir() / "bad.json") << "{nope";
    CHECK_THROWS_AS(io::read_json(tmpdir() / "bad.json"), ConfigError);
}
