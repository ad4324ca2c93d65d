"""Smoke test for the railcap Python module.

Build and install first, e.g. `maturin develop -m crates/py/Cargo.toml`
or `pip install` the wheel from `maturin build -m crates/py/Cargo.toml`.
"""

from pathlib import Path

import railcap

FIXTURES = Path(__file__).resolve().parent.parent / "crates" / "core" / "fixtures"


def check_single_train():
    s = railcap.Scenario.load(FIXTURES / "single_train.json")
    assert s.links == ["A-B", "B-C"], s.links
    sol = s.solve()
    assert sol.status == "optimal"
    usage = sol.capacity_usage()
    assert abs(usage["A-B"][0] - 0.925) < 1e-6, usage
    assert abs(usage["B-C"][1] - 0.25) < 1e-6, usage
    assert sol.capacity_csv().startswith("link,1,2,3")
    print("single train:", sol)


def check_restriction():
    base = railcap.Scenario.load(FIXTURES / "eight_station.json")
    restricted = base.restrict("E-F", period=4, capacity=0.0)
    assert restricted.capacity("E-F", 4) == 0.0
    assert base.capacity("E-F", 4) == 5.0
    a, b = base.solve(), restricted.solve()
    assert b.objective > a.objective
    assert b.capacity_usage()["E-F"][3] == 0.0
    outcome = b.demand_outcome()
    for name, row in outcome.items():
        served = sum(sum(v) for v in row["departures"].values())
        assert abs(served + row["cancel_total"] - row["volume"]) < 1e-9, name
    assert sum(outcome["E-F-p"]["departures"]["E-F-p2"]) > 0
    print(f"eight stations: base {a.objective:.6f}, restricted {b.objective:.6f}")


def check_lp():
    # max x + y s.t. x + 2y <= 4, 3x + y <= 6
    r = railcap.solve_lp([-1.0, -1.0], [([1.0, 2.0], "<=", 4.0), ([3.0, 1.0], "<=", 6.0)])
    assert r["status"] == "optimal"
    assert abs(r["objective"] + 2.8) < 1e-9, r
    r = railcap.solve_lp([-1.0, -1.0], [([1.0, 2.0], "<=", 4.0), ([3.0, 1.0], "<=", 6.0)], integer=[0, 1])
    assert r["objective"] == -2.0, r
    print("lp:", r)


def check_errors():
    try:
        railcap.Scenario.from_json('{"name": "x"')
    except ValueError as e:
        print("syntax error reported:", str(e).split(":")[0])
    else:
        raise AssertionError("malformed document accepted")


if __name__ == "__main__":
    check_single_train()
    check_restriction()
    check_lp()
    check_errors()
    print("ok")
