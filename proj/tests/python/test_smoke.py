import json
import math
import os
import subprocess

import pytest

import mlsim


def test_seir_derivative_example():
    d = mlsim.seir_derivative([990, 0, 10, 0], 0.0003, 0.2, 0.1)
    assert d == pytest.approx([-2.97, 2.97, -1.0, 1.0])
    assert sum(d) == 0


def test_fleet_matches_closed_form():
    p, l, e = mlsim.integrate_fleet([100, 0, 0], 0.05, 0.05, 0.1, 0, 10, 0.01)
    assert p == pytest.approx(100 * math.exp(-1), rel=1e-6)
    assert p + l + e == pytest.approx(100, rel=1e-12)


def test_seir_matches_scipy():
    integrate = pytest.importorskip("scipy.integrate")

    def rhs(_t, y):
        s, e, i, _r = y
        return [-3e-4 * i * s, 3e-4 * i * s - 0.2 * e, 0.2 * e - 0.1 * i, 0.1 * i]

    ref = integrate.solve_ivp(rhs, (0, 30), [990, 0, 10, 0], method="DOP853", rtol=1e-12, atol=1e-12)
    ours = mlsim.integrate_seir([990, 0, 10, 0], 3e-4, 0.2, 0.1, 0, 30, 0.01)
    assert ours == pytest.approx(ref.y[:, -1], rel=1e-6)


def test_discretize_and_diffuse():
    assert mlsim.discretize_conserving([3.2, 3.3, 3.5, 0.0], 10) == [3, 3, 4, 0]
    assert mlsim.discretize_conserving([4.5, 4.5, 1.0, 0.0], 10) == [5, 4, 1, 0]
    out = mlsim.diffuse([[0, 0, 0], [0, 8, 0], [0, 0, 0]], 0.5)
    assert out[1][1] == 4.0
    assert sum(map(sum, out)) == pytest.approx(8.0)


def test_streams_are_reproducible():
    a = mlsim.derive_stream(42, "agent-move", 7)
    b = mlsim.derive_stream(42, "agent-move", 7)
    assert [a.next() for _ in range(5)] == [b.next() for _ in range(5)]
    assert mlsim.derive_stream(42, "agent-move", 8).state != mlsim.derive_stream(42, "agent-move", 7).state
    with pytest.raises(mlsim.MlsimError):
        mlsim.derive_stream(42, "foo", 0)


def test_epidemic_run_conserves_agents():
    config = {
        "scenario": "epidemic",
        "epidemic": {"cities": [{"name": n, "population": 300} for n in "ABC"]},
    }
    result = mlsim.run_epidemic(json.dumps(config), seed=3, steps=50)
    assert result["columns"][:4] == ["S", "E", "I", "R"]
    by_step = {}
    for row in result["rows"]:
        by_step[row["step"]] = by_step.get(row["step"], 0) + sum(row[c] for c in "SEIR")
    assert set(by_step.values()) == {900}
    again = mlsim.run_epidemic(json.dumps(config), seed=3, steps=50, workers=3)
    assert again["csv"] == result["csv"]


def test_pollution_run():
    result = mlsim.run_pollution(None, seed=1, steps=40)
    assert len(result["rows"]) == 41
    assert result["rows"][-1]["total_pollution"] > 0
    assert result["csv"].startswith("step,node_id,label,total_pollution,P,L,E\n")


def test_bad_config_raises():
    with pytest.raises(mlsim.MlsimError, match="bata"):
        mlsim.run_epidemic(json.dumps({"scenario": "epidemic", "epidemic": {"bata": 1}}))


def test_cli_binary(tmp_path):
    exe = os.environ.get("MLSIM_CLI")
    if not exe:
        pytest.skip("MLSIM_CLI not set")
    out = tmp_path / "r"
    done = subprocess.run([exe, "epidemic", "--seed", "42", "--steps", "10", "--out", str(out)])
    assert done.returncode == 0
    assert (out / "run.csv").exists()
    assert subprocess.run([exe, "weather"], capture_output=True).returncode == 2
