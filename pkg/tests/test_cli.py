import json
import subprocess
import sys

import pytest
from hypothesis import given
from hypothesis import strategies as st

from collatz_flows import CollatzParams, build_coeff_table, build_derivative_decomposition
from collatz_flows.cli import Budgets, ConfigError, RunConfig, main, parse_init, run
from collatz_flows.report import (
    coeff_payload,
    deriv_payload,
    emit_csv,
    emit_json,
    load_coeff_table,
    load_deriv,
    to_jsonable,
)
from collatz_flows.verify import CHECKS, run_verification

from strategies import collatz_params

C31 = CollatzParams(3, 1)


def cli(*args, env=None):
    return subprocess.run(
        [sys.executable, "-m", "collatz_flows.cli", *args], capture_output=True, text=True, env=env
    )


# -- contract examples ---------------------------------------------------------------


def test_coeffs_json():
    out = cli("coeffs", "--alpha", "3", "--beta", "1", "--k", "2", "--format", "json")
    assert out.returncode == 0
    data = json.loads(out.stdout)
    assert data["a"] == [1, 3, 3, 9] and data["b"] == [0, 1, 2, 5]


def test_invalid_alpha_exit_2():
    out = cli("orbit", "--alpha", "4", "--beta", "1", "--n", "5")
    assert out.returncode == 2
    assert "alpha must be odd" in out.stderr


def test_bad_flag_exit_2():
    assert cli("orbit", "--alpha", "3", "--beta", "1", "--bogus").returncode == 2
    assert cli("flow", "--alpha", "3", "--beta", "1", "--init", "delta:0", "--t-max", "1").returncode == 2


def test_energy_csv_header():
    code, out, _ = run(RunConfig("energy", C31, n=1, k=2, m=1))
    lines = out.decode().splitlines()
    assert lines[0] == "n,k,m,s_k,s_km,energy,pseudo_virial_num,pseudo_virial_den"
    assert lines[1] == "1,2,1,12,28,16,1,1"


def test_big_coeffs_are_decimal_strings():
    p = CollatzParams(7, 3)
    code, out, _ = run(RunConfig("coeffs", p, format="json", k=20))
    data = json.loads(out)
    assert code == 0 and "79792266297612001" in data["a"]
    assert all(isinstance(x, str) for x in data["a"] if int(x) >= 2**53)
    code, out, _ = run(RunConfig("coeffs", p, k=20))
    rows = [line.split(",") for line in out.decode().splitlines()[1:]]
    top = [r for r in rows if r[3] == "20"]
    assert len(top) == 1 and top[0][1] == str(7**20) == "79792266297612001"


def test_orbit_and_parity_csv():
    _, out, _ = run(RunConfig("orbit", C31, n=5))
    assert out.decode().splitlines() == ["step,value,parity", "0,5,1", "1,8,0", "2,4,0", "3,2,0", "4,1,1", "5,2,0"]
    code, out, _ = run(RunConfig("parity", CollatzParams(5, 1), k=3, check_bijection=True))
    assert code == 0 and out.decode().splitlines()[1:3] == ["1,110", "2,011"]


def test_deriv_csv_and_verify():
    code, out, _ = run(RunConfig("deriv", C31, m=2, verify=True))
    assert code == 0
    assert out.decode().splitlines() == [
        "residue,n_coeff_num,free_coeff_num,denominator",
        "0,1,0,4",
        "1,-5,-3,4",
        "2,3,2,4",
        "3,1,1,4",
    ]


@pytest.mark.parametrize("scheme", ["closed", "rk4", "picard"])
def test_flow_eigenvector(scheme):
    code, out, _ = run(RunConfig("flow", C31, format="json", init="ones:1,2", t_max=2.0, t_steps=2, scheme=scheme, dt=0.01))
    assert code == 0
    snap = json.loads(out)["snapshots"][-1]
    assert snap["t"] == 2.0
    re, im = snap["amplitudes"]["1"]
    assert abs(re - 7.38905609893065) < 1e-8 and abs(im) < 1e-12


def test_flow_csv_window():
    code, out, _ = run(RunConfig("flow", C31, init="list:3=1.0+0.5i,7=2.0", t_max=1.0, t_steps=1, window=4))
    lines = out.decode().splitlines()
    assert code == 0 and lines[0] == "t,frequency,re,im,windowed_norm,growth_bound"
    assert lines[3].startswith("0.0,3,1.0,0.5,")
    assert len(lines) == 1 + 2 * 5  # frequencies 1..4 plus 7, two times


def test_flow_budget_exit_2():
    code, _, msg = run(RunConfig("flow", CollatzParams(5, 1), init="delta:7", t_max=1.0, budgets=Budgets(max_steps=100)))
    assert code == 2 and "did not reach a cycle" in msg


def test_table_budget_exit_2():
    code, _, msg = run(RunConfig("coeffs", C31, k=12, budgets=Budgets(k_max=10)))
    assert code == 2
    code, _, msg = run(RunConfig("coeffs", C31, k=12, budgets=Budgets(table_memory=1000)))
    assert code == 2 and "table-memory" in msg


def test_invariant_failure_exit_1(monkeypatch):
    import collatz_flows.verify as verify

    monkeypatch.setitem(verify.CHECKS, "core.integrality", lambda g: verify.CheckResult(False, 1, {"n": 7}))
    code, out, msg = run(RunConfig("verify", grid="quick", checks=("core.integrality",)))
    assert code == 1 and '"n":7' in msg
    assert out.decode().splitlines()[1] == 'core.integrality,fail,"{""n"": 7}"'


def test_config_validation():
    with pytest.raises(ConfigError):
        Budgets(max_steps=0)
    with pytest.raises(ConfigError):
        RunConfig("plot")
    with pytest.raises(ConfigError):
        RunConfig("orbit", format="xml")


def test_init_grammar():
    u = parse_init(C31, "list:3=1.0+0.5i,7=2.0,9=-0.5i")
    assert u.amplitudes == {3: 1 + 0.5j, 7: 2.0, 9: -0.5j}
    assert parse_init(C31, "ones:1,2").amplitudes == {1: 1, 2: 1}
    assert parse_init(C31, "delta:5").amplitudes == {5: 1}
    for bad in ("delta", "list:3", "list:3=abc", "wave:1", "ones:0"):
        with pytest.raises(ConfigError):
            parse_init(C31, bad)


def test_output_dir_env(tmp_path, monkeypatch):
    monkeypatch.setenv("COLLATZ_FLOWS_OUTPUT_DIR", str(tmp_path))
    assert main(["coeffs", "--alpha", "3", "--beta", "1", "--k", "2"]) == 0
    assert (tmp_path / "coeffs.csv").read_text().startswith("residue,a,b,alpha_exponent\n0,1,0,0\n")
    assert main(["orbit", "--alpha", "3", "--beta", "1", "--n", "3", "--output", "sub/o.json", "--format", "json"]) == 0
    assert json.loads((tmp_path / "sub" / "o.json").read_text())["cycle_length"] == 2


# -- serialization ---------------------------------------------------------------


def test_determinism_byte_identical():
    a = run(RunConfig("verify", grid="quick", format="json", checks=("coeffs.sums", "energy.conservation")))
    b = run(RunConfig("verify", grid="quick", format="json", checks=("coeffs.sums", "energy.conservation")))
    assert a == b and a[0] == 0
    keys = list(json.loads(a[1]))
    assert keys == sorted(keys)
    assert b"elapsed_ms" not in a[1]


def test_timings_only_in_metadata():
    cert = run_verification("quick", ["core.parity_worked_example"]).to_dict(timings=True)
    assert set(cert["metadata"]["elapsed_ms"]) == {"core.parity_worked_example"}
    assert all("elapsed_ms" not in c for c in cert["checks"])


def test_certificate_lists_every_check_once():
    names = [c.name for c in run_verification("quick").checks]
    assert names == list(CHECKS) and len(set(names)) == len(names)


def test_jsonable_conventions():
    from fractions import Fraction

    assert to_jsonable(2**53) == str(2**53)
    assert to_jsonable(-(2**60)) == str(-(2**60))
    assert to_jsonable(2**53 - 1) == 2**53 - 1
    assert to_jsonable(Fraction(3, 4)) == "3/4"
    assert to_jsonable(1 - 2j) == [1.0, -2.0]
    with pytest.raises(TypeError):
        to_jsonable(object())


def test_csv_quotes_nothing_for_plain_rows():
    assert emit_csv("deriv", [(0, 1, 0, 4)]) == b"residue,n_coeff_num,free_coeff_num,denominator\n0,1,0,4\n"


@given(collatz_params(), st.integers(0, 14))
def test_coeff_round_trip(p, k):
    table = build_coeff_table(p, k)
    assert load_coeff_table(emit_json(coeff_payload(table))) == table


def test_coeff_round_trip_big():
    table = build_coeff_table(CollatzParams(7, 3), 20)
    assert load_coeff_table(emit_json(coeff_payload(table))) == table


@given(collatz_params(), st.integers(1, 8))
def test_deriv_round_trip(p, m):
    decomp = build_derivative_decomposition(p, m)
    assert load_deriv(emit_json(deriv_payload(decomp))) == decomp
