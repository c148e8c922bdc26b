import importlib.util
from pathlib import Path

import pytest

SCRIPTS = Path(__file__).resolve().parent.parent / "scripts"


def load(name):
    spec = importlib.util.spec_from_file_location(name, SCRIPTS / f"{name}.py")
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


@pytest.mark.parametrize(
    "name,argv,header",
    [
        ("energy_ratio_table", ["--k-max", "4"], "k,ratio,lower,upper,pseudo_virial"),
        ("delta_probe_growth", ["--windows", "50"], "window,hits,max_depth,t,norm_sq,i0_bound,fraction_of_bound"),
        ("solver_convergence", ["--window", "8", "--t", "0.5"], "dt,rk4_max_error,picard_max_error"),
        ("derivative_sums", ["--m-max", "3"], "alpha,beta,m,n_coeff_sum,free_coeff_sum,n_sum_per_2m,free_sum_per_2m"),
    ],
)
def test_script_runs(name, argv, header, capsys):
    load(name).main(argv)
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == header and len(lines) > 1
