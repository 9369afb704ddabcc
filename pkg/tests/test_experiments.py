import math

import numpy as np
import pytest

from capa_secrecy.errors import CapaError
from capa_secrecy.experiments import (
    SweepSpec,
    format_csv,
    load_config,
    run_sweep,
    run_verify,
    sweep_rows,
)
from capa_secrecy.scenario import DEFAULT_SCENARIO


def parse_csv(text):
    lines = text.splitlines()
    assert lines[0].startswith("# config: ")
    header = lines[1].split(",")
    rows = np.array([[float(v) for v in line.split(",")] for line in lines[2:]])
    return header, rows


def test_overrides_and_types(tmp_path):
    ini = tmp_path / "run.ini"
    ini.write_text("[scenario]\nbob_theta = pi/4\narray = spda\n\n[sweep]\nvariable = aor\nsteps = 3\n")
    cfg = load_config(ini, ["chebyshev_T=40", "scenario.area_b=none", "sweep.to=0.5"])
    assert cfg.scenario.bob_theta == pytest.approx(math.pi / 4)
    assert cfg.scenario.array == "spda"
    assert cfg.scenario.chebyshev_T == 40 and isinstance(cfg.scenario.chebyshev_T, int)
    assert cfg.scenario.area_b is None
    assert cfg.sweep == SweepSpec("aor", 0.05, 0.5, 3, False)


@pytest.mark.parametrize(
    "overrides",
    [["nonsense=1"], ["snr_db=abc"], ["snr_db=__import__('os')"], ["chebyshev_T=1.5"], ["variable=bogus"], ["steps=1"], ["noequals"]],
)
def test_bad_config_rejected(overrides):
    with pytest.raises(CapaError):
        load_config(None, overrides)


def test_power_sweep_columns():
    cfg = load_config(None, ["steps=6"])
    header, rows = sweep_rows(cfg)
    assert header == ["x", "optimal_rate", "mrt_rate", "zf_rate"]
    assert len(rows) == 6
    assert rows[2][1] == pytest.approx(7.734419, abs=1e-6)


def test_target_rate_sweep_marks_infeasible_mrt():
    cfg = load_config(None, ["variable=target_rate", "from=0", "to=8", "steps=9"])
    header, rows = parse_csv(run_sweep(cfg))
    assert header == ["x", "optimal_power", "mrt_power", "zf_power"]
    assert rows[0, 1] == 0 and rows[0, 3] == 0  # zero target costs nothing
    assert np.isinf(rows[-1, 2])
    assert np.all(np.isfinite(rows[:, 1]))


def test_aor_sweep_has_reference_columns():
    cfg = load_config(None, ["variable=aor", "steps=4"])
    header, rows = parse_csv(run_sweep(cfg))
    assert "capa_optimal_rate" in header and "asymptote_msr_spda" in header
    last = dict(zip(header, rows[-1]))
    assert last["x"] == 1.0
    assert last["optimal_rate"] == pytest.approx(last["capa_optimal_rate"], rel=1e-12)


def test_run_sweep_writes_file(tmp_path):
    out = tmp_path / "sweep.csv"
    cfg = load_config(None, ["steps=3"])
    text = run_sweep(cfg, out)
    assert out.read_text() == text
    assert run_sweep(cfg) == text


def test_format_csv_inf():
    cfg = load_config(None, [])
    text = format_csv(cfg, ["x", "y"], [[1.0, math.inf]])
    assert text.splitlines()[-1] == "1,inf"


def test_verify_small_and_corrupted():
    good = run_verify(DEFAULT_SCENARIO, resolutions=(6, 12), tolerance=0.05)
    assert good.exit_code == 0 and good.final_resolution == 12
    bad = run_verify(DEFAULT_SCENARIO, resolutions=(6, 12), tolerance=0.05, gain_b_factor=1.1)
    assert bad.exit_code == 2
    assert any(c.name == "gain_b" for c in bad.failures())
    assert "FAIL" in bad.render().splitlines()[-1]
