"""CLI driver: config handling, exit codes, CSV schema and reproducibility."""

import numpy as np
import pytest

from patchdg.analysis import ConvergenceTable, ErrorReport
from patchdg.cli import (CSV_HEADER, EXIT_ASSUMPTION, EXIT_CONFIG, EXIT_OK,
                         EXIT_SOLVER, RunConfig, build_config,
                         load_config_file, main, read_csv, run_convergence,
                         write_csv)
from patchdg.exceptions import ConfigError
from patchdg.mesh import generate_structured, save_mesh


def _mask_timings(text):
    out = []
    for line in text.splitlines():
        cells = line.split(",")
        out.append(",".join(cells[:7]))
    return "\n".join(out)


def test_build_config_flags():
    cfg = build_config(["--problem", "example3", "--order", "3",
                       "--n", "10,20", "--eta", "200", "--patch-size", "20"])
    assert cfg.problem == "example3" and cfg.order == 3
    assert cfg.n == [10, 20] and cfg.eta == 200.0 and cfg.patch_size == 20


def test_config_file_with_flag_override(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(
        "# example run\nproblem = example1\norder = 3\nn = 10, 20\n"
        "eta = 100\ngeom-tol = 1e-4\n")
    cfg = build_config(["--config", str(path), "--eta", "50"])
    assert cfg.problem == "example1" and cfg.order == 3
    assert cfg.n == [10, 20]
    assert cfg.eta == 50.0  # flag wins over file
    assert cfg.geom_tol == 1e-4


def test_config_file_rejects_unknown_key(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("colour = blue\n")
    with pytest.raises(ConfigError):
        load_config_file(path)


def test_validation_errors():
    with pytest.raises(ConfigError):
        RunConfig(problem="nope").validate()
    with pytest.raises(ConfigError):
        RunConfig(n=[]).validate()
    with pytest.raises(ConfigError):
        RunConfig(n=[20, 10]).validate()
    with pytest.raises(ConfigError):
        RunConfig(eta=-1.0).validate()
    with pytest.raises(ConfigError):
        RunConfig(order=1).validate()


def test_exit_code_config_error():
    assert main(["--problem", "doesnotexist", "--n", "10"]) == EXIT_CONFIG


def test_exit_code_solver_failure(tmp_path):
    # near-zero penalty breaks coercivity
    code = main(["--problem", "example1", "--order", "2", "--n", "10",
                 "--eta", "1e-6"])
    assert code == EXIT_SOLVER


def test_exit_code_assumption_violation():
    # the star interface crosses a single face three times on a 4 x 4 grid
    code = main(["--problem", "example4", "--order", "2", "--n", "4"])
    assert code == EXIT_ASSUMPTION


def test_run_and_csv_reproducible(tmp_path):
    args = ["--problem", "example1", "--order", "2", "--n", "10",
            "--output", None]
    outs = []
    for tag in ("a", "b"):
        path = tmp_path / f"run_{tag}.csv"
        args[-1] = str(path)
        assert main(args) == EXIT_OK
        outs.append(path.read_text())
    assert outs[0].splitlines()[0] == CSV_HEADER
    # byte-for-byte identical except the wall-clock timing columns
    assert _mask_timings(outs[0]) == _mask_timings(outs[1])


def test_csv_round_trip(tmp_path):
    table = ConvergenceTable()
    table.append(ErrorReport(0.2, 100, 1.5e-1, 1.0e-1, 2.5e-3, {}, 12.5, 1.5))
    table.append(ErrorReport(0.1, 400, 7.0e-2, 5.0e-2, 6.0e-4, {}, 50.0, 7.0))
    path = tmp_path / "table.csv"
    write_csv(table, path)
    cols = read_csv(path)
    assert np.array_equal(cols["h"], [0.2, 0.1])
    assert np.array_equal(cols["dofs"], [100, 400])
    assert np.isnan(cols["eoc_energy"][0])
    assert np.isclose(cols["eoc_energy"][1],
                      np.log(1.5e-1 / 7.0e-2) / np.log(2.0), rtol=1e-14)
    assert np.isclose(cols["eoc_l2"][1],
                      np.log(2.5e-3 / 6.0e-4) / np.log(2.0), rtol=1e-14)


def test_read_csv_rejects_bad_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("h,dofs\n0.1,5\n")
    with pytest.raises(ConfigError):
        read_csv(path)


def test_mesh_file_refinement_sequence(tmp_path):
    mesh = generate_structured((-1, -1, 1, 1), 10)
    mpath = tmp_path / "mesh.txt"
    save_mesh(mesh, mpath)
    out = tmp_path / "out.csv"
    cfg = RunConfig(problem="example1", order=2, n=[2],
                    mesh_file=str(mpath), output=str(out))
    table = run_convergence(cfg)
    hs = table.column("h")
    assert len(hs) == 2 and np.isclose(hs[1], 0.5 * hs[0])


def test_dump_system(tmp_path):
    dump = tmp_path / "system.txt"
    code = main(["--problem", "example1", "--order", "2", "--n", "10",
                 "--dump-system", str(dump)])
    assert code == EXIT_OK
    text = dump.read_text().splitlines()
    assert text[0].startswith("# matrix")
    assert any(line.startswith("# rhs") for line in text)
