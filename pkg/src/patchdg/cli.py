"""Command-line driver: mesh sequences, convergence tables, CSV output."""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field

import numpy as np

from .analysis import ConvergenceTable, eoc
from .estimator import InterfaceSolver
from .exceptions import (AssumptionViolation, ConfigError, NotPositiveDefinite,
                         PatchDGError, SingularMatrix)
from .mesh import load_mesh, refine_uniform
from .problems import problem_names
from .solve import write_system

CSV_HEADER = "h,dofs,energy_err,dg_err,l2_err,eoc_energy,eoc_l2,assemble_ms,solve_ms"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_ASSUMPTION = 3
EXIT_SOLVER = 4


@dataclass
class RunConfig:
    """One convergence run: problem, degree, mesh sequence, overrides."""

    problem: str = "example1"
    order: int = 2
    n: list[int] = field(default_factory=lambda: [10])
    eta: float | None = None
    patch_size: int | None = None
    quad_order: int | None = None
    geom_tol: float = 1e-3
    output: str | None = None
    mesh_file: str | None = None
    dump_system: str | None = None

    def validate(self):
        if self.problem not in problem_names():
            raise ConfigError(f"unknown problem {self.problem!r}; choose "
                              f"from {', '.join(problem_names())}")
        if self.order < 2:
            raise ConfigError(f"order must be >= 2, got {self.order}")
        if not self.n:
            raise ConfigError("mesh list is empty")
        if self.mesh_file is not None:
            if len(self.n) != 1 or self.n[0] < 1:
                raise ConfigError("with --mesh-file, --n is a single "
                                  "positive refinement count")
        else:
            if any(v < 2 for v in self.n):
                raise ConfigError(f"mesh resolutions must be >= 2, "
                                  f"got {self.n}")
            if sorted(set(self.n)) != self.n:
                raise ConfigError("mesh resolutions must increase strictly")
        if self.eta is not None and self.eta <= 0:
            raise ConfigError(f"eta must be positive, got {self.eta}")
        return self


def _format(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return "" if x is None else f"{float(x):.17g}"


def write_csv(table: ConvergenceTable, path) -> None:
    """Serialize a convergence table to the documented CSV schema."""
    hs = table.column("h")
    rows = []
    for i, r in enumerate(table.reports):
        eoc_en = eoc_l2 = None
        if i:
            ratio = np.log(hs[i - 1] / hs[i])
            prev = table.reports[i - 1]
            eoc_en = np.log(prev.energy_error / r.energy_error) / ratio
            eoc_l2 = np.log(prev.l2_error / r.l2_error) / ratio
        rows.append([r.h, r.dofs, r.energy_error, r.dg_error, r.l2_error,
                     eoc_en, eoc_l2, r.assemble_ms, r.solve_ms])
    with open(path, "w") as fh:
        fh.write(CSV_HEADER + "\n")
        for row in rows:
            fh.write(",".join(_format(x) for x in row) + "\n")


def read_csv(path) -> dict[str, np.ndarray]:
    """Read a schema CSV back into float columns (empty cells -> nan)."""
    with open(path) as fh:
        header = fh.readline().strip()
        if header != CSV_HEADER:
            raise ConfigError(f"{path}: unexpected CSV header {header!r}")
        cols = {name: [] for name in CSV_HEADER.split(",")}
        for line in fh:
            vals = line.rstrip("\n").split(",")
            if len(vals) != len(cols):
                raise ConfigError(f"{path}: malformed row {line!r}")
            for name, v in zip(cols, vals):
                cols[name].append(float(v) if v else np.nan)
    return {k: np.array(v) for k, v in cols.items()}


def _mesh_sequence(config: RunConfig):
    if config.mesh_file is not None:
        # with an explicit mesh, n holds the number of meshes in the
        # uniform-refinement sequence starting from it
        mesh = load_mesh(config.mesh_file)
        for _ in range(config.n[0]):
            yield mesh
            mesh = refine_uniform(mesh)
    else:
        for n in config.n:
            yield n


def run_convergence(config: RunConfig, log=None) -> ConvergenceTable:
    """Solve on each mesh of the sequence and collect an error table."""
    config.validate()
    table = ConvergenceTable()
    for mesh in _mesh_sequence(config):
        est = InterfaceSolver(config.problem, config.order,
                              n=mesh if isinstance(mesh, int) else 0,
                              eta=config.eta, patch_size=config.patch_size,
                              quad_order=config.quad_order,
                              geom_tol=config.geom_tol)
        est.fit(None if isinstance(mesh, int) else mesh)
        if config.dump_system is not None:
            write_system(config.dump_system, est.matrix_, est.rhs_)
        report = est.error_report()
        table.append(report)
        if log is not None:
            log.write(f"h={report.h:.6g} dofs={report.dofs} "
                      f"energy={report.energy_error:.6e} "
                      f"l2={report.l2_error:.6e}\n")
    if config.output is not None:
        write_csv(table, config.output)
    return table


# ---------------------------------------------------------------------------

def _parse_int_list(text: str) -> list[int]:
    try:
        return [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise ConfigError(f"expected a comma-separated integer list, "
                          f"got {text!r}") from None


def load_config_file(path) -> dict[str, str]:
    """Flat `key = value` file; '#' starts a comment."""
    out: dict[str, str] = {}
    valid = set(RunConfig.__dataclass_fields__)
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in valid:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            out[key] = value
    return out


def build_config(argv) -> RunConfig:
    parser = argparse.ArgumentParser(
        prog="patchdg",
        description="Patch-reconstruction DG solver for the biharmonic "
                    "interface problem; writes a CSV convergence table.")
    parser.add_argument("--problem", help="benchmark name "
                        f"({', '.join(problem_names())})")
    parser.add_argument("--order", type=int, help="reconstruction degree m")
    parser.add_argument("--n", help="comma list of mesh resolutions, or the "
                        "number of refinements with --mesh-file")
    parser.add_argument("--eta", type=float, help="penalty strength override")
    parser.add_argument("--patch-size", type=int, help="patch threshold #S")
    parser.add_argument("--quad-order", type=int, help="volume quadrature order")
    parser.add_argument("--geom-tol", type=float, help="classification tolerance")
    parser.add_argument("--output", help="CSV output path")
    parser.add_argument("--mesh-file", help="initial mesh in text format")
    parser.add_argument("--dump-system", help="write matrix/rhs as text")
    parser.add_argument("--config", help="key = value config file")
    args = parser.parse_args(argv)

    config = RunConfig()
    if args.config:
        for key, value in load_config_file(args.config).items():
            kind = RunConfig.__dataclass_fields__[key].type
            if key == "n":
                value = _parse_int_list(value)
            elif "int" in kind:
                value = int(value)
            elif "float" in kind:
                value = float(value)
            setattr(config, key, value)
    for key in ("problem", "order", "eta", "patch_size", "quad_order",
                "geom_tol", "output", "mesh_file", "dump_system"):
        value = getattr(args, key)
        if value is not None:
            setattr(config, key, value)
    if args.n is not None:
        config.n = _parse_int_list(args.n)
    return config.validate()


def main(argv=None) -> int:
    try:
        config = build_config(sys.argv[1:] if argv is None else argv)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        table = run_convergence(config, log=sys.stdout)
    except AssumptionViolation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ASSUMPTION
    except (NotPositiveDefinite, SingularMatrix) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except PatchDGError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    hs = table.column("h")
    if len(hs) > 1:
        rates = eoc(hs, table.column("energy_error"))
        print("energy EOC: " + " ".join(f"{r:.3f}" for r in rates))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
