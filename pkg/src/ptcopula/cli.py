"""Batch command line front end.

Usage::

    ptcopula SUBCOMMAND --config run.yaml [--seed N] [--output PATH] [--input PATH] [--quiet]

Subcommands: ``simulate``, ``pt``, ``empirical-pt``, ``functional``,
``verify`` and ``quantile``. The configuration file is YAML; see the
``configs/`` directory of the source tree for a complete example of each.

Exit codes: 0 success, 1 failed check, 2 usage or configuration error,
3 data error.
"""
import argparse
import csv
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
import yaml
from scipy import stats

from . import verification as vf
from .copulas import make_copula
from .dnorm import DNorm, tail_copula, tail_copula_via_inclusion_exclusion
from .empirical import empirical_pt_sample, empirical_threshold, standardized_ranks
from .errors import ConfigurationError, IngestionError, PTError
from .functional import (
    ComonotoneCopulaProcess,
    FunctionalPTConfig,
    GaussianCopulaProcess,
    GPCopulaProcess,
    functional_pt_sample,
    sample_gpcp,
    sample_gpp,
)
from .generators import (
    coin_atoms,
    constant_atoms,
    hat_basis,
    linear_basis,
    make_basis_generator_process,
    make_bernoulli_mixture_generator,
    make_constant_generator,
    make_scaled_copula_generator,
    make_unit_vector_generator,
    uniform_atoms,
    uniform_grid,
)
from .gpd_copula import GpdCopulaModel, sample_gpd_copula
from .pt import PTConfig, inject_margins, pt_sample, thinned_dnorm
from .rng import stream
from .univariate import UnivariatePT, fit_gpd_tail, gpd_ppf, high_quantile

log = logging.getLogger("ptcopula")

SUBCOMMANDS = ("simulate", "pt", "empirical-pt", "functional", "verify", "quantile")

# Fixed task indices: appending new checks never changes the streams of old ones.
CHECK_ORDER = (
    "margins",
    "upper_tail",
    "lower_region",
    "tail_copula",
    "pot_conditional",
    "gpp_lower_tail",
    "functional_tail",
    "functional_margins",
)

EXIT_OK, EXIT_CHECK_FAILED, EXIT_CONFIG, EXIT_DATA = 0, 1, 2, 3


@dataclass
class RunConfig:
    subcommand: str
    seed: int
    output: Optional[str] = None
    input: Optional[str] = None
    model: dict = field(default_factory=dict)


def load_config(path, subcommand, seed=None, output=None, input_path=None):
    """Read a YAML run configuration; command line values take precedence."""
    path = Path(path)
    if not path.is_file():
        raise ConfigurationError(f"config file {path} does not exist", code="missing-file")
    try:
        doc = yaml.safe_load(path.read_text()) or {}
    except yaml.YAMLError as exc:
        raise ConfigurationError(f"cannot parse {path}: {exc}", code="config-syntax") from exc
    if not isinstance(doc, dict):
        raise ConfigurationError("config must be a mapping", code="config-syntax")
    doc = dict(doc)
    file_seed = doc.pop("seed", None)
    file_out = doc.pop("output", None)
    file_inp = doc.pop("input", None)
    seed = file_seed if seed is None else seed
    if seed is None:
        raise ConfigurationError("a seed is required (config key 'seed' or --seed)", code="missing-seed")
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise ConfigurationError(f"seed must be a nonnegative integer, got {seed!r}", code="bad-seed")
    # Paths written in the config resolve against its directory; command
    # line paths resolve against the working directory.
    out = output if output is not None else _resolve(path, file_out)
    inp = input_path if input_path is not None else _resolve(path, file_inp)
    pt_sec = doc.get("pt")
    if isinstance(pt_sec, dict) and pt_sec.get("margins_output") is not None:
        doc["pt"] = dict(pt_sec, margins_output=_resolve(path, pt_sec["margins_output"]))
    return RunConfig(subcommand, seed, None if out is None else str(out), None if inp is None else str(inp), doc)


def _resolve(config_path, value):
    if value is None:
        return None
    p = Path(value)
    return str(p if p.is_absolute() else config_path.parent / p)


def dump_config(cfg):
    """YAML text that :func:`load_config` reads back to an equal RunConfig."""
    doc = {"seed": cfg.seed}
    if cfg.output is not None:
        doc["output"] = cfg.output
    if cfg.input is not None:
        doc["input"] = cfg.input
    doc.update(cfg.model)
    return yaml.safe_dump(doc, sort_keys=True)


# -- input / output -----------------------------------------------------------------


def ingest_csv(path, header=False):
    """Read a numeric CSV into an ``(n, d)`` float array.

    Raises
    ------
    IngestionError
        For a missing or empty file, ragged rows or non-numeric cells; the
        message names the 1-based row and column.
    """
    path = Path(path)
    if not path.is_file():
        raise IngestionError(f"input file {path} does not exist", code="missing-file")
    with path.open(newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if header and rows:
        rows = rows[1:]
    if not rows:
        raise IngestionError(f"{path} contains no data rows", code="empty-file")
    width = len(rows[0])
    first = 2 if header else 1
    out = np.empty((len(rows), width))
    for i, r in enumerate(rows):
        if len(r) != width:
            raise IngestionError(
                f"row {i + first} has {len(r)} fields, expected {width}", row=i + first, code="ragged-row"
            )
        for j, cell in enumerate(r):
            try:
                out[i, j] = float(cell)
            except ValueError:
                raise IngestionError(
                    f"non-numeric cell {cell!r} at row {i + first}, column {j + 1}",
                    row=i + first,
                    col=j + 1,
                    code="non-numeric",
                ) from None
    if not np.isfinite(out).all():
        i, j = map(int, np.argwhere(~np.isfinite(out))[0])
        raise IngestionError(f"non-finite cell at row {i + first}, column {j + 1}", row=i + first, col=j + 1)
    log.info("read %d rows x %d columns from %s", out.shape[0], out.shape[1], path)
    return out


def write_csv(path, matrix, prefix="y"):
    matrix = np.atleast_2d(matrix)
    with open(path, "w", newline="") as fh:
        fh.write(",".join(f"{prefix}{j + 1}" for j in range(matrix.shape[1])) + "\n")
        np.savetxt(fh, matrix, fmt="%.17g", delimiter=",")


def write_json(path, doc):
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    Path(path).write_text(text)


def _require_output(cfg):
    if not cfg.output:
        raise ConfigurationError("no output path (config key 'output' or --output)", code="missing-output")
    return cfg.output


# -- model builders -------------------------------------------------------------------


def _section(doc, key, required=True):
    sec = doc.get(key)
    if sec is None:
        if required:
            raise ConfigurationError(f"config section '{key}' is missing", code="missing-section")
        return {}
    if not isinstance(sec, dict):
        raise ConfigurationError(f"config section '{key}' must be a mapping", code="config-syntax")
    return sec


def build_generator(sec):
    family = sec.get("family", "constant")
    if family == "constant":
        return make_constant_generator(int(sec["dim"]))
    if family == "unit_vector":
        return make_unit_vector_generator(int(sec["dim"]))
    if family == "scaled_copula":
        cop = dict(_section(sec, "copula"))
        cop.setdefault("dim", sec.get("dim"))
        return make_scaled_copula_generator(build_copula(cop))
    if family == "bernoulli_mixture":
        return make_bernoulli_mixture_generator(sec["patterns"], sec["weights"])
    raise ConfigurationError(f"unknown generator family {family!r}", code="unknown-family")


def build_copula(sec, gen=None, gpd_sec=None):
    sec = dict(sec)
    family = sec.pop("family", "independence")
    if family == "gpd":
        g = build_generator(sec["generator"]) if "generator" in sec else gen
        if g is None:
            raise ConfigurationError("gpd copula needs a generator", code="missing-section")
        M = sec.get("M", (gpd_sec or {}).get("M"))
        return GpdCopulaModel(g, M)
    dim = sec.pop("dim", None if gen is None else gen.dim)
    if dim is None:
        raise ConfigurationError("copula section needs 'dim'", code="missing-key")
    return make_copula(family, int(dim), **sec)


def build_gpd(doc):
    gen = build_generator(_section(doc, "generator"))
    return GpdCopulaModel(gen, _section(doc, "gpd", required=False).get("M"))


def build_margin(spec):
    family = spec.get("family")
    if family == "gpd":
        g, mu, s = float(spec["gamma"]), float(spec.get("mu", 0.0)), float(spec["sigma"])
        return lambda p: gpd_ppf(p, g, mu, s)
    if family == "scipy":
        params = {k: v for k, v in spec.items() if k not in ("family", "name")}
        return getattr(stats, spec["name"])(**params).ppf
    if family == "identity":
        return lambda p: p
    raise ConfigurationError(f"unknown margin family {family!r}", code="unknown-family")


def build_gen_process(sec, grid):
    basis_sec = sec.get("basis", {"kind": "hat", "n_basis": 5})
    kind = basis_sec.get("kind", "hat")
    if kind == "hat":
        basis = hat_basis(int(basis_sec.get("n_basis", 5)), grid)
    elif kind == "linear":
        basis = linear_basis(grid)
    elif kind == "constant":
        basis = np.ones((1, grid.size))
    else:
        raise ConfigurationError(f"unknown basis kind {kind!r}", code="unknown-family")
    atoms = {"constant": constant_atoms, "coin": coin_atoms, "uniform": uniform_atoms}
    name = sec.get("atoms", "coin")
    if name not in atoms:
        raise ConfigurationError(f"unknown atom family {name!r}", code="unknown-family")
    return make_basis_generator_process(basis, atoms[name](), grid)


def build_copula_process(sec, grid, gen_process, M):
    family = sec.get("family", "gaussian")
    if family == "gaussian":
        return GaussianCopulaProcess(grid, float(sec.get("length_scale", 0.2)))
    if family == "comonotone":
        return ComonotoneCopulaProcess(grid)
    if family == "gpcp":
        return GPCopulaProcess(gen_process, sec.get("M", M))
    raise ConfigurationError(f"unknown copula process {family!r}", code="unknown-family")


def build_functional(doc):
    sec = _section(doc, "functional")
    grid = uniform_grid(int(sec.get("m", 50)))
    gp = build_gen_process(sec, grid)
    M = sec.get("M")
    cp = build_copula_process(sec.get("copula_process", {}), grid, gp, M)
    return sec, FunctionalPTConfig(cp, gp, float(sec.get("u", 0.5)), M)


def build_pt(doc):
    sec = _section(doc, "pt")
    gpd = build_gpd(doc)
    copula = build_copula(_section(doc, "copula"), gpd.gen, doc.get("gpd"))
    return sec, PTConfig(tuple(sec["threshold"]), copula, gpd, int(sec.get("n", 10_000)))


# -- subcommands ----------------------------------------------------------------------


def cmd_simulate(cfg):
    gpd = build_gpd(cfg.model)
    n = int(_section(cfg.model, "simulate", required=False).get("n", 10_000))
    write_csv(_require_output(cfg), sample_gpd_copula(gpd, stream(cfg.seed, 0), n))
    return EXIT_OK


def cmd_pt(cfg):
    sec, pt = build_pt(cfg.model)
    Y = pt_sample(pt, stream(cfg.seed, 0))
    write_csv(_require_output(cfg), Y)
    margins = sec.get("margins")
    if margins:
        target = sec.get("margins_output")
        if not target:
            raise ConfigurationError("'margins' given without 'margins_output'", code="missing-output")
        write_csv(target, inject_margins(Y, [build_margin(m) for m in margins]), prefix="x")
    return EXIT_OK


def cmd_empirical_pt(cfg):
    sec = _section(cfg.model, "empirical_pt")
    if not cfg.input:
        raise ConfigurationError("empirical-pt needs an input CSV (config 'input' or --input)", code="missing-input")
    data = ingest_csv(cfg.input, header=bool(sec.get("header", False)))
    ranks = standardized_ranks(data)
    gen_sec = dict(_section(cfg.model, "generator"))
    gen_sec.setdefault("dim", ranks.dim)
    gpd = GpdCopulaModel(build_generator(gen_sec), _section(cfg.model, "gpd", required=False).get("M"))
    u = sec["threshold"]
    Y = empirical_pt_sample(ranks, gpd, u, stream(cfg.seed, 0), int(sec.get("n", 10_000)))
    write_csv(_require_output(cfg), Y)
    log.info("u* = %s", empirical_threshold(ranks, u).tolist())
    return EXIT_OK


def cmd_functional(cfg):
    sec, fcfg = build_functional(cfg.model)
    n = int(sec.get("n", 100))
    kind = sec.get("output_kind", "pt")
    rng = stream(cfg.seed, 0)
    if kind == "pt":
        paths = functional_pt_sample(fcfg, rng, n)
    elif kind == "gpp":
        paths = sample_gpp(fcfg.gen_process, fcfg.M, rng, n)
    elif kind == "gpcp":
        paths = sample_gpcp(fcfg.gen_process, fcfg.M, rng, n)
    else:
        raise ConfigurationError(f"unknown output_kind {kind!r}", code="unknown-family")
    paths.to_csv(_require_output(cfg))
    return EXIT_OK


def _grid_points(lo, hi, k, d):
    axis = np.linspace(lo, hi, k)
    if d <= 3:
        return np.array(np.meshgrid(*([axis] * d), indexing="ij")).reshape(d, -1).T
    return np.repeat(axis[:, None], d, axis=1)


def run_checks(doc, seed):
    """Run the configured verification checks; returns a list of reports."""
    sec = _section(doc, "verify", required=False)
    n = int(sec.get("n", 100_000))
    n_norm = int(sec.get("n_norm", n))
    reports = []
    has_pt = "pt" in doc
    checks = sec.get("checks")
    if checks is None:
        checks = ["margins", "upper_tail", "lower_region", "tail_copula", "pot_conditional"] if has_pt else []
        if "functional" in doc:
            checks += ["gpp_lower_tail", "functional_tail", "functional_margins"]
    unknown = set(checks) - set(CHECK_ORDER)
    if unknown:
        raise ConfigurationError(f"unknown checks {sorted(unknown)}", code="unknown-check")

    if any(c in checks for c in CHECK_ORDER[:5]):
        _, pt = build_pt(doc)
        u = pt.threshold
        d = pt.dim
        gen = pt.gpd.gen
    for name in CHECK_ORDER:
        if name not in checks:
            continue
        task = CHECK_ORDER.index(name)
        task_seed = int(np.random.SeedSequence(seed, spawn_key=(task,)).generate_state(1)[0])
        if name == "margins":
            Y = pt_sample(pt, stream(seed, task), n)
            reports += vf.margin_uniformity(Y, name="pt_margin", seed=task_seed)
        elif name == "upper_tail":
            Y = pt_sample(pt, stream(seed, task, 0), n)
            lo = max(float(np.max(pt.exact_region())), float(sec.get("upper_lo", 0.9)))
            xs = _grid_points(lo, float(sec.get("upper_hi", 0.99)), int(sec.get("grid_k", 5)), d)

            def ev(off, rng):
                return thinned_dnorm(gen, pt.copula, u, off, n_norm, rng)

            reports.append(vf.upper_tail_agreement(Y, ev, xs, pt.exact_region(), seed=task_seed))
        elif name == "lower_region":
            if not pt.copula.has_cdf():
                log.warning("skipping lower_region: copula has no closed-form CDF")
                continue
            lo = 0.1
            if isinstance(pt.copula, GpdCopulaModel):
                # Its CDF is only known in closed form above 1 + K.
                lo = max(lo, float(pt.copula.lower_corner))
            if lo >= float(np.min(u)):
                log.warning("skipping lower_region: no grid point below u with a known copula CDF")
                continue
            Y = pt_sample(pt, stream(seed, task), n)
            xs = _grid_points(lo, float(np.min(u)), int(sec.get("grid_k", 5)), d)
            reports.append(vf.lower_region_agreement(Y, pt.copula.cdf, xs, seed=task_seed))
        elif name == "tail_copula":
            x = -np.ones(d)
            mc = tail_copula(gen, x, n_norm, stream(seed, task, 0))
            ie = tail_copula_via_inclusion_exclusion(DNorm.from_generator(gen, n_norm), x, stream(seed, task, 1))
            se = float(np.hypot(mc.std_error, ie.std_error))
            diff = abs(mc.value - ie.value)
            ok = diff <= vf.N_SE * se or diff == 0.0
            reports.append(vf.CheckReport("tail_copula", diff, vf.N_SE * se, bool(ok), n_norm, task_seed,
                                          {"monte_carlo": mc.value, "inclusion_exclusion": ie.value}))
        elif name == "pot_conditional":
            exact = isinstance(pt.copula, GpdCopulaModel)
            lo = max(float(np.max(1.0 + pt.gpd.K)), 0.9)
            vs = np.repeat(np.linspace(lo, 0.98, 3)[:, None], d, axis=1)
            reports.append(vf.pot_conditional_agreement(pt.copula, gen, u, vs, n, task_seed, exact, pt.gpd.M))
        elif name in ("gpp_lower_tail", "functional_tail", "functional_margins"):
            fsec, fcfg = build_functional(doc)
            grid = fcfg.grid
            bound = fcfg.tail_bound()
            fs = np.vstack([np.full(grid.size, -0.8 * bound), -0.8 * bound * (1 - np.abs(2 * grid - 1))])
            if name == "gpp_lower_tail":
                reports.append(vf.gpp_lower_tail_agreement(fcfg.gen_process, fcfg.M, fs, n, task_seed, n_norm))
            elif name == "functional_tail":
                reports.append(vf.functional_tail_agreement(fcfg, fs, n, task_seed, n_norm))
            else:
                Y = functional_pt_sample(fcfg, stream(seed, task), n)
                cols = np.linspace(0, grid.size - 1, 5).astype(int)
                reports += vf.margin_uniformity(Y.paths[:, cols], name="functional_margin", seed=task_seed)
    return reports


def cmd_verify(cfg):
    reports = run_checks(cfg.model, cfg.seed)
    if not reports:
        raise ConfigurationError("no checks selected", code="no-checks")
    Path(_require_output(cfg)).write_text(vf.reports_to_json(reports))
    for r in reports:
        log.info(r.line())
    return EXIT_OK if all(r.passed for r in reports) else EXIT_CHECK_FAILED


def cmd_quantile(cfg):
    sec = _section(cfg.model, "quantile")
    if not cfg.input:
        raise ConfigurationError("quantile needs an input CSV (config 'input' or --input)", code="missing-input")
    data = ingest_csv(cfg.input, header=bool(sec.get("header", False)))
    col = int(sec.get("column", 0))
    if not 0 <= col < data.shape[1]:
        raise ConfigurationError(f"column {col} out of range", code="bad-column")
    x0 = float(sec["x0"])
    pt = UnivariatePT.from_data(data[:, col], x0, int(sec.get("min_exceedances", 30)))
    levels = [float(p) for p in sec.get("levels", [0.99])]
    quantiles = {repr(p): float(high_quantile(pt, p)) for p in levels}
    fit = fit_gpd_tail(data[:, col], x0, int(sec.get("min_exceedances", 30)))
    doc = {
        "gamma": pt.gamma,
        "mu": pt.mu,
        "sigma": pt.sigma,
        "method": fit.method,
        "n_exceedances": fit.n_exceedances,
        "F_x0": pt.F0,
        "quantiles": quantiles,
    }
    write_json(_require_output(cfg), doc)
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "pt": cmd_pt,
    "empirical-pt": cmd_empirical_pt,
    "functional": cmd_functional,
    "verify": cmd_verify,
    "quantile": cmd_quantile,
}


def run(cfg):
    """Execute a :class:`RunConfig`; returns the process exit status."""
    try:
        return COMMANDS[cfg.subcommand](cfg)
    except PTError as exc:
        print(f"error[{exc.code}]: {exc}", file=sys.stderr)
        return exc.exit_status
    except (KeyError, TypeError) as exc:
        print(f"error[config]: missing or malformed config value: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error[io]: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def build_parser():
    parser = argparse.ArgumentParser(prog="ptcopula", description=__doc__.split("\n\n")[0])
    parser.add_argument("subcommand", choices=SUBCOMMANDS)
    parser.add_argument("--config", required=True, help="YAML run configuration")
    parser.add_argument("--seed", type=int, help="override the config seed")
    parser.add_argument("--output", help="override the output path")
    parser.add_argument("--input", help="override the input CSV path")
    parser.add_argument("--quiet", action="store_true", help="suppress progress messages")
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, format="%(message)s")
    try:
        cfg = load_config(args.config, args.subcommand, args.seed, args.output, args.input)
    except PTError as exc:
        print(f"error[{exc.code}]: {exc}", file=sys.stderr)
        return exc.exit_status
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
