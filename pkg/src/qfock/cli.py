"""Command-line surface: configuration checks, experiment runs, reports.

Every run is deterministic for a fixed (configuration, seed) pair: each
experiment draws from its own seeded generator, so the report bodies of a
combined run match the bodies of individual runs exactly.  Reports are CSV
with a header row, fixed column order, 15-significant-digit numbers, and a
trailing summary block of key,value lines introduced by a '# summary'
marker; every summary carries the configuration hash.  Files appear via
write-then-rename, so a failed run never leaves a partial report.

Exit codes: 0 success, 1 configuration or precondition failure, 2 invariant
or assertion failure, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from importlib import metadata

import numpy as np
import scipy
import yaml

from .config import RunConfig, config_hash, load_config
from .errors import BuildError, ConfigError, CutoffError, InvariantError
from .linalg import gram_inner, max_abs, to_float
from .modular import ModularData, kms_residual, modular_flow
from .moments import MomentSpec, moment_matrix, moment_pairings
from .multipliers import (
    ContractionFamily,
    amplified_norm_estimate,
    net_element,
    net_majorant,
    net_pointwise_defect,
)
from .ultra import convergence_experiment
from .wick import from_vector

__all__ = ["main"]

EXPERIMENT_ORDER = ("fock", "moments", "modular", "multipliers", "ultra")

# floor for the level deformation spectrum, matching the documented
# positivity tolerance of the truncated model
POSITIVITY_FLOOR = -1e-8


def _fmt(value) -> str:
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "%.15g" % float(value)
    return str(value)


def _write_text(path: str, text: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as handle:
        handle.write(text)
    os.replace(tmp, path)


def _write_report(path: str, columns, rows, summary) -> None:
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(_fmt(row[c]) for c in columns))
    lines.append("# summary")
    for key, value in summary:
        lines.append(f"{key},{_fmt(value)}")
    _write_text(path, "\n".join(lines) + "\n")


def _experiment_rng(config: RunConfig, name: str) -> np.random.Generator:
    # one stream per experiment, independent of which subset runs
    return np.random.default_rng([config.seed, EXPERIMENT_ORDER.index(name)])


def _random_word(fock, rng, level: int):
    dim = fock.level_dim(level)
    coords = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return from_vector(fock, coords, level)


def _run_fock(config, fock, rng, scale):
    rows = []
    worst_braid = 0.0
    floor_eig = float("inf")
    for n in range(fock.n_max + 1):
        eig = float(fock.min_p_eigenvalue(n))
        braid = 0.0
        for i in range(n - 2):
            ti = to_float(fock.t_amplified(i, n))
            tj = to_float(fock.t_amplified(i + 1, n))
            braid = max(braid, float(max_abs(ti.dot(tj).dot(ti) - tj.dot(ti).dot(tj))))
        if eig < POSITIVITY_FLOOR:
            raise InvariantError(
                "level deformation positivity",
                replay={
                    "space": config.data["space"],
                    "n_max": config.n_max,
                    "level": n,
                    "min_eigenvalue": eig,
                },
            )
        floor_eig = min(floor_eig, eig)
        worst_braid = max(worst_braid, braid)
        rows.append(
            {
                "level": n,
                "dim": fock.level_dim(n),
                "min_p_eigenvalue": eig,
                "braid_residual": braid,
            }
        )
    columns = ["level", "dim", "min_p_eigenvalue", "braid_residual"]
    summary = [("min_p_eigenvalue", floor_eig), ("max_braid_residual", worst_braid)]
    return columns, rows, summary


def _run_moments(config, fock, rng, scale):
    setup = fock.setup
    tol = config.tolerance("moments", scale)
    rows = []
    worst = 0.0
    for i, word in enumerate(config.experiment("moments")["words"]):
        vectors = [np.asarray(v) for v in word["vectors"]]
        labels = tuple(word["labels"]) if "labels" in word else None
        spec = MomentSpec.build(setup, vectors, labels)
        pairing = complex(moment_pairings(spec, setup.deformation, setup))
        matrix = complex(moment_matrix(spec, fock))
        diff = abs(pairing - matrix)
        if diff > tol:
            raise InvariantError(
                "moment dual-path agreement",
                replay={
                    "space": config.data["space"],
                    "n_max": config.n_max,
                    "word": word,
                    "difference": diff,
                    "tolerance": tol,
                },
            )
        worst = max(worst, diff)
        rows.append(
            {
                "word": i,
                "length": spec.l,
                "pairing_re": pairing.real,
                "pairing_im": pairing.imag,
                "matrix_re": matrix.real,
                "matrix_im": matrix.imag,
                "abs_diff": diff,
            }
        )
    columns = [
        "word",
        "length",
        "pairing_re",
        "pairing_im",
        "matrix_re",
        "matrix_im",
        "abs_diff",
    ]
    return columns, rows, [("max_abs_diff", worst)]


def _run_modular(config, fock, rng, scale):
    modular = ModularData(fock)
    params = config.experiment("modular")
    rows = []
    worst = {}

    def push(check, parameter, residual, tol_key):
        tol = config.tolerance(tol_key, scale)
        if residual > tol:
            raise InvariantError(
                f"modular {check} identity",
                replay={
                    "space": config.data["space"],
                    "n_max": config.n_max,
                    "seed": config.seed,
                    "check": check,
                    "parameter": parameter,
                    "residual": residual,
                    "tolerance": tol,
                },
            )
        worst[check] = max(worst.get(check, 0.0), residual)
        rows.append({"check": check, "parameter": parameter, "residual": residual})

    for n in range(fock.n_max + 1):
        lhs = to_float(modular.reversal(n))
        rhs = modular.j_matrix(n).dot(np.conj(modular.delta_power(0.5, n)))
        push("decomposition", n, float(max_abs(lhs - rhs)), "modular_decomposition")

    kms_cap = fock.n_max // 2
    if kms_cap >= 1:
        for p in range(params["pairs"]):
            x = _random_word(fock, rng, int(rng.integers(1, kms_cap + 1)))
            y = _random_word(fock, rng, int(rng.integers(1, kms_cap + 1)))
            push("exchange", p, float(kms_residual(fock, x, y)), "modular_exchange")

    for t in params["times"]:
        word = _random_word(fock, rng, 1)
        flowed = modular_flow(fock, t, word)
        u = modular.fock_unitary(-t)
        u_inv = modular.fock_unitary(t)
        conj = u.dot(to_float(word.operator)).dot(u_inv)
        push("flow", t, float(max_abs(flowed.operator - conj)), "modular_flow")

    columns = ["check", "parameter", "residual"]
    summary = [(f"max_{check}_residual", value) for check, value in sorted(worst.items())]
    return columns, rows, summary


def _run_multipliers(config, fock, rng, scale):
    setup = fock.setup
    params = config.experiment("multipliers")
    family = ContractionFamily(setup)
    full = family.size - 1
    level = params["word_level"]
    coords = np.zeros(fock.level_dim(level), dtype=complex)
    coords[0] = 1.0
    norm = float(np.sqrt(abs(gram_inner(coords, coords, fock.gram(level)))))
    word = from_vector(fock, coords / norm, level)
    floor = config.tolerance("net_defect_floor", scale)
    rows = []
    last = {}
    for j in range(1, params["steps"] + 1):
        t = 1.0 / j
        element = net_element(fock, family, fock.n_max, t, full)
        estimate = float(
            amplified_norm_estimate(
                fock, element.argument_matrix(), params["amplification"], seed=config.seed
            )
        )
        defect = float(net_pointwise_defect(element, word, surrogate=max(1.0, estimate)))
        if defect < -floor:
            raise InvariantError(
                "net defect nonnegativity",
                replay={
                    "space": config.data["space"],
                    "n_max": config.n_max,
                    "step": j,
                    "defect": defect,
                },
            )
        last = {"estimate": estimate, "defect": defect}
        rows.append(
            {
                "step": j,
                "time": t,
                "length_cut": fock.n_max,
                "rank_index": full,
                "amplification": params["amplification"],
                "estimate": estimate,
                "defect": defect,
                "majorant": net_majorant(fock.n_max, t),
            }
        )
    columns = [
        "step",
        "time",
        "length_cut",
        "rank_index",
        "amplification",
        "estimate",
        "defect",
        "majorant",
    ]
    summary = [("final_defect", last["defect"]), ("final_estimate", last["estimate"])]
    return columns, rows, summary


def _run_ultra(config, fock, rng, scale):
    setup = fock.setup
    params = config.experiment("ultra")
    report = convergence_experiment(
        setup, params["vectors"], params["q"], params["q_tilde"], params["m_list"]
    )
    columns = ["m", "value_re", "value_im", "target_re", "target_im", "abs_error"]
    slope = report.slope if report.slope is not None else float("nan")
    return columns, report.rows(), [("slope", slope)]


EXPERIMENTS = {
    "fock": _run_fock,
    "moments": _run_moments,
    "modular": _run_modular,
    "multipliers": _run_multipliers,
    "ultra": _run_ultra,
}


def _package_version() -> str:
    try:
        return metadata.version("qfock")
    except metadata.PackageNotFoundError:
        return "unknown"


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qfock",
        description="Mixed-deformation Fock laboratory: validate configs, run experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    check = sub.add_parser("validate", help="validate a configuration and echo it normalized")
    check.add_argument("--config", required=True, help="path to a YAML run configuration")
    run = sub.add_parser("run", help="run experiments and write CSV reports")
    run.add_argument(
        "experiment",
        choices=EXPERIMENT_ORDER + ("all",),
        help="which experiment to run",
    )
    run.add_argument("--config", required=True, help="path to a YAML run configuration")
    run.add_argument("--seed", type=int, default=None, help="override the configured seed")
    run.add_argument("--out", default=None, help="override the configured output directory")
    run.add_argument(
        "--tolerance-scale",
        type=float,
        default=1.0,
        help="multiply every tolerance by this factor",
    )
    return parser


def _do_validate(args) -> int:
    config = load_config(args.config)
    print("valid")
    print(yaml.safe_dump(config.data, sort_keys=True).rstrip())
    return 0


def _do_run(args) -> int:
    config = load_config(args.config)
    if args.tolerance_scale is not None and not args.tolerance_scale > 0:
        raise ConfigError(f"tolerance scale must be positive, got {args.tolerance_scale}")
    data = dict(config.data)
    if args.seed is not None:
        if args.seed < 0:
            raise ConfigError(f"seed must be nonnegative, got {args.seed}")
        data["seed"] = args.seed
    if args.out is not None:
        data["output_dir"] = args.out
    config = RunConfig(data)
    digest = config_hash(config)

    started = time.perf_counter()
    os.makedirs(config.output_dir, exist_ok=True)
    fock = config.fock()
    names = EXPERIMENT_ORDER if args.experiment == "all" else (args.experiment,)
    written = {}
    for name in names:
        columns, rows, summary = EXPERIMENTS[name](
            config, fock, _experiment_rng(config, name), args.tolerance_scale
        )
        summary = list(summary) + [("config_hash", digest)]
        path = os.path.join(config.output_dir, f"{name}.csv")
        _write_report(path, columns, rows, summary)
        written[name] = os.path.basename(path)
        print(f"wrote {path}")

    manifest = {
        "config_hash": digest,
        "seed": config.seed,
        "tolerance_scale": args.tolerance_scale,
        "reports": written,
        "versions": {
            "python": ".".join(str(x) for x in sys.version_info[:3]),
            "qfock": _package_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
        "wall_time_seconds": round(time.perf_counter() - started, 6),
    }
    path = os.path.join(config.output_dir, "manifest.json")
    _write_text(path, json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    print(f"wrote {path}")
    return 0


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "validate":
            return _do_validate(args)
        return _do_run(args)
    except ConfigError as err:
        print("invalid configuration:", file=sys.stderr)
        for item in err.violations:
            print(f"  - {item}", file=sys.stderr)
        return 1
    except BuildError as err:
        print("precondition failure:", file=sys.stderr)
        for item in err.violations:
            print(f"  - {item}", file=sys.stderr)
        return 1
    except CutoffError as err:
        print(f"cutoff exceeded: {err}", file=sys.stderr)
        return 1
    except InvariantError as err:
        print(f"invariant violated: {err.invariant}", file=sys.stderr)
        print("replay: " + json.dumps(err.replay, sort_keys=True, default=str), file=sys.stderr)
        return 2
    except AssertionError as err:
        print(f"assertion failure: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"i/o failure: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
