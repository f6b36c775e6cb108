"""Run configuration: schema, validation, normalization, and hashing.

A run is described by a plain UTF-8 key/value tree (YAML).  Validation
checks every module precondition it can see arithmetically and raises one
consolidated ConfigError listing all violations.  Normalization fills
every default, so the echoed configuration is complete and its canonical
JSON serialization is a stable input for the run hash.

Configuration files carry plain floats and ints only; exact-arithmetic
spaces (Fraction entries) are a library feature, not reachable from here.
"""

from __future__ import annotations

import hashlib
import json
import numbers
from dataclasses import dataclass

import yaml

from .errors import ConfigError
from .fock import MAX_LEVEL, MAX_LEVEL_DIM, TruncatedFock
from .hilbert import MAX_DIM, DeformationMatrix, build_space
from .moments import MAX_COMBINATORIAL_LENGTH
from .multipliers import MAX_AMPLIFICATION
from .ultra import MAX_AUX_DIM, MAX_UM_LENGTH

__all__ = [
    "DEFAULT_SEED",
    "DEFAULT_TOLERANCES",
    "SIZE_BUDGET",
    "RunConfig",
    "config_hash",
    "load_config",
    "normalize_config",
]

SIZE_BUDGET = 4096
DEFAULT_SEED = 20240817

DEFAULT_TOLERANCES = {
    "moments": 1e-9,
    "modular_exchange": 1e-10,
    "modular_flow": 1e-11,
    "modular_decomposition": 1e-11,
    "net_defect_floor": 1e-9,
}

_TOP_KEYS = {"space", "fock", "seed", "output_dir", "tolerances", "experiments"}
_EXPERIMENT_KEYS = {"moments", "modular", "multipliers", "ultra"}


def _is_real(x) -> bool:
    return isinstance(x, numbers.Real) and not isinstance(x, bool)


def _is_int(x) -> bool:
    return isinstance(x, numbers.Integral) and not isinstance(x, bool)


@dataclass(frozen=True, eq=False)
class RunConfig:
    """A fully normalized run description."""

    data: dict

    @property
    def seed(self) -> int:
        return self.data["seed"]

    @property
    def n_max(self) -> int:
        return self.data["fock"]["n_max"]

    @property
    def output_dir(self) -> str:
        return self.data["output_dir"]

    @property
    def dim(self) -> int:
        return sum(2 if b["kind"] == "rotation" else 1 for b in self.data["space"]["blocks"])

    def tolerance(self, key: str, scale: float = 1.0) -> float:
        return self.data["tolerances"][key] * scale

    def experiment(self, name: str) -> dict:
        return self.data["experiments"][name]

    def block_descriptors(self) -> list:
        out = []
        for block in self.data["space"]["blocks"]:
            if block["kind"] == "rotation":
                out.append(("rotation", block["label"], block["lam"]))
            else:
                out.append(("fixed", block["label"]))
        return out

    def setup(self):
        deformation = DeformationMatrix.build(
            self.data["space"]["q"], self.data["space"]["split_scale"]
        )
        return build_space(deformation, self.block_descriptors())

    def fock(self) -> TruncatedFock:
        return TruncatedFock(self.setup(), n_max=self.n_max)


def config_hash(config: RunConfig) -> str:
    """Hash of the experiment-defining part of the configuration.

    The output directory is excluded: rerunning the same experiment into
    a different folder is the same run.
    """
    payload = {k: v for k, v in config.data.items() if k != "output_dir"}
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def load_config(path: str) -> RunConfig:
    """Read, parse, and normalize a configuration file.

    I/O failures propagate as OSError; parse failures carry the line and
    column of the offending construct.
    """
    with open(path, "r", encoding="utf-8") as handle:
        text = handle.read()
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as err:
        mark = getattr(err, "problem_mark", None)
        where = f" at line {mark.line + 1}, column {mark.column + 1}" if mark else ""
        raise ConfigError(f"configuration parse error{where}: {err}") from err
    return normalize_config(raw)


def _block_spans(blocks) -> list:
    spans, start = [], 0
    for block in blocks:
        width = 2 if block["kind"] == "rotation" else 1
        spans.append((start, start + width))
        start += width
    return spans


def _normalize_space(raw, violations):
    if raw is None:
        violations.append("space: section is required")
        return None
    if not isinstance(raw, dict):
        violations.append("space: must be a mapping")
        return None
    for key in raw:
        if key not in {"blocks", "q", "split_scale"}:
            violations.append(f"space.{key}: unknown key")

    blocks_raw = raw.get("blocks")
    blocks = []
    if not isinstance(blocks_raw, list) or not blocks_raw:
        violations.append("space.blocks: need a nonempty list")
        blocks_raw = []
    for pos, entry in enumerate(blocks_raw):
        if isinstance(entry, str):
            entry = {"kind": entry}
        if not isinstance(entry, dict):
            violations.append(f"space.blocks[{pos}]: must be a mapping or kind name")
            continue
        kind = entry.get("kind")
        if kind not in ("fixed", "rotation"):
            violations.append(
                f"space.blocks[{pos}].kind: expected 'fixed' or 'rotation', got {kind!r}"
            )
            continue
        for key in entry:
            if key not in {"kind", "label", "lam"}:
                violations.append(f"space.blocks[{pos}].{key}: unknown key")
        label = entry.get("label", pos)
        if not (_is_int(label) and label >= 0):
            violations.append(f"space.blocks[{pos}].label: must be a nonnegative integer")
            continue
        block = {"kind": kind, "label": int(label)}
        if kind == "rotation":
            lam = entry.get("lam", 1.0)
            if not (_is_real(lam) and lam >= 1):
                violations.append(f"space.blocks[{pos}].lam: must be a real number >= 1")
                continue
            block["lam"] = float(lam)
        elif "lam" in entry:
            violations.append(f"space.blocks[{pos}]: fixed blocks take no lam")
            continue
        blocks.append(block)

    q_raw = raw.get("q")
    n_labels = max((b["label"] for b in blocks), default=-1) + 1
    q = []
    q_ok = isinstance(q_raw, list) and q_raw and all(isinstance(r, list) for r in q_raw)
    if not q_ok:
        violations.append("space.q: need a square matrix as a list of rows")
    else:
        size = len(q_raw)
        if any(len(r) != size for r in q_raw):
            violations.append("space.q: rows must all have the matrix size")
            q_ok = False
        elif not all(_is_real(x) for r in q_raw for x in r):
            violations.append("space.q: entries must be real numbers")
            q_ok = False
        else:
            q = [[float(x) for x in r] for r in q_raw]
            if blocks and size != n_labels:
                violations.append(
                    f"space.q: size {size} does not match the {n_labels} block labels"
                )
            if any(q[i][j] != q[j][i] for i in range(size) for j in range(size)):
                violations.append("space.q: must be symmetric")
            if any(abs(x) >= 1 for r in q for x in r):
                violations.append("space.q: max|q_ij| < 1 is required")

    split = raw.get("split_scale")
    if split is not None:
        if not _is_real(split):
            violations.append("space.split_scale: must be a real number")
            split = None
        else:
            split = float(split)
            peak = max((abs(x) for r in q for x in r), default=0.0)
            if not peak < split < 1:
                violations.append(
                    f"space.split_scale: need max|q_ij| = {peak:g} < scale < 1, got {split:g}"
                )

    return {"blocks": blocks, "q": q, "split_scale": split}


def _normalize_vectors(field, entries, dim, spans, violations):
    """Real d-vectors, each supported inside a single block."""
    out = []
    if not isinstance(entries, list) or not entries:
        violations.append(f"{field}: need a nonempty list of vectors")
        return out
    for j, vec in enumerate(entries):
        if not (isinstance(vec, list) and len(vec) == dim and all(_is_real(x) for x in vec)):
            violations.append(f"{field}[{j}]: need a real vector of length {dim}")
            continue
        vec = [float(x) for x in vec]
        touched = [
            k for k, (a, b) in enumerate(spans) if any(x != 0.0 for x in vec[a:b])
        ]
        if not touched:
            violations.append(f"{field}[{j}]: zero vector")
        elif len(touched) > 1:
            violations.append(
                f"{field}[{j}]: support spans blocks {touched}; split it into single-block legs"
            )
        out.append(vec)
    return out


def _basis_vector(dim: int) -> list:
    return [1.0] + [0.0] * (dim - 1)


def _normalize_moments(raw, dim, spans, n_labels, n_max, violations):
    raw = {} if raw is None else raw
    if not isinstance(raw, dict):
        violations.append("experiments.moments: must be a mapping")
        return {"words": []}
    for key in raw:
        if key != "words":
            violations.append(f"experiments.moments.{key}: unknown key")
    length_cap = min(MAX_COMBINATORIAL_LENGTH, 2 * n_max)
    words_raw = raw.get("words")
    if words_raw is None:
        words_raw = [
            {"vectors": [_basis_vector(dim) for _ in range(l)]}
            for l in (2, 4)
            if l <= length_cap
        ]
    if not isinstance(words_raw, list) or not words_raw:
        violations.append("experiments.moments.words: need a nonempty list")
        return {"words": []}
    words = []
    for i, word in enumerate(words_raw):
        field = f"experiments.moments.words[{i}]"
        if not isinstance(word, dict):
            violations.append(f"{field}: must be a mapping")
            continue
        for key in word:
            if key not in {"vectors", "labels"}:
                violations.append(f"{field}.{key}: unknown key")
        vectors = _normalize_vectors(f"{field}.vectors", word.get("vectors"), dim, spans, violations)
        if len(vectors) > MAX_COMBINATORIAL_LENGTH:
            violations.append(
                f"{field}: word length {len(vectors)} beyond the pairing cap"
                f" {MAX_COMBINATORIAL_LENGTH}"
            )
        elif len(vectors) > 2 * n_max:
            violations.append(
                f"{field}: word length {len(vectors)} needs level {(len(vectors) + 1) // 2},"
                f" beyond cutoff n_max = {n_max}"
            )
        entry = {"vectors": vectors}
        labels = word.get("labels")
        if labels is not None:
            if not (
                isinstance(labels, list)
                and len(labels) == len(vectors)
                and all(_is_int(x) and 0 <= x < n_labels for x in labels)
            ):
                violations.append(
                    f"{field}.labels: need {len(vectors)} block labels in [0, {n_labels})"
                )
            else:
                entry["labels"] = [int(x) for x in labels]
        words.append(entry)
    return {"words": words}


def _normalize_modular(raw, violations):
    raw = {} if raw is None else raw
    if not isinstance(raw, dict):
        violations.append("experiments.modular: must be a mapping")
        return {"times": [0.3, 1.0], "pairs": 5}
    for key in raw:
        if key not in {"times", "pairs"}:
            violations.append(f"experiments.modular.{key}: unknown key")
    times = raw.get("times", [0.3, 1.0])
    if not (isinstance(times, list) and times and all(_is_real(t) for t in times)):
        violations.append("experiments.modular.times: need a nonempty list of real times")
        times = [0.3, 1.0]
    pairs = raw.get("pairs", 5)
    if not (_is_int(pairs) and pairs >= 1):
        violations.append("experiments.modular.pairs: need a positive integer")
        pairs = 5
    return {"times": [float(t) for t in times], "pairs": int(pairs)}


def _normalize_multipliers(raw, n_max, violations):
    raw = {} if raw is None else raw
    out = {"steps": 20, "amplification": 2, "word_level": 1}
    if not isinstance(raw, dict):
        violations.append("experiments.multipliers: must be a mapping")
        return out
    for key in raw:
        if key not in out:
            violations.append(f"experiments.multipliers.{key}: unknown key")
    steps = raw.get("steps", out["steps"])
    if not (_is_int(steps) and steps >= 1):
        violations.append("experiments.multipliers.steps: need a positive integer")
    else:
        out["steps"] = int(steps)
    amp = raw.get("amplification", out["amplification"])
    if not (_is_int(amp) and 1 <= amp <= MAX_AMPLIFICATION):
        violations.append(
            f"experiments.multipliers.amplification: need an integer in [1, {MAX_AMPLIFICATION}]"
        )
    else:
        out["amplification"] = int(amp)
    level = raw.get("word_level", out["word_level"])
    if not (_is_int(level) and 1 <= level <= n_max):
        violations.append(
            f"experiments.multipliers.word_level: need an integer in [1, {n_max}]"
        )
    else:
        out["word_level"] = int(level)
    return out


def _normalize_ultra(raw, dim, spans, n_labels, violations):
    raw = {} if raw is None else raw
    out = {
        "q": 0.5,
        "q_tilde": 0.6,
        "m_list": list(range(2, MAX_AUX_DIM + 1)),
        "vectors": [_basis_vector(dim) for _ in range(4)],
    }
    if not isinstance(raw, dict):
        violations.append("experiments.ultra: must be a mapping")
        return out
    for key in raw:
        if key not in out:
            violations.append(f"experiments.ultra.{key}: unknown key")
    q = raw.get("q", out["q"])
    if not (_is_real(q) and 0 < q < 1):
        violations.append("experiments.ultra.q: need a real number in (0, 1)")
    else:
        out["q"] = float(q)
    qt = raw.get("q_tilde", out["q_tilde"])
    if _is_real(qt):
        if not abs(qt) < 1:
            violations.append("experiments.ultra.q_tilde: scalar shape needs modulus < 1")
        else:
            out["q_tilde"] = float(qt)
    elif isinstance(qt, list) and qt and all(isinstance(r, list) for r in qt):
        size = len(qt)
        good = (
            all(len(r) == size and all(_is_real(x) for x in r) for r in qt)
            and all(qt[i][j] == qt[j][i] for i in range(size) for j in range(size))
            and all(abs(x) < 1 for r in qt for x in r)
        )
        if not good:
            violations.append(
                "experiments.ultra.q_tilde: matrix shape must be square, symmetric,"
                " real, with entries of modulus < 1"
            )
        elif size < n_labels:
            violations.append(
                f"experiments.ultra.q_tilde: matrix covers {size} blocks,"
                f" the space has {n_labels}"
            )
        else:
            out["q_tilde"] = [[float(x) for x in r] for r in qt]
    else:
        violations.append("experiments.ultra.q_tilde: need a scalar or a square matrix")
    m_list = raw.get("m_list", out["m_list"])
    good = (
        isinstance(m_list, list)
        and m_list
        and all(_is_int(m) and 1 <= m <= MAX_AUX_DIM for m in m_list)
        and all(b > a for a, b in zip(m_list, m_list[1:]))
    )
    if not good:
        violations.append(
            f"experiments.ultra.m_list: need strictly increasing integers in [1, {MAX_AUX_DIM}]"
        )
    else:
        out["m_list"] = [int(m) for m in m_list]
    vectors = raw.get("vectors")
    if vectors is not None:
        vectors = _normalize_vectors(
            "experiments.ultra.vectors", vectors, dim, spans, violations
        )
        if len(vectors) > MAX_UM_LENGTH:
            violations.append(
                f"experiments.ultra.vectors: word length {len(vectors)} beyond the cap"
                f" {MAX_UM_LENGTH}"
            )
        out["vectors"] = vectors
    return out


def normalize_config(raw) -> RunConfig:
    """Validate a parsed configuration tree and fill every default.

    Raises ConfigError with the complete list of violations.
    """
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError("configuration root must be a mapping")
    violations = []
    for key in raw:
        if key not in _TOP_KEYS:
            violations.append(f"{key}: unknown top-level key")

    space = _normalize_space(raw.get("space"), violations)
    blocks = space["blocks"] if space else []
    spans = _block_spans(blocks)
    dim = spans[-1][1] if spans else 0
    n_labels = max((b["label"] for b in blocks), default=-1) + 1

    fock_raw = raw.get("fock", {})
    n_max = 3
    requested_n = n_max
    if not isinstance(fock_raw, dict):
        violations.append("fock: must be a mapping")
    else:
        for key in fock_raw:
            if key != "n_max":
                violations.append(f"fock.{key}: unknown key")
        n_raw = fock_raw.get("n_max", 3)
        if not (_is_int(n_raw) and n_raw >= 1):
            violations.append("fock.n_max: need a positive integer")
        elif n_raw > MAX_LEVEL:
            violations.append(f"fock.n_max: {n_raw} beyond the level cap {MAX_LEVEL}")
            requested_n = int(n_raw)
        else:
            n_max = int(n_raw)
            requested_n = n_max

    if dim:
        if dim > MAX_DIM:
            violations.append(f"space: dimension {dim} exceeds the cap {MAX_DIM}")
        # the budget message quotes the requested cutoff, even when that
        # cutoff already violates the level cap on its own
        top_words = dim**requested_n
        if top_words >= SIZE_BUDGET:
            violations.append(
                f"size budget: {dim}^{requested_n} = {top_words} top-level words"
                f" reaches the cap {SIZE_BUDGET}"
            )
        elif top_words > MAX_LEVEL_DIM:
            violations.append(
                f"size budget: {dim}^{requested_n} = {top_words} top-level words"
                f" beyond the per-level cap {MAX_LEVEL_DIM}"
            )

    seed = raw.get("seed", DEFAULT_SEED)
    if not (_is_int(seed) and seed >= 0):
        violations.append("seed: need a nonnegative integer")
        seed = DEFAULT_SEED

    output_dir = raw.get("output_dir", "reports")
    if not isinstance(output_dir, str) or not output_dir:
        violations.append("output_dir: need a nonempty path string")
        output_dir = "reports"

    tolerances = dict(DEFAULT_TOLERANCES)
    tol_raw = raw.get("tolerances", {})
    if not isinstance(tol_raw, dict):
        violations.append("tolerances: must be a mapping")
    else:
        for key, value in tol_raw.items():
            if key not in DEFAULT_TOLERANCES:
                violations.append(
                    f"tolerances.{key}: unknown key; known: {sorted(DEFAULT_TOLERANCES)}"
                )
            elif not (_is_real(value) and value > 0):
                violations.append(f"tolerances.{key}: need a positive number")
            else:
                tolerances[key] = float(value)

    exp_raw = raw.get("experiments", {})
    if exp_raw is None:
        exp_raw = {}
    if not isinstance(exp_raw, dict):
        violations.append("experiments: must be a mapping")
        exp_raw = {}
    for key in exp_raw:
        if key not in _EXPERIMENT_KEYS:
            violations.append(
                f"experiments.{key}: unknown experiment; known: {sorted(_EXPERIMENT_KEYS)}"
            )
    experiments = {
        "moments": _normalize_moments(
            exp_raw.get("moments"), dim, spans, n_labels, n_max, violations
        ),
        "modular": _normalize_modular(exp_raw.get("modular"), violations),
        "multipliers": _normalize_multipliers(exp_raw.get("multipliers"), n_max, violations),
        "ultra": _normalize_ultra(exp_raw.get("ultra"), dim, spans, n_labels, violations),
    }

    if violations:
        raise ConfigError(violations)

    data = {
        "space": space,
        "fock": {"n_max": n_max},
        "seed": int(seed),
        "output_dir": output_dir,
        "tolerances": tolerances,
        "experiments": experiments,
    }
    return RunConfig(data)
