"""Study configuration files and trace outputs.

Configuration grammar, one assignment per line::

    # comment
    potential.kind = gaussian
    potential.params.width = 1.0
    l = 3
    grid.r_end = 4.8
    grid.n_points = 8192
    lambda.min = 0
    lambda.max = 200
    seeds.0.lambda = 25
    seeds.0.im_k = 0.9343034507      # or: auto, together with seeds.0.bracket
    seeds.1.lambda = 46
    seeds.1.im_k = auto
    seeds.1.bracket = 0.1, 2.0
    step.ds = 0.01
    output.dir = gaussian_out

Keys are case sensitive, each may appear once, and anything not listed in
:data:`KEYS` is rejected.  Values are numbers, bare words or comma lists.
"""

from __future__ import annotations

import csv
import json
import math
import re
from pathlib import Path

import numpy as np

from .continuation import StepControl
from .errors import ConfigError, DomainError
from .potentials import DEFAULT_PARAMS, RadialPotential
from .solver import RadialGrid
from .specfun import _check_l
from .tracer import Seed, StudyDefinition, classify, iter_branches

__all__ = [
    "KEYS",
    "CSV_COLUMNS",
    "parse_config",
    "load_config",
    "study_from_config",
    "parse_complex",
    "write_trace",
    "read_branch_csv",
    "as_arrays",
]

# key -> converter; potential.params.* and seeds.<i>.* are handled separately
KEYS = {
    "potential.kind": str,
    "l": int,
    "grid.r_end": float,
    "grid.n_points": int,
    "lambda.min": float,
    "lambda.max": float,
    "step.ds": float,
    "step.ds_min": float,
    "step.ds_max": float,
    "step.newton_tol": float,
    "step.newton_max_iter": int,
    "step.max_steps": int,
    "stop.im_k_floor": float,
    "bifurcation.tol_s": float,
    "run.threads": int,
    "output.dir": str,
}
SEED_FIELDS = ("lambda", "im_k", "bracket")
REQUIRED = ("potential.kind", "l", "grid.r_end", "grid.n_points", "lambda.min", "lambda.max")

CSV_COLUMNS = (
    "branch_id",
    "point_index",
    "arclength",
    "re_k",
    "im_k",
    "lambda",
    "residual_norm",
    "det_sign",
    "state_class",
)

_LINE = re.compile(r"^([A-Za-z_][A-Za-z0-9_.]*)\s*=\s*(.*?)\s*$")
_SEED_KEY = re.compile(r"^seeds\.(\d+)\.(\w+)$")


def parse_config(text):
    """Parse config text into a flat ``{key: raw string}`` dict (syntax only)."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _LINE.match(line)
        if m is None:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = m.groups()
        if not value:
            raise ConfigError(f"line {lineno}: empty value for {key!r}")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def load_config(path):
    return parse_config(Path(path).read_text())


def _convert(key, raw, conv):
    try:
        if conv is int:
            value = float(raw)
            if not value.is_integer():
                raise ValueError
            return int(value)
        return conv(raw)
    except ValueError:
        raise ConfigError(f"{key}: cannot read {raw!r} as {conv.__name__}") from None


def _float_list(key, raw, n):
    parts = [p.strip() for p in raw.split(",")]
    if len(parts) != n:
        raise ConfigError(f"{key}: expected {n} comma-separated numbers, got {raw!r}")
    return tuple(_convert(key, p, float) for p in parts)


def study_from_config(raw):
    """Validate a parsed config; returns ``(StudyDefinition, output_dir or None)``."""
    values = {}
    params = {}
    seeds = {}
    for key, text in raw.items():
        if key in KEYS:
            values[key] = _convert(key, text, KEYS[key])
        elif key.startswith("potential.params."):
            params[key[len("potential.params."):]] = _convert(key, text, float)
        elif (m := _SEED_KEY.match(key)) is not None:
            index, name = int(m.group(1)), m.group(2)
            if name not in SEED_FIELDS:
                raise ConfigError(f"unknown seed field {key!r}; use one of {SEED_FIELDS}")
            seeds.setdefault(index, {})[name] = (key, text)
        else:
            raise ConfigError(f"unknown key {key!r}")
    missing = [k for k in REQUIRED if k not in values]
    if missing:
        raise ConfigError(f"missing required key(s): {', '.join(missing)}")
    if not seeds:
        raise ConfigError("no seeds: define at least seeds.0.lambda and seeds.0.im_k")

    seed_list = []
    for index in sorted(seeds):
        fields = seeds[index]
        if "lambda" not in fields:
            raise ConfigError(f"seeds.{index}: missing lambda")
        lam = _convert(*fields["lambda"], float)
        im_text = fields.get("im_k", (None, "auto"))[1]
        bracket = None
        if "bracket" in fields:
            bracket = _float_list(fields["bracket"][0], fields["bracket"][1], 2)
        if im_text.strip().lower() == "auto":
            if bracket is None:
                raise ConfigError(f"seeds.{index}: im_k = auto needs a bracket")
            im_k = None
        else:
            im_k = _convert(fields["im_k"][0], im_text, float)
        try:
            seed_list.append(Seed(lam, im_k, bracket))
        except DomainError as exc:
            raise ConfigError(f"seeds.{index}: {exc}") from None

    kind = values["potential.kind"]
    if kind not in DEFAULT_PARAMS:
        raise ConfigError(f"unknown potential kind {kind!r}")
    step_args = {
        name: values[f"step.{name}"]
        for name in ("ds", "ds_min", "ds_max", "newton_tol", "newton_max_iter")
        if f"step.{name}" in values
    }
    extra = {}
    if "step.max_steps" in values:
        extra["max_steps"] = values["step.max_steps"]
    if "stop.im_k_floor" in values:
        extra["im_k_floor"] = values["stop.im_k_floor"]
    if "bifurcation.tol_s" in values:
        extra["tol_s"] = values["bifurcation.tol_s"]
    if "run.threads" in values:
        extra["threads"] = values["run.threads"]
    try:
        potential = RadialPotential(kind, params)
        grid = RadialGrid(values["grid.r_end"], values["grid.n_points"])
        lam_range = (values["lambda.min"], values["lambda.max"])
        potential.check_short_range(grid.r_end, max(abs(lam_range[0]), abs(lam_range[1])))
        study = StudyDefinition(
            potential=potential,
            l=values["l"],
            grid=grid,
            lambda_range=lam_range,
            seeds=seed_list,
            step=StepControl(**step_args),
            **extra,
        )
        _check_l(study.l)
    except DomainError as exc:
        raise ConfigError(str(exc)) from None
    return study, values.get("output.dir")


def parse_complex(text):
    """Parse ``a+bi``, ``a-bi``, ``bi``, ``a`` or ``i`` (``j`` also accepted).

    >>> parse_complex("0+0.5i")
    0.5j
    """
    s = text.strip().replace(" ", "")
    if not s:
        raise ValueError("empty complex number")
    if s[-1] in "ij":
        s = s[:-1] + "j"
    if "i" in s or s.count("j") > 1:
        raise ValueError(f"cannot parse complex number {text!r}")
    try:
        return complex(s)
    except ValueError:
        raise ValueError(f"cannot parse complex number {text!r}") from None


def _fmt(v):
    return f"{v:.14e}"


def _det_sign(det):
    if det is None or math.isnan(det):
        return 0
    return 1 if det >= 0 else -1


def _branch_rows(branch):
    for i, p in enumerate(branch.points):
        yield (
            branch.label,
            str(i),
            _fmt(p.arclength),
            _fmt(p.x[0]),
            _fmt(p.x[1]),
            _fmt(p.x[2]),
            _fmt(p.residual_norm),
            str(_det_sign(p.det)),
            classify(p.x).value,
        )


def _event_record(label, event):
    return {
        "branch_id": label,
        "lambda_t": float(event.x_t[-1]),
        "re_k": float(event.x_t[0]),
        "im_k": float(event.x_t[1]),
        "tangents_out": [[float(v) + 0.0 for v in t] for t in event.tangents_out],
        "det_before": float(event.det_before),
        "det_after": float(event.det_after),
    }


def _study_record(study, branches):
    pot = study.potential
    record = {
        "potential": {"kind": pot.kind, "params": dict(pot.params)},
        "l": study.l,
        "grid": {"r_end": study.grid.r_end, "n_points": study.grid.n_points},
        "lambda": {"min": study.lambda_range[0], "max": study.lambda_range[1]},
        "step": {
            "ds": study.step.ds,
            "ds_min": study.step.ds_min,
            "ds_max": study.step.ds_max,
            "newton_tol": study.step.newton_tol,
            "newton_max_iter": study.step.newton_max_iter,
            "max_steps": study.max_steps,
        },
        "stop": {"im_k_floor": study.im_k_floor},
        "bifurcation": {"tol_s": study.tol_s},
        "seeds": [],
        "branches": [],
        "failures": [],
    }
    for seed, branch in zip(study.seeds, branches):
        entry = {"lambda": seed.lam, "im_k_given": seed.im_k, "bracket": seed.bracket}
        entry["im_k"] = float(branch.points[0].x[1]) if branch.points else None
        record["seeds"].append(entry)
        for b in iter_branches(branch):
            record["branches"].append(
                {"branch_id": b.label, "points": len(b.points), "termination": b.termination.value}
            )
            if b.error is not None:
                record["failures"].append({"branch_id": b.label, "error": b.error})
            for e in b.events:
                if e.switch_error is not None:
                    record["failures"].append({"branch_id": b.label, "error": e.switch_error})
    return record


def write_trace(study, branches, out_dir):
    """Write ``branch_<i>.csv`` per seed, ``events.json`` and ``study.json``.

    Switched branches go into the file of their seed with ids like ``0.1``.
    Returns the list of written paths.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    events = []
    for branch in branches:
        path = out / f"branch_{branch.label}.csv"
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_COLUMNS)
            for b in iter_branches(branch):
                writer.writerows(_branch_rows(b))
                events += [_event_record(b.label, e) for e in b.events]
        written.append(path)
    for name, payload in (("events.json", events), ("study.json", _study_record(study, branches))):
        path = out / name
        path.write_text(json.dumps(payload, indent=2) + "\n")
        written.append(path)
    return written


def read_branch_csv(path):
    """Rows of a trace CSV as dicts of the raw text fields, checked against the header."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != CSV_COLUMNS:
            raise ConfigError(f"{path}: not a trajectory file (header {header})")
        return [dict(zip(CSV_COLUMNS, row)) for row in reader]


def as_arrays(rows):
    """Group raw CSV rows by branch id into float arrays ``(re_k, im_k, lambda)``."""
    groups = {}
    for row in rows:
        groups.setdefault(row["branch_id"], []).append(
            (float(row["re_k"]), float(row["im_k"]), float(row["lambda"]))
        )
    return {k: np.array(v) for k, v in groups.items()}
