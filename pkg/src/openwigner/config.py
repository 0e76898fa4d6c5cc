"""Run specifications in a line-oriented ``section.key = value`` format.

Example::

    # damped oscillator
    params.lam = 0.2
    params.mu = 0.2
    params.d_pp = 0.5
    params.d_qq = 0.5
    potential.kind = harmonic
    potential.omega = 1.0
    initial.kind = gaussian
    initial.mean_q = 2.0
    run.t_end = 10
    output.directory = out
    output.formats = csv, field, pgm
    output.snapshot_times = 0, 5, 10

Blank lines and ``#`` comments are ignored.  Keys may appear in any order
but at most once.  Unknown sections or keys are syntax errors.  Omitted
keys take the defaults of the corresponding blocks.  :func:`serialize`
writes every key explicitly, and ``parse_spec(serialize(s)) == s``.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field, fields, replace
from typing import Dict, Optional, Tuple

from .derivatives import SCHEMES
from .errors import InvalidSpec, ParseError
from .integrate import RunConfig
from .params import LindbladOpCoeffs, LindbladParams, validate
from .phasespace import GaussianMoments, PhaseSpaceGrid
from .potentials import CATALOG, Potential, make_potential

INITIAL_KINDS = ("gaussian", "thermal", "density_matrix")
OUTPUT_FORMATS = ("csv", "field", "pgm")
_AUTO = "auto"


@dataclass(frozen=True)
class InitialState:
    """Exactly one source: Gaussian moments, a thermal state, or a density-matrix file."""

    kind: str = "gaussian"
    moments: GaussianMoments = field(default_factory=lambda: GaussianMoments(0.0, 0.0))
    kT: float = 1.0
    file: Optional[str] = None

    def __post_init__(self):
        if self.kind not in INITIAL_KINDS:
            raise InvalidSpec(f"initial.kind must be one of {INITIAL_KINDS}, got {self.kind!r}")
        if self.kind == "density_matrix" and not self.file:
            raise InvalidSpec("initial.kind = density_matrix needs initial.file")
        if self.kind != "density_matrix" and self.file:
            raise InvalidSpec("initial.file is only allowed with initial.kind = density_matrix")
        if self.kind == "thermal" and not self.kT > 0:
            raise InvalidSpec(f"initial.kT must be positive, got {self.kT!r}")


@dataclass(frozen=True)
class OutputSpec:
    directory: str = "output"
    formats: Tuple[str, ...] = ("csv",)
    snapshot_times: Tuple[float, ...] = ()

    def __post_init__(self):
        bad = [f for f in self.formats if f not in OUTPUT_FORMATS]
        if bad:
            raise InvalidSpec(f"unknown output format(s) {bad}; expected a subset of {OUTPUT_FORMATS}")
        object.__setattr__(self, "formats", tuple(dict.fromkeys(self.formats)))
        object.__setattr__(self, "snapshot_times", tuple(float(t) for t in self.snapshot_times))


@dataclass(frozen=True)
class RunSpec:
    params: LindbladParams = field(default_factory=LindbladParams)
    potential: Potential = field(default_factory=lambda: make_potential("harmonic"))
    grid: PhaseSpaceGrid = field(default_factory=PhaseSpaceGrid)
    initial: InitialState = field(default_factory=InitialState)
    run: RunConfig = field(default_factory=RunConfig)
    output: OutputSpec = field(default_factory=OutputSpec)
    enforce_constraints: bool = True

    @property
    def run_config(self) -> RunConfig:
        """The run block with the output snapshot times attached."""
        return replace(self.run, snapshot_times=self.output.snapshot_times)


# -- value codecs -----------------------------------------------------------

def _float(text: str) -> float:
    value = float(text)
    if not math.isfinite(value):
        raise ValueError("value must be finite")
    return value


def _int(text: str) -> int:
    return int(text)


def _complex(text: str) -> complex:
    return complex(text.replace(" ", ""))


def _bool(text: str) -> bool:
    low = text.lower()
    if low in ("true", "yes", "on", "1"):
        return True
    if low in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"expected true or false, got {text!r}")


def _optional(conv):
    def parse(text: str):
        return None if text.lower() == _AUTO else conv(text)
    return parse


def _float_list(text: str) -> Tuple[float, ...]:
    return tuple(_float(x) for x in text.split(",") if x.strip())


def _word_list(text: str) -> Tuple[str, ...]:
    return tuple(x.strip() for x in text.split(",") if x.strip())


def _fmt(value) -> str:
    if value is None:
        return _AUTO
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, int, complex)):
        return repr(value)
    if isinstance(value, tuple):
        return ", ".join(_fmt(v) for v in value)
    return str(value)


_PARAM_KEYS = {"mass": _float, "hbar": _float, "lam": _float, "mu": _float,
               "d_pp": _float, "d_qq": _float, "d_pq": _float,
               "a1": _complex, "b1": _complex, "a2": _complex, "b2": _complex,
               "enforce_constraints": _bool}
_OP_KEYS = ("a1", "b1", "a2", "b2")
_GRID_KEYS = {"q_min": _float, "q_max": _float, "p_min": _float, "p_max": _float,
              "n_q": _int, "n_p": _int, "scheme": str}
_INITIAL_KEYS = {"kind": str, "mean_q": _float, "mean_p": _float, "sigma_qq": _float,
                 "sigma_pp": _float, "sigma_pq": _float, "kT": _float, "file": str}
_RUN_KEYS = {"t_end": _float, "dt": _optional(_float), "stride": _int,
             "truncation": _optional(_int), "safety": _float}
_OUTPUT_KEYS = {"directory": str, "formats": _word_list, "snapshot_times": _float_list}


def _potential_keys(kind: str) -> Dict[str, object]:
    if kind == "polynomial":
        return {"coefficients": _float_list}
    cls = CATALOG[kind]
    return {f.name: _float for f in fields(cls)}


_SECTIONS = ("params", "potential", "grid", "initial", "run", "output")


def _tokenize(text: str) -> Dict[str, Dict[str, Tuple[str, int, str]]]:
    """``{section: {key: (raw value, line number, line)}}``."""
    out: Dict[str, Dict[str, Tuple[str, int, str]]] = {s: {} for s in _SECTIONS}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ParseError("expected 'section.key = value'", line, lineno)
        lhs, rhs = (s.strip() for s in body.split("=", 1))
        if lhs.count(".") != 1:
            raise ParseError(f"key {lhs!r} must have the form section.key", line, lineno)
        section, key = lhs.split(".")
        if section not in out:
            raise ParseError(f"unknown section {section!r}", line, lineno)
        if not key or not rhs:
            raise ParseError("empty key or value", line, lineno)
        if key in out[section]:
            raise ParseError(f"duplicate key {lhs!r}", line, lineno)
        out[section][key] = (rhs, lineno, line)
    return out


def _convert(section: str, entries, schema) -> dict:
    values = {}
    for key, (raw, lineno, line) in entries.items():
        if key not in schema:
            raise ParseError(f"unknown key {section}.{key}", line, lineno)
        try:
            values[key] = schema[key](raw)
        except ValueError as exc:
            raise ParseError(f"bad value for {section}.{key}: {exc}", line, lineno) from None
    return values


def _build(label: str, factory, *args, **kwargs):
    try:
        return factory(*args, **kwargs)
    except InvalidSpec:
        raise
    except (ValueError, TypeError) as exc:
        raise InvalidSpec(f"{label}: {exc}") from exc


def parse_spec(text: str, base_dir: str | None = None) -> RunSpec:
    """Parse and validate a run specification.

    Relative file paths are resolved against ``base_dir`` (the current
    directory if omitted) and must exist.
    """
    raw = _tokenize(text)

    pv = _convert("params", raw["params"], _PARAM_KEYS)
    enforce = pv.pop("enforce_constraints", True)
    op_values = {k: pv.pop(k) for k in _OP_KEYS if k in pv}
    if op_values:
        clash = [k for k in ("lam", "d_pp", "d_qq", "d_pq") if k in pv]
        if clash:
            raise InvalidSpec(f"params.{clash[0]} cannot be combined with Lindblad operator "
                              "coefficients a1, b1, a2, b2")
        ops = _build("params", LindbladOpCoeffs, **{k: op_values.get(k, 0j) for k in _OP_KEYS})
        params = _build("params", LindbladParams.from_ops, ops, **pv)
    else:
        params = _build("params", LindbladParams, **pv)
    report = validate(params)
    if enforce and not report.valid:
        failed = ", ".join(c.name for c in report.failures)
        raise InvalidSpec(f"constraint {failed} violated: {report.summary()}")

    pot_entries = dict(raw["potential"])
    kind = pot_entries.pop("kind", ("harmonic", 0, ""))[0]
    if kind not in CATALOG:
        raise InvalidSpec(f"unknown potential kind {kind!r}; expected one of {sorted(CATALOG)}")
    potential = _build("potential", make_potential, kind,
                       **_convert("potential", pot_entries, _potential_keys(kind)))

    gv = _convert("grid", raw["grid"], _GRID_KEYS)
    if "scheme" in gv:
        gv["derivative_scheme"] = gv.pop("scheme")
        if gv["derivative_scheme"] not in SCHEMES:
            raise InvalidSpec(f"grid.scheme must be one of {SCHEMES}")
    grid = _build("grid", PhaseSpaceGrid, **gv)

    iv = _convert("initial", raw["initial"], _INITIAL_KEYS)
    moment_keys = [k for k in GaussianMoments.FIELDS if k in iv]
    kind0 = iv.get("kind", "gaussian")
    if kind0 != "gaussian" and moment_keys:
        raise InvalidSpec(f"initial.{moment_keys[0]} is only allowed with initial.kind = gaussian")
    if kind0 != "thermal" and "kT" in iv:
        raise InvalidSpec("initial.kT is only allowed with initial.kind = thermal")
    moments = _build("initial", GaussianMoments,
                     **{**{"mean_q": 0.0, "mean_p": 0.0}, **{k: iv.pop(k) for k in moment_keys}})
    if kind0 == "gaussian" and not (moments.sigma_qq > 0 and moments.is_admissible(params.hbar)):
        raise InvalidSpec(f"initial moments violate s_qq s_pp - s_pq^2 >= hbar^2/4 "
                          f"(determinant {moments.determinant:.6g})")
    initial = _build("initial", InitialState, kind=kind0, moments=moments,
                     kT=iv.get("kT", 1.0), file=iv.get("file"))
    if initial.file is not None:
        path = initial.file if os.path.isabs(initial.file) else os.path.join(base_dir or ".", initial.file)
        if not os.path.isfile(path):
            raise InvalidSpec(f"initial.file {initial.file!r} does not exist")

    output = _build("output", OutputSpec, **_convert("output", raw["output"], _OUTPUT_KEYS))
    run = _build("run", RunConfig, **_convert("run", raw["run"], _RUN_KEYS))
    _build("output", replace, run, snapshot_times=output.snapshot_times)

    return RunSpec(params, potential, grid, initial, run, output, enforce)


def serialize(spec: RunSpec) -> str:
    """Text form of ``spec`` with every key written out."""
    lines = []
    p = spec.params
    lines += [f"params.mass = {_fmt(p.mass)}", f"params.hbar = {_fmt(p.hbar)}",
              f"params.mu = {_fmt(p.mu)}"]
    if p.ops is not None:
        lines += [f"params.{k} = {_fmt(getattr(p.ops, k))}" for k in _OP_KEYS]
    else:
        lines += [f"params.{k} = {_fmt(getattr(p, k))}" for k in ("lam", "d_pp", "d_qq", "d_pq")]
    lines.append(f"params.enforce_constraints = {_fmt(spec.enforce_constraints)}")

    lines.append(f"potential.kind = {spec.potential.kind}")
    lines += [f"potential.{k} = {_fmt(v)}" for k, v in spec.potential.params().items()]

    g = spec.grid
    lines += [f"grid.{k} = {_fmt(getattr(g, k))}" for k in ("q_min", "q_max", "p_min", "p_max", "n_q", "n_p")]
    lines.append(f"grid.scheme = {g.derivative_scheme}")

    ini = spec.initial
    lines.append(f"initial.kind = {ini.kind}")
    if ini.kind == "gaussian":
        lines += [f"initial.{k} = {_fmt(getattr(ini.moments, k))}" for k in GaussianMoments.FIELDS]
    elif ini.kind == "thermal":
        lines.append(f"initial.kT = {_fmt(ini.kT)}")
    else:
        lines.append(f"initial.file = {ini.file}")

    r = spec.run
    lines += [f"run.{k} = {_fmt(getattr(r, k))}" for k in ("t_end", "dt", "stride", "truncation", "safety")]

    o = spec.output
    lines.append(f"output.directory = {o.directory}")
    lines.append(f"output.formats = {_fmt(o.formats)}")
    if o.snapshot_times:
        lines.append(f"output.snapshot_times = {_fmt(o.snapshot_times)}")
    return "\n".join(lines) + "\n"

