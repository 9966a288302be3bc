"""Experiment configuration: YAML in, validated and fully resolved out.

All scalars are read as text (no YAML type guessing), so ``0.05`` and
``"1/20"`` both become the exact rational 1/20. Errors carry the line and
column of the offending node.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import yaml

from . import estimators as est
from .errors import ConfigError
from .ifs import WORD_BUDGET, IFS1D
from .measures import Bernoulli, Markov
from .numbers import parse_number

KINDS = ("separation", "dims", "tau", "coarse", "sample", "estimate", "convolve", "project", "affine")
SAMPLING_KINDS = ("sample", "estimate", "convolve", "project", "affine")
ESTIMATORS = ("coarse-entropy", "local-dimension", "correlation")

TOP_KEYS = {"experiment", "seed", "ifs", "ifs2", "measure", "measure2", "planar", "diagonal", "params"}

# name -> (kind, default); kind is one of int, rational, rational_list, int_pair, str, str_list
PARAMS = {
    "max_level": ("int", 6),
    "budget": ("int", WORD_BUDGET),
    "q": ("rational_list", ["3/2", "2", "3", "5", "10", "50"]),
    "m": ("int", 8),
    "delta": ("rational", "1/10"),
    "epsilon": ("rational", "1/20"),
    "variant": ("str", "full"),
    "depth": ("int", 25),
    "count": ("int", 100000),
    "scales": ("int_pair", [6, 12]),
    "estimators": ("str_list", list(ESTIMATORS)),
    "t": ("rational", "1"),
    "z_angles": ("rational_list", ["0", "0.4", "1.1", "2.0"]),
}

NEEDS = {
    "separation": ("ifs",),
    "dims": ("ifs", "measure"),
    "tau": ("ifs", "measure"),
    "coarse": ("ifs", "measure"),
    "sample": ("ifs", "measure"),
    "estimate": ("ifs", "measure"),
    "convolve": ("ifs", "measure", "ifs2", "measure2"),
    "project": ("planar", "measure"),
    "affine": ("diagonal", "measure"),
}


def _pos(node) -> str:
    m = node.start_mark
    return f"line {m.line + 1}, column {m.column + 1}"


def _scalar(node, what: str) -> str:
    if not isinstance(node, yaml.ScalarNode):
        raise ConfigError(f"{what} must be a scalar", _pos(node))
    return node.value


def _seq(node, what: str) -> list:
    if not isinstance(node, yaml.SequenceNode):
        raise ConfigError(f"{what} must be a list", _pos(node))
    return node.value


def _map(node, what: str, allowed: set | None = None) -> dict:
    if not isinstance(node, yaml.MappingNode):
        raise ConfigError(f"{what} must be a mapping", _pos(node))
    out = {}
    for k, v in node.value:
        key = _scalar(k, "key")
        if key in out:
            raise ConfigError(f"duplicate key {key!r}", _pos(k))
        if allowed is not None and key not in allowed:
            raise ConfigError(f"unknown key {key!r} in {what}", _pos(k))
        out[key] = (k, v)
    return out


def _number(node, what: str) -> Fraction:
    return parse_number(_scalar(node, what), _pos(node))


def _int(node, what: str) -> int:
    text = _scalar(node, what)
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"{what} must be an integer, got {text!r}", _pos(node)) from None


def _bool(node, what: str) -> bool:
    text = _scalar(node, what).lower()
    if text in ("true", "yes", "1"):
        return True
    if text in ("false", "no", "0"):
        return False
    raise ConfigError(f"{what} must be true or false, got {text!r}", _pos(node))


def _numbers(node, what: str) -> list[Fraction]:
    return [_number(v, what) for v in _seq(node, what)]


@dataclass
class ExperimentConfig:
    experiment: str
    seed: int | None
    params: dict
    ifs: IFS1D | None = None
    ifs2: IFS1D | None = None
    measure: Any = None
    measure2: Any = None
    planar: est.PlanarIFS | None = None
    diagonal: est.DiagonalAffineIFS | None = None
    planar_osc: bool | None = None  # user claim; not verified
    diagonal_finite_to_one: bool | None = None  # user claim; not verified
    resolved: dict = field(default_factory=dict)  # canonical text form of everything

    def scales(self) -> list[float]:
        k_min, k_max = self.params["scales"]
        return est.dyadic_scales(k_min, k_max)


def _parse_ifs(node, what):
    pairs, text = [], []
    for item in _seq(node, what):
        entry = _seq(item, f"{what} entry")
        if len(entry) != 2:
            raise ConfigError(f"{what} entries are [ratio, offset]", _pos(item))
        r, a = (_number(v, what) for v in entry)
        if not 0 < abs(r) < 1:
            raise ConfigError(f"ratio {r} is not a contraction", _pos(entry[0]))
        pairs.append((r, a))
        text.append([str(r), str(a)])
    if not pairs:
        raise ConfigError(f"{what} has no maps", _pos(node))
    return IFS1D.from_pairs(pairs), text


def _parse_measure(node, what):
    fields = _map(node, what, {"bernoulli", "markov"})
    if len(fields) != 1:
        raise ConfigError(f"{what} needs exactly one of 'bernoulli' or 'markov'", _pos(node))
    (kind, (_, v)), = fields.items()
    try:
        if kind == "bernoulli":
            p = _numbers(v, "bernoulli weights")
            return Bernoulli(p), {"bernoulli": [str(x) for x in p]}
        rows = [_numbers(r, "markov row") for r in _seq(v, "markov matrix")]
        return Markov(rows), {"markov": [[str(x) for x in r] for r in rows]}
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc), _pos(v)) from None


def _parse_planar(node):
    f = _map(node, "planar", {"ratio", "rotation", "translations", "reflection", "aperiodic",
                                   "open_set_condition"})
    for req in ("ratio", "rotation", "translations"):
        if req not in f:
            raise ConfigError(f"planar needs {req!r}", _pos(node))
    ratio = _number(f["ratio"][1], "ratio")
    rot = _number(f["rotation"][1], "rotation")
    trans = []
    for item in _seq(f["translations"][1], "translations"):
        xy = _numbers(item, "translation")
        if len(xy) != 2:
            raise ConfigError("translations are [x, y] pairs", _pos(item))
        trans.append(xy)
    refl = _bool(f["reflection"][1], "reflection") if "reflection" in f else False
    aper = _bool(f["aperiodic"][1], "aperiodic") if "aperiodic" in f else True
    osc = _bool(f["open_set_condition"][1], "open_set_condition") if "open_set_condition" in f else None
    try:
        p = est.PlanarIFS(float(ratio), float(rot), [(float(a), float(b)) for a, b in trans], refl, aper)
    except ValueError as exc:
        raise ConfigError(str(exc), _pos(node)) from None
    text = {"ratio": str(ratio), "rotation": str(rot), "translations": [[str(a), str(b)] for a, b in trans],
            "reflection": refl, "aperiodic": aper}
    if osc is not None:
        text["open_set_condition"] = osc
    return p, text, osc


def _parse_diagonal(node):
    f = _map(node, "diagonal", {"maps", "finite_to_one"})
    if "maps" not in f:
        raise ConfigError("diagonal needs 'maps'", _pos(node))
    maps = []
    for item in _seq(f["maps"][1], "maps"):
        vals = _numbers(item, "diagonal map")
        if len(vals) != 4:
            raise ConfigError("diagonal maps are [a, b, s, t]", _pos(item))
        maps.append(vals)
    try:
        d = est.DiagonalAffineIFS([[float(v) for v in m] for m in maps])
    except ValueError as exc:
        raise ConfigError(str(exc), _pos(node)) from None
    text = {"maps": [[str(v) for v in m] for m in maps]}
    fto = None
    if "finite_to_one" in f:
        fto = _bool(f["finite_to_one"][1], "finite_to_one")
        text["finite_to_one"] = fto
    return d, text, fto


def _parse_params(node) -> tuple[dict, dict]:
    given = _map(node, "params", set(PARAMS)) if node is not None else {}
    values, text = {}, {}
    for name, (kind, default) in PARAMS.items():
        v = given[name][1] if name in given else None
        if kind == "int":
            val = _int(v, name) if v is not None else default
            if val < 1:
                raise ConfigError(f"{name} must be positive", _pos(v) if v is not None else None)
            values[name], text[name] = val, val
        elif kind == "rational":
            val = _number(v, name) if v is not None else parse_number(default)
            values[name], text[name] = val, str(val)
        elif kind == "rational_list":
            val = _numbers(v, name) if v is not None else [parse_number(x) for x in default]
            values[name], text[name] = val, [str(x) for x in val]
        elif kind == "int_pair":
            val = [_int(x, name) for x in _seq(v, name)] if v is not None else list(default)
            if len(val) != 2 or val[0] > val[1] - 2:
                raise ConfigError(f"{name} is [k_min, k_max] with k_max >= k_min + 2",
                                  _pos(v) if v is not None else None)
            values[name], text[name] = val, val
        elif kind == "str":
            val = _scalar(v, name) if v is not None else default
            values[name], text[name] = val, val
        else:
            val = [_scalar(x, name) for x in _seq(v, name)] if v is not None else list(default)
            values[name], text[name] = val, val
    if values["variant"] not in ("full", "homogeneous"):
        raise ConfigError("variant must be 'full' or 'homogeneous'",
                          _pos(given["variant"][1]) if "variant" in given else None)
    for e in values["estimators"]:
        if e not in ESTIMATORS:
            raise ConfigError(f"unknown estimator {e!r}; choose from {', '.join(ESTIMATORS)}",
                              _pos(given["estimators"][1]))
    return values, text


def parse_config(text: str, experiment: str | None = None) -> ExperimentConfig:
    """Parse a YAML document; ``experiment`` (the CLI subcommand) must match if both are given."""
    try:
        root = yaml.compose(text, Loader=yaml.BaseLoader)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark
        where = f"line {mark.line + 1}, column {mark.column + 1}" if mark else None
        raise ConfigError(f"YAML syntax error: {exc.problem}", where) from None
    if root is None:
        raise ConfigError("empty configuration")
    top = _map(root, "configuration", TOP_KEYS)

    kind = _scalar(top["experiment"][1], "experiment") if "experiment" in top else None
    if kind is not None and kind not in KINDS:
        raise ConfigError(f"unknown experiment {kind!r}", _pos(top["experiment"][1]))
    if experiment is not None:
        if kind is not None and kind != experiment:
            raise ConfigError(f"config is for {kind!r} but the subcommand is {experiment!r}",
                              _pos(top["experiment"][1]))
        kind = experiment
    if kind is None:
        raise ConfigError("no experiment kind given")

    seed = None
    if "seed" in top:
        seed = _int(top["seed"][1], "seed")
        if not 0 <= seed < 2 ** 64:
            raise ConfigError("seed must be a 64-bit unsigned integer", _pos(top["seed"][1]))
    elif kind in SAMPLING_KINDS:
        raise ConfigError(f"experiment {kind!r} needs an explicit 'seed'", _pos(root))

    for req in NEEDS[kind]:
        if req not in top:
            raise ConfigError(f"experiment {kind!r} needs {req!r}", _pos(root))

    params, ptext = _parse_params(top["params"][1] if "params" in top else None)
    cfg = ExperimentConfig(kind, seed, params)
    resolved = {"experiment": kind}
    if seed is not None:
        resolved["seed"] = seed
    for name in ("ifs", "ifs2"):
        if name in top:
            ifs, t = _parse_ifs(top[name][1], name)
            setattr(cfg, name, ifs)
            resolved[name] = t
    for name in ("measure", "measure2"):
        if name in top:
            m, t = _parse_measure(top[name][1], name)
            setattr(cfg, name, m)
            resolved[name] = t
    if "planar" in top:
        cfg.planar, resolved["planar"], cfg.planar_osc = _parse_planar(top["planar"][1])
    if "diagonal" in top:
        cfg.diagonal, resolved["diagonal"], cfg.diagonal_finite_to_one = _parse_diagonal(top["diagonal"][1])
    resolved["params"] = ptext
    cfg.resolved = resolved

    pairs = [("measure", "ifs"), ("measure2", "ifs2"), ("measure", "planar"), ("measure", "diagonal")]
    for mname, sname in pairs:
        m, s = getattr(cfg, mname), getattr(cfg, sname)
        if m is not None and s is not None and m.n_symbols != len(s):
            raise ConfigError(f"{mname} has {m.n_symbols} symbols but {sname} has {len(s)} maps",
                              _pos(top[mname][1]))
    return cfg


def load_config(path, experiment: str | None = None) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), experiment)


def dump_resolved(cfg: ExperimentConfig) -> str:
    return yaml.safe_dump(cfg.resolved, sort_keys=False, default_flow_style=None)
