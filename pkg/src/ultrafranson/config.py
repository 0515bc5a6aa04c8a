"""Experiment configuration files.

The format is a list of ``[section]`` headers followed by ``key = value``
lines. ``#`` starts a comment. Numeric values may be arithmetic in ``pi``
(``3*pi/4``, ``pi/2``, ``-pi``). Unknown sections or keys are rejected with
the offending line number.
"""
from __future__ import annotations

import ast
import math
import operator
import os
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

from .biphoton import GaussianBiphoton, wavelength_to_angfreq
from .detector import Axis, CountModel, ResponseModel
from .franson import FransonSettings


class ConfigError(ValueError):
    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = f"{path or '<config>'}"
        if line is not None:
            where += f":{line}"
        super().__init__(f"{where}: {message}")


_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv}
_UNOPS = {ast.UAdd: operator.pos, ast.USub: operator.neg}


def parse_number(text: str) -> float:
    """Evaluate a numeric literal, allowing ``pi`` and + - * / arithmetic."""
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError:
        raise ValueError(f"not a number: {text!r}") from None

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) \
                and not isinstance(node.value, bool):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNOPS:
            return _UNOPS[type(node.op)](ev(node.operand))
        raise ValueError(f"not a number: {text!r}")

    try:
        value = ev(tree)
    except ZeroDivisionError:
        raise ValueError(f"division by zero in {text!r}") from None
    if not math.isfinite(value):
        raise ValueError(f"not finite: {text!r}")
    return value


def _as_int(text):
    value = parse_number(text)
    if value != int(value):
        raise ValueError(f"expected an integer, got {text!r}")
    return int(value)


def _as_bool(text):
    low = text.strip().lower()
    if low in ("true", "yes", "1"):
        return True
    if low in ("false", "no", "0"):
        return False
    raise ValueError(f"expected true/false, got {text!r}")


def _as_list(conv):
    def parse(text):
        items = [t.strip() for t in text.split(",") if t.strip()]
        if not items:
            raise ValueError("empty list")
        return [conv(t) for t in items]
    return parse


def _as_str(text):
    return text.strip()


SCHEMA = {
    "source": {
        "omega_s0": parse_number, "omega_i0": parse_number,
        "lambda_s": parse_number, "lambda_i": parse_number,
        "sigma_s": parse_number, "sigma_i": parse_number, "rho": parse_number,
        "dt_s": parse_number, "dt_i": parse_number, "rho_t": parse_number,
    },
    "franson": {
        "tau_s": parse_number, "tau_i": parse_number,
        "phi_s": parse_number, "phi_i": parse_number,
        "hwp_s": parse_number, "hwp_i": parse_number,
    },
    "detector": {
        "gate_sigma_s": parse_number, "gate_sigma_i": parse_number,
        "spec_sigma_s": parse_number, "spec_sigma_i": parse_number,
        "pair_rate_peak": parse_number, "background_rate": parse_number,
        "singles_rate_s": parse_number, "singles_rate_i": parse_number,
        "singles_background_s": parse_number, "singles_background_i": parse_number,
        "dwell": parse_number, "seed": _as_int,
    },
    "scan": {
        "maps": _as_list(_as_str), "phase_offsets": _as_list(parse_number),
        "jsi_half_width": parse_number, "jsi_points": _as_int,
        "jti_half_width": parse_number, "jti_points": _as_int,
        "jti_center_s": parse_number, "jti_center_i": parse_number,
        "sample": _as_bool, "phase_points": _as_int, "slices": _as_int,
    },
    "bell": {
        "a": parse_number, "a_prime": parse_number,
        "b": parse_number, "b_prime": parse_number,
        "dwell": parse_number, "counts": _as_str,
    },
    "output": {
        "dir": _as_str, "format": _as_str,
    },
}


@dataclass
class ExperimentConfig:
    """Parsed configuration; ``lines`` maps (section, key) to source lines."""

    sections: Dict[str, Dict[str, object]] = field(default_factory=dict)
    lines: Dict[Tuple[str, Optional[str]], int] = field(default_factory=dict)
    path: Optional[str] = None

    # -- raw access ----------------------------------------------------------
    def has(self, section: str) -> bool:
        return section in self.sections

    def require(self, *sections: str):
        missing = [s for s in sections if s not in self.sections]
        if missing:
            raise ConfigError(f"missing required block(s): {', '.join('[' + s + ']' for s in missing)}",
                              path=self.path)

    def get(self, section, key, default=None):
        return self.sections.get(section, {}).get(key, default)

    def error(self, message, section, key=None):
        line = self.lines.get((section, key), self.lines.get((section, None)))
        return ConfigError(message, line, self.path)

    def resolve(self, relpath: str) -> str:
        if os.path.isabs(relpath) or self.path is None:
            return relpath
        return os.path.join(os.path.dirname(os.path.abspath(self.path)), relpath)

    def _need(self, section, key):
        if key not in self.sections.get(section, {}):
            raise self.error(f"[{section}] needs key {key!r}", section)
        return self.sections[section][key]

    # -- typed views ---------------------------------------------------------
    def state(self) -> GaussianBiphoton:
        self.require("source")
        src = self.sections["source"]
        if "omega_s0" in src or "omega_i0" in src:
            if "lambda_s" in src or "lambda_i" in src:
                raise self.error("give either omega_*0 or lambda_*, not both", "source", "lambda_s")
            w_s, w_i = self._need("source", "omega_s0"), self._need("source", "omega_i0")
        else:
            try:
                w_s = wavelength_to_angfreq(self._need("source", "lambda_s"))
                w_i = wavelength_to_angfreq(self._need("source", "lambda_i"))
            except ValueError as exc:
                raise self.error(str(exc), "source", "lambda_s") from None
        spectral = [k for k in ("sigma_s", "sigma_i", "rho") if k in src]
        temporal = [k for k in ("dt_s", "dt_i", "rho_t") if k in src]
        try:
            if spectral and temporal:
                raise self.error("give either sigma_s/sigma_i/rho or dt_s/dt_i/rho_t",
                                 "source", temporal[0])
            if temporal:
                return GaussianBiphoton.from_temporal_widths(
                    self._need("source", "dt_s"), self._need("source", "dt_i"),
                    self._need("source", "rho_t"), w_s, w_i)
            return GaussianBiphoton(w_s, w_i, self._need("source", "sigma_s"),
                                    self._need("source", "sigma_i"), self._need("source", "rho"))
        except ConfigError:
            raise
        except (ValueError, ArithmeticError) as exc:
            raise self.error(f"invalid source: {exc}", "source") from None

    def delays(self):
        self.require("franson")
        return self._need("franson", "tau_s"), self._need("franson", "tau_i")

    def phases(self):
        """Total arm phases; a half-wave plate angle theta stands for 4*theta."""
        fr = self.sections.get("franson", {})
        out = []
        for side in ("s", "i"):
            if f"phi_{side}" in fr and f"hwp_{side}" in fr:
                raise self.error(f"give phi_{side} or hwp_{side}, not both", "franson",
                                 f"hwp_{side}")
            if f"hwp_{side}" in fr:
                out.append(4 * fr[f"hwp_{side}"])
            else:
                out.append(fr.get(f"phi_{side}", 0.0))
        return tuple(out)

    def settings(self, state: GaussianBiphoton, extra_phase_s: float = 0.0) -> FransonSettings:
        tau_s, tau_i = self.delays()
        phi_s, phi_i = self.phases()
        try:
            return FransonSettings.referenced(state, tau_s, tau_i, phi_s + extra_phase_s, phi_i)
        except ValueError as exc:
            raise self.error(str(exc), "franson") from None

    def response(self) -> ResponseModel:
        det = self.sections.get("detector", {})
        try:
            return ResponseModel(det.get("gate_sigma_s", 0.0), det.get("gate_sigma_i", 0.0),
                                 det.get("spec_sigma_s", 0.0), det.get("spec_sigma_i", 0.0))
        except ValueError as exc:
            raise self.error(str(exc), "detector") from None

    def count_model(self, seed: Optional[int] = None, dwell_section: str = "detector") -> CountModel:
        self.require("detector")
        det = self.sections["detector"]
        dwell = self.get(dwell_section, "dwell", det.get("dwell"))
        if dwell is None:
            raise self.error(f"[{dwell_section}] needs key 'dwell'", dwell_section)
        if not dwell > 0:
            raise self.error("dwell must be positive", dwell_section, "dwell")
        try:
            return CountModel(
                pair_rate_peak=self._need("detector", "pair_rate_peak"),
                background_rate=det.get("background_rate", 0.0),
                singles_rates=(det.get("singles_rate_s", 0.0), det.get("singles_rate_i", 0.0)),
                singles_background=(det.get("singles_background_s", 0.0),
                                    det.get("singles_background_i", 0.0)),
                dwell=dwell,
                seed=det.get("seed", 0) if seed is None else seed,
            )
        except ValueError as exc:
            raise self.error(str(exc), "detector") from None

    def map_axes(self, kind: str, state: GaussianBiphoton):
        """Grid for a joint map: spectral grids centre on the source frequencies,
        temporal grids default to halfway between the short and long paths."""
        scan = self.sections.get("scan", {})
        if kind == "jsi":
            half = scan.get("jsi_half_width", 8 * max(state.sigma_s, state.sigma_i))
            n = scan.get("jsi_points", 401)
            centers = (state.omega_s0, state.omega_i0)
            names, unit = ("omega_s", "omega_i"), "rad/ps"
        elif kind == "jti":
            tau_s, tau_i = self.delays() if self.has("franson") else (0.0, 0.0)
            half = scan.get("jti_half_width", 2.0)
            n = scan.get("jti_points", 201)
            centers = (scan.get("jti_center_s", -tau_s / 2), scan.get("jti_center_i", -tau_i / 2))
            names, unit = ("t_s", "t_i"), "ps"
        else:
            raise self.error(f"unknown map kind {kind!r}; expected jsi or jti", "scan", "maps")
        if not half > 0 or n < 5:
            raise self.error(f"{kind} grid needs half width > 0 and >= 5 points", "scan")
        return tuple(Axis.centered(name, c, half, n, unit) for name, c in zip(names, centers))


def parse_config(text: str, path: Optional[str] = None) -> ExperimentConfig:
    cfg = ExperimentConfig(path=path)
    section = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError(f"malformed section header {raw.strip()!r}", lineno, path)
            section = line[1:-1].strip()
            if section not in SCHEMA:
                raise ConfigError(f"unknown section [{section}]; expected one of "
                                  f"{', '.join(SCHEMA)}", lineno, path)
            if section in cfg.sections:
                raise ConfigError(f"duplicate section [{section}]", lineno, path)
            cfg.sections[section] = {}
            cfg.lines[(section, None)] = lineno
            continue
        if section is None:
            raise ConfigError("key outside of any [section]", lineno, path)
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno, path)
        if key not in SCHEMA[section]:
            raise ConfigError(f"unknown key {key!r} in [{section}]", lineno, path)
        if key in cfg.sections[section]:
            raise ConfigError(f"duplicate key {key!r} in [{section}]", lineno, path)
        try:
            cfg.sections[section][key] = SCHEMA[section][key](value)
        except ValueError as exc:
            raise ConfigError(f"{section}.{key}: {exc}", lineno, path) from None
        cfg.lines[(section, key)] = lineno
    return cfg


def load_config(path) -> ExperimentConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", path=str(path)) from None
    return parse_config(text, str(path))
