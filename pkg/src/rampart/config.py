"""Runtime settings: caps, determinant strategy, root tolerance, threads."""
from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, fields, replace

from . import potts, ramified, reptheory, setpart, transfer
from .errors import ValidationError

STRATEGIES = ("auto", "elimination", "interpolation", "both")


@dataclass(frozen=True)
class Config:
    bell_cap: int = setpart.BELL_CAP
    basis_cap: int = ramified.BASIS_CAP
    dim_cap: int = potts.DIM_CAP
    state_cap: int = transfer.STATE_CAP
    brute_cap: int = transfer.BRUTE_CAP
    gram_cap: int = reptheory.GRAM_CAP
    det_strategy: str = "auto"
    root_tol: float = 1e-10
    threads: int = 1

    def __post_init__(self):
        for f in fields(self):
            if f.name.endswith("_cap") and getattr(self, f.name) <= 0:
                raise ValidationError(f"{f.name} must be positive")
        if self.det_strategy not in STRATEGIES:
            raise ValidationError(f"det_strategy must be one of {', '.join(STRATEGIES)}")
        if not 0 < self.root_tol < 1:
            raise ValidationError("root_tol must lie in (0, 1)")
        if self.threads < 1:
            raise ValidationError("threads must be >= 1")

    def apply(self) -> None:
        """Install the caps into the modules that enforce them."""
        setpart.BELL_CAP = self.bell_cap
        potts.DIM_CAP = self.dim_cap
        transfer.STATE_CAP = self.state_cap
        transfer.BRUTE_CAP = self.brute_cap
        reptheory.GRAM_CAP = self.gram_cap


def _convert(name: str, raw: str):
    kinds = {f.name: f.type for f in fields(Config)}
    if name not in kinds:
        raise ValidationError(f"unknown config key {name!r}")
    kind = kinds[name]
    try:
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
    except ValueError:
        raise ValidationError(f"config key {name}: cannot parse {raw!r} as {kind}") from None
    return raw.strip().strip('"').strip("'")


def load_config(path: str | None = None, overrides: dict | None = None) -> Config:
    """Defaults < config file (key = value lines) < RAMPART_THREADS < overrides."""
    values: dict = {}
    if path:
        parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
        try:
            with open(path) as fh:
                parser.read_string("[rampart]\n" + fh.read())
        except OSError as exc:
            raise ValidationError(f"cannot read config {path}: {exc}") from None
        except configparser.Error as exc:
            raise ValidationError(f"config {path}: {exc}") from None
        for k, v in parser["rampart"].items():
            values[k] = _convert(k, v)
    env = os.environ.get("RAMPART_THREADS")
    if env:
        values["threads"] = _convert("threads", env)
    for k, v in (overrides or {}).items():
        if v is not None:
            values[k] = v
    return replace(Config(), **values)
