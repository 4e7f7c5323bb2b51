"""Run configuration, result serialization, and atomic output."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .model import DomainError, WeightVector, normalize_weights
from .search import SearchConfig

COMMANDS = ("measure3d", "mc", "rip-nec", "rip-suff", "optimize", "certify", "oracle", "curves")
FORMATS = ("json", "csv")
# search settings that may also be given at the top level of a config file or as flags
SEARCH_KEYS = ("restarts", "grid_steps", "tolerance", "max_iters")
SIGNIFICANT_DIGITS = 15


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    n: int | None = None
    k: int = 1
    weights: str = "ones"
    measure: str | None = None
    mode: str = "U"
    samples: int = 1_000_000
    seed: int = 0
    trials: int = 200
    max_l: int = 10
    search: SearchConfig = field(default_factory=SearchConfig)
    certify: bool = False
    output: str | None = None
    format: str = "json"

    def validate(self) -> RunConfig:
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}")
        if self.k < 1:
            raise ConfigError("k must be >= 1")
        if self.n is not None and self.n < 1:
            raise ConfigError("n must be >= 1")
        if self.samples < 1 or self.trials < 1 or self.max_l < 1:
            raise ConfigError("samples, trials and max_l must be positive")
        if self.mode not in ("U", "NU"):
            raise ConfigError("mode must be U or NU")
        if self.seed < 0:
            raise ConfigError("seed must be nonnegative")
        return self

    def to_dict(self) -> dict:
        d = asdict(self)
        d["search"] = self.search.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> RunConfig:
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known - set(SEARCH_KEYS)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        d = dict(d)
        search = dict(d.pop("search", None) or {})
        for key in SEARCH_KEYS:
            if key in d:
                search[key] = d.pop(key)
        try:
            search_cfg = SearchConfig(**search)
        except (TypeError, DomainError) as exc:
            raise ConfigError(str(exc)) from None
        if "command" not in d:
            raise ConfigError("config needs a command")
        return cls(search=search_cfg, **d).validate()

    def weight_vectors(self) -> list[WeightVector]:
        """Resolve the ``weights`` field: ``ones``, a comma list, or ``random:count:seed``."""
        spec = str(self.weights).strip()
        if spec == "ones":
            if self.n is None:
                raise ConfigError("weights=ones needs n")
            return [WeightVector.ones(self.n)]
        if spec.startswith("random:"):
            parts = spec.split(":")
            if len(parts) != 3 or self.n is None:
                raise ConfigError("random weights need the form random:count:seed and n")
            try:
                count, seed = int(parts[1]), int(parts[2])
            except ValueError:
                raise ConfigError(f"bad random weight spec {spec!r}") from None
            rng = np.random.default_rng(seed)
            return [normalize_weights(rng.uniform(0.05, 1.0, self.n)) for _ in range(count)]
        try:
            raw = [float(x) for x in spec.split(",")]
        except ValueError:
            raise ConfigError(f"cannot parse weights {spec!r}") from None
        if self.n is not None and len(raw) != self.n:
            raise ConfigError(f"{len(raw)} weights given but n={self.n}")
        try:
            return [normalize_weights(raw)]
        except DomainError as exc:
            raise ConfigError(str(exc)) from None

    def resolved_n(self) -> int:
        if self.n is not None:
            return self.n
        return self.weight_vectors()[0].n


def clean(obj):
    """Convert to JSON-ready builtins with floats rounded to 15 significant digits.

    Infinities and NaN become the strings ``"inf"``, ``"-inf"`` and ``"nan"``.
    """
    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [clean(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return float(f"{x:.{SIGNIFICANT_DIGITS}g}")
    if obj is None or isinstance(obj, str):
        return obj
    if hasattr(obj, "to_dict"):
        return clean(obj.to_dict())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def parse_number(x):
    """Inverse of the infinity encoding used by ``clean``."""
    if x == "inf":
        return math.inf
    if x == "-inf":
        return -math.inf
    if x == "nan":
        return math.nan
    return x


def document(config: RunConfig, result, version: str, timestamp: str) -> dict:
    return {
        "tool": "regcomply",
        "version": version,
        "timestamp": timestamp,
        "seed": config.seed,
        "config": clean(config.to_dict()),
        "result": clean(result),
    }


def dumps_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def load_document(text: str) -> tuple[RunConfig, dict]:
    """Re-parse an emitted JSON document into its config and result."""
    doc = json.loads(text)
    return RunConfig.from_dict(doc["config"]), doc["result"]


def flatten(obj, prefix: str = "") -> list[tuple[str, object]]:
    if isinstance(obj, dict):
        out = []
        for k in sorted(obj):
            out.extend(flatten(obj[k], f"{prefix}.{k}" if prefix else str(k)))
        return out
    if isinstance(obj, list) and obj and all(isinstance(v, (dict, list)) for v in obj):
        out = []
        for i, v in enumerate(obj):
            out.extend(flatten(v, f"{prefix}[{i}]"))
        return out
    if isinstance(obj, list):
        return [(prefix, " ".join(str(v) for v in obj))]
    return [(prefix, obj)]


def dumps_csv(doc: dict) -> str:
    """Flat projection: a table when the result carries ``rows``, else key/value pairs."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    result = doc["result"]
    if isinstance(result, dict) and "rows" in result and "columns" in result:
        writer.writerow(result["columns"])
        writer.writerows(result["rows"])
    else:
        writer.writerow(["key", "value"])
        writer.writerow(["version", doc["version"]])
        writer.writerow(["seed", doc["seed"]])
        writer.writerows(flatten(doc["config"], "config"))
        writer.writerows(flatten(result, "result"))
    return buf.getvalue()


def write_atomic(path: str, text: str):
    """Write via a temporary file in the target directory, then rename over the target."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".regcomply-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
