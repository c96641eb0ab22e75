"""Per-user inter-keystroke timing model.

The model keeps the raw interval observations alongside a per-ordered-pair
summary (mean, sample std, count) and the average standard deviation (ASD)
over pairs seen at least twice. ASD is the consistency proxy: careful,
even typists have a small ASD and are easier to attack.
"""

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConsistencyFailure, NonPositiveDelta, SchemaMismatch

MODEL_VERSION = 1


@dataclass(frozen=True)
class PairStats:
    key_a: str
    key_b: str
    mean_ms: float
    std_ms: float
    count: int


@dataclass(frozen=True)
class TimingModel:
    observations: tuple                  # raw (key_a, key_b, delta_ms) rows
    stats: dict = field(repr=False)      # (key_a, key_b) -> PairStats
    asd_ms: float = 0.0

    @property
    def pair_count(self) -> int:
        return len(self.stats)


def train(pairs) -> TimingModel:
    """Group interval observations by ordered key pair and summarize.

    Means and stds use math.fsum, so the result is exactly invariant under
    permutation of the input. Std is the n-1 sample form, 0 for singletons.
    """
    observations = []
    groups = {}
    for key_a, key_b, delta_ms in pairs:
        delta_ms = float(delta_ms)
        if delta_ms <= 0:
            raise NonPositiveDelta(
                f"pair ({key_a},{key_b}) has interval {delta_ms} ms"
            )
        observations.append((key_a, key_b, delta_ms))
        groups.setdefault((key_a, key_b), []).append(delta_ms)

    stats = {}
    for (key_a, key_b), deltas in sorted(groups.items()):
        n = len(deltas)
        mean = math.fsum(deltas) / n
        if n > 1:
            std = math.sqrt(math.fsum((d - mean) ** 2 for d in deltas) / (n - 1))
        else:
            std = 0.0
        stats[(key_a, key_b)] = PairStats(key_a, key_b, mean, std, n)

    repeated = [s.std_ms for s in stats.values() if s.count >= 2]
    asd = math.fsum(repeated) / len(repeated) if repeated else 0.0
    return TimingModel(observations=tuple(observations), stats=stats, asd_ms=asd)


def tolerance(model: TimingModel, delta_ms: float, pct: float,
              std_coeff: float) -> float:
    """Matching half-width: pct of the interval plus std_coeff times ASD."""
    if delta_ms <= 0:
        raise ValueError(f"interval must be positive, got {delta_ms}")
    if pct < 0 or std_coeff < 0:
        raise ValueError("pct and std_coeff must be nonnegative")
    return pct * delta_ms + std_coeff * model.asd_ms


def candidates(model: TimingModel, delta_ms: float, t_f: float,
               allowed_first) -> list:
    """All pairs whose mean lies within t_f of the interval, first key allowed.

    Returned as (key_a, key_b, mean_ms) sorted by (key_a, key_b).
    """
    if t_f < 0:
        raise ValueError(f"t_f must be nonnegative, got {t_f}")
    out = []
    for (key_a, key_b), s in sorted(model.stats.items()):
        if key_a in allowed_first and s.mean_ms - t_f <= delta_ms <= s.mean_ms + t_f:
            out.append((key_a, key_b, s.mean_ms))
    return out


def save_model(model: TimingModel, path) -> None:
    doc = {
        "version": MODEL_VERSION,
        "observations": [
            {"a": a, "b": b, "delta_ms": d} for a, b, d in model.observations
        ],
        "analysis": [
            {"a": s.key_a, "b": s.key_b, "mean_ms": s.mean_ms,
             "std_ms": s.std_ms, "count": s.count}
            for s in model.stats.values()
        ],
        "asd_ms": model.asd_ms,
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def load_model(path) -> TimingModel:
    """Read a model file and verify its analysis against the raw rows."""
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaMismatch(f"{path}: not valid JSON: {exc}") from None
    for fld in ("version", "observations", "analysis", "asd_ms"):
        if fld not in doc:
            raise SchemaMismatch(f"{path}: missing field {fld!r}")
    if doc["version"] != MODEL_VERSION:
        raise SchemaMismatch(f"{path}: unsupported version {doc['version']!r}")
    try:
        observations = [(row["a"], row["b"], float(row["delta_ms"]))
                        for row in doc["observations"]]
        stored = {
            (row["a"], row["b"]): PairStats(row["a"], row["b"],
                                            float(row["mean_ms"]),
                                            float(row["std_ms"]),
                                            int(row["count"]))
            for row in doc["analysis"]
        }
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaMismatch(f"{path}: malformed row: {exc!r}") from None

    rebuilt = train(observations)
    if stored != rebuilt.stats:
        raise ConsistencyFailure(
            f"{path}: analysis table disagrees with recomputation from observations"
        )
    if float(doc["asd_ms"]) != rebuilt.asd_ms:
        raise ConsistencyFailure(
            f"{path}: asd_ms {doc['asd_ms']} != recomputed {rebuilt.asd_ms}"
        )
    return rebuilt
