"""Monte Carlo experiments: simulate, transform, estimate, aggregate into tables.

Experiments are described by a flat, sectioned key/value text format::

    # comments start with '#'
    [experiment]
    n = 2000
    replications = 200
    bandwidth = n^0.8
    seed = 0
    output = table.csv          # optional
    truncation = 4000           # optional, default 2n

    [model farima(0,0.4,0)]     # section name is the model id
    d = 0.4
    kind = stationary           # or type1
    ar = -0.3                   # comma separated, optional
    ma = 0.7
    law = t                     # gaussian, t or abs_t
    nu = 10
    standardize = true

    [transform X^2]             # section name is the transform id
    spec = pow:2
    rank = 2                    # optional; otherwise derived
    models = farima(0,0.4,0)    # optional restriction, ';' separated
    law = gaussian              # optional innovation override (also nu, standardize)
    offset = 0.76               # call/put only: strike = marginal mean + offset

Replication ``r`` is simulated with seed ``seed + r`` whatever the worker
count, and rows come out in config order, so output is byte-for-byte
reproducible.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .farima import Kind, ProcessSpec, marginal_mean, simulate
from .innovations import InnovationSpec, Law
from .power_rank import (
    MarginalSampler,
    analytic_option_derivatives,
    empirical_cdf_pdf,
    option_power_rank,
    power_rank,
)
from .spectral import DegenerateSeriesError, default_bandwidth, gph_estimate
from .theory import (
    Label,
    MemoryClass,
    classify_spectral,
    classify_square_antipersistent,
    classify_type1_square,
)
from .transforms import PRESETS, Transform, TransformKind, apply_values, parse_transform

__all__ = [
    "ConfigError",
    "ModelEntry",
    "TransformEntry",
    "ExperimentConfig",
    "TableRow",
    "parse_config",
    "load_config",
    "run_experiment",
    "table_config",
    "reproduce_table",
    "rows_to_csv",
    "render_rows",
    "theory_for",
    "CSV_HEADER",
    "TABLE_IDS",
]

CSV_HEADER = ["model", "d", "transform", "rank", "theory", "mean_dhat", "sd_dhat", "N", "n", "degenerate_count"]
TABLE_IDS = ("T1", "T2", "T4", "T5")
_CATALOG_RANKS = {t.spec_string: r for t, r in PRESETS.values()}
_RANK_SAMPLE_REPS = 4


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ModelEntry:
    id: str
    spec: ProcessSpec


@dataclass(frozen=True)
class TransformEntry:
    id: str
    transform: Transform
    rank: int | None = None
    models: tuple[str, ...] = ()
    innovation: dict = field(default_factory=dict, hash=False)
    offset: float | None = None

    def applies_to(self, model_id: str) -> bool:
        return not self.models or model_id in self.models


@dataclass
class ExperimentConfig:
    models: list[ModelEntry]
    transforms: list[TransformEntry]
    n: int
    replications: int
    bandwidth: str = "n^0.8"
    seed: int = 0
    output: str | None = None
    truncation: int | None = None

    def __post_init__(self):
        if self.n < 16:
            raise ConfigError("n must be >= 16")
        if self.replications < 1:
            raise ConfigError("replications must be >= 1")
        if not self.models or not self.transforms:
            raise ConfigError("need at least one model and one transform")
        bandwidth_for(self.bandwidth, self.n)

    def to_text(self) -> str:
        out = ["[experiment]", f"n = {self.n}", f"replications = {self.replications}"]
        out += [f"bandwidth = {self.bandwidth}", f"seed = {self.seed}"]
        if self.output:
            out.append(f"output = {self.output}")
        if self.truncation:
            out.append(f"truncation = {self.truncation}")
        for m in self.models:
            s = m.spec
            out += ["", f"[model {m.id}]", f"d = {s.d!r}", f"kind = {s.kind.value}"]
            if s.ar:
                out.append("ar = " + ", ".join(repr(v) for v in s.ar))
            if s.ma:
                out.append("ma = " + ", ".join(repr(v) for v in s.ma))
            out += _innovation_lines(s.innovation)
        for t in self.transforms:
            out += ["", f"[transform {t.id}]", f"spec = {t.transform.spec_string}"]
            if t.rank is not None:
                out.append(f"rank = {t.rank}")
            if t.models:
                out.append("models = " + "; ".join(t.models))
            if t.offset is not None:
                out.append(f"offset = {t.offset!r}")
            for k, v in t.innovation.items():
                out.append(f"{k} = {str(v).lower() if isinstance(v, bool) else v}")
        return "\n".join(out) + "\n"


def _innovation_lines(inn: InnovationSpec) -> list[str]:
    lines = [f"law = {inn.law.value}"]
    if inn.nu is not None:
        lines.append(f"nu = {inn.nu!r}")
    lines.append(f"standardize = {str(inn.standardize).lower()}")
    return lines


# -- config parsing ---------------------------------------------------------


def _parse_bool(v: str) -> bool:
    low = v.strip().lower()
    if low in ("true", "yes", "1"):
        return True
    if low in ("false", "no", "0"):
        return False
    raise ConfigError(f"not a boolean: {v!r}")


def _parse_floats(v: str) -> tuple[float, ...]:
    v = v.strip()
    return tuple(float(x) for x in v.split(",")) if v else ()


def _innovation_from(kv: dict, base: InnovationSpec | None = None) -> InnovationSpec:
    base = base or InnovationSpec()
    law = Law(kv.get("law", base.law.value))
    nu = float(kv["nu"]) if "nu" in kv else (base.nu if base.nu is not None else 10.0)
    std = _parse_bool(kv["standardize"]) if "standardize" in kv else base.standardize
    return InnovationSpec(law, nu, std)


def parse_config(text: str) -> ExperimentConfig:
    """Parse the sectioned key/value format described in the module docstring.

    Raises
    ------
    ConfigError
        On unknown sections or keys, malformed values or invalid models.
    """
    sections: list[tuple[str, str, dict]] = []
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            head = line[1:-1].strip()
            kind, _, name = head.partition(" ")
            if kind not in ("experiment", "model", "transform"):
                raise ConfigError(f"line {lineno}: unknown section [{head}]")
            if kind != "experiment" and not name.strip():
                raise ConfigError(f"line {lineno}: [{kind}] needs an id")
            current = {}
            sections.append((kind, name.strip(), current))
            continue
        if current is None or "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value' inside a section")
        key, _, value = line.partition("=")
        current[key.strip()] = value.strip()

    exp = [kv for kind, _, kv in sections if kind == "experiment"]
    if len(exp) != 1:
        raise ConfigError("exactly one [experiment] section is required")
    try:
        return _build_config(exp[0], sections)
    except ConfigError:
        raise
    except (ValueError, KeyError) as err:
        raise ConfigError(str(err)) from err


_EXPERIMENT_KEYS = {"n", "replications", "bandwidth", "seed", "output", "truncation"}
_MODEL_KEYS = {"d", "kind", "ar", "ma", "law", "nu", "standardize"}
_TRANSFORM_KEYS = {"spec", "rank", "models", "law", "nu", "standardize", "offset"}


def _check_keys(kv, allowed, where):
    unknown = set(kv) - allowed
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")


def _build_config(exp: dict, sections) -> ExperimentConfig:
    _check_keys(exp, _EXPERIMENT_KEYS, "[experiment]")
    models, transforms = [], []
    seen = set()
    for kind, name, kv in sections:
        if kind == "experiment":
            continue
        if (kind, name) in seen:
            raise ConfigError(f"duplicate [{kind} {name}]")
        seen.add((kind, name))
        if kind == "model":
            _check_keys(kv, _MODEL_KEYS, f"[model {name}]")
            spec = ProcessSpec(
                d=float(kv["d"]),
                ar=_parse_floats(kv.get("ar", "")),
                ma=_parse_floats(kv.get("ma", "")),
                kind=Kind(kv.get("kind", "stationary")),
                innovation=_innovation_from(kv),
            )
            models.append(ModelEntry(name, spec))
        else:
            _check_keys(kv, _TRANSFORM_KEYS, f"[transform {name}]")
            t = parse_transform(kv["spec"]) if "spec" in kv else parse_transform(name)
            offset = float(kv["offset"]) if "offset" in kv else None
            if offset is not None and t.kind not in (TransformKind.CALL, TransformKind.PUT):
                raise ConfigError(f"[transform {name}]: offset applies only to call/put")
            inn = {k: kv[k] for k in ("law", "nu", "standardize") if k in kv}
            transforms.append(
                TransformEntry(
                    name,
                    t,
                    rank=int(kv["rank"]) if "rank" in kv else None,
                    models=tuple(m.strip() for m in kv["models"].split(";")) if kv.get("models") else (),
                    innovation=inn,
                    offset=offset,
                )
            )
    ids = {m.id for m in models}
    for t in transforms:
        missing = set(t.models) - ids
        if missing:
            raise ConfigError(f"[transform {t.id}] refers to unknown models {sorted(missing)}")
    return ExperimentConfig(
        models=models,
        transforms=transforms,
        n=int(exp.get("n", 2000)),
        replications=int(exp.get("replications", 200)),
        bandwidth=exp.get("bandwidth", "n^0.8"),
        seed=int(exp.get("seed", 0)),
        output=exp.get("output") or None,
        truncation=int(exp["truncation"]) if exp.get("truncation") else None,
    )


def load_config(path) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as err:
        raise ConfigError(f"cannot read config {path}: {err}") from err
    return parse_config(text)


def bandwidth_for(rule: str, n: int) -> int:
    """``n^a`` (``n^0.8`` gives the guarded ``floor(n^{4/5})``) or a literal integer."""
    rule = rule.strip().replace(" ", "")
    if rule in ("n^0.8", "n^4/5"):
        return default_bandwidth(n)
    if rule.startswith("n^"):
        try:
            a = float(rule[2:])
        except ValueError:
            raise ConfigError(f"bad bandwidth rule {rule!r}") from None
        if not 0 < a < 1:
            raise ConfigError("bandwidth exponent must lie in (0, 1)")
        return int(math.floor(n**a))
    try:
        return int(rule)
    except ValueError:
        raise ConfigError(f"bad bandwidth rule {rule!r}") from None


# -- theory per cell --------------------------------------------------------


def theory_for(spec: ProcessSpec, t: Transform, rank: int | None) -> MemoryClass | None:
    """Theoretical memory class of ``K(X)`` where one is available, else None."""
    d = spec.d
    is_identity = t.kind is TransformKind.POLYNOMIAL and t.spec_string == "pow:1"
    is_square = t.kind is TransformKind.POLYNOMIAL and t.spec_string == "pow:2"
    if spec.kind is Kind.TYPE_I:
        return classify_type1_square(d) if is_square else None
    if is_identity:
        return MemoryClass(Label.LM, "linear process", d) if d != 0 else MemoryClass(Label.LM0, "linear process")
    if d > 0:
        if rank is None:
            return None
        mc = classify_spectral(d, rank)
        return None if mc.label is Label.OUT_OF_SCOPE else mc
    if d < 0 and is_square and not spec.ar and not spec.ma:
        return classify_square_antipersistent(d)
    return None


def _theory_text(mc: MemoryClass | None) -> str:
    if mc is None or mc.memory is None:
        return ""
    return f"{mc.memory:g}"


# -- rows -------------------------------------------------------------------


@dataclass(frozen=True)
class TableRow:
    model: str
    d: float
    transform: str
    rank: int | None
    theory: MemoryClass | None
    mean_dhat: float
    sd_dhat: float
    N: int
    n: int
    degenerate_count: int

    def csv_fields(self) -> list[str]:
        return [
            self.model,
            f"{self.d:g}",
            self.transform,
            "" if self.rank is None else str(self.rank),
            _theory_text(self.theory),
            _num(self.mean_dhat),
            _num(self.sd_dhat),
            str(self.N),
            str(self.n),
            str(self.degenerate_count),
        ]


def _num(v: float) -> str:
    return "NA" if not math.isfinite(v) else f"{v:.6f}"


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow(r.csv_fields())
    return buf.getvalue()


def render_rows(rows) -> str:
    table = [CSV_HEADER] + [r.csv_fields() for r in rows]
    widths = [max(len(row[i]) for row in table) for i in range(len(CSV_HEADER))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in table]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


# -- running ----------------------------------------------------------------


@dataclass(frozen=True)
class _Cell:
    model: ModelEntry
    spec: ProcessSpec
    entry: TransformEntry
    transform: Transform


def _effective_spec(spec: ProcessSpec, entry: TransformEntry) -> ProcessSpec:
    if not entry.innovation:
        return spec
    return replace(spec, innovation=_innovation_from(entry.innovation, spec.innovation))


def _cells(cfg: ExperimentConfig) -> list[_Cell]:
    M = cfg.truncation or 2 * cfg.n
    cells = []
    for m in cfg.models:
        for e in cfg.transforms:
            if not e.applies_to(m.id):
                continue
            spec = _effective_spec(m.spec, e)
            t = e.transform
            if e.offset is not None:
                # strike placed relative to the exact marginal mean of the truncated model
                t = replace(t, threshold=marginal_mean(spec, M) + e.offset)
            cells.append(_Cell(m, spec, e, t))
    return cells


def _replicate_chunk(spec, transforms, n, M, m, seeds):
    out = np.full((len(seeds), len(transforms)), np.nan)
    for i, seed in enumerate(seeds):
        x = simulate(spec, n, truncation=M, seed=seed).values
        for j, t in enumerate(transforms):
            try:
                out[i, j] = gph_estimate(apply_values(t, x), m=m).d_hat
            except DegenerateSeriesError:
                pass
    return out


def _chunks(seq, size):
    return [seq[i : i + size] for i in range(0, len(seq), size)]


def _marginal_sample(spec, cfg, M):
    reps = min(_RANK_SAMPLE_REPS, cfg.replications)
    xs = [simulate(spec, cfg.n, truncation=M, seed=cfg.seed + r).values for r in range(reps)]
    return np.concatenate(xs) - marginal_mean(spec, M)


def _rank_for(cell: _Cell, cfg: ExperimentConfig, M: int, cache: dict) -> int | None:
    e, t, spec = cell.entry, cell.transform, cell.spec
    if e.rank is not None:
        return e.rank
    if spec.kind is Kind.TYPE_I:
        return _CATALOG_RANKS.get(t.spec_string)
    if t.kind in (TransformKind.CALL, TransformKind.PUT):
        if spec not in cache:
            cache[spec] = _marginal_sample(spec, cfg, M)
        y = cache[spec]
        cdf, pdf = empirical_cdf_pdf(y)
        offset = t.threshold - marginal_mean(spec, M)
        first, second = analytic_option_derivatives(offset, cdf, pdf)
        if t.kind is TransformKind.PUT:
            first = first - 1.0  # d/dy E(C - y - X)^+ = -G(C - mu)
        return option_power_rank(first, second, sd=float(np.std(y)))
    if t.spec_string in _CATALOG_RANKS:
        return _CATALOG_RANKS[t.spec_string]
    if spec not in cache:
        cache[spec] = _marginal_sample(spec, cfg, M)
    return power_rank(t, MarginalSampler.empirical(cache[spec])).rank


def run_experiment(cfg: ExperimentConfig, threads: int = 1) -> list[TableRow]:
    """Run every (model, transform) cell of ``cfg``; one row per cell, config order.

    Cells sharing the same effective process share simulated paths.  Degenerate
    transformed series (e.g. all zeros) are excluded from the mean and sd and
    counted in ``degenerate_count``.
    """
    n = cfg.n
    M = cfg.truncation or 2 * n
    m = bandwidth_for(cfg.bandwidth, n)
    cells = _cells(cfg)
    groups: dict[ProcessSpec, list[int]] = {}
    for i, c in enumerate(cells):
        groups.setdefault(c.spec, []).append(i)

    seeds = [cfg.seed + r for r in range(cfg.replications)]
    per_task = max(1, math.ceil(len(seeds) / max(1, 4 * threads)))
    jobs = []
    for spec, idx in groups.items():
        ts = [cells[i].transform for i in idx]
        for chunk in _chunks(seeds, per_task):
            jobs.append((spec, ts, n, M, m, chunk))

    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_replicate_chunk_star, jobs))
    else:
        results = [_replicate_chunk(*job) for job in jobs]

    estimates = np.full((len(cells), cfg.replications), np.nan)
    pos = 0
    for spec, idx in groups.items():
        blocks = []
        for _ in _chunks(seeds, per_task):
            blocks.append(results[pos])
            pos += 1
        arr = np.vstack(blocks)
        for j, i in enumerate(idx):
            estimates[i] = arr[:, j]

    cache: dict = {}
    rows = []
    for i, c in enumerate(cells):
        est = estimates[i]
        ok = est[np.isfinite(est)]
        rank = _rank_for(c, cfg, M, cache)
        mean = math.fsum(ok) / len(ok) if len(ok) else math.nan
        sd = float(np.std(ok, ddof=1)) if len(ok) > 1 else math.nan
        rows.append(
            TableRow(
                model=c.model.id,
                d=c.spec.d,
                transform=c.entry.id,
                rank=rank,
                theory=theory_for(c.spec, c.transform, rank),
                mean_dhat=mean,
                sd_dhat=sd,
                N=int(len(ok)),
                n=n,
                degenerate_count=int(len(est) - len(ok)),
            )
        )
    return rows


def _replicate_chunk_star(job):
    return _replicate_chunk(*job)


# -- table presets ----------------------------------------------------------

_FULL_SIZE = {"T1": (2000, 2000), "T2": (2000, 2000), "T4": (2000, 2000), "T5": (2000, 2**20)}
_STATIONARY_TRANSFORMS = ["X", "X^2", "X^3", "X^4", "X^3-3X", "X^4-6X^2", "sin(X)", "exp(X)", "I(X<=0.1)"]
_T4_TRANSFORMS = ["X^2", "X^3", "X^4", "X^3-3X", "X^4-6X^2"]
# C - mu offsets of the option table rows, per memory parameter
_T5_OFFSETS = {
    0.2: (-6.89, -5.69, -2.19, 1.81, 37.61, 38.31),
    0.4: (-44.74, -43.24, -39.74, -35.74, -0.06, 0.76),
}


def _preset_entries(names, gaussian_exp=True, t5_square=False):
    out = []
    for name in names:
        t, rank = PRESETS[name]
        inn = {}
        if gaussian_exp and name == "exp(X)":
            inn = {"law": "gaussian"}
        if t5_square and name == "X^2":
            inn = {"nu": "5"}
        out.append(TransformEntry(name, t, rank=rank, innovation=inn))
    return out


def _offset_id(off: float) -> str:
    return f"(Y+{-off:g})+" if off < 0 else f"(Y-{off:g})+"


def table_config(
    table_id: str, scale: float = 1.0, seed: int = 0, N: int | None = None, n: int | None = None
) -> ExperimentConfig:
    """Experiment grid of one of the simulation tables, with N and n scaled."""
    table_id = table_id.upper()
    if table_id not in _FULL_SIZE:
        raise ConfigError(f"unknown table {table_id!r}; choose from {', '.join(TABLE_IDS)}")
    if not 0 < scale <= 1:
        raise ConfigError("scale must lie in (0, 1]")
    full_N, full_n = _FULL_SIZE[table_id]
    N = N if N is not None else max(2, round(full_N * scale))
    n = n if n is not None else max(64, round(full_n * scale))
    t10 = InnovationSpec(Law.STUDENT_T, 10.0)

    if table_id == "T1":
        models = [ModelEntry(f"FARIMA(0,{d:g},0)", ProcessSpec(d, innovation=t10)) for d in (-0.8, -0.4, -0.2, 0.2, 0.4)]
        transforms = _preset_entries(_STATIONARY_TRANSFORMS)
    elif table_id == "T2":
        models = []
        for d in (0.2, 0.4):
            models.append(ModelEntry(f"FARIMA(1,{d:g},0)", ProcessSpec(d, ar=(-0.3,), innovation=t10)))
        for d in (0.2, 0.4):
            models.append(ModelEntry(f"FARIMA(1,{d:g},1)", ProcessSpec(d, ar=(-0.4,), ma=(0.7,), innovation=t10)))
        transforms = _preset_entries(_STATIONARY_TRANSFORMS)
    elif table_id == "T4":
        models = [
            ModelEntry(f"TypeI({d:g})", ProcessSpec(d, kind=Kind.TYPE_I, innovation=t10))
            for d in (0.55, 0.65, 0.75, 0.85, 0.95)
        ]
        transforms = _preset_entries(_T4_TRANSFORMS, gaussian_exp=False, t5_square=True)
    else:
        abs_t = InnovationSpec(Law.ABS_STUDENT_T, 10.0)
        models = [ModelEntry(f"FARIMA(0,{d:g},0)", ProcessSpec(d, innovation=abs_t)) for d in (0.2, 0.4)]
        transforms = []
        for d, offsets in _T5_OFFSETS.items():
            for off in offsets:
                transforms.append(
                    TransformEntry(
                        _offset_id(off),
                        parse_transform("call:0"),
                        models=(f"FARIMA(0,{d:g},0)",),
                        offset=off,
                    )
                )
    return ExperimentConfig(models=models, transforms=transforms, n=n, replications=N, seed=seed)


def reproduce_table(
    table_id: str, scale: float = 1.0, seed: int = 0, threads: int = 1, N: int | None = None, n: int | None = None
) -> list[TableRow]:
    return run_experiment(table_config(table_id, scale, seed, N, n), threads=threads)
