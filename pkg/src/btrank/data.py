"""CSV ingestion and alignment of indicator, polarity, and income tables."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

ZONES = ("low", "middle", "high")

MISSING_POLICIES = ("drop_indicators", "drop_entities")


def _check_unique(kind: str, names) -> None:
    seen = set()
    for name in names:
        if name in seen:
            raise ValueError(f"duplicate {kind} name: {name!r}")
        seen.add(name)


@dataclass(frozen=True)
class IndicatorTable:
    """Entities-by-indicators values with per-indicator polarity and a missing mask.

    ``polarity[k]`` is +1 when larger values of indicator ``k`` are better and
    -1 when smaller values are better.  ``values[i, k]`` is meaningful only
    where ``missing[i, k]`` is False.
    """

    entities: tuple[str, ...]
    indicators: tuple[str, ...]
    values: np.ndarray
    polarity: np.ndarray
    missing: np.ndarray

    def __post_init__(self) -> None:
        m, k = len(self.entities), len(self.indicators)
        if m < 2:
            raise ValueError(f"need at least 2 entities, got {m}")
        if k < 1:
            raise ValueError("need at least 1 indicator")
        _check_unique("entity", self.entities)
        _check_unique("indicator", self.indicators)
        if self.values.shape != (m, k):
            raise ValueError(f"values must have shape {(m, k)}, got {self.values.shape}")
        if self.missing.shape != (m, k):
            raise ValueError(f"missing mask must have shape {(m, k)}, got {self.missing.shape}")
        if self.polarity.shape != (k,):
            raise ValueError(f"polarity must have shape {(k,)}, got {self.polarity.shape}")
        if not np.isin(self.polarity, (-1, 1)).all():
            raise ValueError("every polarity entry must be +1 or -1")
        if not np.isfinite(self.values[~self.missing]).all():
            raise ValueError("non-finite value outside the missing mask")

    @property
    def m(self) -> int:
        return len(self.entities)

    @property
    def k(self) -> int:
        return len(self.indicators)


@dataclass(frozen=True)
class IncomeTable:
    """Per-entity income levels with a coarse zone label for each entity."""

    entities: tuple[str, ...]
    income: np.ndarray
    zone: tuple[str, ...]

    def __post_init__(self) -> None:
        m = len(self.entities)
        if m < 1:
            raise ValueError("income table is empty")
        _check_unique("entity", self.entities)
        if self.income.shape != (m,):
            raise ValueError(f"income must have shape {(m,)}, got {self.income.shape}")
        if not np.isfinite(self.income).all() or (self.income <= 0).any():
            raise ValueError("incomes must be finite and positive")
        if len(self.zone) != m:
            raise ValueError("zone labels must match the entity count")
        for label in self.zone:
            if label not in ZONES:
                raise ValueError(f"unknown zone label {label!r}; expected one of {ZONES}")

    @property
    def m(self) -> int:
        return len(self.entities)


def _parse_number(text: str) -> float | None:
    """Parse a plain decimal, stripping thousands separators; None if not numeric."""
    cleaned = text.strip().replace(",", "")
    if not cleaned:
        return None
    try:
        return float(cleaned)
    except ValueError:
        return None


def _read_rows(path) -> list[list[str]]:
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as handle:
        rows = [row for row in csv.reader(handle) if row and any(cell.strip() for cell in row)]
    if not rows:
        raise ValueError(f"{path}: file is empty")
    return rows


def load_polarity(path) -> dict[str, int]:
    """Read an ``indicator,polarity`` file into a name -> +1/-1 mapping."""
    rows = _read_rows(path)
    if [cell.strip().lower() for cell in rows[0][:2]] != ["indicator", "polarity"]:
        raise ValueError(f"{path}: expected header 'indicator,polarity'")
    mapping: dict[str, int] = {}
    for row in rows[1:]:
        if len(row) < 2:
            raise ValueError(f"{path}: malformed row {row!r}")
        name = row[0].strip()
        if name in mapping:
            raise ValueError(f"{path}: duplicate indicator name: {name!r}")
        value = _parse_number(row[1])
        if value not in (1.0, -1.0):
            raise ValueError(f"{path}: polarity for {name!r} must be +1 or -1, got {row[1]!r}")
        mapping[name] = int(value)
    return mapping


def load_indicators(path, polarity_path) -> IndicatorTable:
    """Load an entity-by-indicator CSV plus its polarity file.

    The first column holds entity names and the header row names the
    indicators.  Empty or non-numeric cells are recorded in the missing mask.
    Every indicator must appear in the polarity file.
    """
    rows = _read_rows(path)
    header = rows[0]
    if len(header) < 2:
        raise ValueError(f"{path}: need an entity column plus at least one indicator")
    indicators = tuple(cell.strip() for cell in header[1:])
    _check_unique("indicator", indicators)

    entities: list[str] = []
    values = np.full((len(rows) - 1, len(indicators)), np.nan)
    missing = np.zeros_like(values, dtype=bool)
    for i, row in enumerate(rows[1:]):
        entities.append(row[0].strip())
        cells = row[1:]
        if len(cells) != len(indicators):
            raise ValueError(
                f"{path}: row for {row[0]!r} has {len(cells)} cells, expected {len(indicators)}"
            )
        for j, cell in enumerate(cells):
            parsed = _parse_number(cell)
            if parsed is None:
                missing[i, j] = True
            else:
                values[i, j] = parsed
    _check_unique("entity", entities)

    polarity_map = load_polarity(polarity_path)
    absent = [name for name in indicators if name not in polarity_map]
    if absent:
        raise ValueError(f"no polarity given for indicator(s): {', '.join(absent)}")
    polarity = np.array([polarity_map[name] for name in indicators], dtype=int)

    return IndicatorTable(
        entities=tuple(entities),
        indicators=indicators,
        values=values,
        polarity=polarity,
        missing=missing,
    )


def zone_for_income(income: float, low_max: float, middle_max: float) -> str:
    if income <= low_max:
        return "low"
    if income <= middle_max:
        return "middle"
    return "high"


def load_income(path, *, low_max: float = 100_000.0, middle_max: float = 200_000.0) -> IncomeTable:
    """Load an ``entity,income[,zone]`` CSV.

    When the zone column is absent or blank the label is derived from the
    income thresholds: ``income <= low_max`` is low, ``income <= middle_max``
    is middle, anything above is high.  The default cut points are arbitrary
    round numbers on the fixture's income scale; pass explicit thresholds for
    real data.
    """
    if not 0 < low_max < middle_max:
        raise ValueError("thresholds must satisfy 0 < low_max < middle_max")
    rows = _read_rows(path)
    header = [cell.strip().lower() for cell in rows[0]]
    if header[:2] != ["entity", "income"]:
        raise ValueError(f"{path}: expected header 'entity,income[,zone]'")
    has_zone = len(header) > 2 and header[2] == "zone"

    entities: list[str] = []
    incomes: list[float] = []
    zones: list[str] = []
    for row in rows[1:]:
        if len(row) < 2:
            raise ValueError(f"{path}: malformed row {row!r}")
        name = row[0].strip()
        value = _parse_number(row[1])
        if value is None or value <= 0:
            raise ValueError(f"{path}: income for {name!r} must be a positive number, got {row[1]!r}")
        label = row[2].strip().lower() if has_zone and len(row) > 2 else ""
        if not label:
            label = zone_for_income(value, low_max, middle_max)
        if label not in ZONES:
            raise ValueError(f"{path}: unknown zone {label!r} for {name!r}; expected one of {ZONES}")
        entities.append(name)
        incomes.append(value)
        zones.append(label)

    return IncomeTable(entities=tuple(entities), income=np.array(incomes), zone=tuple(zones))


def align_entities(table: IndicatorTable, income: IncomeTable) -> tuple[IndicatorTable, IncomeTable]:
    """Restrict both tables to the income table's entities, in indicator-table order.

    Indicator rows without an income entry are dropped; an income entry with
    no indicator row is an error.
    """
    known = set(table.entities)
    unknown = [name for name in income.entities if name not in known]
    if unknown:
        raise ValueError(f"income entities missing from the indicator table: {', '.join(unknown)}")

    wanted = set(income.entities)
    keep = [i for i, name in enumerate(table.entities) if name in wanted]
    order = {name: i for i, name in enumerate(income.entities)}
    idx = np.array([order[table.entities[i]] for i in keep], dtype=int)

    aligned_table = IndicatorTable(
        entities=tuple(table.entities[i] for i in keep),
        indicators=table.indicators,
        values=table.values[keep],
        polarity=table.polarity,
        missing=table.missing[keep],
    )
    aligned_income = IncomeTable(
        entities=tuple(income.entities[i] for i in idx),
        income=income.income[idx],
        zone=tuple(income.zone[i] for i in idx),
    )
    return aligned_table, aligned_income


def apply_missing_policy(table: IndicatorTable, policy: str, drop=()) -> IndicatorTable:
    """Produce a complete table by dropping incomplete indicators or named entities.

    ``drop_indicators`` removes every indicator column with any missing cell.
    ``drop_entities`` removes the named entities first, then any column still
    incomplete.  The result always has an all-False missing mask.
    """
    if policy not in MISSING_POLICIES:
        raise ValueError(f"unknown missing policy {policy!r}; expected one of {MISSING_POLICIES}")

    values, missing = table.values, table.missing
    entities = table.entities
    if policy == "drop_entities":
        unknown = [name for name in drop if name not in entities]
        if unknown:
            raise ValueError(f"cannot drop unknown entities: {', '.join(unknown)}")
        keep_rows = [i for i, name in enumerate(entities) if name not in set(drop)]
        if len(keep_rows) < 2:
            raise ValueError("dropping those entities leaves fewer than 2")
        entities = tuple(entities[i] for i in keep_rows)
        values = values[keep_rows]
        missing = missing[keep_rows]
    elif drop:
        raise ValueError("entity drop list is only valid with the drop_entities policy")

    keep_cols = ~missing.any(axis=0)
    if not keep_cols.any():
        raise ValueError("missing policy leaves no complete indicators")
    return IndicatorTable(
        entities=entities,
        indicators=tuple(name for name, k in zip(table.indicators, keep_cols) if k),
        values=values[:, keep_cols],
        polarity=table.polarity[keep_cols],
        missing=missing[:, keep_cols],
    )


def income_for_entities(income: IncomeTable, entities) -> IncomeTable:
    """Income rows for exactly the named entities, in the order given."""
    positions = {name: i for i, name in enumerate(income.entities)}
    absent = [name for name in entities if name not in positions]
    if absent:
        raise ValueError(f"no income recorded for: {', '.join(absent)}")
    idx = np.array([positions[name] for name in entities], dtype=int)
    return IncomeTable(
        entities=tuple(entities),
        income=income.income[idx],
        zone=tuple(income.zone[i] for i in idx),
    )


def subset_by_zone(table: IndicatorTable, income: IncomeTable, zones) -> tuple[IndicatorTable, IncomeTable]:
    """Keep only entities whose income zone is in ``zones`` (both tables aligned)."""
    if table.entities != income.entities:
        raise ValueError("tables must be aligned before zone subsetting")
    zones = tuple(zones)
    if not zones:
        raise ValueError("no zones requested")
    for label in zones:
        if label not in ZONES:
            raise ValueError(f"unknown zone label {label!r}; expected one of {ZONES}")
    keep = [i for i, label in enumerate(income.zone) if label in set(zones)]
    if len(keep) < 2:
        raise ValueError(f"zone subset {zones} leaves fewer than 2 entities")
    subset_table = IndicatorTable(
        entities=tuple(table.entities[i] for i in keep),
        indicators=table.indicators,
        values=table.values[keep],
        polarity=table.polarity,
        missing=table.missing[keep],
    )
    subset_income = IncomeTable(
        entities=tuple(income.entities[i] for i in keep),
        income=income.income[keep],
        zone=tuple(income.zone[i] for i in keep),
    )
    return subset_table, subset_income


def load_dataset(indicators_path, polarity_path, income_path, *,
                 low_max: float = 100_000.0, middle_max: float = 200_000.0):
    """Load and align the indicator and income tables in one call."""
    table = load_indicators(indicators_path, polarity_path)
    income = load_income(income_path, low_max=low_max, middle_max=middle_max)
    return align_entities(table, income)
