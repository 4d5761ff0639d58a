"""Counter catalog: the taxonomy of collectable counters and backend event names.

The catalog is loaded from ``data/counter_events.tsv``; its line order fixes
each counter's canonical index, which downstream passes use whenever a
deterministic counter ordering is required.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

from .diagnostics import (
    CatalogError,
    UNKNOWN_COUNTER,
    UNKNOWN_TYPE,
    UNSUPPORTED_COUNTER,
)
from .reader import Clause

BACKENDS = ("papi", "soft")


@dataclass(frozen=True, order=True)
class CounterId:
    counter_type: str
    name: str

    @property
    def dotted(self) -> str:
        return f"{self.counter_type}.{self.name}"

    def __str__(self) -> str:
        return self.dotted


@dataclass(frozen=True)
class CatalogEntry:
    id: CounterId
    canonical_index: int
    backend_events: dict[str, str]  # backend name -> event name
    description: str

    @property
    def papi_event(self) -> str | None:
        return self.backend_events.get("papi")


def _load_entries() -> list[CatalogEntry]:
    entries: list[CatalogEntry] = []
    data = resources.files("edpm.data").joinpath("counter_events.tsv").read_text()
    columns: list[str] | None = None
    for raw in data.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = [field.strip() for field in line.split("\t")]
        if columns is None:  # first data row names the columns
            columns = fields
            continue
        row = dict(zip(columns, fields))
        counter_type, _, name = row["canonical"].partition(".")
        events = {
            column: value
            for column, value in row.items()
            if column not in ("canonical", "description") and value != "-"
        }
        entries.append(
            CatalogEntry(
                id=CounterId(counter_type, name),
                canonical_index=len(entries),
                backend_events=events,
                description=row.get("description", ""),
            )
        )
    return entries


_ENTRIES = _load_entries()
_BY_ID = {entry.id: entry for entry in _ENTRIES}
_BY_TYPE: dict[str, list[CounterId]] = {}
for _entry in _ENTRIES:
    _BY_TYPE.setdefault(_entry.id.counter_type, []).append(_entry.id)

TYPES = tuple(_BY_TYPE)
CATALOG_SIZE = len(_ENTRIES)


def entries() -> tuple[CatalogEntry, ...]:
    return tuple(_ENTRIES)

def canonical_index(counter: CounterId) -> int:
    return _BY_ID[counter].canonical_index


def sort_counters(counters) -> tuple[CounterId, ...]:
    """Order counters by their canonical catalog index."""
    return tuple(sorted(set(counters), key=canonical_index))


def expand_all() -> tuple[CounterId, ...]:
    """Every counter in the catalog, in canonical order."""
    return tuple(entry.id for entry in _ENTRIES)


def counters_of_type(counter_type: str) -> tuple[CounterId, ...]:
    if counter_type not in _BY_TYPE:
        raise CatalogError(UNKNOWN_TYPE, f"unknown counter type {counter_type!r}")
    return tuple(_BY_TYPE[counter_type])


def resolve_clause(clause: Clause) -> tuple[CounterId, ...]:
    """Resolve a clause to counter identities; empty counter lists expand to the whole type."""
    of_type = counters_of_type(clause.counter_type)
    if not clause.counters:
        return of_type
    valid = {c.name for c in of_type}
    resolved = []
    for name in clause.counters:
        if name not in valid:
            raise CatalogError(
                UNKNOWN_COUNTER,
                f"unknown counter {name!r} for type {clause.counter_type!r}",
            )
        resolved.append(CounterId(clause.counter_type, name))
    return sort_counters(resolved)


def backend_event(backend: str, counter: CounterId) -> str:
    """Backend-specific event name: a PAPI preset, or the dotted name for the soft backend."""
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "soft":
        return counter.dotted
    entry = _BY_ID.get(counter)
    if entry is None:
        raise CatalogError(UNKNOWN_COUNTER, f"unknown counter {counter.dotted!r}")
    event = entry.backend_events.get(backend)
    if event is None:
        raise CatalogError(
            UNSUPPORTED_COUNTER,
            f"backend {backend!r} has no event for {counter.dotted!r}",
        )
    return event
