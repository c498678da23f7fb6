"""Human-readable line-per-member index, searched by serial whole-token match.

Each line locates one record set in a companion library:

    <name> <key> <start> <count>[ <byte_length>]

The optional fifth field is the exact payload length; four-field lines (the
legacy format) are accepted and resolve to the full padded record set.
Lookups scan from the top and match the name and key tokens exactly, never
by substring, so "040" does not hit "0404".
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path

from .errors import DuplicateKeyError, NotFoundError
from .store import RecordSetRef

# Beyond this many lines a serial scan stops being a sensible index.
ADVISORY_LINE_LIMIT = 100_000


def _check_token(field: str, value: str) -> None:
    if not value:
        raise ValueError(f"{field} must be non-empty")
    if any(c.isspace() for c in value):
        raise ValueError(f"{field} contains whitespace: {value!r}")


@dataclass(frozen=True)
class SerialIndexEntry:
    name: str
    key: str
    start: int
    count: int
    byte_length: int | None = None

    def __post_init__(self):
        _check_token("name", self.name)
        _check_token("key", self.key)
        if self.start < 0 or self.count < 0:
            raise ValueError(f"negative start/count: {self.start}/{self.count}")
        if self.byte_length is not None and self.byte_length < 0:
            raise ValueError(f"negative byte_length: {self.byte_length}")

    def line(self) -> str:
        fields = [self.name, self.key, str(self.start), str(self.count)]
        if self.byte_length is not None:
            fields.append(str(self.byte_length))
        return " ".join(fields) + "\n"

    @classmethod
    def parse(cls, line: str) -> "SerialIndexEntry":
        tokens = line.split()
        if len(tokens) not in (4, 5):
            raise ValueError(f"index line must have 4 or 5 fields: {line!r}")
        byte_length = int(tokens[4]) if len(tokens) == 5 else None
        return cls(tokens[0], tokens[1], int(tokens[2]), int(tokens[3]), byte_length)

    def to_ref(self, record_size: int) -> RecordSetRef:
        """Resolve to a record-set ref; legacy 4-field entries cover whole records."""
        byte_length = self.byte_length
        if byte_length is None:
            byte_length = self.count * record_size
        return RecordSetRef(start=self.start, count=self.count, byte_length=byte_length)


class SerialIndex:
    """Append-only index file with linear-scan lookup."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._seen: set[tuple[str, str]] | None = None
        self._appender = None

    @classmethod
    def create(cls, path: str | Path) -> "SerialIndex":
        path = Path(path)
        if path.exists():
            raise FileExistsError(f"index already exists: {path}")
        path.touch()
        return cls(path)

    def _load_seen(self) -> set[tuple[str, str]]:
        if self._seen is None:
            self._seen = set()
            with open(self.path, "r", encoding="ascii") as f:
                for line in f:
                    tokens = line.split()
                    if len(tokens) >= 2:
                        self._seen.add((tokens[0], tokens[1]))
        return self._seen

    def append(self, entry: SerialIndexEntry) -> None:
        seen = self._load_seen()
        if (entry.name, entry.key) in seen:
            raise DuplicateKeyError(f"duplicate index entry ({entry.name}, {entry.key})")
        if self._appender is None:
            self._appender = open(self.path, "a", encoding="ascii")
        # One write call per line, so concurrent readers never see a torn line.
        self._appender.write(entry.line())
        self._appender.flush()
        seen.add((entry.name, entry.key))

    def lookup(self, name: str, key: str) -> SerialIndexEntry:
        """Serial scan for the first line whose name and key both match exactly."""
        with open(self.path, "r", encoding="ascii") as f:
            for line in f:
                tokens = line.split()
                if len(tokens) >= 2 and tokens[0] == name and tokens[1] == key:
                    return SerialIndexEntry.parse(line)
        raise NotFoundError(f"no index entry for ({name}, {key})")

    def entries(self):
        """Yield all entries in file (append) order."""
        with open(self.path, "r", encoding="ascii") as f:
            for line in f:
                yield SerialIndexEntry.parse(line)

    def entry_count(self) -> int:
        with open(self.path, "r", encoding="ascii") as f:
            n = sum(1 for _ in f)
        if n > ADVISORY_LINE_LIMIT:
            warnings.warn(
                f"serial index {self.path} has {n} lines; serial scans degrade past "
                f"{ADVISORY_LINE_LIMIT} — consider a computed index",
                stacklevel=2,
            )
        return n

    def close(self) -> None:
        if self._appender is not None:
            self._appender.close()
            self._appender = None

    def __enter__(self) -> "SerialIndex":
        return self

    def __exit__(self, *exc) -> None:
        self.close()
