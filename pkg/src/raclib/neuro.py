"""Millimeter brain coordinates grouped by region and cubic-centimeter block.

A coordinate is encoded per axis as a sign letter plus the magnitude's
digits, so (-41, 12, -35) is "n41p12n35"; zero takes 'p'. A block names the
10 mm cube a coordinate falls in by sign and decade per axis: "n4_xp1_yn3_z"
covers (-4[0-9], 1[0-9], -3[0-9]). Coordinates of one (region, block) group
are stored as consecutive fixed-width records, one serial-index line per
group, so a block query is one index scan plus one contiguous read.
"""

from __future__ import annotations

import re
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple

from .errors import NotFoundError
from .serial_index import SerialIndex, SerialIndexEntry
from .store import RecordStore

COORD_BOUND = 999  # 3-digit encoding per axis
COORD_RECORD_SIZE = 16
BLOCK_CAPACITY = 1000  # a cm^3 holds at most 10*10*10 lattice points

DATA_FILE = "voxels.raclib"
INDEX_FILE = "regions.index"

_COORD_RE = re.compile(r"([pn])(\d{1,3})([pn])(\d{1,3})([pn])(\d{1,3})")


class Voxel(NamedTuple):
    x: int
    y: int
    z: int


def _check_bounds(v: Voxel) -> None:
    for component in v:
        if not -COORD_BOUND <= component <= COORD_BOUND:
            raise ValueError(f"coordinate component out of range [-999, 999]: {v}")


def _axis_code(value: int) -> str:
    return ("p" if value >= 0 else "n") + str(abs(value))


def encode_coord(v: Voxel) -> str:
    """Sign+digits per axis, concatenated: (-41, 12, -35) -> "n41p12n35"."""
    v = Voxel(*v)
    _check_bounds(v)
    return "".join(_axis_code(c) for c in v)


def decode_coord(name: str) -> Voxel:
    """Inverse of encode_coord; rejects anything but canonical names."""
    m = _COORD_RE.fullmatch(name)
    if not m:
        raise ValueError(f"malformed coordinate name: {name!r}")
    components = []
    for sign, digits in zip(m.groups()[::2], m.groups()[1::2]):
        value = int(digits)
        if str(value) != digits:  # leading zeros are never produced
            raise ValueError(f"non-canonical digits in coordinate name: {name!r}")
        if sign == "n":
            if value == 0:
                raise ValueError(f"negative zero in coordinate name: {name!r}")
            value = -value
        components.append(value)
    return Voxel(*components)


def block_of(v: Voxel) -> str:
    """Name of the cm^3 block containing v: sign and decade per axis.

    p0 covers 0..9, n0 covers -9..-1, n4 covers -49..-40, and so on.
    """
    v = Voxel(*v)
    _check_bounds(v)
    return "".join(
        f"{'p' if c >= 0 else 'n'}{abs(c) // 10}_{axis}" for c, axis in zip(v, "xyz")
    )


def _pack_coord(v: Voxel) -> bytes:
    return encode_coord(v).encode("ascii").ljust(COORD_RECORD_SIZE, b"\x00")


def _unpack_coord(raw: bytes) -> Voxel:
    return decode_coord(raw.rstrip(b"\x00").decode("ascii"))


class RegionLibrary:
    """Voxel store grouped region-by-region, block-by-block."""

    def __init__(self, store: RecordStore, index: SerialIndex):
        self.store = store
        self.index = index

    @classmethod
    def build(cls, regions: Mapping[str, Iterable[Voxel]], out_dir: str | Path) -> "RegionLibrary":
        """Write one library and index for a region -> voxels map.

        Blocks of a region stay contiguous and appear in first-use order;
        voxels keep input order within their block. A voxel may appear only
        once per region.
        """
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        store = RecordStore.create(out_dir / DATA_FILE, record_size=COORD_RECORD_SIZE)
        index = SerialIndex.create(out_dir / INDEX_FILE)

        blob = bytearray()
        entries = []
        start = 0
        for region, voxels in regions.items():
            seen: set[Voxel] = set()
            grouped: dict[str, list[Voxel]] = {}
            for voxel in voxels:
                voxel = Voxel(*voxel)
                if voxel in seen:
                    raise ValueError(f"duplicate voxel {voxel} in region {region}")
                seen.add(voxel)
                grouped.setdefault(block_of(voxel), []).append(voxel)
            for block, members in grouped.items():
                assert len(members) <= BLOCK_CAPACITY
                for voxel in members:
                    blob += _pack_coord(voxel)
                entries.append(SerialIndexEntry(region, block, start, len(members)))
                start += len(members)

        store.append_payload(bytes(blob))
        for entry in entries:
            index.append(entry)
        return cls(store, index)

    @classmethod
    def open(cls, directory: str | Path) -> "RegionLibrary":
        directory = Path(directory)
        return cls(RecordStore.open(directory / DATA_FILE), SerialIndex(directory / INDEX_FILE))

    def _read_group(self, entry: SerialIndexEntry) -> list[Voxel]:
        data = self.store.read_records(entry.start, entry.count)
        return [
            _unpack_coord(data[i * COORD_RECORD_SIZE : (i + 1) * COORD_RECORD_SIZE])
            for i in range(entry.count)
        ]

    def block_voxels(self, region: str, block: str) -> list[Voxel]:
        """One index lookup plus one contiguous read."""
        return self._read_group(self.index.lookup(region, block))

    def region_voxels(self, region: str) -> list[Voxel]:
        """All the region's voxels, its blocks concatenated in index order."""
        voxels = []
        found = False
        for entry in self.index.entries():
            if entry.name == region:
                found = True
                voxels.extend(self._read_group(entry))
        if not found:
            raise NotFoundError(f"no region {region!r} in index")
        return voxels

    def close(self) -> None:
        self.store.close()
        self.index.close()


def read_atlas_tsv(path: str | Path) -> dict[str, list[Voxel]]:
    """Parse region/x/y/z TSV lines into a region -> voxels map (file order)."""
    regions: dict[str, list[Voxel]] = {}
    with open(path, "r", encoding="ascii") as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 4:
                raise ValueError(f"{path}:{lineno}: expected region<TAB>x<TAB>y<TAB>z")
            regions.setdefault(fields[0], []).append(Voxel(*map(int, fields[1:])))
    return regions
