import random

import pytest

from raclib.errors import DuplicateKeyError, NotFoundError
from raclib.serial_index import SerialIndex, SerialIndexEntry


@pytest.fixture
def index(tmp_path):
    return SerialIndex.create(tmp_path / "pages.index")


def test_line_format_matches_legacy_layout(index):
    index.append(SerialIndexEntry("TallyHo1965", "0404", 4050730, 348))
    assert index.path.read_text() == "TallyHo1965 0404 4050730 348\n"


def test_minimal_entry(index):
    index.append(SerialIndexEntry("T", "0", 0, 0))
    assert index.path.read_text() == "T 0 0 0\n"


def test_extended_entry_carries_byte_length(index):
    index.append(SerialIndexEntry("TallyHo1965", "0404", 4050730, 348, byte_length=355_321))
    entry = index.lookup("TallyHo1965", "0404")
    assert entry.byte_length == 355_321
    assert entry.to_ref(1024).byte_length == 355_321


def test_whitespace_in_token_rejected():
    with pytest.raises(ValueError):
        SerialIndexEntry("A B", "1", 0, 1)
    with pytest.raises(ValueError):
        SerialIndexEntry("A", "1\n", 0, 1)
    with pytest.raises(ValueError):
        SerialIndexEntry("", "1", 0, 1)


def test_duplicate_name_key_rejected(index):
    index.append(SerialIndexEntry("T", "1", 0, 1))
    with pytest.raises(DuplicateKeyError):
        index.append(SerialIndexEntry("T", "1", 5, 2))


def test_lookup_finds_entry(index):
    index.append(SerialIndexEntry("Other", "0404", 1, 2))
    index.append(SerialIndexEntry("TallyHo1965", "0404", 4050730, 348))
    entry = index.lookup("TallyHo1965", "0404")
    assert (entry.start, entry.count) == (4050730, 348)


def test_lookup_whole_token_not_substring(index):
    index.append(SerialIndexEntry("TallyHo1965", "0404", 4050730, 348))
    with pytest.raises(NotFoundError):
        index.lookup("TallyHo1965", "040")
    with pytest.raises(NotFoundError):
        index.lookup("TallyHo", "0404")


def test_lookup_missing_entry(index):
    with pytest.raises(NotFoundError):
        index.lookup("NoSuchTitle", "0001")


def test_legacy_four_field_line_resolves_to_whole_records(tmp_path):
    path = tmp_path / "old.index"
    path.write_text("TallyHo1965 0404 4050730 348\n")
    entry = SerialIndex(path).lookup("TallyHo1965", "0404")
    assert entry.byte_length is None
    ref = entry.to_ref(1024)
    assert ref.byte_length == 348 * 1024


def test_entry_count_empty(index):
    assert index.entry_count() == 0


def test_entry_count_warns_past_advisory_limit(tmp_path):
    index = SerialIndex.create(tmp_path / "big.index")
    for i in range(150_000):
        index.append(SerialIndexEntry(f"n{i}", "0", i, 1))
    with pytest.warns(UserWarning, match="150000"):
        assert index.entry_count() == 150_000


def test_build_then_query_equivalence(index):
    rng = random.Random(11)
    written = {}
    for i in range(300):
        entry = SerialIndexEntry(
            name=f"title{rng.randrange(100)}",
            key=f"{rng.randrange(10_000):04d}",
            start=rng.randrange(10**7),
            count=rng.randrange(1, 500),
            byte_length=rng.randrange(1, 500 * 1024),
        )
        if (entry.name, entry.key) in written:
            continue
        index.append(entry)
        written[(entry.name, entry.key)] = entry
    for (name, key), entry in written.items():
        assert index.lookup(name, key) == entry


def test_lookup_returns_first_match_in_legacy_file(tmp_path):
    # Duplicate lines can exist in externally built indexes; first line wins.
    path = tmp_path / "dup.index"
    path.write_text("T 0404 100 5\nT 0404 900 9\n")
    entry = SerialIndex(path).lookup("T", "0404")
    assert (entry.start, entry.count) == (100, 5)


def test_reopen_detects_existing_duplicates(tmp_path):
    index = SerialIndex.create(tmp_path / "i")
    index.append(SerialIndexEntry("a", "1", 0, 1))
    index.close()
    again = SerialIndex(tmp_path / "i")
    with pytest.raises(DuplicateKeyError):
        again.append(SerialIndexEntry("a", "1", 0, 1))
