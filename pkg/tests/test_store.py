import json
import sqlite3

import pytest

from certificates.store import CertificateStore
from certificates.verdict import Verdict
from utils.codec import digest

DOCUMENT = {"schema": "reiter/1", "action": "lamplighter", "epsilon": {"num": "7", "den": "24"}}


@pytest.fixture
def store(tmp_path):
    s = CertificateStore(str(tmp_path / "ledger.db"))
    yield s
    s.close()


def test_save_and_list(store):
    assert store.save(DOCUMENT, Verdict.accept())
    assert store.is_recorded(digest(DOCUMENT))
    entries = store.list()
    assert len(entries) == 1
    entry = entries[0]
    assert entry["schema"] == "reiter/1"
    assert entry["action"] == "lamplighter"
    assert entry["accepted"] is True
    assert entry["digest"] == digest(DOCUMENT)


def test_duplicates_are_skipped(store):
    assert store.save(DOCUMENT, Verdict.accept())
    # key order does not change the digest
    reordered = dict(reversed(list(DOCUMENT.items())))
    assert not store.save(reordered, Verdict.reject("ratio below theta"))
    assert len(store.list()) == 1


def test_list_filters_by_schema(store):
    store.save(DOCUMENT, Verdict.accept())
    other = {"schema": "folner-set/1", "action": "z-shift", "theta": "9/10"}
    store.save(other, Verdict.reject("ratio below theta"))
    rejected = store.list("folner-set/1")
    assert [e["reason"] for e in rejected] == ["ratio below theta"]
    assert not rejected[0]["accepted"]
    assert len(store.list()) == 2


def test_load_by_prefix_and_remove(store):
    store.save(DOCUMENT, Verdict.accept())
    key = digest(DOCUMENT)
    assert store.load(key[:10]) == DOCUMENT
    assert store.load("zzz") is None
    assert store.remove(key)
    assert not store.remove(key)
    assert store.list() == []


def test_old_ledger_is_migrated(tmp_path):
    path = str(tmp_path / "old.db")
    conn = sqlite3.connect(path)
    conn.execute('''
        CREATE TABLE certificates (
            id INTEGER PRIMARY KEY AUTOINCREMENT,
            schema TEXT NOT NULL,
            digest TEXT NOT NULL UNIQUE,
            verdict INTEGER NOT NULL,
            payload TEXT NOT NULL,
            created_at TEXT
        )
    ''')
    conn.execute(
        "INSERT INTO certificates (schema, digest, verdict, payload, created_at) VALUES (?, ?, ?, ?, ?)",
        ("reiter/1", digest(DOCUMENT), 1, json.dumps(DOCUMENT), "2024-01-01T00:00:00"),
    )
    conn.commit()
    conn.close()

    store = CertificateStore(path)
    try:
        entries = store.list()
        assert entries[0]["action"] == "lamplighter"
        assert entries[0]["reason"] == ""
        assert store.save({"schema": "matching/1", "size": 1}, Verdict.accept())
    finally:
        store.close()

    reopened = CertificateStore(path)
    assert len(reopened.list()) == 2
    reopened.close()
