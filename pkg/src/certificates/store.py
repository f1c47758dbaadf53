import json
import logging
import os
import sqlite3
from datetime import datetime
from typing import Any, Dict, List, Optional

from certificates.verdict import Verdict
from utils.codec import digest

logger = logging.getLogger(__name__)

DB_PATH = os.path.join(os.path.dirname(__file__), '../../certificates.db')

# columns added after the first ledger layout, with their defaults
LATE_COLUMNS = {
    'action': "TEXT NOT NULL DEFAULT ''",
    'reason': "TEXT NOT NULL DEFAULT ''",
}


class CertificateStore:
    def __init__(self, path: Optional[str] = None):
        """
        Open (or create) the certificate ledger.

        Args:
            path: sqlite file; defaults to certificates.db at the repository root
        """
        self.path = path or DB_PATH
        self.conn = sqlite3.connect(self.path, check_same_thread=False)
        self.migrate_schema()

    def create_table(self):
        """Create the certificates table keyed by document digest."""
        with self.conn:
            self.conn.execute('''
                CREATE TABLE IF NOT EXISTS certificates (
                    id INTEGER PRIMARY KEY AUTOINCREMENT,
                    schema TEXT NOT NULL,
                    digest TEXT NOT NULL UNIQUE,
                    action TEXT NOT NULL DEFAULT '',
                    verdict INTEGER NOT NULL,
                    reason TEXT NOT NULL DEFAULT '',
                    payload TEXT NOT NULL,
                    created_at TEXT
                )
            ''')
            self.conn.execute('''
                CREATE INDEX IF NOT EXISTS idx_schema_action
                ON certificates(schema, action)
            ''')

    def migrate_schema(self):
        """Bring a ledger written by an older version up to the current columns."""
        cursor = self.conn.cursor()
        cursor.execute("""
            SELECT name FROM sqlite_master
            WHERE type='table' AND name='certificates'
        """)
        if cursor.fetchone() is None:
            self.create_table()
            return

        cursor.execute("PRAGMA table_info(certificates)")
        columns = {column[1] for column in cursor.fetchall()}
        missing = [name for name in LATE_COLUMNS if name not in columns]
        if not missing:
            return
        with self.conn:
            for name in missing:
                self.conn.execute(f"ALTER TABLE certificates ADD COLUMN {name} {LATE_COLUMNS[name]}")
            if 'action' in missing:
                rows = self.conn.execute("SELECT id, payload FROM certificates").fetchall()
                for row_id, payload in rows:
                    action = json.loads(payload).get('action', '')
                    self.conn.execute("UPDATE certificates SET action = ? WHERE id = ?", (str(action), row_id))
            self.conn.execute('''
                CREATE INDEX IF NOT EXISTS idx_schema_action
                ON certificates(schema, action)
            ''')
        logger.info(f"Migrated certificate ledger {self.path}: added {', '.join(missing)}")

    def is_recorded(self, document_digest: str) -> bool:
        cursor = self.conn.cursor()
        cursor.execute("SELECT 1 FROM certificates WHERE digest = ?", (document_digest,))
        return cursor.fetchone() is not None

    def save(self, document: Dict[str, Any], verdict: Verdict) -> bool:
        """
        Record a certificate document with its verdict.

        Returns:
            False when a document with the same digest is already recorded
        """
        document_digest = digest(document)
        if self.is_recorded(document_digest):
            logger.debug(f"Certificate {document_digest[:12]} already recorded")
            return False
        created_at = datetime.now().isoformat()
        with self.conn:
            self.conn.execute('''
                INSERT OR IGNORE INTO certificates
                (schema, digest, action, verdict, reason, payload, created_at)
                VALUES (?, ?, ?, ?, ?, ?, ?)
            ''', (
                document.get('schema', ''),
                document_digest,
                str(document.get('action', '')),
                int(verdict.accepted),
                verdict.reason,
                json.dumps(document, sort_keys=True),
                created_at,
            ))
        logger.info(f"Recorded {document.get('schema')} certificate {document_digest[:12]}")
        return True

    def list(self, schema: Optional[str] = None) -> List[Dict[str, Any]]:
        query = "SELECT schema, digest, action, verdict, reason, created_at FROM certificates"
        params = ()
        if schema:
            query += " WHERE schema = ?"
            params = (schema,)
        query += " ORDER BY id"
        rows = self.conn.execute(query, params).fetchall()
        return [
            {
                'schema': row[0],
                'digest': row[1],
                'action': row[2],
                'accepted': bool(row[3]),
                'reason': row[4],
                'created_at': row[5],
            }
            for row in rows
        ]

    def load(self, document_digest: str) -> Optional[Dict[str, Any]]:
        """Return the stored document for a digest (or a unique digest prefix)."""
        rows = self.conn.execute(
            "SELECT payload FROM certificates WHERE digest LIKE ?", (document_digest + '%',)
        ).fetchall()
        if len(rows) != 1:
            return None
        return json.loads(rows[0][0])

    def remove(self, document_digest: str) -> bool:
        with self.conn:
            cursor = self.conn.execute("DELETE FROM certificates WHERE digest = ?", (document_digest,))
        return cursor.rowcount > 0

    def close(self):
        self.conn.close()
