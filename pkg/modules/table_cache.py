"""SQLite cache of trace tables and sieve-run history."""
import json
import sqlite3
from pathlib import Path
from typing import Any, Dict, List, Optional

from .logger import get_logger
from .traces import TraceTable

logger = get_logger('table_cache')


class TraceTableCache:
    """Store serialized trace tables so repeated runs skip point counting."""

    def __init__(self, db_path: str):
        """Initialize the cache.

        Args:
            db_path: Path to SQLite database file.
        """
        self.db_path = Path(db_path)
        self.db_path.parent.mkdir(parents=True, exist_ok=True)
        self.conn = None
        self._init_database()

    def _init_database(self):
        """Initialize database and create tables."""
        self.conn = sqlite3.connect(str(self.db_path))
        self.conn.row_factory = sqlite3.Row

        cursor = self.conn.cursor()

        cursor.execute("""
            CREATE TABLE IF NOT EXISTS trace_tables (
                descriptor TEXT PRIMARY KEY,
                family TEXT,
                r INTEGER,
                q INTEGER,
                constraint_text TEXT,
                class_count INTEGER,
                created_at TIMESTAMP DEFAULT CURRENT_TIMESTAMP,
                body TEXT
            )
        """)

        cursor.execute("""
            CREATE TABLE IF NOT EXISTS sieve_runs (
                id INTEGER PRIMARY KEY AUTOINCREMENT,
                profile TEXT,
                status TEXT,
                created_at TIMESTAMP DEFAULT CURRENT_TIMESTAMP,
                report_file TEXT,
                bound TEXT
            )
        """)

        self.conn.commit()
        logger.debug(f"Trace table cache at {self.db_path}")

    def get_table(self, descriptor: str) -> Optional[TraceTable]:
        """Return the cached table for a descriptor, or None."""
        cursor = self.conn.cursor()
        cursor.execute("SELECT body FROM trace_tables WHERE descriptor = ?", (descriptor,))
        row = cursor.fetchone()
        if row is None:
            return None
        logger.debug(f"Cache hit for {descriptor}")
        return TraceTable.from_text(row['body'])

    def get_text(self, descriptor: str) -> Optional[str]:
        cursor = self.conn.cursor()
        cursor.execute("SELECT body FROM trace_tables WHERE descriptor = ?", (descriptor,))
        row = cursor.fetchone()
        return row['body'] if row else None

    def put_table(self, table: TraceTable):
        """Store a table under its descriptor."""
        cursor = self.conn.cursor()
        cursor.execute("""
            INSERT OR REPLACE INTO trace_tables
            (descriptor, family, r, q, constraint_text, class_count, body)
            VALUES (?, ?, ?, ?, ?, ?, ?)
        """, (table.descriptor, table.family, table.r, table.q, table.constraint,
              len(table), table.to_text()))
        self.conn.commit()
        logger.debug(f"Cached {table.descriptor} ({len(table)} classes)")

    def save_run(self, profile: str, status: str, bound: Dict[str, Any], report_file: str = None):
        """Record a sieve run.

        Args:
            profile: Profile name.
            status: 'unconditional', 'conditional' or 'failed'.
            bound: ExponentBound dictionary.
            report_file: Path of the written report, if any.
        """
        cursor = self.conn.cursor()
        cursor.execute("""
            INSERT INTO sieve_runs (profile, status, report_file, bound)
            VALUES (?, ?, ?, ?)
        """, (profile, status, report_file, json.dumps(bound, default=str)))
        self.conn.commit()
        logger.info(f"Saved {status} run for profile {profile}")

    def get_recent_runs(self, count: int = 7) -> List[Dict[str, Any]]:
        """Get recent run records, newest first."""
        cursor = self.conn.cursor()
        cursor.execute("""
            SELECT * FROM sieve_runs
            ORDER BY id DESC
            LIMIT ?
        """, (count,))

        runs = []
        for row in cursor.fetchall():
            run = dict(row)
            try:
                run['bound'] = json.loads(run['bound'])
            except (json.JSONDecodeError, TypeError):
                pass
            runs.append(run)
        return runs

    def get_stats(self) -> Dict[str, Any]:
        """Get cache statistics.

        Returns:
            Dictionary with statistics.
        """
        cursor = self.conn.cursor()

        cursor.execute("SELECT COUNT(*) as count FROM trace_tables")
        total_tables = cursor.fetchone()['count']

        cursor.execute("SELECT COALESCE(SUM(class_count), 0) as total FROM trace_tables")
        total_classes = cursor.fetchone()['total']

        cursor.execute("SELECT COUNT(*) as count FROM sieve_runs")
        total_runs = cursor.fetchone()['count']

        cursor.execute("""
            SELECT profile, status, created_at FROM sieve_runs
            ORDER BY id DESC
            LIMIT 1
        """)
        recent_run = cursor.fetchone()

        return {
            'cached_tables': total_tables,
            'cached_classes': total_classes,
            'total_runs': total_runs,
            'most_recent_run': dict(recent_run) if recent_run else None
        }

    def close(self):
        """Close database connection."""
        if self.conn:
            self.conn.close()
            self.conn = None
            logger.debug("Database connection closed")

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.close()
