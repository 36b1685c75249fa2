"""
SQLite store for engine settings and run history.
Settings supply default bounds for the command line; the run history makes
rerun determinism observable.
"""

import hashlib
import os
import sqlite3
import logging
from typing import Dict, List, Optional

logger = logging.getLogger("Store")


def digest(*parts: str) -> str:
    """Stable digest of command inputs (arguments and file contents)."""
    h = hashlib.sha256()
    for part in parts:
        h.update(part.encode("utf-8"))
        h.update(b"\0")
    return h.hexdigest()


class EngineStore:
    """
    SQLite store manager.
    Provides methods for saving settings and recording command runs.
    """

    def __init__(self, db_path: str = None):
        """
        Initialize the store.

        Args:
            db_path: Path to database file. If None, default path will be used.
        """
        if db_path is None:
            user_home = os.path.expanduser("~")
            app_dir = os.path.join(user_home, ".ainfty_engine")

            if not os.path.exists(app_dir):
                os.makedirs(app_dir)

            self.db_path = os.path.join(app_dir, "engine.db")
        else:
            self.db_path = db_path

        self._create_tables()

    def _create_tables(self):
        """Creates required tables if they don't exist."""
        try:
            with sqlite3.connect(self.db_path) as conn:
                cursor = conn.cursor()

                cursor.execute('''
            CREATE TABLE IF NOT EXISTS user_settings (
                id INTEGER PRIMARY KEY AUTOINCREMENT,
                key TEXT NOT NULL UNIQUE,
                value TEXT,
                updated_at TIMESTAMP DEFAULT CURRENT_TIMESTAMP
            )
            ''')

                cursor.execute('''
            CREATE TABLE IF NOT EXISTS runs (
                id INTEGER PRIMARY KEY AUTOINCREMENT,
                command TEXT NOT NULL,
                arguments TEXT NOT NULL,
                digest TEXT NOT NULL,
                exit_code INTEGER,
                report TEXT,
                created_at TIMESTAMP DEFAULT CURRENT_TIMESTAMP
            )
            ''')

                conn.commit()
        except sqlite3.Error as e:
            logger.error(f"Error creating tables: {e}")

    def save_setting(self, key: str, value: str) -> bool:
        """
        Save a setting.

        Args:
            key: Setting key, e.g. ``max_arity`` or ``truncation``
            value: Setting value

        Returns:
            True if successful, False otherwise
        """
        try:
            with sqlite3.connect(self.db_path) as conn:
                cursor = conn.cursor()

                cursor.execute("SELECT id FROM user_settings WHERE key = ?", (key,))
                if cursor.fetchone():
                    cursor.execute(
                        '''
                UPDATE user_settings
                SET value = ?, updated_at = CURRENT_TIMESTAMP
                WHERE key = ?
                ''',
                        (value, key),
                    )
                else:
                    cursor.execute("INSERT INTO user_settings (key, value) VALUES (?, ?)", (key, value))

                conn.commit()
                return True
        except sqlite3.Error as e:
            logger.error(f"Error saving setting {key}: {e}")
            return False

    def get_setting(self, key: str, default_value: Optional[str] = None) -> Optional[str]:
        try:
            with sqlite3.connect(self.db_path) as conn:
                cursor = conn.cursor()
                cursor.execute("SELECT value FROM user_settings WHERE key = ?", (key,))
                result = cursor.fetchone()
                return result[0] if result else default_value
        except sqlite3.Error as e:
            logger.error(f"Error getting setting {key}: {e}")
            return default_value

    def record_run(self, command: str, arguments: str, run_digest: str, exit_code: int, report: str) -> bool:
        """
        Record a finished command run.

        Returns:
            True if successful, False otherwise
        """
        try:
            with sqlite3.connect(self.db_path) as conn:
                cursor = conn.cursor()
                cursor.execute(
                    '''
            INSERT INTO runs (command, arguments, digest, exit_code, report)
            VALUES (?, ?, ?, ?, ?)
            ''',
                    (command, arguments, run_digest, exit_code, report),
                )
                conn.commit()
                return True
        except sqlite3.Error as e:
            logger.error(f"Error recording run of {command}: {e}")
            return False

    def last_report(self, command: str, run_digest: str) -> Optional[str]:
        """Report of the latest run with identical inputs, or None."""
        try:
            with sqlite3.connect(self.db_path) as conn:
                cursor = conn.cursor()
                cursor.execute(
                    "SELECT report FROM runs WHERE command = ? AND digest = ? ORDER BY id DESC LIMIT 1",
                    (command, run_digest),
                )
                result = cursor.fetchone()
                return result[0] if result else None
        except sqlite3.Error as e:
            logger.error(f"Error reading runs of {command}: {e}")
            return None

    def get_runs(self, command: Optional[str] = None) -> List[Dict]:
        """
        Get recorded runs, newest first.

        Returns:
            List of run dictionaries
        """
        runs = []
        try:
            with sqlite3.connect(self.db_path) as conn:
                conn.row_factory = sqlite3.Row
                cursor = conn.cursor()
                if command is None:
                    cursor.execute("SELECT * FROM runs ORDER BY id DESC")
                else:
                    cursor.execute("SELECT * FROM runs WHERE command = ? ORDER BY id DESC", (command,))
                for row in cursor.fetchall():
                    runs.append({
                        'id': row['id'],
                        'command': row['command'],
                        'arguments': row['arguments'],
                        'digest': row['digest'],
                        'exit_code': row['exit_code'],
                        'report': row['report'],
                    })
        except sqlite3.Error as e:
            logger.error(f"Error getting runs: {e}")

        return runs
