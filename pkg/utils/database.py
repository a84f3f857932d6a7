"""
Results store for index reports, Monte-Carlo estimates and sweeps
"""

import json
import os
import sqlite3
from datetime import datetime
from typing import Any, Dict, List, Optional

from models.report import IndexEstimate, IndexReport
from utils.logger import setup_logger

DEFAULT_DB_PATH = "data/hetnet.db"
TABLES = ('runs', 'index_records', 'estimates', 'sweep_rows')


class ResultsDatabase:
    """sqlite store of everything the command line produced"""

    def __init__(self, db_path: str = DEFAULT_DB_PATH):
        self.db_path = db_path
        self.logger = setup_logger(__name__)
        self._ensure_database_exists()

    def _ensure_database_exists(self):
        os.makedirs(os.path.dirname(self.db_path) or ".", exist_ok=True)

        if not os.path.exists(self.db_path):
            self.logger.info(f"Creating new database: {self.db_path}")
            self.create_tables()
        else:
            self._create_missing_tables()

    def get_connection(self) -> sqlite3.Connection:
        conn = sqlite3.connect(self.db_path)
        conn.row_factory = sqlite3.Row
        return conn

    def create_tables(self):
        """Create all necessary tables"""
        try:
            conn = self.get_connection()
            cursor = conn.cursor()

            cursor.execute('''
                CREATE TABLE IF NOT EXISTS runs (
                    id INTEGER PRIMARY KEY AUTOINCREMENT,
                    command TEXT NOT NULL,
                    network TEXT,
                    config_path TEXT,
                    started_at TIMESTAMP,
                    completed_at TIMESTAMP DEFAULT CURRENT_TIMESTAMP,
                    exit_code INTEGER DEFAULT 0,
                    success BOOLEAN DEFAULT 1,
                    error_message TEXT
                )
            ''')

            cursor.execute('''
                CREATE TABLE IF NOT EXISTS index_records (
                    id INTEGER PRIMARY KEY AUTOINCREMENT,
                    run_id INTEGER,
                    network TEXT NOT NULL,
                    regime TEXT,
                    connection TEXT NOT NULL,
                    c_index TEXT,  -- JSON {cycle: value}
                    n_index TEXT,
                    source TEXT,
                    caveats TEXT,  -- JSON list
                    pas_network BOOLEAN,
                    created_at TIMESTAMP DEFAULT CURRENT_TIMESTAMP,
                    FOREIGN KEY (run_id) REFERENCES runs (id)
                )
            ''')

            cursor.execute('''
                CREATE TABLE IF NOT EXISTS estimates (
                    id INTEGER PRIMARY KEY AUTOINCREMENT,
                    run_id INTEGER,
                    network TEXT NOT NULL,
                    connection TEXT NOT NULL,
                    level TEXT NOT NULL,
                    sigma TEXT,
                    sigma_plus TEXT,
                    sigma_minus TEXT,
                    samples INTEGER,
                    seed INTEGER,
                    eps_grid TEXT,  -- JSON list
                    attracted_fraction TEXT,  -- JSON list
                    created_at TIMESTAMP DEFAULT CURRENT_TIMESTAMP,
                    FOREIGN KEY (run_id) REFERENCES runs (id)
                )
            ''')

            cursor.execute('''
                CREATE TABLE IF NOT EXISTS sweep_rows (
                    id INTEGER PRIMARY KEY AUTOINCREMENT,
                    run_id INTEGER,
                    row_index INTEGER NOT NULL,
                    regime TEXT,
                    values_json TEXT,  -- the full CSV row
                    error TEXT,
                    FOREIGN KEY (run_id) REFERENCES runs (id)
                )
            ''')

            self._create_indexes(cursor)

            conn.commit()
            conn.close()

            self.logger.info("Database tables created successfully")

        except Exception as e:
            self.logger.error(f"Error creating tables: {e}")
            raise

    def _create_indexes(self, cursor):
        indexes = [
            "CREATE INDEX IF NOT EXISTS idx_records_network ON index_records(network)",
            "CREATE INDEX IF NOT EXISTS idx_records_run ON index_records(run_id)",
            "CREATE INDEX IF NOT EXISTS idx_estimates_connection ON estimates(network, connection)",
            "CREATE INDEX IF NOT EXISTS idx_sweep_run ON sweep_rows(run_id)",
        ]
        for index_sql in indexes:
            cursor.execute(index_sql)

    def _create_missing_tables(self):
        """Check and create any missing tables"""
        try:
            conn = self.get_connection()
            cursor = conn.cursor()
            cursor.execute("SELECT name FROM sqlite_master WHERE type='table';")
            existing_tables = {row[0] for row in cursor.fetchall()}
            conn.close()

            missing_tables = set(TABLES) - existing_tables
            if missing_tables:
                self.logger.info(f"Creating missing tables: {missing_tables}")
                self.create_tables()

        except Exception as e:
            self.logger.error(f"Error checking tables: {e}")

    # ==========================================
    # Writes
    # ==========================================

    def log_run_session(self, command: str, network: Optional[str], started_at: datetime,
                        config_path: Optional[str] = None, exit_code: int = 0,
                        error_message: Optional[str] = None) -> int:
        try:
            conn = self.get_connection()
            cursor = conn.cursor()
            cursor.execute('''
                INSERT INTO runs (command, network, config_path, started_at, exit_code, success, error_message)
                VALUES (?, ?, ?, ?, ?, ?, ?)
            ''', (command, network, config_path, started_at.isoformat(), exit_code, exit_code == 0, error_message))
            run_id = cursor.lastrowid
            conn.commit()
            conn.close()
            return run_id

        except Exception as e:
            self.logger.error(f"Error logging run session: {e}")
            return 0

    def finish_run_session(self, run_id: int, exit_code: int, error_message: Optional[str] = None) -> bool:
        try:
            conn = self.get_connection()
            cursor = conn.cursor()
            cursor.execute('''
                UPDATE runs SET exit_code = ?, success = ?, error_message = ?,
                    completed_at = CURRENT_TIMESTAMP
                WHERE id = ?
            ''', (exit_code, exit_code == 0, error_message, run_id))
            affected = cursor.rowcount
            conn.commit()
            conn.close()
            return affected > 0

        except Exception as e:
            self.logger.error(f"Error finishing run session: {e}")
            return False

    def save_report(self, report: IndexReport, run_id: Optional[int] = None) -> int:
        """Store one row per connection; returns the number of rows written"""
        try:
            conn = self.get_connection()
            cursor = conn.cursor()
            for record in report.records:
                cursor.execute('''
                    INSERT INTO index_records (
                        run_id, network, regime, connection, c_index, n_index,
                        source, caveats, pas_network
                    ) VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?)
                ''', (
                    run_id, report.network, report.regime, record.connection,
                    json.dumps({cycle: value.to_json() for cycle, value in record.c_index.items()}),
                    json.dumps(record.n_index.to_json()),
                    record.source, json.dumps(record.caveats), report.pas.network,
                ))
            conn.commit()
            conn.close()
            return len(report.records)

        except Exception as e:
            self.logger.error(f"Error saving report: {e}")
            return 0

    def save_estimate(self, estimate: IndexEstimate, run_id: Optional[int] = None):
        try:
            conn = self.get_connection()
            cursor = conn.cursor()
            cursor.execute('''
                INSERT INTO estimates (
                    run_id, network, connection, level, sigma, sigma_plus, sigma_minus,
                    samples, seed, eps_grid, attracted_fraction
                ) VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?)
            ''', (
                run_id, estimate.network, estimate.connection, estimate.level,
                json.dumps(estimate.sigma.to_json()), json.dumps(estimate.sigma_plus.to_json()),
                json.dumps(estimate.sigma_minus.to_json()), estimate.samples, estimate.seed,
                json.dumps(estimate.eps_grid), json.dumps(estimate.attracted_fraction),
            ))
            conn.commit()
            conn.close()
            return "inserted"

        except Exception as e:
            self.logger.error(f"Error saving estimate: {e}")
            return False

    def save_estimates_batch(self, estimates: List[IndexEstimate], run_id: Optional[int] = None) -> Dict[str, int]:
        stats = {"inserted": 0, "errors": 0}

        for estimate in estimates:
            if self.save_estimate(estimate, run_id) == "inserted":
                stats["inserted"] += 1
            else:
                stats["errors"] += 1

        self.logger.info(f"Batch save complete: {stats}")
        return stats

    def save_sweep_rows(self, rows: List[Dict[str, Any]], run_id: Optional[int] = None) -> Dict[str, int]:
        stats = {"inserted": 0, "errors": 0, "failed_rows": 0}
        try:
            conn = self.get_connection()
            cursor = conn.cursor()
            for index, row in enumerate(rows):
                try:
                    cursor.execute('''
                        INSERT INTO sweep_rows (run_id, row_index, regime, values_json, error)
                        VALUES (?, ?, ?, ?, ?)
                    ''', (run_id, index, row.get("regime"), json.dumps(row), row.get("error") or None))
                    stats["inserted"] += 1
                    if row.get("error"):
                        stats["failed_rows"] += 1
                except Exception as e:
                    self.logger.error(f"Error saving sweep row {index}: {e}")
                    stats["errors"] += 1
            conn.commit()
            conn.close()

        except Exception as e:
            self.logger.error(f"Error saving sweep rows: {e}")
            stats["errors"] = len(rows)

        return stats

    # ==========================================
    # Reads
    # ==========================================

    def get_reports(self, network: str = None, limit: int = None) -> List[Dict[str, Any]]:
        """Stored index records, newest first"""
        try:
            conn = self.get_connection()
            cursor = conn.cursor()

            query = "SELECT * FROM index_records"
            params = []
            if network:
                query += " WHERE network = ?"
                params.append(network)
            query += " ORDER BY id DESC"
            if limit:
                query += f" LIMIT {int(limit)}"

            cursor.execute(query, params)
            rows = cursor.fetchall()
            conn.close()
            return [self._row_to_record(row) for row in rows]

        except Exception as e:
            self.logger.error(f"Error getting reports: {e}")
            return []

    @staticmethod
    def _row_to_record(row) -> Dict[str, Any]:
        return {
            "run_id": row["run_id"],
            "network": row["network"],
            "regime": row["regime"],
            "connection": row["connection"],
            "c_index": json.loads(row["c_index"]),
            "n_index": json.loads(row["n_index"]),
            "source": row["source"],
            "caveats": json.loads(row["caveats"]),
            "pas_network": bool(row["pas_network"]),
        }

    def get_estimates(self, network: str = None, connection: str = None, limit: int = None) -> List[Dict[str, Any]]:
        try:
            conn = self.get_connection()
            cursor = conn.cursor()
            query = "SELECT * FROM estimates"
            conditions, params = [], []
            if network:
                conditions.append("network = ?")
                params.append(network)
            if connection:
                conditions.append("connection = ?")
                params.append(connection)
            if conditions:
                query += " WHERE " + " AND ".join(conditions)
            query += " ORDER BY id DESC"
            if limit:
                query += " LIMIT ?"
                params.append(limit)

            cursor.execute(query, params)
            rows = cursor.fetchall()
            conn.close()
            return [{key: row[key] for key in row.keys()} for row in rows]

        except Exception as e:
            self.logger.error(f"Error getting estimates: {e}")
            return []

    def get_database_stats(self) -> Dict[str, Any]:
        try:
            conn = self.get_connection()
            cursor = conn.cursor()

            stats = {}
            for table in TABLES:
                cursor.execute(f"SELECT COUNT(*) FROM {table}")
                stats[f"{table}_count"] = cursor.fetchone()[0]

            cursor.execute("SELECT command, COUNT(*) FROM runs GROUP BY command")
            stats['runs_by_command'] = dict(cursor.fetchall())

            cursor.execute("SELECT COUNT(*) FROM runs WHERE success = 0")
            stats['failed_runs'] = cursor.fetchone()[0]

            cursor.execute("SELECT network, COUNT(DISTINCT run_id) FROM index_records GROUP BY network")
            stats['reports_by_network'] = dict(cursor.fetchall())

            conn.close()
            return stats

        except Exception as e:
            self.logger.error(f"Error getting database stats: {e}")
            return {}

    def clear_all_data(self, confirm: bool = False) -> bool:
        """Clear all data from all tables but keep structure"""
        if not confirm:
            response = input(f"Clear all data from {self.db_path}? (y/N): ")
            if response.lower() != 'y':
                print("Cancelled")
                return False

        try:
            conn = self.get_connection()
            cursor = conn.cursor()

            for table_name in TABLES:
                cursor.execute(f"DELETE FROM {table_name}")
                self.logger.info(f"Cleared table: {table_name}")
            cursor.execute("DELETE FROM sqlite_sequence")

            conn.commit()
            conn.close()

            self.logger.info(f"Successfully cleared all data from {self.db_path}")
            return True

        except Exception as e:
            self.logger.error(f"Error clearing database: {e}")
            return False

    def print_database_status(self):
        if not os.path.exists(self.db_path):
            print(f"❌ Database file {self.db_path} does not exist")
            return

        stats = self.get_database_stats()
        if not stats:
            print(f"📊 Database {self.db_path} - unable to get stats")
            return

        print(f"📊 Database Status: {self.db_path}")
        print("=" * 50)
        print(f"  🔄 Runs: {stats.get('runs_count', 0):,} ({stats.get('failed_runs', 0):,} failed)")
        print(f"  📋 Index records: {stats.get('index_records_count', 0):,}")
        print(f"  🎲 Monte-Carlo estimates: {stats.get('estimates_count', 0):,}")
        print(f"  📈 Sweep rows: {stats.get('sweep_rows_count', 0):,}")

        if stats.get('runs_by_command'):
            print("  📊 By command:")
            for command, count in stats['runs_by_command'].items():
                print(f"     {command}: {count:,}")

        latest = self.get_estimates(limit=5)
        if latest:
            print("  🎲 Latest estimates:")
            for row in latest:
                sigma = json.loads(row["sigma"])
                print(f"     {row['network']} {row['connection']} ({row['level']}): "
                      f"sigma {sigma}, {row['samples']:,} samples")

        print("=" * 50)


def quick_save_report(report: IndexReport, db_path: str = DEFAULT_DB_PATH) -> int:
    return ResultsDatabase(db_path).save_report(report)


def quick_get_reports(network: str = None, limit: int = 50, db_path: str = DEFAULT_DB_PATH) -> List[Dict[str, Any]]:
    return ResultsDatabase(db_path).get_reports(network=network, limit=limit)


def quick_clear_database(db_path: str = DEFAULT_DB_PATH):
    return ResultsDatabase(db_path).clear_all_data()
