#!/usr/bin/env python3
"""
Clear or delete the results database
"""

import argparse
import os
import sys
from pathlib import Path

sys.path.append(str(Path(__file__).parent.parent))

from utils.database import DEFAULT_DB_PATH, TABLES, ResultsDatabase


def drop_tables(db: ResultsDatabase):
    """Drop the result tables; setup_db.py recreates them"""
    conn = db.get_connection()
    cursor = conn.cursor()
    for table_name in TABLES:
        cursor.execute(f"DROP TABLE IF EXISTS {table_name}")
        print(f"🗑️ Dropped table: {table_name}")
    conn.commit()
    conn.close()
    print("💡 Run setup_db.py to recreate the schema")


def main():
    parser = argparse.ArgumentParser(description="Clear/reset the results database")
    parser.add_argument("--db-path", default=DEFAULT_DB_PATH, help="Path to database file")
    parser.add_argument("--clear-data", action="store_true", help="Clear all results but keep tables")
    parser.add_argument("--drop-tables", action="store_true", help="Drop all result tables")
    parser.add_argument("--delete-file", action="store_true", help="Delete the database file")
    parser.add_argument("--confirm", action="store_true", help="Skip confirmation prompt")

    args = parser.parse_args()

    if not any([args.clear_data, args.drop_tables, args.delete_file]):
        print("Please specify an action:")
        print("  --clear-data    : Clear all results but keep table structure")
        print("  --drop-tables   : Drop all tables (schema will be lost)")
        print("  --delete-file   : Delete the entire database file")
        return

    if not os.path.exists(args.db_path):
        print(f"❌ Database file {args.db_path} does not exist")
        sys.exit(1)

    if not args.confirm:
        response = input(f"Modify {args.db_path}? (y/N): ")
        if response.lower() != 'y':
            print("Cancelled")
            return

    try:
        if args.delete_file:
            os.remove(args.db_path)
            print(f"🗑️ Deleted database file: {args.db_path}")
        elif args.drop_tables:
            drop_tables(ResultsDatabase(args.db_path))
        else:
            ResultsDatabase(args.db_path).clear_all_data(confirm=True)
            print(f"🎯 Cleared all results from {args.db_path}")
    except Exception as e:
        print(f"❌ Error: {e}")
        sys.exit(1)


if __name__ == "__main__":
    main()
