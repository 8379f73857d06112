"""Result persistence: JSON detail records, CSV projection, markdown summary."""
from __future__ import annotations

import csv
import json
from pathlib import Path


class WorkspaceUnavailable(Exception):
    pass


def persist_results(records, directory, stem: str = "results") -> dict:
    """Write `<stem>.json`, `<stem>.csv`, and `<stem>.md`; returns the path manifest.

    The JSON file round-trips through `load_records`; the CSV is a flat
    projection with one xref namespace per column.
    """
    directory = Path(directory)
    rows = [r.to_dict() if hasattr(r, "to_dict") else dict(r) for r in records]
    namespaces = sorted({ns for row in rows for ns in row.get("xrefs", {})})

    json_path = directory / f"{stem}.json"
    csv_path = directory / f"{stem}.csv"
    md_path = directory / f"{stem}.md"
    try:
        directory.mkdir(parents=True, exist_ok=True)
        with open(json_path, "w", encoding="utf-8") as fh:
            json.dump(rows, fh, indent=2, sort_keys=True)
        with open(csv_path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["name", "sources"] + namespaces)
            for row in rows:
                writer.writerow(
                    [row.get("name", ""), ";".join(row.get("sources", []))]
                    + [row.get("xrefs", {}).get(ns, "") for ns in namespaces]
                )
        with open(md_path, "w", encoding="utf-8") as fh:
            fh.write(f"# Results: {stem}\n\n{len(rows)} results\n\n")
            if rows:
                fh.write("| name | sources |\n|---|---|\n")
                for row in rows[:10]:
                    fh.write(f"| {row.get('name', '')} | {';'.join(row.get('sources', []))} |\n")
    except OSError as exc:
        raise WorkspaceUnavailable(f"cannot write results under {directory}: {exc}") from exc
    return {"json": str(json_path), "csv": str(csv_path), "md": str(md_path)}


def load_records(json_path) -> list[dict]:
    with open(json_path, "r", encoding="utf-8") as fh:
        return json.load(fh)
