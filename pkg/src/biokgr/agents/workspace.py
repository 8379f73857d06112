"""Per-run file workspace and the typed analysis-action vocabulary.

Agents act on retrieved data through a closed set of deterministic table
operations (filter, join, aggregate, extract, dedup) over workspace files
instead of free-form code execution. Every saved artifact is registered in
`manifest.json` with a one-sentence description.
"""
from __future__ import annotations

import csv
import io
import json
import re
from pathlib import Path


class WorkspaceUnavailable(Exception):
    pass


class AnalysisError(Exception):
    pass


class Workspace:
    def __init__(self, root):
        self.root = Path(root)
        try:
            self.root.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise WorkspaceUnavailable(f"cannot create workspace {root}: {exc}") from exc
        self._manifest_path = self.root / "manifest.json"
        if not self._manifest_path.exists():
            self._write_manifest({"files": []})

    # -- manifest ----------------------------------------------------------------

    def manifest(self) -> dict:
        with open(self._manifest_path, "r", encoding="utf-8") as fh:
            return json.load(fh)

    def _write_manifest(self, manifest: dict) -> None:
        try:
            with open(self._manifest_path, "w", encoding="utf-8") as fh:
                json.dump(manifest, fh, indent=2, sort_keys=True)
        except OSError as exc:
            raise WorkspaceUnavailable(str(exc)) from exc

    def register(self, relpath: str, description: str) -> None:
        manifest = self.manifest()
        entries = [e for e in manifest["files"] if e["path"] != relpath]
        entries.append({"path": relpath, "description": description})
        manifest["files"] = sorted(entries, key=lambda e: e["path"])
        self._write_manifest(manifest)

    def exists(self, relpath: str) -> bool:
        return (self.root / relpath).exists()

    # -- writers ------------------------------------------------------------------

    def _open_out(self, relpath: str):
        path = self.root / relpath
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            return open(path, "w", encoding="utf-8", newline="")
        except OSError as exc:
            raise WorkspaceUnavailable(f"cannot write {path}: {exc}") from exc

    def save_json(self, relpath: str, payload, description: str) -> str:
        with self._open_out(relpath) as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
        self.register(relpath, description)
        return relpath

    def save_csv(self, relpath: str, rows: list[dict], description: str) -> str:
        columns = sorted({key for row in rows for key in row})
        with self._open_out(relpath) as fh:
            writer = csv.DictWriter(fh, fieldnames=columns)
            writer.writeheader()
            for row in rows:
                writer.writerow({k: row.get(k, "") for k in columns})
        self.register(relpath, description)
        return relpath

    def save_text(self, relpath: str, text: str, description: str) -> str:
        with self._open_out(relpath) as fh:
            fh.write(text)
        self.register(relpath, description)
        return relpath

    # -- readers --------------------------------------------------------------------

    def read_text(self, relpath: str) -> str:
        try:
            with open(self.root / relpath, "r", encoding="utf-8") as fh:
                return fh.read()
        except OSError as exc:
            raise WorkspaceUnavailable(f"cannot read {relpath}: {exc}") from exc

    def read_table(self, relpath: str) -> list[dict]:
        """JSON list-of-objects or CSV file as a list of row dicts."""
        text = self.read_text(relpath)
        if relpath.endswith(".json"):
            payload = json.loads(text)
            if isinstance(payload, list):
                return [row for row in payload if isinstance(row, dict)]
            raise AnalysisError(f"{relpath} is not a JSON table")
        reader = csv.DictReader(io.StringIO(text))
        return [dict(row) for row in reader]


def run_analysis(workspace: Workspace, spec: dict) -> str:
    """Execute one typed analysis action; returns the output file's relpath.

    Supported ops:
      filter     {input, out, where: {col: value}} or {input, out, contains: {col, text}}
      join       {left, right, on, out}
      aggregate  {input, group_by, out}            (count per group)
      extract    {input, pattern, out}             (regex findall over the file text)
      dedup      {input, key, out}
    """
    op = spec.get("op")
    out = spec.get("out")
    if not op or not out:
        raise AnalysisError("analysis spec needs 'op' and 'out'")

    if op == "filter":
        rows = workspace.read_table(spec["input"])
        if "where" in spec:
            where = spec["where"]
            rows = [r for r in rows if all(str(r.get(k, "")) == str(v) for k, v in where.items())]
        elif "contains" in spec:
            col, text = spec["contains"]["col"], spec["contains"]["text"]
            rows = [r for r in rows if text.casefold() in str(r.get(col, "")).casefold()]
        else:
            raise AnalysisError("filter needs 'where' or 'contains'")
        return workspace.save_json(out, rows, f"filter of {spec['input']}")

    if op == "join":
        left = workspace.read_table(spec["left"])
        right = workspace.read_table(spec["right"])
        on = spec["on"]
        index: dict[str, dict] = {}
        for row in right:
            index.setdefault(str(row.get(on, "")), row)
        joined = []
        for row in left:
            match = index.get(str(row.get(on, "")))
            if match:
                merged = dict(match)
                merged.update(row)
                joined.append(merged)
        return workspace.save_json(out, joined, f"join of {spec['left']} and {spec['right']}")

    if op == "aggregate":
        rows = workspace.read_table(spec["input"])
        group_by = spec["group_by"]
        counts: dict[str, int] = {}
        for row in rows:
            key = str(row.get(group_by, ""))
            counts[key] = counts.get(key, 0) + 1
        table = [{"key": k, "count": v} for k, v in sorted(counts.items())]
        return workspace.save_json(out, table, f"counts of {spec['input']} by {group_by}")

    if op == "extract":
        text = workspace.read_text(spec["input"])
        matches = sorted(set(re.findall(spec["pattern"], text)))
        return workspace.save_json(out, matches, f"regex extraction from {spec['input']}")

    if op == "dedup":
        rows = workspace.read_table(spec["input"])
        key = spec["key"]
        seen: set[str] = set()
        deduped = []
        for row in rows:
            value = str(row.get(key, ""))
            if value not in seen:
                seen.add(value)
                deduped.append(row)
        return workspace.save_json(out, deduped, f"dedup of {spec['input']} by {key}")

    raise AnalysisError(f"unknown analysis op {op!r}")
