"""Self-describing experiment report files.

A report is a single text file `<experiment>-<confighash>.report.csv`:
comment header lines starting with `#` (format version, tool, echoed config,
seed), then named columnar sections, each introduced by a `[section]` line
followed by a CSV header row and data rows.  A sibling `.meta.json` carries
the summary key-value pairs.  Bodies are deterministic: no timestamps, fixed
float formatting, config-addressed file names.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from pathlib import Path

REPORT_VERSION = 1
TOOL_NAME = "lowertail"

_SECTION_RE = re.compile(r"^\[([A-Za-z0-9_.-]+)\]$")


class ReportFormatError(ValueError):
    pass


def format_value(v) -> str:
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def config_hash(config: dict) -> str:
    canon = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canon.encode()).hexdigest()[:12]


@dataclass
class Section:
    name: str
    columns: list[str]
    rows: list[list]

    def column(self, name: str) -> list:
        if name not in self.columns:
            raise ReportFormatError(f"section [{self.name}] has no column {name!r}")
        i = self.columns.index(name)
        return [row[i] for row in self.rows]


@dataclass
class Report:
    experiment: str
    config: dict
    seed: int
    sections: list[Section] = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    def add_section(self, name: str, columns: list[str], rows: list[list]) -> None:
        for row in rows:
            if len(row) != len(columns):
                raise ReportFormatError(
                    f"section [{name}]: row of width {len(row)} against {len(columns)} columns"
                )
        self.sections.append(Section(name=name, columns=list(columns), rows=[list(r) for r in rows]))

    def section(self, name: str) -> Section:
        for sec in self.sections:
            if sec.name == name:
                return sec
        raise ReportFormatError(f"report has no section [{name}]")

    @property
    def hash(self) -> str:
        return config_hash(self.config)

    @property
    def filename(self) -> str:
        return f"{self.experiment}-{self.hash}.report.csv"

    def body(self) -> str:
        lines = [
            f"# {TOOL_NAME}-report v{REPORT_VERSION}",
            f"# experiment: {self.experiment}",
            f"# seed: {self.seed}",
        ]
        for key in sorted(self.config):
            lines.append(f"# config: {key}={format_value(self.config[key])}")
        for sec in self.sections:
            lines.append(f"[{sec.name}]")
            lines.append(",".join(sec.columns))
            for row in sec.rows:
                lines.append(",".join(format_value(v) for v in row))
        return "\n".join(lines) + "\n"

    def write(self, out_dir) -> Path:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        path = out_dir / self.filename
        path.write_text(self.body())
        meta = {
            "experiment": self.experiment,
            "version": REPORT_VERSION,
            "tool": TOOL_NAME,
            "seed": self.seed,
            "config": {k: format_value(v) for k, v in sorted(self.config.items())},
            "config_hash": self.hash,
            "summary": {k: format_value(v) for k, v in sorted(self.summary.items())},
        }
        meta_path = out_dir / f"{self.experiment}-{self.hash}.meta.json"
        meta_path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
        return path


def _parse_cell(text: str):
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        pass
    if text == "true":
        return True
    if text == "false":
        return False
    return text


def read_report(path) -> Report:
    """Parses a report file back into a Report; refuses newer format versions."""
    path = Path(path)
    lines = path.read_text().splitlines()
    if not lines or not lines[0].startswith(f"# {TOOL_NAME}-report v"):
        raise ReportFormatError(f"{path}: missing report magic line")
    version = int(lines[0].rsplit("v", 1)[1])
    if version > REPORT_VERSION:
        raise ReportFormatError(
            f"{path}: format version {version} is newer than supported ({REPORT_VERSION})"
        )
    experiment = ""
    seed = 0
    config: dict = {}
    sections: list[Section] = []
    current: Section | None = None
    expecting_header = False
    for raw in lines[1:]:
        if raw.startswith("#"):
            text = raw[1:].strip()
            if text.startswith("experiment:"):
                experiment = text.split(":", 1)[1].strip()
            elif text.startswith("seed:"):
                seed = int(text.split(":", 1)[1].strip())
            elif text.startswith("config:"):
                kv = text.split(":", 1)[1].strip()
                k, _, v = kv.partition("=")
                config[k] = _parse_cell(v)
            continue
        m = _SECTION_RE.match(raw)
        if m:
            current = Section(name=m.group(1), columns=[], rows=[])
            sections.append(current)
            expecting_header = True
            continue
        if current is None:
            raise ReportFormatError(f"{path}: data row outside any section: {raw!r}")
        if expecting_header:
            current.columns = raw.split(",")
            expecting_header = False
        else:
            current.rows.append([_parse_cell(c) for c in raw.split(",")])
    meta_path = path.with_name(path.name.replace(".report.csv", ".meta.json"))
    summary = {}
    if meta_path.exists():
        summary = json.loads(meta_path.read_text()).get("summary", {})
    rep = Report(experiment=experiment, config=config, seed=seed, sections=sections,
                 summary=summary)
    return rep
