#!/usr/bin/env python3
"""Expand data/sources/*.txt into data/matches/*.csv."""
import csv
import datetime as dt
import pathlib
import re
import sys

ROOT = pathlib.Path(__file__).resolve().parent.parent
LINE = re.compile(
    r"^(?:(\d{4}-\d{2}-\d{2})\s+)?(.+?)\s+-\s+(.+?)\s+(\d+):(\d+)(?:\s+@(N|H1|H2))?$"
)
GROUP_DAYS = [0, 0, 4, 4, 8, 8]


def venue(t1, t2, hosts, home):
    if home:
        return "H1"
    if t1 in hosts:
        return "H1"
    if t2 in hosts:
        return "H2"
    return "N"


def parse(path):
    out = {}
    name = None
    for raw in path.read_text().splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("=="):
            parts = line[2:].split()
            name = parts[0]
            start = dt.date.fromisoformat(parts[1])
            spec = parts[2] if len(parts) > 2 else ""
            home = spec == "@home"
            hosts = set() if home else {h for h in spec.split(",") if h}
            mode, base, idx = "D", 0, 0
            out[name] = []
            continue
        if line.startswith("--"):
            arg = line[2:].strip()
            if arg == "G":
                mode, base, idx = "G", 0, 0
            else:
                mode, base, idx = "N", int(arg), 0
            continue
        m = LINE.match(line)
        if not m or name is None:
            sys.exit(f"{path.name}: cannot parse {raw!r}")
        date, t1, t2, g1, g2, vo = m.groups()
        if date:
            day = dt.date.fromisoformat(date)
        elif mode == "G":
            day = start + dt.timedelta(days=GROUP_DAYS[idx % 6] + (idx // 6) // 2)
        elif mode == "N":
            day = start + dt.timedelta(days=base + idx // 2)
        else:
            sys.exit(f"{path.name}: undated line {raw!r}")
        idx += 1
        v = vo or venue(t1, t2, hosts, home)
        out[name].append((day.isoformat(), t1, t2, int(g1), int(g2), v))
    return out


def main():
    dest = ROOT / "data" / "matches"
    dest.mkdir(parents=True, exist_ok=True)
    for old in dest.glob("*.csv"):
        old.unlink()
    total = 0
    for src in sorted((ROOT / "data" / "sources").glob("*.txt")):
        for name, rows in parse(src).items():
            rows.sort(key=lambda r: r[0])
            with open(dest / f"{name}.csv", "w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(["date", "team1", "team2", "goals1", "goals2", "venue"])
                w.writerows(rows)
            total += len(rows)
    print(f"{total} matches")


if __name__ == "__main__":
    main()
