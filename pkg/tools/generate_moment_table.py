#!/usr/bin/env python3
"""Regenerate src/kronstats/data/moment_table.json by brute force.

Enumerates all set partitions of {1..k} and groups them by the multiset of
block sizes; the group count is the integer coefficient of the corresponding
symmetrized cumulant product in the explicit moment expansion.  Run from the
repository root:

    python tools/generate_moment_table.py
"""

import json
from collections import Counter
from pathlib import Path

MAX_ORDER = 6


def set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]


def main() -> None:
    table = {}
    for k in range(1, MAX_ORDER + 1):
        counts = Counter()
        for part in set_partitions(list(range(k))):
            sizes = tuple(sorted((len(block) for block in part), reverse=True))
            counts[sizes] += 1
        terms = [[coeff, list(sizes)] for sizes, coeff in sorted(counts.items(), reverse=True)]
        table[str(k)] = terms
    lines = [
        f'  "{k}": {json.dumps(terms, separators=(", ", ": "))}' for k, terms in table.items()
    ]
    out = Path(__file__).resolve().parents[1] / "src" / "kronstats" / "data" / "moment_table.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text("{\n" + ",\n".join(lines) + "\n}\n")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
