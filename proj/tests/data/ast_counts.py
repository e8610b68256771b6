#!/usr/bin/env python3
"""Prints JSON {ast class name: node count} for a source file, for the
parser shape-equivalence test."""

import ast
import json
import sys


def main():
    with open(sys.argv[1], "r", encoding="utf-8") as f:
        tree = ast.parse(f.read())
    counts = {}
    for node in ast.walk(tree):
        name = type(node).__name__
        counts[name] = counts.get(name, 0) + 1
    print(json.dumps(counts))


if __name__ == "__main__":
    main()
