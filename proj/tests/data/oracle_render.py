#!/usr/bin/env python3
"""Reference-interpreter oracle: runs a program and prints one JSON object
{"stdout": ..., "variables": {...}} using the engine's documented rendering
rules (functions as "<function NAME>", modules as "<module 'NAME'>", repr
otherwise, 256-char truncation)."""

import io
import json
import sys
import types
from contextlib import redirect_stdout


def render(value):
    if isinstance(value, types.FunctionType):
        return f"<function {value.__name__}>"
    if isinstance(value, types.ModuleType):
        return f"<module '{value.__name__}'>"
    if isinstance(value, types.BuiltinFunctionType):
        return f"<built-in function {value.__name__}>"
    text = repr(value)
    if len(text) > 256:
        return text[:256] + "…(truncated)"
    return text


def main():
    path = sys.argv[1]
    with open(path, "r", encoding="utf-8") as f:
        source = f.read()
    env = {}
    sink = io.StringIO()
    with redirect_stdout(sink):
        exec(compile(source, path, "exec"), env)
    variables = {
        name: render(value)
        for name, value in env.items()
        if name != "__builtins__"
    }
    print(json.dumps({"stdout": sink.getvalue(), "variables": variables}))


if __name__ == "__main__":
    main()
