#!/usr/bin/env python
"""Regenerate requirements/*.txt from pyproject.toml.

One file per dependency group plus ``default.txt`` for the runtime
dependencies. Files for groups that no longer exist are removed.
"""

import sys
from pathlib import Path

try:  # standard module since Python 3.11
    import tomllib as toml
except ImportError:
    try:
        import tomli as toml
    except ImportError:
        sys.exit("Please install `tomli` first: `pip install tomli`")

REPO_DIR = Path(__file__).resolve().parent.parent
REQUIREMENTS_DIR = REPO_DIR / "requirements"
HEADER = [
    "# Generated via tools/generate_requirements.py and pre-commit hook.",
    "# Do not edit this file; modify pyproject.toml instead.",
]


def requirement_groups(pyproject: dict) -> dict[str, list[str]]:
    project = pyproject["project"]
    groups = {"default": list(project.get("dependencies", []))}
    groups.update(project.get("optional-dependencies", {}))
    return groups


def write_groups(groups: dict[str, list[str]]) -> list[Path]:
    REQUIREMENTS_DIR.mkdir(exist_ok=True)
    written = []
    for name, requirements in groups.items():
        target = REQUIREMENTS_DIR / f"{name}.txt"
        target.write_text("\n".join(HEADER + requirements) + "\n", encoding="utf-8")
        written.append(target)
    for stale in REQUIREMENTS_DIR.glob("*.txt"):
        if stale not in written:
            stale.unlink()
    return written


def main() -> None:
    pyproject = toml.loads((REPO_DIR / "pyproject.toml").read_text(encoding="utf-8"))
    for path in write_groups(requirement_groups(pyproject)):
        print(path.relative_to(REPO_DIR).as_posix())


if __name__ == "__main__":
    main()
