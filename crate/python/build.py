#!/usr/bin/env python3
"""Builds the specsym_py extension module and stages it next to this file.

Run from anywhere:

    python3 python/build.py [--release]

Afterwards `import specsym_py` works with this directory on `sys.path`
(`smoke_test.py` arranges that itself).
"""

import argparse
import shutil
import subprocess
import sys
import sysconfig
from pathlib import Path

WORKSPACE = Path(__file__).resolve().parent.parent


def dylib_name() -> str:
    if sys.platform == "darwin":
        return "libspecsym_py.dylib"
    if sys.platform.startswith("win"):
        return "specsym_py.dll"
    return "libspecsym_py.so"


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--release", action="store_true", help="build with optimizations")
    args = parser.parse_args()

    profile = "release" if args.release else "dev"
    cmd = ["cargo", "build", "-p", "specsym-py", "--profile", profile]
    print("+", " ".join(cmd))
    subprocess.run(cmd, cwd=WORKSPACE, check=True)

    profile_dir = "release" if args.release else "debug"
    built = WORKSPACE / "target" / profile_dir / dylib_name()
    if not built.exists():
        print(f"error: expected cargo output at {built}", file=sys.stderr)
        return 1

    suffix = sysconfig.get_config_var("EXT_SUFFIX") or ".so"
    staged = Path(__file__).resolve().parent / f"specsym_py{suffix}"
    shutil.copy2(built, staged)
    print(f"staged {staged}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
