#!/usr/bin/env python3
#
# Copyright 2026 The puffercal Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
#
"""Downloads the UCI tables used by the builtin scenarios.

Files land in <dest>/adult, <dest>/heart and <dest>/student. The UCI
archive is tried first. When it is unreachable, copies shipped inside
PyPI packages are used instead (adult via `responsibly`, the Cleveland
heart table via `scikit-lego`).
"""

import argparse
import io
import pathlib
import subprocess
import sys
import tempfile
import urllib.request
import zipfile

UCI = "https://archive.ics.uci.edu/ml/machine-learning-databases"

SOURCES = {
    "adult": {
        "urls": {
            "adult.data": f"{UCI}/adult/adult.data",
            "adult.test": f"{UCI}/adult/adult.test",
        },
        "wheel": ("responsibly==0.1.2", {
            "adult.data": "responsibly/dataset/adult/adult.data",
            "adult.test": "responsibly/dataset/adult/adult.test",
        }),
    },
    "heart": {
        "urls": {},
        "wheel": ("scikit-lego==0.9.10", {
            "heart.csv": ("sklego/data/hearts.zip", "heart.csv"),
        }),
    },
    "student": {
        "zip_url": (f"{UCI}/00320/student.zip", "student-mat.csv"),
        "urls": {},
        "wheel": None,
    },
}


def fetch(url, timeout=30):
    with urllib.request.urlopen(url, timeout=timeout) as response:
        return response.read()


def from_wheel(requirement, members):
    with tempfile.TemporaryDirectory() as tmp:
        subprocess.run(
            [sys.executable, "-m", "pip", "download", "--no-deps", "--quiet",
             "--only-binary=:all:", "-d", tmp, requirement],
            check=True)
        wheel = next(pathlib.Path(tmp).glob("*.whl"))
        out = {}
        with zipfile.ZipFile(wheel) as archive:
            for name, member in members.items():
                if isinstance(member, tuple):
                    inner, leaf = member
                    with zipfile.ZipFile(io.BytesIO(archive.read(inner))) as nested:
                        out[name] = nested.read(leaf)
                else:
                    out[name] = archive.read(member)
        return out


def fetch_dataset(name, spec, dest):
    target = dest / name
    target.mkdir(parents=True, exist_ok=True)
    files = {}
    try:
        if "zip_url" in spec:
            url, leaf = spec["zip_url"]
            with zipfile.ZipFile(io.BytesIO(fetch(url))) as archive:
                files[leaf] = archive.read(leaf)
        for fname, url in spec["urls"].items():
            files[fname] = fetch(url)
        if not files:
            raise OSError("no direct URL")
    except OSError as err:
        if spec["wheel"] is None:
            print(f"{name}: download failed ({err}); no fallback", file=sys.stderr)
            return False
        print(f"{name}: direct download unavailable ({err}); using PyPI copy",
              file=sys.stderr)
        files = from_wheel(*spec["wheel"])
    for fname, data in files.items():
        (target / fname).write_bytes(data)
        print(f"{name}: wrote {target / fname} ({len(data)} bytes)")
    return True


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--dest", default="data/uci", type=pathlib.Path)
    parser.add_argument("datasets", nargs="*", default=list(SOURCES))
    args = parser.parse_args()
    ok = True
    for name in args.datasets:
        if name not in SOURCES:
            parser.error(f"unknown dataset {name}")
        ok = fetch_dataset(name, SOURCES[name], args.dest) and ok
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
